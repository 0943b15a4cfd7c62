use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::sweep::SweepResult;
use crate::experiments::utility::UtilityParams;

pub const CSV_HEADER: &str = "p,strategy,median,mean,se,cost_steps,utility";

/// One row per grid point per strategy, in grid then strategy order.
pub fn sweep_csv(sweep: &SweepResult, utility: &UtilityParams) -> String {
    let mut out = String::with_capacity(64 * sweep.points.len() * sweep.strategies.len());
    out.push_str(CSV_HEADER);
    out.push('\n');
    for pt in &sweep.points {
        for o in &pt.outcomes {
            let t = utility.strategy_time(&o.strategy, sweep.network.n, sweep.k, o.cost_steps);
            let u = utility.utility(o.estimate.median as f64, t);
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                pt.p,
                o.strategy.label(),
                o.estimate.median,
                o.estimate.mean,
                o.estimate.std_error,
                o.cost_steps,
                u
            )
            .unwrap();
        }
    }
    out
}

/// Reads `size,width` pairs; a non-numeric first line is taken as a header
/// and `#` lines are skipped.
pub fn parse_size_width_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let (mut sizes, mut widths) = (Vec::new(), Vec::new());
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match fields.as_slice() {
            [s, w, ..] => s.parse::<f64>().and_then(|s| w.parse::<f64>().map(|w| (s, w))),
            _ => {
                return Err(Error::Parse { line: i + 1, message: "expected `size,width`".into() });
            }
        };
        match parsed {
            Ok((s, w)) => {
                sizes.push(s);
                widths.push(w);
            }
            Err(_) if sizes.is_empty() && i == first_content_line(text) => continue,
            Err(e) => return Err(Error::Parse { line: i + 1, message: e.to_string() }),
        }
    }
    Ok((sizes, widths))
}

fn first_content_line(text: &str) -> usize {
    text.lines()
        .position(|l| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        })
        .unwrap_or(0)
}

/// Writes `bytes` to a temporary sibling file and renames it over `path`.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Input(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}
