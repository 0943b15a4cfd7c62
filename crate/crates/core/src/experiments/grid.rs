use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::percolation::critical_point;

const SNAP: f64 = 1e10;

fn snap(x: f64) -> f64 {
    (x * SNAP).round() / SNAP
}

/// How a grid of contagion probabilities is laid out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridSpec {
    Uniform { step: f64 },
    /// Coarse spacing on `[0, 1]` with a fine band on `[fine_lo, fine_hi]`.
    Refined { coarse_step: f64, fine_step: f64, fine_lo: f64, fine_hi: f64 },
    /// Fine band of `±half_width` around the graph's degree-moment critical point.
    AroundCritical { coarse_step: f64, fine_step: f64, half_width: f64 },
    Explicit { points: Vec<f64> },
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::AroundCritical { coarse_step: 0.025, fine_step: 0.0025, half_width: 0.1 }
    }
}

impl GridSpec {
    pub fn resolve(&self, g: &Graph) -> Result<PGrid> {
        match self {
            GridSpec::Uniform { step } => PGrid::uniform(*step),
            GridSpec::Refined { coarse_step, fine_step, fine_lo, fine_hi } => {
                PGrid::refined(*coarse_step, *fine_step, *fine_lo, *fine_hi)
            }
            GridSpec::AroundCritical { coarse_step, fine_step, half_width } => {
                let pc = critical_point(g)?;
                PGrid::refined(*coarse_step, *fine_step, pc - half_width, pc + half_width)
            }
            GridSpec::Explicit { points } => PGrid::explicit(points.clone()),
        }
    }
}

/// Strictly increasing probabilities in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PGrid {
    points: Vec<f64>,
    construction: GridSpec,
}

impl PGrid {
    pub fn uniform(step: f64) -> Result<PGrid> {
        if !(step > 0.0 && step <= 1.0) {
            return Err(Error::Input(format!("grid step {step} must lie in (0, 1]")));
        }
        let count = (1.0 / step + 1e-9).floor() as usize;
        let mut points: Vec<f64> = (0..=count).map(|i| snap(i as f64 * step)).collect();
        if *points.last().unwrap() < 1.0 {
            points.push(1.0);
        }
        Ok(PGrid { points, construction: GridSpec::Uniform { step } })
    }

    pub fn refined(coarse_step: f64, fine_step: f64, fine_lo: f64, fine_hi: f64) -> Result<PGrid> {
        if !(fine_step > 0.0 && fine_step <= coarse_step) {
            return Err(Error::Input(format!(
                "fine step {fine_step} must be positive and no larger than the coarse step {coarse_step}"
            )));
        }
        let lo = fine_lo.clamp(0.0, 1.0);
        let hi = fine_hi.clamp(0.0, 1.0);
        if lo > hi {
            return Err(Error::Input(format!("fine band [{fine_lo}, {fine_hi}] is empty")));
        }
        let coarse = PGrid::uniform(coarse_step)?;
        let mut points: Vec<f64> = coarse
            .points
            .into_iter()
            .filter(|&p| p <= lo || p >= hi)
            .collect();
        let fine_count = ((hi - lo) / fine_step + 1e-9).floor() as usize;
        points.extend((0..=fine_count).map(|j| snap(lo + j as f64 * fine_step)));
        points.push(snap(hi));
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        points.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        Ok(PGrid {
            points,
            construction: GridSpec::Refined { coarse_step, fine_step, fine_lo, fine_hi },
        })
    }

    pub fn explicit(points: Vec<f64>) -> Result<PGrid> {
        if points.is_empty() {
            return Err(Error::Input("grid has no points".into()));
        }
        if let Some(p) = points.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Input(format!("grid point {p} outside [0, 1]")));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Input("grid points must be strictly increasing".into()));
        }
        Ok(PGrid { construction: GridSpec::Explicit { points: points.clone() }, points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn construction(&self) -> &GridSpec {
        &self.construction
    }
}

/// True when `ps` starts at 0 and ends at 1.
pub(crate) fn covers_unit_interval(ps: &[f64]) -> bool {
    ps.len() >= 2 && ps[0].abs() < 1e-9 && (ps[ps.len() - 1] - 1.0).abs() < 1e-9
}
