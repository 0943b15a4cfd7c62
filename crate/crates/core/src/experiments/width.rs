use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::sweep::SweepResult;
use crate::experiments::utility::UtilityParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtLeast,
    Greater,
}

/// Measure of `{p : y(p) ≥ threshold}` (or `>`) for the linear interpolant of
/// the points `(ps[i], ys[i])`.
pub fn interval_measure(ps: &[f64], ys: &[f64], threshold: f64, cmp: Comparison) -> Result<f64> {
    if ps.len() != ys.len() {
        return Err(Error::Input(format!("{} grid points but {} values", ps.len(), ys.len())));
    }
    if ps.len() < 2 {
        return Err(Error::Input("width needs at least 2 grid points".into()));
    }
    let holds = |d: f64| match cmp {
        Comparison::AtLeast => d >= 0.0,
        Comparison::Greater => d > 0.0,
    };
    let mut total = 0.0;
    for (p, y) in ps.windows(2).zip(ys.windows(2)) {
        let len = p[1] - p[0];
        let (a, b) = (y[0] - threshold, y[1] - threshold);
        total += match (holds(a), holds(b)) {
            (true, true) => len,
            (false, false) => 0.0,
            // the crossing sits at fraction a / (a − b) of the segment
            (true, false) => len * a / (a - b),
            (false, true) => len * (1.0 - a / (a - b)),
        };
    }
    Ok(total)
}

/// Measure of the `p` range where hill-climbing beats the benchmark by at
/// least `threshold_fraction · n` nodes.
pub fn optimization_region_width(sweep: &SweepResult, threshold_fraction: f64) -> Result<f64> {
    let gain = sweep.marginal_gain()?;
    interval_measure(&sweep.ps(), &gain, threshold_fraction * sweep.network.n as f64, Comparison::AtLeast)
}

/// Measure of the `p` range where `(opt − rand)/(T − 1) > C/v` for hill-climbing.
pub fn positive_utility_width(sweep: &SweepResult, params: &UtilityParams) -> Result<f64> {
    positive_utility_width_for(sweep, "hill_climb", params)
}

pub fn positive_utility_width_for(sweep: &SweepResult, label: &str, params: &UtilityParams) -> Result<f64> {
    params.validate()?;
    let i = sweep
        .strategy_index(label)
        .ok_or_else(|| Error::Input(format!("sweep has no strategy `{label}`")))?;
    let strategy = &sweep.strategies[i];
    let rhs = params.cost_per_time / params.value_per_node;
    let gain = sweep.gain_over_random(label)?;
    let margin = sweep
        .points
        .iter()
        .zip(&gain)
        .map(|(pt, g)| {
            let t = params.strategy_time(strategy, sweep.network.n, sweep.k, pt.outcomes[i].cost_steps);
            if !(t > 1.0) {
                return Err(Error::DegenerateCost(t));
            }
            Ok(g / (t - 1.0) - rhs)
        })
        .collect::<Result<Vec<f64>>>()?;
    interval_measure(&sweep.ps(), &margin, 0.0, Comparison::Greater)
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_curve_has_zero_width() {
        let ps = [0.0, 0.5, 1.0];
        assert_eq!(interval_measure(&ps, &[0.0; 3], 1.0, Comparison::AtLeast).unwrap(), 0.0);
    }

    #[test]
    fn triangular_bump() {
        let n = 1000.0;
        let ps = [0.0, 0.3, 0.35, 0.4, 1.0];
        let ys = [0.0, 0.0, 0.02 * n, 0.0, 0.0];
        let w = interval_measure(&ps, &ys, 0.01 * n, Comparison::AtLeast).unwrap();
        assert!((w - 0.05).abs() < 1e-12);
    }

    #[test]
    fn flat_segment_on_threshold() {
        let ps = [0.0, 0.5, 1.0];
        let ys = [1.0, 1.0, 0.0];
        assert!((interval_measure(&ps, &ys, 1.0, Comparison::AtLeast).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(interval_measure(&ps, &ys, 1.0, Comparison::Greater).unwrap(), 0.0);
    }

    #[test]
    fn too_few_points() {
        assert!(interval_measure(&[0.5], &[1.0], 0.0, Comparison::AtLeast).is_err());
    }

    #[test]
    fn mean_std() {
        let (m, s) = mean_and_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-12);
    }

    /// Dense-sampling oracle for the interpolant's measure.
    fn sampled_measure(ps: &[f64], ys: &[f64], thr: f64) -> f64 {
        let steps = 200_000;
        let (lo, hi) = (ps[0], ps[ps.len() - 1]);
        let h = (hi - lo) / steps as f64;
        let mut j = 0;
        let mut count = 0;
        for s in 0..steps {
            let x = lo + (s as f64 + 0.5) * h;
            while x > ps[j + 1] {
                j += 1;
            }
            let t = (x - ps[j]) / (ps[j + 1] - ps[j]);
            if ys[j] + t * (ys[j + 1] - ys[j]) >= thr {
                count += 1;
            }
        }
        count as f64 * h
    }

    proptest! {
        #[test]
        fn width_matches_dense_sampling(ys in proptest::collection::vec(-1.0f64..1.0, 2..12), thr in -0.5f64..0.5) {
            let ps: Vec<f64> = (0..ys.len()).map(|i| i as f64 / (ys.len() - 1) as f64).collect();
            let w = interval_measure(&ps, &ys, thr, Comparison::AtLeast).unwrap();
            prop_assert!((w - sampled_measure(&ps, &ys, thr)).abs() < 1e-3);
        }

        #[test]
        fn width_non_increasing_in_threshold(ys in proptest::collection::vec(0.0f64..1.0, 2..12), a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let ps: Vec<f64> = (0..ys.len()).map(|i| i as f64 / (ys.len() - 1) as f64).collect();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let w_lo = interval_measure(&ps, &ys, lo, Comparison::AtLeast).unwrap();
            let w_hi = interval_measure(&ps, &ys, hi, Comparison::AtLeast).unwrap();
            prop_assert!(w_hi <= w_lo + 1e-12);
        }
    }
}
