//! Bond-percolation predictions: the critical point of a degree sequence, the
//! measured giant-cluster fraction, and the seed-count dependence of the
//! random benchmark below and above the transition.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::{CascadeParams, Percolation};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::trial_rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PercolationSummary {
    pub p: f64,
    /// Mean largest-cluster fraction.
    pub s: f64,
    /// Mean of `Σ s² / n` over trials: the expected cluster size seen from a random node.
    pub mean_cluster_size: f64,
    pub trials: usize,
}

/// `<k> / (<k²> - <k>)` from the empirical degree moments.
pub fn critical_point_from_degrees(degrees: &[usize]) -> Result<f64> {
    if degrees.is_empty() {
        return Err(Error::Input("empty degree sequence".into()));
    }
    let n = degrees.len() as f64;
    let mean = degrees.iter().map(|&k| k as f64).sum::<f64>() / n;
    let second = degrees.iter().map(|&k| (k as f64).powi(2)).sum::<f64>() / n;
    if second <= mean {
        return Err(Error::UndefinedTransition { mean, second_moment: second });
    }
    Ok(mean / (second - mean))
}

pub fn critical_point(g: &Graph) -> Result<f64> {
    critical_point_from_degrees(&g.degrees())
}

/// Measures the largest-cluster fraction at `p` over `trials` realizations.
pub fn measure_s(g: &Graph, p: f64, trials: usize, rng_seed: u64) -> Result<PercolationSummary> {
    CascadeParams::new(p).validate()?;
    if trials == 0 {
        return Err(Error::Input("trials must be at least 1".into()));
    }
    let n = g.node_count();
    if n == 0 {
        return Err(Error::Input("graph has no nodes".into()));
    }
    let (largest, chi) = (0..trials as u64)
        .into_par_iter()
        .fold(
            || (Percolation::new(n), 0u64, 0.0f64),
            |(mut perc, mut largest, mut chi), t| {
                perc.sample(g, p, &mut trial_rng(rng_seed, t));
                largest += perc.largest_cluster_size() as u64;
                chi += perc.mean_cluster_size();
                (perc, largest, chi)
            },
        )
        .map(|(_, l, c)| (l, c))
        .reduce(|| (0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let t = trials as f64;
    Ok(PercolationSummary {
        p,
        s: largest as f64 / (n as f64 * t),
        mean_cluster_size: chi / t,
        trials,
    })
}

/// Order-of-magnitude influence of `k` random seeds below the transition:
/// `k` clusters of size `O(log n)`, returned unnormalized as `k ln n`.
pub fn predict_random_influence_low(k: usize, n: usize) -> f64 {
    k as f64 * (n as f64).ln()
}

/// Expected influence fraction of `k` random seeds above the transition,
/// `S [1 - (1 - S)^k] + k (1 - S) ln(n) / n`.
pub fn predict_random_influence_high(k: usize, n: usize, s: f64) -> f64 {
    let miss = (1.0 - s).powi(k as i32);
    s * (1.0 - miss) + k as f64 * (1.0 - s) * (n as f64).ln() / n as f64
}

/// Solves `S = 1 - exp(-c S)` for the ER giant-cluster fraction at mean
/// open-degree `c` by fixed-point iteration; zero for `c <= 1`.
pub fn er_giant_fraction(c: f64) -> f64 {
    if c <= 1.0 {
        return 0.0;
    }
    let mut s = 1.0;
    for _ in 0..10_000 {
        let next = 1.0 - (-c * s).exp();
        if (next - s).abs() < 1e-15 {
            return next;
        }
        s = next;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate_er, generate_small_world};
    use crate::graph::connected_components;
    use crate::influence::estimate_random_choice;

    #[test]
    fn regular_sequence_critical_point() {
        let pc = critical_point_from_degrees(&[4; 100]).unwrap();
        assert!((pc - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn poisson_moments_give_inverse_mean_degree() {
        // Poisson: <k²> = <k>² + <k>
        let mean = 3.0f64;
        let second = mean * mean + mean;
        assert!((mean / (second - mean) - 1.0 / mean).abs() < 1e-12);
        // and a large ER sample lands close to 1/3
        let g = generate_er(20_000, 3.0, 1).unwrap();
        let pc = critical_point(&g).unwrap();
        assert!((pc - 1.0 / 3.0).abs() < 0.02, "{pc}");
    }

    #[test]
    fn mean_preserving_spread_lowers_critical_point() {
        let narrow = vec![4usize; 100];
        let mut wide = vec![4usize; 100];
        for i in 0..25 {
            wide[2 * i] = 2;
            wide[2 * i + 1] = 6;
        }
        let pc_narrow = critical_point_from_degrees(&narrow).unwrap();
        let pc_wide = critical_point_from_degrees(&wide).unwrap();
        assert!(pc_wide < pc_narrow);
    }

    #[test]
    fn duplicating_nodes_keeps_critical_point() {
        let g = generate_er(500, 3.0, 2).unwrap();
        let degrees = g.degrees();
        let doubled: Vec<usize> = degrees.iter().chain(degrees.iter()).copied().collect();
        let a = critical_point_from_degrees(&degrees).unwrap();
        let b = critical_point_from_degrees(&doubled).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn undefined_transition_without_spread() {
        assert!(matches!(
            critical_point_from_degrees(&[1, 1, 1, 1]),
            Err(Error::UndefinedTransition { .. })
        ));
        assert!(matches!(critical_point_from_degrees(&[0, 0]), Err(Error::UndefinedTransition { .. })));
    }

    #[test]
    fn s_at_the_extremes() {
        let g = generate_small_world(200, 4, 0.0, 1).unwrap();
        assert_eq!(measure_s(&g, 1.0, 5, 0).unwrap().s, 1.0);
        let low = measure_s(&g, 0.0, 5, 0).unwrap();
        assert!((low.s - 1.0 / 200.0).abs() < 1e-15);
        assert!((low.mean_cluster_size - 1.0).abs() < 1e-12);
    }

    #[test]
    fn er_giant_cluster_matches_self_consistency() {
        let g = generate_er(2000, 3.0, 7).unwrap();
        let measured = measure_s(&g, 0.6, 200, 3).unwrap().s;
        let degree = 2.0 * g.edge_count() as f64 / 2000.0;
        let predicted = er_giant_fraction(degree * 0.6);
        assert!((measured - predicted).abs() < 0.02, "{measured} vs {predicted}");
        // residual of the fixed point itself
        let c = 1.8;
        let s = er_giant_fraction(c);
        assert!((s - (1.0 - (-c * s).exp())).abs() < 1e-12);
    }

    #[test]
    fn s_grows_with_p() {
        let g = generate_er(1000, 3.0, 3).unwrap();
        let mut last = 0.0;
        for (i, p) in [0.1, 0.3, 0.4, 0.5, 0.7, 0.9].iter().enumerate() {
            let s = measure_s(&g, *p, 100, i as u64).unwrap().s;
            assert!(s + 0.01 >= last, "p = {p}");
            last = s;
        }
    }

    #[test]
    fn low_phase_prediction_scales_linearly() {
        let one = predict_random_influence_low(1, 5000);
        assert!((predict_random_influence_low(2, 5000) - 2.0 * one).abs() < 1e-12);
        assert!((predict_random_influence_low(7, 5000) - 7.0 * one).abs() < 1e-9);
    }

    #[test]
    fn low_phase_random_influence_is_logarithmic() {
        let n = 2000;
        let g = generate_er(n, 3.0, 4).unwrap();
        for k in [1, 3, 5] {
            let est = estimate_random_choice(&g, k, &CascadeParams::new(0.1).with_seed(k as u64), 5000).unwrap();
            assert!(est.median as f64 <= 3.0 * predict_random_influence_low(k, n), "k = {k}: {est:?}");
        }
    }

    #[test]
    fn high_phase_prediction_properties() {
        for k in [1, 2, 5, 50] {
            assert!((predict_random_influence_high(k, 1000, 1.0) - 1.0).abs() < 1e-12);
        }
        let big_n = usize::MAX / 2;
        assert!((predict_random_influence_high(3, big_n, 0.5) - 0.4375).abs() < 1e-9);
        let mut last = 0.0;
        for k in 1..20 {
            let f = predict_random_influence_high(k, big_n, 0.4);
            assert!(f >= last);
            last = f;
        }
        assert!((predict_random_influence_high(200, big_n, 0.4) - 0.4).abs() < 1e-9);
        let mut last = 0.0;
        for s in [0.0, 0.2, 0.4, 0.6, 0.8, 1.0] {
            let f = predict_random_influence_high(3, big_n, s);
            assert!(f >= last);
            last = f;
        }
    }

    #[test]
    fn connected_graph_has_unit_s() {
        let g = generate_small_world(100, 4, 0.0, 1).unwrap();
        assert_eq!(connected_components(&g).len(), 1);
        assert_eq!(measure_s(&g, 1.0, 1, 0).unwrap().s, 1.0);
    }
}
