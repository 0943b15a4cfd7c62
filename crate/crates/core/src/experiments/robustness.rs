use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::grid::PGrid;
use crate::experiments::sweep::{sweep, StrategySpec, SweepResult, SweepSettings};
use crate::experiments::utility::prior_expectation;
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassRatio {
    pub mass: usize,
    /// `∫ local_M(p) dp / ∫ opt(p) dp` over the uniform prior.
    pub ratio: f64,
}

/// Sweeps hill-climbing and one local variant per mass, then compares their
/// prior-integrated median influence.
pub fn m_robustness_ratio(
    g: &Graph,
    masses: &[usize],
    k: usize,
    grid: &PGrid,
    trials: usize,
    trials_per_eval: usize,
    rng_seed: u64,
) -> Result<(SweepResult, Vec<MassRatio>)> {
    if masses.is_empty() {
        return Err(Error::Input("no sub-network masses given".into()));
    }
    let mut strategies = vec![StrategySpec::HillClimb { trials_per_eval }];
    strategies.extend(masses.iter().map(|&mass| StrategySpec::Local { mass, trials_per_eval }));
    let settings = SweepSettings { k, trials, strategies, noise_sigma: 0.0, rng_seed };
    let result = sweep(g, grid, &settings)?;
    let ratios = robustness_ratios(&result)?;
    Ok((result, ratios))
}

/// Ratios for every local variant present in an existing sweep.
pub fn robustness_ratios(sweep: &SweepResult) -> Result<Vec<MassRatio>> {
    let ps = sweep.ps();
    let opt = prior_expectation(&ps, &sweep.medians("hill_climb")?)?;
    if opt <= 0.0 {
        return Err(Error::Input("hill-climbing curve integrates to zero".into()));
    }
    sweep
        .strategies
        .iter()
        .filter_map(|s| match s {
            StrategySpec::Local { mass, .. } => Some((*mass, s.label())),
            _ => None,
        })
        .map(|(mass, label)| {
            let local = prior_expectation(&ps, &sweep.medians(&label)?)?;
            Ok(MassRatio { mass, ratio: local / opt })
        })
        .collect()
}
