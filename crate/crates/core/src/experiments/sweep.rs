use std::borrow::Cow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::{sample_edge_probabilities, CascadeParams};
use crate::error::{Error, Result};
use crate::experiments::grid::PGrid;
use crate::graph::Graph;
use crate::influence::{estimate_sets_and_random_choice, InfluenceEstimate};
use crate::optimizers::{select_hill_climb, select_local, SeedSelection};
use crate::rng::{derive, tag};

/// A seed-selection strategy with its hyper-parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum StrategySpec {
    Random,
    HillClimb { trials_per_eval: usize },
    Local { mass: usize, trials_per_eval: usize },
}

impl StrategySpec {
    /// Label used in CSV rows: `random`, `hill_climb`, `local_m{M}`.
    pub fn label(&self) -> String {
        match self {
            StrategySpec::Random => "random".into(),
            StrategySpec::HillClimb { .. } => "hill_climb".into(),
            StrategySpec::Local { mass, .. } => format!("local_m{mass}"),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            StrategySpec::Random => Ok(()),
            StrategySpec::HillClimb { trials_per_eval } | StrategySpec::Local { trials_per_eval, .. }
                if trials_per_eval == 0 =>
            {
                Err(Error::Input(format!("{}: trials_per_eval must be at least 1", self.label())))
            }
            StrategySpec::Local { mass: 0, .. } => Err(Error::Input("local: mass must be at least 1".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    pub k: usize,
    /// Evaluation realizations per grid point.
    pub trials: usize,
    /// Strategies to run; the random benchmark is always included as the first one.
    pub strategies: Vec<StrategySpec>,
    /// Spread of per-edge probabilities around each grid value; 0 disables noise.
    #[serde(default)]
    pub noise_sigma: f64,
    pub rng_seed: u64,
}

/// What the sweep ran on.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NetworkDescriptor {
    pub family: String,
    pub n: usize,
    pub edges: usize,
    pub seed: Option<u64>,
}

impl NetworkDescriptor {
    pub fn for_graph(family: impl Into<String>, g: &Graph, seed: Option<u64>) -> NetworkDescriptor {
        NetworkDescriptor { family: family.into(), n: g.node_count(), edges: g.edge_count(), seed }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyOutcome {
    pub strategy: StrategySpec,
    /// Selected seeds; empty for the random benchmark, which draws a new set every trial.
    pub seeds: Vec<usize>,
    pub estimate: InfluenceEstimate,
    pub cost_steps: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub p: f64,
    /// One outcome per strategy, in the order of `SweepResult::strategies`.
    pub outcomes: Vec<StrategyOutcome>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub network: NetworkDescriptor,
    pub k: usize,
    pub trials: usize,
    pub noise_sigma: f64,
    pub rng_seed: u64,
    pub strategies: Vec<StrategySpec>,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn ps(&self) -> Vec<f64> {
        self.points.iter().map(|pt| pt.p).collect()
    }

    pub fn strategy_index(&self, label: &str) -> Option<usize> {
        self.strategies.iter().position(|s| s.label() == label)
    }

    fn index_or_err(&self, label: &str) -> Result<usize> {
        self.strategy_index(label)
            .ok_or_else(|| Error::Input(format!("sweep has no strategy `{label}`")))
    }

    /// Median influence per grid point for the strategy labelled `label`.
    pub fn medians(&self, label: &str) -> Result<Vec<f64>> {
        let i = self.index_or_err(label)?;
        Ok(self.points.iter().map(|pt| pt.outcomes[i].estimate.median as f64).collect())
    }

    pub fn costs(&self, label: &str) -> Result<Vec<u64>> {
        let i = self.index_or_err(label)?;
        Ok(self.points.iter().map(|pt| pt.outcomes[i].cost_steps).collect())
    }

    /// `opt - rand` per grid point, with hill-climbing as `opt`.
    pub fn marginal_gain(&self) -> Result<Vec<f64>> {
        self.gain_over_random("hill_climb")
    }

    pub fn gain_over_random(&self, label: &str) -> Result<Vec<f64>> {
        let opt = self.medians(label)?;
        let rand = self.medians("random")?;
        Ok(opt.iter().zip(&rand).map(|(o, r)| o - r).collect())
    }

    /// Grid point with the largest marginal gain (first one on ties).
    pub fn marginal_gain_peak(&self) -> Result<(f64, f64)> {
        let gain = self.marginal_gain()?;
        let mut best = 0;
        for (i, &g) in gain.iter().enumerate() {
            if g > gain[best] {
                best = i;
            }
        }
        Ok((self.points[best].p, gain[best]))
    }
}

/// Runs every strategy at every grid point and evaluates the chosen seed sets.
///
/// At each point the selections use streams derived from `(rng_seed, purpose,
/// point index)`; all local variants share their roots. The seed sets are then
/// scored on one shared batch of `trials` fresh realizations, so differences
/// between strategies are not blurred by independent sampling noise. The
/// random benchmark is the pick-at-random strategy itself: every realization
/// is scored against a newly drawn `k`-set.
pub fn sweep(g: &Graph, grid: &PGrid, settings: &SweepSettings) -> Result<SweepResult> {
    let n = g.node_count();
    if settings.k == 0 || settings.k > n {
        return Err(Error::Input(format!("k = {} must satisfy 1 <= k <= n = {n}", settings.k)));
    }
    if settings.trials == 0 {
        return Err(Error::Input("trials must be at least 1".into()));
    }
    if !(settings.noise_sigma >= 0.0 && settings.noise_sigma.is_finite()) {
        return Err(Error::Input(format!("noise_sigma = {} must be finite and >= 0", settings.noise_sigma)));
    }
    let mut strategies = vec![StrategySpec::Random];
    for s in &settings.strategies {
        s.validate()?;
        if !strategies.iter().any(|t| t.label() == s.label()) {
            strategies.push(s.clone());
        }
    }
    let points = grid
        .points()
        .par_iter()
        .enumerate()
        .map(|(i, &p)| sweep_point(g, p, i as u64, &strategies, settings))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        network: NetworkDescriptor::for_graph("unspecified", g, None),
        k: settings.k,
        trials: settings.trials,
        noise_sigma: settings.noise_sigma,
        rng_seed: settings.rng_seed,
        strategies,
        points,
    })
}

fn sweep_point(
    g: &Graph,
    p: f64,
    index: u64,
    strategies: &[StrategySpec],
    settings: &SweepSettings,
) -> Result<SweepPoint> {
    let seed = |purpose: u64| derive(settings.rng_seed, &[tag::POINT, index, purpose]);
    let graph: Cow<Graph> = if settings.noise_sigma > 0.0 {
        Cow::Owned(sample_edge_probabilities(g, p, settings.noise_sigma, seed(tag::NOISE))?)
    } else {
        Cow::Borrowed(g)
    };
    let selection_params = CascadeParams::new(p);
    let selections = strategies
        .iter()
        .map(|s| match *s {
            StrategySpec::Random => Ok(None),
            StrategySpec::HillClimb { trials_per_eval } => {
                select_hill_climb(&graph, settings.k, &selection_params, trials_per_eval, seed(tag::HILL_CLIMB))
                    .map(Some)
            }
            StrategySpec::Local { mass, trials_per_eval } => select_local(
                &graph,
                settings.k,
                mass,
                &selection_params,
                trials_per_eval,
                seed(tag::LOCAL),
            )
            .map(Some),
        })
        .collect::<Result<Vec<Option<SeedSelection>>>>()?;
    let sets: Vec<Vec<usize>> = selections.iter().flatten().map(|s| s.seeds.clone()).collect();
    let eval = CascadeParams::new(p).with_seed(seed(tag::EVALUATION));
    let (estimates, random) = estimate_sets_and_random_choice(&graph, &sets, settings.k, &eval, settings.trials)?;
    let mut estimates = estimates.into_iter();
    let outcomes = strategies
        .iter()
        .zip(selections)
        .map(|(strategy, sel)| match sel {
            None => StrategyOutcome { strategy: strategy.clone(), seeds: Vec::new(), estimate: random.clone(), cost_steps: 0 },
            Some(sel) => StrategyOutcome {
                strategy: strategy.clone(),
                seeds: sel.seeds,
                estimate: estimates.next().unwrap(),
                cost_steps: sel.cost_steps,
            },
        })
        .collect();
    Ok(SweepPoint { p, outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate_er, generate_small_world};
    use crate::graph::dominant_component;

    fn settings(k: usize, trials: usize, strategies: Vec<StrategySpec>) -> SweepSettings {
        SweepSettings { k, trials, strategies, noise_sigma: 0.0, rng_seed: 9 }
    }

    #[test]
    fn zero_probability_gives_no_gain() {
        let g = generate_er(200, 3.0, 1).unwrap();
        let grid = PGrid::explicit(vec![0.0]).unwrap();
        let r = sweep(&g, &grid, &settings(3, 200, vec![StrategySpec::HillClimb { trials_per_eval: 20 }])).unwrap();
        assert_eq!(r.marginal_gain().unwrap(), vec![0.0]);
        assert_eq!(r.medians("random").unwrap(), vec![3.0]);
    }

    #[test]
    fn unit_probability_on_connected_graph_gives_no_gain() {
        let g = generate_small_world(100, 4, 0.2, 3).unwrap();
        let grid = PGrid::explicit(vec![1.0]).unwrap();
        let r = sweep(&g, &grid, &settings(2, 50, vec![StrategySpec::HillClimb { trials_per_eval: 10 }])).unwrap();
        assert_eq!(r.marginal_gain().unwrap(), vec![0.0]);
        assert_eq!(r.medians("hill_climb").unwrap(), vec![100.0]);
    }

    #[test]
    fn random_benchmark_always_first() {
        let g = generate_er(100, 3.0, 1).unwrap();
        let grid = PGrid::uniform(0.5).unwrap();
        let specs = vec![StrategySpec::Local { mass: 10, trials_per_eval: 5 }, StrategySpec::Random];
        let r = sweep(&g, &grid, &settings(2, 50, specs)).unwrap();
        let labels: Vec<String> = r.strategies.iter().map(|s| s.label()).collect();
        assert_eq!(labels, vec!["random", "local_m10"]);
        assert!(r.marginal_gain().is_err());
        assert_eq!(r.points.len(), 3);
    }

    #[test]
    fn medians_within_bounds() {
        let g = dominant_component(&generate_er(300, 3.0, 2).unwrap()).unwrap().graph;
        let n = g.node_count() as f64;
        let grid = PGrid::uniform(0.1).unwrap();
        let specs = vec![
            StrategySpec::HillClimb { trials_per_eval: 30 },
            StrategySpec::Local { mass: 30, trials_per_eval: 30 },
        ];
        let r = sweep(&g, &grid, &settings(3, 300, specs)).unwrap();
        for label in ["random", "hill_climb", "local_m30"] {
            assert!(r.medians(label).unwrap().iter().all(|&m| (3.0..=n).contains(&m)));
        }
        // optimization never loses badly to the benchmark
        for (gain, pt) in r.marginal_gain().unwrap().iter().zip(&r.points) {
            let se = pt.outcomes[0].estimate.std_error + pt.outcomes[1].estimate.std_error;
            assert!(*gain >= -3.0 * se - 1.0, "p = {}: {gain}", pt.p);
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let g = generate_er(150, 3.0, 4).unwrap();
        let grid = PGrid::uniform(0.25).unwrap();
        let specs = vec![StrategySpec::HillClimb { trials_per_eval: 10 }];
        let mut s = settings(2, 100, specs);
        s.noise_sigma = 0.1;
        let a = sweep(&g, &grid, &s).unwrap();
        let b = sweep(&g, &grid, &s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_settings() {
        let g = generate_er(50, 3.0, 4).unwrap();
        let grid = PGrid::uniform(0.5).unwrap();
        assert!(sweep(&g, &grid, &settings(0, 10, vec![])).is_err());
        assert!(sweep(&g, &grid, &settings(2, 0, vec![])).is_err());
        assert!(sweep(&g, &grid, &settings(2, 10, vec![StrategySpec::HillClimb { trials_per_eval: 0 }])).is_err());
        assert!(sweep(&g, &grid, &settings(2, 10, vec![StrategySpec::Local { mass: 0, trials_per_eval: 3 }])).is_err());
    }
}
