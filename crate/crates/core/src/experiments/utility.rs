use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::grid::covers_unit_interval;
use crate::experiments::sweep::{StrategySpec, SweepResult};

/// Running time `T` charged to a strategy, in units of one random pick.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostModel {
    /// `size · ln(size)`.
    #[default]
    Nlogn,
    Linear,
    Constant { time: f64 },
    /// The strategy's own `cost_steps` counter.
    MeasuredSteps,
}

impl CostModel {
    /// `size` is `n` for global strategies and the total sub-network mass
    /// `k · M` for the local one.
    pub fn time(&self, size: usize, measured_steps: u64) -> f64 {
        let s = size as f64;
        match self {
            CostModel::Nlogn => s * s.ln(),
            CostModel::Linear => s,
            CostModel::Constant { time } => *time,
            CostModel::MeasuredSteps => measured_steps as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityParams {
    #[serde(default = "unit_value")]
    pub value_per_node: f64,
    #[serde(default = "default_cost")]
    pub cost_per_time: f64,
    /// Cost model for hill-climbing, applied to `n`.
    #[serde(default)]
    pub cost_model: CostModel,
    /// Cost model for random-local-optimization, applied to `k · M`.
    #[serde(default)]
    pub local_cost_model: CostModel,
}

fn unit_value() -> f64 {
    1.0
}

fn default_cost() -> f64 {
    1e-3
}

impl UtilityParams {
    /// Unit value per node and the given cost ratio `C / v`.
    pub fn with_cost_ratio(ratio: f64) -> UtilityParams {
        UtilityParams {
            value_per_node: 1.0,
            cost_per_time: ratio,
            cost_model: CostModel::Nlogn,
            local_cost_model: CostModel::Nlogn,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.value_per_node > 0.0 && self.value_per_node.is_finite()) {
            problems.push(format!("value_per_node = {} must be > 0", self.value_per_node));
        }
        if !(self.cost_per_time >= 0.0 && self.cost_per_time.is_finite()) {
            problems.push(format!("cost_per_time = {} must be >= 0", self.cost_per_time));
        }
        for model in [&self.cost_model, &self.local_cost_model] {
            if let CostModel::Constant { time } = model {
                if !time.is_finite() {
                    problems.push(format!("constant cost time = {time} must be finite"));
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Parameter(problems.join("; ")))
        }
    }

    /// Running time of `strategy` on an `n`-node graph with `k` seeds.
    pub fn strategy_time(&self, strategy: &StrategySpec, n: usize, k: usize, cost_steps: u64) -> f64 {
        match strategy {
            StrategySpec::Random => 1.0,
            StrategySpec::HillClimb { .. } => self.cost_model.time(n, cost_steps),
            StrategySpec::Local { mass, .. } => self.local_cost_model.time(k * mass, cost_steps),
        }
    }

    /// `v · influence − C · T`.
    pub fn utility(&self, influence: f64, time: f64) -> f64 {
        self.value_per_node * influence - self.cost_per_time * time
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityCheck {
    pub optimize_worthwhile: bool,
    /// `(opt − rand) / (T − 1)`.
    pub lhs: f64,
    /// `C / v`.
    pub rhs: f64,
    pub u_opt: f64,
    pub u_rand: f64,
}

/// Whether optimizing beats picking at random: `(opt − rand)/(T − 1) > C/v`.
pub fn utility_condition(opt: f64, rand: f64, time: f64, cost_per_time: f64, value_per_node: f64) -> Result<UtilityCheck> {
    if !(time > 1.0) {
        return Err(Error::DegenerateCost(time));
    }
    if !(value_per_node > 0.0) {
        return Err(Error::Parameter(format!("value_per_node = {value_per_node} must be > 0")));
    }
    let lhs = (opt - rand) / (time - 1.0);
    let rhs = cost_per_time / value_per_node;
    Ok(UtilityCheck {
        optimize_worthwhile: lhs > rhs,
        lhs,
        rhs,
        u_opt: value_per_node * opt - cost_per_time * time,
        u_rand: value_per_node * rand - cost_per_time,
    })
}

/// Trapezoidal mean of a piecewise-linear curve over a uniform prior on `[0, 1]`.
pub fn prior_expectation(ps: &[f64], values: &[f64]) -> Result<f64> {
    if ps.len() != values.len() {
        return Err(Error::Input(format!("{} grid points but {} values", ps.len(), values.len())));
    }
    if !covers_unit_interval(ps) {
        return Err(Error::Input("prior integration needs a grid spanning [0, 1]".into()));
    }
    Ok(ps
        .windows(2)
        .zip(values.windows(2))
        .map(|(p, y)| 0.5 * (p[1] - p[0]) * (y[0] + y[1]))
        .sum())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorExpectation {
    pub strategy: String,
    /// Expected `(U_s − U_rand) / (v · n)` under the uniform prior.
    pub expectation: f64,
}

/// Per-strategy gain in utility over the random benchmark, averaged over `p`.
pub fn expected_added_utility_over_prior(sweep: &SweepResult, params: &UtilityParams) -> Result<Vec<PriorExpectation>> {
    params.validate()?;
    let ps = sweep.ps();
    let n = sweep.network.n;
    let scale = params.value_per_node * n as f64;
    let rand = sweep.medians("random")?;
    let u_rand: Vec<f64> = rand.iter().map(|&r| params.utility(r, 1.0)).collect();
    sweep
        .strategies
        .iter()
        .enumerate()
        .filter(|(_, s)| **s != StrategySpec::Random)
        .map(|(i, s)| {
            let curve: Vec<f64> = sweep
                .points
                .iter()
                .zip(&u_rand)
                .map(|(pt, ur)| {
                    let out = &pt.outcomes[i];
                    let t = params.strategy_time(s, n, sweep.k, out.cost_steps);
                    (params.utility(out.estimate.median as f64, t) - ur) / scale
                })
                .collect();
            Ok(PriorExpectation { strategy: s.label(), expectation: prior_expectation(&ps, &curve)? })
        })
        .collect()
}
