//! Parameter sweeps over the contagion probability and the quantities derived
//! from them: marginal gain, region widths, width fits, utility, and
//! sub-network-mass robustness.

pub mod fit;
pub mod grid;
pub mod report;
pub mod robustness;
pub mod sweep;
pub mod utility;
pub mod width;

pub use fit::{fit_power_law, fit_power_law_with, SizeVariable, WidthFit};
pub use grid::{GridSpec, PGrid};
pub use robustness::{m_robustness_ratio, robustness_ratios, MassRatio};
pub use sweep::{sweep, NetworkDescriptor, StrategySpec, SweepResult, SweepSettings};
pub use utility::{
    expected_added_utility_over_prior, prior_expectation, utility_condition, CostModel, PriorExpectation,
    UtilityCheck, UtilityParams,
};
pub use width::{interval_measure, optimization_region_width, positive_utility_width, Comparison};
