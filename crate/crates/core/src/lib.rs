//! Equilibrium solver and population simulator for a two-group
//! overlapping-generations Prisoner's Dilemma with honest types, public
//! stigma and probabilistic forgiveness.
//!
//! The model code is generic over the [`Scalar`] type; the aliases below fix
//! it to `f64` (and `f32` where useful).

// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod equilibrium;
pub mod model;
mod parallel;
pub mod scalar;
pub mod simulator;
pub mod statics;

pub use equilibrium::{
    best_response_cutoff, classify_regime, dominance_threshold, enumerate_equilibria, exact_dominance_threshold,
    fixed_point_bisection, interior_threshold, is_cooperation_dominant, EquilibriumError, EquilibriumKind, Regime,
};
pub use model::{coop_payoff, defect_payoff, meeting_coop_prob, stage_payoff, Action, CostDistribution, ModelError};
pub use parallel::map_ordered;
pub use scalar::Scalar;
pub use simulator::{compare_to_theory, run, run_replications, SelectionPolicy, SimError, StrategySpec};
pub use statics::{
    check_monotonicity, cooperation_probability, figure_data, forgiveness_comparison, sweep, StaticsError,
};

pub type Params = model::ModelParams<f64>;
pub type ParamsF32 = model::ModelParams<f32>;
pub type EquilibriumSet = equilibrium::EquilibriumSet<f64>;
pub type ThresholdEquilibrium = equilibrium::ThresholdEquilibrium<f64>;
pub type RegimeClassification = equilibrium::RegimeClassification<f64>;
pub type SweepRow = statics::SweepRow<f64>;
pub type MonotonicityReport = statics::MonotonicityReport<f64>;
pub type FigureData = statics::FigureData<f64>;
pub type SimConfig = simulator::SimConfig<f64>;
pub type AgentRecord = simulator::AgentRecord<f64>;
pub type Population = simulator::Population<f64>;
