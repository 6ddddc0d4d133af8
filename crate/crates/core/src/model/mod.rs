//! Parametric MAP specification and its analytic characteristics.

pub mod analysis;
pub mod jump_law;
pub mod spec;

pub use analysis::{
    assemble_jump_measure, asymptotic_drift, check_condition_c, classify_regime, dual_spec,
    exponential_resolvent, matrix_exponent, stationary_distribution, transform_matrix,
    AssembledJumpMeasure, CMatrix, ConditionCVerdict, ConditionReason, Drift, Regime, RegimeVerdict,
};
pub use jump_law::{JumpLaw, MixturePart, Side, TailClass};
pub use spec::{LevyComponent, MapSpec, RateMatrix, StateIndex, MAX_STATES};
