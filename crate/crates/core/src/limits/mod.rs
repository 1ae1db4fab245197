//! Limit laws of `W` and `T` under growth regimes of the deck, distances
//! between exact finite-deck laws and their limits, and the correlation
//! structure of the joint central limit.

mod correlation;
mod distance;
mod law;
mod regime;

pub use correlation::{
    correlation_analysis, correlation_coefficient, kappa, min_correlation, CorrelationReport, JointLimitLaw,
    MinimumCorrelation, SUMMATION_TOLERANCE,
};
pub use distance::{
    convergence_distance, independence_gap, joint_product_distance, product_partner, scaled_exact_cdf,
    scaled_exact_law, FloatJointWt, ScaledExactLaw,
};
pub use law::{limit_law, LimitLaw};
pub use regime::{regime_indicators, Counter, RegimeIndicators, RegimeSpec, ALPHA_TOLERANCE, RATIO_TOLERANCE};
