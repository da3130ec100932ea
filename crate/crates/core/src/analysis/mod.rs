//! Holomorphic sectional and bisectional curvature: evaluation, minimization,
//! sign classification and threshold location.

mod classify;
mod contraction;
mod minimize;
mod threshold;

pub use classify::{
    classify_lambda, classify_points, classify_time, empirical_min, negative_witness, regime, sample_points, witness_value,
    Quantity, Regime, SignReport, Verdict, Witness, NEGATIVE_THRESHOLD,
};
pub use contraction::{hbc, hopf_hbc_closed, hopf_hsc_ab, hsc, ABForm, FramePair, SYMMETRY_RESIDUE};
pub use minimize::{
    alternating_descent, min_hbc, min_hsc, sectional_descent, Descent, MinimizeOptions, Minimum,
};
pub use threshold::{threshold_bisect, ThresholdOptions, ThresholdResult, MIN_RESOLUTION};
