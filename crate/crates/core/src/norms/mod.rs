//! Norms with respect to `nu` on a grid, BMO estimates and operator-norm
//! probes.

pub mod bmo;
pub mod lp;
pub mod operators;
pub mod probe;
pub mod sets;

pub use crate::quadrature::gauss_rule;
pub use bmo::{bmo_norm_estimate, mean_oscillation};
pub use lp::{
    conjugate_exponent, lorentz_norm, lorentz_norm_with, lp_norm, lp_norm_with, rearrangement,
    rearrangement_with, weak_norm_with, LorentzIndex, Step,
};
pub use operators::{
    Adjoint, CommutatorOp, GridOperator, Identity, MaximalOp, PartialSumOp, WeightedOp,
};
pub use probe::{
    fit_growth, mass_kernel_norms, operator_norm_probe, run_probe, spectral_norm, verdict,
    GrowthFit, NormEstimate, NormKind, OperatorKind, ProbeConfig, ProbeEntry, ProbeOptions,
    ProbeReport, TargetNorm, Verdict,
};
pub use sets::{standard_sets, weak_type_probe, NodeSet};
