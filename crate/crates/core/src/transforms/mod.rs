//! Operators built on an orthonormal system: partial sums and their split
//! into continuous and mass parts, maximal and commutator operators, the
//! finite Hilbert transform, Pollard's splitting, Laguerre mass-point kernels
//! and kernel envelopes.

pub mod estimates;
pub mod hilbert;
pub mod laguerre;
pub mod partial;
pub mod pollard;
pub mod symbol;

pub use estimates::{collar, envelope_ratio, kernel_envelope, EnvelopeRatio};
pub use hilbert::{hilbert_commutator, hilbert_transform, weighted_hilbert};
pub use laguerre::{laguerre_mass_kernel, q_at_zero_closed_form, LaguerreMassKernel, LaguerreRow};
pub use partial::{commutator, maximal_op, partial_sum, split_partial_sum, BasisTable, SplitSum};
pub use pollard::{
    commutator_psi_parts, pollard_fit, pollard_measure, pollard_parts, CommutatorParts,
    PollardEvaluator, PollardFit, PollardParts,
};
pub use symbol::Symbol;
