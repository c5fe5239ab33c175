//! Orthonormal polynomial systems: recurrences, bases with point masses,
//! Christoffel-Darboux kernels and their decomposition over subsets of the
//! mass points.

mod basis;
mod decomposition;
mod recurrence;

pub use basis::{base_recurrence, BasisExport, BuildOptions, MassUpdate, OrthoBasis};
pub use decomposition::{
    kernel_decomposition, modified_bases, subsets, DecompositionTerm, KernelDecomposition,
    MAX_FIT_CONDITION,
};
pub use recurrence::{classical_recurrence, jacobi_stieltjes, stieltjes_recurrence, Recurrence};
