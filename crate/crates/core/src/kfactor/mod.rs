//! Decompositions into the kaleidoscope hierarchy: Beneš routing of
//! permutations, horizontal step matrices, sparse matrices via step form and
//! a four-track summation gadget, products of K-matrices, and the full
//! linear-circuit pipeline.

mod decompose;
mod permutation;
mod step;

pub use decompose::{
    circuit_to_kmatrix, kmatrix_product, nsparse_to_kmatrix, sparse_to_kmatrix,
    sparse_to_step_form, StepForm,
};
pub use permutation::{route_permutation, Permutation};
pub use step::{step_to_butterfly, validate_step, StepMatrix};
