//! Path-count matrices of quantum lens space graphs, the unipotent
//! upper-triangular equivalence between them, and exhaustive enumeration of
//! the resulting classes.

pub mod classify;
pub mod equivalence;
pub mod error;
pub mod invariants;
pub mod lensgraph;
pub mod numtheory;
pub mod par;
pub mod pathmatrix;

pub use equivalence::{
    decide_equiv, obstruction_mod_k, submatrix_necessary, verify_witness, EquivDecision,
    Obstruction, Witness,
};
pub use error::{Error, Result};
pub use lensgraph::{enumerate_legal_paths, GraphKind, LensGraph, LensParams};
pub use pathmatrix::{closed_form_all_ones, count_matrix, normalize, poly_1to6, PathMatrix};
