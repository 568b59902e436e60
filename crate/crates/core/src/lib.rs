//! Cell matrices `D(x)` (hollow, symmetric, off-diagonal `x_i + x_j`):
//! construction and recognition, two independent routes to their spectra,
//! the elementary-similarity reduction of grouped cell matrices, inverse
//! eigenvalue solvers for the spectrum families they realize, and checks of
//! permutation invariance.

pub mod cellmat;
pub mod eigen;
pub mod error;
pub mod iep;
pub mod matrix;
pub mod perm;
pub mod reduction;

pub use cellmat::{
    construct_cell_matrix, group_vector, multiset_eq, numeric_determinant, principal_subdeterminant,
    recognize_cell, CellMatrix, GroupedVector, PositiveVector, Spectrum,
};
pub use eigen::{char_poly, eig_small_general, eig_symmetric, poly_roots, Polynomial};
pub use error::{Error, ErrorKind, Result};
pub use iep::{
    solve_cubic_iep, solve_grouped, solve_two_group, solve_uniform, verify_membership, CubicSpectrumTarget,
    GroupedSpec, IEPSolution,
};
pub use matrix::Matrix;
pub use perm::{permute_vector, spectrum_invariance_check, transposition_similarity_check, Permutation};
pub use reduction::{apply_similarity, build_dk, reduce_grouped, spectrum_via_reduction, ElementaryOp};
