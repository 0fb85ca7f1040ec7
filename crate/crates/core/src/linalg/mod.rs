//! Dense complex linear algebra, permanents and random unitaries.

mod io;
mod matrix;
mod multiset;
mod permanent;
mod unitary;

pub use io::{format_matrix, parse_matrix, read_matrix, write_matrix};
pub use matrix::ComplexMatrix;
pub use multiset::{submatrix_multiset, ModeMultiset};
pub use permanent::{permanent, permanent_naive, permanent_ryser, RYSER_MIN_DIM};
pub use unitary::{check_isometry, matrix_fidelity, random_unitary, IsometryCheck};
