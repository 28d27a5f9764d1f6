//! Dense linear algebra and forced trajectories of `x' = A x + P u`.

pub mod eigen;
pub mod expm;
pub mod io;
pub mod matrix;
pub mod ode;
pub mod system;

pub use eigen::{eigenvalues, max_sym_eigenvalue, spectrum, symmetric_eigen, top_symmetric_eigenpair, Spectrum};
pub use expm::matrix_exponential;
pub use matrix::{CMatrix, Matrix};
pub use ode::{integrate, solve_forced, ForcedSolution};
pub use system::{LinearPortSystem, Trajectory};
