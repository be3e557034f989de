//! GOE sampling, signed ensemble sums and the symmetric eigensolver.

pub mod eigen;
pub mod matrix;
pub mod sampling;

pub use eigen::{spectral_norm, symmetric_eigenvalues, Spectrum, DEFAULT_TOL};
pub use matrix::{flip_in_place, flip_update, signed_sum, MatrixEnsemble, Signing, SymmetricMatrix};
pub use sampling::{sample_correlated_pair, sample_ensemble, sample_goe};
