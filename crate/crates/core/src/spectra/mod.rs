//! Exact diagonalization and real-space localization diagnostics.

mod eigen;
mod pbc;
mod profile;

pub use eigen::{
    eigen_right, eigendecompose, eigenvalues, max_residual, negation_set_distance, EigenSystem, Eigenpairs,
    DEGENERACY_TOL,
};
pub use pbc::{pbc_spectrum, spectral_winding};
pub use profile::{
    classify_states, density_profile, skin_metrics, DensityProfile, SkinOptions, SkinReport, StateClass,
    StateRecord,
};

pub(crate) use eigen::lexicographic;
