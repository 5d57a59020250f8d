//! Symmetrization SVD of 2×2×2 hypermatrices.
//!
//! The pipeline per factor is: solve the scaling-value family at a gauge,
//! solve the block 8×8 system for cubes, resolve cube-root branches so that
//! the spectral constraint holds exactly, then solve the 8×8 system for the
//! expansion coefficients σ. Larger sides are reached through ⊗ / ⊕
//! composition. A matrix baseline recovers SVD factors from Vandermonde
//! systems built on the eigenvalues of A·Aᵀ.

mod compose;
mod decompose;
mod factor;
mod family;
mod matrix;

pub use compose::{svd_dirsum, svd_kron, FactoredDecomposition};
pub use decompose::{
    fixed_point_refine, fixed_point_refine_with, fixed_point_residual, reconstruct, spectral_residual, svd3, RefineReport,
    Svd3Options, Svd3Residuals, Svd3Result, DEFAULT_RELAXATION,
};
pub use factor::{disaggregate, disaggregate_with, factor_system_solve, BranchLog, FactorSolution};
pub use family::{
    char_gauge_solve, characteristic_residual, family_invariants, FamilyInvariants, ScalingFamily,
};
pub use matrix::{jacobi_eigen_symmetric, matrix_svd_sym, MatrixSvd};

use crate::hypermatrix_core::C64;

/// The three scaling-value families (μ, ν, ω).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Mu,
    Nu,
    Omega,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Mu, Family::Nu, Family::Omega];

    /// Number of cyclic transposes mapping A to the frame in which this
    /// family's equations take the μ form.
    pub(crate) fn frame_shift(self) -> usize {
        match self {
            Family::Mu => 0,
            Family::Nu => 1,
            Family::Omega => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Mu => "mu",
            Family::Nu => "nu",
            Family::Omega => "omega",
        }
    }

    pub fn factor(self) -> Factor {
        match self {
            Family::Mu => Factor::U,
            Family::Nu => Factor::V,
            Family::Omega => Factor::W,
        }
    }
}

/// The three factor hypermatrices (U, V, W).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    U,
    V,
    W,
}

impl Factor {
    pub fn family(self) -> Family {
        match self {
            Factor::U => Family::Mu,
            Factor::V => Family::Nu,
            Factor::W => Family::Omega,
        }
    }

    /// Transposes taking the U-frame factor into this factor's own frame.
    pub(crate) fn frame_return(self) -> usize {
        match self {
            Factor::U => 0,
            Factor::V => 2,
            Factor::W => 1,
        }
    }
}

/// Principal `n`-th root (branch cut on the negative real axis).
pub(crate) fn principal_root(z: C64, n: u32) -> C64 {
    if z == C64::new(0.0, 0.0) {
        return z;
    }
    let (r, theta) = z.to_polar();
    C64::from_polar(r.powf(1.0 / f64::from(n)), theta / f64::from(n))
}

/// `exp(2πi·k/n)`.
pub(crate) fn root_of_unity(k: u32, n: u32) -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * f64::from(k) / f64::from(n))
}
