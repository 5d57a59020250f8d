use super::decompose::Svd3Result;
use crate::bm_algebra::prod3;
use crate::error::Result;
use crate::hypermatrix_core::{block_diag, delta, kron, Hypermatrix3, ZERO};

/// A decomposition `A = Prod(U′, V′, W′)` with σ folded into U′.
///
/// For a side-2 result the contraction axis enumerates the nonzero
/// coefficients `s = 4i + 2j + k`, so that U′ is `2 × L × 2`, V′ is
/// `2 × 2 × L` and W′ is `L × 2 × 2`. Kronecker products and direct sums act
/// factor by factor.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredDecomposition {
    pub u: Hypermatrix3,
    pub v: Hypermatrix3,
    pub w: Hypermatrix3,
}

impl FactoredDecomposition {
    /// Checks conformability by forming the product once.
    pub fn new(u: Hypermatrix3, v: Hypermatrix3, w: Hypermatrix3) -> Result<Self> {
        prod3(&u, &v, &w)?;
        Ok(Self { u, v, w })
    }

    pub fn from_svd3(r: &Svd3Result) -> Self {
        let active: Vec<usize> = (0..8).filter(|&s| r.sigma[s] != ZERO).collect();
        let l = active.len();
        let u = Hypermatrix3::from_fn([2, l, 2], |a, t, c| {
            let s = active[t];
            r.sigma[s] * r.utilde[(a, s / 4, c)]
        });
        let v = Hypermatrix3::from_fn([2, 2, l], |a, b, t| r.vtilde[(a, b, (active[t] / 2) % 2)]);
        let w = Hypermatrix3::from_fn([l, 2, 2], |t, b, c| r.wtilde[(active[t] % 2, b, c)]);
        Self { u, v, w }
    }

    /// `Δ_n = Prod(Δ_n, Δ_n, Δ_n)`.
    pub fn identity(n: usize) -> Self {
        let d = delta(n);
        Self { u: d.clone(), v: d.clone(), w: d }
    }

    pub fn reconstruct(&self) -> Result<Hypermatrix3> {
        prod3(&self.u, &self.v, &self.w)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self { u: kron(&self.u, &other.u), v: kron(&self.v, &other.v), w: kron(&self.w, &other.w) }
    }

    pub fn dirsum(&self, other: &Self) -> Self {
        Self {
            u: block_diag(&self.u, &other.u),
            v: block_diag(&self.v, &other.v),
            w: block_diag(&self.w, &other.w),
        }
    }
}

/// Decomposition of `A0 ⊗ A1` from decompositions of A0 and A1.
pub fn svd_kron(r0: &Svd3Result, r1: &Svd3Result) -> FactoredDecomposition {
    FactoredDecomposition::from_svd3(r0).kron(&FactoredDecomposition::from_svd3(r1))
}

/// Decomposition of `A0 ⊕ A1` from decompositions of A0 and A1.
pub fn svd_dirsum(r0: &Svd3Result, r1: &Svd3Result) -> FactoredDecomposition {
    FactoredDecomposition::from_svd3(r0).dirsum(&FactoredDecomposition::from_svd3(r1))
}
