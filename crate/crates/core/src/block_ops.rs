//! Block transposes and rotations of block matrices and 2×2×2 block
//! hypermatrices, block unitarity and the block-orthogonality conditions.

use crate::bm_algebra::{is_orthogonal, prod3};
use crate::error::{BmxError, Result};
use crate::hypermatrix_core::{delta, kron, rotate_hyper, rotate_matrix, Hypermatrix3, Matrix, RotationAngle, C64};
use serde::Serialize;

/// An `n × n` grid of `m × m` blocks, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix {
    n: usize,
    m: usize,
    blocks: Vec<Matrix>,
}

impl BlockMatrix {
    pub fn new(n: usize, blocks: Vec<Matrix>) -> Result<Self> {
        if n == 0 || blocks.len() != n * n {
            return Err(BmxError::Shape(format!("a {n}×{n} block grid needs {} blocks, got {}", n * n, blocks.len())));
        }
        let m = blocks[0].require_square("BlockMatrix")?;
        if let Some(b) = blocks.iter().position(|b| b.shape() != (m, m)) {
            return Err(BmxError::Shape(format!("block {b} is {:?}, expected {m}×{m}", blocks[b].shape())));
        }
        Ok(Self { n, m, blocks })
    }

    /// Splits a square matrix of side `n·m` into `m × m` blocks.
    pub fn from_matrix(full: &Matrix, m: usize) -> Result<Self> {
        let side = full.require_square("BlockMatrix::from_matrix")?;
        if m == 0 || side % m != 0 {
            return Err(BmxError::Shape(format!("side {side} is not a multiple of block size {m}")));
        }
        let n = side / m;
        let blocks = (0..n * n)
            .map(|b| Matrix::from_fn(m, m, |r, c| full[((b / n) * m + r, (b % n) * m + c)]))
            .collect();
        Ok(Self { n, m, blocks })
    }

    pub fn grid(&self) -> usize {
        self.n
    }

    pub fn block_size(&self) -> usize {
        self.m
    }

    pub fn block(&self, i: usize, j: usize) -> &Matrix {
        &self.blocks[i * self.n + j]
    }

    pub fn to_matrix(&self) -> Matrix {
        let (n, m) = (self.n, self.m);
        Matrix::from_fn(n * m, n * m, |r, c| self.block(r / m, c / m)[(r % m, c % m)])
    }

    /// Block positions transposed, blocks left intact.
    pub fn top_b(&self) -> Self {
        let n = self.n;
        let blocks = (0..n * n).map(|b| self.block(b % n, b / n).clone()).collect();
        Self { blocks, ..*self }
    }

    /// Every block transposed in place.
    pub fn top_e(&self) -> Self {
        Self { blocks: self.blocks.iter().map(Matrix::transpose).collect(), ..*self }
    }

    /// `Σ (e_i e_jᵀ)^{R_θ} ⊗ A_ij`: rotates the block positions.
    pub fn rotate_b(&self, theta: RotationAngle) -> Result<Self> {
        let n = self.n;
        let pos = rotate_matrix(&Matrix::from_fn(n, n, |i, j| C64::new((i * n + j) as f64, 0.0)), theta)?;
        let blocks = (0..n * n).map(|b| self.blocks[pos[(b / n, b % n)].re as usize].clone()).collect();
        Ok(Self { blocks, ..*self })
    }

    /// `Σ (e_i e_jᵀ) ⊗ A_ij^{R_θ}`: rotates each block in place.
    pub fn rotate_e(&self, theta: RotationAngle) -> Result<Self> {
        let blocks = self.blocks.iter().map(|b| rotate_matrix(b, theta)).collect::<Result<_>>()?;
        Ok(Self { blocks, ..*self })
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { blocks: self.blocks.iter().map(|b| b.scale(c)).collect(), ..*self }
    }
}

/// Residuals of the two products in the block-unitary identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlockUnitaryCheck {
    pub passed: bool,
    /// `‖(A/√n)((A/√n)^{⊤e})^{⊤b} − I‖∞`.
    pub left: f64,
    /// `‖((A/√n)^{⊤e})^{⊤b}(A/√n) − I‖∞`.
    pub right: f64,
}

/// Block unitarity with the `1/√n` normalization of an `n × n` grid.
pub fn block_unitary_check(bm: &BlockMatrix, tol: f64) -> Result<BlockUnitaryCheck> {
    let a = bm.scale(C64::new(1.0 / (bm.n as f64).sqrt(), 0.0));
    let adj = a.top_e().top_b().to_matrix();
    let full = a.to_matrix();
    let id = Matrix::identity(bm.n * bm.m);
    let left = full.matmul(&adj)?.max_abs_diff(&id);
    let right = adj.matmul(&full)?.max_abs_diff(&id);
    Ok(BlockUnitaryCheck { passed: left <= tol && right <= tol, left, right })
}

// ── 2×2×2 block hypermatrices ───────────────────────────────────────────────

/// The three selector hypermatrices whose slice products pick out block
/// positions.
pub fn k_matrices() -> [Hypermatrix3; 3] {
    let from = |s: [[f64; 4]; 2]| Hypermatrix3::from_fn([2, 2, 2], |i, j, k| C64::new(s[k][2 * i + j], 0.0));
    [
        from([[1.0, 0.0, 0.0, 1.0], [1.0, 0.0, 0.0, 1.0]]),
        from([[1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 1.0]]),
        from([[1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 1.0]]),
    ]
}

/// `Prod(K0[:,i,:], K1[:,:,j], K2[k,:,:])`, the unit at block position (i,j,k).
fn position_unit(i: usize, j: usize, k: usize) -> Result<Hypermatrix3> {
    let [k0, k1, k2] = k_matrices();
    prod3(&k0.select(1, i)?, &k1.select(2, j)?, &k2.select(0, k)?)
}

fn block_index(i: usize, j: usize, k: usize) -> usize {
    4 * i + 2 * j + k
}

/// A 2×2×2 grid of cubic blocks of side `m`, indexed `4i + 2j + k`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockHypermatrix {
    m: usize,
    blocks: Vec<Hypermatrix3>,
}

impl BlockHypermatrix {
    pub fn new(blocks: Vec<Hypermatrix3>) -> Result<Self> {
        if blocks.len() != 8 {
            return Err(BmxError::Shape(format!("a 2×2×2 block grid needs 8 blocks, got {}", blocks.len())));
        }
        let m = blocks[0].require_cubic("BlockHypermatrix")?;
        if let Some(b) = blocks.iter().position(|b| b.shape() != [m, m, m]) {
            return Err(BmxError::Shape(format!("block {b} is {:?}, expected side {m}", blocks[b].shape())));
        }
        Ok(Self { m, blocks })
    }

    /// Splits a cubic hypermatrix of side `2m` with block-major indexing.
    pub fn from_hypermatrix(full: &Hypermatrix3) -> Result<Self> {
        let side = full.require_cubic("BlockHypermatrix::from_hypermatrix")?;
        if side == 0 || side % 2 != 0 {
            return Err(BmxError::Shape(format!("side {side} cannot be split into a 2×2×2 grid")));
        }
        let m = side / 2;
        let blocks = (0..8)
            .map(|b| {
                let (i, j, k) = (b / 4, (b / 2) % 2, b % 2);
                Hypermatrix3::from_fn([m, m, m], |r, s, t| full[(i * m + r, j * m + s, k * m + t)])
            })
            .collect();
        Ok(Self { m, blocks })
    }

    pub fn block_size(&self) -> usize {
        self.m
    }

    pub fn block(&self, i: usize, j: usize, k: usize) -> &Hypermatrix3 {
        &self.blocks[block_index(i, j, k)]
    }

    pub fn blocks(&self) -> &[Hypermatrix3] {
        &self.blocks
    }

    /// The single hypermatrix of side `2m`, block-major: `I = i·m + r`.
    pub fn flatten(&self) -> Hypermatrix3 {
        let m = self.m;
        Hypermatrix3::from_fn([2 * m, 2 * m, 2 * m], |a, b, c| self.block(a / m, b / m, c / m)[(a % m, b % m, c % m)])
    }

    /// `Σ Prod(K0[:,i,:], K1[:,:,j], K2[k,:,:])^{⊤^t} ⊗ A_ijk`.
    pub fn top_b(&self, t: usize) -> Result<Self> {
        self.reposition(|unit| Ok(unit.transpose_pow(t)))
    }

    /// `Σ Prod(K0[:,i,:], K1[:,:,j], K2[k,:,:]) ⊗ A_ijk^{⊤^t}`.
    pub fn top_e(&self, t: usize) -> Self {
        Self { m: self.m, blocks: self.blocks.iter().map(|b| b.transpose_pow(t)).collect() }
    }

    /// Rotates block positions by the triple `(θx, θy, θz)`.
    pub fn rotate_b(&self, theta: [RotationAngle; 3]) -> Result<Self> {
        self.reposition(|unit| rotate_hyper(&unit, theta[0], theta[1], theta[2]))
    }

    /// Rotates every block in place by the triple `(θx, θy, θz)`.
    pub fn rotate_e(&self, theta: [RotationAngle; 3]) -> Result<Self> {
        let blocks = self.blocks.iter().map(|b| rotate_hyper(b, theta[0], theta[1], theta[2])).collect::<Result<_>>()?;
        Ok(Self { m: self.m, blocks })
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { m: self.m, blocks: self.blocks.iter().map(|b| b.scale(c)).collect() }
    }

    /// Builds `Σ f(unit_ijk) ⊗ A_ijk` and splits it back into blocks.
    fn reposition(&self, f: impl Fn(Hypermatrix3) -> Result<Hypermatrix3>) -> Result<Self> {
        let side = 2 * self.m;
        let mut acc = Hypermatrix3::zeros([side, side, side]);
        for b in 0..8 {
            let unit = f(position_unit(b / 4, (b / 2) % 2, b % 2)?)?;
            acc = acc.add(&kron(&unit, &self.blocks[b]))?;
        }
        Self::from_hypermatrix(&acc)
    }
}

/// `Prod(S, (S^{⊤e²})^{⊤b²}, (S^{⊤e})^{⊤b})` with `S = scale·A`, formed on the
/// flattened hypermatrix.
pub fn block_orthogonality_product(bh: &BlockHypermatrix, scale: C64) -> Result<Hypermatrix3> {
    let s = bh.scale(scale);
    prod3(&s.flatten(), &s.top_e(2).top_b(2)?.flatten(), &s.top_e(1).top_b(1)?.flatten())
}

/// The same product assembled block by block:
/// block (i,j,k) is `scale³·Σ_t Prod(A_itk, A_jti^⊤², A_ktj^⊤)`.
pub fn block_orthogonality_product_blockwise(bh: &BlockHypermatrix, scale: C64) -> Result<BlockHypermatrix> {
    let c3 = scale * scale * scale;
    let blocks = (0..8)
        .map(|b| {
            let (i, j, k) = (b / 4, (b / 2) % 2, b % 2);
            let mut acc = Hypermatrix3::zeros([bh.m; 3]);
            for t in 0..2 {
                let term = prod3(bh.block(i, t, k), &bh.block(j, t, i).transpose_pow(2), &bh.block(k, t, j).transpose())?;
                acc = acc.add(&term)?;
            }
            Ok(acc.scale(c3))
        })
        .collect::<Result<_>>()?;
    BlockHypermatrix::new(blocks)
}

/// Residuals of the block-orthogonality conditions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockOrthogonalityReport {
    /// The six sum-of-products conditions, each required to vanish.
    pub conditions: [f64; 6],
    /// Deviation of the diagonal blocks (0,0,0) and (1,1,1) of the
    /// normalized product from Δ.
    pub diagonal: [f64; 2],
    pub passed: bool,
}

/// Block triples `(X, Y, Z)` of the six conditions
/// `Prod(X, Y^⊤², Z^⊤) + Prod(X′, Y′^⊤², Z′^⊤) = 0`, as block positions.
const CONDITIONS: [[[usize; 3]; 3]; 6] = [
    [[0, 0, 0], [1, 0, 0], [0, 0, 1]],
    [[1, 0, 0], [0, 0, 1], [0, 0, 0]],
    [[1, 0, 0], [1, 0, 1], [0, 0, 1]],
    [[0, 0, 1], [0, 0, 0], [1, 0, 0]],
    [[0, 0, 1], [1, 0, 0], [1, 0, 1]],
    [[1, 0, 1], [0, 0, 1], [1, 0, 0]],
];

/// Evaluates the six block conditions and the two diagonal Δ conditions.
/// Each condition pairs a term with its copy at middle index 1.
pub fn block_orthogonality_residual(bh: &BlockHypermatrix, tol: f64) -> Result<BlockOrthogonalityReport> {
    for b in 0..8 {
        let check = is_orthogonal(&bh.blocks[b], tol)?;
        if !check.passed {
            return Err(BmxError::Precondition(format!(
                "block A{}{}{} is not orthogonal (residual {:.3e})",
                b / 4,
                (b / 2) % 2,
                b % 2,
                check.residual
            )));
        }
    }
    let mut conditions = [0.0; 6];
    for (c, triple) in CONDITIONS.iter().enumerate() {
        let mut acc = Hypermatrix3::zeros([bh.m; 3]);
        for shift in 0..2 {
            let pick = |p: [usize; 3]| bh.block(p[0], p[1] + shift, p[2]);
            let term = prod3(pick(triple[0]), &pick(triple[1]).transpose_pow(2), &pick(triple[2]).transpose())?;
            acc = acc.add(&term)?;
        }
        conditions[c] = acc.max_abs();
    }
    let scale = C64::new(2f64.powf(-1.0 / 3.0), 0.0);
    let product = block_orthogonality_product_blockwise(bh, scale)?;
    let d = delta(bh.m);
    let diagonal = [product.block(0, 0, 0).max_abs_diff(&d), product.block(1, 1, 1).max_abs_diff(&d)];
    let passed = conditions.iter().chain(&diagonal).all(|&r| r <= tol);
    Ok(BlockOrthogonalityReport { conditions, diagonal, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypermatrix_core::{ONE, ZERO};

    #[test]
    fn position_units_are_unit_hypermatrices() {
        for b in 0..8 {
            let (i, j, k) = (b / 4, (b / 2) % 2, b % 2);
            let u = position_unit(i, j, k).unwrap();
            for ((a, bb, c), z) in u.indexed() {
                let want = if (a, bb, c) == (i, j, k) { ONE } else { ZERO };
                assert_eq!(z, want);
            }
        }
    }
}
