//! Parametrized orthogonal 2×2 matrices and 2×2×2 hypermatrices, the table
//! of degenerate zero patterns and the table of rotation triples.

use crate::bm_algebra::is_orthogonal;
use crate::error::{BmxError, Result};
use crate::hypermatrix_core::{rotate_hyper, Hypermatrix3, Matrix, RotationAngle, C64, ONE, ZERO};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Magnitude under which a normalizing quantity is treated as zero.
const ZERO_NORM: f64 = 1e-14;

/// Parameters `(r, s, t)` of an orthogonal 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthoParamMatrix {
    pub r: C64,
    pub s: i8,
    pub t: C64,
}

impl OrthoParamMatrix {
    /// Samples `r, t` on the annulus `0.5 ≤ |z| ≤ 2` and `s` uniformly in {−1, 1}.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let p = Self {
                r: annulus(rng),
                s: if rng.gen_bool(0.5) { 1 } else { -1 },
                t: annulus(rng),
            };
            if (p.r * p.r + p.t * p.t).norm() > 1e-3 {
                return p;
            }
        }
    }
}

/// Parameters `v0..v5` of an orthogonal 2×2×2 hypermatrix; `v0` is a cube
/// root of unity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthoParamHyper {
    pub v: [C64; 6],
}

impl OrthoParamHyper {
    pub fn new(v: [C64; 6]) -> Result<Self> {
        let p = Self { v };
        p.validate()?;
        Ok(p)
    }

    /// `v0` uniform over the cube roots of unity, `v1..v5` on the annulus
    /// `0.5 ≤ |z| ≤ 2`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let k = rng.gen_range(0..3);
            let mut v = [ZERO; 6];
            v[0] = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * f64::from(k) / 3.0);
            for z in &mut v[1..] {
                *z = annulus(rng);
            }
            // Keep the normalizer away from zero so draws are well conditioned.
            if (v[3].powi(3) + v[5].powi(3)).norm() > 1e-2 {
                return Self { v };
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let v = &self.v;
        if (v[0].powi(3) - ONE).norm() > 1e-12 {
            return Err(BmxError::InvalidParameter(format!("v0 = {} is not a cube root of unity", v[0])));
        }
        if let Some(i) = (1..6).find(|&i| v[i] == ZERO) {
            return Err(BmxError::InvalidParameter(format!("v{i} must be nonzero")));
        }
        if (v[3].powi(3) + v[5].powi(3)).norm() <= ZERO_NORM {
            return Err(BmxError::InvalidParameter("v3³ + v5³ vanishes".into()));
        }
        Ok(())
    }
}

fn annulus<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(rng.gen_range(0.5..=2.0), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Orthogonal matrix with rows `(−st/r, s)` and `(r, t)`, each normalized.
pub fn gen_ortho_matrix(p: &OrthoParamMatrix) -> Result<Matrix> {
    if p.s != 1 && p.s != -1 {
        return Err(BmxError::InvalidParameter(format!("s must be ±1, got {}", p.s)));
    }
    if p.r == ZERO {
        return Err(BmxError::InvalidParameter("r must be nonzero".into()));
    }
    if (p.r - p.t * C64::i()).norm() <= ZERO_NORM * p.t.norm().max(1.0) {
        return Err(BmxError::InvalidParameter("r = t·√−1 is excluded".into()));
    }
    let s = C64::new(f64::from(p.s), 0.0);
    let x0 = -s * p.t / p.r;
    let n0 = (x0 * x0 + s * s).sqrt();
    let n1 = (p.r * p.r + p.t * p.t).sqrt();
    if n0.norm() <= ZERO_NORM || n1.norm() <= ZERO_NORM {
        return Err(BmxError::InvalidParameter("a row has zero quadratic norm".into()));
    }
    Matrix::new(2, 2, vec![x0 / n0, s / n0, p.r / n1, p.t / n1])
}

/// Orthogonal hypermatrix with the normalized slices
/// `X[:,:,0] = [[v0v3/c, v0v5/c], [−v1v4v5/(v2v3), v1]]` and
/// `X[:,:,1] = [[v2, v4], [v3/c, v5/c]]`, `c = ∛(v3³ + v5³)`.
pub fn gen_ortho_hyper(p: &OrthoParamHyper) -> Result<Hypermatrix3> {
    p.validate()?;
    let [v0, v1, v2, v3, v4, v5] = p.v;
    let c = crate::symmetrization_svd::principal_root(v3.powi(3) + v5.powi(3), 3);
    let slices = [[v0 * v3 / c, v0 * v5 / c, -v1 * v4 * v5 / (v2 * v3), v1], [v2, v4, v3 / c, v5 / c]];
    Ok(Hypermatrix3::from_fn([2, 2, 2], |i, j, k| slices[k][2 * i + j]))
}

/// The eight named entries `x0..x7` of a 2×2×2 hypermatrix, in the order
/// `X000, X100, X010, X110, X001, X101, X011, X111`.
pub fn named_entries(x: &Hypermatrix3) -> Result<[C64; 8]> {
    x.require_side("named_entries", 2)?;
    Ok(std::array::from_fn(|n| x[(n & 1, (n >> 1) & 1, n >> 2)]))
}

/// Residuals of the four polynomial orthogonality constraints
/// `x1x4x5 + x3x6x7 = 0`, `x0x1x4 + x2x3x6 = 0`, `x0³ + x2³ = 1`, `x5³ + x7³ = 1`.
pub fn ortho_constraints(x: &Hypermatrix3) -> Result<[f64; 4]> {
    let [x0, x1, x2, x3, x4, x5, x6, x7] = named_entries(x)?;
    Ok([
        (x1 * x4 * x5 + x3 * x6 * x7).norm(),
        (x0 * x1 * x4 + x2 * x3 * x6).norm(),
        (x0.powi(3) + x2.powi(3) - ONE).norm(),
        (x5.powi(3) + x7.powi(3) - ONE).norm(),
    ])
}

const ZERO_PATTERNS: [&[u8]; 32] = [
    &[0, 3, 1],
    &[0, 6, 1],
    &[0, 3, 7, 1],
    &[0, 7, 6, 1],
    &[0, 4, 3],
    &[0, 3, 5],
    &[0, 4, 6],
    &[0, 4, 3, 7],
    &[0, 4, 7, 6],
    &[0, 6, 5],
    &[3, 2, 1],
    &[2, 6, 1],
    &[7, 2, 1],
    &[3, 1],
    &[6, 1],
    &[3, 7, 1],
    &[7, 6, 1],
    &[4, 3, 2],
    &[3, 2, 1, 5],
    &[4, 3, 2, 5],
    &[4, 2, 6],
    &[4, 7, 2],
    &[2, 6, 1, 5],
    &[4, 2, 6, 5],
    &[4, 3],
    &[3, 1, 5],
    &[4, 3, 5],
    &[4, 6],
    &[4, 3, 7],
    &[4, 7, 6],
    &[6, 1, 5],
    &[4, 6, 5],
];

/// The tabulated sets of variables `x0..x7` set to zero in degenerate
/// orthogonal hypermatrices, in table order. Each set lists indices in the
/// order they appear in the table.
pub fn degenerate_patterns() -> Vec<Vec<u8>> {
    ZERO_PATTERNS.iter().map(|p| p.to_vec()).collect()
}

const ROTATION_TRIPLES: [[u8; 3]; 32] = [
    [0, 0, 0],
    [0, 0, 3],
    [0, 1, 0],
    [0, 1, 2],
    [0, 2, 1],
    [0, 2, 2],
    [0, 3, 1],
    [0, 3, 3],
    [1, 0, 1],
    [1, 0, 2],
    [1, 1, 1],
    [1, 1, 3],
    [1, 2, 0],
    [1, 2, 3],
    [1, 3, 0],
    [1, 3, 2],
    [2, 0, 0],
    [2, 0, 3],
    [2, 1, 0],
    [2, 1, 2],
    [2, 2, 1],
    [2, 2, 2],
    [2, 3, 1],
    [2, 3, 3],
    [3, 0, 1],
    [3, 0, 2],
    [3, 1, 1],
    [3, 1, 3],
    [3, 2, 0],
    [3, 2, 3],
    [3, 3, 0],
    [3, 3, 2],
];

/// The 32 tabulated rotation triples `(θx, θy, θz)`.
pub fn rotation_triples() -> Vec<[RotationAngle; 3]> {
    ROTATION_TRIPLES.iter().map(|t| t.map(|q| RotationAngle::wrapping(i64::from(q)))).collect()
}

/// Result of checking orthogonality after every tabulated rotation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotationReport {
    pub checked: usize,
    /// Triples (in quarter turns) whose rotation is not orthogonal, with residual.
    pub failures: Vec<([u8; 3], f64)>,
    pub max_residual: f64,
}

impl RotationReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn verify_rotation_invariance(x: &Hypermatrix3, tol: f64) -> Result<RotationReport> {
    x.require_cubic("verify_rotation_invariance")?;
    let mut report = RotationReport { checked: 0, failures: Vec::new(), max_residual: 0.0 };
    for [tx, ty, tz] in rotation_triples() {
        let check = is_orthogonal(&rotate_hyper(x, tx, ty, tz)?, tol)?;
        report.checked += 1;
        report.max_residual = report.max_residual.max(check.residual);
        if !check.passed {
            report.failures.push(([tx, ty, tz].map(RotationAngle::quarter_turns), check.residual));
        }
    }
    Ok(report)
}
