//! Vector actions of matrix pairs and hypermatrix triples, the explicit
//! n = 2 invertibility polynomials, and the real 2×2-block representation
//! of complex matrices.

use crate::bm_algebra::{prod2_bg, prod3_bg};
use crate::error::{BmxError, Result};
use crate::hypermatrix_core::{Hypermatrix3, Matrix, C64, ONE, ZERO};
use crate::symmetrization_svd::{principal_root, root_of_unity};
use serde::{Deserialize, Serialize};

/// Matrix pair `(A, B)` defining `y[k] = √(Σ x_i x_j A[i,k] B[k,j])`.
#[derive(Clone, Debug, PartialEq)]
pub struct MapSpec2 {
    pub a: Matrix,
    pub b: Matrix,
}

impl MapSpec2 {
    pub fn new(a: Matrix, b: Matrix) -> Result<Self> {
        let n = a.require_square("MapSpec2")?;
        if b.shape() != (n, n) {
            return Err(BmxError::Shape(format!("MapSpec2: A is {n}×{n} but B is {:?}", b.shape())));
        }
        Ok(Self { a, b })
    }

    pub fn size(&self) -> usize {
        self.a.rows()
    }
}

/// How the selector background `Δ^(t)` is read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectorConvention {
    /// `Δ^(t)[i,j,k] = 1` iff `t = i = j = k`. This reading preserves the
    /// sum of cubes under uncorrelated triples.
    #[default]
    Diagonal,
    /// `Δ^(t)[i,j,k] = 1` iff `t = i = j`, any `k`, as literally displayed.
    Verbatim,
}

/// Hypermatrix triple `(A, B, C)` defining
/// `y[k] = ∛(Σ x_a x_b x_c P_k[a,b,c])` with `P_k = Prod_{Δ^(k)}(A, B, C)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MapSpec3 {
    pub a: Hypermatrix3,
    pub b: Hypermatrix3,
    pub c: Hypermatrix3,
    pub selector: SelectorConvention,
}

impl MapSpec3 {
    pub fn new(a: Hypermatrix3, b: Hypermatrix3, c: Hypermatrix3) -> Result<Self> {
        let n = a.require_cubic("MapSpec3")?;
        for (name, h) in [("B", &b), ("C", &c)] {
            if h.shape() != [n, n, n] {
                return Err(BmxError::Shape(format!("MapSpec3: A has side {n} but {name} is {:?}", h.shape())));
            }
        }
        Ok(Self { a, b, c, selector: SelectorConvention::default() })
    }

    pub fn with_selector(mut self, selector: SelectorConvention) -> Self {
        self.selector = selector;
        self
    }

    pub fn size(&self) -> usize {
        self.a.shape()[0]
    }
}

fn check_len(x: &[C64], n: usize, op: &str) -> Result<()> {
    if x.len() != n {
        return Err(BmxError::Shape(format!("{op}: vector has length {} but the map acts on length {n}", x.len())));
    }
    Ok(())
}

/// Background of the k-th coordinate of the matrix map: `e_k e_kᵀ`.
fn matrix_selector(n: usize, k: usize) -> Matrix {
    Matrix::from_fn(n, n, |i, j| if i == k && j == k { ONE } else { ZERO })
}

/// Background `Δ^(t)` of the k-th coordinate of the hypermatrix map.
pub fn selector(n: usize, t: usize, convention: SelectorConvention) -> Hypermatrix3 {
    Hypermatrix3::from_fn([n, n, n], |i, j, k| {
        let hit = match convention {
            SelectorConvention::Diagonal => i == t && j == t && k == t,
            SelectorConvention::Verbatim => i == t && j == t,
        };
        if hit {
            ONE
        } else {
            ZERO
        }
    })
}

/// `P_k = Prod_{e_k e_kᵀ}(A, B)`.
pub fn map2_background(m: &MapSpec2, k: usize) -> Result<Matrix> {
    prod2_bg(&m.a, &m.b, &matrix_selector(m.size(), k))
}

/// `P_k = Prod_{Δ^(k)}(A, B, C)`.
pub fn map3_background(m: &MapSpec3, k: usize) -> Result<Hypermatrix3> {
    prod3_bg(&m.a, &m.b, &m.c, &selector(m.size(), k, m.selector))
}

/// Applies the matrix-pair map, returning principal square roots. The map is
/// defined up to the sign of each output entry.
pub fn apply_map2(m: &MapSpec2, x: &[C64]) -> Result<Vec<C64>> {
    let n = m.size();
    check_len(x, n, "apply_map2")?;
    (0..n)
        .map(|k| {
            let p = map2_background(m, k)?;
            let q: C64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| x[i] * x[j] * p[(i, j)]).sum();
            Ok(principal_root(q, 2))
        })
        .collect()
}

/// Applies the hypermatrix-triple map, returning principal cube roots. The
/// map is defined up to a cube root of unity on each output entry.
pub fn apply_map3(m: &MapSpec3, x: &[C64]) -> Result<Vec<C64>> {
    let n = m.size();
    check_len(x, n, "apply_map3")?;
    (0..n)
        .map(|k| {
            let p = map3_background(m, k)?;
            let q: C64 = p.indexed().map(|((a, b, c), v)| x[a] * x[b] * x[c] * v).sum();
            Ok(principal_root(q, 3))
        })
        .collect()
}

/// All `order`-th root candidates of each output coordinate, principal first.
pub fn branch_candidates(y: &[C64], order: u32) -> Vec<Vec<C64>> {
    y.iter()
        .map(|&z| {
            if z == ZERO {
                vec![ZERO]
            } else {
                (0..order).map(|k| z * root_of_unity(k, order)).collect()
            }
        })
        .collect()
}

/// `Prod(xᵀ, x)` for order 2 or `Prod(x^⊤², x^⊤, x)` for order 3, with x
/// shaped as a column.
pub fn power_sum(x: &[C64], order: u32) -> Result<C64> {
    match order {
        2 => {
            let col = Matrix::new(x.len(), 1, x.to_vec())?;
            Ok(col.transpose().matmul(&col)?[(0, 0)])
        }
        3 => {
            let col = Hypermatrix3::new([x.len(), 1, 1], x.to_vec())?;
            let p = crate::bm_algebra::prod3(&col.transpose_pow(2), &col.transpose(), &col)?;
            Ok(p[(0, 0, 0)])
        }
        _ => Err(BmxError::InvalidParameter(format!("power_sum order must be 2 or 3, got {order}"))),
    }
}

// ── Invertibility for n = 2 ─────────────────────────────────────────────────

/// Dense univariate polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq)]
struct Poly(Vec<C64>);

impl Poly {
    fn constant(c: C64) -> Self {
        Poly(vec![c])
    }

    fn monomial(c: C64, degree: usize) -> Self {
        let mut v = vec![ZERO; degree + 1];
        v[degree] = c;
        Poly(v)
    }

    fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Poly((0..n).map(|i| self.0.get(i).copied().unwrap_or(ZERO) + o.0.get(i).copied().unwrap_or(ZERO)).collect())
    }

    fn mul(&self, o: &Self) -> Self {
        let mut v = vec![ZERO; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly(v)
    }

    fn scale(&self, c: C64) -> Self {
        Poly(self.0.iter().map(|z| z * c).collect())
    }

    fn padded(mut self, len: usize) -> Vec<C64> {
        self.0.resize(len.max(self.0.len()), ZERO);
        self.0
    }
}

/// Outcome of the n = 2 invertibility test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvertibilityReport {
    /// Coefficients of Q0(x0) and Q1(x1), ascending degree 0..=4.
    pub coefficients: [Vec<C64>; 2],
    /// Per coordinate: the polynomial is not an identically nonzero constant.
    pub invertible: [bool; 2],
    /// Per coordinate: the polynomial vanishes identically.
    pub degenerate: [bool; 2],
}

/// Shared shape of the two resultant polynomials:
/// `L²·c0 − 2·K·L·c1 + K²·c2 − L·M·N·c3 + K·N²·c3 + L·M²·c4 − K·M·N·c4`.
fn resultant_shape(l: &Poly, k: &Poly, m: &Poly, n: &Poly, c: [C64; 5]) -> Poly {
    let terms = [
        l.mul(l).scale(c[0]),
        k.mul(l).scale(-2.0 * c[1]),
        k.mul(k).scale(c[2]),
        l.mul(m).mul(n).scale(-c[3]),
        k.mul(n).mul(n).scale(c[3]),
        l.mul(m).mul(m).scale(c[4]),
        k.mul(m).mul(n).scale(-c[4]),
    ];
    terms.iter().fold(Poly::constant(ZERO), |acc, t| acc.add(t))
}

/// The polynomial pair `(Q0(x0), Q1(x1))` eliminating the other coordinate
/// from the n = 2 map equations at output `y`.
pub fn resultant_polynomials(m: &MapSpec2, y: &[C64]) -> Result<[Vec<C64>; 2]> {
    if m.size() != 2 {
        return Err(BmxError::Shape(format!("invertibility_check_2 needs n = 2, got n = {}", m.size())));
    }
    check_len(y, 2, "invertibility_check_2")?;
    let (a, b) = (&m.a, &m.b);
    let (a00, a01, a10, a11) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
    let (b00, b01, b10, b11) = (b[(0, 0)], b[(0, 1)], b[(1, 0)], b[(1, 1)]);
    let (y0s, y1s) = (y[0] * y[0], y[1] * y[1]);
    let quad = |c: C64, ys: C64| Poly::monomial(c, 2).add(&Poly::constant(-ys));
    let m_lin = Poly::monomial(a10 * b00 + a00 * b01, 1);
    let n_lin = Poly::monomial(a11 * b10 + a01 * b11, 1);

    let q0 = resultant_shape(
        &quad(a01 * b10, y1s),
        &quad(a00 * b00, y0s),
        &m_lin,
        &n_lin,
        [
            a10 * a10 * b01 * b01,
            a10 * a11 * b01 * b11,
            a11 * a11 * b11 * b11,
            a10 * b01,
            a11 * b11,
        ],
    );
    let q1 = resultant_shape(
        &quad(a11 * b11, y1s),
        &quad(a10 * b01, y0s),
        &m_lin,
        &n_lin,
        [
            a00 * a00 * b00 * b00,
            a00 * a01 * b00 * b10,
            a01 * a01 * b10 * b10,
            a00 * b00,
            a01 * b10,
        ],
    );
    Ok([q0.padded(5), q1.padded(5)])
}

/// Invertibility of the n = 2 map at output `y`: a coordinate is invertible
/// unless its resultant polynomial is an identically nonzero constant.
/// Coefficients at most `tol` times the largest input magnitude (to the eighth
/// power) count as zero.
pub fn invertibility_check_2(m: &MapSpec2, y: &[C64], tol: f64) -> Result<InvertibilityReport> {
    let coefficients = resultant_polynomials(m, y)?;
    let scale = m.a.max_abs().max(m.b.max_abs()).max(y.iter().map(|z| z.norm()).fold(0.0, f64::max)).max(1.0);
    let zero_tol = tol * scale.powi(8);
    let mut invertible = [true; 2];
    let mut degenerate = [false; 2];
    for (c, coef) in coefficients.iter().enumerate() {
        let nonconstant = coef[1..].iter().any(|z| z.norm() > zero_tol);
        let constant_nonzero = coef[0].norm() > zero_tol;
        invertible[c] = nonconstant || !constant_nonzero;
        degenerate[c] = !nonconstant && !constant_nonzero;
    }
    Ok(InvertibilityReport { coefficients, invertible, degenerate })
}

// ── Complex ↔ real block representation ─────────────────────────────────────

/// Replaces each entry `a + bi` by the block `[[a, −b], [b, a]]`.
pub fn complex_to_real_block(m: &Matrix) -> Matrix {
    let (r, c) = m.shape();
    Matrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = m[(i / 2, j / 2)];
        let v = match (i % 2, j % 2) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        };
        C64::new(v, 0.0)
    })
}

/// Inverse of [`complex_to_real_block`]; every block must have the
/// `[[a, −b], [b, a]]` shape with real entries, within `tol`.
pub fn real_block_to_complex(m: &Matrix, tol: f64) -> Result<Matrix> {
    let (r, c) = m.shape();
    if r % 2 != 0 || c % 2 != 0 {
        return Err(BmxError::Shape(format!("real block matrix must have even sides, got {r}×{c}")));
    }
    if m.max_imag() > tol {
        return Err(BmxError::Precondition("real block matrix has complex entries".into()));
    }
    let mut out = Matrix::zeros(r / 2, c / 2);
    for bi in 0..r / 2 {
        for bj in 0..c / 2 {
            let e = |di: usize, dj: usize| m[(2 * bi + di, 2 * bj + dj)].re;
            let defect = (e(0, 0) - e(1, 1)).abs().max((e(0, 1) + e(1, 0)).abs());
            if defect > tol {
                return Err(BmxError::Precondition(format!(
                    "block ({bi}, {bj}) is not of the form [[a, -b], [b, a]] (defect {defect:.3e})"
                )));
            }
            out[(bi, bj)] = C64::new((e(0, 0) + e(1, 1)) / 2.0, (e(1, 0) - e(0, 1)) / 2.0);
        }
    }
    Ok(out)
}
