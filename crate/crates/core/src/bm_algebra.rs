//! BM products, their background-weighted generalisation,
//! the symmetric products of transposes, orthogonality predicates, scaling
//! hypermatrices and one-factor linear solves.

use crate::error::{BmxError, Result};
use crate::hypermatrix_core::{delta, hadamard_exp, Hypermatrix3, Matrix, C64, ZERO};
use crate::linalg;

/// Default rejection threshold on the condition estimate of a fiber system.
pub const DEFAULT_MAX_FIBER_COND: f64 = 1e12;

// ── Matrix products ─────────────────────────────────────────────────────────

/// Matrix BM product, i.e. the ordinary product `Σ_t a[i,t]·b[t,j]`.
pub fn prod2(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols() != b.rows() {
        return Err(BmxError::Shape(format!(
            "prod2: contraction index differs ({} columns vs {} rows)",
            a.cols(),
            b.rows()
        )));
    }
    a.matmul(b)
}

/// Matrix product with background: `Σ_{t0,t1} a[i,t0]·b[t1,j]·m[t0,t1]`.
pub fn prod2_bg(a: &Matrix, b: &Matrix, m: &Matrix) -> Result<Matrix> {
    let l = a.cols();
    if b.rows() != l || m.shape() != (l, l) {
        return Err(BmxError::Shape(format!(
            "prod2_bg: a has {l} columns, b has {} rows, background is {:?}",
            b.rows(),
            m.shape()
        )));
    }
    Ok(Matrix::from_fn(a.rows(), b.cols(), |i, j| {
        let mut s = ZERO;
        for t0 in 0..l {
            let at = a[(i, t0)];
            if at == ZERO {
                continue;
            }
            for t1 in 0..l {
                s += at * b[(t1, j)] * m[(t0, t1)];
            }
        }
        s
    }))
}

// ── Third-order products ────────────────────────────────────────────────────

/// Validates the triple (m,ℓ,p), (m,n,ℓ), (ℓ,n,p) and returns (m, n, p, ℓ).
fn conform3(a: &Hypermatrix3, b: &Hypermatrix3, c: &Hypermatrix3) -> Result<(usize, usize, usize, usize)> {
    let [m, l, p] = a.shape();
    let sb = b.shape();
    let sc = c.shape();
    let mut bad = Vec::new();
    if sb[0] != m {
        bad.push(format!("row index: a has {m}, b has {}", sb[0]));
    }
    if sc[1] != sb[1] {
        bad.push(format!("column index: b has {}, c has {}", sb[1], sc[1]));
    }
    if sc[2] != p {
        bad.push(format!("depth index: a has {p}, c has {}", sc[2]));
    }
    if sb[2] != l || sc[0] != l {
        bad.push(format!(
            "contraction index: a axis 1 = {l}, b axis 2 = {}, c axis 0 = {}",
            sb[2], sc[0]
        ));
    }
    if bad.is_empty() {
        Ok((m, sb[1], p, l))
    } else {
        Err(BmxError::Shape(format!(
            "non-conformable triple {:?}, {:?}, {:?}: {}",
            a.shape(),
            sb,
            sc,
            bad.join("; ")
        )))
    }
}

/// `Prod(a,b,c)[i,j,k] = Σ_t a[i,t,k]·b[i,j,t]·c[t,j,k]`.
pub fn prod3(a: &Hypermatrix3, b: &Hypermatrix3, c: &Hypermatrix3) -> Result<Hypermatrix3> {
    let (m, n, p, l) = conform3(a, b, c)?;
    Ok(Hypermatrix3::from_fn([m, n, p], |i, j, k| {
        (0..l).map(|t| a[(i, t, k)] * b[(i, j, t)] * c[(t, j, k)]).sum()
    }))
}

/// Background-weighted product:
/// `Σ_{t0,t1,t2} a[i,t0,k]·b[i,j,t1]·c[t2,j,k]·bg[t0,t1,t2]`.
pub fn prod3_bg(a: &Hypermatrix3, b: &Hypermatrix3, c: &Hypermatrix3, bg: &Hypermatrix3) -> Result<Hypermatrix3> {
    let (m, n, p, l) = conform3(a, b, c)?;
    if bg.shape() != [l, l, l] {
        return Err(BmxError::Shape(format!(
            "background must be cubic of side {l} (the contraction length), got {:?}",
            bg.shape()
        )));
    }
    Ok(Hypermatrix3::from_fn([m, n, p], |i, j, k| {
        let mut s = ZERO;
        for t0 in 0..l {
            let x = a[(i, t0, k)];
            if x == ZERO {
                continue;
            }
            for t1 in 0..l {
                let xy = x * b[(i, j, t1)];
                if xy == ZERO {
                    continue;
                }
                for t2 in 0..l {
                    s += xy * c[(t2, j, k)] * bg[(t0, t1, t2)];
                }
            }
        }
        s
    }))
}

/// The three cyclic symmetric products of transposes:
/// `Prod(A,A^⊤²,A^⊤)`, `Prod(A^⊤,A,A^⊤²)` and `Prod(A^⊤²,A^⊤,A)`.
/// Each satisfies `S[i,j,k] = S[k,i,j]` bit for bit.
pub fn sym_products(a: &Hypermatrix3) -> Result<[Hypermatrix3; 3]> {
    a.require_cubic("sym_products")?;
    let t1 = a.transpose();
    let t2 = a.transpose_pow(2);
    Ok([prod3(a, &t2, &t1)?, prod3(&t1, a, &t2)?, prod3(&t2, &t1, a)?].map(|s| cyclic_canonical(&s)))
}

/// Copies every entry from the smallest index in its cyclic orbit, so that
/// rounding differences between the three equal sums disappear.
fn cyclic_canonical(s: &Hypermatrix3) -> Hypermatrix3 {
    Hypermatrix3::from_fn(s.shape(), |i, j, k| {
        let rep = [(i, j, k), (k, i, j), (j, k, i)].into_iter().min().expect("three candidates");
        s[rep]
    })
}

/// Outcome of a tolerance check; the residual is always reported.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Check {
    pub passed: bool,
    pub residual: f64,
}

impl Check {
    pub fn new(residual: f64, tol: f64) -> Self {
        Self { passed: residual <= tol, residual }
    }
}

/// `‖Prod(x, x^⊤², x^⊤) − Δ‖∞ ≤ tol`.
pub fn is_orthogonal(x: &Hypermatrix3, tol: f64) -> Result<Check> {
    let n = x.require_cubic("is_orthogonal")?;
    let s = prod3(x, &x.transpose_pow(2), &x.transpose())?;
    Ok(Check::new(s.max_abs_diff(&delta(n)), tol))
}

/// `‖Prod(a, b, c) − Δ‖∞ ≤ tol` for a cubic triple.
pub fn is_uncorrelated(a: &Hypermatrix3, b: &Hypermatrix3, c: &Hypermatrix3, tol: f64) -> Result<Check> {
    let p = prod3(a, b, c)?;
    let n = p.require_cubic("is_uncorrelated")?;
    if !a.is_cubic() || !b.is_cubic() || !c.is_cubic() {
        return Err(BmxError::Shape("is_uncorrelated expects three cubic hypermatrices".into()));
    }
    Ok(Check::new(p.max_abs_diff(&delta(n)), tol))
}

// ── Scaling hypermatrices ───────────────────────────────────────────────────

/// A pair of scaling hypermatrices acting as `Prod(A, X, B)[i,j,k] = α_ik·X[i,j,k]·β_kj`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingPair {
    /// m×p grid α.
    pub alpha: Matrix,
    /// p×n grid β.
    pub beta: Matrix,
    /// m×p×p hypermatrix with `a[i,t,k] = α_it` when `t = k`.
    pub a: Hypermatrix3,
    /// p×n×p hypermatrix with `b[t,j,k] = β_tj` when `t = k`.
    pub b: Hypermatrix3,
}

impl ScalingPair {
    /// Applies the pair to `x` (shape m×n×p).
    pub fn apply(&self, x: &Hypermatrix3) -> Result<Hypermatrix3> {
        prod3(&self.a, x, &self.b)
    }
}

pub fn scaling_pair(alpha: &Matrix, beta: &Matrix) -> Result<ScalingPair> {
    let (m, p) = alpha.shape();
    let (p2, n) = beta.shape();
    if p != p2 {
        return Err(BmxError::Shape(format!(
            "scaling_pair: alpha is {m}x{p} but beta has {p2} rows"
        )));
    }
    let a = Hypermatrix3::from_fn([m, p, p], |i, t, k| if t == k { alpha[(i, t)] } else { ZERO });
    let b = Hypermatrix3::from_fn([p, n, p], |t, j, k| if t == k { beta[(t, j)] } else { ZERO });
    Ok(ScalingPair { alpha: alpha.clone(), beta: beta.clone(), a, b })
}

/// Inverse pair with entries α⁻¹, β⁻¹.
pub fn scaling_inverse(pair: &ScalingPair) -> Result<ScalingPair> {
    let invert = |m: &Matrix, name: &str| -> Result<Matrix> {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if m[(i, j)] == ZERO {
                    return Err(BmxError::InvalidParameter(format!(
                        "scaling_inverse: {name}[{i},{j}] is zero"
                    )));
                }
            }
        }
        Ok(m.map(|z| z.inv()))
    };
    scaling_pair(&invert(&pair.alpha, "alpha")?, &invert(&pair.beta, "beta")?)
}

/// The three cyclic characterisations of a scaling hypermatrix D.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalingForm {
    /// `D^∘3 = Prod(D^⊤, D^⊤², D)`
    TransposeLead,
    /// `D^∘3 = Prod(D, D^⊤, D^⊤²)`
    PlainLead,
    /// `D^∘3 = Prod(D^⊤², D, D^⊤)`
    DoubleTransposeLead,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingCheck {
    pub is_scaling: bool,
    /// First characterisation satisfied within tolerance.
    pub matched: Option<ScalingForm>,
    /// Residuals in the order of [`ScalingForm`] variants.
    pub residuals: [f64; 3],
}

pub fn is_scaling(d: &Hypermatrix3, tol: f64) -> Result<ScalingCheck> {
    d.require_cubic("is_scaling")?;
    let cube = hadamard_exp(d, C64::new(3.0, 0.0));
    let t1 = d.transpose();
    let t2 = d.transpose_pow(2);
    let residuals = [
        prod3(&t1, &t2, d)?.max_abs_diff(&cube),
        prod3(d, &t1, &t2)?.max_abs_diff(&cube),
        prod3(&t2, d, &t1)?.max_abs_diff(&cube),
    ];
    let forms = [ScalingForm::TransposeLead, ScalingForm::PlainLead, ScalingForm::DoubleTransposeLead];
    let matched = residuals.iter().position(|&r| r <= tol).map(|p| forms[p]);
    Ok(ScalingCheck { is_scaling: matched.is_some(), matched, residuals })
}

// ── One-factor solves ───────────────────────────────────────────────────────

/// Slot of the unknown factor in `Prod(·,·,·) = target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorPosition {
    First,
    Middle,
    Third,
}

/// Solves `Prod(X, k1, k2) = target` (first), `Prod(k1, X, k2) = target`
/// (middle) or `Prod(k1, k2, X) = target` (third) fiber by fiber.
pub fn solve_factor(
    position: FactorPosition,
    known1: &Hypermatrix3,
    known2: &Hypermatrix3,
    target: &Hypermatrix3,
) -> Result<Hypermatrix3> {
    solve_factor_with(position, known1, known2, target, DEFAULT_MAX_FIBER_COND)
}

/// [`solve_factor`] with an explicit condition-estimate threshold.
pub fn solve_factor_with(
    position: FactorPosition,
    known1: &Hypermatrix3,
    known2: &Hypermatrix3,
    target: &Hypermatrix3,
    max_cond: f64,
) -> Result<Hypermatrix3> {
    let [t0, t1, t2] = target.shape();
    let mismatch = |what: String| Err(BmxError::Shape(format!("solve_factor ({position:?}): {what}")));
    match position {
        FactorPosition::First => {
            // X (m,ℓ,p), B (m,n,ℓ), C (ℓ,n,p); fiber (i,k) over j.
            let (b, c) = (known1, known2);
            let [m, n, l] = b.shape();
            let [l2, n2, p] = c.shape();
            if l != l2 || n != n2 || [t0, t1, t2] != [m, n, p] {
                return mismatch(format!("known {:?}, {:?}, target {:?}", b.shape(), c.shape(), target.shape()));
            }
            if n != l {
                return mismatch(format!("fiber system is {n}x{l}, not square"));
            }
            let mut x = Hypermatrix3::zeros([m, l, p]);
            for i in 0..m {
                for k in 0..p {
                    let coeffs: Vec<C64> =
                        (0..n).flat_map(|j| (0..l).map(move |t| b[(i, j, t)] * c[(t, j, k)])).collect();
                    let rhs: Vec<C64> = (0..n).map(|j| target[(i, j, k)]).collect();
                    let sol = fiber_solve(&coeffs, l, &rhs, max_cond, (i, k))?;
                    for t in 0..l {
                        x[(i, t, k)] = sol[t];
                    }
                }
            }
            Ok(x)
        }
        FactorPosition::Middle => {
            // A (m,ℓ,p), X (m,n,ℓ), C (ℓ,n,p); fiber (i,j) over k.
            let (a, c) = (known1, known2);
            let [m, l, p] = a.shape();
            let [l2, n, p2] = c.shape();
            if l != l2 || p != p2 || [t0, t1, t2] != [m, n, p] {
                return mismatch(format!("known {:?}, {:?}, target {:?}", a.shape(), c.shape(), target.shape()));
            }
            if p != l {
                return mismatch(format!("fiber system is {p}x{l}, not square"));
            }
            let mut x = Hypermatrix3::zeros([m, n, l]);
            for i in 0..m {
                for j in 0..n {
                    let coeffs: Vec<C64> =
                        (0..p).flat_map(|k| (0..l).map(move |t| a[(i, t, k)] * c[(t, j, k)])).collect();
                    let rhs: Vec<C64> = (0..p).map(|k| target[(i, j, k)]).collect();
                    let sol = fiber_solve(&coeffs, l, &rhs, max_cond, (i, j))?;
                    for t in 0..l {
                        x[(i, j, t)] = sol[t];
                    }
                }
            }
            Ok(x)
        }
        FactorPosition::Third => {
            // A (m,ℓ,p), B (m,n,ℓ), X (ℓ,n,p); fiber (j,k) over i.
            let (a, b) = (known1, known2);
            let [m, l, p] = a.shape();
            let [m2, n, l2] = b.shape();
            if l != l2 || m != m2 || [t0, t1, t2] != [m, n, p] {
                return mismatch(format!("known {:?}, {:?}, target {:?}", a.shape(), b.shape(), target.shape()));
            }
            if m != l {
                return mismatch(format!("fiber system is {m}x{l}, not square"));
            }
            let mut x = Hypermatrix3::zeros([l, n, p]);
            for j in 0..n {
                for k in 0..p {
                    let coeffs: Vec<C64> =
                        (0..m).flat_map(|i| (0..l).map(move |t| a[(i, t, k)] * b[(i, j, t)])).collect();
                    let rhs: Vec<C64> = (0..m).map(|i| target[(i, j, k)]).collect();
                    let sol = fiber_solve(&coeffs, l, &rhs, max_cond, (j, k))?;
                    for t in 0..l {
                        x[(t, j, k)] = sol[t];
                    }
                }
            }
            Ok(x)
        }
    }
}

fn fiber_solve(coeffs: &[C64], n: usize, rhs: &[C64], max_cond: f64, fiber: (usize, usize)) -> Result<Vec<C64>> {
    linalg::solve_square(coeffs, n, rhs, max_cond, "fiber").map(|(x, _)| x).map_err(|e| match e {
        BmxError::SingularSystem { cond, .. } => BmxError::SingularFiber { fiber, cond },
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conformability_error_names_the_axis() {
        let a = Hypermatrix3::zeros([2, 3, 2]);
        let b = Hypermatrix3::zeros([2, 2, 2]);
        let c = Hypermatrix3::zeros([3, 2, 2]);
        let err = prod3(&a, &b, &c).unwrap_err().to_string();
        assert!(err.contains("contraction index"), "{err}");
    }

    #[test]
    fn check_threshold_is_inclusive() {
        assert!(Check::new(1e-9, 1e-9).passed);
        assert!(!Check::new(2e-9, 1e-9).passed);
    }
}
