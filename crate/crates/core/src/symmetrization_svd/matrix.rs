use crate::error::{BmxError, Result};
use crate::hypermatrix_core::{Matrix, C64};
use nalgebra::DMatrix;

/// Relative eigenvalue gap under which two squared singular values count as
/// repeated.
const REPEATED_GAP: f64 = 1e-8;
const JACOBI_SWEEPS: usize = 100;

/// `A = U · diag(σ) · V` for a real square A, with σ sorted descending.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSvd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
    /// Set when two squared singular values coincide; the factors then come
    /// from the eigenvectors directly instead of the Vandermonde systems.
    pub repeated: bool,
    /// 1-norm condition of the Vandermonde matrix (infinite when repeated).
    pub vandermonde_condition: f64,
}

fn real_entries(a: &Matrix, op: &'static str) -> Result<(usize, Vec<f64>)> {
    let n = a.require_square(op)?;
    if a.max_imag() > 0.0 {
        return Err(BmxError::Precondition(format!("{op} needs a real matrix")));
    }
    Ok((n, a.data().iter().map(|z| z.re).collect()))
}

fn to_matrix(n: usize, m: usize, f: impl Fn(usize, usize) -> f64) -> Matrix {
    Matrix::from_fn(n, m, |i, j| C64::new(f(i, j), 0.0))
}

/// Cyclic Jacobi eigen-decomposition of a real symmetric matrix. Returns
/// eigenvalues in descending order and the matching eigenvectors as columns.
pub fn jacobi_eigen_symmetric(a: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let (n, mut s) = real_entries(a, "jacobi_eigen_symmetric")?;
    let asym = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (s[i * n + j] - s[j * n + i]).abs())
        .fold(0.0, f64::max);
    let scale = s.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if asym > 1e-12 * scale.max(1.0) {
        return Err(BmxError::Precondition(format!("matrix is not symmetric (defect {asym:.3e})")));
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _ in 0..JACOBI_SWEEPS {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| s[i * n + j].powi(2)).sum();
        if off.sqrt() <= f64::EPSILON * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = s[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (s[q * n + q] - s[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let (skp, skq) = (s[k * n + p], s[k * n + q]);
                    s[k * n + p] = c * skp - sn * skq;
                    s[k * n + q] = sn * skp + c * skq;
                }
                for k in 0..n {
                    let (spk, sqk) = (s[p * n + k], s[q * n + k]);
                    s[p * n + k] = c * spk - sn * sqk;
                    s[q * n + k] = sn * spk + c * sqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - sn * vkq;
                    v[k * n + q] = sn * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| s[y * n + y].total_cmp(&s[x * n + x]));
    let values = order.iter().map(|&k| s[k * n + k]).collect();
    let vectors = to_matrix(n, n, |i, j| v[i * n + order[j]]);
    Ok((values, vectors))
}

fn gram(a: &[f64], n: usize, transpose_first: bool) -> Vec<f64> {
    let at = |i: usize, j: usize| if transpose_first { a[j * n + i] } else { a[i * n + j] };
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            g[i * n + j] = (0..n).map(|k| at(i, k) * at(j, k)).sum();
        }
    }
    g
}

/// Solves the Vandermonde systems for `P[i][j][k] = X[i,k]·X[j,k]` from the
/// powers of `g`, then reads off each column of X from its dominant row.
fn vandermonde_columns(g: &[f64], n: usize, lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>) -> Option<Vec<f64>> {
    let mut powers = vec![DMatrix::<f64>::identity(n, n)];
    let gm = DMatrix::from_row_slice(n, n, g);
    for p in 1..n {
        powers.push(&powers[p - 1] * &gm);
    }
    let mut prods = vec![0.0; n * n * n];
    for i in 0..n {
        for j in i..n {
            let rhs = nalgebra::DVector::from_iterator(n, powers.iter().map(|pw| pw[(i, j)]));
            let x = lu.solve(&rhs)?;
            for k in 0..n {
                prods[(i * n + j) * n + k] = x[k];
                prods[(j * n + i) * n + k] = x[k];
            }
        }
    }
    let mut x = vec![0.0; n * n];
    for k in 0..n {
        let r = (0..n).max_by(|&a, &b| prods[(a * n + a) * n + k].total_cmp(&prods[(b * n + b) * n + k]))?;
        let pivot = prods[(r * n + r) * n + k].max(0.0).sqrt();
        if pivot == 0.0 {
            return None;
        }
        for j in 0..n {
            x[j * n + k] = if j == r { pivot } else { prods[(r * n + j) * n + k] / pivot };
        }
    }
    Some(x)
}

/// Extends the rows `done` of an orthonormal set to a full basis of ℝⁿ.
fn complete_rows(rows: &mut [Vec<f64>], done: &[bool]) {
    let n = rows.len();
    let mut candidates = (0..n).map(|e| {
        let mut v = vec![0.0; n];
        v[e] = 1.0;
        v
    });
    for k in 0..n {
        if done[k] {
            continue;
        }
        for mut c in candidates.by_ref() {
            for (r, row) in rows.iter().enumerate() {
                if done[r] || r < k {
                    let d: f64 = row.iter().zip(&c).map(|(x, y)| x * y).sum();
                    c.iter_mut().zip(row).for_each(|(x, y)| *x -= d * y);
                }
            }
            let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                rows[k] = c.into_iter().map(|x| x / norm).collect();
                break;
            }
        }
    }
}

/// SVD of a real square matrix through the symmetric products `A·Aᵀ` and
/// `Aᵀ·A`: singular values from their eigenvalues, factor entries from
/// Vandermonde systems in those eigenvalues.
pub fn matrix_svd_sym(a: &Matrix) -> Result<MatrixSvd> {
    let (n, raw) = real_entries(a, "matrix_svd_sym")?;
    let scale = raw.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Ok(MatrixSvd {
            u: Matrix::identity(n),
            sigma: vec![0.0; n],
            v: Matrix::identity(n),
            repeated: n > 1,
            vandermonde_condition: f64::INFINITY,
        });
    }
    let s: Vec<f64> = raw.iter().map(|x| x / scale).collect();
    let g = gram(&s, n, false);
    let h = gram(&s, n, true);
    let (ev, eigvecs) = jacobi_eigen_symmetric(&to_matrix(n, n, |i, j| g[i * n + j]))?;
    let ev: Vec<f64> = ev.into_iter().map(|x| x.max(0.0)).collect();
    let sigma: Vec<f64> = ev.iter().map(|x| x.sqrt() * scale).collect();
    let top = ev.first().copied().unwrap_or(0.0);
    let repeated = ev.windows(2).any(|w| w[0] - w[1] < REPEATED_GAP * top);

    let vander = DMatrix::from_fn(n, n, |p, k| ev[k].powi(p as i32));
    let vandermonde_condition = if repeated {
        f64::INFINITY
    } else {
        vander.clone().try_inverse().map_or(f64::INFINITY, |inv| vander.lp_norm(1) * inv.lp_norm(1))
    };
    let lu = vander.lu();
    let vander_route = if repeated {
        None
    } else {
        vandermonde_columns(&g, n, &lu).zip(vandermonde_columns(&h, n, &lu))
    };

    let (u, v) = match vander_route {
        Some((u, vt)) => {
            let mut v: Vec<f64> = (0..n * n).map(|idx| vt[(idx % n) * n + idx / n]).collect();
            for k in 0..n {
                let proj: f64 = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .map(|(i, j)| u[i * n + k] * s[i * n + j] * v[k * n + j])
                    .sum();
                if proj < 0.0 {
                    v[k * n..(k + 1) * n].iter_mut().for_each(|x| *x = -*x);
                }
            }
            (u, v)
        }
        None => {
            let u: Vec<f64> = eigvecs.data().iter().map(|z| z.re).collect();
            let mut rows = vec![vec![0.0; n]; n];
            let mut done = vec![false; n];
            for k in 0..n {
                let sk = ev[k].sqrt();
                if sk > REPEATED_GAP * top.sqrt() {
                    rows[k] = (0..n).map(|j| (0..n).map(|i| u[i * n + k] * s[i * n + j]).sum::<f64>() / sk).collect();
                    done[k] = true;
                }
            }
            complete_rows(&mut rows, &done);
            (u, rows.concat())
        }
    };
    Ok(MatrixSvd {
        u: to_matrix(n, n, |i, j| u[i * n + j]),
        sigma,
        v: to_matrix(n, n, |i, j| v[i * n + j]),
        repeated,
        vandermonde_condition,
    })
}
