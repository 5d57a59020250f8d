//! Shared fixtures and independent reference implementations for tests.
//! Oracles here are written from the definitions with plain loops and do
//! not call into the library's arithmetic.
#![allow(dead_code)]

use bmx::{Hypermatrix3, Matrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn random_complex(rng: &mut impl Rng) -> C64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_hyper(rng: &mut impl Rng, shape: [usize; 3]) -> Hypermatrix3 {
    Hypermatrix3::from_fn(shape, |_, _, _| random_complex(rng))
}

/// Random complex side-2 input scaled to unit max entry.
pub fn random_unit_side2(rng: &mut impl Rng) -> Hypermatrix3 {
    let a = random_hyper(rng, [2, 2, 2]);
    let m = a.max_abs();
    a.scale(c(1.0 / m, 0.0))
}

pub fn random_int_hyper(rng: &mut impl Rng, shape: [usize; 3]) -> Hypermatrix3 {
    Hypermatrix3::from_fn(shape, |_, _, _| c(f64::from(rng.gen_range(-5i32..=5)), f64::from(rng.gen_range(-5i32..=5))))
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| random_complex(rng))
}

pub fn random_real_matrix(rng: &mut impl Rng, n: usize) -> Matrix {
    Matrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), 0.0))
}

fn at(h: &Hypermatrix3, i: usize, j: usize, k: usize) -> C64 {
    h.get(i, j, k).expect("index in range")
}

/// Σ_t A[i,t,k] B[i,j,t] C[t,j,k] by direct loops.
pub fn naive_prod3(a: &Hypermatrix3, b: &Hypermatrix3, cc: &Hypermatrix3) -> Hypermatrix3 {
    let [m, l, p] = a.shape();
    let n = b.shape()[1];
    let mut out = vec![C64::new(0.0, 0.0); m * n * p];
    for i in 0..m {
        for j in 0..n {
            for k in 0..p {
                let mut s = C64::new(0.0, 0.0);
                for t in 0..l {
                    s += at(a, i, t, k) * at(b, i, j, t) * at(cc, t, j, k);
                }
                out[(i * n + j) * p + k] = s;
            }
        }
    }
    Hypermatrix3::new([m, n, p], out).unwrap()
}

/// Σ_{t0,t1,t2} A[i,t0,k] B[i,j,t1] C[t2,j,k] M[t0,t1,t2] by direct loops.
pub fn naive_prod3_bg(a: &Hypermatrix3, b: &Hypermatrix3, cc: &Hypermatrix3, bg: &Hypermatrix3) -> Hypermatrix3 {
    let [m, l, p] = a.shape();
    let n = b.shape()[1];
    let mut out = vec![C64::new(0.0, 0.0); m * n * p];
    for i in 0..m {
        for j in 0..n {
            for k in 0..p {
                let mut s = C64::new(0.0, 0.0);
                for t0 in 0..l {
                    for t1 in 0..l {
                        for t2 in 0..l {
                            s += at(a, i, t0, k) * at(b, i, j, t1) * at(cc, t2, j, k) * at(bg, t0, t1, t2);
                        }
                    }
                }
                out[(i * n + j) * p + k] = s;
            }
        }
    }
    Hypermatrix3::new([m, n, p], out).unwrap()
}

/// Transpose by explicit index map: out[i,j,k] = a[k,i,j].
pub fn naive_transpose(a: &Hypermatrix3) -> Hypermatrix3 {
    let [n0, n1, n2] = a.shape();
    Hypermatrix3::from_fn([n1, n2, n0], |i, j, k| at(a, k, i, j))
}

pub fn naive_delta(n: usize) -> Hypermatrix3 {
    Hypermatrix3::from_fn([n, n, n], |i, j, k| if i == j && j == k { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

/// Singular values by one-sided Jacobi rotations on the columns of a real
/// matrix, sorted descending.
pub fn jacobi_singular_values(rows: &[Vec<f64>]) -> Vec<f64> {
    let m = rows.len();
    let n = rows[0].len();
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for row in a.iter() {
                    alpha += row[p] * row[p];
                    beta += row[q] * row[q];
                    gamma += row[p] * row[q];
                }
                if gamma.abs() <= 1e-300 {
                    continue;
                }
                off = off.max(gamma.abs() / (alpha * beta).sqrt());
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = cs * x - sn * y;
                    row[q] = sn * x + cs * y;
                }
            }
        }
        if off < 1e-15 {
            break;
        }
    }
    let mut s: Vec<f64> = (0..n).map(|j| (0..m).map(|i| a[i][j] * a[i][j]).sum::<f64>().sqrt()).collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

pub fn real_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).unwrap().re).collect()).collect()
}

/// Random unitary by modified Gram–Schmidt on a random complex matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> Matrix {
    let mut cols: Vec<Vec<C64>> = (0..n).map(|_| (0..n).map(|_| random_complex(rng)).collect()).collect();
    for j in 0..n {
        for p in 0..j {
            let dot: C64 = (0..n).map(|i| cols[p][i].conj() * cols[j][i]).sum();
            for i in 0..n {
                let v = cols[p][i];
                cols[j][i] -= dot * v;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|z| *z /= norm);
    }
    Matrix::from_fn(n, n, |i, j| cols[j][i])
}

pub fn rel_err(a: &Hypermatrix3, b: &Hypermatrix3) -> f64 {
    a.max_abs_diff(b) / a.max_abs().max(f64::MIN_POSITIVE)
}
