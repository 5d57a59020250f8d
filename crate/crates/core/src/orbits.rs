//! Tensorial orbits `{A·M·B : A ∈ GL_m, B ∈ GL_n}` of matrices over prime
//! fields, by formula and by enumeration.

use crate::error::{BmxError, Result};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A finite field of order `p^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteFieldSpec {
    pub p: u64,
    pub k: u32,
}

impl FiniteFieldSpec {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(BmxError::InvalidParameter(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(BmxError::InvalidParameter("extension degree must be at least 1".into()));
        }
        Ok(Self { p, k })
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }
}

/// `Π_{0≤i<n} (p^{kn} − p^{ki})`, the orbit size of an invertible n×n matrix.
pub fn orbit_cardinality(f: &FiniteFieldSpec, n: u32) -> Result<BigUint> {
    if n == 0 {
        return Err(BmxError::InvalidParameter("n must be at least 1".into()));
    }
    let q = BigUint::from(f.p).pow(f.k);
    let top = q.pow(n);
    Ok((0..n).map(|i| &top - q.pow(i)).product())
}

/// Matrix over `F_p` with entries in `0..p`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FpMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<u64>,
}

impl FpMatrix {
    /// Reduces the given integer rows modulo `p`.
    pub fn new(rows: &[Vec<i64>], p: u64) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(BmxError::Shape("matrix rows must be nonempty and of equal length".into()));
        }
        let entries = rows.iter().flatten().map(|&v| v.rem_euclid(p as i64) as u64).collect();
        Ok(Self { rows: r, cols: c, entries })
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.entries.chunks(self.cols).map(<[u64]>::to_vec).collect()
    }

    /// Whether the matrix is square with nonzero determinant mod `p`.
    pub fn is_invertible(&self, p: u64) -> bool {
        self.rows == self.cols && det_mod(self, p) != 0
    }

    fn at(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    fn mul(&self, o: &Self, p: u64) -> Self {
        let entries = (0..self.rows)
            .flat_map(|i| (0..o.cols).map(move |j| (i, j)))
            .map(|(i, j)| (0..self.cols).map(|t| self.at(i, t) * o.at(t, j)).sum::<u64>() % p)
            .collect();
        Self { rows: self.rows, cols: o.cols, entries }
    }
}

/// Determinant mod p by Gaussian elimination.
fn det_mod(m: &FpMatrix, p: u64) -> u64 {
    let n = m.rows;
    let mut a: Vec<Vec<u64>> = m.to_rows();
    let inv = |x: u64| (1..p).find(|y| x * y % p == 1).expect("nonzero element of a prime field");
    let mut det = 1;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| a[r][col] != 0) else {
            return 0;
        };
        if piv != col {
            a.swap(piv, col);
            det = (p - det) % p;
        }
        det = det * a[col][col] % p;
        let pinv = inv(a[col][col]);
        for r in col + 1..n {
            let f = a[r][col] * pinv % p;
            let (top, rest) = a.split_at_mut(r);
            for (x, &y) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                *x = (*x + p * p - f * y % p) % p;
            }
        }
    }
    det
}

/// All invertible `n × n` matrices over `F_p`.
fn general_linear(n: usize, p: u64) -> Vec<FpMatrix> {
    let total = p.pow((n * n) as u32);
    (0..total)
        .map(|mut code| {
            let entries = (0..n * n)
                .map(|_| {
                    let v = code % p;
                    code /= p;
                    v
                })
                .collect();
            FpMatrix { rows: n, cols: n, entries }
        })
        .filter(|m| det_mod(m, p) != 0)
        .collect()
}

/// Largest prime and side accepted by [`enumerate_orbit`].
pub const ENUMERATION_MAX_P: u64 = 3;
pub const ENUMERATION_MAX_DIM: usize = 3;

/// Enumerates the orbit of `m` under left and right multiplication by
/// invertible matrices. Only prime fields with `p ≤ 3` and sides `≤ 3`.
pub fn enumerate_orbit(m: &FpMatrix, f: &FiniteFieldSpec) -> Result<BTreeSet<FpMatrix>> {
    if f.k != 1 {
        return Err(BmxError::SizeGuard("orbit enumeration supports prime fields only".into()));
    }
    if f.p > ENUMERATION_MAX_P || m.rows > ENUMERATION_MAX_DIM || m.cols > ENUMERATION_MAX_DIM {
        return Err(BmxError::SizeGuard(format!(
            "enumeration needs p ≤ {ENUMERATION_MAX_P} and sides ≤ {ENUMERATION_MAX_DIM}, got p = {} and {}×{}",
            f.p, m.rows, m.cols
        )));
    }
    if m.entries.iter().any(|&v| v >= f.p) {
        return Err(BmxError::InvalidParameter(format!("entries must lie in 0..{}", f.p)));
    }
    let left = general_linear(m.rows, f.p);
    let right = general_linear(m.cols, f.p);
    let mut orbit = BTreeSet::new();
    for a in &left {
        let am = a.mul(m, f.p);
        for b in &right {
            orbit.insert(am.mul(b, f.p));
        }
    }
    Ok(orbit)
}
