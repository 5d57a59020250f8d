//! Dense containers for third-order hypermatrices and matrices, together with
//! the index-permuting operations (transposes, quarter-turn rotations) and the
//! structural constructions (Kronecker product, direct sum).

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{BmxError, Result};

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

// ── Hypermatrix3 ────────────────────────────────────────────────────────────

/// Dense order-3 complex hypermatrix stored row-major: entry `(i, j, k)` lives
/// at `(i * n1 + j) * n2 + k`.
#[derive(Clone, PartialEq)]
pub struct Hypermatrix3 {
    shape: [usize; 3],
    data: Vec<C64>,
}

impl Hypermatrix3 {
    pub fn new(shape: [usize; 3], data: Vec<C64>) -> Result<Self> {
        let len = shape[0] * shape[1] * shape[2];
        if data.len() != len {
            return Err(BmxError::Shape(format!(
                "shape {shape:?} needs {len} entries, got {}",
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: [usize; 3]) -> Self {
        Self { shape, data: vec![ZERO; shape[0] * shape[1] * shape[2]] }
    }

    pub fn from_fn(shape: [usize; 3], mut f: impl FnMut(usize, usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(shape[0] * shape[1] * shape[2]);
        for i in 0..shape[0] {
            for j in 0..shape[1] {
                for k in 0..shape[2] {
                    data.push(f(i, j, k));
                }
            }
        }
        Self { shape, data }
    }

    /// Builds a hypermatrix from real entries in row-major order.
    pub fn from_real(shape: [usize; 3], values: &[f64]) -> Result<Self> {
        Self::new(shape, values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_cubic(&self) -> bool {
        self.shape[0] == self.shape[1] && self.shape[1] == self.shape[2]
    }

    /// Side length when cubic.
    pub fn side(&self) -> Option<usize> {
        self.is_cubic().then_some(self.shape[0])
    }

    pub(crate) fn require_cubic(&self, op: &'static str) -> Result<usize> {
        self.side().ok_or(BmxError::NotCubic { op, shape: self.shape })
    }

    pub(crate) fn require_side(&self, op: &'static str, n: usize) -> Result<()> {
        if self.shape != [n, n, n] {
            return Err(BmxError::Shape(format!(
                "{op} requires side {n}, got shape {:?}",
                self.shape
            )));
        }
        Ok(())
    }

    fn offset(&self, i: usize, j: usize, k: usize) -> Option<usize> {
        let [n0, n1, n2] = self.shape;
        (i < n0 && j < n1 && k < n2).then(|| (i * n1 + j) * n2 + k)
    }

    /// Checked entry access; out-of-range indices yield `None`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> Option<C64> {
        self.offset(i, j, k).map(|o| self.data[o])
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: C64) -> Result<()> {
        let o = self.offset(i, j, k).ok_or_else(|| {
            BmxError::Shape(format!("index ({i}, {j}, {k}) outside shape {:?}", self.shape))
        })?;
        self.data[o] = value;
        Ok(())
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { shape: self.shape, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|z| z * c)
    }

    fn zip_with(&self, other: &Self, op: &str, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.shape != other.shape {
            return Err(BmxError::Shape(format!(
                "{op}: {:?} vs {:?}",
                self.shape, other.shape
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { shape: self.shape, data })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    /// Max-norm ‖·‖∞ over all entries.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// ‖self − other‖∞; infinite when shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.shape != other.shape {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Cyclic transpose: result has shape (n1, n2, n0) and
    /// `result[i, j, k] = self[k, i, j]`.
    pub fn transpose(&self) -> Self {
        let [n0, n1, n2] = self.shape;
        Self::from_fn([n1, n2, n0], |i, j, k| self[(k, i, j)])
    }

    /// `t`-fold transpose (period 3).
    pub fn transpose_pow(&self, t: usize) -> Self {
        match t % 3 {
            0 => self.clone(),
            1 => self.transpose(),
            _ => {
                let [n0, n1, n2] = self.shape;
                Self::from_fn([n2, n0, n1], |i, j, k| self[(j, k, i)])
            }
        }
    }

    /// Sub-hypermatrix with `axis` fixed to `index`; the singleton axis is kept,
    /// so `select(1, i)` of a 2×2×2 is the 2×1×2 slab `A[:, i:i+1, :]`.
    pub fn select(&self, axis: usize, index: usize) -> Result<Self> {
        if axis > 2 || index >= self.shape[axis] {
            return Err(BmxError::Shape(format!(
                "select axis {axis} index {index} outside shape {:?}",
                self.shape
            )));
        }
        let mut shape = self.shape;
        shape[axis] = 1;
        Ok(Self::from_fn(shape, |i, j, k| {
            let mut idx = [i, j, k];
            idx[axis] = index;
            self[(idx[0], idx[1], idx[2])]
        }))
    }

    /// Depth slice `A[:, :, k]` as a matrix.
    pub fn depth_slice(&self, k: usize) -> Result<Matrix> {
        if k >= self.shape[2] {
            return Err(BmxError::Shape(format!("depth slice {k} outside shape {:?}", self.shape)));
        }
        Ok(Matrix::from_fn(self.shape[0], self.shape[1], |i, j| self[(i, j, k)]))
    }

    /// Stacks equally sized depth slices into a hypermatrix.
    pub fn from_depth_slices(slices: &[Matrix]) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| BmxError::Shape("no depth slices given".into()))?;
        let (r, c) = first.shape();
        if slices.iter().any(|s| s.shape() != (r, c)) {
            return Err(BmxError::Shape("depth slices differ in shape".into()));
        }
        Ok(Self::from_fn([r, c, slices.len()], |i, j, k| slices[k][(i, j)]))
    }

    /// Iterates `((i, j, k), value)` in storage order.
    pub fn indexed(&self) -> impl Iterator<Item = ((usize, usize, usize), C64)> + '_ {
        let [_, n1, n2] = self.shape;
        self.data.iter().enumerate().map(move |(o, &z)| {
            let k = o % n2;
            let j = (o / n2) % n1;
            let i = o / (n1 * n2);
            ((i, j, k), z)
        })
    }
}

impl Index<(usize, usize, usize)> for Hypermatrix3 {
    type Output = C64;
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &C64 {
        match self.offset(i, j, k) {
            Some(o) => &self.data[o],
            None => panic!("index ({i}, {j}, {k}) outside shape {:?}", self.shape),
        }
    }
}

impl IndexMut<(usize, usize, usize)> for Hypermatrix3 {
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut C64 {
        match self.offset(i, j, k) {
            Some(o) => &mut self.data[o],
            None => panic!("index ({i}, {j}, {k}) outside shape {:?}", self.shape),
        }
    }
}

impl fmt::Debug for Hypermatrix3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Hypermatrix3 {:?}", self.shape)?;
        for k in 0..self.shape[2] {
            writeln!(f, "  [:, :, {k}]")?;
            for i in 0..self.shape[0] {
                let row: Vec<String> =
                    (0..self.shape[1]).map(|j| format!("{:.6}", self[(i, j, k)])).collect();
                writeln!(f, "    {}", row.join("  "))?;
            }
        }
        Ok(())
    }
}

// ── Matrix ──────────────────────────────────────────────────────────────────

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(BmxError::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from real rows; all rows must share a length.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(BmxError::Shape("ragged rows".into()));
        }
        Ok(Self::from_fn(rows.len(), cols, |i, j| C64::new(rows[i][j], 0.0)))
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub(crate) fn require_square(&self, op: &'static str) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(BmxError::NotSquare { op, rows: self.rows, cols: self.cols })
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<C64> {
        (i < self.rows && j < self.cols).then(|| self.data[i * self.cols + j])
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|z| z * c)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(BmxError::Shape(format!(
                "matmul: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|t| self[(i, t)] * other[(t, j)]).sum()
        }))
    }

    fn zip_with(&self, other: &Self, op: &str, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(BmxError::Shape(format!(
                "{op}: {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Kronecker product: entry `(i0·r1 + i1, j0·c1 + j1)` is `a[i0,j0]·b[i1,j1]`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }

    /// Block-diagonal direct sum.
    pub fn dirsum(&self, other: &Self) -> Self {
        Self::from_fn(self.rows + other.rows, self.cols + other.cols, |i, j| {
            match (i < self.rows, j < self.cols) {
                (true, true) => self[(i, j)],
                (false, false) => other[(i - self.rows, j - self.cols)],
                _ => ZERO,
            }
        })
    }

    /// Largest imaginary-part magnitude; zero for real matrices.
    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) outside {}x{}", self.rows, self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) outside {}x{}", self.rows, self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:.6}", self[(i, j)])).collect();
            writeln!(f, "  {}", row.join("  "))?;
        }
        Ok(())
    }
}

// ── Rotation angles ─────────────────────────────────────────────────────────

/// Quarter-turn angle θ = q·π/2 with q ∈ {0, 1, 2, 3}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RotationAngle(u8);

impl RotationAngle {
    pub const R0: Self = Self(0);
    pub const R90: Self = Self(1);
    pub const R180: Self = Self(2);
    pub const R270: Self = Self(3);

    pub fn new(quarter_turns: u8) -> Result<Self> {
        if quarter_turns > 3 {
            return Err(BmxError::InvalidParameter(format!(
                "quarter turns must lie in 0..=3, got {quarter_turns}"
            )));
        }
        Ok(Self(quarter_turns))
    }

    /// Wraps any integer number of quarter turns into range.
    pub fn wrapping(quarter_turns: i64) -> Self {
        Self(quarter_turns.rem_euclid(4) as u8)
    }

    pub fn quarter_turns(self) -> u8 {
        self.0
    }

    pub fn radians(self) -> f64 {
        f64::from(self.0) * std::f64::consts::FRAC_PI_2
    }

    /// Angle sum modulo 2π.
    pub fn compose(self, other: Self) -> Self {
        Self((self.0 + other.0) % 4)
    }
}

/// Source index `(r, c)` read by entry `(i, j)` of a side-`n` quarter-turn rotation.
fn rotation_source(n: usize, q: RotationAngle, i: usize, j: usize) -> (usize, usize) {
    match q.0 {
        0 => (i, j),
        1 => (n - 1 - j, i),
        2 => (n - 1 - i, n - 1 - j),
        _ => (j, n - 1 - i),
    }
}

// ── Canonical constants and free-function operations ────────────────────────

/// Kronecker delta hypermatrix of side `n`.
pub fn delta(n: usize) -> Hypermatrix3 {
    Hypermatrix3::from_fn([n, n, n], |i, j, k| if i == j && j == k { ONE } else { ZERO })
}

pub fn transpose(a: &Hypermatrix3) -> Hypermatrix3 {
    a.transpose()
}

/// Anti-identity Q of side `n`.
pub fn flip_q(n: usize) -> Matrix {
    Matrix::from_fn(n, n, |i, j| if i + j + 1 == n { ONE } else { ZERO })
}

/// Quarter-turn index rotation: R₀ = m, R_{π/2} = mᵀQ, R_π = QmQ, R_{3π/2} = Qmᵀ.
pub fn rotate_matrix(m: &Matrix, theta: RotationAngle) -> Result<Matrix> {
    let n = m.require_square("rotate_matrix")?;
    let q = flip_q(n);
    Ok(match theta.0 {
        0 => m.clone(),
        1 => m.transpose().matmul(&q)?,
        2 => q.matmul(m)?.matmul(&q)?,
        _ => q.matmul(&m.transpose())?,
    })
}

/// Slice-wise rotation of a cubic hypermatrix: θx acts on row slices
/// `A[i, :, :]`, θy on column slices `A[:, j, :]`, θz on depth slices
/// `A[:, :, k]`, applied in that order.
pub fn rotate_hyper(
    a: &Hypermatrix3,
    theta_x: RotationAngle,
    theta_y: RotationAngle,
    theta_z: RotationAngle,
) -> Result<Hypermatrix3> {
    let n = a.require_cubic("rotate_hyper")?;
    let shape = [n, n, n];
    let mut out = a.clone();
    if theta_x.0 != 0 {
        let src = out;
        out = Hypermatrix3::from_fn(shape, |i, j, k| {
            let (r, c) = rotation_source(n, theta_x, j, k);
            src[(i, r, c)]
        });
    }
    if theta_y.0 != 0 {
        let src = out;
        out = Hypermatrix3::from_fn(shape, |i, j, k| {
            let (r, c) = rotation_source(n, theta_y, i, k);
            src[(r, j, c)]
        });
    }
    if theta_z.0 != 0 {
        let src = out;
        out = Hypermatrix3::from_fn(shape, |i, j, k| {
            let (r, c) = rotation_source(n, theta_z, i, j);
            src[(r, c, k)]
        });
    }
    Ok(out)
}

/// Entry-wise power with zeros fixed; principal branch for non-integer
/// exponents, exact repeated multiplication for small integer exponents.
pub fn hadamard_exp(h: &Hypermatrix3, z: C64) -> Hypermatrix3 {
    let int_exp = (z.im == 0.0 && z.re.fract() == 0.0 && z.re.abs() <= 64.0).then_some(z.re as i32);
    h.map(|x| {
        if x == ZERO {
            ZERO
        } else if let Some(p) = int_exp {
            x.powi(p)
        } else {
            x.powc(z)
        }
    })
}

/// Kronecker product on all three indices.
pub fn kron(a: &Hypermatrix3, b: &Hypermatrix3) -> Hypermatrix3 {
    let [b0, b1, b2] = b.shape();
    let [a0, a1, a2] = a.shape();
    Hypermatrix3::from_fn([a0 * b0, a1 * b1, a2 * b2], |i, j, k| {
        a[(i / b0, j / b1, k / b2)] * b[(i % b0, j % b1, k % b2)]
    })
}

/// Block-diagonal placement of `a` then `b` along all three axes. Shapes may
/// differ per axis; [`dirsum`] restricts this to cubic inputs.
pub fn block_diag(a: &Hypermatrix3, b: &Hypermatrix3) -> Hypermatrix3 {
    let sa = a.shape();
    let sb = b.shape();
    Hypermatrix3::from_fn([sa[0] + sb[0], sa[1] + sb[1], sa[2] + sb[2]], |i, j, k| {
        let in_a = (i < sa[0], j < sa[1], k < sa[2]);
        match in_a {
            (true, true, true) => a[(i, j, k)],
            (false, false, false) => b[(i - sa[0], j - sa[1], k - sa[2])],
            _ => ZERO,
        }
    })
}

/// Direct sum of two cubic hypermatrices.
pub fn dirsum(a: &Hypermatrix3, b: &Hypermatrix3) -> Result<Hypermatrix3> {
    a.require_cubic("dirsum")?;
    b.require_cubic("dirsum")?;
    Ok(block_diag(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_follow_row_major_layout() {
        let a = Hypermatrix3::from_fn([2, 3, 4], |i, j, k| C64::new((100 * i + 10 * j + k) as f64, 0.0));
        assert_eq!(a.data()[(1 * 3 + 2) * 4 + 3], C64::new(123.0, 0.0));
        assert_eq!(a.get(2, 0, 0), None);
        assert_eq!(a.get(0, 3, 0), None);
    }

    #[test]
    fn indexed_iteration_matches_lookup() {
        let a = Hypermatrix3::from_fn([2, 3, 2], |i, j, k| C64::new(i as f64, (j * 2 + k) as f64));
        for ((i, j, k), v) in a.indexed() {
            assert_eq!(a[(i, j, k)], v);
        }
    }

    #[test]
    fn transpose_pow_two_matches_double_transpose() {
        let a = Hypermatrix3::from_fn([2, 3, 4], |i, j, k| C64::new((i + 7 * j) as f64, k as f64));
        assert_eq!(a.transpose_pow(2), a.transpose().transpose());
        assert_eq!(a.transpose_pow(3), a);
    }

    #[test]
    fn rotation_angle_validation() {
        assert!(RotationAngle::new(4).is_err());
        assert_eq!(RotationAngle::wrapping(-1), RotationAngle::R270);
        assert_eq!(RotationAngle::R90.compose(RotationAngle::R270), RotationAngle::R0);
    }

    #[test]
    #[should_panic(expected = "outside shape")]
    fn index_out_of_range_panics() {
        let a = delta(2);
        let _ = a[(0, 0, 2)];
    }
}
