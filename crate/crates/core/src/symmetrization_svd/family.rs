use super::{principal_root, Family};
use crate::bm_algebra::prod3;
use crate::error::{BmxError, Result};
use crate::hypermatrix_core::{Hypermatrix3, C64, ZERO};

/// Relative degeneracy threshold on |Q³| and |S³| (scaled by ‖a‖∞⁹).
pub(crate) const DEGENERACY_REL: f64 = 1e-12;

/// Scaling values `(s00, s01, s11)` of one family together with the gauge
/// `t = s01⁶` used to pick a member of the one-parameter solution set.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFamily {
    pub family: Family,
    pub values: [C64; 3],
    pub gauge: C64,
}

/// The four input polynomials entering a family's characteristic equations:
/// `p` and `r` are sums of cubes, `q` and `s` sums of triple products.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyInvariants {
    pub p: C64,
    pub q: C64,
    pub s: C64,
    pub r: C64,
}

impl ScalingFamily {
    pub fn sixth_powers(&self) -> [C64; 3] {
        self.values.map(|v| v.powi(6))
    }

    /// The scaling hypermatrix D of this family.
    pub fn d(&self) -> Hypermatrix3 {
        let [s00, s01, s11] = self.values;
        let slices: [[C64; 4]; 2] = match self.family {
            Family::Mu => [[s00, ZERO, s01, ZERO], [ZERO, s01, ZERO, s11]],
            Family::Nu => [[s00, s01, ZERO, ZERO], [ZERO, ZERO, s01, s11]],
            Family::Omega => [[s00, ZERO, ZERO, s01], [s01, ZERO, ZERO, s11]],
        };
        from_slices(slices)
    }

    /// The partial scaling hypermatrix D^[i] (i ∈ {0, 1}).
    pub fn d_part(&self, i: usize) -> Result<Hypermatrix3> {
        let [s00, s01, s11] = self.values;
        let (lo, hi) = match i {
            0 => (s00, s01),
            1 => (s01, s11),
            _ => return Err(BmxError::InvalidParameter(format!("D^[{i}] needs i in {{0, 1}}"))),
        };
        let slices: [[C64; 4]; 2] = match self.family {
            Family::Mu => [[lo, ZERO, hi, ZERO], [ZERO, lo, ZERO, hi]],
            Family::Nu => [[lo, hi, ZERO, ZERO], [ZERO, ZERO, lo, hi]],
            Family::Omega => [[lo, ZERO, ZERO, hi], [lo, ZERO, ZERO, hi]],
        };
        Ok(from_slices(slices))
    }

    /// Scales a raw factor into its tilde form: `Prod(U, D, Dᵀ)`,
    /// `Prod(Dᵀ, V, D)` or `Prod(D, Dᵀ, W)` depending on the family.
    pub fn scale_factor(&self, raw: &Hypermatrix3) -> Result<Hypermatrix3> {
        let d = self.d();
        let dt = d.transpose();
        match self.family {
            Family::Mu => prod3(raw, &d, &dt),
            Family::Nu => prod3(&dt, raw, &d),
            Family::Omega => prod3(&d, &dt, raw),
        }
    }
}

/// Depth slices given row-major as `[m00, m01, m10, m11]`.
fn from_slices(s: [[C64; 4]; 2]) -> Hypermatrix3 {
    Hypermatrix3::from_fn([2, 2, 2], |i, j, k| s[k][2 * i + j])
}

/// Input polynomials of each family, written out entry by entry.
pub fn family_invariants(a: &Hypermatrix3, family: Family) -> Result<FamilyInvariants> {
    a.require_side("family_invariants", 2)?;
    let e = |i, j, k| a[(i, j, k)];
    let cube = |z: C64| z * z * z;
    Ok(match family {
        Family::Mu => FamilyInvariants {
            p: cube(e(0, 0, 0)) + cube(e(0, 1, 0)),
            q: e(0, 0, 0) * e(0, 0, 1) * e(1, 0, 0) + e(0, 1, 0) * e(0, 1, 1) * e(1, 1, 0),
            s: e(0, 0, 1) * e(1, 0, 0) * e(1, 0, 1) + e(0, 1, 1) * e(1, 1, 0) * e(1, 1, 1),
            r: cube(e(1, 0, 1)) + cube(e(1, 1, 1)),
        },
        Family::Nu => FamilyInvariants {
            p: cube(e(0, 0, 0)) + cube(e(0, 0, 1)),
            q: e(0, 0, 0) * e(0, 1, 0) * e(1, 0, 0) + e(0, 0, 1) * e(0, 1, 1) * e(1, 0, 1),
            s: e(0, 1, 0) * e(1, 0, 0) * e(1, 1, 0) + e(0, 1, 1) * e(1, 0, 1) * e(1, 1, 1),
            r: cube(e(1, 1, 0)) + cube(e(1, 1, 1)),
        },
        Family::Omega => FamilyInvariants {
            p: cube(e(0, 0, 0)) + cube(e(1, 0, 0)),
            q: e(0, 0, 0) * e(0, 0, 1) * e(0, 1, 0) + e(1, 0, 0) * e(1, 0, 1) * e(1, 1, 0),
            s: e(0, 0, 1) * e(0, 1, 0) * e(0, 1, 1) + e(1, 0, 1) * e(1, 1, 0) * e(1, 1, 1),
            r: cube(e(0, 1, 1)) + cube(e(1, 1, 1)),
        },
    })
}

/// Magnitudes of the family's two characteristic equations
/// `(s01⁶ − R)Q³ − (s00⁶ − P)S³` and `(s11⁶ − R)Q³ − (s01⁶ − P)S³`.
///
/// Both are homogeneous of degree 12 in the entries of `a`, so they are
/// divided by `max|a|¹²`: the values are those of the unit-max-entry input.
pub fn characteristic_residual(a: &Hypermatrix3, fam: &ScalingFamily) -> Result<[f64; 2]> {
    let FamilyInvariants { p, q, s, r } = family_invariants(a, fam.family)?;
    let [x, y, z] = fam.sixth_powers();
    let (q3, s3) = (q * q * q, s * s * s);
    let norm = match a.max_abs() {
        m if m > 0.0 => m.powi(12),
        _ => 1.0,
    };
    Ok([((y - r) * q3 - (x - p) * s3).norm() / norm, ((z - r) * q3 - (y - p) * s3).norm() / norm])
}

/// Solves a family's two characteristic equations for the sixth powers at
/// gauge `t = s01⁶` (default `(P + R)/2`), returning principal sixth roots.
pub fn char_gauge_solve(a: &Hypermatrix3, family: Family, gauge: Option<C64>) -> Result<ScalingFamily> {
    let inv = family_invariants(a, family)?;
    let scale = a.max_abs();
    let threshold = DEGENERACY_REL * scale.powi(9);
    let (q3, s3) = (inv.q * inv.q * inv.q, inv.s * inv.s * inv.s);
    let degenerate = |what: &str, v: C64| BmxError::DegenerateFamily {
        family: family.name(),
        detail: format!("|{what}³| = {:.3e} is below the threshold {threshold:.3e}", v.norm()),
    };
    if scale == 0.0 || q3.norm() <= threshold {
        return Err(degenerate("Q", q3));
    }
    if s3.norm() <= threshold {
        return Err(degenerate("S", s3));
    }
    let t = gauge.unwrap_or((inv.p + inv.r) / 2.0);
    let x6 = inv.p + (t - inv.r) * q3 / s3;
    let z6 = inv.r + (t - inv.p) * s3 / q3;
    Ok(ScalingFamily {
        family,
        values: [principal_root(x6, 6), principal_root(t, 6), principal_root(z6, 6)],
        gauge: t,
    })
}
