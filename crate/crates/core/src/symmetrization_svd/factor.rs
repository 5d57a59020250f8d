use super::family::{family_invariants, FamilyInvariants, ScalingFamily};
use super::{principal_root, root_of_unity, Factor};
use crate::error::{BmxError, Result};
use crate::hypermatrix_core::{Hypermatrix3, C64, ONE, ZERO};
use crate::linalg;

/// Condition limit for the block 8×8 factor system.
pub(crate) const FACTOR_SYSTEM_MAX_COND: f64 = 1e12;

/// Solved unknowns of one factor's 8×8 system plus, once disaggregated, the
/// eight factor entries.
///
/// Unknown order follows the system display. In U-frame names:
/// cubes `(u000³, u010³, u101³, u111³)` and triples
/// `(u000·u001·u100, u010·u011·u110, u001·u100·u101, u011·u110·u111)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorSolution {
    pub factor: Factor,
    pub cubes: [C64; 4],
    pub triples: [C64; 4],
    /// Raw factor (U, V or W) in its own index frame.
    pub entries: Option<Hypermatrix3>,
    pub branch_log: Option<BranchLog>,
    /// ‖M·x − rhs‖∞ of the 8×8 system at the solved unknowns.
    pub system_residual: f64,
    /// 1-norm condition estimate of the 8×8 system.
    pub condition: f64,
}

/// Record of the finite branch choices made while recovering entries.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchLog {
    /// Cube-root-of-unity exponents applied to the scaling squares (X, Y, Z).
    pub scaling_branches: [u8; 3],
    /// Cube-root-of-unity exponents applied to the four cube entries.
    pub cube_branches: [u8; 4],
    /// Ratios `u001/u100` and `u011/u110` used to split the two products.
    pub split_ratios: [C64; 2],
    /// Objective value of the selected branch.
    pub objective: f64,
    /// Number of branch combinations examined.
    pub candidates: usize,
}

/// Row-major 8×8 matrix of the block system for the given scaling values.
pub(crate) fn system_matrix(values: [C64; 3]) -> [C64; 64] {
    let [a, b, c] = values;
    let mut m = [ZERO; 64];
    let mut put = |row: usize, col: usize, lhs: C64, rhs: C64| {
        m[8 * row + col] = ONE;
        m[8 * row + col + 1] = ONE;
        m[8 * (row + 1) + col] = lhs;
        m[8 * (row + 1) + col + 1] = rhs;
    };
    put(0, 0, a.powi(6), b.powi(6));
    put(2, 2, a.powi(4) * b.powi(2), b.powi(4) * c.powi(2));
    put(4, 4, a.powi(2) * b.powi(4), b.powi(2) * c.powi(4));
    put(6, 6, b.powi(6), c.powi(6));
    m
}

pub(crate) fn system_rhs(inv: &FamilyInvariants) -> [C64; 8] {
    [ONE, inv.p, ZERO, inv.q, ZERO, inv.s, ONE, inv.r]
}

pub(crate) fn system_residual(m: &[C64; 64], x: &[C64], rhs: &[C64; 8]) -> f64 {
    (0..8)
        .map(|i| ((0..8).map(|j| m[8 * i + j] * x[j]).sum::<C64>() - rhs[i]).norm())
        .fold(0.0, f64::max)
}

/// Solves the block 8×8 system for one factor at the family's scaling values.
pub fn factor_system_solve(a: &Hypermatrix3, fam: &ScalingFamily, which: Factor) -> Result<FactorSolution> {
    if which.family() != fam.family {
        return Err(BmxError::InvalidParameter(format!(
            "factor {which:?} pairs with the {} family, got {}",
            which.family().name(),
            fam.family.name()
        )));
    }
    let inv = family_invariants(a, fam.family)?;
    let m = system_matrix(fam.values);
    let rhs = system_rhs(&inv);
    let context = format!("{} factor system", fam.family.name());
    let (x, condition) = linalg::solve_square(&m, 8, &rhs, FACTOR_SYSTEM_MAX_COND, &context)?;
    Ok(FactorSolution {
        factor: which,
        cubes: [x[0], x[1], x[6], x[7]],
        triples: [x[2], x[3], x[4], x[5]],
        entries: None,
        branch_log: None,
        system_residual: system_residual(&m, &x, &rhs),
        condition,
    })
}

/// The three cube roots of `z` (a single zero when `z` is zero).
pub(crate) fn cube_roots(z: C64) -> Vec<(u8, C64)> {
    if z == ZERO {
        return vec![(0, ZERO)];
    }
    let r = principal_root(z, 3);
    (0..3u8).map(|k| (k, r * root_of_unity(u32::from(k), 3))).collect()
}

/// Assembles U-frame entries from the four cube entries and the two products
/// `u001·u100 = pi0`, `u011·u110 = pi1`, split by the given ratios.
pub(crate) fn assemble_u_frame(cubes: [C64; 4], pi: [C64; 2], split: [C64; 2]) -> Hypermatrix3 {
    let [u000, u010, u101, u111] = cubes;
    let halves = |p: C64, ratio: C64| -> (C64, C64) {
        if p == ZERO {
            return (ZERO, ZERO);
        }
        let first = (p * ratio).sqrt();
        (first, p / first)
    };
    let (u001, u100) = halves(pi[0], split[0]);
    let (u011, u110) = halves(pi[1], split[1]);
    let mut u = Hypermatrix3::zeros([2, 2, 2]);
    u[(0, 0, 0)] = u000;
    u[(0, 1, 0)] = u010;
    u[(1, 0, 1)] = u101;
    u[(1, 1, 1)] = u111;
    u[(0, 0, 1)] = u001;
    u[(1, 0, 0)] = u100;
    u[(0, 1, 1)] = u011;
    u[(1, 1, 0)] = u110;
    u
}

/// The four orthogonality polynomials of a U-frame 2×2×2 hypermatrix, as
/// residuals of `x1x4x5 + x3x6x7 = 0`, `x0x1x4 + x2x3x6 = 0`,
/// `x0³ + x2³ = 1`, `x5³ + x7³ = 1`.
pub(crate) fn orthogonality_polynomials(u: &Hypermatrix3) -> [f64; 4] {
    let x = |i, j, k| u[(i, j, k)];
    let (x0, x1, x2, x3) = (x(0, 0, 0), x(1, 0, 0), x(0, 1, 0), x(1, 1, 0));
    let (x4, x5, x6, x7) = (x(0, 0, 1), x(1, 0, 1), x(0, 1, 1), x(1, 1, 1));
    [
        (x1 * x4 * x5 + x3 * x6 * x7).norm(),
        (x0 * x1 * x4 + x2 * x3 * x6).norm(),
        (x0.powi(3) + x2.powi(3) - ONE).norm(),
        (x5.powi(3) + x7.powi(3) - ONE).norm(),
    ]
}

/// Recovers the eight entries with a symmetric product split and default
/// tolerance 1e-9.
pub fn disaggregate(fs: &FactorSolution, which: Factor) -> Result<FactorSolution> {
    disaggregate_with(fs, which, [ONE, ONE], 1e-9)
}

/// Recovers the eight entries from cubes and triples. Cube roots are chosen
/// so that the two triples not used to define the products are reproduced;
/// the result must satisfy the orthogonality polynomials within `tol`.
/// `split` fixes the ratios `u001/u100` and `u011/u110`, which the cubes and
/// triples leave undetermined.
pub fn disaggregate_with(fs: &FactorSolution, which: Factor, split: [C64; 2], tol: f64) -> Result<FactorSolution> {
    let [c0, c1, d0, d1] = fs.cubes;
    let [p0, p1, q0, q1] = fs.triples;
    let product = |lead: C64, triple: C64, tail: C64, tail_triple: C64| -> Option<C64> {
        if lead != ZERO {
            Some(triple / lead)
        } else if triple.norm() > tol {
            None
        } else if tail != ZERO {
            Some(tail_triple / tail)
        } else {
            Some(ZERO)
        }
    };

    // (objective, cube entries, split products, branch exponents)
    type Candidate = (f64, [C64; 4], [C64; 2], [u8; 4]);
    let mut best: Option<Candidate> = None;
    let mut candidates = 0;
    for &(b0, u000) in &cube_roots(c0) {
        for &(b1, u010) in &cube_roots(c1) {
            for &(b2, u101) in &cube_roots(d0) {
                for &(b3, u111) in &cube_roots(d1) {
                    candidates += 1;
                    let (Some(pi0), Some(pi1)) =
                        (product(u000, p0, u101, q0), product(u010, p1, u111, q1))
                    else {
                        continue;
                    };
                    let score = (q0 - pi0 * u101).norm().max((q1 - pi1 * u111).norm());
                    if best.as_ref().is_none_or(|b| score < b.0) {
                        best = Some((score, [u000, u010, u101, u111], [pi0, pi1], [b0, b1, b2, b3]));
                    }
                }
            }
        }
    }
    let (score, cubes, pi, branches) = best.ok_or(BmxError::NoBranch { best: f64::INFINITY, tol })?;
    let u = assemble_u_frame(cubes, pi, split);
    let poly = orthogonality_polynomials(&u).into_iter().fold(0.0, f64::max);
    let worst = score.max(poly);
    if worst > tol {
        return Err(BmxError::NoBranch { best: worst, tol });
    }
    Ok(FactorSolution {
        entries: Some(u.transpose_pow(which.frame_return())),
        branch_log: Some(BranchLog {
            scaling_branches: [0; 3],
            cube_branches: branches,
            split_ratios: split,
            objective: score,
            candidates,
        }),
        factor: which,
        ..fs.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn system_rows_pair_ones_with_powers() {
        let m = system_matrix([C64::new(2.0, 0.0), C64::new(3.0, 0.0), C64::new(5.0, 0.0)]);
        assert_eq!(m[0], ONE);
        assert_eq!(m[1], ONE);
        assert_eq!(m[8], C64::new(64.0, 0.0));
        assert_eq!(m[8 * 3 + 2], C64::new(16.0 * 9.0, 0.0));
        assert_eq!(m[8 * 7 + 7], C64::new(15625.0, 0.0));
    }

    #[test]
    fn rhs_constant_rows() {
        let a = Hypermatrix3::from_fn([2, 2, 2], |i, j, k| C64::new((i + 2 * j) as f64 - 0.5, k as f64 + 0.25));
        for family in crate::symmetrization_svd::Family::ALL {
            let rhs = system_rhs(&family_invariants(&a, family).unwrap());
            assert_eq!([rhs[0], rhs[2], rhs[4], rhs[6]], [ONE, ZERO, ZERO, ONE]);
        }
    }

    #[test]
    fn cube_roots_cover_three_branches() {
        let z = C64::new(-2.0, 1.0);
        let roots = cube_roots(z);
        assert_eq!(roots.len(), 3);
        for (_, r) in roots {
            assert!((r.powi(3) - z).norm() < 1e-13);
        }
    }
}
