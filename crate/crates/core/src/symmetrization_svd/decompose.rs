use super::factor::{
    assemble_u_frame, cube_roots, system_matrix, system_residual, system_rhs, BranchLog, FactorSolution,
    FACTOR_SYSTEM_MAX_COND,
};
use super::family::{char_gauge_solve, characteristic_residual, family_invariants, ScalingFamily};
use super::{principal_root, root_of_unity, Factor, Family};
use crate::bm_algebra::{prod3, solve_factor_with, sym_products, FactorPosition, DEFAULT_MAX_FIBER_COND};
use crate::error::{BmxError, Result};
use crate::hypermatrix_core::{delta, Hypermatrix3, C64, ONE, ZERO};
use crate::linalg;

/// Default relaxation factor λ of the fixed-point update `X ← X + λ(S(X) − X)`.
pub const DEFAULT_RELAXATION: f64 = 1.0 / 3.0;

/// Tuning knobs for [`svd3`].
#[derive(Clone, Debug, PartialEq)]
pub struct Svd3Options {
    /// Gauge `t = s01⁶` shared by the three families; `None` uses `(P + R)/2`
    /// per family.
    pub gauge: Option<C64>,
    /// Gauges whose 8×8 factor system has a larger condition estimate are
    /// replaced by the next value of a deterministic scan.
    pub max_system_cond: f64,
    /// Above this condition estimate the σ system is solved by least squares.
    pub max_sigma_cond: f64,
}

impl Default for Svd3Options {
    fn default() -> Self {
        Self { gauge: None, max_system_cond: 1e10, max_sigma_cond: 1e12 }
    }
}

/// Residual diagnostics recorded with every decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct Svd3Residuals {
    /// Largest magnitude among the six characteristic equations, evaluated
    /// for the unit-max-entry input.
    pub characteristic: f64,
    /// The six equations in (μ, ν, ω) × (first, second) order.
    pub characteristic_terms: [f64; 6],
    /// Largest deviation among the three spectral constraints.
    pub spectral: f64,
    pub spectral_terms: [f64; 3],
    /// `‖A − reconstruct‖∞ / ‖A‖∞`.
    pub reconstruction: f64,
    /// Deviation of the raw U, V, W from their orthogonality constraints.
    pub orthogonality: [f64; 3],
}

/// A 2×2×2 symmetrization SVD `A = Σ σ_ijk Prod(Ũ[:,i,:], Ṽ[:,:,j], W̃[k,:,:])`.
#[derive(Clone, Debug, PartialEq)]
pub struct Svd3Result {
    pub utilde: Hypermatrix3,
    pub vtilde: Hypermatrix3,
    pub wtilde: Hypermatrix3,
    /// Coefficients indexed by `4i + 2j + k`.
    pub sigma: [C64; 8],
    /// Scaling families in (μ, ν, ω) order.
    pub families: [ScalingFamily; 3],
    /// Factor solutions in (U, V, W) order.
    pub factors: [FactorSolution; 3],
    pub residuals: Svd3Residuals,
    /// True when the σ system was solved by least squares.
    pub rank_deficient: bool,
    /// Number of nonzero σ coefficients.
    pub sigma_l0: usize,
    pub sigma_condition: f64,
}

impl Svd3Result {
    pub fn sigma_at(&self, i: usize, j: usize, k: usize) -> C64 {
        self.sigma[4 * i + 2 * j + k]
    }
}

// ── Per-factor pipeline ─────────────────────────────────────────────────────

struct FactorOutcome {
    family: ScalingFamily,
    solution: FactorSolution,
    tilde: Hypermatrix3,
}

/// Gauge candidates: the requested (or default) value first, then a fixed
/// scan around it.
fn gauge_candidates(a: &Hypermatrix3, family: Family, gauge: Option<C64>) -> Result<Vec<C64>> {
    let inv = family_invariants(a, family)?;
    let t0 = gauge.unwrap_or((inv.p + inv.r) / 2.0);
    let scale = inv.p.norm().max(inv.r.norm()).max(t0.norm()).max(1e-3 * a.max_abs().powi(3));
    let offsets = [
        C64::new(0.5, 0.0),
        C64::new(-0.5, 0.0),
        C64::new(0.0, 0.5),
        C64::new(0.0, -0.5),
        C64::new(1.0, 0.0),
        C64::new(-1.0, 0.0),
        C64::new(2.0, 1.0),
        C64::new(-2.0, -1.0),
    ];
    Ok(std::iter::once(t0).chain(offsets.iter().map(|d| t0 + d * scale)).collect())
}

fn solve_gauge(a: &Hypermatrix3, family: Family, opts: &Svd3Options) -> Result<ScalingFamily> {
    let mut last_err = None;
    for t in gauge_candidates(a, family, opts.gauge)? {
        let fam = char_gauge_solve(a, family, Some(t))?;
        let cond = linalg::condition_1(&system_matrix(fam.values), 8);
        if cond.is_finite() && cond <= opts.max_system_cond {
            return Ok(fam);
        }
        last_err = Some(BmxError::SingularSystem {
            context: format!("{} factor system across the gauge scan", family.name()),
            cond,
        });
    }
    Err(last_err.expect("scan is never empty"))
}

/// Split ratio `num/den` taken from input entries, defaulting to 1 when the
/// data cannot supply one.
fn split_ratio(num: C64, den: C64) -> C64 {
    if num == ZERO || den == ZERO {
        ONE
    } else {
        num / den
    }
}

/// Runs one factor pipeline in the U frame of `B = A^⊤^shift`: cubes from the
/// 8×8 system, then the branch combination whose products make the spectral
/// constraint exact with the smallest orthogonality defect.
fn factor_pipeline(a: &Hypermatrix3, factor: Factor, opts: &Svd3Options) -> Result<FactorOutcome> {
    let family = factor.family();
    let base = solve_gauge(a, family, opts)?;
    let inv = family_invariants(a, family)?;
    let frame = a.transpose_pow(family.frame_shift());
    let [x6, y6, z6] = base.sixth_powers();
    let x = principal_root(x6, 3);
    let (y0, z0) = (principal_root(y6, 3), principal_root(z6, 3));
    let rhs = system_rhs(&inv);

    struct Best {
        defect: f64,
        squares: [C64; 3],
        scaling_branches: [u8; 3],
        cubes: [C64; 4],
        cube_branches: [u8; 4],
        products: [C64; 2],
        system: Vec<C64>,
        system_cond: f64,
    }
    let mut best: Option<Best> = None;
    let mut candidates = 0;

    for by in 0..3u8 {
        for bz in 0..3u8 {
            let y = y0 * root_of_unity(u32::from(by), 3);
            let z = z0 * root_of_unity(u32::from(bz), 3);
            let values = [x.sqrt(), y.sqrt(), z.sqrt()];
            let m = system_matrix(values);
            let Ok((sol, cond)) = linalg::solve_square(&m, 8, &rhs, FACTOR_SYSTEM_MAX_COND, "factor system") else {
                continue;
            };
            // Coefficients of the two spectral rows: [X²Y, Y²Z] and [XY², YZ²].
            let k = [x * x * y, y * y * z, x * y * y, y * z * z];
            for &(b0, u000) in &cube_roots(sol[0]) {
                for &(b1, u010) in &cube_roots(sol[1]) {
                    for &(b2, u101) in &cube_roots(sol[6]) {
                        for &(b3, u111) in &cube_roots(sol[7]) {
                            candidates += 1;
                            let lhs = [k[0] * u000, k[1] * u010, k[2] * u101, k[3] * u111];
                            let Ok((pp, _)) = linalg::solve_square(&lhs, 2, &[inv.q, inv.s], 1e12, "products")
                            else {
                                continue;
                            };
                            let defect = (u000 * pp[0] + u010 * pp[1]).norm().max((u101 * pp[0] + u111 * pp[1]).norm());
                            if best.as_ref().is_none_or(|b| defect < b.defect) {
                                best = Some(Best {
                                    defect,
                                    squares: [x, y, z],
                                    scaling_branches: [0, by, bz],
                                    cubes: [u000, u010, u101, u111],
                                    cube_branches: [b0, b1, b2, b3],
                                    products: [pp[0], pp[1]],
                                    system: sol.clone(),
                                    system_cond: cond,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    let best = best.ok_or_else(|| BmxError::SingularSystem {
        context: format!("{} spectral branch systems", family.name()),
        cond: f64::INFINITY,
    })?;

    let values = best.squares.map(|s| s.sqrt());
    let fam = ScalingFamily { family, values, gauge: base.gauge };
    let split = [
        split_ratio(frame[(0, 0, 1)], frame[(1, 0, 0)]),
        split_ratio(frame[(0, 1, 1)], frame[(1, 1, 0)]),
    ];
    let u_frame = assemble_u_frame(best.cubes, best.products, split);
    let raw = u_frame.transpose_pow(factor.frame_return());
    let tilde = fam.scale_factor(&raw)?;
    let [u000, u010, u101, u111] = best.cubes;
    let [pi0, pi1] = best.products;
    let m = system_matrix(values);
    let solution = FactorSolution {
        factor,
        cubes: [best.system[0], best.system[1], best.system[6], best.system[7]],
        triples: [u000 * pi0, u010 * pi1, pi0 * u101, pi1 * u111],
        entries: Some(raw),
        branch_log: Some(BranchLog {
            scaling_branches: best.scaling_branches,
            cube_branches: best.cube_branches,
            split_ratios: split,
            objective: best.defect,
            candidates,
        }),
        system_residual: system_residual(&m, &best.system, &rhs),
        condition: best.system_cond,
    };
    Ok(FactorOutcome { family: fam, solution, tilde })
}

// ── σ system and diagnostics ────────────────────────────────────────────────

/// The term `Prod(Ũ[:,i,:], Ṽ[:,:,j], W̃[k,:,:])` for `s = 4i + 2j + k`.
fn outer_term(u: &Hypermatrix3, v: &Hypermatrix3, w: &Hypermatrix3, s: usize) -> Result<Hypermatrix3> {
    prod3(&u.select(1, s / 4)?, &v.select(2, (s / 2) % 2)?, &w.select(0, s % 2)?)
}

struct SigmaSolve {
    sigma: [C64; 8],
    rank_deficient: bool,
    condition: f64,
}

fn solve_sigma(a: &Hypermatrix3, u: &Hypermatrix3, v: &Hypermatrix3, w: &Hypermatrix3, max_cond: f64) -> Result<SigmaSolve> {
    let terms: Vec<Hypermatrix3> = (0..8).map(|s| outer_term(u, v, w, s)).collect::<Result<_>>()?;
    let mut m = vec![ZERO; 64];
    for (col, term) in terms.iter().enumerate() {
        for (row, &z) in term.data().iter().enumerate() {
            m[8 * row + col] = z;
        }
    }
    let condition = linalg::condition_1(&m, 8);
    let (x, rank_deficient) = if condition.is_finite() && condition <= max_cond {
        (linalg::solve_square(&m, 8, a.data(), f64::INFINITY, "sigma system")?.0, false)
    } else {
        (linalg::least_squares(&m, 8, 8, a.data(), 1e-12).0, true)
    };
    let mut sigma = [ZERO; 8];
    sigma.copy_from_slice(&x);
    Ok(SigmaSolve { sigma, rank_deficient, condition })
}

fn spectral_terms(a: &Hypermatrix3, u: &Hypermatrix3, v: &Hypermatrix3, w: &Hypermatrix3) -> Result<[f64; 3]> {
    let [s0, s1, s2] = sym_products(a)?;
    let pu = prod3(u, &u.transpose_pow(2), &u.transpose())?;
    let pv = prod3(&v.transpose(), v, &v.transpose_pow(2))?;
    let pw = prod3(&w.transpose_pow(2), &w.transpose(), w)?;
    Ok([s0.max_abs_diff(&pu), s1.max_abs_diff(&pv), s2.max_abs_diff(&pw)])
}

fn orthogonality_terms(raw: [&Hypermatrix3; 3]) -> Result<[f64; 3]> {
    let d = delta(2);
    let [u, v, w] = raw;
    Ok([
        prod3(u, &u.transpose_pow(2), &u.transpose())?.max_abs_diff(&d),
        prod3(&v.transpose(), v, &v.transpose_pow(2))?.max_abs_diff(&d),
        prod3(&w.transpose_pow(2), &w.transpose(), w)?.max_abs_diff(&d),
    ])
}

fn sigma_l0(sigma: &[C64; 8]) -> usize {
    sigma.iter().filter(|z| **z != ZERO).count()
}

fn relative_error(a: &Hypermatrix3, rec: &Hypermatrix3) -> f64 {
    let scale = a.max_abs();
    let diff = a.max_abs_diff(rec);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Assembles a result from fixed families and tilde factors, solving σ and
/// recording all diagnostics.
fn assemble(
    a: &Hypermatrix3,
    families: [ScalingFamily; 3],
    factors: [FactorSolution; 3],
    tildes: [Hypermatrix3; 3],
    opts: &Svd3Options,
) -> Result<Svd3Result> {
    let [utilde, vtilde, wtilde] = tildes;
    let sig = solve_sigma(a, &utilde, &vtilde, &wtilde, opts.max_sigma_cond)?;
    let mut characteristic_terms = [0.0; 6];
    for (f, fam) in families.iter().enumerate() {
        let [e0, e1] = characteristic_residual(a, fam)?;
        characteristic_terms[2 * f] = e0;
        characteristic_terms[2 * f + 1] = e1;
    }
    let spectral_terms = spectral_terms(a, &utilde, &vtilde, &wtilde)?;
    let raw: Vec<&Hypermatrix3> = factors
        .iter()
        .map(|f| f.entries.as_ref().ok_or_else(|| BmxError::Precondition("factor entries missing".into())))
        .collect::<Result<_>>()?;
    let orthogonality = orthogonality_terms([raw[0], raw[1], raw[2]])?;
    let mut result = Svd3Result {
        utilde,
        vtilde,
        wtilde,
        sigma: sig.sigma,
        families,
        factors,
        residuals: Svd3Residuals {
            characteristic: characteristic_terms.iter().copied().fold(0.0, f64::max),
            characteristic_terms,
            spectral: spectral_terms.iter().copied().fold(0.0, f64::max),
            spectral_terms,
            reconstruction: 0.0,
            orthogonality,
        },
        rank_deficient: sig.rank_deficient,
        sigma_l0: sigma_l0(&sig.sigma),
        sigma_condition: sig.condition,
    };
    result.residuals.reconstruction = relative_error(a, &reconstruct(&result)?);
    Ok(result)
}

/// Symmetrization SVD of a 2×2×2 hypermatrix.
pub fn svd3(a: &Hypermatrix3, opts: &Svd3Options) -> Result<Svd3Result> {
    a.require_side("svd3", 2)?;
    let outcomes: Vec<FactorOutcome> =
        [Factor::U, Factor::V, Factor::W].iter().map(|&f| factor_pipeline(a, f, opts)).collect::<Result<_>>()?;
    let [ou, ov, ow]: [FactorOutcome; 3] = outcomes.try_into().ok().expect("three factors");
    assemble(
        a,
        [ou.family, ov.family, ow.family],
        [ou.solution, ov.solution, ow.solution],
        [ou.tilde, ov.tilde, ow.tilde],
        opts,
    )
}

/// `Σ σ_ijk Prod(Ũ[:,i,:], Ṽ[:,:,j], W̃[k,:,:])`.
pub fn reconstruct(r: &Svd3Result) -> Result<Hypermatrix3> {
    let mut acc = Hypermatrix3::zeros([2, 2, 2]);
    for (s, &sigma) in r.sigma.iter().enumerate() {
        if sigma == ZERO {
            continue;
        }
        acc = acc.add(&outer_term(&r.utilde, &r.vtilde, &r.wtilde, s)?.scale(sigma))?;
    }
    Ok(acc)
}

// ── Fixed-point refinement ──────────────────────────────────────────────────

/// Largest deviation of the three spectral constraints at `r`.
pub fn fixed_point_residual(a: &Hypermatrix3, r: &Svd3Result) -> Result<f64> {
    spectral_residual(a, &r.utilde, &r.vtilde, &r.wtilde)
}

/// Largest deviation of the three spectral constraints for explicit tilde
/// factors.
pub fn spectral_residual(a: &Hypermatrix3, utilde: &Hypermatrix3, vtilde: &Hypermatrix3, wtilde: &Hypermatrix3) -> Result<f64> {
    a.require_side("spectral_residual", 2)?;
    for (name, f) in [("Ũ", utilde), ("Ṽ", vtilde), ("W̃", wtilde)] {
        if f.shape() != [2, 2, 2] {
            return Err(BmxError::Shape(format!("{name} must be 2×2×2, got {:?}", f.shape())));
        }
    }
    Ok(spectral_terms(a, utilde, vtilde, wtilde)?.into_iter().fold(0.0, f64::max))
}

/// Outcome of a refinement run.
#[derive(Clone, Debug, PartialEq)]
pub struct RefineReport {
    /// Spectral residual before the first and after every iteration.
    pub residual_history: Vec<f64>,
    /// True when some iteration failed to decrease a residual that was still
    /// above the rounding floor.
    pub non_decreasing: bool,
    pub relaxation: f64,
    /// The Ũ update targets `Prod(A, A^⊤², A^⊤)`, the product matching Ũ's own
    /// spectral constraint.
    pub note: &'static str,
}

/// [`fixed_point_refine_with`] at the default relaxation.
pub fn fixed_point_refine(a: &Hypermatrix3, r: &Svd3Result, iters: usize) -> Result<(Svd3Result, RefineReport)> {
    fixed_point_refine_with(a, r, iters, DEFAULT_RELAXATION)
}

/// Relaxed fixed-point iteration on the spectral constraints. Each step
/// solves `Prod(X, Ũ^⊤², Ũ^⊤) = Prod(A, A^⊤², A^⊤)` for X and moves Ũ a
/// fraction `relaxation` towards it; Ṽ and W̃ use the middle and third slots
/// of their own constraints. σ is re-solved afterwards.
pub fn fixed_point_refine_with(
    a: &Hypermatrix3,
    r: &Svd3Result,
    iters: usize,
    relaxation: f64,
) -> Result<(Svd3Result, RefineReport)> {
    a.require_side("fixed_point_refine", 2)?;
    let [s0, s1, s2] = sym_products(a)?;
    let (mut u, mut v, mut w) = (r.utilde.clone(), r.vtilde.clone(), r.wtilde.clone());
    let lam = C64::new(relaxation, 0.0);
    let relax = |cur: &Hypermatrix3, target: Hypermatrix3| -> Result<Hypermatrix3> {
        cur.add(&target.sub(cur)?.scale(lam))
    };
    let mut history = vec![spectral_terms(a, &u, &v, &w)?.into_iter().fold(0.0, f64::max)];
    for _ in 0..iters {
        let xu = solve_factor_with(FactorPosition::First, &u.transpose_pow(2), &u.transpose(), &s0, DEFAULT_MAX_FIBER_COND)?;
        let xv = solve_factor_with(FactorPosition::Middle, &v.transpose(), &v.transpose_pow(2), &s1, DEFAULT_MAX_FIBER_COND)?;
        let xw = solve_factor_with(FactorPosition::Third, &w.transpose_pow(2), &w.transpose(), &s2, DEFAULT_MAX_FIBER_COND)?;
        u = relax(&u, xu)?;
        v = relax(&v, xv)?;
        w = relax(&w, xw)?;
        history.push(spectral_terms(a, &u, &v, &w)?.into_iter().fold(0.0, f64::max));
    }
    // Steps already at the rounding floor of the spectral products are not counted.
    let floor = 64.0 * f64::EPSILON * a.max_abs().powi(3);
    let non_decreasing = history.windows(2).any(|p| p[1] >= p[0] && p[0] > floor);

    // Raw factors follow the refined tildes by dividing out the scaling pattern.
    let mut factors = r.factors.clone();
    for (fs, (fam, tilde)) in factors.iter_mut().zip(r.families.iter().zip([&u, &v, &w])) {
        let pattern = fam.scale_factor(&Hypermatrix3::from_fn([2, 2, 2], |_, _, _| ONE))?;
        fs.entries = Some(Hypermatrix3::from_fn([2, 2, 2], |i, j, k| {
            let p = pattern[(i, j, k)];
            if p == ZERO {
                ZERO
            } else {
                tilde[(i, j, k)] / p
            }
        }));
    }
    let refined = assemble(a, r.families.clone(), factors, [u, v, w], &Svd3Options::default())?;
    Ok((
        refined,
        RefineReport {
            residual_history: history,
            non_decreasing,
            relaxation,
            note: "the U-tilde update uses Prod(A, A^T2, A^T), the product matching its spectral constraint",
        },
    ))
}
