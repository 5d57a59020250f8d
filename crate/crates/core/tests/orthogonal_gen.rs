mod common;

use bmx::bm_algebra::{is_orthogonal, prod3};
use bmx::hypermatrix_core::*;
use bmx::orthogonal_gen::*;
use common::*;
use std::collections::BTreeSet;

fn one() -> C64 {
    c(1.0, 0.0)
}

#[test]
fn matrix_parametrization_unit_parameters() {
    let x = gen_ortho_matrix(&OrthoParamMatrix { r: one(), s: 1, t: one() }).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let expect = Matrix::from_real_rows(&[&[-h, h], &[h, h]]).unwrap();
    assert!(x.max_abs_diff(&expect) < 1e-15);
    assert!(x.matmul(&x.transpose()).unwrap().max_abs_diff(&Matrix::identity(2)) < 1e-12);

    let y = gen_ortho_matrix(&OrthoParamMatrix { r: one(), s: -1, t: one() }).unwrap();
    let expect = Matrix::from_real_rows(&[&[h, -h], &[h, h]]).unwrap();
    assert!(y.max_abs_diff(&expect) < 1e-15);
    assert!(y.matmul(&y.transpose()).unwrap().max_abs_diff(&Matrix::identity(2)) < 1e-12);
}

#[test]
fn matrix_parametrization_exclusions() {
    assert!(gen_ortho_matrix(&OrthoParamMatrix { r: c(0.0, 1.0), s: 1, t: one() }).is_err());
    assert!(gen_ortho_matrix(&OrthoParamMatrix { r: one(), s: 2, t: one() }).is_err());
    assert!(gen_ortho_matrix(&OrthoParamMatrix { r: c(0.0, 0.0), s: 1, t: one() }).is_err());
}

#[test]
fn matrix_rotations_preserve_orthogonality() {
    let mut r = rng(50);
    for _ in 0..50 {
        let x = gen_ortho_matrix(&OrthoParamMatrix::random(&mut r)).unwrap();
        for q in 0..4 {
            let xr = rotate_matrix(&x, RotationAngle::new(q).unwrap()).unwrap();
            let id = Matrix::identity(2);
            assert!(xr.matmul(&xr.transpose()).unwrap().max_abs_diff(&id) < 1e-9);
            assert!(xr.transpose().matmul(&xr).unwrap().max_abs_diff(&id) < 1e-9);
        }
    }
}

#[test]
fn hyper_parametrization_unit_parameters() {
    let x = gen_ortho_hyper(&OrthoParamHyper::new([one(); 6]).unwrap()).unwrap();
    let k = 2f64.powf(-1.0 / 3.0);
    let s0 = Matrix::from_real_rows(&[&[k, k], &[-1.0, 1.0]]).unwrap();
    let s1 = Matrix::from_real_rows(&[&[1.0, 1.0], &[k, k]]).unwrap();
    assert!(x.depth_slice(0).unwrap().max_abs_diff(&s0) < 1e-15);
    assert!(x.depth_slice(1).unwrap().max_abs_diff(&s1) < 1e-15);
    for r in ortho_constraints(&x).unwrap() {
        assert!(r < 1e-15, "{r}");
    }
    assert!(is_orthogonal(&x, 1e-12).unwrap().passed);
}

#[test]
fn hyper_parametrization_with_nonprincipal_root() {
    let w = c(-0.5, 3f64.sqrt() / 2.0);
    let x = gen_ortho_hyper(&OrthoParamHyper::new([w, one(), one(), one(), one(), one()]).unwrap()).unwrap();
    assert!(is_orthogonal(&x, 1e-12).unwrap().passed);
}

#[test]
fn hyper_parametrization_rejects_vanishing_cube_sum() {
    let v = [one(), one(), one(), one(), one(), c(-1.0, 0.0)];
    let err = OrthoParamHyper::new(v).and_then(|p| gen_ortho_hyper(&p));
    assert!(err.is_err());
    assert!(OrthoParamHyper::new([c(2.0, 0.0), one(), one(), one(), one(), one()]).is_err());
}

#[test]
fn random_draws_are_orthogonal() {
    let mut r = rng(51);
    for _ in 0..200 {
        let p = OrthoParamHyper::random(&mut r);
        assert!((p.v[0].powi(3) - one()).norm() <= 1e-12);
        let x = gen_ortho_hyper(&p).unwrap();
        assert!(is_orthogonal(&x, 1e-9).unwrap().passed);
        assert!(ortho_constraints(&x).unwrap().iter().all(|&e| e <= 1e-10));
    }
}

#[test]
fn zero_pattern_table_contents() {
    let pats: Vec<BTreeSet<u8>> = degenerate_patterns().into_iter().map(|p| p.into_iter().collect()).collect();
    assert_eq!(pats.len(), 32);
    assert!(pats.contains(&BTreeSet::from([4, 3])));
    assert!(pats.contains(&BTreeSet::from([0, 3, 1])));
    assert!(pats.iter().all(|p| p.iter().all(|&i| i < 8)));
}

#[test]
fn zero_pattern_four_three_is_feasible() {
    // x0 = x5 = 1, x2 = x7 = 0, x3 = x4 = 0, x1 and x6 arbitrary.
    let vals = [1.0, 0.7, 0.0, 0.0, 0.0, 1.0, -0.4, 0.0];
    let x = Hypermatrix3::from_fn([2, 2, 2], |i, j, k| c(vals[i + 2 * j + 4 * k], 0.0));
    for r in ortho_constraints(&x).unwrap() {
        assert_eq!(r, 0.0);
    }
}

#[test]
fn rotation_table_contents() {
    let t: Vec<[u8; 3]> = rotation_triples().into_iter().map(|a| a.map(RotationAngle::quarter_turns)).collect();
    assert_eq!(t.len(), 32);
    assert!(t.contains(&[0, 0, 0]));
    assert!(t.contains(&[2, 2, 2]));
    let unique: BTreeSet<_> = t.iter().collect();
    assert_eq!(unique.len(), 32);
}

#[test]
fn rotation_report_structure() {
    let rep = verify_rotation_invariance(&delta(2), 1e-9).unwrap();
    assert_eq!(rep.checked, 32);
    assert!(!rep.failures.iter().any(|(t, _)| *t == [0, 0, 0]));
    assert_eq!(rep.all_passed(), rep.failures.is_empty());
    assert!(verify_rotation_invariance(&Hypermatrix3::zeros([2, 2, 3]), 1e-9).is_err());
}

#[test]
fn direct_sum_and_kron_stay_orthogonal() {
    let mut r = rng(52);
    for _ in 0..20 {
        let x = gen_ortho_hyper(&OrthoParamHyper::random(&mut r)).unwrap();
        let y = gen_ortho_hyper(&OrthoParamHyper::random(&mut r)).unwrap();
        let s = dirsum(&x, &y).unwrap();
        let ps = prod3(&s, &s.transpose_pow(2), &s.transpose()).unwrap();
        assert!(ps.max_abs_diff(&dirsum(&delta(2), &delta(2)).unwrap()) <= 1e-9);
        let k = kron(&x, &y);
        let pk = prod3(&k, &k.transpose_pow(2), &k.transpose()).unwrap();
        assert!(pk.max_abs_diff(&kron(&delta(2), &delta(2))) <= 1e-9);
    }
}
