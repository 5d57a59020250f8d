mod common;

use bmx::bm_algebra::prod3;
use bmx::hypermatrix_core::*;
use bmx::maps_actions::*;
use bmx::orthogonal_gen::{gen_ortho_hyper, OrthoParamHyper};
use common::*;

fn real_vec(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| c(x, 0.0)).collect()
}

fn assert_vec_close(got: &[C64], want: &[C64], tol: f64) {
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).norm() <= tol, "{got:?} vs {want:?}");
    }
}

#[test]
fn map2_identity_pair_returns_input() {
    let m = MapSpec2::new(Matrix::identity(2), Matrix::identity(2)).unwrap();
    assert_vec_close(&apply_map2(&m, &real_vec(&[3.0, 4.0])).unwrap(), &real_vec(&[3.0, 4.0]), 1e-14);
    assert_vec_close(&apply_map2(&m, &real_vec(&[0.0, 0.0])).unwrap(), &real_vec(&[0.0, 0.0]), 0.0);
    let z = MapSpec2::new(Matrix::zeros(2, 2), Matrix::zeros(2, 2)).unwrap();
    assert_vec_close(&apply_map2(&z, &real_vec(&[3.0, 4.0])).unwrap(), &real_vec(&[0.0, 0.0]), 0.0);
}

#[test]
fn map_size_mismatches_are_rejected() {
    assert!(MapSpec2::new(Matrix::identity(2), Matrix::identity(3)).is_err());
    let m = MapSpec2::new(Matrix::identity(2), Matrix::identity(2)).unwrap();
    assert!(apply_map2(&m, &real_vec(&[1.0, 2.0, 3.0])).is_err());
    assert!(MapSpec3::new(delta(2), delta(3), delta(2)).is_err());
    let m3 = MapSpec3::new(delta(2), delta(2), delta(2)).unwrap();
    assert!(apply_map3(&m3, &real_vec(&[1.0])).is_err());
}

#[test]
fn map3_delta_triple_returns_input() {
    let m = MapSpec3::new(delta(2), delta(2), delta(2)).unwrap();
    assert_vec_close(&apply_map3(&m, &real_vec(&[2.0, 5.0])).unwrap(), &real_vec(&[2.0, 5.0]), 1e-14);
    assert_vec_close(&apply_map3(&m, &real_vec(&[0.0, 0.0])).unwrap(), &real_vec(&[0.0, 0.0]), 0.0);
    for k in 0..2 {
        let p = map3_background(&m, k).unwrap();
        for ((a, b, cc), v) in p.indexed() {
            let want = if a == k && b == k && cc == k { 1.0 } else { 0.0 };
            assert_eq!(v, c(want, 0.0));
        }
    }
}

#[test]
fn verbatim_selector_also_fixes_delta_map() {
    let m = MapSpec3::new(delta(3), delta(3), delta(3)).unwrap().with_selector(SelectorConvention::Verbatim);
    let x = real_vec(&[2.0, 5.0, 1.5]);
    assert_vec_close(&apply_map3(&m, &x).unwrap(), &x, 1e-13);
}

#[test]
fn uncorrelated_triples_preserve_sum_of_cubes() {
    let mut r = rng(60);
    for _ in 0..50 {
        let x = gen_ortho_hyper(&OrthoParamHyper::random(&mut r)).unwrap();
        let m = MapSpec3::new(x.clone(), x.transpose_pow(2), x.transpose()).unwrap();
        let v: Vec<C64> = (0..2).map(|_| random_complex(&mut r)).collect();
        let y = apply_map3(&m, &v).unwrap();
        let lhs = power_sum(&y, 3).unwrap();
        let rhs = power_sum(&v, 3).unwrap();
        assert!((lhs - rhs).norm() <= 1e-9, "{lhs} vs {rhs}");
    }
}

#[test]
fn verbatim_selector_breaks_cube_sum_for_generic_uncorrelated_triples() {
    let mut r = rng(61);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let x = gen_ortho_hyper(&OrthoParamHyper::random(&mut r)).unwrap();
        let m = MapSpec3::new(x.clone(), x.transpose_pow(2), x.transpose())
            .unwrap()
            .with_selector(SelectorConvention::Verbatim);
        let v: Vec<C64> = (0..2).map(|_| random_complex(&mut r)).collect();
        let y = apply_map3(&m, &v).unwrap();
        worst = worst.max((power_sum(&y, 3).unwrap() - power_sum(&v, 3).unwrap()).norm());
    }
    assert!(worst > 1e-6);
}

#[test]
fn power_sum_examples() {
    assert_eq!(power_sum(&real_vec(&[3.0, 4.0]), 2).unwrap(), c(25.0, 0.0));
    assert_eq!(power_sum(&real_vec(&[1.0, 2.0]), 3).unwrap(), c(9.0, 0.0));
    assert!(power_sum(&real_vec(&[1.0]), 4).is_err());
}

#[test]
fn power_sum_matches_reshaped_product() {
    let mut r = rng(62);
    let v: Vec<C64> = (0..5).map(|_| random_complex(&mut r)).collect();
    let col = Hypermatrix3::new([5, 1, 1], v.clone()).unwrap();
    let p = naive_prod3(&naive_transpose(&naive_transpose(&col)), &naive_transpose(&col), &col);
    assert_eq!(p.shape(), [1, 1, 1]);
    assert!((power_sum(&v, 3).unwrap() - p[(0, 0, 0)]).norm() <= 1e-13);
    let direct: C64 = v.iter().map(|z| z * z * z).sum();
    assert!((power_sum(&v, 3).unwrap() - direct).norm() <= 1e-13);
}

#[test]
fn map2_with_inverse_preserves_sum_of_squares() {
    let mut r = rng(63);
    for _ in 0..30 {
        let a = random_matrix(&mut r, 2, 2);
        let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
        if det.norm() < 0.2 {
            continue;
        }
        let inv = Matrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => a[(1, 1)] / det,
            (1, 1) => a[(0, 0)] / det,
            _ => -a[(i, j)] / det,
        });
        check_sum_of_squares(&a, &inv, &mut r);
    }
    for _ in 0..10 {
        let u = random_unitary(&mut r, 4);
        check_sum_of_squares(&u, &u.conj_transpose(), &mut r);
    }
}

fn check_sum_of_squares(a: &Matrix, b: &Matrix, r: &mut impl rand::Rng) {
    let m = MapSpec2::new(a.clone(), b.clone()).unwrap();
    let x: Vec<C64> = (0..a.rows()).map(|_| random_complex(r)).collect();
    let y = apply_map2(&m, &x).unwrap();
    assert!((power_sum(&y, 2).unwrap() - power_sum(&x, 2).unwrap()).norm() <= 1e-9);
}

#[test]
fn maps_are_deterministic() {
    let mut r = rng(64);
    let a = random_hyper(&mut r, [3, 3, 3]);
    let m = MapSpec3::new(a.clone(), a.transpose(), a.transpose_pow(2)).unwrap();
    let x: Vec<C64> = (0..3).map(|_| random_complex(&mut r)).collect();
    let y1 = apply_map3(&m, &x).unwrap();
    let y2 = apply_map3(&m, &x).unwrap();
    assert!(y1.iter().zip(&y2).all(|(p, q)| p.re.to_bits() == q.re.to_bits() && p.im.to_bits() == q.im.to_bits()));
    let m2 = MapSpec2::new(random_matrix(&mut r, 3, 3), random_matrix(&mut r, 3, 3)).unwrap();
    assert_eq!(apply_map2(&m2, &x).unwrap(), apply_map2(&m2, &x).unwrap());
}

#[test]
fn branch_candidates_cover_roots() {
    let y = vec![c(1.0, 2.0), c(0.0, 0.0)];
    let b = branch_candidates(&y, 3);
    assert_eq!(b[0].len(), 3);
    assert_eq!(b[1], vec![c(0.0, 0.0)]);
    assert_eq!(b[0][0], y[0]);
    for z in &b[0] {
        assert!((z.powi(3) - y[0].powi(3)).norm() < 1e-12);
    }
}

#[test]
fn invertibility_identity_pair() {
    let m = MapSpec2::new(Matrix::identity(2), Matrix::identity(2)).unwrap();
    let y = real_vec(&[3.0, 4.0]);
    let rep = invertibility_check_2(&m, &y, 1e-12).unwrap();
    // (x0² − 9)² = 81 − 18 x0² + x0⁴
    assert_vec_close(&rep.coefficients[0], &real_vec(&[81.0, 0.0, -18.0, 0.0, 1.0]), 1e-12);
    assert_eq!(rep.invertible, [true, true]);
    assert_eq!(rep.degenerate, [false, false]);
}

#[test]
fn invertibility_zero_pair_is_degenerate() {
    let m = MapSpec2::new(Matrix::zeros(2, 2), Matrix::zeros(2, 2)).unwrap();
    let rep = invertibility_check_2(&m, &real_vec(&[1.0, 2.0]), 1e-12).unwrap();
    assert!(rep.coefficients.iter().flatten().all(|z| z.norm() == 0.0));
    assert_eq!(rep.invertible, [true, true]);
    assert_eq!(rep.degenerate, [true, true]);
    let m3 = MapSpec2::new(Matrix::identity(3), Matrix::identity(3)).unwrap();
    assert!(invertibility_check_2(&m3, &real_vec(&[1.0, 2.0, 3.0]), 1e-12).is_err());
}

/// The displayed resultant polynomials, evaluated pointwise.
fn q_eval(a: &Matrix, b: &Matrix, y: &[C64], which: usize, x: C64) -> C64 {
    let (a00, a01, a10, a11) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
    let (b00, b01, b10, b11) = (b[(0, 0)], b[(0, 1)], b[(1, 0)], b[(1, 1)]);
    let (y0, y1) = (y[0] * y[0], y[1] * y[1]);
    let m = a10 * b00 * x + a00 * b01 * x;
    let n = a11 * b10 * x + a01 * b11 * x;
    if which == 0 {
        let l = a01 * b10 * x * x - y1;
        let k = a00 * b00 * x * x - y0;
        l * l * a10 * a10 * b01 * b01 - 2.0 * k * l * a10 * a11 * b01 * b11 + k * k * a11 * a11 * b11 * b11
            - l * m * n * a10 * b01
            + k * n * n * a10 * b01
            + l * m * m * a11 * b11
            - k * m * n * a11 * b11
    } else {
        let l = a11 * b11 * x * x - y1;
        let k = a10 * b01 * x * x - y0;
        l * l * a00 * a00 * b00 * b00 - 2.0 * k * l * a00 * a01 * b00 * b10 + k * k * a01 * a01 * b10 * b10
            - l * m * n * a00 * b00
            + k * n * n * a00 * b00
            + l * m * m * a01 * b10
            - k * m * n * a01 * b10
    }
}

/// Solves a dense complex system by Gaussian elimination with partial pivoting.
fn gauss(mut m: Vec<Vec<C64>>, mut rhs: Vec<C64>) -> Vec<C64> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm())).unwrap();
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                let v = m[col][k];
                m[row][k] -= f * v;
            }
            let v = rhs[col];
            rhs[row] -= f * v;
        }
    }
    let mut x = vec![c(0.0, 0.0); n];
    for row in (0..n).rev() {
        let s: C64 = (row + 1..n).map(|k| m[row][k] * x[k]).sum();
        x[row] = (rhs[row] - s) / m[row][row];
    }
    x
}

#[test]
fn resultant_coefficients_match_interpolation() {
    let mut r = rng(65);
    for _ in 0..20 {
        let a = random_matrix(&mut r, 2, 2);
        let b = random_matrix(&mut r, 2, 2);
        let y: Vec<C64> = (0..2).map(|_| random_complex(&mut r)).collect();
        let m = MapSpec2::new(a.clone(), b.clone()).unwrap();
        let got = resultant_polynomials(&m, &y).unwrap();
        let nodes: Vec<C64> = (0..5).map(|t| c(t as f64 - 2.0, 0.5 * t as f64)).collect();
        for which in 0..2 {
            let vander = nodes.iter().map(|&x| (0..5).map(|d| x.powi(d)).collect()).collect();
            let vals = nodes.iter().map(|&x| q_eval(&a, &b, &y, which, x)).collect();
            let want = gauss(vander, vals);
            let scale = want.iter().map(|z| z.norm()).fold(1.0, f64::max);
            for (g, w) in got[which].iter().zip(&want) {
                assert!((g - w).norm() <= 1e-10 * scale, "Q{which}: {g} vs {w}");
            }
        }
    }
}

#[test]
fn resultant_vanishes_on_actual_preimage() {
    let mut r = rng(66);
    for _ in 0..20 {
        let a = random_matrix(&mut r, 2, 2);
        let b = random_matrix(&mut r, 2, 2);
        let x: Vec<C64> = (0..2).map(|_| random_complex(&mut r)).collect();
        let m = MapSpec2::new(a, b).unwrap();
        let y = apply_map2(&m, &x).unwrap();
        let [q0, q1] = resultant_polynomials(&m, &y).unwrap();
        let ev = |q: &[C64], t: C64| q.iter().rev().fold(c(0.0, 0.0), |acc, &co| acc * t + co);
        let scale = q0.iter().chain(&q1).map(|z| z.norm()).fold(1.0, f64::max);
        assert!(ev(&q0, x[0]).norm() <= 1e-10 * scale);
        assert!(ev(&q1, x[1]).norm() <= 1e-10 * scale);
    }
}

#[test]
fn imaginary_unit_block() {
    let m = Matrix::new(1, 1, vec![c(0.0, 1.0)]).unwrap();
    let want = Matrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
    assert_eq!(complex_to_real_block(&m), want);
    let real = Matrix::from_real_rows(&[&[2.5]]).unwrap();
    assert_eq!(complex_to_real_block(&real), Matrix::from_real_rows(&[&[2.5, 0.0], &[0.0, 2.5]]).unwrap());
}

#[test]
fn real_block_is_a_ring_homomorphism() {
    let mut r = rng(67);
    for _ in 0..10 {
        let p = random_matrix(&mut r, 3, 3);
        let q = random_matrix(&mut r, 3, 3);
        let lhs = complex_to_real_block(&p.matmul(&q).unwrap());
        let rhs = complex_to_real_block(&p).matmul(&complex_to_real_block(&q)).unwrap();
        assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        let sum = complex_to_real_block(&p.add(&q).unwrap());
        assert!(sum.max_abs_diff(&complex_to_real_block(&p).add(&complex_to_real_block(&q)).unwrap()) <= 1e-15);
        assert_eq!(real_block_to_complex(&complex_to_real_block(&p), 1e-12).unwrap(), p);
    }
}

#[test]
fn nonconforming_real_block_is_rejected() {
    let bad = Matrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
    assert!(real_block_to_complex(&bad, 1e-12).is_err());
    let odd = Matrix::from_real_rows(&[&[1.0, 2.0, 3.0]]).unwrap();
    assert!(real_block_to_complex(&odd, 1e-12).is_err());
}

#[test]
fn delta_is_the_product_identity_for_maps() {
    let mut r = rng(68);
    let x = gen_ortho_hyper(&OrthoParamHyper::random(&mut r)).unwrap();
    let p = prod3(&x, &x.transpose_pow(2), &x.transpose()).unwrap();
    assert!(p.max_abs_diff(&delta(2)) <= 1e-10);
}
