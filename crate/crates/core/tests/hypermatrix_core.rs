mod common;

use bmx::hypermatrix_core::*;
use common::*;

fn real_matrix(rows: &[&[f64]]) -> Matrix {
    Matrix::from_real_rows(rows).unwrap()
}

#[test]
fn delta_has_ones_on_superdiagonal_only() {
    let d = delta(2);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let expect = if i == j && j == k { 1.0 } else { 0.0 };
                assert_eq!(d.get(i, j, k).unwrap(), c(expect, 0.0));
            }
        }
    }
    assert_eq!(delta(1).data(), &[c(1.0, 0.0)]);
    for n in 1..=4 {
        assert_eq!(delta(n), naive_delta(n));
        assert_eq!(transpose(&delta(n)), delta(n));
    }
}

#[test]
fn transpose_moves_entries_cyclically() {
    let mut a = Hypermatrix3::zeros([2, 2, 2]);
    a.set(0, 1, 1, c(5.0, 0.0)).unwrap();
    assert_eq!(transpose(&a).get(1, 1, 0).unwrap(), c(5.0, 0.0));

    let mut r = rng(1);
    let b = random_hyper(&mut r, [2, 3, 4]);
    let t = b.transpose();
    assert_eq!(t.shape(), [3, 4, 2]);
    assert_eq!(t, naive_transpose(&b));
    assert_eq!(b.transpose_pow(3), b);
    assert_eq!(b.transpose_pow(2), naive_transpose(&naive_transpose(&b)));
}

#[test]
fn out_of_range_access_is_detected() {
    let mut a = Hypermatrix3::zeros([2, 2, 2]);
    assert!(a.get(2, 0, 0).is_none());
    assert!(a.set(0, 0, 2, c(1.0, 0.0)).is_err());
    assert!(Hypermatrix3::new([2, 2, 2], vec![c(0.0, 0.0); 7]).is_err());
    assert!(Matrix::new(2, 2, vec![c(0.0, 0.0); 3]).is_err());
}

#[test]
fn flip_q_is_anti_identity_and_involution() {
    assert_eq!(flip_q(2), real_matrix(&[&[0.0, 1.0], &[1.0, 0.0]]));
    for n in 1..=5 {
        let q = flip_q(n);
        assert_eq!(q.matmul(&q).unwrap(), Matrix::identity(n));
    }
}

#[test]
fn rotate_matrix_quarter_turn_matches_display() {
    let vals: Vec<f64> = (0..9).map(f64::from).collect();
    // a_ij = 3i + j
    let a = Matrix::from_fn(3, 3, |i, j| c(vals[3 * i + j], 0.0));
    let r = rotate_matrix(&a, RotationAngle::R90).unwrap();
    let first_row: Vec<f64> = (0..3).map(|j| r.get(0, j).unwrap().re).collect();
    assert_eq!(first_row, vec![6.0, 3.0, 0.0]);
    assert_eq!(rotate_matrix(&a, RotationAngle::R0).unwrap(), a);

    let q = flip_q(3);
    assert_eq!(r, a.transpose().matmul(&q).unwrap());
    assert_eq!(rotate_matrix(&a, RotationAngle::R180).unwrap(), q.matmul(&a).unwrap().matmul(&q).unwrap());
    assert_eq!(rotate_matrix(&a, RotationAngle::R270).unwrap(), q.matmul(&a.transpose()).unwrap());
}

#[test]
fn rotate_matrix_four_times_is_identity() {
    let mut r = rng(2);
    let a = random_matrix(&mut r, 4, 4);
    let mut x = a.clone();
    for _ in 0..4 {
        x = rotate_matrix(&x, RotationAngle::R90).unwrap();
    }
    assert_eq!(x, a);
    assert!(rotate_matrix(&random_matrix(&mut r, 2, 3), RotationAngle::R90).is_err());
}

#[test]
fn rotate_matrix_composes_additively() {
    let mut r = rng(3);
    let a = random_matrix(&mut r, 3, 3);
    for p in 0..4u8 {
        for q in 0..4u8 {
            let (tp, tq) = (RotationAngle::new(p).unwrap(), RotationAngle::new(q).unwrap());
            let two = rotate_matrix(&rotate_matrix(&a, tp).unwrap(), tq).unwrap();
            let one = rotate_matrix(&a, RotationAngle::new((p + q) % 4).unwrap()).unwrap();
            assert_eq!(two, one, "{p} then {q}");
        }
    }
    assert!(RotationAngle::new(4).is_err());
    assert_eq!(RotationAngle::wrapping(-1), RotationAngle::R270);
}

#[test]
fn rotate_hyper_z_matches_entry_formula() {
    // out[i,j,k] = a[(i-h)cosθ + (h-j)sinθ + h, (i-h)sinθ - (h-j)cosθ + h, k], h = (n-1)/2
    let mut r = rng(4);
    for n in [2usize, 3] {
        let a = random_hyper(&mut r, [n, n, n]);
        for q in 0..4u8 {
            let theta = RotationAngle::new(q).unwrap();
            let z = rotate_hyper(&a, RotationAngle::R0, RotationAngle::R0, theta).unwrap();
            let (s, co) = (f64::from(q) * std::f64::consts::FRAC_PI_2).sin_cos();
            let h = (n as f64 - 1.0) / 2.0;
            for ((i, j, k), v) in z.indexed() {
                let (fi, fj) = (i as f64, j as f64);
                let src_i = ((fi - h) * co + (h - fj) * s + h).round() as usize;
                let src_j = ((fi - h) * s - (h - fj) * co + h).round() as usize;
                assert_eq!(v, a.get(src_i, src_j, k).unwrap(), "n={n} q={q} at ({i},{j},{k})");
            }
        }
        assert_eq!(rotate_hyper(&a, RotationAngle::R0, RotationAngle::R0, RotationAngle::R0).unwrap(), a);
    }
}

#[test]
fn rotate_hyper_each_axis_has_period_four() {
    let mut r = rng(5);
    let a = random_hyper(&mut r, [3, 3, 3]);
    let q = RotationAngle::R90;
    let z = RotationAngle::R0;
    for axis in 0..3 {
        let mut x = a.clone();
        for _ in 0..4 {
            x = match axis {
                0 => rotate_hyper(&x, q, z, z),
                1 => rotate_hyper(&x, z, q, z),
                _ => rotate_hyper(&x, z, z, q),
            }
            .unwrap();
        }
        assert_eq!(x, a, "axis {axis}");
    }
    assert!(rotate_hyper(&random_hyper(&mut r, [2, 2, 3]), q, z, z).is_err());
}

#[test]
fn hadamard_exp_fixes_zeros() {
    let h = Hypermatrix3::from_real([2, 2, 1], &[2.0, 0.0, 3.0, 1.0]).unwrap();
    let sq = hadamard_exp(&h, c(2.0, 0.0));
    let got: Vec<f64> = sq.data().iter().map(|z| z.re).collect();
    assert_eq!(got, vec![4.0, 0.0, 9.0, 1.0]);
    let zero = hadamard_exp(&h, c(0.0, 0.0));
    let got: Vec<f64> = zero.data().iter().map(|z| z.re).collect();
    assert_eq!(got, vec![1.0, 0.0, 1.0, 1.0]);
}

#[test]
fn hadamard_exp_square_then_root_restores_positive_entries() {
    let mut r = rng(6);
    let h = Hypermatrix3::from_fn([2, 3, 2], |_, _, _| c(rand::Rng::gen_range(&mut r, 0.1..3.0), 0.0));
    let back = hadamard_exp(&hadamard_exp(&h, c(2.0, 0.0)), c(0.5, 0.0));
    assert!(back.max_abs_diff(&h) < 1e-14);
}

#[test]
fn kron_and_dirsum_preserve_delta() {
    assert_eq!(kron(&delta(2), &delta(2)), delta(4));
    assert_eq!(dirsum(&delta(2), &delta(3)).unwrap(), delta(5));
    let mut r = rng(7);
    assert!(dirsum(&random_hyper(&mut r, [2, 2, 3]), &delta(2)).is_err());
}

#[test]
fn kron_entries_follow_index_formula() {
    let mut r = rng(8);
    let a = random_hyper(&mut r, [2, 2, 2]);
    let b = random_hyper(&mut r, [2, 2, 2]);
    let k = kron(&a, &b);
    assert_eq!(k.shape(), [4, 4, 4]);
    for (i0, j0, k0, i1, j1, k1) in
        (0..64).map(|n| (n >> 5 & 1, n >> 4 & 1, n >> 3 & 1, n >> 2 & 1, n >> 1 & 1, n & 1))
    {
        let lhs = k.get(2 * i0 + i1, 2 * j0 + j1, 2 * k0 + k1).unwrap();
        let rhs = a.get(i0, j0, k0).unwrap() * b.get(i1, j1, k1).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn dirsum_places_blocks_on_diagonal() {
    let mut r = rng(9);
    let a = random_hyper(&mut r, [2, 2, 2]);
    let b = random_hyper(&mut r, [3, 3, 3]);
    let s = dirsum(&a, &b).unwrap();
    for ((i, j, k), z) in s.indexed() {
        let expect = if i < 2 && j < 2 && k < 2 {
            a.get(i, j, k).unwrap()
        } else if i >= 2 && j >= 2 && k >= 2 {
            b.get(i - 2, j - 2, k - 2).unwrap()
        } else {
            c(0.0, 0.0)
        };
        assert_eq!(z, expect);
    }
}

#[test]
fn matrix_kron_and_dirsum() {
    let a = real_matrix(&[&[1.0, 2.0], &[3.0, 4.0]]);
    let i = Matrix::identity(2);
    let k = i.kron(&a);
    assert_eq!(k.get(2, 3).unwrap(), c(2.0, 0.0));
    assert_eq!(k.get(0, 2).unwrap(), c(0.0, 0.0));
    let d = a.dirsum(&i);
    assert_eq!(d.shape(), (4, 4));
    assert_eq!(d.get(1, 0).unwrap(), c(3.0, 0.0));
    assert_eq!(d.get(3, 3).unwrap(), c(1.0, 0.0));
    assert_eq!(d.get(0, 3).unwrap(), c(0.0, 0.0));
}
