use bmx::orbits::*;
use num_bigint::BigUint;
use std::collections::BTreeSet;

fn mat(rows: &[&[i64]], p: u64) -> FpMatrix {
    FpMatrix::new(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), p).unwrap()
}

/// Rank over F_p by row reduction, independent of the library.
fn rank_mod(rows: &[Vec<u64>], p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let inv = |a: u64| (1..p).find(|b| a * b % p == 1).unwrap();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, piv);
        let s = inv(m[rank][c]);
        for v in m[rank].iter_mut() {
            *v = *v * s % p;
        }
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c];
                for k in 0..cols {
                    m[r][k] = (m[r][k] + p * p - f * m[rank][k] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Number of `rows × cols` matrices over F_p with the given rank, by brute force.
fn count_rank(rows: usize, cols: usize, p: u64, rank: usize) -> usize {
    let total = (p as usize).pow((rows * cols) as u32);
    (0..total)
        .filter(|&code| {
            let mut c = code;
            let m: Vec<Vec<u64>> = (0..rows)
                .map(|_| {
                    (0..cols)
                        .map(|_| {
                            let v = (c % p as usize) as u64;
                            c /= p as usize;
                            v
                        })
                        .collect()
                })
                .collect();
            rank_mod(&m, p) == rank
        })
        .count()
}

#[test]
fn listed_orbit_over_f2() {
    let f = FiniteFieldSpec::prime(2).unwrap();
    let orbit = enumerate_orbit(&mat(&[&[1, 1], &[0, 1]], 2), &f).unwrap();
    let listed: BTreeSet<FpMatrix> = [
        [[1, 1], [0, 1]],
        [[1, 1], [1, 0]],
        [[1, 0], [1, 1]],
        [[0, 1], [1, 1]],
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
    ]
    .iter()
    .map(|m| mat(&[&m[0], &m[1]], 2))
    .collect();
    assert_eq!(orbit, listed);
}

#[test]
fn zero_matrix_orbit_is_singleton() {
    for p in [2, 3] {
        let f = FiniteFieldSpec::prime(p).unwrap();
        let z = mat(&[&[0, 0, 0], &[0, 0, 0]], p);
        let orbit = enumerate_orbit(&z, &f).unwrap();
        assert_eq!(orbit.len(), 1);
        assert!(orbit.contains(&z));
    }
}

#[test]
fn cardinality_formula_values() {
    let card = |p, k, n| orbit_cardinality(&FiniteFieldSpec::new(p, k).unwrap(), n).unwrap();
    assert_eq!(card(2, 1, 2), BigUint::from(6u32));
    assert_eq!(card(2, 1, 3), BigUint::from(168u32));
    assert_eq!(card(3, 1, 2), BigUint::from(48u32));
    // Order of GL2 over the field with four elements: (16 − 1)(16 − 4).
    assert_eq!(card(2, 2, 2), BigUint::from(180u32));
    let big = card(7, 3, 6);
    assert!(big.bits() > 200);
}

#[test]
fn invalid_fields_are_rejected() {
    assert!(FiniteFieldSpec::prime(4).is_err());
    assert!(FiniteFieldSpec::prime(1).is_err());
    assert!(FiniteFieldSpec::new(3, 0).is_err());
    let f5 = FiniteFieldSpec::prime(5).unwrap();
    assert!(enumerate_orbit(&mat(&[&[1]], 5), &f5).is_err());
    let f2 = FiniteFieldSpec::prime(2).unwrap();
    let four = mat(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]], 2);
    assert!(enumerate_orbit(&four, &f2).is_err());
}

#[test]
fn invertible_orbits_match_the_formula() {
    for (p, n) in [(2u64, 2usize), (2, 3), (3, 2)] {
        let f = FiniteFieldSpec::prime(p).unwrap();
        let id: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        let m = FpMatrix::new(&id, p).unwrap();
        assert!(m.is_invertible(p));
        let orbit = enumerate_orbit(&m, &f).unwrap();
        assert_eq!(BigUint::from(orbit.len()), orbit_cardinality(&f, n as u32).unwrap());
        assert_eq!(orbit.len(), count_rank(n, n, p, n));
    }
}

#[test]
fn singular_orbits_are_rank_classes() {
    let cases: [(&[&[i64]], u64, usize); 3] = [
        (&[&[1, 0], &[0, 0]], 2, 1),
        (&[&[2, 1], &[1, 2]], 3, 1),
        (&[&[1, 1, 0], &[0, 0, 0]], 2, 1),
    ];
    for (rows, p, rank) in cases {
        let m = mat(rows, p);
        assert!(!m.is_invertible(p));
        let orbit = enumerate_orbit(&m, &FiniteFieldSpec::prime(p).unwrap()).unwrap();
        let (r, c) = (rows.len(), rows[0].len());
        assert_eq!(orbit.len(), count_rank(r, c, p, rank), "{rows:?} over F{p}");
        assert!(orbit.iter().all(|x| rank_mod(&x.to_rows(), p) == rank));
    }
}

#[test]
fn orbit_membership_is_symmetric() {
    let f = FiniteFieldSpec::prime(3).unwrap();
    let m = mat(&[&[1, 2], &[2, 1]], 3);
    let orbit = enumerate_orbit(&m, &f).unwrap();
    for other in orbit.iter().take(10) {
        let back = enumerate_orbit(other, &f).unwrap();
        assert!(back.contains(&m));
        assert_eq!(back, orbit);
    }
}
