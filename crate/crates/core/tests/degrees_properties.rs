mod common;

use common::problems;
use curvecount::boundary::{
    boundary_linear_sum, boundary_square_sum, enumerate_splittings, section_dot_r,
};
use curvecount::model::moduli_dimension;
use curvecount::{Engine, Problem};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

/// Random excess-0 problems built from a shuffled canonical vector.
fn count_problem() -> impl Strategy<Value = (Problem, Vec<u32>)> {
    (prop_oneof![
        Just((3u32, 1u32)),
        Just((3, 2)),
        Just((3, 3)),
        Just((4, 1)),
        Just((4, 2)),
        Just((5, 2))
    ])
    .prop_flat_map(|(n, d)| {
        let all = problems(n, d, 0);
        (0..all.len()).prop_map(move |i| all[i].clone())
    })
    .prop_flat_map(|p| {
        let v = p.codims().to_vec();
        (Just(p), Just(v).prop_shuffle())
    })
}

fn family() -> impl Strategy<Value = Problem> {
    (prop_oneof![
        Just((3u32, 1u32)),
        Just((3, 2)),
        Just((3, 3)),
        Just((4, 1)),
        Just((4, 2))
    ])
    .prop_flat_map(|(n, d)| {
        let all = problems(n, d, 1);
        (0..all.len()).prop_map(move |i| all[i].clone())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn permutation_invariance((p, shuffled) in count_problem()) {
        let e = Engine::new();
        let q = Problem::new(p.n(), p.d(), shuffled).unwrap();
        prop_assert_eq!(e.degree_count(&q).unwrap(), e.degree_count(&p).unwrap());
    }

    #[test]
    fn hyperplane_rule((p, _) in count_problem(), extra in 1usize..3) {
        let e = Engine::new();
        let with = Problem::new(p.n(), p.d(), p.conds().iter().chain(std::iter::repeat_n(1, extra))).unwrap();
        let factor = num_traits::pow(BigInt::from(p.d()), extra);
        prop_assert_eq!(e.degree_count(&with).unwrap(), factor * e.degree_count(&p).unwrap());
    }

    #[test]
    fn pivot_independence((p, _) in count_problem(), i in 0usize..16, j in 0usize..16) {
        let k = p.codims().len();
        let (i, j) = (i % k, j % k);
        prop_assume!(i != j);
        let e = Engine::new();
        prop_assert_eq!(e.degree_count_via(&p, i, j).unwrap(), e.degree_count(&p).unwrap());
    }

    #[test]
    fn section_identities(p in family(), i in 0usize..16, j in 0usize..16) {
        let k = p.codims().len();
        let (i, j) = (i % k, j % k);
        prop_assume!(i != j);
        let e = Engine::new();
        prop_assert!(e.check_self_intersection(&p, i, j).unwrap().is_zero());
        prop_assert!(e.check_section_pairing(&p, i, j).unwrap().is_zero());
        prop_assert!(e.check_eq7_at(&p, i).unwrap().is_zero());
        prop_assert_eq!(section_dot_r(&e, &p, i, j).unwrap(), section_dot_r(&e, &p, j, i).unwrap());
        if p.codims()[i] == p.codims()[j] {
            prop_assert_eq!(e.m_section(&p, i).unwrap(), e.m_section(&p, j).unwrap());
            prop_assert_eq!(e.m_two_section(&p, i, j).unwrap(), e.m_section(&p, i).unwrap());
        }
    }

    #[test]
    fn linear_sum_bounded_by_square_sum(p in family(), i in 0usize..16, j in 0usize..16) {
        let k = p.codims().len();
        let (i, j) = (i % k, j % k);
        prop_assume!(i != j);
        let e = Engine::new();
        let lin = boundary_linear_sum(&e, &p, i, j).unwrap();
        prop_assert!(!lin.is_negative());
        prop_assert!(lin <= boundary_square_sum(&e, &p, i).unwrap());
    }
}

fn weight(v: &[u32]) -> i64 {
    v.iter().map(|&a| i64::from(a) - 1).sum()
}

#[test]
fn splitting_subqueries_are_smaller_and_balanced() {
    let e = Engine::new();
    for (n, d) in [(3, 2), (3, 3), (4, 2)] {
        for p in problems(n, d, 1) {
            for s in enumerate_splittings(&e, &p, 0, None).unwrap() {
                assert!(s.d1 < d && s.d2 < d && s.d1 + s.d2 == d);
                assert_eq!(s.c1 + s.c2, n);
                let side = |idx: &[usize], c: u32| {
                    let mut v: Vec<u32> = idx.iter().map(|&k| p.codims()[k]).collect();
                    v.push(c);
                    v
                };
                let (l, r) = (side(&s.side1, s.c1), side(&s.side2, s.c2));
                assert_eq!(moduli_dimension(n, s.d1).unwrap(), weight(&l), "{p}");
                assert_eq!(moduli_dimension(n, s.d2).unwrap(), weight(&r), "{p}");
                assert_eq!(
                    s.weight,
                    e.count(n, s.d1, &l).unwrap() * e.count(n, s.d2, &r).unwrap()
                );
            }
        }
    }
}

#[test]
fn small_ambient_and_degree_rejected() {
    assert!(Problem::new(2, 1, [2, 2]).is_err());
    assert!(Problem::new(3, 0, [2, 2]).is_err());
}

#[test]
fn classical_counts() {
    let e = Engine::new();
    // rational quartics through eight points, and meeting sixteen lines
    assert_eq!(e.count(3, 4, &[3; 8]).unwrap(), BigInt::from(4));
    assert_eq!(
        e.count(3, 4, &[2; 16]).unwrap(),
        BigInt::from(383_306_880u64)
    );
    // lines in P^4 meeting six planes
    assert_eq!(e.count(4, 1, &[2; 6]).unwrap(), BigInt::from(5));
}

#[test]
fn memo_is_nonnegative_and_canonical_after_sweep() {
    let e = Engine::new();
    for (n, d) in [(3, 3), (4, 2), (5, 2)] {
        for p in problems(n, d, 0) {
            e.degree_count(&p).unwrap();
        }
    }
    assert!(!e.store().is_empty());
    for (key, value) in e.store().entries() {
        key.validate().unwrap();
        assert!(!value.is_negative());
    }
}

#[test]
fn concurrent_evaluation_is_consistent() {
    use rayon::prelude::*;
    let shared = Engine::new();
    let all = problems(4, 2, 0);
    let parallel: Vec<BigInt> = all
        .par_iter()
        .map(|p| shared.degree_count(p).unwrap())
        .collect();
    let fresh = Engine::new();
    let serial: Vec<BigInt> = all.iter().map(|p| fresh.degree_count(p).unwrap()).collect();
    assert_eq!(parallel, serial);
    assert_eq!(shared.store().entries(), fresh.store().entries());
}
