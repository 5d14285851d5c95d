mod common;

use std::time::Instant;

use common::problems;
use curvecount::gw::GwOracle;
use curvecount::schubert::line_count;
use curvecount::Engine;
use num_bigint::BigInt;

#[test]
fn oracle_floor_is_schubert() {
    let g = GwOracle::new();
    for n in 3..=6 {
        for p in problems(n, 1, 0) {
            assert_eq!(
                g.invariant(n, 1, p.codims()).unwrap(),
                line_count(n, p.codims()).unwrap()
            );
        }
    }
}

#[test]
fn recursion_matches_oracle_on_full_envelope() {
    let e = Engine::new();
    let g = GwOracle::new();
    for (n, d) in [(3, 1), (3, 2), (3, 3), (4, 1), (4, 2)] {
        for p in problems(n, d, 0) {
            assert_eq!(
                e.degree_count(&p).unwrap(),
                g.invariant(n, d, p.codims()).unwrap(),
                "{p}"
            );
        }
    }
}

#[test]
fn quartics_agree_on_sample() {
    let e = Engine::new();
    let g = GwOracle::new();
    let start = Instant::now();
    for v in [vec![3; 8], vec![3, 3, 3, 3, 3, 3, 2, 2, 2, 2], vec![2; 16]] {
        assert_eq!(
            e.count(3, 4, &v).unwrap(),
            g.invariant(3, 4, &v).unwrap(),
            "{v:?}"
        );
    }
    eprintln!("quartic sample: {:?}", start.elapsed());
}

#[test]
fn oracle_is_nonnegative_and_honours_divisors() {
    let g = GwOracle::new();
    for p in problems(3, 3, 0) {
        let base = g.invariant(3, 3, p.codims()).unwrap();
        assert!(base >= BigInt::from(0));
        let mut v = p.codims().to_vec();
        v.push(1);
        assert_eq!(g.invariant(3, 3, &v).unwrap(), base * 3);
    }
}
