//! Reducible fibres of a one-dimensional family.
//!
//! A reducible member `C1 ∪ C2` of `B(a)` splits the degree `d = d1 + d2`
//! and the conditions into two sides. Side `i` moves in a family of dimension
//! `δ_i = dim(d_i) - Σ_{S_i} (a - 1)` sweeping a locus of codimension
//! `n - 1 - δ_i`; two such loci meet in finitely many points exactly when
//! `δ_1 + δ_2 = n - 2`. The number of configurations is
//! `N_{d1}(S1, c1) · N_{d2}(S2, c2)` with node conditions `c_i = δ_i + 1`,
//! so `c1 + c2 = n`.
//!
//! Side 1 always carries the pinned section; the far component (side 2) is
//! the fibre component `F` that does not meet it.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::degrees::Engine;
use crate::error::{Error, Result};
use crate::model::{condition_weight, raw_moduli_dimension, CountValue, Problem};

/// One labeled boundary configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splitting {
    pub d1: u32,
    pub d2: u32,
    /// Condition indices on the component carrying the first pin.
    pub side1: Vec<usize>,
    pub side2: Vec<usize>,
    pub delta1: i64,
    pub delta2: i64,
    /// Codimension of the node condition imposed on each side.
    pub c1: u32,
    pub c2: u32,
    pub weight: CountValue,
}

/// Lists every labeled splitting with `pin1` on side 1 and, when given,
/// `pin2` on side 2.
pub fn enumerate_splittings(
    engine: &Engine,
    p: &Problem,
    pin1: usize,
    pin2: Option<usize>,
) -> Result<Vec<Splitting>> {
    check_pins(engine, p, pin1, pin2)?;
    let (n, d, v) = (p.n(), p.d(), p.codims());
    let others: Vec<usize> = (0..v.len())
        .filter(|&k| k != pin1 && Some(k) != pin2)
        .collect();
    let mut out = Vec::new();
    for d1 in 1..d {
        let d2 = d - d1;
        for mask in 0u64..(1u64 << others.len()) {
            let mut side1 = vec![pin1];
            let mut side2 = Vec::new();
            for (bit, &k) in others.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    side1.push(k);
                } else {
                    side2.push(k);
                }
            }
            side2.extend(pin2);
            side1.sort_unstable();
            side2.sort_unstable();
            let vals = |side: &[usize]| side.iter().map(|&k| v[k]).collect::<Vec<_>>();
            let (vals1, vals2) = (vals(&side1), vals(&side2));
            let Some(part) = side_data(n, d, d1, &vals1, &vals2)? else {
                continue;
            };
            let weight = part.weight(engine, n, d1, d2, vals1, vals2)?;
            out.push(Splitting {
                d1,
                d2,
                side1,
                side2,
                delta1: part.delta1,
                delta2: part.delta2,
                c1: part.c1,
                c2: part.c2,
                weight,
            });
        }
    }
    Ok(out)
}

/// `s_i · R_j`: configurations separating sections `i` and `j`.
pub fn section_dot_r(engine: &Engine, p: &Problem, i: usize, j: usize) -> Result<CountValue> {
    check_pins(engine, p, i, Some(j))?;
    dot_r_raw(engine, p.n(), p.d(), p.codims(), i, j)
}

/// `Σ_{F ∈ F_i} (deg F)²` over fibre components missing section `i`.
pub fn boundary_square_sum(engine: &Engine, p: &Problem, i: usize) -> Result<CountValue> {
    check_pins(engine, p, i, None)?;
    square_sum_raw(engine, p.n(), p.d(), p.codims(), i)
}

/// `Σ_{F ∈ F_i - F_j} deg F` over components missing `i` but meeting `j`.
pub fn boundary_linear_sum(engine: &Engine, p: &Problem, i: usize, j: usize) -> Result<CountValue> {
    check_pins(engine, p, i, Some(j))?;
    linear_sum_raw(engine, p.n(), p.d(), p.codims(), i, j)
}

/// Number of reducible fibres of the family.
pub fn reducible_fiber_count(engine: &Engine, p: &Problem) -> Result<CountValue> {
    check_pins(engine, p, 0, None)?;
    fiber_count_raw(engine, p.n(), p.d(), p.codims())
}

/// `Σ_{F ∈ F_i} deg F`, i.e. `L · R_i`.
pub fn boundary_degree_sum(engine: &Engine, p: &Problem, i: usize) -> Result<CountValue> {
    check_pins(engine, p, i, None)?;
    degree_sum_raw(engine, p.n(), p.d(), p.codims(), i)
}

pub(crate) fn dot_r_raw(
    engine: &Engine,
    n: u32,
    d: u32,
    v: &[u32],
    i: usize,
    j: usize,
) -> Result<CountValue> {
    grouped_sum(engine, n, d, v, i, Some(j), |_| 1)
}

pub(crate) fn square_sum_raw(
    engine: &Engine,
    n: u32,
    d: u32,
    v: &[u32],
    i: usize,
) -> Result<CountValue> {
    grouped_sum(engine, n, d, v, i, None, |d2| u64::from(d2) * u64::from(d2))
}

pub(crate) fn linear_sum_raw(
    engine: &Engine,
    n: u32,
    d: u32,
    v: &[u32],
    i: usize,
    j: usize,
) -> Result<CountValue> {
    grouped_sum(engine, n, d, v, i, Some(j), u64::from)
}

pub(crate) fn fiber_count_raw(engine: &Engine, n: u32, d: u32, v: &[u32]) -> Result<CountValue> {
    if v.is_empty() {
        return Ok(CountValue::zero());
    }
    grouped_sum(engine, n, d, v, 0, None, |_| 1)
}

pub(crate) fn degree_sum_raw(
    engine: &Engine,
    n: u32,
    d: u32,
    v: &[u32],
    i: usize,
) -> Result<CountValue> {
    grouped_sum(engine, n, d, v, i, None, u64::from)
}

fn check_pins(engine: &Engine, p: &Problem, pin1: usize, pin2: Option<usize>) -> Result<()> {
    let mut idx = vec![pin1];
    idx.extend(pin2);
    engine.check_family(p, &idx)?;
    if Some(pin1) == pin2 {
        return Err(Error::invalid("pinned sections must be distinct"));
    }
    Ok(())
}

struct SideData {
    delta1: i64,
    delta2: i64,
    c1: u32,
    c2: u32,
}

impl SideData {
    fn weight(
        &self,
        engine: &Engine,
        n: u32,
        d1: u32,
        d2: u32,
        mut vals1: Vec<u32>,
        mut vals2: Vec<u32>,
    ) -> Result<CountValue> {
        vals1.push(self.c1);
        let w1 = engine.count_raw(n, d1, &vals1)?;
        if w1.is_zero() {
            return Ok(w1);
        }
        vals2.push(self.c2);
        Ok(w1 * engine.count_raw(n, d2, &vals2)?)
    }
}

/// Dimension bookkeeping for one side assignment; `None` when the
/// configuration does not occur in a one-dimensional family.
fn side_data(n: u32, d: u32, d1: u32, vals1: &[u32], vals2: &[u32]) -> Result<Option<SideData>> {
    let d2 = d - d1;
    let delta1 = raw_moduli_dimension(n, d1) - condition_weight(vals1);
    let delta2 = raw_moduli_dimension(n, d2) - condition_weight(vals2);
    let top = i64::from(n) - 2;
    if !(0..=top).contains(&delta1) || !(0..=top).contains(&delta2) {
        return Ok(None);
    }
    let (c1, c2) = (delta1 as u32 + 1, delta2 as u32 + 1);
    if c1 + c2 != n {
        return Err(Error::Consistency(format!(
            "node codimensions {c1} + {c2} != {n} for sides {vals1:?} | {vals2:?} at degree {d}"
        )));
    }
    Ok(Some(SideData {
        delta1,
        delta2,
        c1,
        c2,
    }))
}

/// Sums `mult(d2) · weight` over all splittings, grouping conditions of
/// equal codimension and weighting by binomial coefficients.
fn grouped_sum(
    engine: &Engine,
    n: u32,
    d: u32,
    v: &[u32],
    pin1: usize,
    pin2: Option<usize>,
    mult: impl Fn(u32) -> u64,
) -> Result<CountValue> {
    let mut total = CountValue::zero();
    if d < 2 {
        return Ok(total);
    }
    let mut rest: Vec<u32> = v
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != pin1 && Some(k) != pin2)
        .map(|(_, &a)| a)
        .collect();
    rest.sort_unstable_by(|a, b| b.cmp(a));
    let mut groups: Vec<(u32, usize)> = Vec::new();
    for a in rest {
        match groups.last_mut() {
            Some((val, cnt)) if *val == a => *cnt += 1,
            _ => groups.push((a, 1)),
        }
    }
    let mut take = vec![0usize; groups.len()];
    loop {
        let mut vals1 = vec![v[pin1]];
        let mut vals2: Vec<u32> = pin2.map(|j| v[j]).into_iter().collect();
        let mut multiplicity = 1u64;
        for (&(val, cnt), &t) in groups.iter().zip(&take) {
            vals1.extend(std::iter::repeat_n(val, t));
            vals2.extend(std::iter::repeat_n(val, cnt - t));
            multiplicity *= binomial(cnt, t);
        }
        for d1 in 1..d {
            let d2 = d - d1;
            if let Some(part) = side_data(n, d, d1, &vals1, &vals2)? {
                let w = part.weight(engine, n, d1, d2, vals1.clone(), vals2.clone())?;
                if !w.is_zero() {
                    total += w * BigInt::from(multiplicity) * BigInt::from(mult(d2));
                }
            }
        }
        // odometer over per-group choices
        let mut pos = 0;
        loop {
            if pos == groups.len() {
                return Ok(total);
            }
            if take[pos] < groups[pos].1 {
                take[pos] += 1;
                break;
            }
            take[pos] = 0;
            pos += 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(n: u32, d: u32, v: &[u32]) -> Problem {
        Problem::new(n, d, v.iter().copied()).unwrap()
    }

    #[test]
    fn lines_have_no_reducible_fibres() {
        let e = Engine::new();
        let p = fam(3, 1, &[2, 2, 2]);
        assert!(enumerate_splittings(&e, &p, 0, None).unwrap().is_empty());
        assert!(section_dot_r(&e, &p, 0, 1).unwrap().is_zero());
        assert!(boundary_square_sum(&e, &p, 0).unwrap().is_zero());
        assert!(boundary_linear_sum(&e, &fam(3, 1, &[3, 2]), 0, 1)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn conics_meeting_seven_lines() {
        let e = Engine::new();
        let p = fam(3, 2, &[2; 7]);
        let pinned = enumerate_splittings(&e, &p, 0, Some(1)).unwrap();
        assert_eq!(pinned.len(), 20);
        assert!(pinned
            .iter()
            .all(|s| s.side1.len() == 3 || s.side1.len() == 4));
        assert!(pinned.iter().all(|s| s.weight == BigInt::from(4)));
        assert_eq!(enumerate_splittings(&e, &p, 0, None).unwrap().len(), 35);
        assert_eq!(section_dot_r(&e, &p, 0, 1).unwrap(), BigInt::from(80));
        assert_eq!(boundary_square_sum(&e, &p, 0).unwrap(), BigInt::from(140));
        assert_eq!(boundary_linear_sum(&e, &p, 0, 1).unwrap(), BigInt::from(80));
    }

    #[test]
    fn grouped_sums_match_labeled_enumeration() {
        let e = Engine::new();
        for (n, d, v) in [
            (3, 2, vec![3, 3, 3, 2]),
            (3, 2, vec![3, 2, 2, 2, 2, 2]),
            (3, 3, vec![3, 3, 2, 2, 2, 2, 2, 2, 2]),
            (4, 2, vec![4, 3, 3, 2, 2, 2]),
            (4, 2, vec![3, 3, 3, 3, 3]),
        ] {
            let p = fam(n, d, &v);
            for i in 0..v.len() {
                let all = enumerate_splittings(&e, &p, i, None).unwrap();
                let sq: BigInt = all
                    .iter()
                    .map(|s| &s.weight * BigInt::from(s.d2 * s.d2))
                    .sum();
                assert_eq!(boundary_square_sum(&e, &p, i).unwrap(), sq);
                let cnt: BigInt = all.iter().map(|s| s.weight.clone()).sum();
                if i == 0 {
                    assert_eq!(reducible_fiber_count(&e, &p).unwrap(), cnt);
                }
                for j in (0..v.len()).filter(|&j| j != i) {
                    let pinned = enumerate_splittings(&e, &p, i, Some(j)).unwrap();
                    let r: BigInt = pinned.iter().map(|s| s.weight.clone()).sum();
                    let lin: BigInt = pinned.iter().map(|s| &s.weight * BigInt::from(s.d2)).sum();
                    assert_eq!(section_dot_r(&e, &p, i, j).unwrap(), r);
                    assert_eq!(boundary_linear_sum(&e, &p, i, j).unwrap(), lin);
                }
            }
        }
    }

    #[test]
    fn splittings_satisfy_node_bookkeeping() {
        let e = Engine::new();
        let p = fam(4, 2, &[4, 3, 2, 2, 2, 2, 2]);
        for s in enumerate_splittings(&e, &p, 0, None).unwrap() {
            assert_eq!(s.c1 + s.c2, 4);
            assert_eq!(s.delta1 + s.delta2, 2);
            assert!(s.d1 < 2 && s.d2 < 2);
        }
    }

    #[test]
    fn pins_must_differ_and_family_must_be_one_dimensional() {
        let e = Engine::new();
        assert!(section_dot_r(&e, &fam(3, 2, &[2; 7]), 1, 1).is_err());
        assert_eq!(
            enumerate_splittings(&e, &fam(3, 2, &[2; 8]), 0, None),
            Err(Error::DimensionMismatch { excess: 0 })
        );
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(6, 0), 1);
        assert_eq!(binomial(16, 8), 12870);
    }
}
