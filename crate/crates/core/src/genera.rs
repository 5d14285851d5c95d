//! Canonical degree of a one-dimensional incidence family `B(a)`.
//!
//! Two routes are provided.
//!
//! The thickening route enlarges some condition subspaces to codimension
//! `a_i^+ ≤ a_i` and drops the rest, so the enlarged family has dimension
//! `n - 1` and maps finitely onto `P^n`. Ramification, adjunction and the
//! normal bundles of `B` inside the enlarged family then give
//!
//! ```text
//! deg K_B = -(n+1) N(a_e + 1, ..) + Σ_{i ≠ e retained} (a_i^+ - 1) N(merge(e, i)) - a_e^+ m_e
//!           + Σ_{i retained} (a_i - a_i^+) N(.., a_i + 1, ..)
//!           + Σ_{i dropped}  (a_i N(.., a_i + 1, ..) + m_i)
//! ```
//!
//! evaluated on a retained section `e`.
//!
//! The second route applies Grothendieck–Riemann–Roch to the family of
//! stable maps: with `L` the pulled-back hyperplane class, `ω` the relative
//! dualizing sheaf and `δ` the number of nodes,
//!
//! ```text
//! deg K_B = -(n+1)(L² - L·ω)/2 - 2δ + Σ m_i + Σ a_i N(.., a_i + 1, ..)
//! ```
//!
//! where `L² = N(a, 2)` and `L·ω = -2 N(a_1 + 1, ..) - d m_1 + Σ_{F ∈ F_1} deg F`.
//! It needs no choice and serves as a cross-check; the two routes disagree
//! on many families of degree two and above (see `consistent` in
//! [`GenusReport`]).
//!
//! Hyperplane entries are removed before either route runs: they do not
//! change `B`.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::boundary;
use crate::degrees::{bump, halve, merge, Engine};
use crate::error::{Error, Result};
use crate::model::{canonicalize, raw_moduli_dimension, CountValue, Problem};

/// Choice of enlarged subspaces. Indices refer to the hyperplane-free
/// (canonical) form of the problem.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ThickeningSpec {
    /// `(index, a_i^+)` for every retained condition, in index order.
    pub retained: Vec<(usize, u32)>,
    /// Indices of dropped conditions, ascending.
    pub dropped: Vec<usize>,
}

impl ThickeningSpec {
    pub fn ell(&self) -> usize {
        self.retained.len()
    }

    pub fn plus_codims(&self) -> Vec<u32> {
        self.retained.iter().map(|&(_, a)| a).collect()
    }

    fn plus(&self, i: usize) -> Option<u32> {
        self.retained
            .iter()
            .find(|&&(k, _)| k == i)
            .map(|&(_, a)| a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenusReport {
    /// The hyperplane-free problem the report describes.
    pub problem: Problem,
    /// `deg K_B` from the thickening route.
    pub deg_k: i64,
    /// `1 + deg_k / 2`, meaningful only if `B` is connected; absent when
    /// `deg_k` is odd.
    pub genus_if_connected: Option<i64>,
    pub thickening: ThickeningSpec,
    /// `deg K_B` from the Riemann–Roch route.
    pub deg_k_cross_check: i64,
    pub genus_if_connected_cross_check: Option<i64>,
    /// Whether the two routes agree.
    pub consistent: bool,
}

/// Hyperplane-free form of a one-dimensional family, with the family checks
/// applied.
pub fn genus_problem(p: &Problem) -> Result<Problem> {
    let excess = p.excess();
    if excess != 1 {
        return Err(Error::DimensionMismatch { excess });
    }
    if let Some(codim) = p.oversized_codim() {
        return Err(Error::EmptyFamily { codim, n: p.n() });
    }
    Ok(canonicalize(p).problem)
}

/// `Σ (a_i^+ - 1)` a thickening must reach.
pub fn thickening_budget(n: u32, d: u32) -> i64 {
    raw_moduli_dimension(n, d) - (i64::from(n) - 1)
}

/// Greedy choice: keep conditions whole from the largest down, lowering the
/// last one kept to meet the budget exactly.
pub fn choose_thickening(p: &Problem) -> Result<ThickeningSpec> {
    let q = genus_problem(p)?;
    let v = q.codims();
    let mut remaining = thickening_budget(q.n(), q.d());
    let mut retained = Vec::new();
    let mut dropped = Vec::new();
    for (i, &a) in v.iter().enumerate() {
        if remaining > 0 && a >= 2 {
            let plus = i64::from(a).min(remaining + 1) as u32;
            retained.push((i, plus));
            remaining -= i64::from(plus) - 1;
        } else {
            dropped.push(i);
        }
    }
    if remaining != 0 {
        return Err(Error::NoThickening(format!(
            "{q}: budget short by {remaining}"
        )));
    }
    Ok(ThickeningSpec { retained, dropped })
}

/// Every valid thickening of the problem.
pub fn valid_thickenings(p: &Problem) -> Result<Vec<ThickeningSpec>> {
    let q = genus_problem(p)?;
    let v = q.codims();
    let budget = thickening_budget(q.n(), q.d());
    let mut out = Vec::new();
    let mut plus = vec![0u32; v.len()];
    collect_thickenings(v, 0, budget, &mut plus, &mut out);
    Ok(out)
}

// plus[i] == 0 marks a dropped index
fn collect_thickenings(
    v: &[u32],
    i: usize,
    remaining: i64,
    plus: &mut Vec<u32>,
    out: &mut Vec<ThickeningSpec>,
) {
    if i == v.len() {
        if remaining == 0 {
            out.push(ThickeningSpec {
                retained: (0..v.len())
                    .filter(|&k| plus[k] > 0)
                    .map(|k| (k, plus[k]))
                    .collect(),
                dropped: (0..v.len()).filter(|&k| plus[k] == 0).collect(),
            });
        }
        return;
    }
    plus[i] = 0;
    collect_thickenings(v, i + 1, remaining, plus, out);
    for a in 2..=v[i] {
        let w = i64::from(a) - 1;
        if w > remaining {
            break;
        }
        plus[i] = a;
        collect_thickenings(v, i + 1, remaining - w, plus, out);
    }
    plus[i] = 0;
}

/// Checks a spec against the (hyperplane-free) problem.
pub fn validate_thickening(q: &Problem, t: &ThickeningSpec) -> Result<()> {
    let v = q.codims();
    let mut seen = vec![false; v.len()];
    for i in t
        .retained
        .iter()
        .map(|&(i, _)| i)
        .chain(t.dropped.iter().copied())
    {
        if i >= v.len() || std::mem::replace(&mut seen[i], true) {
            return Err(Error::invalid(format!(
                "thickening index {i} repeated or out of range for {q}"
            )));
        }
    }
    if seen.contains(&false) {
        return Err(Error::invalid(format!(
            "thickening does not cover every condition of {q}"
        )));
    }
    for &(i, a) in &t.retained {
        if a < 2 || a > v[i] {
            return Err(Error::invalid(format!(
                "enlarged codimension {a} outside [2, {}] at index {i}",
                v[i]
            )));
        }
    }
    let total: i64 = t.retained.iter().map(|&(_, a)| i64::from(a) - 1).sum();
    let budget = thickening_budget(q.n(), q.d());
    if total != budget {
        return Err(Error::invalid(format!(
            "thickening weight {total} differs from budget {budget}"
        )));
    }
    if t.retained.is_empty() {
        return Err(Error::invalid(
            "a thickening must retain at least one condition",
        ));
    }
    Ok(())
}

/// `deg K_B` by the thickening route, evaluated on the first retained section.
pub fn canonical_degree(engine: &Engine, p: &Problem, t: &ThickeningSpec) -> Result<CountValue> {
    let q = genus_problem(p)?;
    validate_thickening(&q, t)?;
    thickening_formula(engine, &q, t, t.retained[0].0)
}

/// As [`canonical_degree`], evaluating the relative canonical class on
/// section `e` instead. For a dropped `e` the ramification term contributes
/// nothing at `e` itself.
pub fn canonical_degree_at(
    engine: &Engine,
    p: &Problem,
    t: &ThickeningSpec,
    e: usize,
) -> Result<CountValue> {
    let q = genus_problem(p)?;
    validate_thickening(&q, t)?;
    if e >= q.codims().len() {
        return Err(Error::invalid(format!(
            "section index {e} out of range for {q}"
        )));
    }
    thickening_formula(engine, &q, t, e)
}

fn thickening_formula(
    engine: &Engine,
    q: &Problem,
    t: &ThickeningSpec,
    e: usize,
) -> Result<CountValue> {
    let (n, d, v) = (q.n(), q.d(), q.codims());
    let count = |w: &[u32]| engine.count_raw(n, d, w);
    let m = |i: usize| engine.m_raw(n, d, v, i, None);

    let mut total = -BigInt::from(n + 1) * count(&bump(v, e))?;
    for &(i, plus) in t.retained.iter().filter(|&&(i, _)| i != e) {
        total += BigInt::from(plus - 1) * count(&merge(v, e, i))?;
    }
    let m_e = m(e)?;
    total -= BigInt::from(t.plus(e).unwrap_or(1)) * m_e;
    for (i, &a) in v.iter().enumerate() {
        let up = count(&bump(v, i))?;
        match t.plus(i) {
            Some(plus) => total += BigInt::from(a - plus) * up,
            None => total += BigInt::from(a) * up + m(i)?,
        }
    }
    Ok(total)
}

/// `deg K_B` by the Riemann–Roch route.
pub fn canonical_degree_grr(engine: &Engine, p: &Problem) -> Result<CountValue> {
    canonical_degree_grr_at(engine, p, 0)
}

/// As [`canonical_degree_grr`], computing `L·ω` through section `e`.
pub fn canonical_degree_grr_at(engine: &Engine, p: &Problem, e: usize) -> Result<CountValue> {
    let q = genus_problem(p)?;
    let (n, d, v) = (q.n(), q.d(), q.codims());
    if e >= v.len() {
        return Err(Error::invalid(format!(
            "section index {e} out of range for {q}"
        )));
    }
    let dd = BigInt::from(d);
    let count = |w: &[u32]| engine.count_raw(n, d, w);

    let mut with_plane = v.to_vec();
    with_plane.push(2);
    let l_sq = count(&with_plane)?;
    let mut ms = Vec::with_capacity(v.len());
    for i in 0..v.len() {
        ms.push(engine.m_raw(n, d, v, i, None)?);
    }
    let l_omega = -BigInt::from(2) * count(&bump(v, e))? - &dd * &ms[e]
        + boundary::degree_sum_raw(engine, n, d, v, e)?;
    let nodes = boundary::fiber_count_raw(engine, n, d, v)?;

    let mut total = -halve(BigInt::from(n + 1) * (l_sq - l_omega), "Riemann–Roch term")?
        - BigInt::from(2) * nodes;
    total += ms.into_iter().sum::<BigInt>();
    for (i, &a) in v.iter().enumerate() {
        total += BigInt::from(a) * count(&bump(v, i))?;
    }
    Ok(total)
}

/// Canonical degree with the greedy thickening, plus the Riemann–Roch
/// cross-check.
pub fn genus_report(engine: &Engine, p: &Problem) -> Result<GenusReport> {
    let q = genus_problem(p)?;
    let thickening = choose_thickening(&q)?;
    let deg_k = to_i64(canonical_degree(engine, &q, &thickening)?)?;
    let deg_k_cross_check = to_i64(canonical_degree_grr(engine, &q)?)?;
    Ok(GenusReport {
        problem: q,
        deg_k,
        genus_if_connected: conditional_genus(deg_k),
        thickening,
        deg_k_cross_check,
        genus_if_connected_cross_check: conditional_genus(deg_k_cross_check),
        consistent: deg_k == deg_k_cross_check,
    })
}

/// `1 + deg_k / 2` for even `deg_k`.
pub fn conditional_genus(deg_k: i64) -> Option<i64> {
    deg_k.is_even().then(|| 1 + deg_k / 2)
}

fn to_i64(v: CountValue) -> Result<i64> {
    i64::try_from(&v)
        .map_err(|_| Error::Consistency(format!("canonical degree {v} exceeds 64 bits")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(n: u32, d: u32, v: &[u32]) -> Problem {
        Problem::new(n, d, v.iter().copied()).unwrap()
    }

    #[test]
    fn greedy_thickenings() {
        let t = choose_thickening(&fam(3, 1, &[2, 2, 2])).unwrap();
        assert_eq!(
            t,
            ThickeningSpec {
                retained: vec![(0, 2), (1, 2)],
                dropped: vec![2]
            }
        );
        let t = choose_thickening(&fam(3, 1, &[3, 2])).unwrap();
        assert_eq!(
            t,
            ThickeningSpec {
                retained: vec![(0, 3)],
                dropped: vec![1]
            }
        );
        let t = choose_thickening(&fam(3, 2, &[2; 7])).unwrap();
        assert_eq!(t.ell(), 6);
        assert_eq!(t.plus_codims(), vec![2; 6]);
        assert_eq!(t.dropped, vec![6]);
        let t = choose_thickening(&fam(4, 1, &[4, 3])).unwrap();
        assert_eq!(
            t,
            ThickeningSpec {
                retained: vec![(0, 4)],
                dropped: vec![1]
            }
        );
    }

    #[test]
    fn line_anchors() {
        let e = Engine::new();
        for v in [vec![2, 2, 2], vec![3, 2]] {
            let r = genus_report(&e, &fam(3, 1, &v)).unwrap();
            assert_eq!(r.deg_k, -2, "{v:?}");
            assert_eq!(r.genus_if_connected, Some(0));
            assert_eq!(r.deg_k_cross_check, -2);
            assert!(r.consistent);
        }
    }

    #[test]
    fn hyperplanes_do_not_change_the_family() {
        let e = Engine::new();
        let a = genus_report(&e, &fam(3, 2, &[3, 1, 3, 2, 2, 2])).unwrap();
        let b = genus_report(&e, &fam(3, 2, &[3, 3, 2, 2, 2])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn riemann_roch_route_on_known_families() {
        let e = Engine::new();
        // conics through three points and a line: a pencil in a fixed plane
        assert_eq!(
            canonical_degree_grr(&e, &fam(3, 2, &[3, 3, 3, 2])).unwrap(),
            BigInt::from(-2)
        );
        // lines in P^4 meeting five general planes: a linear section of the
        // Grassmannian, an elliptic quintic
        let grassmann = fam(4, 1, &[2; 5]);
        assert_eq!(
            canonical_degree_grr(&e, &grassmann).unwrap(),
            BigInt::from(0)
        );
    }

    #[test]
    fn riemann_roch_route_ignores_section_choice() {
        let e = Engine::new();
        for (n, d, v) in [
            (3, 2, vec![2; 7]),
            (3, 2, vec![3, 3, 2, 2, 2]),
            (4, 2, vec![4, 3, 2, 2, 2, 2, 2]),
            (3, 3, vec![3, 3, 3, 3, 2, 2, 2]),
        ] {
            let p = fam(n, d, &v);
            let first = canonical_degree_grr(&e, &p).unwrap();
            assert!(first.is_even(), "{p}");
            for i in 1..v.len() {
                assert_eq!(
                    canonical_degree_grr_at(&e, &p, i).unwrap(),
                    first,
                    "{p} at {i}"
                );
            }
        }
    }

    #[test]
    fn enumeration_contains_greedy_choice() {
        let p = fam(3, 2, &[3, 3, 2, 2, 2]);
        let all = valid_thickenings(&p).unwrap();
        assert!(all.contains(&choose_thickening(&p).unwrap()));
        let q = genus_problem(&p).unwrap();
        for t in &all {
            validate_thickening(&q, t).unwrap();
        }
    }

    #[test]
    fn validation_rejects_bad_specs() {
        let q = fam(3, 1, &[2, 2, 2]);
        let bad = [
            ThickeningSpec {
                retained: vec![(0, 2)],
                dropped: vec![1, 2],
            },
            ThickeningSpec {
                retained: vec![(0, 3), (1, 1)],
                dropped: vec![2],
            },
            ThickeningSpec {
                retained: vec![(0, 2), (0, 2)],
                dropped: vec![2],
            },
            ThickeningSpec {
                retained: vec![(0, 2), (1, 2)],
                dropped: vec![],
            },
        ];
        for t in bad {
            assert!(validate_thickening(&q, &t).is_err(), "{t:?}");
        }
    }

    #[test]
    fn errors() {
        let e = Engine::new();
        assert_eq!(
            genus_report(&e, &fam(3, 1, &[2, 2])),
            Err(Error::DimensionMismatch { excess: 2 })
        );
        assert_eq!(
            genus_report(&e, &fam(3, 1, &[3, 3])),
            Err(Error::DimensionMismatch { excess: 0 })
        );
        assert_eq!(
            genus_report(&e, &fam(3, 1, &[4, 1])),
            Err(Error::EmptyFamily { codim: 4, n: 3 })
        );
    }
}
