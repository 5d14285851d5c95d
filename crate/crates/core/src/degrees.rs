//! The degree recursion.
//!
//! Counts are computed by the weight-shift chain: for an excess-0 vector
//! `(b1, b2, rest)` the one-dimensional family `Q = (b1 - 1, b2, rest)`
//! satisfies
//!
//! ```text
//! N(b1, b2, rest) = N(b1 - 1, b2 + 1, rest) - d N(b1 + b2 - 1, rest)
//!                   + Σ_{F ∈ F_1 - F_2} deg F  -  d m_1(Q)
//! ```
//!
//! and the chain is iterated until the first pivot becomes a hyperplane
//! (the length drops) or the second exceeds `n` (the term vanishes). Every
//! other term has lower degree or lower length. Section self-intersections
//! `m_i = -s_i²` come from the three-section identity
//!
//! ```text
//! 2 m_i = s_i·R_j + s_i·R_l - s_j·R_l - 2 N(a_i + a_j, ..) - 2 N(a_i + a_l, ..) + 2 N(a_j + a_l, ..)
//! ```

use std::collections::HashMap;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::boundary;
use crate::error::{Error, Result};
use crate::model::{canonicalize, condition_weight, raw_moduli_dimension, CountValue, Problem};
use crate::schubert;

/// Canonical memo key: descending codimensions, all in `[2, n]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MemoKey {
    pub n: u32,
    pub d: u32,
    pub conds: Vec<u32>,
}

impl MemoKey {
    /// Checks the canonical-form invariants (sorted, no hyperplanes, no
    /// entries above `n`, excess 0).
    pub fn validate(&self) -> Result<()> {
        if self.n < 3 || self.d < 1 {
            return Err(Error::invalid(format!(
                "bad ambient data n={} d={}",
                self.n, self.d
            )));
        }
        if self.conds.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("conditions not in descending order"));
        }
        if self.conds.iter().any(|&a| a < 2 || a > self.n) {
            return Err(Error::invalid(format!(
                "conditions must lie in [2, {}]",
                self.n
            )));
        }
        let excess = raw_moduli_dimension(self.n, self.d) - condition_weight(&self.conds);
        if excess != 0 {
            return Err(Error::DimensionMismatch { excess });
        }
        Ok(())
    }
}

/// Shared cache of canonical counts.
///
/// Reads take a shared lock; writes are idempotent since a key has exactly
/// one value. A write that disagrees with an existing entry is reported as a
/// consistency violation.
#[derive(Debug, Default)]
pub struct MemoStore {
    map: RwLock<HashMap<MemoKey, CountValue>>,
}

impl MemoStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &MemoKey) -> Option<CountValue> {
        self.map
            .read()
            .expect("memo lock poisoned")
            .get(key)
            .cloned()
    }

    pub fn insert(&self, key: MemoKey, value: CountValue) -> Result<()> {
        if value.is_negative() {
            return Err(Error::Consistency(format!(
                "negative count {value} for n={} d={} conds={:?}",
                key.n, key.d, key.conds
            )));
        }
        let mut map = self.map.write().expect("memo lock poisoned");
        if let Some(old) = map.get(&key) {
            if *old != value {
                return Err(Error::Consistency(format!(
                    "conflicting values {old} and {value} for n={} d={} conds={:?}",
                    key.n, key.d, key.conds
                )));
            }
            return Ok(());
        }
        map.insert(key, value);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("memo lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All entries, sorted by key.
    pub fn entries(&self) -> Vec<(MemoKey, CountValue)> {
        let map = self.map.read().expect("memo lock poisoned");
        let mut out: Vec<_> = map.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }
}

/// One step of the weight-shift chain for pivots `(b1, b2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ShiftStep {
    /// The one-dimensional family `(b1 - 1, b2, rest)`; pivots at 0 and 1.
    pub family: Vec<u32>,
    /// `(b1 - 1, b2 + 1, rest)`.
    pub shifted: Vec<u32>,
    /// `(b1 + b2 - 1, rest)`.
    pub merged: Vec<u32>,
}

pub(crate) fn shift_step(b1: u32, b2: u32, rest: &[u32]) -> ShiftStep {
    let with = |x: u32, y: Option<u32>| {
        let mut v = Vec::with_capacity(rest.len() + 2);
        v.push(x);
        v.extend(y);
        v.extend_from_slice(rest);
        v
    };
    ShiftStep {
        family: with(b1 - 1, Some(b2)),
        shifted: with(b1 - 1, Some(b2 + 1)),
        merged: with(b1 + b2 - 1, None),
    }
}

/// Replaces entries `i` and `j` by their sum (placed first).
pub(crate) fn merge(v: &[u32], i: usize, j: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(v.len() - 1);
    out.push(v[i] + v[j]);
    out.extend(
        v.iter()
            .enumerate()
            .filter(|&(k, _)| k != i && k != j)
            .map(|(_, &a)| a),
    );
    out
}

/// Returns a copy of `v` with entry `i` raised by one.
pub(crate) fn bump(v: &[u32], i: usize) -> Vec<u32> {
    let mut out = v.to_vec();
    out[i] += 1;
    out
}

/// Default companion pair for `m_i`: the two largest other entries.
pub(crate) fn default_companions(v: &[u32], i: usize) -> (usize, usize) {
    let mut others: Vec<usize> = (0..v.len()).filter(|&k| k != i).collect();
    others.sort_by(|&a, &b| v[b].cmp(&v[a]).then(a.cmp(&b)));
    (others[0], others[1])
}

/// Evaluates counts, section self-intersections and the identities tying
/// them together, memoizing every canonical count.
///
/// `Engine` is `Sync`; it can be shared across threads.
#[derive(Debug, Default)]
pub struct Engine {
    memo: MemoStore,
}

impl Engine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_store(memo: MemoStore) -> Self {
        Engine { memo }
    }

    pub fn store(&self) -> &MemoStore {
        &self.memo
    }

    pub fn into_store(self) -> MemoStore {
        self.memo
    }

    /// `N_{d,n}(conds)`. The problem must have excess 0.
    pub fn degree_count(&self, p: &Problem) -> Result<CountValue> {
        let excess = p.excess();
        if excess != 0 {
            return Err(Error::DimensionMismatch { excess });
        }
        self.count_raw(p.n(), p.d(), p.codims())
    }

    /// Convenience wrapper around [`Engine::degree_count`].
    pub fn count(&self, n: u32, d: u32, codims: &[u32]) -> Result<CountValue> {
        self.degree_count(&Problem::new(n, d, codims.iter().copied())?)
    }

    /// Count for an excess-0 vector in any order; may contain hyperplanes or
    /// entries above `n`.
    pub(crate) fn count_raw(&self, n: u32, d: u32, codims: &[u32]) -> Result<CountValue> {
        if codims.iter().any(|&a| a > n) {
            return Ok(CountValue::zero());
        }
        let mut key: Vec<u32> = codims.iter().copied().filter(|&a| a > 1).collect();
        let hyperplanes = codims.len() - key.len();
        key.sort_unstable_by(|a, b| b.cmp(a));
        let key = MemoKey { n, d, conds: key };
        let excess = raw_moduli_dimension(n, d) - condition_weight(&key.conds);
        if excess != 0 {
            return Err(Error::Consistency(format!(
                "subquery {key:?} has excess {excess}"
            )));
        }
        let base = self.canonical_count(key)?;
        Ok(base * num_traits::pow(BigInt::from(d), hyperplanes))
    }

    fn canonical_count(&self, key: MemoKey) -> Result<CountValue> {
        if let Some(v) = self.memo.get(&key) {
            return Ok(v);
        }
        let value = if key.d == 1 {
            schubert::line_count(key.n, &key.conds)?
        } else {
            if key.conds.len() < 2 {
                return Err(Error::Consistency(format!(
                    "excess-0 vector {key:?} has fewer than two entries"
                )));
            }
            return self.chain(key.n, key.d, &key.conds, 0, 1, true);
        };
        self.memo.insert(key, value.clone())?;
        Ok(value)
    }

    /// Runs the weight-shift chain with pivots at positions `p1`, `p2`.
    /// With `store` set, every intermediate count is memoized.
    fn chain(
        &self,
        n: u32,
        d: u32,
        v: &[u32],
        p1: usize,
        p2: usize,
        store: bool,
    ) -> Result<CountValue> {
        let rest: Vec<u32> = v
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != p1 && k != p2)
            .map(|(_, &a)| a)
            .collect();
        let (mut b1, mut b2) = (v[p1], v[p2]);
        let mut increments = Vec::new();
        let terminal = loop {
            if b2 > n {
                break CountValue::zero();
            }
            if b1 == 1 {
                let mut shorter = Vec::with_capacity(rest.len() + 1);
                shorter.push(b2);
                shorter.extend_from_slice(&rest);
                break BigInt::from(d) * self.count_raw(n, d, &shorter)?;
            }
            let step = shift_step(b1, b2, &rest);
            let merged = self.count_raw(n, d, &step.merged)?;
            let linear = boundary::linear_sum_raw(self, n, d, &step.family, 0, 1)?;
            let m = self.m_raw(n, d, &step.family, 0, None)?;
            increments.push((b1, b2, linear - BigInt::from(d) * (merged + m)));
            b1 -= 1;
            b2 += 1;
        };
        let mut value = terminal;
        for (b1, b2, inc) in increments.into_iter().rev() {
            value += inc;
            if store {
                let mut conds = rest.clone();
                conds.push(b1);
                conds.push(b2);
                conds.sort_unstable_by(|a, b| b.cmp(a));
                self.memo.insert(MemoKey { n, d, conds }, value.clone())?;
            }
        }
        if value.is_negative() {
            return Err(Error::Consistency(format!(
                "negative count {value} for n={n} d={d} conds={v:?}"
            )));
        }
        Ok(value)
    }

    /// Evaluates an excess-0 problem through the chain with explicit pivot
    /// positions (indices into `p.codims()`), bypassing the top-level memo.
    pub fn degree_count_via(&self, p: &Problem, first: usize, second: usize) -> Result<CountValue> {
        let excess = p.excess();
        if excess != 0 {
            return Err(Error::DimensionMismatch { excess });
        }
        let v = p.codims();
        if first == second || first >= v.len() || second >= v.len() {
            return Err(Error::invalid(format!(
                "bad pivot pair ({first}, {second}) for {p}"
            )));
        }
        if p.oversized_codim().is_some() {
            return Ok(CountValue::zero());
        }
        if v[first] < 2 || v[second] < 2 || p.d() == 1 {
            return self.count_raw(p.n(), p.d(), v);
        }
        self.chain(p.n(), p.d(), v, first, second, false)
    }

    /// `m_i = -s_i²` on the one-dimensional family `p`.
    pub fn m_section(&self, p: &Problem, i: usize) -> Result<CountValue> {
        self.check_family(p, &[i])?;
        self.m_raw(p.n(), p.d(), p.codims(), i, None)
    }

    /// `m_i` computed with an explicit companion pair `(j, l)`.
    pub fn m_section_with(&self, p: &Problem, i: usize, j: usize, l: usize) -> Result<CountValue> {
        self.check_family(p, &[i, j, l])?;
        if i == j || i == l || j == l {
            return Err(Error::invalid(format!(
                "companions must be distinct: ({i}, {j}, {l})"
            )));
        }
        self.m_raw(p.n(), p.d(), p.codims(), i, Some((j, l)))
    }

    /// The two-section formula for equal codimensions,
    /// `m_i = ½ s_i·R_j - N(a_i + a_j, ..)`.
    pub fn m_two_section(&self, p: &Problem, i: usize, j: usize) -> Result<CountValue> {
        self.check_family(p, &[i, j])?;
        let v = p.codims();
        if i == j || v[i] != v[j] {
            return Err(Error::invalid(format!(
                "two-section formula needs equal codimensions at {i}, {j}"
            )));
        }
        let (n, d) = (p.n(), p.d());
        let r = boundary::dot_r_raw(self, n, d, v, i, j)?;
        let sigma = self.count_raw(n, d, &merge(v, i, j))?;
        Ok(halve(r, "two-section formula")? - sigma)
    }

    pub(crate) fn m_raw(
        &self,
        n: u32,
        d: u32,
        v: &[u32],
        i: usize,
        companions: Option<(usize, usize)>,
    ) -> Result<CountValue> {
        let padded;
        let v = if v.len() < 3 {
            if d != 1 {
                return Err(Error::Consistency(format!(
                    "family {v:?} of degree {d} has fewer than three sections"
                )));
            }
            let mut w = v.to_vec();
            w.resize(3, 1);
            padded = w;
            &padded[..]
        } else {
            v
        };
        let (j, l) = companions.unwrap_or_else(|| default_companions(v, i));
        let r_ij = boundary::dot_r_raw(self, n, d, v, i, j)?;
        let r_il = boundary::dot_r_raw(self, n, d, v, i, l)?;
        let r_jl = boundary::dot_r_raw(self, n, d, v, j, l)?;
        let s_ij = self.count_raw(n, d, &merge(v, i, j))?;
        let s_il = self.count_raw(n, d, &merge(v, i, l))?;
        let s_jl = self.count_raw(n, d, &merge(v, j, l))?;
        let twice = r_ij + r_il - r_jl - BigInt::from(2) * (s_ij + s_il - s_jl);
        halve(twice, "three-section formula")
    }

    /// `s_i · s_j = N(.., a_i + a_j, ..)` on a one-dimensional family.
    pub fn section_dot_section(&self, p: &Problem, i: usize, j: usize) -> Result<CountValue> {
        self.check_family(p, &[i, j])?;
        if i == j {
            return Err(Error::invalid("sections must be distinct"));
        }
        self.count_raw(p.n(), p.d(), &merge(p.codims(), i, j))
    }

    /// `L · s_i = N(.., a_i + 1, ..)` on a one-dimensional family.
    pub fn hyperplane_dot_section(&self, p: &Problem, i: usize) -> Result<CountValue> {
        self.check_family(p, &[i])?;
        self.count_raw(p.n(), p.d(), &bump(p.codims(), i))
    }

    /// Residual of `m_i + m_j = s_j·R_i - 2 N(a_i + a_j, ..)`.
    pub fn check_self_intersection(&self, p: &Problem, i: usize, j: usize) -> Result<CountValue> {
        self.check_family(p, &[i, j])?;
        if i == j {
            return Err(Error::invalid("sections must be distinct"));
        }
        let (n, d, v) = (p.n(), p.d(), p.codims());
        let lhs = self.m_raw(n, d, v, i, None)? + self.m_raw(n, d, v, j, None)?;
        let rhs = boundary::dot_r_raw(self, n, d, v, j, i)?
            - BigInt::from(2) * self.count_raw(n, d, &merge(v, i, j))?;
        Ok(lhs - rhs)
    }

    /// Residual of `L² = 2d L·s_1 + d² m_1 - Σ_{F ∈ F_1} (deg F)²` evaluated
    /// on the first section.
    pub fn check_eq7(&self, p: &Problem) -> Result<CountValue> {
        self.check_eq7_at(p, 0)
    }

    /// As [`Engine::check_eq7`], with the pinned section at position `i`.
    pub fn check_eq7_at(&self, p: &Problem, i: usize) -> Result<CountValue> {
        self.check_family(p, &[i])?;
        let (n, d, v) = (p.n(), p.d(), p.codims());
        let dd = BigInt::from(d);
        let mut with_plane = v.to_vec();
        with_plane.push(2);
        let lhs = self.count_raw(n, d, &with_plane)?;
        let rhs = BigInt::from(2) * &dd * self.count_raw(n, d, &bump(v, i))?
            + &dd * &dd * self.m_raw(n, d, v, i, None)?
            - boundary::square_sum_raw(self, n, d, v, i)?;
        Ok(lhs - rhs)
    }

    /// Residual of `N(2, n, a_2, ..) = d² m_1 - Σ_{F ∈ F_1} (deg F)²` for a
    /// family whose first entry is a point and whose next two entries sum
    /// past `n`.
    pub fn check_eq8(&self, p: &Problem) -> Result<CountValue> {
        self.check_family(p, &[])?;
        let (n, d, v) = (p.n(), p.d(), p.codims());
        if v.len() < 3 || v[0] != n || v[1] + v[2] <= n {
            return Err(Error::invalid(format!(
                "point-pinned identity needs a_1 = n and a_2 + a_3 > n, got {p}"
            )));
        }
        let dd = BigInt::from(d);
        let mut with_plane = v.to_vec();
        with_plane.push(2);
        let lhs = self.count_raw(n, d, &with_plane)?;
        let rhs =
            &dd * &dd * self.m_raw(n, d, v, 0, None)? - boundary::square_sum_raw(self, n, d, v, 0)?;
        Ok(lhs - rhs)
    }

    /// Residual of the section-pairing identity
    /// `L·s_j = d s_i·s_j - Σ_{F ∈ F_i - F_j} deg F + L·s_i + d m_i`.
    pub fn check_section_pairing(&self, p: &Problem, i: usize, j: usize) -> Result<CountValue> {
        self.check_family(p, &[i, j])?;
        if i == j {
            return Err(Error::invalid("sections must be distinct"));
        }
        let (n, d, v) = (p.n(), p.d(), p.codims());
        let dd = BigInt::from(d);
        let lhs = self.count_raw(n, d, &bump(v, j))?;
        let rhs = &dd * self.count_raw(n, d, &merge(v, i, j))?
            - boundary::linear_sum_raw(self, n, d, v, i, j)?
            + self.count_raw(n, d, &bump(v, i))?
            + &dd * self.m_raw(n, d, v, i, None)?;
        Ok(lhs - rhs)
    }

    /// Validates a one-dimensional family and section indices.
    pub(crate) fn check_family(&self, p: &Problem, indices: &[usize]) -> Result<()> {
        let excess = p.excess();
        if excess != 1 {
            return Err(Error::DimensionMismatch { excess });
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= p.codims().len()) {
            return Err(Error::invalid(format!(
                "section index {bad} out of range for {p}"
            )));
        }
        Ok(())
    }
}

pub(crate) fn halve(twice: BigInt, what: &str) -> Result<BigInt> {
    let (half, rem) = twice.div_rem(&BigInt::from(2));
    if !rem.is_zero() {
        return Err(Error::Consistency(format!(
            "{what} produced odd doubled value {twice}"
        )));
    }
    Ok(half)
}

/// Whether the canonical form of `p` is a key the engine would memoize.
pub fn is_canonical_key(p: &Problem) -> bool {
    let c = canonicalize(p);
    c.is_trivial() && p.excess() == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(n: u32, d: u32, v: &[u32]) -> Problem {
        Problem::new(n, d, v.iter().copied()).unwrap()
    }

    #[test]
    fn m_section_line_examples() {
        let e = Engine::new();
        assert_eq!(
            e.m_section(&fam(3, 1, &[2, 2, 2]), 0).unwrap(),
            BigInt::from(0)
        );
        assert_eq!(
            e.m_section(&fam(3, 1, &[3, 2]), 0).unwrap(),
            BigInt::from(1)
        );
        assert_eq!(
            e.m_section(&fam(3, 1, &[3, 2]), 1).unwrap(),
            BigInt::from(-1)
        );
    }

    #[test]
    fn degree_count_examples() {
        let e = Engine::new();
        let c = |d, v: &[u32]| e.count(3, d, v).unwrap();
        assert_eq!(c(1, &[2, 2, 2, 2]), BigInt::from(2));
        assert_eq!(c(2, &[3, 3, 3, 3]), BigInt::from(0));
        assert_eq!(c(2, &[3, 3, 3, 2, 2]), BigInt::from(1));
        assert_eq!(c(2, &[2; 8]), BigInt::from(92));
        assert_eq!(c(3, &[2; 12]), BigInt::from(80160));
    }

    #[test]
    fn oversized_condition_vanishes() {
        let e = Engine::new();
        assert_eq!(e.count(3, 2, &[4, 2, 2, 2, 2, 2]).unwrap(), BigInt::from(0));
    }

    #[test]
    fn count_rejects_wrong_excess() {
        let e = Engine::new();
        assert_eq!(
            e.count(3, 2, &[2, 2]),
            Err(Error::DimensionMismatch { excess: 6 })
        );
        assert!(matches!(
            e.m_section(&fam(3, 1, &[2, 2]), 0),
            Err(Error::DimensionMismatch { excess: 2 })
        ));
    }

    #[test]
    fn eq7_and_eq8_examples() {
        let e = Engine::new();
        for (d, v) in [(1, vec![2, 2, 2]), (2, vec![3, 3, 3, 2]), (2, vec![2; 7])] {
            assert_eq!(
                e.check_eq7(&fam(3, d, &v)).unwrap(),
                BigInt::from(0),
                "{v:?}"
            );
        }
        assert_eq!(
            e.check_eq8(&fam(3, 2, &[3, 3, 3, 2])).unwrap(),
            BigInt::from(0)
        );
        assert_eq!(
            e.check_eq8(&fam(3, 3, &[3, 3, 3, 3, 3, 2])).unwrap(),
            BigInt::from(0)
        );
        assert!(matches!(
            e.check_eq8(&fam(3, 2, &[2; 7])),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            e.check_eq8(&fam(4, 1, &[4, 2, 2])),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn padding_is_refused_above_degree_one() {
        let e = Engine::new();
        assert!(matches!(
            e.m_raw(3, 2, &[3, 3], 0, None),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn memo_store_rejects_conflicts_and_negatives() {
        let s = MemoStore::new();
        let k = MemoKey {
            n: 3,
            d: 1,
            conds: vec![3, 3],
        };
        s.insert(k.clone(), BigInt::from(1)).unwrap();
        s.insert(k.clone(), BigInt::from(1)).unwrap();
        assert!(s.insert(k.clone(), BigInt::from(2)).is_err());
        assert!(s
            .insert(
                MemoKey {
                    n: 3,
                    d: 1,
                    conds: vec![2, 2, 2, 2]
                },
                BigInt::from(-1)
            )
            .is_err());
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn memo_key_validation() {
        assert!(MemoKey {
            n: 3,
            d: 1,
            conds: vec![3, 3]
        }
        .validate()
        .is_ok());
        assert!(MemoKey {
            n: 3,
            d: 1,
            conds: vec![2, 3, 2]
        }
        .validate()
        .is_err());
        assert!(MemoKey {
            n: 3,
            d: 1,
            conds: vec![3, 2]
        }
        .validate()
        .is_err());
        assert!(MemoKey {
            n: 3,
            d: 1,
            conds: vec![4, 2, 1]
        }
        .validate()
        .is_err());
    }

    #[test]
    fn memo_holds_only_canonical_keys() {
        let e = Engine::new();
        e.count(3, 3, &[2; 12]).unwrap();
        for (k, v) in e.store().entries() {
            k.validate().unwrap();
            assert!(!v.is_negative());
        }
    }
}
