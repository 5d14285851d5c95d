//! Genus-zero Gromov–Witten invariants of `P^n` with linear-subspace
//! insertions, by associativity.
//!
//! Insertions are powers of the hyperplane class `T_a = H^a`. For an
//! invariant `⟨T_{a1}, T_{a2}, T_{a3}, S⟩_d` with `a1 ≥ 2`, the associativity
//! relation on `(T_{a1-1}, H, T_{a2}, T_{a3})` gives
//!
//! ```text
//! ⟨a1, a2, a3, S⟩ = ⟨a1-1, a2, a3+1, S⟩ + d⟨a1+a2-1, a3, S⟩ - d⟨a1-1, a2+a3, S⟩
//!                  + X(a1-1, a2 | 1, a3) - X(a1-1, 1 | a2, a3)
//! ```
//!
//! where `X` collects the splittings with both degrees positive. The first
//! entry drops until it becomes a divisor, or the third passes `n`.
//!
//! This module deliberately shares no code with the degree recursion; lines
//! come from [`crate::schubert::line_count`].

use std::collections::HashMap;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{condition_weight, moduli_dimension, raw_moduli_dimension, CountValue};
use crate::schubert;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GwKey {
    pub n: u32,
    pub d: u32,
    pub insertions: Vec<u32>,
}

impl GwKey {
    pub fn new(n: u32, d: u32, insertions: impl IntoIterator<Item = u32>) -> Result<Self> {
        moduli_dimension(n, d)?;
        let mut insertions: Vec<u32> = insertions.into_iter().collect();
        if insertions.contains(&0) {
            return Err(Error::invalid("insertion codimension must be >= 1"));
        }
        insertions.sort_unstable_by(|a, b| b.cmp(a));
        Ok(GwKey { n, d, insertions })
    }
}

/// Whether the oracle supports `(n, d)`.
pub fn in_envelope(n: u32, d: u32) -> bool {
    d == 1 || (n == 3 && d <= 4) || (n == 4 && d <= 2)
}

pub const ENVELOPE: &str = "d = 1 for any n >= 3, n = 3 with d <= 4, n = 4 with d <= 2";

type OracleKey = (u32, u32, Vec<u32>);

/// Memoizing evaluator. `Sync`.
#[derive(Debug, Default)]
pub struct GwOracle {
    memo: RwLock<HashMap<OracleKey, CountValue>>,
}

impl GwOracle {
    pub fn new() -> Self {
        Self::default()
    }

    /// `⟨T_{a_1}, …, T_{a_k}⟩_d` for an excess-0 insertion list.
    pub fn gw_invariant(&self, key: &GwKey) -> Result<CountValue> {
        let (n, d) = (key.n, key.d);
        let excess = raw_moduli_dimension(n, d) - condition_weight(&key.insertions);
        if excess != 0 {
            return Err(Error::DimensionMismatch { excess });
        }
        if !in_envelope(n, d) {
            return Err(Error::OutsideEnvelope(format!(
                "oracle supports {ENVELOPE}; got n={n} d={d}"
            )));
        }
        let value = self.eval(n, d, &key.insertions)?;
        if key.insertions.contains(&1)
            && d >= 2
            && key.insertions.iter().filter(|&&a| a > 1).count() >= 3
        {
            let direct = self.reconstruct(n, d, key.insertions.clone())?;
            if direct != value {
                return Err(Error::Consistency(format!(
                    "divisor relation fails for {key:?}: {direct} vs {value}"
                )));
            }
        }
        if value.is_negative() {
            return Err(Error::Consistency(format!(
                "negative invariant {value} for {key:?}"
            )));
        }
        Ok(value)
    }

    /// Convenience wrapper.
    pub fn invariant(&self, n: u32, d: u32, insertions: &[u32]) -> Result<CountValue> {
        self.gw_invariant(&GwKey::new(n, d, insertions.iter().copied())?)
    }

    pub fn memo_len(&self) -> usize {
        self.memo.read().expect("oracle lock poisoned").len()
    }

    /// Any-degree evaluation; invariants of the wrong dimension are zero.
    fn eval(&self, n: u32, d: u32, v: &[u32]) -> Result<CountValue> {
        if d == 0 {
            let three = v.len() == 3 && v.iter().sum::<u32>() == n;
            return Ok(CountValue::from(u8::from(three)));
        }
        if v.iter().any(|&a| a == 0 || a > n) {
            return Ok(CountValue::zero());
        }
        let mut key: Vec<u32> = v.iter().copied().filter(|&a| a > 1).collect();
        let divisors = v.len() - key.len();
        key.sort_unstable_by(|a, b| b.cmp(a));
        if raw_moduli_dimension(n, d) != condition_weight(&key) {
            return Ok(CountValue::zero());
        }
        let factor = num_traits::pow(BigInt::from(d), divisors);
        let memo_key = (n, d, key);
        if let Some(hit) = self
            .memo
            .read()
            .expect("oracle lock poisoned")
            .get(&memo_key)
        {
            return Ok(hit * factor);
        }
        let value = if d == 1 {
            schubert::line_count(n, &memo_key.2)?
        } else {
            self.reconstruct(n, d, memo_key.2.clone())?
        };
        self.memo
            .write()
            .expect("oracle lock poisoned")
            .insert(memo_key, value.clone());
        Ok(value * factor)
    }

    /// Runs the associativity chain on `v`, whose first three entries are
    /// the pivots (each at least 2). Divisor entries in the tail are kept.
    fn reconstruct(&self, n: u32, d: u32, mut v: Vec<u32>) -> Result<CountValue> {
        v.sort_unstable_by(|a, b| b.cmp(a));
        if v.len() < 3 || v[2] < 2 {
            return Err(Error::Consistency(format!(
                "associativity needs three pivots, got {v:?} at degree {d}"
            )));
        }
        let tail = v.split_off(3);
        let (mut a1, a2, mut a3) = (v[0], v[1], v[2]);
        let dd = BigInt::from(d);
        let with = |head: &[u32]| {
            let mut w = head.to_vec();
            w.extend_from_slice(&tail);
            w
        };
        let mut total = CountValue::zero();
        loop {
            if a3 > n {
                return Ok(total);
            }
            if a1 == 1 {
                return Ok(total + &dd * self.eval(n, d, &with(&[a2, a3]))?);
            }
            total += &dd * self.eval(n, d, &with(&[a1 + a2 - 1, a3]))?;
            total -= &dd * self.eval(n, d, &with(&[a1 - 1, a2 + a3]))?;
            total += self.mixed(n, d, [a1 - 1, a2, 1, a3], &tail)?;
            total -= self.mixed(n, d, [a1 - 1, 1, a2, a3], &tail)?;
            a1 -= 1;
            a3 += 1;
        }
    }

    /// `Σ ⟨x1, x2, A, T_e⟩_{d1} ⟨T_{n-e}, x3, x4, B⟩_{d2}` over `d1 + d2 = d`
    /// with both positive and all splittings `A ⊔ B` of the tail.
    fn mixed(&self, n: u32, d: u32, x: [u32; 4], tail: &[u32]) -> Result<CountValue> {
        let mut sum = CountValue::zero();
        let k = tail.len();
        for d1 in 1..d {
            let d2 = d - d1;
            for mask in 0u64..(1u64 << k) {
                let mut left = vec![x[0], x[1]];
                let mut right = vec![x[2], x[3]];
                for (t, &a) in tail.iter().enumerate() {
                    if mask >> t & 1 == 1 {
                        left.push(a);
                    } else {
                        right.push(a);
                    }
                }
                let base = condition_weight(&left);
                for e in 1..n {
                    // only one e can balance the left dimension
                    if base + i64::from(e) - 1 != raw_moduli_dimension(n, d1) {
                        continue;
                    }
                    left.push(e);
                    let l = self.eval(n, d1, &left)?;
                    left.pop();
                    if l.is_zero() {
                        continue;
                    }
                    right.push(n - e);
                    let r = self.eval(n, d2, &right)?;
                    right.pop();
                    sum += l * r;
                }
            }
        }
        Ok(sum)
    }
}
