//! Condition vectors, problems and the dimension bookkeeping shared by every
//! other module.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact integer used for every count, self-intersection and boundary sum.
pub type CountValue = BigInt;

/// Dimension of the space of degree-`d` rational curves in `P^n`:
/// `(n + 1) d + n - 3`.
pub fn moduli_dimension(n: u32, d: u32) -> Result<i64> {
    if n < 3 {
        return Err(Error::invalid(format!(
            "ambient dimension must be >= 3, got {n}"
        )));
    }
    if d < 1 {
        return Err(Error::invalid("curve degree must be >= 1"));
    }
    Ok(raw_moduli_dimension(n, d))
}

pub(crate) fn raw_moduli_dimension(n: u32, d: u32) -> i64 {
    (i64::from(n) + 1) * i64::from(d) + i64::from(n) - 3
}

/// `Σ (a_i - 1)`, the number of conditions a vector imposes.
pub(crate) fn condition_weight(codims: &[u32]) -> i64 {
    codims.iter().map(|&a| i64::from(a) - 1).sum()
}

/// Codimensions of the condition subspaces, kept as a descending multiset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct ConditionVector(Vec<u32>);

impl ConditionVector {
    pub fn new(codims: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut codims: Vec<u32> = codims.into_iter().collect();
        if let Some(&bad) = codims.iter().find(|&&a| a == 0) {
            return Err(Error::invalid(format!(
                "condition codimension must be >= 1, got {bad}"
            )));
        }
        codims.sort_unstable_by(|a, b| b.cmp(a));
        Ok(ConditionVector(codims))
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// Number of entries, hyperplanes included.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of entries greater than 1.
    pub fn length(&self) -> usize {
        self.0.iter().filter(|&&a| a > 1).count()
    }

    pub fn weight(&self) -> i64 {
        condition_weight(&self.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }
}

impl TryFrom<Vec<u32>> for ConditionVector {
    type Error = Error;

    fn try_from(v: Vec<u32>) -> Result<Self> {
        ConditionVector::new(v)
    }
}

impl From<ConditionVector> for Vec<u32> {
    fn from(v: ConditionVector) -> Self {
        v.0
    }
}

impl fmt::Display for ConditionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// A query: degree-`d` rational curves in `P^n` subject to `conds`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Problem {
    n: u32,
    d: u32,
    conds: ConditionVector,
}

impl Problem {
    pub fn new(n: u32, d: u32, codims: impl IntoIterator<Item = u32>) -> Result<Self> {
        moduli_dimension(n, d)?;
        Ok(Problem {
            n,
            d,
            conds: ConditionVector::new(codims)?,
        })
    }

    pub fn from_parts(n: u32, d: u32, conds: ConditionVector) -> Result<Self> {
        moduli_dimension(n, d)?;
        Ok(Problem { n, d, conds })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn conds(&self) -> &ConditionVector {
        &self.conds
    }

    pub fn codims(&self) -> &[u32] {
        self.conds.as_slice()
    }

    pub fn excess(&self) -> i64 {
        excess_dimension(self)
    }

    /// Largest codimension, if it exceeds `n` (the family is then empty).
    pub fn oversized_codim(&self) -> Option<u32> {
        self.conds.iter().find(|&a| a > self.n)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} d={} conds={}", self.n, self.d, self.conds)
    }
}

pub fn excess_dimension(p: &Problem) -> i64 {
    raw_moduli_dimension(p.n, p.d) - p.conds.weight()
}

/// Outcome of [`canonicalize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonical {
    /// The problem with every hyperplane entry removed.
    pub problem: Problem,
    /// `d^h` where `h` is the number of hyperplane entries removed.
    pub factor: CountValue,
    /// Some entry exceeds `n`, so every count vanishes.
    pub vanishes: bool,
}

/// Strips hyperplane conditions (each multiplies the count by `d`) and flags
/// vectors containing a subspace of codimension greater than `n`.
pub fn canonicalize(p: &Problem) -> Canonical {
    let stripped: Vec<u32> = p.conds.iter().filter(|&a| a > 1).collect();
    let hyperplanes = p.conds.len() - stripped.len();
    let factor = num_traits::pow(BigInt::from(p.d), hyperplanes);
    let vanishes = p.oversized_codim().is_some();
    Canonical {
        problem: Problem {
            n: p.n,
            d: p.d,
            conds: ConditionVector(stripped),
        },
        factor,
        vanishes,
    }
}

impl Canonical {
    pub fn is_trivial(&self) -> bool {
        self.factor.is_one() && !self.vanishes
    }
}

/// Every descending vector with entries in `[2, n]` whose family has the given
/// excess dimension, in ascending lexicographic order.
pub fn condition_vectors(n: u32, d: u32, excess: i64) -> Result<Vec<ConditionVector>> {
    let target = moduli_dimension(n, d)? - excess;
    let mut out = Vec::new();
    if target < 0 {
        return Ok(out);
    }
    let mut current = Vec::new();
    collect_vectors(n, target, &mut current, &mut out);
    out.sort();
    Ok(out)
}

fn collect_vectors(
    max: u32,
    remaining: i64,
    current: &mut Vec<u32>,
    out: &mut Vec<ConditionVector>,
) {
    if remaining == 0 {
        out.push(ConditionVector(current.clone()));
        return;
    }
    let top = i64::from(max).min(remaining + 1) as u32;
    for a in (2..=top).rev() {
        current.push(a);
        collect_vectors(a, remaining - (i64::from(a) - 1), current, out);
        current.pop();
    }
}
