//! Schubert calculus on the Grassmannian `G(1, n)` of lines in `P^n`.
//!
//! A line meets a general linear subspace of codimension `a` along the
//! special Schubert cycle `σ_{a-1}`, so the `d = 1` counts are coefficients
//! of the point class in products of special classes. Products are computed
//! with the Pieri rule.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{condition_weight, moduli_dimension, CountValue};

/// Schubert class `σ_(λ1, λ2)` with `λ1 >= λ2 >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SchubertClass {
    pub first: u32,
    pub second: u32,
}

impl SchubertClass {
    pub const fn new(first: u32, second: u32) -> Self {
        SchubertClass { first, second }
    }

    pub const fn identity() -> Self {
        SchubertClass::new(0, 0)
    }

    /// The class of a point on `G(1, n)`.
    pub const fn point(n: u32) -> Self {
        SchubertClass::new(n - 1, n - 1)
    }

    pub fn codim(&self) -> u32 {
        self.first + self.second
    }

    /// Whether the partition fits the `2 × (n - 1)` box.
    pub fn fits(&self, n: u32) -> bool {
        self.first >= self.second && self.first < n
    }

    /// Poincaré dual class.
    pub fn complement(&self, n: u32) -> Self {
        SchubertClass::new(n - 1 - self.second, n - 1 - self.first)
    }
}

impl fmt::Display for SchubertClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "σ({},{})", self.first, self.second)
    }
}

/// Formal integer combination of Schubert classes.
pub type SchubertSum = BTreeMap<SchubertClass, BigInt>;

/// Every Schubert class of `G(1, n)`.
pub fn basis(n: u32) -> Vec<SchubertClass> {
    (0..n)
        .flat_map(|a| (0..=a).map(move |b| SchubertClass::new(a, b)))
        .collect()
}

/// Multiplies `cls` by the special class `σ_k`.
pub fn pieri_product(n: u32, cls: &SchubertSum, k: u32) -> Result<SchubertSum> {
    moduli_dimension(n, 1)?;
    if k < 1 || k > n - 1 {
        return Err(Error::invalid(format!(
            "special class index {k} outside 1..={}",
            n - 1
        )));
    }
    if let Some(bad) = cls.keys().find(|c| !c.fits(n)) {
        return Err(Error::invalid(format!(
            "{bad} does not fit the 2 x {} box",
            n - 1
        )));
    }
    Ok(pieri_unchecked(n, cls, k))
}

fn pieri_unchecked(n: u32, cls: &SchubertSum, k: u32) -> SchubertSum {
    let mut out = SchubertSum::new();
    for (lambda, coeff) in cls {
        let total = lambda.codim() + k;
        // μ1 >= λ1 >= μ2 >= λ2 with μ1 + μ2 = total
        for mu2 in lambda.second..=lambda.first {
            let Some(mu1) = total.checked_sub(mu2) else {
                continue;
            };
            if mu1 < lambda.first || mu1 > n - 1 {
                continue;
            }
            *out.entry(SchubertClass::new(mu1, mu2))
                .or_insert_with(BigInt::zero) += coeff;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Product of the special classes `σ_{a_i - 1}` over the condition vector.
pub fn special_product(n: u32, conds: &[u32]) -> Result<SchubertSum> {
    moduli_dimension(n, 1)?;
    let mut acc = SchubertSum::from([(SchubertClass::identity(), BigInt::from(1))]);
    for &a in conds {
        if a == 0 {
            return Err(Error::invalid("condition codimension must be >= 1"));
        }
        if a == 1 {
            continue;
        }
        if a > n {
            return Ok(SchubertSum::new());
        }
        acc = pieri_unchecked(n, &acc, a - 1);
        if acc.is_empty() {
            break;
        }
    }
    Ok(acc)
}

/// Number of lines in `P^n` meeting general subspaces of the given
/// codimensions; the coefficient of the point class in `Π σ_{a_i - 1}`.
pub fn line_count(n: u32, conds: &[u32]) -> Result<CountValue> {
    let excess = moduli_dimension(n, 1)? - condition_weight(conds);
    if excess != 0 {
        return Err(Error::DimensionMismatch { excess });
    }
    let product = special_product(n, conds)?;
    Ok(product
        .get(&SchubertClass::point(n))
        .cloned()
        .unwrap_or_default())
}
