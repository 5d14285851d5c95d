//! Self-check suites over every condition vector of an `(n, d)` range.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::boundary;
use crate::degrees::Engine;
use crate::error::{Error, Result};
use crate::genera;
use crate::gw::{in_envelope, GwOracle};
use crate::model::{condition_vectors, moduli_dimension, Problem};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    /// Number of individual checks performed.
    pub checked: usize,
    /// First failing problem and what went wrong.
    pub failure: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

struct Suite {
    name: &'static str,
    checked: usize,
    failure: Option<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite {
            name,
            checked: 0,
            failure: None,
        }
    }

    fn done(&self) -> bool {
        self.failure.is_some()
    }

    /// Records one check; `Err` from the computation counts as a failure.
    fn check(&mut self, what: impl FnOnce() -> String, outcome: Result<Option<String>>) {
        if self.done() {
            return;
        }
        self.checked += 1;
        match outcome {
            Ok(None) => {}
            Ok(Some(msg)) => self.failure = Some(format!("{}: {msg}", what())),
            Err(e) => self.failure = Some(format!("{}: {e}", what())),
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            checked: self.checked,
            failure: self.failure,
        }
    }
}

fn expect_zero(residual: BigInt) -> Option<String> {
    (!residual.is_zero()).then(|| format!("residual {residual}"))
}

fn expect_eq<T: PartialEq + std::fmt::Display>(a: T, b: T) -> Option<String> {
    (a != b).then(|| format!("{a} != {b}"))
}

fn problems(n: u32, d_max: u32, excess: i64) -> Result<Vec<Problem>> {
    let mut out = Vec::new();
    for d in 1..=d_max {
        for v in condition_vectors(n, d, excess)? {
            out.push(Problem::from_parts(n, d, v)?);
        }
    }
    Ok(out)
}

/// Runs every suite for ambient dimension `n` and degrees `1..=d_max`.
pub fn run_all(engine: &Engine, n: u32, d_max: u32) -> Result<Vec<SuiteResult>> {
    moduli_dimension(n, 1)?;
    if d_max < 1 {
        return Err(Error::invalid("d-max must be >= 1"));
    }
    let counts = problems(n, d_max, 0)?;
    let families = problems(n, d_max, 1)?;
    let mut out = vec![
        oracle_sweep(engine, &counts),
        hyperplane_rule(engine, &counts),
        pivot_independence(engine, &counts),
    ];
    out.extend(family_suites(engine, &families));
    out.push(nonnegativity(engine));
    out.extend(genus_suites(engine, &families));
    Ok(out)
}

fn oracle_sweep(engine: &Engine, counts: &[Problem]) -> SuiteResult {
    let oracle = GwOracle::new();
    let mut s = Suite::new("oracle sweep");
    for p in counts.iter().filter(|p| in_envelope(p.n(), p.d())) {
        let outcome = (|| {
            Ok(expect_eq(
                engine.degree_count(p)?,
                oracle.invariant(p.n(), p.d(), p.codims())?,
            ))
        })();
        s.check(|| p.to_string(), outcome);
    }
    s.finish()
}

fn hyperplane_rule(engine: &Engine, counts: &[Problem]) -> SuiteResult {
    let mut s = Suite::new("hyperplane rule");
    for p in counts {
        let outcome = (|| {
            let with = Problem::new(p.n(), p.d(), p.conds().iter().chain([1]))?;
            Ok(expect_eq(
                engine.degree_count(&with)?,
                BigInt::from(p.d()) * engine.degree_count(p)?,
            ))
        })();
        s.check(|| p.to_string(), outcome);
    }
    s.finish()
}

fn pivot_independence(engine: &Engine, counts: &[Problem]) -> SuiteResult {
    let mut s = Suite::new("pivot independence");
    for p in counts.iter().filter(|p| p.d() >= 2) {
        let k = p.codims().len();
        for i in 0..k {
            for j in (0..k).filter(|&j| j != i) {
                let outcome = (|| {
                    Ok(expect_eq(
                        engine.degree_count_via(p, i, j)?,
                        engine.degree_count(p)?,
                    ))
                })();
                s.check(|| format!("{p} pivots ({i}, {j})"), outcome);
            }
        }
    }
    s.finish()
}

fn nonnegativity(engine: &Engine) -> SuiteResult {
    let mut s = Suite::new("memo integrity");
    for (key, value) in engine.store().entries() {
        let outcome = key.validate().map(|()| {
            value
                .is_negative()
                .then(|| format!("negative value {value}"))
        });
        s.check(
            || format!("n={} d={} conds={:?}", key.n, key.d, key.conds),
            outcome,
        );
    }
    s.finish()
}

fn family_suites(engine: &Engine, families: &[Problem]) -> Vec<SuiteResult> {
    let mut self_int = Suite::new("self-intersection identity");
    let mut monodromy = Suite::new("equal codimensions give equal m");
    let mut two_vs_three = Suite::new("two-section vs three-section m");
    let mut companions = Suite::new("companion independence");
    let mut symmetry = Suite::new("section-boundary symmetry");
    let mut eq7 = Suite::new("eq7 identity");
    let mut eq8 = Suite::new("eq8 identity");
    let mut pairing = Suite::new("section pairing identity");
    for p in families {
        let v = p.codims();
        let k = v.len();
        for i in 0..k {
            eq7.check(
                || format!("{p} at {i}"),
                engine.check_eq7_at(p, i).map(expect_zero),
            );
            for j in (0..k).filter(|&j| j != i) {
                pairing.check(
                    || format!("{p} ({i}, {j})"),
                    engine.check_section_pairing(p, i, j).map(expect_zero),
                );
                if i > j {
                    continue;
                }
                self_int.check(
                    || format!("{p} ({i}, {j})"),
                    engine.check_self_intersection(p, i, j).map(expect_zero),
                );
                symmetry.check(
                    || format!("{p} ({i}, {j})"),
                    (|| {
                        Ok(expect_eq(
                            boundary::section_dot_r(engine, p, i, j)?,
                            boundary::section_dot_r(engine, p, j, i)?,
                        ))
                    })(),
                );
                if v[i] == v[j] {
                    monodromy.check(
                        || format!("{p} ({i}, {j})"),
                        (|| Ok(expect_eq(engine.m_section(p, i)?, engine.m_section(p, j)?)))(),
                    );
                    two_vs_three.check(
                        || format!("{p} ({i}, {j})"),
                        (|| {
                            Ok(expect_eq(
                                engine.m_two_section(p, i, j)?,
                                engine.m_section(p, i)?,
                            ))
                        })(),
                    );
                }
            }
            companions.check(|| format!("{p} at {i}"), companion_check(engine, p, i));
        }
        if k >= 3 && v[0] == p.n() && v[1] + v[2] > p.n() {
            eq8.check(|| p.to_string(), engine.check_eq8(p).map(expect_zero));
        }
    }
    [
        self_int,
        monodromy,
        two_vs_three,
        companions,
        symmetry,
        eq7,
        eq8,
        pairing,
    ]
    .into_iter()
    .map(Suite::finish)
    .collect()
}

/// Compares `m_i` over every companion pair, padding with hyperplanes to
/// three entries when needed.
fn companion_check(engine: &Engine, p: &Problem, i: usize) -> Result<Option<String>> {
    let reference = engine.m_section(p, i)?;
    let mut padded: Vec<u32> = p.codims().to_vec();
    if padded.len() < 3 {
        padded.resize(3, 1);
    }
    let q = Problem::new(p.n(), p.d(), padded.iter().copied())?;
    // padding entries sort last, so index i is unchanged
    let k = padded.len();
    for j in (0..k).filter(|&j| j != i) {
        for l in (j + 1..k).filter(|&l| l != i) {
            let m = engine.m_section_with(&q, i, j, l)?;
            if m != reference {
                return Ok(Some(format!(
                    "companions ({j}, {l}) give {m}, default gives {reference}"
                )));
            }
        }
    }
    Ok(None)
}

fn genus_suites(engine: &Engine, families: &[Problem]) -> Vec<SuiteResult> {
    let mut invariance = Suite::new("genus thickening invariance");
    let mut parity = Suite::new("genus parity");
    let mut cross = Suite::new("genus agrees with Riemann-Roch route");
    let mut rr_parity = Suite::new("Riemann-Roch genus parity");
    for p in families {
        let outcome = (|| -> Result<_> {
            let report = genera::genus_report(engine, p)?;
            let mut seen = Vec::new();
            for t in genera::valid_thickenings(p)? {
                for e in 0..p.codims().len() {
                    let value = genera::canonical_degree_at(engine, p, &t, e)?;
                    if !seen.contains(&value) {
                        seen.push(value);
                    }
                }
            }
            Ok((report, seen))
        })();
        let (report, mut seen) = match outcome {
            Ok(x) => x,
            Err(e) => {
                let msg = format!("{p}: {e}");
                for s in [&mut invariance, &mut parity, &mut cross, &mut rr_parity] {
                    s.check(|| msg.clone(), Ok(Some(String::new())));
                }
                continue;
            }
        };
        invariance.check(
            || p.to_string(),
            Ok((seen.len() != 1).then(|| {
                seen.sort();
                let vals: Vec<String> = seen.iter().map(BigInt::to_string).collect();
                format!("values {}", vals.join(", "))
            })),
        );
        parity.check(
            || p.to_string(),
            Ok((report.deg_k % 2 != 0).then(|| format!("deg K = {}", report.deg_k))),
        );
        cross.check(
            || p.to_string(),
            Ok((!report.consistent)
                .then(|| format!("{} vs {}", report.deg_k, report.deg_k_cross_check))),
        );
        rr_parity.check(
            || p.to_string(),
            Ok((report.deg_k_cross_check % 2 != 0)
                .then(|| format!("deg K = {}", report.deg_k_cross_check))),
        );
    }
    [invariance, parity, cross, rr_parity]
        .into_iter()
        .map(Suite::finish)
        .collect()
}
