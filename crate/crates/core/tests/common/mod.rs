//! Oracles written independently of the library code paths.
#![allow(dead_code)]

use std::collections::BTreeMap;

use curvecount::model::condition_vectors;
use curvecount::{ConditionVector, Problem};

/// Polynomial in two variables: exponent pair -> coefficient.
pub type Poly = BTreeMap<(u32, u32), i128>;

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (&(i, j), &x) in a {
        for (&(k, l), &y) in b {
            *out.entry((i + k, j + l)).or_default() += x * y;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Schur polynomial `s_(a,b)(x1, x2) = (x1 x2)^b h_{a-b}(x1, x2)`.
pub fn schur(a: u32, b: u32) -> Poly {
    (0..=a - b).map(|i| ((b + i, b + a - b - i), 1)).collect()
}

/// Integral over the Grassmannian of lines in `P^n` of a symmetric
/// polynomial in the Chern roots, via the residue form
/// `-1/2 [x1^n x2^n] f (x1 - x2)^2`.
pub fn integrate(n: u32, f: &Poly) -> i128 {
    let vandermonde: Poly = [((2, 0), 1), ((1, 1), -2), ((0, 2), 1)]
        .into_iter()
        .collect();
    let g = mul(f, &vandermonde);
    let c = g.get(&(n, n)).copied().unwrap_or(0);
    assert_eq!(c % 2, 0);
    -c / 2
}

/// Number of lines meeting general subspaces of the given codimensions.
pub fn grassmann_line_count(n: u32, codims: &[u32]) -> i128 {
    if codims.iter().any(|&a| a > n) {
        return 0;
    }
    let mut f: Poly = [((0, 0), 1)].into_iter().collect();
    for &a in codims {
        f = mul(&f, &schur(a - 1, 0));
    }
    integrate(n, &f)
}

/// Structure constant `c^μ_{λ,k}` of `σ_λ σ_k`, by pairing with the dual class.
pub fn pieri_coefficient(n: u32, lambda: (u32, u32), k: u32, mu: (u32, u32)) -> i128 {
    let dual = schur(n - 1 - mu.1, n - 1 - mu.0);
    integrate(
        n,
        &mul(&mul(&schur(lambda.0, lambda.1), &schur(k, 0)), &dual),
    )
}

pub fn problems(n: u32, d: u32, excess: i64) -> Vec<Problem> {
    condition_vectors(n, d, excess)
        .unwrap()
        .into_iter()
        .map(|v: ConditionVector| Problem::from_parts(n, d, v).unwrap())
        .collect()
}

/// Catalan number `C_k`.
pub fn catalan(k: u64) -> i64 {
    let mut c: i64 = 1;
    for i in 0..k {
        c = c * 2 * (2 * i as i64 + 1) / (i as i64 + 2);
    }
    c
}
