//! Workloads shared by the criterion benches.

use curvecount::{Engine, Problem};

/// Conics in `P^3` meeting eight lines.
pub fn conics_through_lines() -> Problem {
    Problem::new(3, 2, [2; 8]).expect("valid problem")
}

/// Twisted cubics meeting twelve lines.
pub fn cubics_through_lines() -> Problem {
    Problem::new(3, 3, [2; 12]).expect("valid problem")
}

/// Counts every excess-0 vector for `n`, `d` on a fresh engine.
pub fn full_table(n: u32, d: u32) -> usize {
    let engine = Engine::new();
    let vectors = curvecount::model::condition_vectors(n, d, 0).expect("valid ambient data");
    for v in &vectors {
        let p = Problem::from_parts(n, d, v.clone()).expect("valid problem");
        engine.degree_count(&p).expect("count");
    }
    vectors.len()
}
