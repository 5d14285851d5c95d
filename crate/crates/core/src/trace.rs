//! Derivation traces.
//!
//! A trace replays a computation and records, for every quantity, the rule
//! that produced it and the quantities it was built from. Subtrees for the
//! same quantity are shared; [`TraceNode::to_json`] expands each one once and
//! emits a reference afterwards, and stops expanding after a node budget.

use std::collections::{BTreeSet, HashMap};
use std::str::FromStr;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::boundary;
use crate::degrees::{bump, default_companions, merge, shift_step, Engine};
use crate::error::Result;
use crate::genera;
use crate::model::{CountValue, Problem};

pub const BASE_SCHUBERT: &str = "base-schubert";
pub const EQ9_SHIFT: &str = "eq9-shift";
pub const EQ4_M: &str = "eq4-m";
pub const EQ5_SPLITTING: &str = "eq5-splitting";
pub const EQ7_CHECK: &str = "eq7-check";
pub const EQ8_CHECK: &str = "eq8-check";
pub const GENUS: &str = "genus-eq10-13";
pub const HYPERPLANE_RULE: &str = "hyperplane-rule";
pub const VANISH: &str = "vanish";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceNode {
    pub key: String,
    pub rule: &'static str,
    pub value: CountValue,
    pub children: Vec<Arc<TraceNode>>,
}

impl TraceNode {
    fn leaf(key: String, rule: &'static str, value: CountValue) -> Arc<Self> {
        Arc::new(TraceNode {
            key,
            rule,
            value,
            children: Vec::new(),
        })
    }

    /// Number of nodes in the fully expanded tree, counting shared
    /// subtrees once.
    pub fn distinct_nodes(&self) -> usize {
        fn walk(node: &TraceNode, seen: &mut BTreeSet<(&'static str, String)>) {
            if seen.insert((node.rule, node.key.clone())) {
                for c in &node.children {
                    walk(c, seen);
                }
            }
        }
        let mut seen = BTreeSet::new();
        walk(self, &mut seen);
        seen.len()
    }

    /// JSON form. A node seen before is written as `{"key", "rule", "value",
    /// "ref": true}`; once `max_nodes` nodes are expanded the rest are
    /// written with `"truncated": true`.
    pub fn to_json(&self, max_nodes: usize) -> Value {
        let mut seen = BTreeSet::new();
        let mut budget = max_nodes;
        self.json_inner(&mut seen, &mut budget)
    }

    fn json_inner(&self, seen: &mut BTreeSet<(&'static str, String)>, budget: &mut usize) -> Value {
        let mut obj = Map::new();
        obj.insert("key".into(), Value::String(self.key.clone()));
        obj.insert("rule".into(), Value::String(self.rule.into()));
        obj.insert("value".into(), number(&self.value));
        if !seen.insert((self.rule, self.key.clone())) {
            obj.insert("ref".into(), Value::Bool(true));
            return Value::Object(obj);
        }
        if *budget == 0 {
            obj.insert("truncated".into(), Value::Bool(true));
            return Value::Object(obj);
        }
        *budget -= 1;
        let children: Vec<Value> = self
            .children
            .iter()
            .map(|c| c.json_inner(seen, budget))
            .collect();
        obj.insert("children".into(), Value::Array(children));
        Value::Object(obj)
    }
}

fn number(v: &CountValue) -> Value {
    // arbitrary_precision keeps big values exact
    serde_json::Number::from_str(&v.to_string())
        .map(Value::Number)
        .unwrap_or_else(|_| json!(v.to_string()))
}

fn vector_key(n: u32, d: u32, v: &[u32]) -> String {
    let conds: Vec<String> = v.iter().map(u32::to_string).collect();
    format!("n={n} d={d} conds={}", conds.join(","))
}

/// Builds traces against an engine, sharing count subtrees.
pub struct Tracer<'a> {
    engine: &'a Engine,
    counts: HashMap<(u32, u32, Vec<u32>), Arc<TraceNode>>,
}

impl<'a> Tracer<'a> {
    pub fn new(engine: &'a Engine) -> Self {
        Tracer {
            engine,
            counts: HashMap::new(),
        }
    }

    /// Trace of `N(p)`; `p` must have excess 0.
    pub fn count(&mut self, p: &Problem) -> Result<Arc<TraceNode>> {
        self.engine.degree_count(p)?;
        self.count_raw(p.n(), p.d(), p.codims())
    }

    fn count_raw(&mut self, n: u32, d: u32, v: &[u32]) -> Result<Arc<TraceNode>> {
        let mut sorted = v.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        if sorted.iter().any(|&a| a > n) {
            return Ok(TraceNode::leaf(
                vector_key(n, d, &sorted),
                VANISH,
                CountValue::default(),
            ));
        }
        let stripped: Vec<u32> = sorted.iter().copied().filter(|&a| a > 1).collect();
        if stripped.len() < sorted.len() {
            let inner = self.canonical(n, d, stripped)?;
            let value = self.engine.count_raw(n, d, &sorted)?;
            return Ok(Arc::new(TraceNode {
                key: vector_key(n, d, &sorted),
                rule: HYPERPLANE_RULE,
                value,
                children: vec![inner],
            }));
        }
        self.canonical(n, d, stripped)
    }

    fn canonical(&mut self, n: u32, d: u32, v: Vec<u32>) -> Result<Arc<TraceNode>> {
        let memo_key = (n, d, v);
        if let Some(hit) = self.counts.get(&memo_key) {
            return Ok(hit.clone());
        }
        let v = &memo_key.2;
        let value = self.engine.count_raw(n, d, v)?;
        let node = if d == 1 {
            TraceNode::leaf(vector_key(n, d, v), BASE_SCHUBERT, value)
        } else {
            let mut children = Vec::new();
            let rest = &v[2..];
            let (mut b1, mut b2) = (v[0], v[1]);
            loop {
                if b2 > n {
                    let mut end = vec![b1, b2];
                    end.extend_from_slice(rest);
                    children.push(TraceNode::leaf(
                        vector_key(n, d, &end),
                        VANISH,
                        CountValue::default(),
                    ));
                    break;
                }
                if b1 == 1 {
                    let mut shorter = vec![1, b2];
                    shorter.extend_from_slice(rest);
                    children.push(self.count_raw(n, d, &shorter)?);
                    break;
                }
                let step = shift_step(b1, b2, rest);
                children.push(self.count_raw(n, d, &step.merged)?);
                children.push(self.splitting(n, d, &step.family, 0, Some(1), "lin")?);
                children.push(self.m(n, d, &step.family, 0)?);
                b1 -= 1;
                b2 += 1;
            }
            Arc::new(TraceNode {
                key: vector_key(n, d, v),
                rule: EQ9_SHIFT,
                value,
                children,
            })
        };
        self.counts.insert(memo_key, node.clone());
        Ok(node)
    }

    fn m(&mut self, n: u32, d: u32, v: &[u32], i: usize) -> Result<Arc<TraceNode>> {
        let value = self.engine.m_raw(n, d, v, i, None)?;
        let mut padded = v.to_vec();
        if padded.len() < 3 {
            padded.resize(3, 1);
        }
        let (j, l) = default_companions(&padded, i);
        let mut children = Vec::new();
        for (x, y) in [(i, j), (i, l), (j, l)] {
            children.push(self.splitting(n, d, &padded, x, Some(y), "R")?);
            children.push(self.count_raw(n, d, &merge(&padded, x, y))?);
        }
        Ok(Arc::new(TraceNode {
            key: format!("m_{i} {}", vector_key(n, d, v)),
            rule: EQ4_M,
            value,
            children,
        }))
    }

    /// A boundary sum; `kind` is `"R"`, `"lin"`, `"sq"`, `"deg"` or `"nodes"`.
    fn splitting(
        &mut self,
        n: u32,
        d: u32,
        v: &[u32],
        i: usize,
        j: Option<usize>,
        kind: &str,
    ) -> Result<Arc<TraceNode>> {
        let e = self.engine;
        let value = match (kind, j) {
            ("R", Some(j)) => boundary::dot_r_raw(e, n, d, v, i, j)?,
            ("lin", Some(j)) => boundary::linear_sum_raw(e, n, d, v, i, j)?,
            ("sq", None) => boundary::square_sum_raw(e, n, d, v, i)?,
            ("deg", None) => boundary::degree_sum_raw(e, n, d, v, i)?,
            _ => boundary::fiber_count_raw(e, n, d, v)?,
        };
        let pins = match j {
            Some(j) => format!("{i}|{j}"),
            None => format!("{i}"),
        };
        let key = format!("{kind}({pins}) {}", vector_key(n, d, v));
        let p = Problem::new(n, d, v.iter().copied())?;
        // enumerate on a copy ordered like `v` so pins keep their meaning
        let order = sort_permutation(v);
        let (pi, pj) = (order[i], j.map(|j| order[j]));
        let mut sides = BTreeSet::new();
        for s in boundary::enumerate_splittings(e, &p, pi, pj)? {
            if s.weight == CountValue::default() {
                continue;
            }
            let codims = p.codims();
            let mut left: Vec<u32> = s.side1.iter().map(|&k| codims[k]).collect();
            left.push(s.c1);
            let mut right: Vec<u32> = s.side2.iter().map(|&k| codims[k]).collect();
            right.push(s.c2);
            left.sort_unstable_by(|a, b| b.cmp(a));
            right.sort_unstable_by(|a, b| b.cmp(a));
            sides.insert((s.d1, left));
            sides.insert((s.d2, right));
        }
        let mut children = Vec::new();
        for (dd, w) in sides {
            children.push(self.count_raw(n, dd, &w)?);
        }
        if children.is_empty() {
            children.push(TraceNode::leaf(
                format!("no splittings {key}"),
                VANISH,
                CountValue::default(),
            ));
        }
        Ok(Arc::new(TraceNode {
            key,
            rule: EQ5_SPLITTING,
            value,
            children,
        }))
    }

    /// Trace of the squared-hyperplane identity on section `0`.
    pub fn check_eq7(&mut self, p: &Problem) -> Result<Arc<TraceNode>> {
        let value = self.engine.check_eq7(p)?;
        self.check_node(p, EQ7_CHECK, value, true)
    }

    pub fn check_eq8(&mut self, p: &Problem) -> Result<Arc<TraceNode>> {
        let value = self.engine.check_eq8(p)?;
        self.check_node(p, EQ8_CHECK, value, false)
    }

    fn check_node(
        &mut self,
        p: &Problem,
        rule: &'static str,
        value: CountValue,
        with_bump: bool,
    ) -> Result<Arc<TraceNode>> {
        let (n, d, v) = (p.n(), p.d(), p.codims());
        let mut with_plane = v.to_vec();
        with_plane.push(2);
        let mut children = vec![self.count_raw(n, d, &with_plane)?];
        if with_bump {
            children.push(self.count_raw(n, d, &bump(v, 0))?);
        }
        children.push(self.m(n, d, v, 0)?);
        children.push(self.splitting(n, d, v, 0, None, "sq")?);
        Ok(Arc::new(TraceNode {
            key: format!("residual {p}"),
            rule,
            value,
            children,
        }))
    }

    /// Trace of the thickening route for `deg K_B`.
    pub fn genus(&mut self, p: &Problem) -> Result<Arc<TraceNode>> {
        let q = genera::genus_problem(p)?;
        let t = genera::choose_thickening(&q)?;
        let value = genera::canonical_degree(self.engine, &q, &t)?;
        let (n, d, v) = (q.n(), q.d(), q.codims());
        let e = t.retained[0].0;
        let mut children = Vec::new();
        for &(i, _) in t.retained.iter().filter(|&&(i, _)| i != e) {
            children.push(self.count_raw(n, d, &merge(v, e, i))?);
        }
        for i in 0..v.len() {
            children.push(self.count_raw(n, d, &bump(v, i))?);
            if i == e || t.dropped.contains(&i) {
                children.push(self.m(n, d, v, i)?);
            }
        }
        Ok(Arc::new(TraceNode {
            key: format!("deg K {q}"),
            rule: GENUS,
            value,
            children,
        }))
    }
}

/// `order[k]` is the position of `v[k]` after a stable descending sort.
fn sort_permutation(v: &[u32]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].cmp(&v[a]).then(a.cmp(&b)));
    let mut order = vec![0; v.len()];
    for (pos, &k) in idx.iter().enumerate() {
        order[k] = pos;
    }
    order
}
