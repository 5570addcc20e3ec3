//! Combinatorial consequences of planarity, and the union lower bound for
//! events of bounded multiplicity.

use std::collections::BTreeMap;

use crate::delaunay::Triangulation;
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Undirected graph without loops or multi-edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<Vec<u32>>,
}

impl SimpleGraph {
    /// Duplicate edges are merged; self-loops are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::Index { index: v, len: n });
                }
            }
            if a == b {
                return domain(format!("self-loop at vertex {a}"));
            }
            adj[a].push(b as u32);
            adj[b].push(a as u32);
        }
        for l in &mut adj {
            l.sort_unstable();
            l.dedup();
        }
        Ok(Self { adj })
    }

    pub fn from_triangulation<T: Real>(t: &Triangulation<T>) -> Self {
        let adj = (0..t.num_vertices())
            .map(|v| {
                let mut l = t.neighbors(v).to_vec();
                l.sort_unstable();
                l
            })
            .collect();
        Self { adj }
    }

    /// `K_{a,b}` with the first `a` vertices on one side.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges = (0..a).flat_map(|i| (a..a + b).map(move |j| (i, j)));
        Self::from_edges(a + b, edges).expect("valid bipartite edges")
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&(b as u32)).is_ok()
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        self.adj[a].retain(|&x| x as usize != b);
        self.adj[b].retain(|&x| x as usize != a);
    }

    fn check(&self, v: usize) -> Result<()> {
        if v >= self.n() {
            return Err(Error::Index {
                index: v,
                len: self.n(),
            });
        }
        Ok(())
    }
}

/// Vertices adjacent to every member of `s`, excluding `s` itself.
pub fn common_neighbors(g: &SimpleGraph, s: &[usize]) -> Result<Vec<usize>> {
    let Some(&first) = s.first() else {
        return domain("vertex set must be nonempty");
    };
    for &v in s {
        g.check(v)?;
    }
    Ok(g.neighbors(first)
        .iter()
        .map(|&x| x as usize)
        .filter(|x| !s.contains(x) && s[1..].iter().all(|&v| g.has_edge(v, *x)))
        .collect())
}

/// A triple with three or more common outside neighbors; together they span
/// a `K_{3,3}` subgraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleWitness {
    pub triple: [usize; 3],
    pub common: Vec<usize>,
}

/// Checks that no three vertices share more than two common neighbors
/// outside the triple. Returns a witness on failure.
pub fn check_triple_bound(g: &SimpleGraph) -> Option<TripleWitness> {
    let mut paths: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    let mut tally: BTreeMap<u32, u32> = BTreeMap::new();
    for a in 0..g.n() {
        paths.clear();
        for &x in g.neighbors(a) {
            for &b in g.neighbors(x as usize) {
                if (b as usize) > a {
                    paths.entry(b).or_default().push(x);
                }
            }
        }
        for (&b, common) in &paths {
            if common.len() < 3 {
                continue;
            }
            tally.clear();
            for &x in common {
                for &s in g.neighbors(x as usize) {
                    if s as usize == a || s == b {
                        continue;
                    }
                    let c = tally.entry(s).or_insert(0);
                    *c += 1;
                    if *c >= 3 {
                        let triple = [a, b as usize, s as usize];
                        let shared = common_neighbors(g, &triple).expect("valid triple");
                        return Some(TripleWitness {
                            triple,
                            common: shared,
                        });
                    }
                }
            }
        }
    }
    None
}

/// True iff some pair of the five vertices has at most 20 common neighbors
/// outside the set.
pub fn check_five_bound(g: &SimpleGraph, s: &[usize]) -> Result<bool> {
    if s.len() != 5 {
        return domain(format!("expected five vertices, got {}", s.len()));
    }
    for &v in s {
        g.check(v)?;
    }
    for i in 0..5 {
        if s[i + 1..].contains(&s[i]) {
            return domain(format!("vertex {} repeated", s[i]));
        }
    }
    for i in 0..5 {
        for j in i + 1..5 {
            let shared = g
                .neighbors(s[i])
                .iter()
                .filter(|&&x| !s.contains(&(x as usize)) && g.has_edge(s[j], x as usize))
                .count();
            if shared <= 20 {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Finite probability space: weighted outcomes and, per outcome, which
/// events occur.
#[derive(Debug, Clone, PartialEq)]
pub struct EventMatrix {
    weights: Vec<f64>,
    rows: Vec<Vec<bool>>,
    events: usize,
}

impl EventMatrix {
    pub fn new(weights: Vec<f64>, rows: Vec<Vec<bool>>) -> Result<Self> {
        if weights.len() != rows.len() {
            return domain("one weight per outcome required");
        }
        let events = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != events) {
            return domain("ragged event matrix");
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return domain("weights must be nonnegative");
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return domain(format!("weights sum to {total}, not 1"));
        }
        Ok(Self {
            weights,
            rows,
            events,
        })
    }

    pub fn uniform(rows: Vec<Vec<bool>>) -> Result<Self> {
        let n = rows.len();
        Self::new(vec![1.0 / n as f64; n], rows)
    }

    pub fn num_events(&self) -> usize {
        self.events
    }

    /// Largest number of events sharing one outcome of positive weight.
    pub fn max_multiplicity(&self) -> usize {
        self.rows
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(r, _)| r.iter().filter(|&&b| b).count())
            .max()
            .unwrap_or(0)
    }

    pub fn prob_union(&self) -> f64 {
        self.rows
            .iter()
            .zip(&self.weights)
            .filter(|(r, _)| r.iter().any(|&b| b))
            .map(|(_, w)| w)
            .sum()
    }

    pub fn prob_sum(&self) -> f64 {
        self.rows
            .iter()
            .zip(&self.weights)
            .map(|(r, w)| w * r.iter().filter(|&&b| b).count() as f64)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnionBoundReport {
    pub k: usize,
    pub max_multiplicity: usize,
    pub precondition: bool,
    /// `P(∪ B_i)`.
    pub lhs: f64,
    /// `(1/k) Σ P(B_i)`.
    pub rhs: f64,
}

impl UnionBoundReport {
    pub fn holds(&self) -> bool {
        self.precondition && self.lhs >= self.rhs - 1e-12
    }
}

/// Compares `P(∪ B_i)` with `(1/k) Σ P(B_i)` when no outcome lies in more
/// than `k` events.
pub fn union_bound_check(m: &EventMatrix, k: usize) -> Result<UnionBoundReport> {
    if k == 0 {
        return domain("k must be at least 1");
    }
    let mult = m.max_multiplicity();
    Ok(UnionBoundReport {
        k,
        max_multiplicity: mult,
        precondition: mult <= k,
        lhs: m.prob_union(),
        rhs: m.prob_sum() / k as f64,
    })
}
