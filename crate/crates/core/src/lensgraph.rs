//! The two graph families attached to a parameter vector `(r; m_1, ..., m_n)`
//! and a brute-force legal-path counter used as an oracle for the DP in
//! [`crate::pathmatrix`].
//!
//! Vertices are addressed as `(s, t)` with `1 <= s <= n` (the subgraph) and
//! `0 <= t < r`.
//!
//! A path from `(i, 0)` to `(j, 0)` is legal when it visits at least one
//! non-0 vertex and, from the first time it stands on a 0-vertex after the
//! start, it only visits 0-vertices. In the M graph this is the same as
//! "no intermediate vertex is a 0-vertex".

use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::{gcd, mod_inverse, reduce};

/// Default cap on the number of path prefixes the brute-force counter visits.
pub const DEFAULT_PATH_BUDGET: u64 = 100_000_000;

/// The pair `(r, m)` with every `m_i` a unit of `Z/rZ` stored in `[1, r-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LensParams {
    r: u64,
    m: Vec<u64>,
}

impl LensParams {
    pub fn new(r: u64, m: Vec<u64>) -> Result<Self> {
        if r <= 2 {
            return Err(Error::InvalidParams(format!("r must exceed 2, got {r}")));
        }
        if m.is_empty() {
            return Err(Error::InvalidParams(
                "m must have at least one entry".into(),
            ));
        }
        for (idx, &v) in m.iter().enumerate() {
            if v == 0 || v >= r || gcd(v, r) != 1 {
                return Err(Error::NonUnitEntry {
                    index: idx + 1,
                    value: v as i64,
                    r,
                });
            }
        }
        Ok(LensParams { r, m })
    }

    /// Accepts arbitrary integers and reduces them modulo `r` first.
    pub fn from_signed(r: u64, m: &[i64]) -> Result<Self> {
        if r <= 2 {
            return Err(Error::InvalidParams(format!("r must exceed 2, got {r}")));
        }
        let reduced = m.iter().map(|&v| reduce(v, r)).collect::<Vec<_>>();
        for (idx, (&raw, &v)) in m.iter().zip(&reduced).enumerate() {
            if v == 0 || gcd(v, r) != 1 {
                return Err(Error::NonUnitEntry {
                    index: idx + 1,
                    value: raw,
                    r,
                });
            }
        }
        Self::new(r, reduced)
    }

    /// The all-ones vector of length `n`.
    pub fn ones(r: u64, n: usize) -> Result<Self> {
        Self::new(r, vec![1; n])
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn n(&self) -> usize {
        self.m.len()
    }

    pub fn m(&self) -> &[u64] {
        &self.m
    }

    /// `m_index` with 1-based indexing.
    pub fn entry(&self, index: usize) -> u64 {
        self.m[index - 1]
    }

    /// `[b * m]_r` entrywise; `b` must be a unit.
    pub fn scale(&self, b: u64) -> Result<Self> {
        if gcd(b % self.r, self.r) != 1 {
            return Err(Error::NonUnit {
                a: b as i64,
                modulus: self.r,
            });
        }
        let m = self
            .m
            .iter()
            .map(|&v| ((v as u128 * b as u128) % self.r as u128) as u64)
            .collect();
        Self::new(self.r, m)
    }

    /// Replace `m_index` (1-based).
    pub fn with_entry(&self, index: usize, value: u64) -> Result<Self> {
        let mut m = self.m.clone();
        m[index - 1] = value;
        Self::new(self.r, m)
    }

    /// The parameters restricted to `m_from, ..., m_to` (1-based, inclusive).
    pub fn window(&self, from: usize, to: usize) -> Result<Self> {
        if from == 0 || from > to || to > self.n() {
            return Err(Error::IndexOutOfRange(format!(
                "window [{from}, {to}] of a length-{} vector",
                self.n()
            )));
        }
        Self::new(self.r, self.m[from - 1..to].to_vec())
    }

    pub fn inverse_of(&self, index: usize) -> u64 {
        mod_inverse(self.entry(index) as i64, self.r).expect("entries are units")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphKind {
    M,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub s: usize,
    pub t: u64,
}

#[derive(Debug, Clone)]
pub struct LensGraph {
    kind: GraphKind,
    r: u64,
    n: usize,
    adjacency: Vec<Vec<Vertex>>,
}

impl LensGraph {
    pub fn build(params: &LensParams, kind: GraphKind) -> Self {
        let (r, n) = (params.r(), params.n());
        let mut adjacency = Vec::with_capacity(n * r as usize);
        for s in 1..=n {
            let step = params.entry(s);
            for t in 0..r {
                let next = (t + step) % r;
                let outs = match kind {
                    GraphKind::M => (s..=n).map(|s2| Vertex { s: s2, t: next }).collect(),
                    GraphKind::N => {
                        let mut v = vec![Vertex { s, t: next }];
                        if s < n {
                            v.push(Vertex { s: s + 1, t });
                        }
                        v
                    }
                };
                adjacency.push(outs);
            }
        }
        LensGraph {
            kind,
            r,
            n,
            adjacency,
        }
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn out_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[(v.s - 1) * self.r as usize + v.t as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    /// Graphviz rendering with vertex labels `"s:t"`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        for s in 1..=self.n {
            for t in 0..self.r {
                let from = Vertex { s, t };
                for to in self.out_neighbors(from) {
                    writeln!(out, "  \"{}:{}\" -> \"{}:{}\";", s, t, to.s, to.t).unwrap();
                }
            }
        }
        out.push_str("}\n");
        out
    }

    /// Number of legal paths from `(i, 0)` to `(j, 0)` by exhaustive search.
    pub fn count_legal_paths(&self, i: usize, j: usize) -> Result<BigInt> {
        self.count_legal_paths_with_budget(i, j, DEFAULT_PATH_BUDGET)
    }

    pub fn count_legal_paths_with_budget(&self, i: usize, j: usize, budget: u64) -> Result<BigInt> {
        if i == 0 || i > j || j > self.n {
            return Err(Error::IndexOutOfRange(format!(
                "pair ({i}, {j}) for n = {}",
                self.n
            )));
        }
        // (vertex, seen a non-0 vertex, locked into 0-vertices, is the start)
        let mut stack = vec![(Vertex { s: i, t: 0 }, false, false, true)];
        let mut visited = 0u64;
        let mut count = 0u64;
        while let Some((v, seen, locked, start)) = stack.pop() {
            visited += 1;
            if visited > budget {
                return Err(Error::TooLarge(budget));
            }
            let on_zero = !start && v.t == 0;
            if on_zero && v.s == j && seen {
                count += 1;
            }
            if self.kind == GraphKind::M && on_zero {
                continue;
            }
            let locked = locked || on_zero;
            for &w in self.out_neighbors(v) {
                if w.s > j || (locked && w.t != 0) {
                    continue;
                }
                stack.push((w, seen || w.t != 0, locked, false));
            }
        }
        Ok(BigInt::from(count))
    }
}

/// Brute-force legal-path count on the given graph family.
pub fn enumerate_legal_paths(graph: &LensGraph, i: usize, j: usize) -> Result<BigInt> {
    graph.count_legal_paths(i, j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(r: u64, m: &[u64]) -> LensParams {
        LensParams::new(r, m.to_vec()).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(LensParams::new(2, vec![1]).is_err());
        assert!(LensParams::new(5, vec![]).is_err());
        assert_eq!(
            LensParams::new(4, vec![1, 2, 1]),
            Err(Error::NonUnitEntry {
                index: 2,
                value: 2,
                r: 4
            })
        );
        assert_eq!(
            LensParams::from_signed(6, &[1, 1, -1, 1, 1, 1])
                .unwrap()
                .m(),
            &[1, 1, 5, 1, 1, 1]
        );
        assert!(LensParams::from_signed(6, &[1, -3]).is_err());
        assert_eq!(params(5, &[2, 4]).scale(3).unwrap().m(), &[1, 2]);
    }

    #[test]
    fn figure_graphs() {
        let p = params(5, &[1, 2, 1]);
        let n = LensGraph::build(&p, GraphKind::N);
        assert_eq!(n.vertex_count(), 15);
        assert_eq!(n.edge_count(), 5 * 2 + 5 * 2 + 5);
        // second subgraph steps by 2
        assert_eq!(
            n.out_neighbors(Vertex { s: 2, t: 4 }),
            &[Vertex { s: 2, t: 1 }, Vertex { s: 3, t: 4 }]
        );
        let m = LensGraph::build(&p, GraphKind::M);
        assert_eq!(m.vertex_count(), 15);
        for s in 1..=3 {
            for t in 0..5 {
                assert_eq!(m.out_neighbors(Vertex { s, t }).len(), 3 - s + 1);
            }
        }
        assert_eq!(
            m.out_neighbors(Vertex { s: 1, t: 0 }),
            &[
                Vertex { s: 1, t: 1 },
                Vertex { s: 2, t: 1 },
                Vertex { s: 3, t: 1 }
            ]
        );
    }

    #[test]
    fn single_subgraph_is_a_cycle() {
        let g = LensGraph::build(&params(3, &[1]), GraphKind::N);
        assert_eq!(g.vertex_count(), 3);
        for t in 0..3 {
            assert_eq!(
                g.out_neighbors(Vertex { s: 1, t }),
                &[Vertex {
                    s: 1,
                    t: (t + 1) % 3
                }]
            );
        }
        assert!(g.to_dot().contains("\"1:2\" -> \"1:0\""));
    }

    #[test]
    fn small_counts() {
        let g = LensGraph::build(&params(5, &[1, 2, 1]), GraphKind::N);
        assert_eq!(g.count_legal_paths(1, 1).unwrap(), BigInt::from(1));
        assert_eq!(g.count_legal_paths(1, 2).unwrap(), BigInt::from(5));
        assert_eq!(g.count_legal_paths(1, 3).unwrap(), BigInt::from(15));
        for kind in [GraphKind::M, GraphKind::N] {
            let g = LensGraph::build(&params(3, &[1, 2, 1, 1]), kind);
            assert_eq!(g.count_legal_paths(1, 4).unwrap(), BigInt::from(11));
            let g = LensGraph::build(&params(3, &[1, 1, 1, 1]), kind);
            assert_eq!(g.count_legal_paths(1, 4).unwrap(), BigInt::from(10));
        }
    }

    #[test]
    fn budget_and_range_errors() {
        let g = LensGraph::build(&params(7, &[1, 3, 2, 1]), GraphKind::N);
        assert_eq!(
            g.count_legal_paths_with_budget(1, 4, 10),
            Err(Error::TooLarge(10))
        );
        assert!(matches!(
            g.count_legal_paths(3, 2),
            Err(Error::IndexOutOfRange(_))
        ));
        assert!(matches!(
            g.count_legal_paths(1, 5),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn m_and_n_agree() {
        for r in 3..=6u64 {
            let us = crate::numtheory::units(r);
            for &a in &us {
                for &b in &us {
                    let p = params(r, &[1, a, b, 1]);
                    let gm = LensGraph::build(&p, GraphKind::M);
                    let gn = LensGraph::build(&p, GraphKind::N);
                    for i in 1..=4 {
                        for j in i..=4 {
                            assert_eq!(gm.count_legal_paths(i, j), gn.count_legal_paths(i, j));
                        }
                    }
                }
            }
        }
    }
}
