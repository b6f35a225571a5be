//! Undirected multigraph snapshots with stable vertex identifiers.
//!
//! Vertices are dense integer ids. Deleting a vertex leaves a tombstone
//! instead of renumbering, so marks and traces stay valid across rounds and
//! "lexicographically smallest" always means smallest id. Parallel edges are
//! stored as multiplicity counters; a self-loop contributes two to the degree
//! and a parallel edge of multiplicity m contributes m.

use crate::{Error, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub type VertexId = u32;

/// Sorted, duplicate-free set of vertex ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
pub struct VertexSet(Vec<VertexId>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    pub fn from_iter<I: IntoIterator<Item = VertexId>>(iter: I) -> Self {
        let mut v: Vec<VertexId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn insert(&mut self, v: VertexId) {
        if let Err(pos) = self.0.binary_search(&v) {
            self.0.insert(pos, v);
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.0
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet::from_iter(self.iter().chain(other.iter()))
    }
}

impl FromIterator<VertexId> for VertexSet {
    fn from_iter<I: IntoIterator<Item = VertexId>>(iter: I) -> Self {
        VertexSet::from_iter(iter)
    }
}

/// Immutable multigraph snapshot. Mutation happens only by building a new
/// snapshot from a change set (see the engine), never in place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    /// Per-slot adjacency: neighbor id -> edge multiplicity. The entry at the
    /// vertex's own id counts self-loops (each loop once; degree adds two).
    adj: Vec<BTreeMap<VertexId, u32>>,
    alive: Vec<bool>,
    alive_count: usize,
    /// Cardinality of the edge multiset (each loop counts once).
    edge_count: usize,
}

impl MultiGraph {
    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        MultiGraph {
            adj: vec![BTreeMap::new(); n],
            alive: vec![true; n],
            alive_count: n,
            edge_count: 0,
        }
    }

    /// Builds a multigraph from an edge list. Repeated pairs create parallel
    /// edges and `(v, v)` creates a self-loop.
    pub fn build(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let mut g = MultiGraph::empty(n);
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::Input(format!(
                    "edge ({u}, {v}) has endpoint out of range for n = {n}"
                )));
            }
            g.add_edge_mut(u, v);
        }
        Ok(g)
    }

    fn add_edge_mut(&mut self, u: VertexId, v: VertexId) {
        *self.adj[u as usize].entry(v).or_insert(0) += 1;
        if u != v {
            *self.adj[v as usize].entry(u).or_insert(0) += 1;
        }
        self.edge_count += 1;
    }

    fn delete_vertex_mut(&mut self, v: VertexId) {
        debug_assert!(self.alive[v as usize]);
        let entries: Vec<(VertexId, u32)> =
            self.adj[v as usize].iter().map(|(&u, &m)| (u, m)).collect();
        for (u, m) in entries {
            self.edge_count -= m as usize;
            if u != v {
                self.adj[u as usize].remove(&v);
            }
        }
        self.adj[v as usize].clear();
        self.alive[v as usize] = false;
        self.alive_count -= 1;
    }

    pub fn slot_count(&self) -> usize {
        self.adj.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.alive_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_alive(&self, v: VertexId) -> bool {
        (v as usize) < self.alive.len() && self.alive[v as usize]
    }

    /// Alive vertices in ascending id order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.alive
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(i, _)| i as VertexId)
    }

    /// Neighbors of `v` with multiplicities; includes `v` itself when it has
    /// self-loops (multiplicity = loop count).
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, u32)> + '_ {
        self.adj[v as usize].iter().map(|(&u, &m)| (u, m))
    }

    /// Distinct neighbors other than `v` itself.
    pub fn distinct_neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj[v as usize]
            .keys()
            .copied()
            .filter(move |&u| u != v)
    }

    pub fn multiplicity(&self, u: VertexId, v: VertexId) -> u32 {
        self.adj[u as usize].get(&v).copied().unwrap_or(0)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.multiplicity(u, v) > 0
    }

    pub fn loops_at(&self, v: VertexId) -> u32 {
        self.multiplicity(v, v)
    }

    /// Degree with multigraph conventions: a self-loop contributes two, a
    /// parallel edge its multiplicity.
    pub fn degree(&self, v: VertexId) -> u32 {
        self.adj[v as usize]
            .iter()
            .map(|(&u, &m)| if u == v { 2 * m } else { m })
            .sum()
    }

    pub fn is_simple(&self) -> bool {
        self.vertices()
            .all(|v| self.neighbors(v).all(|(u, m)| u != v && m == 1))
    }

    /// Consistency check: adjacency symmetry, tombstone hygiene, edge count.
    pub fn validate(&self) -> Result<()> {
        let mut half_edges = 0usize;
        for v in 0..self.adj.len() as VertexId {
            if !self.alive[v as usize] {
                if !self.adj[v as usize].is_empty() {
                    return Err(Error::ContractViolation(format!(
                        "dead vertex {v} has adjacency entries"
                    )));
                }
                continue;
            }
            for (u, m) in self.neighbors(v) {
                if !self.is_alive(u) {
                    return Err(Error::ContractViolation(format!(
                        "edge ({v}, {u}) points at dead vertex"
                    )));
                }
                if m == 0 {
                    return Err(Error::ContractViolation(format!(
                        "zero multiplicity entry at ({v}, {u})"
                    )));
                }
                if u != v && self.multiplicity(u, v) != m {
                    return Err(Error::ContractViolation(format!(
                        "asymmetric multiplicity at ({v}, {u})"
                    )));
                }
                half_edges += if u == v { 2 * m as usize } else { m as usize };
            }
        }
        if half_edges != 2 * self.edge_count {
            return Err(Error::ContractViolation(format!(
                "edge count {} does not match adjacency sum {half_edges}",
                self.edge_count
            )));
        }
        Ok(())
    }

    /// Subgraph induced by `keep`; multiplicities preserved, original ids
    /// retained (dropped vertices become tombstones).
    pub fn induced_subgraph(&self, keep: &VertexSet) -> Result<MultiGraph> {
        for v in keep.iter() {
            if !self.is_alive(v) {
                return Err(Error::Input(format!("unknown vertex {v} in keep set")));
            }
        }
        let mut g = self.clone();
        let drop: Vec<VertexId> = self.vertices().filter(|&v| !keep.contains(v)).collect();
        for v in drop {
            g.delete_vertex_mut(v);
        }
        Ok(g)
    }

    /// Applies a batch of deletions and edge additions, returning the next
    /// snapshot. Deletions are applied first; additions must target alive,
    /// undeleted endpoints (the engine checks this before calling).
    pub(crate) fn apply(
        &self,
        deletions: &[VertexId],
        additions: &[(VertexId, VertexId)],
    ) -> MultiGraph {
        let mut g = self.clone();
        for &v in deletions {
            g.delete_vertex_mut(v);
        }
        for &(u, v) in additions {
            g.add_edge_mut(u, v);
        }
        g
    }

    /// Connected components over alive vertices (self-loops and parallel
    /// edges do not affect connectivity).
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let n = self.adj.len();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for s in self.vertices() {
            if seen[s as usize] {
                continue;
            }
            let mut comp = vec![s];
            seen[s as usize] = true;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for u in self.distinct_neighbors(v) {
                    if !seen[u as usize] {
                        seen[u as usize] = true;
                        comp.push(u);
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// True iff the graph has no cycle. Any self-loop or parallel edge is a
    /// cycle by multiplicity.
    pub fn is_forest(&self) -> bool {
        for v in self.vertices() {
            if self.loops_at(v) > 0 {
                return false;
            }
            if self.neighbors(v).any(|(u, m)| u != v && m > 1) {
                return false;
            }
        }
        self.edge_count == self.alive_count - self.components().len()
    }

    /// Canonical text form: alive vertices compacted to `0..n`, edges sorted,
    /// multiplicities expanded to repeated lines.
    pub fn to_text(&self) -> String {
        let remap: BTreeMap<VertexId, usize> =
            self.vertices().enumerate().map(|(i, v)| (v, i)).collect();
        let mut lines: Vec<(usize, usize)> = Vec::new();
        for v in self.vertices() {
            for (u, m) in self.neighbors(v) {
                if u < v {
                    continue; // emit each edge once, from its smaller endpoint
                }
                let (a, b) = (remap[&v], remap[&u]);
                for _ in 0..m {
                    lines.push((a.min(b), a.max(b)));
                }
            }
        }
        lines.sort_unstable();
        let mut out = String::new();
        writeln!(out, "p mgraph {} {}", remap.len(), lines.len()).unwrap();
        for (a, b) in lines {
            writeln!(out, "e {a} {b}").unwrap();
        }
        out
    }

    /// Parses the `p mgraph <n> <m>` text format. Repeated `e` lines are
    /// parallel edges, `e v v` is a self-loop, `c` lines are comments.
    pub fn from_text(text: &str) -> Result<MultiGraph> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = idx + 1;
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "p" => {
                    if header.is_some() {
                        return Err(Error::Parse {
                            line: lineno,
                            msg: "duplicate header".into(),
                        });
                    }
                    if toks.len() != 4 || toks[1] != "mgraph" {
                        return Err(Error::Parse {
                            line: lineno,
                            msg: "expected 'p mgraph <n> <m>'".into(),
                        });
                    }
                    let n = toks[2].parse().map_err(|_| Error::Parse {
                        line: lineno,
                        msg: "bad vertex count".into(),
                    })?;
                    let m = toks[3].parse().map_err(|_| Error::Parse {
                        line: lineno,
                        msg: "bad edge count".into(),
                    })?;
                    header = Some((n, m));
                }
                "e" => {
                    if header.is_none() {
                        return Err(Error::Parse {
                            line: lineno,
                            msg: "edge before header".into(),
                        });
                    }
                    if toks.len() != 3 {
                        return Err(Error::Parse {
                            line: lineno,
                            msg: "expected 'e <u> <v>'".into(),
                        });
                    }
                    let u = toks[1].parse().map_err(|_| Error::Parse {
                        line: lineno,
                        msg: "bad endpoint".into(),
                    })?;
                    let v = toks[2].parse().map_err(|_| Error::Parse {
                        line: lineno,
                        msg: "bad endpoint".into(),
                    })?;
                    edges.push((u, v));
                }
                _ => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("unknown line type '{}'", toks[0]),
                    });
                }
            }
        }
        let (n, m) = header.ok_or(Error::Parse {
            line: 1,
            msg: "missing 'p mgraph' header".into(),
        })?;
        if edges.len() != m {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header promises {m} edges, found {}", edges.len()),
            });
        }
        MultiGraph::build(n, &edges).map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })
    }
}

/// A parameterized instance: a graph together with the parameter k.
/// k may go negative during branching; callers test for that.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: MultiGraph,
    pub k: i64,
}

impl Instance {
    pub fn new(graph: MultiGraph, k: i64) -> Self {
        Instance { graph, k }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_p3() {
        let g = MultiGraph::build(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            (g.degree(0), g.degree(1), g.degree(2)),
            (1, 2, 1),
            "P3 degrees"
        );
        g.validate().unwrap();
    }

    #[test]
    fn self_loop_counts_two() {
        let g = MultiGraph::build(1, &[(0, 0)]).unwrap();
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn double_edge_degrees() {
        let g = MultiGraph::build(2, &[(0, 1), (0, 1)]).unwrap();
        assert_eq!((g.degree(0), g.degree(1)), (2, 2));
        assert_eq!(g.multiplicity(0, 1), 2);
    }

    #[test]
    fn endpoint_out_of_range() {
        assert!(matches!(
            MultiGraph::build(2, &[(0, 2)]),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn induced_subgraph_cases() {
        let k3 = MultiGraph::build(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let sub = k3
            .induced_subgraph(&VertexSet::from_iter([0, 1]))
            .unwrap();
        assert_eq!(sub.edge_count(), 1);
        assert!(sub.has_edge(0, 1));

        let all = k3
            .induced_subgraph(&VertexSet::from_iter([0, 1, 2]))
            .unwrap();
        assert_eq!(all, k3);

        let dbl = MultiGraph::build(2, &[(0, 1), (0, 1)]).unwrap();
        let iso = dbl.induced_subgraph(&VertexSet::from_iter([0])).unwrap();
        assert_eq!(iso.vertex_count(), 1);
        assert_eq!(iso.degree(0), 0);

        assert!(k3
            .induced_subgraph(&VertexSet::from_iter([0, 7]))
            .is_err());
    }

    #[test]
    fn forest_detection() {
        let p3 = MultiGraph::build(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(p3.is_forest());
        let k3 = MultiGraph::build(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(!k3.is_forest());
        // double edge is a 2-cycle by multiplicity
        let dbl = MultiGraph::build(2, &[(0, 1), (0, 1)]).unwrap();
        assert!(!dbl.is_forest());
        let loopy = MultiGraph::build(1, &[(0, 0)]).unwrap();
        assert!(!loopy.is_forest());
    }

    #[test]
    fn text_roundtrip() {
        let g = MultiGraph::build(4, &[(0, 1), (0, 1), (2, 2), (1, 3)]).unwrap();
        let text = g.to_text();
        let g2 = MultiGraph::from_text(&text).unwrap();
        assert_eq!(g, g2);
        assert_eq!(g2.to_text(), text, "canonical form is stable");
    }

    #[test]
    fn text_parse_errors_are_positioned() {
        let err = MultiGraph::from_text("p mgraph 2 1\nx 0 1\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn degree_sum_is_twice_edges() {
        // exercised more broadly by proptest in the engine tests
        let g = MultiGraph::build(5, &[(0, 0), (0, 1), (1, 2), (1, 2), (3, 4)]).unwrap();
        let sum: u32 = g.vertices().map(|v| g.degree(v)).sum();
        assert_eq!(sum as usize, 2 * g.edge_count());
    }
}
