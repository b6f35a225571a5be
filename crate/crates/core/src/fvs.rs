//! Feedback vertex set machinery.
//!
//! The three classic reduction rules are expressed as one-commit engine
//! passes, each equal to the exhaustive fixpoint of its sequential
//! single-step form:
//!
//! * Loop Rule: delete every vertex with a self-loop, decrement k per vertex.
//! * Leaf Rule: delete every vertex in an attached tree (and whole tree
//!   components) — the peel-to-the-2-core fixpoint in one commit.
//! * Chain Rule: collapse every maximal path of loop-free degree-2 vertices
//!   to a single edge between its anchors (self-loop when the anchors
//!   coincide); a component that is a bare cycle collapses to its
//!   smallest-id member carrying a self-loop. Self-loops are never
//!   contracted.
//!
//! On top of the rules sit the layered branching solver, the alternation
//! necklace generator, and the desk-scale Flower Rule oracle with its
//! matching reduction.

use crate::engine::{run_pass_once, Change, PassSpec, RoundStats};
use crate::graph::{Instance, MultiGraph, VertexId, VertexSet};
use crate::{Error, Result};
use std::collections::{BTreeMap, HashMap, HashSet};

fn is_chain_vertex(g: &MultiGraph, v: VertexId) -> bool {
    g.is_alive(v) && g.degree(v) == 2 && g.loops_at(v) == 0
}

/// The two edge-endpoints of a degree-2 loop-free vertex (may coincide when
/// it has a double edge).
fn chain_endpoints(g: &MultiGraph, v: VertexId) -> (VertexId, VertexId) {
    let mut ends = [0 as VertexId; 2];
    let mut i = 0;
    for (u, m) in g.neighbors(v) {
        for _ in 0..m {
            ends[i] = u;
            i += 1;
        }
    }
    debug_assert_eq!(i, 2);
    (ends[0], ends[1])
}

pub fn loop_rule_pass_spec() -> PassSpec {
    PassSpec::per_item("loop", |inst, v| {
        if inst.graph.loops_at(v) > 0 {
            vec![Change::DeleteVertex(v), Change::DecrementK(1)]
        } else {
            vec![]
        }
    })
}

/// Vertices removed by exhaustively peeling degree <= 1: exactly the
/// attached trees plus whole tree components.
fn peel_set(g: &MultiGraph) -> HashSet<VertexId> {
    let mut degree: BTreeMap<VertexId, i64> =
        g.vertices().map(|v| (v, g.degree(v) as i64)).collect();
    let mut removed: HashSet<VertexId> = HashSet::new();
    let mut queue: Vec<VertexId> = degree
        .iter()
        .filter(|(_, &d)| d <= 1)
        .map(|(&v, _)| v)
        .collect();
    while let Some(v) = queue.pop() {
        if !removed.insert(v) {
            continue;
        }
        for (u, m) in g.neighbors(v) {
            if u == v || removed.contains(&u) {
                continue;
            }
            let d = degree.get_mut(&u).unwrap();
            *d -= m as i64;
            if *d <= 1 {
                queue.push(u);
            }
        }
    }
    removed
}

pub fn leaf_rule_pass_spec() -> PassSpec {
    PassSpec::new("leaf", |inst| {
        let removable = peel_set(&inst.graph);
        Box::new(move |_inst, v| {
            if removable.contains(&v) {
                vec![Change::DeleteVertex(v)]
            } else {
                vec![]
            }
        })
    })
}

#[derive(Debug, Clone)]
enum ChainVerdict {
    Delete,
    DeleteAndBridge(VertexId, VertexId),
    SelfLoop,
}

enum WalkEnd {
    Anchor(VertexId),
    Wrapped,
}

fn walk_chain(
    g: &MultiGraph,
    start: VertexId,
    first: VertexId,
) -> (Vec<VertexId>, WalkEnd) {
    let mut seq = Vec::new();
    let mut prev = start;
    let mut cur = first;
    loop {
        if cur == start {
            return (seq, WalkEnd::Wrapped);
        }
        if !is_chain_vertex(g, cur) {
            return (seq, WalkEnd::Anchor(cur));
        }
        seq.push(cur);
        let (a, b) = chain_endpoints(g, cur);
        let next = if a == prev { b } else { a };
        prev = cur;
        cur = next;
    }
}

/// One-commit verdicts for the exhaustive Chain Rule, computed by tracing
/// each maximal chain path once.
fn chain_verdicts(g: &MultiGraph) -> HashMap<VertexId, ChainVerdict> {
    let mut verdicts = HashMap::new();
    let mut visited: HashSet<VertexId> = HashSet::new();
    for v in g.vertices() {
        if visited.contains(&v) || !is_chain_vertex(g, v) {
            continue;
        }
        let (e0, e1) = chain_endpoints(g, v);
        let (seq_a, end_a) = walk_chain(g, v, e0);
        let mut members = vec![v];
        members.extend(&seq_a);
        match end_a {
            WalkEnd::Wrapped => {
                // bare cycle component: collapse to the smallest member
                let survivor = *members.iter().min().unwrap();
                for &w in &members {
                    visited.insert(w);
                    if w == survivor {
                        verdicts.insert(w, ChainVerdict::SelfLoop);
                    } else {
                        verdicts.insert(w, ChainVerdict::Delete);
                    }
                }
            }
            WalkEnd::Anchor(anchor_a) => {
                let (seq_b, end_b) = walk_chain(g, v, e1);
                let anchor_b = match end_b {
                    WalkEnd::Anchor(u) => u,
                    WalkEnd::Wrapped => unreachable!("one anchored end implies two"),
                };
                members.extend(&seq_b);
                let rep = *members.iter().min().unwrap();
                for &w in &members {
                    visited.insert(w);
                    if w == rep {
                        verdicts.insert(w, ChainVerdict::DeleteAndBridge(anchor_a, anchor_b));
                    } else {
                        verdicts.insert(w, ChainVerdict::Delete);
                    }
                }
            }
        }
    }
    verdicts
}

pub fn chain_rule_pass_spec() -> PassSpec {
    PassSpec::new("chain", |inst| {
        let verdicts = chain_verdicts(&inst.graph);
        Box::new(move |_inst, v| match verdicts.get(&v) {
            None => vec![],
            Some(ChainVerdict::Delete) => vec![Change::DeleteVertex(v)],
            Some(ChainVerdict::DeleteAndBridge(a, b)) => {
                vec![Change::DeleteVertex(v), Change::AddEdge(*a, *b)]
            }
            Some(ChainVerdict::SelfLoop) => vec![Change::AddEdge(v, v)],
        })
    })
}

/// Deletes all self-loop vertices in one commit, decrementing k by their
/// count. k may go negative; callers test.
pub fn loop_rule_pass(inst: &Instance) -> Result<Instance> {
    let mut stats = RoundStats::default();
    let (out, _) = run_pass_once(inst, &loop_rule_pass_spec(), &mut stats)?;
    Ok(out)
}

/// Removes every vertex lying in an attached tree, plus whole tree
/// components, in one commit.
pub fn leaf_rule_exhaustive(inst: &Instance) -> Result<Instance> {
    let mut stats = RoundStats::default();
    let (out, _) = run_pass_once(inst, &leaf_rule_pass_spec(), &mut stats)?;
    Ok(out)
}

/// Collapses all maximal degree-2 chains in one commit.
pub fn chain_rule_exhaustive(inst: &Instance) -> Result<Instance> {
    let mut stats = RoundStats::default();
    let (out, _) = run_pass_once(inst, &chain_rule_pass_spec(), &mut stats)?;
    Ok(out)
}

fn smallest_parallel_edge(g: &MultiGraph) -> Option<(VertexId, VertexId)> {
    g.vertices().find_map(|v| {
        g.neighbors(v)
            .find(|&(u, m)| u > v && m >= 2)
            .map(|(u, _)| (v, u))
    })
}

/// The `count` highest-degree vertices, ties broken toward smaller ids.
fn highest_degree_vertices(g: &MultiGraph, count: usize) -> Vec<VertexId> {
    let mut verts: Vec<VertexId> = g.vertices().collect();
    verts.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    verts.truncate(count);
    verts
}

struct FvsSearch {
    stats: RoundStats,
    max_layer: u64,
}

impl FvsSearch {
    fn layer(&mut self, inst: &Instance, depth: u64) -> Result<Option<Vec<VertexId>>> {
        self.max_layer = self.max_layer.max(depth);
        if inst.k < 0 {
            return Ok(None);
        }
        if inst.graph.is_forest() {
            return Ok(Some(Vec::new()));
        }

        let (after_leaf, _) =
            run_pass_once(inst, &leaf_rule_pass_spec(), &mut self.stats)?;
        let (after_chain, _) =
            run_pass_once(&after_leaf, &chain_rule_pass_spec(), &mut self.stats)?;

        let loop_vertices: Vec<VertexId> = after_chain
            .graph
            .vertices()
            .filter(|&v| after_chain.graph.loops_at(v) > 0)
            .collect();
        let (after_loop, committed) =
            run_pass_once(&after_chain, &loop_rule_pass_spec(), &mut self.stats)?;

        if committed.changed {
            return Ok(self.layer(&after_loop, depth + 1)?.map(|mut cert| {
                cert.extend(&loop_vertices);
                cert
            }));
        }

        let branch_set: Vec<VertexId> =
            if let Some((u, v)) = smallest_parallel_edge(&after_loop.graph) {
                vec![u, v]
            } else {
                // simple graph with minimum degree >= 3: a size-k feedback
                // vertex set must meet the 3k highest-degree vertices
                highest_degree_vertices(&after_loop.graph, (3 * after_loop.k.max(0)) as usize)
            };

        for pick in branch_set {
            let child = Instance::new(after_loop.graph.apply(&[pick], &[]), after_loop.k - 1);
            if let Some(mut cert) = self.layer(&child, depth + 1)? {
                cert.push(pick);
                return Ok(Some(cert));
            }
        }
        Ok(None)
    }
}

/// Layered branch-and-reduce FVS decision. Yes-answers carry a feedback
/// vertex set verified against the original instance; the returned stats
/// count layers as rounds (at most k + 1).
pub fn fvs_solve(inst: &Instance) -> Result<(Option<VertexSet>, RoundStats)> {
    if inst.k < 0 {
        return Err(Error::Input("parameter k must be non-negative".into()));
    }
    let mut search = FvsSearch {
        stats: RoundStats::default(),
        max_layer: 0,
    };
    let result = search.layer(inst, 1)?;
    let mut stats = RoundStats::default();
    stats.work = search.stats.work;
    stats.per_rule = search.stats.per_rule;
    stats.rounds = search.max_layer;

    match result {
        None => Ok((None, stats)),
        Some(cert) => {
            let cert = VertexSet::from_iter(cert);
            if cert.len() as i64 > inst.k {
                return Err(Error::ContractViolation(format!(
                    "feedback set of size {} exceeds k = {}",
                    cert.len(),
                    inst.k
                )));
            }
            let keep: VertexSet = inst
                .graph
                .vertices()
                .filter(|&v| !cert.contains(v))
                .collect();
            if !inst.graph.induced_subgraph(&keep)?.is_forest() {
                return Err(Error::ContractViolation(
                    "fvs certificate does not leave a forest".into(),
                ));
            }
            Ok((Some(cert), stats))
        }
    }
}

/// Alternation-depth family: a chain of k pendant triangles where triangle
/// i's corners are tethered to anchor i-1, so each triangle can collapse only
/// after the previous anchor was removed by the Loop Rule. Alternating
/// exhaustive Chain/Loop execution needs exactly k Loop commits.
pub fn gen_necklace(k: i64) -> Result<Instance> {
    if k < 1 {
        return Err(Error::Input("necklace needs k >= 1".into()));
    }
    let k = k as u32;
    let mut edges = Vec::new();
    for i in 0..k {
        let (a, u, v) = (3 * i, 3 * i + 1, 3 * i + 2);
        edges.push((a, u));
        edges.push((a, v));
        edges.push((u, v));
        if i > 0 {
            let prev_anchor = 3 * (i - 1);
            edges.push((u, prev_anchor));
            edges.push((v, prev_anchor));
        }
    }
    Ok(Instance::new(
        MultiGraph::build(3 * k as usize, &edges)?,
        k as i64,
    ))
}

const FLOWER_LIMIT: usize = 14;

/// All simple cycles through `v`, as bitmasks of their members other than
/// `v` over `order`; self-loops at `v` are counted separately by the caller.
fn petal_masks(g: &MultiGraph, v: VertexId, order: &[VertexId]) -> Vec<u32> {
    let index: HashMap<VertexId, usize> =
        order.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let mut petals: HashSet<u32> = HashSet::new();

    // 2-cycles via parallel edges
    for (u, m) in g.neighbors(v) {
        if u != v && m >= 2 {
            petals.insert(1 << index[&u]);
        }
    }

    // longer cycles: simple paths in G - v between two neighbors of v,
    // enumerated from their smaller endpoint
    let nbrs: Vec<VertexId> = g.distinct_neighbors(v).collect();
    fn dfs(
        g: &MultiGraph,
        v: VertexId,
        start: VertexId,
        cur: VertexId,
        mask: u32,
        index: &HashMap<VertexId, usize>,
        nbrs: &[VertexId],
        petals: &mut HashSet<u32>,
    ) {
        for u in g.distinct_neighbors(cur) {
            if u == v || mask & (1 << index[&u]) != 0 {
                continue;
            }
            let next_mask = mask | (1 << index[&u]);
            if u > start && nbrs.contains(&u) {
                petals.insert(next_mask);
            }
            dfs(g, v, start, u, next_mask, index, nbrs, petals);
        }
    }
    for &a in &nbrs {
        dfs(g, v, a, a, 1 << index[&a], &index, &nbrs, &mut petals);
    }

    let mut out: Vec<u32> = petals.into_iter().collect();
    out.sort_by_key(|m| (m.count_ones(), *m));
    out
}

/// Desk-scale oracle for the Flower Rule: true iff more than `k` cycles
/// pairwise share only the vertex `v`, by exhaustive search over disjoint
/// cycle packings through `v`.
pub fn flower_applicable_brute(g: &MultiGraph, v: VertexId, k: i64) -> Result<bool> {
    if g.vertex_count() > FLOWER_LIMIT {
        return Err(Error::OracleRefused {
            oracle: "flower",
            limit: FLOWER_LIMIT,
            actual: g.vertex_count(),
        });
    }
    if !g.is_alive(v) {
        return Err(Error::Input(format!("vertex {v} is not in the graph")));
    }
    let mut needed = k + 1 - g.loops_at(v) as i64;
    if needed <= 0 {
        return Ok(true);
    }
    let order: Vec<VertexId> = g.vertices().filter(|&u| u != v).collect();
    let petals = petal_masks(g, v, &order);

    fn pack(
        petals: &[u32],
        needed: u32,
        avail: u32,
        failures: &mut HashSet<(u32, u32)>,
    ) -> bool {
        if needed == 0 {
            return true;
        }
        if failures.contains(&(needed, avail)) {
            return false;
        }
        for &p in petals {
            if p & !avail == 0 && pack(petals, needed - 1, avail & !p, failures) {
                return true;
            }
        }
        failures.insert((needed, avail));
        false
    }

    needed = needed.min(i64::from(u32::MAX));
    let avail: u32 = if order.is_empty() {
        0
    } else {
        (1u32 << order.len()) - 1
    };
    Ok(pack(&petals, needed as u32, avail, &mut HashSet::new()))
}

/// The matching reduction: add a vertex s adjacent to everything and ask
/// whether the Flower Rule applies to s with budget k - 1. Equivalent to "g
/// has a matching of size k".
pub fn matching_via_flower(g: &MultiGraph, k: i64) -> Result<bool> {
    let s = g.slot_count() as VertexId;
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    for v in g.vertices() {
        for (u, m) in g.neighbors(v) {
            if u >= v {
                for _ in 0..m {
                    edges.push((v, u));
                }
            }
        }
        edges.push((v, s));
    }
    let mut with_s = MultiGraph::build(g.slot_count() + 1, &edges)?;
    // dead slots in g must stay dead in the copy
    let keep: VertexSet = g.vertices().chain([s]).collect();
    with_s = with_s.induced_subgraph(&keep)?;
    flower_applicable_brute(&with_s, s, k - 1)
}

/// Sequential single-step reference implementations of the three rules.
///
/// These are the differential oracles for the one-commit passes above: each
/// applies one textbook rule step at a time, scanning in ascending id order,
/// until no step applies. They share no logic with the pass implementations.
pub mod reference {
    use super::*;

    pub fn loop_fixpoint(inst: &Instance) -> Instance {
        let mut cur = inst.clone();
        loop {
            let Some(v) = cur.graph.vertices().find(|&v| cur.graph.loops_at(v) > 0) else {
                return cur;
            };
            cur = Instance::new(cur.graph.apply(&[v], &[]), cur.k - 1);
        }
    }

    pub fn leaf_fixpoint(inst: &Instance) -> Instance {
        let mut cur = inst.clone();
        loop {
            let leaf = cur.graph.vertices().find(|&v| cur.graph.degree(v) == 1);
            let isolated = cur.graph.vertices().find(|&v| cur.graph.degree(v) == 0);
            let Some(v) = leaf.or(isolated) else {
                return cur;
            };
            cur = Instance::new(cur.graph.apply(&[v], &[]), cur.k);
        }
    }

    pub fn chain_fixpoint(inst: &Instance) -> Instance {
        let mut cur = inst.clone();
        loop {
            let Some(v) = cur.graph.vertices().find(|&v| is_chain_vertex(&cur.graph, v))
            else {
                return cur;
            };
            let (a, b) = chain_endpoints(&cur.graph, v);
            let u = a.min(b);
            let w = a.max(b);
            let g = &cur.graph;
            let next = if u == w {
                // both edges lead to u: contraction leaves a self-loop there
                g.apply(&[v], &[(u, u)])
            } else if !is_chain_vertex(g, u) {
                // contract v into the anchor u
                g.apply(&[v], &[(u, w)])
            } else if u < v {
                g.apply(&[v], &[(u, w)])
            } else {
                // v survives the merge with the larger chain neighbor u:
                // u's other edge re-attaches to v
                let (ua, ub) = chain_endpoints(g, u);
                let other = if ua == v { ub } else { ua };
                g.apply(&[u], &[(v, other)])
            };
            cur = Instance::new(next, cur.k);
        }
    }
}
