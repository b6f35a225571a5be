//! Bipartite matching, König cover extraction, and the LPVC relaxation.
//!
//! The linear relaxation of vertex cover is solved exactly and without any
//! floating point: build the bipartite double cover, compute a maximum
//! matching phase by phase, extract a minimum vertex cover via König's
//! theorem, and read off a half-integral assignment from how many copies of
//! each vertex the cover contains.

use crate::engine::RoundStats;
use crate::graph::{MultiGraph, VertexId, VertexSet};
use crate::{Error, Result};
use num_rational::Ratio;
use std::collections::BTreeMap;

/// Graph with two disjoint shores; every edge crosses sides.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    pub left: VertexSet,
    pub right: VertexSet,
    adj: BTreeMap<VertexId, Vec<VertexId>>,
    edge_count: usize,
}

impl BipartiteGraph {
    pub fn new(left: VertexSet, right: VertexSet, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        if left.iter().any(|v| right.contains(v)) {
            return Err(Error::Input("shores are not disjoint".into()));
        }
        let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for v in left.iter().chain(right.iter()) {
            adj.insert(v, Vec::new());
        }
        for &(u, v) in edges {
            if !left.contains(u) || !right.contains(v) {
                return Err(Error::Input(format!(
                    "edge ({u}, {v}) does not go from left to right"
                )));
            }
            adj.get_mut(&u).unwrap().push(v);
            adj.get_mut(&v).unwrap().push(u);
        }
        for nbrs in adj.values_mut() {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        let edge_count = adj
            .iter()
            .filter(|(v, _)| left.contains(**v))
            .map(|(_, n)| n.len())
            .sum();
        Ok(BipartiteGraph {
            left,
            right,
            adj,
            edge_count,
        })
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[&v]
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.left
            .iter()
            .flat_map(move |u| self.adj[&u].iter().map(move |&v| (u, v)))
    }
}

/// Endpoint-disjoint edge set, kept sorted by left endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching(Vec<(VertexId, VertexId)>);

impl Matching {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.0
    }

    pub fn right_mate(&self, l: VertexId) -> Option<VertexId> {
        self.0.iter().find(|&&(a, _)| a == l).map(|&(_, b)| b)
    }
}

/// Maximum-cardinality bipartite matching: repeated BFS layering plus a
/// maximal set of disjoint shortest augmenting paths. Each phase is one
/// engine round in the returned stats.
pub fn maximum_bipartite_matching(h: &BipartiteGraph) -> Matching {
    maximum_bipartite_matching_with_stats(h).0
}

pub fn maximum_bipartite_matching_with_stats(h: &BipartiteGraph) -> (Matching, RoundStats) {
    const FREE: u32 = u32::MAX;
    let lefts: Vec<VertexId> = h.left.iter().collect();
    let mut mate_l: BTreeMap<VertexId, VertexId> = BTreeMap::new(); // left -> right
    let mut mate_r: BTreeMap<VertexId, VertexId> = BTreeMap::new(); // right -> left
    let mut stats = RoundStats::default();

    loop {
        // BFS layering from free left vertices
        let mut dist: BTreeMap<VertexId, u32> = BTreeMap::new();
        let mut queue: std::collections::VecDeque<VertexId> = lefts
            .iter()
            .copied()
            .filter(|l| !mate_l.contains_key(l))
            .collect();
        for &l in &queue {
            dist.insert(l, 0);
        }
        let mut found_free_right = false;
        while let Some(l) = queue.pop_front() {
            stats.work += 1;
            for &r in h.neighbors(l) {
                match mate_r.get(&r) {
                    None => found_free_right = true,
                    Some(&l2) => {
                        if !dist.contains_key(&l2) {
                            dist.insert(l2, dist[&l] + 1);
                            queue.push_back(l2);
                        }
                    }
                }
            }
        }
        if !found_free_right {
            break;
        }

        // maximal set of disjoint shortest augmenting paths, ascending order
        fn augment(
            h: &BipartiteGraph,
            l: VertexId,
            dist: &mut BTreeMap<VertexId, u32>,
            mate_l: &mut BTreeMap<VertexId, VertexId>,
            mate_r: &mut BTreeMap<VertexId, VertexId>,
            used_r: &mut VertexSet,
        ) -> bool {
            let d = match dist.remove(&l) {
                Some(d) => d,
                None => return false,
            };
            for &r in h.neighbors(l) {
                if used_r.contains(r) {
                    continue;
                }
                match mate_r.get(&r).copied() {
                    None => {
                        used_r.insert(r);
                        mate_l.insert(l, r);
                        mate_r.insert(r, l);
                        return true;
                    }
                    Some(l2) => {
                        if dist.get(&l2) == Some(&(d + 1))
                            && augment(h, l2, dist, mate_l, mate_r, used_r)
                        {
                            used_r.insert(r);
                            mate_l.insert(l, r);
                            mate_r.insert(r, l);
                            return true;
                        }
                    }
                }
            }
            false
        }

        let mut used_r = VertexSet::new();
        let mut augmented = 0u64;
        for &l in &lefts {
            if !mate_l.contains_key(&l)
                && dist.contains_key(&l)
                && augment(h, l, &mut dist, &mut mate_l, &mut mate_r, &mut used_r)
            {
                augmented += 1;
            }
        }
        stats.rounds += 1;
        stats.work += augmented;
        stats.record_rule("matching-phase", augmented);
        if augmented == 0 {
            break;
        }
        let _ = FREE;
    }

    let edges: Vec<(VertexId, VertexId)> = mate_l.into_iter().collect();
    (Matching(edges), stats)
}

/// König cover: alternating reachability Z from the unmatched left vertices;
/// the cover is (left \ Z) ∪ (right ∩ Z). Errors if `m` was not maximum.
pub fn koenig_vertex_cover(h: &BipartiteGraph, m: &Matching) -> Result<VertexSet> {
    let mate_r: BTreeMap<VertexId, VertexId> =
        m.edges().iter().map(|&(l, r)| (r, l)).collect();
    let mate_l: BTreeMap<VertexId, VertexId> =
        m.edges().iter().map(|&(l, r)| (l, r)).collect();
    for &(l, r) in m.edges() {
        if !h.left.contains(l) || !h.neighbors(l).contains(&r) {
            return Err(Error::Input(format!("matching edge ({l}, {r}) not in graph")));
        }
    }

    let mut z = VertexSet::new();
    let mut stack: Vec<VertexId> = h
        .left
        .iter()
        .filter(|l| !mate_l.contains_key(l))
        .collect();
    for &l in &stack {
        z.insert(l);
    }
    while let Some(v) = stack.pop() {
        if h.left.contains(v) {
            // travel along non-matching edges left -> right
            for &r in h.neighbors(v) {
                if mate_l.get(&v) == Some(&r) {
                    continue;
                }
                if !z.contains(r) {
                    z.insert(r);
                    stack.push(r);
                }
            }
        } else {
            // travel along the matching edge right -> left
            if let Some(&l) = mate_r.get(&v) {
                if !z.contains(l) {
                    z.insert(l);
                    stack.push(l);
                }
            }
        }
    }

    let cover: VertexSet = h
        .left
        .iter()
        .filter(|&l| !z.contains(l))
        .chain(h.right.iter().filter(|&r| z.contains(r)))
        .collect();

    // König equality and validity double as a maximality check on m
    if cover.len() != m.len() {
        return Err(Error::ContractViolation(format!(
            "König cover size {} differs from matching size {}; matching not maximum?",
            cover.len(),
            m.len()
        )));
    }
    for (u, v) in h.edges() {
        if !cover.contains(u) && !cover.contains(v) {
            return Err(Error::ContractViolation(format!(
                "König cover misses edge ({u}, {v})"
            )));
        }
    }
    Ok(cover)
}

/// Per-vertex LPVC values in {0, 1/2, 1}, stored as doubled integers 0/1/2
/// indexed by vertex slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfIntegralAssignment {
    doubled: BTreeMap<VertexId, u8>,
}

impl HalfIntegralAssignment {
    pub fn new(doubled: BTreeMap<VertexId, u8>) -> Self {
        debug_assert!(doubled.values().all(|&d| d <= 2));
        HalfIntegralAssignment { doubled }
    }

    pub fn doubled_value(&self, v: VertexId) -> u8 {
        self.doubled.get(&v).copied().unwrap_or(0)
    }

    /// Twice the objective value (an exact integer).
    pub fn doubled_objective(&self) -> u64 {
        self.doubled.values().map(|&d| d as u64).sum()
    }

    pub fn is_feasible_for(&self, g: &MultiGraph) -> bool {
        g.vertices().all(|v| {
            g.neighbors(v)
                .filter(|&(u, _)| u >= v)
                .all(|(u, _)| self.doubled_value(v) + self.doubled_value(u) >= 2)
        })
    }
}

/// Double cover of `g`: each vertex v splits into copies v1 = v and
/// v2 = slots + v; each edge {u, v} becomes {u1, v2} and {u2, v1}.
pub fn double_cover(g: &MultiGraph) -> BipartiteGraph {
    let shift = g.slot_count() as VertexId;
    let left: VertexSet = g.vertices().collect();
    let right: VertexSet = g.vertices().map(|v| v + shift).collect();
    let mut edges = Vec::new();
    for v in g.vertices() {
        for u in g.distinct_neighbors(v) {
            edges.push((v, u + shift));
        }
    }
    BipartiteGraph::new(left, right, &edges).expect("double cover is bipartite by construction")
}

/// Solves the LP relaxation of vertex cover exactly, returning an optimal
/// half-integral assignment.
pub fn solve_lpvc(g: &MultiGraph) -> Result<HalfIntegralAssignment> {
    solve_lpvc_with_stats(g).map(|(a, _)| a)
}

pub fn solve_lpvc_with_stats(g: &MultiGraph) -> Result<(HalfIntegralAssignment, RoundStats)> {
    if !g.is_simple() {
        return Err(Error::Input("LPVC expects a simple graph".into()));
    }
    let h = double_cover(g);
    let (m, stats) = maximum_bipartite_matching_with_stats(&h);
    let cover = koenig_vertex_cover(&h, &m)?;
    let shift = g.slot_count() as VertexId;
    let mut doubled = BTreeMap::new();
    for v in g.vertices() {
        let copies = u8::from(cover.contains(v)) + u8::from(cover.contains(v + shift));
        doubled.insert(v, copies);
    }
    let beta = HalfIntegralAssignment::new(doubled);
    if !beta.is_feasible_for(g) {
        return Err(Error::ContractViolation(
            "LPVC assignment from double cover is infeasible".into(),
        ));
    }
    Ok((beta, stats))
}

/// Rounds a feasible rational LPVC solution to the half-integral one:
/// below 1/2 to 0, exactly 1/2 stays, above 1/2 to 1.
pub fn round_half_integral(
    g: &MultiGraph,
    beta: &BTreeMap<VertexId, Ratio<i64>>,
) -> Result<HalfIntegralAssignment> {
    let zero = Ratio::from_integer(0);
    let one = Ratio::from_integer(1);
    let half = Ratio::new(1, 2);
    for v in g.vertices() {
        let val = beta.get(&v).copied().unwrap_or(zero);
        if val < zero {
            return Err(Error::Input(format!("negative LPVC value at vertex {v}")));
        }
        for u in g.distinct_neighbors(v) {
            if u > v {
                let other = beta.get(&u).copied().unwrap_or(zero);
                if val + other < one {
                    return Err(Error::Input(format!(
                        "infeasible LPVC input: edge ({v}, {u}) is uncovered"
                    )));
                }
            }
        }
    }
    let mut doubled = BTreeMap::new();
    for v in g.vertices() {
        let val = beta.get(&v).copied().unwrap_or(zero);
        let d = if val < half {
            0
        } else if val == half {
            1
        } else {
            2
        };
        doubled.insert(v, d);
    }
    Ok(HalfIntegralAssignment::new(doubled))
}

/// Nemhauser–Trotter partition of the vertices by their LPVC value.
pub fn nt_partition(beta: &HalfIntegralAssignment) -> (VertexSet, VertexSet, VertexSet) {
    let mut v0 = VertexSet::new();
    let mut v_half = VertexSet::new();
    let mut v1 = VertexSet::new();
    for (&v, &d) in &beta.doubled {
        match d {
            0 => v0.insert(v),
            1 => v_half.insert(v),
            _ => v1.insert(v),
        }
    }
    (v0, v_half, v1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_bipartite_edges, random_simple_graph};
    use crate::graph::MultiGraph;
    use crate::oracle::vc_opt;

    fn bip(nl: u32, nr: u32, edges: &[(u32, u32)]) -> BipartiteGraph {
        let left: VertexSet = (0..nl).collect();
        let right: VertexSet = (nl..nl + nr).collect();
        let shifted: Vec<(u32, u32)> = edges.iter().map(|&(u, v)| (u, nl + v)).collect();
        BipartiteGraph::new(left, right, &shifted).unwrap()
    }

    #[test]
    fn matching_examples() {
        assert_eq!(maximum_bipartite_matching(&bip(1, 1, &[(0, 0)])).len(), 1);
        // C4 split 2 + 2
        let c4 = bip(2, 2, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(maximum_bipartite_matching(&c4).len(), 2);
        let star = bip(1, 3, &[(0, 0), (0, 1), (0, 2)]);
        assert_eq!(maximum_bipartite_matching(&star).len(), 1);
    }

    #[test]
    fn koenig_examples() {
        let single = bip(1, 1, &[(0, 0)]);
        let m = maximum_bipartite_matching(&single);
        assert_eq!(koenig_vertex_cover(&single, &m).unwrap().len(), 1);

        // P4 as bipartite path: l0-r0-l1-r1
        let p4 = bip(2, 2, &[(0, 0), (1, 0), (1, 1)]);
        let m = maximum_bipartite_matching(&p4);
        assert_eq!(m.len(), 2);
        assert_eq!(koenig_vertex_cover(&p4, &m).unwrap().len(), 2);

        let edgeless = bip(2, 2, &[]);
        let m = maximum_bipartite_matching(&edgeless);
        assert!(koenig_vertex_cover(&edgeless, &m).unwrap().is_empty());
    }

    #[test]
    fn koenig_rejects_non_maximum_matching() {
        let p4 = bip(2, 2, &[(0, 0), (1, 0), (1, 1)]);
        let not_max = Matching(vec![(1, 2)]); // l1-r0 blocks both other edges
        assert!(matches!(
            koenig_vertex_cover(&p4, &not_max),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn koenig_on_random_bipartite_graphs() {
        for seed in 0..80u64 {
            let edges = random_bipartite_edges(7, 7, 35, seed);
            let h = bip(7, 7, &edges);
            let m = maximum_bipartite_matching(&h);
            let cover = koenig_vertex_cover(&h, &m).unwrap();
            assert_eq!(cover.len(), m.len(), "König equality, seed {seed}");
        }
    }

    #[test]
    fn lpvc_examples() {
        let k3 = MultiGraph::build(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let beta = solve_lpvc(&k3).unwrap();
        assert_eq!(beta.doubled_objective(), 3, "all-half optimum on K3");
        assert!(k3.vertices().all(|v| beta.doubled_value(v) == 1));

        let star = MultiGraph::build(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let beta = solve_lpvc(&star).unwrap();
        assert_eq!(beta.doubled_value(0), 2, "center gets value 1");
        assert!((1..4).all(|v| beta.doubled_value(v) == 0));
        assert_eq!(beta.doubled_objective(), 2);

        let edgeless = MultiGraph::empty(3);
        let beta = solve_lpvc(&edgeless).unwrap();
        assert_eq!(beta.doubled_objective(), 0);
    }

    /// Exhaustive half-integral optimum with feasibility pruning.
    pub(crate) fn lpvc_brute_doubled(g: &MultiGraph) -> u64 {
        let verts: Vec<VertexId> = g.vertices().collect();
        fn rec(
            g: &MultiGraph,
            verts: &[VertexId],
            i: usize,
            assign: &mut BTreeMap<VertexId, u8>,
            sum: u64,
            best: &mut u64,
        ) {
            if sum >= *best {
                return;
            }
            if i == verts.len() {
                *best = sum;
                return;
            }
            let v = verts[i];
            'values: for d in 0u8..=2 {
                // edges toward already-assigned vertices must stay feasible
                for u in g.distinct_neighbors(v) {
                    if let Some(&du) = assign.get(&u) {
                        if du + d < 2 {
                            continue 'values;
                        }
                    }
                }
                assign.insert(v, d);
                rec(g, verts, i + 1, assign, sum + d as u64, best);
                assign.remove(&v);
            }
        }
        let mut best = 2 * verts.len() as u64;
        // process high-degree vertices first so pruning bites
        let mut order = verts.clone();
        order.sort_by_key(|&v| std::cmp::Reverse(g.degree(v)));
        let mut assign = BTreeMap::new();
        rec(g, &order, 0, &mut assign, 0, &mut best);
        best
    }

    #[test]
    fn lpvc_matches_exhaustive_optimum() {
        for seed in 0..50u64 {
            let g = random_simple_graph(9, 35, seed);
            let beta = solve_lpvc(&g).unwrap();
            assert_eq!(
                beta.doubled_objective(),
                lpvc_brute_doubled(&g),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn double_cover_identity() {
        // objective of LPVC equals half the minimum VC of the double cover
        for seed in 0..30u64 {
            let g = random_simple_graph(8, 35, seed);
            let beta = solve_lpvc(&g).unwrap();
            let h = double_cover(&g);
            let mut edges: Vec<(VertexId, VertexId)> = h.edges().collect();
            edges.sort_unstable();
            let as_graph = MultiGraph::build(2 * g.slot_count(), &edges).unwrap();
            let vc_h = vc_opt(&as_graph).unwrap() as u64;
            assert_eq!(beta.doubled_objective(), vc_h, "seed {seed}");
        }
    }

    #[test]
    fn nt_containment_on_random_graphs() {
        // Some minimum vertex cover S satisfies V1 ⊆ S ⊆ V1 ∪ V_half.
        for seed in 0..40u64 {
            let g = random_simple_graph(9, 30, seed);
            let beta = solve_lpvc(&g).unwrap();
            let (_, v_half, v1) = nt_partition(&beta);
            let verts: Vec<VertexId> = g.vertices().collect();
            let n = verts.len();
            let opt = vc_opt(&g).unwrap();
            let mut witnessed = false;
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize != opt {
                    continue;
                }
                let s: VertexSet = verts
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &v)| v)
                    .collect();
                let covers = verts.iter().all(|&v| {
                    g.distinct_neighbors(v)
                        .all(|u| u < v || s.contains(v) || s.contains(u))
                });
                if !covers {
                    continue;
                }
                let contains_v1 = v1.iter().all(|v| s.contains(v));
                let inside = s.iter().all(|v| v1.contains(v) || v_half.contains(v));
                if contains_v1 && inside {
                    witnessed = true;
                    break;
                }
            }
            assert!(witnessed, "no NT-compatible minimum cover for seed {seed}");
        }
    }

    #[test]
    fn rounding_examples() {
        let edge = MultiGraph::build(2, &[(0, 1)]).unwrap();
        let beta: BTreeMap<VertexId, Ratio<i64>> =
            [(0, Ratio::new(3, 10)), (1, Ratio::new(7, 10))].into();
        let rounded = round_half_integral(&edge, &beta).unwrap();
        assert_eq!(rounded.doubled_value(0), 0);
        assert_eq!(rounded.doubled_value(1), 2);
        assert_eq!(rounded.doubled_objective(), 2, "objective 1.0 preserved");

        // already half-integral input is unchanged
        let k3 = MultiGraph::build(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let halves: BTreeMap<VertexId, Ratio<i64>> =
            (0..3).map(|v| (v, Ratio::new(1, 2))).collect();
        let rounded = round_half_integral(&k3, &halves).unwrap();
        assert_eq!(rounded.doubled_objective(), 3);
        assert!((0..3).all(|v| rounded.doubled_value(v) == 1));
    }

    #[test]
    fn rounding_rejects_infeasible() {
        let edge = MultiGraph::build(2, &[(0, 1)]).unwrap();
        let beta: BTreeMap<VertexId, Ratio<i64>> =
            [(0, Ratio::new(1, 10)), (1, Ratio::new(2, 10))].into();
        assert!(matches!(
            round_half_integral(&edge, &beta),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn rounding_preserves_optimum_objective() {
        // a non-half-integral optimum on C4 rounds to the same objective
        let c4 = MultiGraph::build(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let beta: BTreeMap<VertexId, Ratio<i64>> = [
            (0, Ratio::new(3, 10)),
            (1, Ratio::new(7, 10)),
            (2, Ratio::new(3, 10)),
            (3, Ratio::new(7, 10)),
        ]
        .into();
        let rounded = round_half_integral(&c4, &beta).unwrap();
        assert!(rounded.is_feasible_for(&c4));
        assert_eq!(rounded.doubled_objective(), 4, "objective 2 preserved");
    }

    #[test]
    fn partition_examples() {
        let star = MultiGraph::build(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let (v0, v_half, v1) = nt_partition(&solve_lpvc(&star).unwrap());
        assert_eq!(v1.as_slice(), &[0]);
        assert_eq!(v0.as_slice(), &[1, 2, 3]);
        assert!(v_half.is_empty());

        let k3 = MultiGraph::build(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let (v0, v_half, v1) = nt_partition(&solve_lpvc(&k3).unwrap());
        assert_eq!(v_half.len(), 3);
        assert!(v0.is_empty() && v1.is_empty());

        let edgeless = MultiGraph::empty(2);
        let (v0, ..) = nt_partition(&solve_lpvc(&edgeless).unwrap());
        assert_eq!(v0.len(), 2);
    }
}
