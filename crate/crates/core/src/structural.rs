//! Kernels for tree width, path width and tree depth parameterized by a
//! given vertex cover S: complete common neighborhoods inside S, then handle
//! simplicial vertices outside S with one deterministic parallel marking
//! round and one deletion round.
//!
//! Since S is a vertex cover, V \ S is independent and every simplicial
//! vertex outside S has its whole neighborhood inside S. Deletions only ever
//! touch V \ S, so S survives into the kernel unchanged.

use crate::engine::{run_pass_once, Change, PassSpec, RoundStats};
use crate::graph::{Instance, MultiGraph, VertexId, VertexSet};
use crate::outcome::{Answer, KernelOutcome, TraceRecord};
use crate::{Error, Result};
use serde_json::json;

/// A graph, a width/depth budget k, and a vertex cover S; the parameter of
/// the kernelization is |S|.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralInstance {
    pub graph: MultiGraph,
    pub k: i64,
    pub cover: VertexSet,
}

pub type StructuralOutcome = KernelOutcome<StructuralInstance>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WidthMeasure {
    TreeWidth,
    PathWidth,
    TreeDepth,
}

impl StructuralInstance {
    pub fn new(graph: MultiGraph, k: i64, cover: VertexSet) -> Result<Self> {
        if !graph.is_simple() {
            return Err(Error::Input("structural kernels expect a simple graph".into()));
        }
        if k < 0 {
            return Err(Error::Input("width budget k must be non-negative".into()));
        }
        for v in cover.iter() {
            if !graph.is_alive(v) {
                return Err(Error::Input(format!("cover vertex {v} is not in the graph")));
            }
        }
        for v in graph.vertices() {
            for u in graph.distinct_neighbors(v) {
                if u > v && !cover.contains(v) && !cover.contains(u) {
                    return Err(Error::Input(format!(
                        "S is not a vertex cover: edge ({v}, {u}) uncovered"
                    )));
                }
            }
        }
        Ok(StructuralInstance { graph, k, cover })
    }
}

fn is_simplicial(g: &MultiGraph, v: VertexId) -> bool {
    let nbrs: Vec<VertexId> = g.distinct_neighbors(v).collect();
    nbrs.iter()
        .all(|&x| nbrs.iter().all(|&y| y <= x || g.has_edge(x, y)))
}

/// Single completion round: nonadjacent pairs in S with more than k common
/// neighbors outside S become adjacent. One round suffices because the added
/// edges lie inside S and common neighborhoods outside S never change.
pub fn common_neighbor_completion(si: &StructuralInstance) -> Result<StructuralInstance> {
    let mut stats = RoundStats::default();
    let (inst, _) = completion_pass_once(si, &mut stats)?;
    StructuralInstance::new(inst.graph, si.k, si.cover.clone())
}

fn completion_pass_once(
    si: &StructuralInstance,
    stats: &mut RoundStats,
) -> Result<(Instance, bool)> {
    let cover = si.cover.clone();
    let k = si.k;
    let pass = PassSpec::new("common-neighbor-completion", move |_inst| {
        let cover = cover.clone();
        Box::new(move |inst: &Instance, v: VertexId| {
            if !cover.contains(v) {
                return vec![];
            }
            let mut changes = Vec::new();
            for u in cover.iter().filter(|&u| u > v) {
                if inst.graph.has_edge(v, u) {
                    continue;
                }
                let common = inst
                    .graph
                    .distinct_neighbors(v)
                    .filter(|&w| !cover.contains(w) && inst.graph.has_edge(u, w))
                    .count();
                if common as i64 > k {
                    changes.push(Change::AddEdge(v, u));
                }
            }
            changes
        })
    });
    let inst = Instance::new(si.graph.clone(), si.k);
    let (out, committed) = run_pass_once(&inst, &pass, stats)?;
    Ok((out, committed.changed))
}

/// Outside-cover simplicial vertices of the completed graph, ascending.
fn simplicial_outside(g: &MultiGraph, cover: &VertexSet) -> Vec<VertexId> {
    g.vertices()
        .filter(|&v| !cover.contains(v) && is_simplicial(g, v))
        .collect()
}

/// Marks for the path-width kernel. Kept (marked) vertices witness the
/// safety of deleting everything unmarked.
fn pw_marking_pass(cover: VertexSet, k: i64) -> PassSpec {
    PassSpec::new("pw-mark", move |_inst| {
        let cover = cover.clone();
        Box::new(move |inst: &Instance, v: VertexId| {
            let g = &inst.graph;
            let mut changes = Vec::new();
            if cover.contains(v) {
                // keep one degree-1 neighbor per cover vertex
                if let Some(w) = g.distinct_neighbors(v).find(|&w| g.degree(w) == 1) {
                    changes.push(Change::Mark(w, format!("deg1-of-{v}")));
                }
                return changes;
            }
            if !is_simplicial(g, v) {
                return changes;
            }
            let nbrs: Vec<VertexId> = g.distinct_neighbors(v).collect();
            if nbrs.len() < 2 || nbrs.len() as i64 > k {
                return changes;
            }
            for (i, &x) in nbrs.iter().enumerate() {
                for &y in &nbrs[i + 1..] {
                    let witness = g
                        .vertices()
                        .find(|&w| {
                            w != v
                                && !nbrs.contains(&w)
                                && g.has_edge(w, x)
                                && g.has_edge(w, y)
                                && is_simplicial(g, w)
                        });
                    match witness {
                        Some(w) => changes.push(Change::Mark(w, format!("witness-{x}-{y}"))),
                        None => {
                            changes.push(Change::Mark(v, "self".into()));
                            return changes;
                        }
                    }
                }
            }
            changes
        })
    })
}

/// Marks for the tree-depth kernel.
fn td_marking_pass(cover: VertexSet, k: i64) -> PassSpec {
    PassSpec::new("td-mark", move |_inst| {
        let cover = cover.clone();
        Box::new(move |inst: &Instance, v: VertexId| {
            let g = &inst.graph;
            if cover.contains(v) {
                // high-degree cover vertices keep their k+1 smallest neighbors
                if g.degree(v) as i64 > k {
                    return g
                        .distinct_neighbors(v)
                        .take(k as usize + 1)
                        .map(|w| Change::Mark(w, format!("kplus1-of-{v}")))
                        .collect();
                }
                return vec![];
            }
            if is_simplicial(g, v)
                && g.distinct_neighbors(v).any(|w| (g.degree(w) as i64) <= k)
            {
                return vec![Change::Mark(v, "low-degree-neighbor".into())];
            }
            vec![]
        })
    })
}

fn delete_unmarked_simplicial_pass(
    name: &'static str,
    cover: VertexSet,
    marked: VertexSet,
) -> PassSpec {
    PassSpec::new(name, move |_inst| {
        let cover = cover.clone();
        let marked = marked.clone();
        Box::new(move |inst: &Instance, v: VertexId| {
            if !cover.contains(v) && !marked.contains(v) && is_simplicial(&inst.graph, v) {
                vec![Change::DeleteVertex(v)]
            } else {
                vec![]
            }
        })
    })
}

fn kernel(si: &StructuralInstance, measure: WidthMeasure) -> Result<(StructuralOutcome, RoundStats)> {
    let mut stats = RoundStats::default();
    let s_size = si.cover.len() as i64;

    // a cover-based decomposition has width (and nested depth) at most |S|
    if si.k >= s_size {
        return Ok((
            StructuralOutcome::decided(Answer::Yes, None),
            stats,
        ));
    }

    let (completed, _) = completion_pass_once(si, &mut stats)?;
    let simplicial = simplicial_outside(&completed.graph, &si.cover);

    // a simplicial neighborhood is a clique, so tw (hence pw and td) is at
    // least its size
    if simplicial
        .iter()
        .any(|&v| (completed.graph.degree(v) as i64) > si.k)
    {
        return Ok((StructuralOutcome::decided(Answer::No, None), stats));
    }

    let marked: VertexSet = match measure {
        WidthMeasure::TreeWidth => VertexSet::new(),
        WidthMeasure::PathWidth => {
            let (_, committed) = run_pass_once(
                &completed,
                &pw_marking_pass(si.cover.clone(), si.k),
                &mut stats,
            )?;
            committed.marks.iter().map(|&(v, _)| v).collect()
        }
        WidthMeasure::TreeDepth => {
            let (_, committed) = run_pass_once(
                &completed,
                &td_marking_pass(si.cover.clone(), si.k),
                &mut stats,
            )?;
            committed.marks.iter().map(|&(v, _)| v).collect()
        }
    };

    let (reduced, _) = run_pass_once(
        &completed,
        &delete_unmarked_simplicial_pass("delete-simplicial", si.cover.clone(), marked.clone()),
        &mut stats,
    )?;

    let trace = vec![
        TraceRecord::new("completion", json!({ "cover": si.cover.as_slice() })),
        TraceRecord::new(
            "simplicial",
            json!({ "marked": marked.as_slice(), "kept": reduced.graph.vertex_count() }),
        ),
    ];
    let out = StructuralInstance::new(reduced.graph, si.k, si.cover.clone())?;
    Ok((
        StructuralOutcome::Reduced {
            instance: out,
            trace,
        },
        stats,
    ))
}

/// Tree-width kernel with at most |S|³ + |S| vertices.
pub fn tw_kernel(si: &StructuralInstance) -> Result<(StructuralOutcome, RoundStats)> {
    kernel(si, WidthMeasure::TreeWidth)
}

/// Path-width kernel with at most |S|³ + |S|² + 2|S| vertices.
pub fn pw_kernel(si: &StructuralInstance) -> Result<(StructuralOutcome, RoundStats)> {
    kernel(si, WidthMeasure::PathWidth)
}

/// Tree-depth kernel with at most |S|³ + 2|S|² + |S| vertices.
pub fn td_kernel(si: &StructuralInstance) -> Result<(StructuralOutcome, RoundStats)> {
    kernel(si, WidthMeasure::TreeDepth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{greedy_vertex_cover, random_simple_graph};
    use crate::oracle::width_opt;

    fn si(n: usize, edges: &[(u32, u32)], k: i64, cover: &[u32]) -> StructuralInstance {
        StructuralInstance::new(
            MultiGraph::build(n, edges).unwrap(),
            k,
            VertexSet::from_iter(cover.iter().copied()),
        )
        .unwrap()
    }

    #[test]
    fn rejects_non_cover() {
        let g = MultiGraph::build(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(StructuralInstance::new(g, 1, VertexSet::from_iter([0])).is_err());
    }

    #[test]
    fn completion_examples() {
        // C4 with S = opposite vertices, k = 1: two common neighbors > 1
        let c4 = si(4, &[(0, 1), (1, 2), (2, 3), (0, 3)], 1, &[0, 2]);
        let completed = common_neighbor_completion(&c4).unwrap();
        assert!(completed.graph.has_edge(0, 2), "chord added");

        // large k: unchanged
        let c4b = si(4, &[(0, 1), (1, 2), (2, 3), (0, 3)], 3, &[0, 2]);
        let completed = common_neighbor_completion(&c4b).unwrap();
        assert!(!completed.graph.has_edge(0, 2));

        // fully adjacent cover: no nonadjacent pairs
        let k2 = si(2, &[(0, 1)], 0, &[0, 1]);
        assert_eq!(common_neighbor_completion(&k2).unwrap().graph, k2.graph);
    }

    #[test]
    fn tw_examples() {
        // star, S = {center}, k = 0: leaves are simplicial with degree 1 > 0
        let star = si(4, &[(0, 1), (0, 2), (0, 3)], 0, &[0]);
        let (outcome, _) = tw_kernel(&star).unwrap();
        assert_eq!(outcome.answer(), Some(Answer::No));

        // k >= |S| decides yes immediately
        let star_yes = si(4, &[(0, 1), (0, 2), (0, 3)], 1, &[0]);
        assert_eq!(tw_kernel(&star_yes).unwrap().0.answer(), Some(Answer::Yes));

        // C4 with the opposite-vertex cover and k = 1: completion makes both
        // outside vertices simplicial with degree 2 > 1
        let c4 = si(4, &[(0, 1), (1, 2), (2, 3), (0, 3)], 1, &[0, 2]);
        assert_eq!(tw_kernel(&c4).unwrap().0.answer(), Some(Answer::No));
    }

    #[test]
    fn pw_marks_one_leaf_per_cover_vertex() {
        // two leaves on one cover vertex: one marked, the other deleted
        let g = si(3, &[(0, 1), (0, 2)], 1, &[0]);
        let (outcome, _) = pw_kernel(&g).unwrap();
        match outcome {
            StructuralOutcome::Reduced { instance, .. } => {
                assert_eq!(instance.graph.vertex_count(), 2);
                assert!(instance.graph.is_alive(1), "smallest leaf is the witness");
                assert!(!instance.graph.is_alive(2));
            }
            other => panic!("expected reduced, got {other:?}"),
        }

        // a single leaf is marked and kept
        let g = si(2, &[(0, 1)], 1, &[0]);
        match pw_kernel(&g).unwrap().0 {
            StructuralOutcome::Reduced { instance, .. } => {
                assert_eq!(instance.graph.vertex_count(), 2);
            }
            other => panic!("expected reduced, got {other:?}"),
        }
    }

    #[test]
    fn td_marking_cases() {
        // simplicial vertex whose sole neighbor has low degree stays
        let g = si(2, &[(0, 1)], 1, &[0]);
        match td_kernel(&g).unwrap().0 {
            StructuralOutcome::Reduced { instance, .. } => {
                assert!(instance.graph.is_alive(1), "low-degree neighbor marks it");
            }
            other => panic!("expected reduced, got {other:?}"),
        }

        // all neighbors high degree, beyond the k+1 marked ones: deleted
        let mut edges = vec![];
        for leaf in 1..=5u32 {
            edges.push((0, leaf));
        }
        let g = si(6, &edges, 1, &[0]);
        match td_kernel(&g).unwrap().0 {
            StructuralOutcome::Reduced { instance, .. } => {
                // center keeps its k+1 = 2 smallest leaves
                assert_eq!(instance.graph.vertex_count(), 3);
                assert!(instance.graph.is_alive(1) && instance.graph.is_alive(2));
            }
            other => panic!("expected reduced, got {other:?}"),
        }
    }

    #[test]
    fn marking_is_deterministic() {
        let g = random_simple_graph(10, 35, 3);
        let cover = greedy_vertex_cover(&g);
        let k = (cover.len() as i64 - 1).max(0);
        let si = StructuralInstance::new(g, k, cover).unwrap();
        let completed = common_neighbor_completion(&si).unwrap();
        let inst = Instance::new(completed.graph.clone(), completed.k);
        let mut s1 = RoundStats::default();
        let mut s2 = RoundStats::default();
        let (_, c1) =
            run_pass_once(&inst, &pw_marking_pass(si.cover.clone(), si.k), &mut s1).unwrap();
        let (_, c2) =
            run_pass_once(&inst, &pw_marking_pass(si.cover.clone(), si.k), &mut s2).unwrap();
        assert_eq!(c1.marks, c2.marks);
    }

    fn decision(measure: WidthMeasure, g: &MultiGraph, k: i64) -> bool {
        let (tw, pw, td) = width_opt(g).unwrap();
        match measure {
            WidthMeasure::TreeWidth => tw <= k,
            WidthMeasure::PathWidth => pw <= k,
            WidthMeasure::TreeDepth => td <= k,
        }
    }

    #[test]
    fn answer_preservation_against_width_oracle() {
        let measures = [
            (WidthMeasure::TreeWidth, tw_kernel as fn(&StructuralInstance) -> _),
            (WidthMeasure::PathWidth, pw_kernel as fn(&StructuralInstance) -> _),
            (WidthMeasure::TreeDepth, td_kernel as fn(&StructuralInstance) -> _),
        ];
        for seed in 0..40u64 {
            let g = random_simple_graph(9, 30, seed);
            let cover = greedy_vertex_cover(&g);
            if cover.is_empty() {
                continue;
            }
            for k in 0..cover.len() as i64 {
                let si = StructuralInstance::new(g.clone(), k, cover.clone()).unwrap();
                for (measure, kernel_fn) in measures {
                    let truth = decision(measure, &g, k);
                    let (outcome, stats) = kernel_fn(&si).unwrap();
                    let derived = match outcome {
                        StructuralOutcome::Decided { answer, .. } => answer == Answer::Yes,
                        StructuralOutcome::Reduced { instance, .. } => {
                            decision(measure, &instance.graph, instance.k)
                        }
                    };
                    assert_eq!(
                        derived, truth,
                        "{measure:?} seed {seed} k {k} cover {:?}",
                        cover.as_slice()
                    );
                    assert!(stats.rounds <= 4);
                }
            }
        }
    }

    #[test]
    fn size_bounds_per_measure() {
        for seed in 0..30u64 {
            let g = random_simple_graph(14, 25, seed);
            let cover = greedy_vertex_cover(&g);
            if cover.is_empty() {
                continue;
            }
            let s = cover.len() as u128;
            for k in 0..cover.len() as i64 {
                let si = StructuralInstance::new(g.clone(), k, cover.clone()).unwrap();
                let cases = [
                    (tw_kernel(&si).unwrap().0, s * s * s + s),
                    (pw_kernel(&si).unwrap().0, s * s * s + s * s + 2 * s),
                    (td_kernel(&si).unwrap().0, s * s * s + 2 * s * s + s),
                ];
                for (outcome, bound) in cases {
                    if let StructuralOutcome::Reduced { instance, .. } = outcome {
                        assert!(
                            (instance.graph.vertex_count() as u128) <= bound,
                            "seed {seed} k {k}: {} > {bound}",
                            instance.graph.vertex_count()
                        );
                    }
                }
            }
        }
    }
}
