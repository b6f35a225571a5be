//! Vertex-cover and matching kernelizations.
//!
//! * `buss_kernel`: high-degree rule, k² + 2k vertex kernel in three rounds.
//! * `size_threshold_wrap`: exponential-size shortcut — if 2^⌈k^(1/δ)⌉
//!   exceeds the vertex count the instance is already small enough,
//!   otherwise the wrapped kernelizer runs.
//! * `nt_kernel`: LP-based 2k kernel via the Nemhauser–Trotter partition.
//! * `matching_kernel`: 6k² kernel for maximum matching.
//! * `vc_solve`: kernelize-then-branch decision procedure with a verified
//!   cover certificate.

use crate::engine::{run_pass_once, Change, PassSpec, RoundStats};
use crate::graph::{Instance, MultiGraph, VertexId, VertexSet};
use crate::lpm;
use crate::outcome::{Answer, KernelOutcome, TraceRecord};
use crate::{Error, Result};
use serde_json::json;

pub type GraphOutcome = KernelOutcome<Instance>;

/// Advertised kernel-size bounds, checked post hoc on reduced outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeBound {
    /// k² + 2k vertices (Buss).
    BussVertices,
    /// 2k vertices (Nemhauser–Trotter).
    NtVertices,
    /// 6k² vertices (matching).
    MatchingVertices,
    /// 2^⌈k^(1/δ)⌉ vertices (threshold short-circuit branch).
    Threshold { delta: u32 },
    /// |S|³ + 2|S|² + 2|S| vertices (structural kernels, |S| = cover size).
    StructuralVertices,
    /// k² points (point-line cover).
    PlcPoints,
}

impl SizeBound {
    /// Bound value as a function of the parameter (k, or |S|).
    pub fn eval(&self, param: u64) -> u128 {
        let p = param as u128;
        match self {
            SizeBound::BussVertices => p * p + 2 * p,
            SizeBound::NtVertices => 2 * p,
            SizeBound::MatchingVertices => 6 * p * p,
            SizeBound::Threshold { delta } => threshold_bound(param, *delta),
            SizeBound::StructuralVertices => p * p * p + 2 * p * p + 2 * p,
            SizeBound::PlcPoints => p * p,
        }
    }
}

/// ⌈k^(1/δ)⌉ by exact integer root finding.
pub fn ceil_root(k: u64, delta: u32) -> u64 {
    assert!(delta >= 1);
    if k <= 1 || delta == 1 {
        return k;
    }
    // largest t with t^delta <= k
    let mut t = 1u64;
    while (t + 1).checked_pow(delta).map_or(false, |p| p <= k) {
        t += 1;
    }
    if t.pow(delta) == k {
        t
    } else {
        t + 1
    }
}

/// 2^⌈k^(1/δ)⌉, saturating far above any realistic vertex count.
pub fn threshold_bound(k: u64, delta: u32) -> u128 {
    let r = ceil_root(k, delta);
    if r >= 127 {
        u128::MAX
    } else {
        1u128 << r
    }
}

fn require_simple(inst: &Instance) -> Result<()> {
    if !inst.graph.is_simple() {
        return Err(Error::Input(
            "kernelizer expects a simple graph (no self-loops or parallel edges)".into(),
        ));
    }
    if inst.k < 0 {
        return Err(Error::Input("parameter k must be non-negative".into()));
    }
    Ok(())
}

fn high_degree_mark_pass(threshold: i64) -> PassSpec {
    PassSpec::per_item("mark-high-degree", move |inst, v| {
        if (inst.graph.degree(v) as i64) > threshold {
            vec![Change::Mark(v, "high".into())]
        } else {
            vec![]
        }
    })
}

fn delete_marked_pass(name: &'static str, marked: VertexSet, decrement: bool) -> PassSpec {
    PassSpec::new(name, move |_inst| {
        let marked = marked.clone();
        Box::new(move |_inst, v| {
            if marked.contains(v) {
                if decrement {
                    vec![Change::DeleteVertex(v), Change::DecrementK(1)]
                } else {
                    vec![Change::DeleteVertex(v)]
                }
            } else {
                vec![]
            }
        })
    })
}

fn prune_isolated_pass() -> PassSpec {
    PassSpec::per_item("prune-isolated", |inst, v| {
        if inst.graph.degree(v) == 0 {
            vec![Change::DeleteVertex(v)]
        } else {
            vec![]
        }
    })
}

/// Buss kernel: vertices of degree > k go into the cover; afterwards a
/// yes-instance can retain at most k·k' edges and k'(k+1) non-isolated
/// vertices, so anything larger is a no-instance.
pub fn buss_kernel(inst: &Instance) -> Result<(GraphOutcome, RoundStats)> {
    require_simple(inst)?;
    let k = inst.k;
    let mut stats = RoundStats::default();

    let (inst1, marked) = run_pass_once(inst, &high_degree_mark_pass(k), &mut stats)?;
    let high: VertexSet = marked.marks.iter().map(|&(v, _)| v).collect();
    if high.len() as i64 > k {
        return Ok((
            GraphOutcome::decided(Answer::No, None),
            stats,
        ));
    }

    let (inst2, _) = run_pass_once(
        &inst1,
        &delete_marked_pass("delete-high-degree", high.clone(), true),
        &mut stats,
    )?;
    let (inst3, _) = run_pass_once(&inst2, &prune_isolated_pass(), &mut stats)?;

    let k2 = inst3.k;
    debug_assert_eq!(k2, k - high.len() as i64);
    if (inst3.graph.edge_count() as i64) > k * k2 {
        return Ok((GraphOutcome::decided(Answer::No, None), stats));
    }
    if (inst3.graph.vertex_count() as i64) > k2 * (k + 1) {
        // residual vertex count exceeds what any yes-instance can carry
        return Ok((GraphOutcome::decided(Answer::No, None), stats));
    }

    let trace = vec![
        TraceRecord::new("buss-high-degree", json!({ "deleted": high.as_slice() })),
        TraceRecord::new(
            "buss-residual",
            json!({ "vertices": inst3.graph.vertex_count(), "edges": inst3.graph.edge_count() }),
        ),
    ];
    Ok((
        GraphOutcome::Reduced {
            instance: inst3,
            trace,
        },
        stats,
    ))
}

/// Size-threshold wrapper: when 2^⌈k^(1/δ)⌉ > n the instance itself already
/// satisfies the exponential bound and is returned unchanged; otherwise the
/// inner kernelizer runs.
pub fn size_threshold_wrap(
    inner: impl Fn(&Instance) -> Result<(GraphOutcome, RoundStats)>,
    delta: u32,
    inst: &Instance,
) -> Result<(GraphOutcome, RoundStats)> {
    if delta < 1 {
        return Err(Error::Input("delta must be a positive integer".into()));
    }
    if inst.k < 0 {
        return Err(Error::Input("parameter k must be non-negative".into()));
    }
    let n = inst.graph.vertex_count() as u128;
    if threshold_bound(inst.k as u64, delta) > n {
        let trace = vec![TraceRecord::new(
            "threshold-short-circuit",
            json!({ "delta": delta, "n": inst.graph.vertex_count() }),
        )];
        return Ok((
            GraphOutcome::Reduced {
                instance: inst.clone(),
                trace,
            },
            RoundStats::default(),
        ));
    }
    let (outcome, stats) = inner(inst)?;
    let outcome = match outcome {
        GraphOutcome::Reduced { instance, mut trace } => {
            trace.insert(
                0,
                TraceRecord::new("threshold-delegated", json!({ "delta": delta })),
            );
            GraphOutcome::Reduced { instance, trace }
        }
        decided => decided,
    };
    Ok((outcome, stats))
}

/// Nemhauser–Trotter kernel: solve LPVC, force V1 into the cover, drop V0,
/// keep the half-valued vertices. At most 2k' vertices remain.
pub fn nt_kernel(inst: &Instance) -> Result<(GraphOutcome, RoundStats)> {
    require_simple(inst)?;
    let k = inst.k;
    let (beta, mut stats) = lpm::solve_lpvc_with_stats(&inst.graph)?;
    let (v0, v_half, v1) = lpm::nt_partition(&beta);

    // LP objective > k rules the instance out (doubled comparison is exact)
    if beta.doubled_objective() > 2 * k as u64 {
        return Ok((GraphOutcome::decided(Answer::No, None), stats));
    }

    let reduced_graph = inst.graph.induced_subgraph(&v_half)?;
    let k2 = k - v1.len() as i64;
    stats.rounds += 1; // partition commit
    stats.work += inst.graph.vertex_count() as u64;
    stats.record_rule("nt-partition", (v0.len() + v1.len()) as u64);

    let trace = vec![TraceRecord::new(
        "nt-partition",
        json!({ "v0": v0.as_slice(), "v1": v1.as_slice() }),
    )];
    Ok((
        GraphOutcome::Reduced {
            instance: Instance::new(reduced_graph, k2),
            trace,
        },
        stats,
    ))
}

/// Greedy matching that pairs the first `k` high-degree vertices with
/// otherwise unused neighbors; always succeeds because degrees exceed 2k.
fn greedy_match_high(g: &MultiGraph, s: &VertexSet, k: usize) -> Vec<(VertexId, VertexId)> {
    let chosen: Vec<VertexId> = s.iter().take(k).collect();
    let mut used = VertexSet::new();
    let mut matching = Vec::new();
    for (i, &v) in chosen.iter().enumerate() {
        let pending = &chosen[i + 1..];
        let mate = g
            .distinct_neighbors(v)
            .find(|&u| !used.contains(u) && !pending.contains(&u))
            .expect("degree > 2k guarantees a free mate");
        used.insert(v);
        used.insert(mate);
        matching.push((v, mate));
    }
    matching
}

/// Greedy maximal matching in ascending edge order; on a graph with minimum
/// degree 1 and maximum degree d it finds at least |V| / (2d) edges.
fn greedy_maximal_matching(g: &MultiGraph, within: &VertexSet) -> Vec<(VertexId, VertexId)> {
    let mut used = VertexSet::new();
    let mut matching = Vec::new();
    for v in within.iter() {
        if used.contains(v) {
            continue;
        }
        let mate = g
            .distinct_neighbors(v)
            .find(|&u| within.contains(u) && !used.contains(u));
        if let Some(u) = mate {
            used.insert(v);
            used.insert(u);
            matching.push((v, u));
        }
    }
    matching
}

/// Matching kernel with at most 6k² vertices. Yes-certificates are the
/// endpoint sets of an explicit size-k matching.
pub fn matching_kernel(inst: &Instance) -> Result<(GraphOutcome, RoundStats)> {
    require_simple(inst)?;
    let k = inst.k;
    let mut stats = RoundStats::default();
    if k == 0 {
        return Ok((
            GraphOutcome::decided(Answer::Yes, Some(VertexSet::new())),
            stats,
        ));
    }

    // round 1: high-degree set S = { v : deg(v) > 2k }
    let (inst1, marked) = run_pass_once(inst, &high_degree_mark_pass(2 * k), &mut stats)?;
    let s: VertexSet = marked.marks.iter().map(|&(v, _)| v).collect();
    if s.len() as i64 >= k {
        let matching = greedy_match_high(&inst1.graph, &s, k as usize);
        let cert: VertexSet = matching.iter().flat_map(|&(a, b)| [a, b]).collect();
        return Ok((GraphOutcome::decided(Answer::Yes, Some(cert)), stats));
    }

    // round 2: S' = S plus the 2k smallest-id neighbors of each v in S
    let keep_pass = PassSpec::new("mark-keep", {
        let s = s.clone();
        let k = k;
        move |_inst| {
            let s = s.clone();
            Box::new(move |inst: &Instance, v: VertexId| {
                if !s.contains(v) {
                    return vec![];
                }
                let mut changes = vec![Change::Mark(v, "keep".into())];
                for u in inst.graph.distinct_neighbors(v).take(2 * k as usize) {
                    changes.push(Change::Mark(u, "keep".into()));
                }
                changes
            })
        }
    });
    let (inst2, kept) = run_pass_once(&inst1, &keep_pass, &mut stats)?;
    let s_prime: VertexSet = kept.marks.iter().map(|&(v, _)| v).collect();

    // V(G'') = vertices outside S' with a neighbor outside S'
    let g_tail: VertexSet = inst2
        .graph
        .vertices()
        .filter(|&v| {
            !s_prime.contains(v)
                && inst2
                    .graph
                    .distinct_neighbors(v)
                    .any(|u| !s_prime.contains(u))
        })
        .collect();

    if g_tail.len() as i64 >= 4 * k * k {
        // max degree outside S' is at most 2k, so a greedy maximal matching
        // on G'' has at least |V(G'')| / 4k >= k edges
        let matching = greedy_maximal_matching(&inst2.graph, &g_tail);
        debug_assert!(matching.len() as i64 >= k);
        let cert: VertexSet = matching
            .iter()
            .take(k as usize)
            .flat_map(|&(a, b)| [a, b])
            .collect();
        return Ok((GraphOutcome::decided(Answer::Yes, Some(cert)), stats));
    }

    // round 3: drop everything outside S' ∪ V(G'')
    let drop_pass = PassSpec::new("drop-outside-kernel", {
        let keep = s_prime.union(&g_tail);
        move |_inst| {
            let keep = keep.clone();
            Box::new(move |_inst: &Instance, v: VertexId| {
                if keep.contains(v) {
                    vec![]
                } else {
                    vec![Change::DeleteVertex(v)]
                }
            })
        }
    });
    let (inst3, _) = run_pass_once(&inst2, &drop_pass, &mut stats)?;

    let trace = vec![TraceRecord::new(
        "matching-kernel",
        json!({ "high_degree": s.as_slice(), "kept": inst3.graph.vertex_count() }),
    )];
    Ok((
        GraphOutcome::Reduced {
            instance: inst3,
            trace,
        },
        stats,
    ))
}

fn smallest_edge(g: &MultiGraph) -> Option<(VertexId, VertexId)> {
    g.vertices().find_map(|v| {
        g.distinct_neighbors(v)
            .find(|&u| u > v)
            .map(|u| (v, u))
    })
}

fn branch_vc(inst: &Instance, chosen: &mut Vec<VertexId>) -> Option<Vec<VertexId>> {
    if inst.graph.edge_count() == 0 {
        return Some(chosen.clone());
    }
    if inst.k <= 0 {
        return None;
    }
    let (u, v) = smallest_edge(&inst.graph).expect("edges exist");
    for pick in [u, v] {
        let next = Instance::new(
            inst.graph.apply(&[pick], &[]),
            inst.k - 1,
        );
        chosen.push(pick);
        if let Some(cover) = branch_vc(&next, chosen) {
            return Some(cover);
        }
        chosen.pop();
    }
    None
}

fn is_vertex_cover(g: &MultiGraph, cover: &VertexSet) -> bool {
    g.vertices().all(|v| {
        g.distinct_neighbors(v)
            .all(|u| u < v || cover.contains(v) || cover.contains(u))
    })
}

/// Decides vertex cover: Buss kernel followed by depth-≤k branching on the
/// smallest remaining edge. Yes-answers carry a cover verified against the
/// original instance.
pub fn vc_solve(inst: &Instance) -> Result<Option<VertexSet>> {
    let (outcome, _) = buss_kernel(inst)?;
    let (reduced, forced) = match outcome {
        GraphOutcome::Decided { answer: Answer::No, .. } => return Ok(None),
        GraphOutcome::Decided { answer: Answer::Yes, certificate } => {
            (None, certificate.unwrap_or_default())
        }
        GraphOutcome::Reduced { instance, trace } => {
            let forced: VertexSet = trace
                .iter()
                .find(|t| t.rule == "buss-high-degree")
                .and_then(|t| t.detail["deleted"].as_array().cloned())
                .map(|vals| vals.iter().map(|x| x.as_u64().unwrap() as VertexId).collect())
                .unwrap_or_default();
            (Some(instance), forced)
        }
    };

    let cover = match reduced {
        None => forced,
        Some(r) => {
            let mut chosen = Vec::new();
            match branch_vc(&r, &mut chosen) {
                None => return Ok(None),
                Some(branched) => forced.union(&VertexSet::from_iter(branched)),
            }
        }
    };

    if cover.len() as i64 > inst.k || !is_vertex_cover(&inst.graph, &cover) {
        return Err(Error::ContractViolation(format!(
            "vc_solve produced an invalid cover of size {}",
            cover.len()
        )));
    }
    Ok(Some(cover))
}
