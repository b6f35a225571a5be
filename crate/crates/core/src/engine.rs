//! Deterministic round-based executor for parallel reduction passes.
//!
//! A pass scans an immutable snapshot and produces per-vertex verdicts; all
//! verdicts of one pass are merged into a single change set and committed at
//! once. The merge is order-independent, so any number of workers may run the
//! scan phase in any order and the committed snapshot (and every counter) is
//! still identical to the single-threaded reference executor.
//!
//! Rounds count commit phases that changed something; work counts scan
//! evaluations plus committed changes. These are the empirical stand-ins for
//! circuit depth and size.

use crate::graph::{Instance, VertexId};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// A single proposed change. Verdicts of distinct items must be
/// commit-compatible: no element may be touched incompatibly twice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Change {
    DeleteVertex(VertexId),
    /// Unordered pair; `(v, v)` adds a self-loop. Several additions of the
    /// same pair stack up as multiplicity.
    AddEdge(VertexId, VertexId),
    /// Summed over all verdicts and applied once at commit.
    DecrementK(i64),
    /// Marks are collected for the caller; they do not alter the snapshot.
    Mark(VertexId, String),
}

/// Per-pass verdict function, built fresh from each snapshot. `prepare` may
/// run a whole-snapshot analysis (it must be a pure function of the
/// snapshot); the returned closure is then evaluated per item, concurrently.
type ItemScan = Box<dyn Fn(&Instance, VertexId) -> Vec<Change> + Send + Sync>;

pub struct PassSpec {
    pub name: &'static str,
    prepare: Box<dyn Fn(&Instance) -> ItemScan + Send + Sync>,
}

impl PassSpec {
    pub fn new(
        name: &'static str,
        prepare: impl Fn(&Instance) -> ItemScan + Send + Sync + 'static,
    ) -> Self {
        PassSpec {
            name,
            prepare: Box::new(prepare),
        }
    }

    /// Convenience for passes whose verdict needs no shared analysis.
    pub fn per_item(
        name: &'static str,
        scan: impl Fn(&Instance, VertexId) -> Vec<Change> + Send + Sync + Clone + 'static,
    ) -> Self {
        PassSpec::new(name, move |_inst| {
            let scan = scan.clone();
            Box::new(move |inst, v| scan(inst, v))
        })
    }
}

/// Depth/work proxy: rounds executed, total scan work, per-rule counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RoundStats {
    pub rounds: u64,
    pub work: u64,
    #[serde(rename = "perRule")]
    pub per_rule: BTreeMap<String, u64>,
}

impl RoundStats {
    pub fn record_rule(&mut self, name: &str, applications: u64) {
        *self.per_rule.entry(name.to_string()).or_insert(0) += applications;
    }

    pub fn absorb(&mut self, other: &RoundStats) {
        self.rounds += other.rounds;
        self.work += other.work;
        for (k, v) in &other.per_rule {
            *self.per_rule.entry(k.clone()).or_insert(0) += v;
        }
    }
}

/// Work bound constant: one committing round of a pass list costs at most
/// `WORK_FACTOR * (|V| + |E| + 1)` scan evaluations and committed changes,
/// counting the trailing sweep that confirms the fixpoint.
pub const WORK_FACTOR: u64 = 4;

/// Merged, canonical change set of one pass.
#[derive(Debug, Default)]
pub struct ChangeSet {
    pub deletions: BTreeSet<VertexId>,
    pub additions: BTreeMap<(VertexId, VertexId), u32>,
    pub k_delta: i64,
    pub marks: BTreeSet<(VertexId, String)>,
}

impl ChangeSet {
    pub fn is_empty(&self) -> bool {
        self.deletions.is_empty()
            && self.additions.is_empty()
            && self.k_delta == 0
            && self.marks.is_empty()
    }

    pub fn change_count(&self) -> u64 {
        let adds: u64 = self.additions.values().map(|&m| m as u64).sum();
        self.deletions.len() as u64
            + adds
            + self.marks.len() as u64
            + u64::from(self.k_delta != 0)
    }
}

/// Folds per-item verdicts into one change set. The result is independent of
/// the verdict order; incompatible verdicts are hard errors, not races.
fn merge_verdicts(
    pass: &str,
    inst: &Instance,
    verdicts: impl IntoIterator<Item = Vec<Change>>,
) -> Result<ChangeSet> {
    let conflict = |msg: String| Error::CommitConflict {
        pass: pass.to_string(),
        msg,
    };
    let mut cs = ChangeSet::default();
    for changes in verdicts {
        for change in changes {
            match change {
                Change::DeleteVertex(v) => {
                    if !inst.graph.is_alive(v) {
                        return Err(conflict(format!("delete of dead vertex {v}")));
                    }
                    if !cs.deletions.insert(v) {
                        return Err(conflict(format!("vertex {v} deleted twice")));
                    }
                }
                Change::AddEdge(u, v) => {
                    let key = (u.min(v), u.max(v));
                    if !inst.graph.is_alive(u) || !inst.graph.is_alive(v) {
                        return Err(conflict(format!("edge ({u}, {v}) at dead vertex")));
                    }
                    *cs.additions.entry(key).or_insert(0) += 1;
                }
                Change::DecrementK(d) => cs.k_delta += d,
                Change::Mark(v, tag) => {
                    if !inst.graph.is_alive(v) {
                        return Err(conflict(format!("mark of dead vertex {v}")));
                    }
                    cs.marks.insert((v, tag));
                }
            }
        }
    }
    // additions and deletions touching the same vertex are incompatible
    for &(u, v) in cs.additions.keys() {
        if cs.deletions.contains(&u) || cs.deletions.contains(&v) {
            return Err(conflict(format!(
                "edge ({u}, {v}) added at a vertex deleted in the same commit"
            )));
        }
    }
    Ok(cs)
}

fn apply_changeset(inst: &Instance, cs: &ChangeSet) -> Instance {
    let deletions: Vec<VertexId> = cs.deletions.iter().copied().collect();
    let mut additions = Vec::new();
    for (&(u, v), &m) in &cs.additions {
        for _ in 0..m {
            additions.push((u, v));
        }
    }
    Instance {
        graph: inst.graph.apply(&deletions, &additions),
        k: inst.k - cs.k_delta,
    }
}

/// Outcome of a single committed pass, handed back to the caller. Marks are
/// not stored in the snapshot; kernelizers thread them explicitly.
#[derive(Debug, Default)]
pub struct Committed {
    pub changed: bool,
    pub marks: Vec<(VertexId, String)>,
    pub applications: u64,
}

/// Runs one pass once: parallel scan over alive vertices in the current
/// worker pool, deterministic merge, single commit. Returns the next
/// snapshot (unchanged when no verdict fired).
pub fn run_pass_once(
    inst: &Instance,
    pass: &PassSpec,
    stats: &mut RoundStats,
) -> Result<(Instance, Committed)> {
    let items: Vec<VertexId> = inst.graph.vertices().collect();
    let scan = (pass.prepare)(inst);
    let verdicts: Vec<Vec<Change>> = items.par_iter().map(|&v| scan(inst, v)).collect();
    stats.work += items.len() as u64;
    let applications = verdicts.iter().filter(|c| !c.is_empty()).count() as u64;
    let cs = merge_verdicts(pass.name, inst, verdicts)?;
    if cs.is_empty() {
        return Ok((inst.clone(), Committed::default()));
    }
    stats.rounds += 1;
    stats.work += cs.change_count();
    stats.record_rule(pass.name, applications);
    let next = apply_changeset(inst, &cs);
    Ok((
        next,
        Committed {
            changed: true,
            marks: cs.marks.iter().cloned().collect(),
            applications,
        },
    ))
}

fn run_fixpoint_inner(
    passes: &[PassSpec],
    inst: &Instance,
    budget: u64,
    mut on_commit: impl FnMut(&'static str, u64),
    sequential: bool,
) -> Result<(Instance, RoundStats)> {
    let mut stats = RoundStats::default();
    let mut current = inst.clone();
    loop {
        let mut sweep_changed = false;
        for pass in passes {
            let items: Vec<VertexId> = current.graph.vertices().collect();
            let scan = (pass.prepare)(&current);
            let verdicts: Vec<Vec<Change>> = if sequential {
                items.iter().map(|&v| scan(&current, v)).collect()
            } else {
                items.par_iter().map(|&v| scan(&current, v)).collect()
            };
            stats.work += items.len() as u64;
            let applications = verdicts.iter().filter(|c| !c.is_empty()).count() as u64;
            let cs = merge_verdicts(pass.name, &current, verdicts)?;
            if cs.is_empty() {
                continue;
            }
            if stats.rounds >= budget {
                return Err(Error::BudgetExceeded {
                    stats,
                    partial: Box::new(current),
                });
            }
            stats.rounds += 1;
            stats.work += cs.change_count();
            stats.record_rule(pass.name, applications);
            current = apply_changeset(&current, &cs);
            sweep_changed = true;
            on_commit(pass.name, applications);
        }
        if !sweep_changed {
            return Ok((current, stats));
        }
    }
}

/// Repeatedly executes the pass list until a full sweep commits no change or
/// the round budget is hit. The result is bit-identical to
/// [`run_sequential_reference`] for any worker count.
pub fn run_to_fixpoint(
    passes: &[PassSpec],
    inst: &Instance,
    budget: u64,
) -> Result<(Instance, RoundStats)> {
    run_fixpoint_inner(passes, inst, budget, |_, _| {}, false)
}

/// Like [`run_to_fixpoint`], additionally returning the sequence of
/// committing passes (pass name, applications) — used to inspect rule
/// alternation.
pub fn run_to_fixpoint_logged(
    passes: &[PassSpec],
    inst: &Instance,
    budget: u64,
) -> Result<(Instance, RoundStats, Vec<(&'static str, u64)>)> {
    let mut log = Vec::new();
    let (out, stats) =
        run_fixpoint_inner(passes, inst, budget, |name, apps| log.push((name, apps)), false)?;
    Ok((out, stats, log))
}

/// Single-threaded reference executor with ascending-id scan order; defines
/// the canonical result that the parallel path must reproduce exactly.
pub fn run_sequential_reference(
    passes: &[PassSpec],
    inst: &Instance,
    budget: u64,
) -> Result<(Instance, RoundStats)> {
    run_fixpoint_inner(passes, inst, budget, |_, _| {}, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fvs;
    use crate::gen::random_multigraph;
    use crate::graph::MultiGraph;

    fn loop_inst() -> Instance {
        Instance::new(MultiGraph::build(1, &[(0, 0)]).unwrap(), 1)
    }

    #[test]
    fn loop_pass_on_self_loop() {
        let (out, stats) =
            run_to_fixpoint(&[fvs::loop_rule_pass_spec()], &loop_inst(), u64::MAX).unwrap();
        assert_eq!(out.graph.vertex_count(), 0);
        assert_eq!(out.k, 0);
        assert_eq!(stats.rounds, 1);
    }

    #[test]
    fn empty_graph_is_identity() {
        let inst = Instance::new(MultiGraph::empty(0), 3);
        let passes = [fvs::loop_rule_pass_spec(), fvs::chain_rule_pass_spec()];
        let (out, stats) = run_to_fixpoint(&passes, &inst, u64::MAX).unwrap();
        assert_eq!(out, inst);
        assert_eq!(stats.rounds, 0);
        assert_eq!(stats.work, 0);
    }

    #[test]
    fn budget_exceeded_carries_partial_stats() {
        let err = run_to_fixpoint(&[fvs::loop_rule_pass_spec()], &loop_inst(), 0).unwrap_err();
        match err {
            Error::BudgetExceeded { stats, partial } => {
                assert_eq!(stats.rounds, 0);
                assert_eq!(partial.graph.vertex_count(), 1);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn conflicting_verdicts_are_hard_errors() {
        // delete v and simultaneously add an edge at v
        let pass = PassSpec::per_item("conflicting", |_inst, v| {
            if v == 0 {
                vec![Change::DeleteVertex(0)]
            } else {
                vec![Change::AddEdge(0, 1)]
            }
        });
        let inst = Instance::new(MultiGraph::empty(2), 0);
        let err = run_to_fixpoint(&[pass], &inst, u64::MAX).unwrap_err();
        assert!(matches!(err, Error::CommitConflict { .. }));
    }

    #[test]
    fn double_delete_is_a_conflict() {
        let pass = PassSpec::per_item("double-delete", |_inst, _v| vec![Change::DeleteVertex(0)]);
        let inst = Instance::new(MultiGraph::empty(2), 0);
        assert!(matches!(
            run_to_fixpoint(&[pass], &inst, u64::MAX),
            Err(Error::CommitConflict { .. })
        ));
    }

    #[test]
    fn k_decrements_sum_once_per_commit() {
        let g = MultiGraph::build(3, &[(0, 0), (1, 1), (2, 2)]).unwrap();
        let (out, stats) =
            run_to_fixpoint(&[fvs::loop_rule_pass_spec()], &Instance::new(g, 1), u64::MAX)
                .unwrap();
        assert_eq!(out.k, -2, "three simultaneous loop deletions, one commit");
        assert_eq!(stats.rounds, 1);
    }

    fn rule_passes() -> Vec<PassSpec> {
        vec![
            fvs::leaf_rule_pass_spec(),
            fvs::chain_rule_pass_spec(),
            fvs::loop_rule_pass_spec(),
        ]
    }

    #[test]
    fn parallel_equals_sequential_reference_on_random_multigraphs() {
        for seed in 0..100u64 {
            let g = random_multigraph(10, seed);
            let inst = Instance::new(g, 6);
            let (a, sa) = run_to_fixpoint(&rule_passes(), &inst, u64::MAX).unwrap();
            let (b, sb) = run_sequential_reference(&rule_passes(), &inst, u64::MAX).unwrap();
            assert_eq!(a, b, "snapshot mismatch for seed {seed}");
            assert_eq!(sa, sb, "stats mismatch for seed {seed}");
            assert_eq!(a.graph.to_text(), b.graph.to_text());
        }
    }

    #[test]
    fn work_bound_holds() {
        for seed in 0..40u64 {
            let g = random_multigraph(12, seed);
            let size = (g.vertex_count() + g.edge_count() + 1) as u64;
            let inst = Instance::new(g, 6);
            let (_, stats) = run_to_fixpoint(&rule_passes(), &inst, u64::MAX).unwrap();
            assert!(
                stats.work <= WORK_FACTOR * size * (stats.rounds + 1),
                "work {} exceeds bound for seed {seed}",
                stats.work
            );
        }
    }

    #[test]
    fn stats_serialize_shape() {
        let mut stats = RoundStats::default();
        stats.rounds = 2;
        stats.work = 10;
        stats.record_rule("loop", 3);
        let json = serde_json::to_string(&stats).unwrap();
        assert_eq!(json, r#"{"rounds":2,"work":10,"perRule":{"loop":3}}"#);
    }
}
