//! Outcome verification: size-bound and (desk-scale) answer-preservation
//! checks, plus the text envelope the CLI uses to pass outcomes around.

use crate::cover::SizeBound;
use crate::graph::{Instance, MultiGraph, VertexSet};
use crate::oracle;
use crate::outcome::{Answer, KernelOutcome};
use crate::plc::{PlcInstance, PointSet};
use crate::structural::{StructuralInstance, WidthMeasure};
use crate::{Error, Result};
use serde::Serialize;
use std::fmt::Write as _;

/// Problem tag for verification and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    VcBuss,
    VcNt,
    VcThresh { delta: u32 },
    Matching,
    Tw,
    Pw,
    Td,
    Plc,
}

impl Problem {
    pub fn name(&self) -> String {
        match self {
            Problem::VcBuss => "vc-buss".into(),
            Problem::VcNt => "vc-nt".into(),
            Problem::VcThresh { delta } => format!("vc-thresh-{delta}"),
            Problem::Matching => "matching".into(),
            Problem::Tw => "tw".into(),
            Problem::Pw => "pw".into(),
            Problem::Td => "td".into(),
            Problem::Plc => "plc".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SizeCheck {
    pub parameter: u64,
    pub bound: u128,
    pub actual: usize,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnswerCheck {
    pub original: bool,
    pub derived: bool,
    pub preserved: bool,
}

/// Machine-readable verification report.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub problem: String,
    pub size: Option<SizeCheck>,
    pub answer: Option<AnswerCheck>,
    pub warnings: Vec<String>,
    pub pass: bool,
}

impl Report {
    fn assemble(
        problem: String,
        size: Option<SizeCheck>,
        answer: Option<AnswerCheck>,
        warnings: Vec<String>,
    ) -> Report {
        let pass = size.as_ref().map_or(true, |s| s.ok)
            && answer.as_ref().map_or(true, |a| a.preserved);
        Report {
            schema: 1,
            problem,
            size,
            answer,
            warnings,
            pass,
        }
    }
}

fn vc_decision(inst: &Instance) -> Result<bool> {
    Ok(oracle::vc_opt(&inst.graph)? as i64 <= inst.k)
}

fn matching_decision(inst: &Instance) -> Result<bool> {
    Ok(oracle::match_opt(&inst.graph)? as i64 >= inst.k)
}

/// Verifies a graph-problem outcome against its original instance: the
/// advertised size bound, and answer preservation whenever the instances are
/// within oracle limits (an oracle refusal downgrades to size-only).
pub fn verify_graph_outcome(
    original: &Instance,
    outcome: &KernelOutcome<Instance>,
    problem: Problem,
) -> Report {
    let mut warnings = Vec::new();
    let k = original.k.max(0) as u64;

    let size = match (outcome, problem) {
        (KernelOutcome::Decided { .. }, _) => None,
        (KernelOutcome::Reduced { instance, .. }, p) => {
            let bound = match p {
                Problem::VcBuss => SizeBound::BussVertices.eval(k),
                Problem::VcNt => SizeBound::NtVertices.eval(k),
                Problem::Matching => SizeBound::MatchingVertices.eval(k),
                // the wrapper either short-circuits (threshold bound) or
                // delegates (inner bound); the composite guarantee is the max
                Problem::VcThresh { delta } => SizeBound::Threshold { delta }
                    .eval(k)
                    .max(SizeBound::BussVertices.eval(k)),
                _ => unreachable!("graph outcome for graph problems only"),
            };
            let actual = instance.graph.vertex_count();
            Some(SizeCheck {
                parameter: k,
                bound,
                actual,
                ok: (actual as u128) <= bound,
            })
        }
    };

    let decide = |inst: &Instance| -> Result<bool> {
        match problem {
            Problem::Matching => matching_decision(inst),
            _ => vc_decision(inst),
        }
    };
    let answer = match decide(original) {
        Err(e) => {
            warnings.push(format!("oracle refused the original instance: {e}"));
            None
        }
        Ok(truth) => {
            let derived = match outcome {
                KernelOutcome::Decided { answer, certificate } => {
                    if let (Answer::Yes, Some(cert)) = (answer, certificate) {
                        if let Some(w) = check_certificate(original, cert, problem) {
                            warnings.push(w);
                        }
                    }
                    Ok(*answer == Answer::Yes)
                }
                KernelOutcome::Reduced { instance, .. } => decide(instance),
            };
            match derived {
                Err(e) => {
                    warnings.push(format!("oracle refused the reduced instance: {e}"));
                    None
                }
                Ok(derived) => Some(AnswerCheck {
                    original: truth,
                    derived,
                    preserved: truth == derived,
                }),
            }
        }
    };

    Report::assemble(problem.name(), size, answer, warnings)
}

fn check_certificate(original: &Instance, cert: &VertexSet, problem: Problem) -> Option<String> {
    match problem {
        Problem::Matching => {
            // endpoints of a claimed size-k matching
            match original.graph.induced_subgraph(cert) {
                Err(e) => Some(format!("certificate references unknown vertices: {e}")),
                Ok(sub) => match oracle::match_opt(&sub) {
                    Err(e) => Some(format!("certificate too large to verify: {e}")),
                    Ok(nu) => {
                        if (nu as i64) < original.k {
                            Some("matching certificate does not reach k".into())
                        } else {
                            None
                        }
                    }
                },
            }
        }
        _ => {
            let covers = original.graph.vertices().all(|v| {
                original
                    .graph
                    .distinct_neighbors(v)
                    .all(|u| u < v || cert.contains(v) || cert.contains(u))
            });
            if !covers || cert.len() as i64 > original.k {
                Some("cover certificate invalid".into())
            } else {
                None
            }
        }
    }
}

pub fn verify_structural_outcome(
    original: &StructuralInstance,
    outcome: &KernelOutcome<StructuralInstance>,
    measure: WidthMeasure,
) -> Report {
    let mut warnings = Vec::new();
    let s = original.cover.len() as u64;
    let problem = match measure {
        WidthMeasure::TreeWidth => Problem::Tw,
        WidthMeasure::PathWidth => Problem::Pw,
        WidthMeasure::TreeDepth => Problem::Td,
    };

    let size = match outcome {
        KernelOutcome::Decided { .. } => None,
        KernelOutcome::Reduced { instance, .. } => {
            let bound = SizeBound::StructuralVertices.eval(s);
            let actual = instance.graph.vertex_count();
            Some(SizeCheck {
                parameter: s,
                bound,
                actual,
                ok: (actual as u128) <= bound,
            })
        }
    };

    let decide = |g: &MultiGraph, k: i64| -> Result<bool> {
        let (tw, pw, td) = oracle::width_opt(g)?;
        Ok(match measure {
            WidthMeasure::TreeWidth => tw <= k,
            WidthMeasure::PathWidth => pw <= k,
            WidthMeasure::TreeDepth => td <= k,
        })
    };
    let answer = match decide(&original.graph, original.k) {
        Err(e) => {
            warnings.push(format!("oracle refused the original instance: {e}"));
            None
        }
        Ok(truth) => {
            let derived = match outcome {
                KernelOutcome::Decided { answer, .. } => Ok(*answer == Answer::Yes),
                KernelOutcome::Reduced { instance, .. } => decide(&instance.graph, instance.k),
            };
            match derived {
                Err(e) => {
                    warnings.push(format!("oracle refused the reduced instance: {e}"));
                    None
                }
                Ok(derived) => Some(AnswerCheck {
                    original: truth,
                    derived,
                    preserved: truth == derived,
                }),
            }
        }
    };

    Report::assemble(problem.name(), size, answer, warnings)
}

pub fn verify_plc_outcome(original: &PlcInstance, outcome: &KernelOutcome<PlcInstance>) -> Report {
    let mut warnings = Vec::new();
    let k = original.k.max(0) as u64;

    let size = match outcome {
        KernelOutcome::Decided { .. } => None,
        KernelOutcome::Reduced { instance, .. } => {
            let bound = SizeBound::PlcPoints.eval(k);
            let actual = instance.points.len();
            Some(SizeCheck {
                parameter: k,
                bound,
                actual,
                ok: (actual as u128) <= bound,
            })
        }
    };

    let decide = |pi: &PlcInstance| -> Result<bool> {
        Ok(oracle::plc_opt(&pi.points)? as i64 <= pi.k)
    };
    let answer = match decide(original) {
        Err(e) => {
            warnings.push(format!("oracle refused the original instance: {e}"));
            None
        }
        Ok(truth) => match outcome {
            KernelOutcome::Decided { answer, .. } => Some(AnswerCheck {
                original: truth,
                derived: *answer == Answer::Yes,
                preserved: truth == (*answer == Answer::Yes),
            }),
            KernelOutcome::Reduced { instance, .. } => match decide(instance) {
                Err(e) => {
                    warnings.push(format!("oracle refused the reduced instance: {e}"));
                    None
                }
                Ok(derived) => Some(AnswerCheck {
                    original: truth,
                    derived,
                    preserved: truth == derived,
                }),
            },
        },
    };

    Report::assemble(Problem::Plc.name(), size, answer, warnings)
}

/// Text envelope for kernelizer outcomes:
/// `s REDUCED` + `c k <k>` + instance text, or `s YES|NO` + optional
/// `v <ids...>` certificate line.
pub fn format_graph_outcome(outcome: &KernelOutcome<Instance>) -> String {
    let mut out = String::new();
    match outcome {
        KernelOutcome::Decided { answer, certificate } => {
            writeln!(
                out,
                "s {}",
                if *answer == Answer::Yes { "YES" } else { "NO" }
            )
            .unwrap();
            if let Some(cert) = certificate {
                let ids: Vec<String> = cert.iter().map(|v| v.to_string()).collect();
                writeln!(out, "v {}", ids.join(" ")).unwrap();
            }
        }
        KernelOutcome::Reduced { instance, .. } => {
            writeln!(out, "s REDUCED").unwrap();
            writeln!(out, "c k {}", instance.k).unwrap();
            out.push_str(&instance.graph.to_text());
        }
    }
    out
}

pub fn parse_graph_outcome(text: &str) -> Result<KernelOutcome<Instance>> {
    let mut status: Option<&str> = None;
    let mut cert: Option<VertexSet> = None;
    let mut k: Option<i64> = None;
    let mut rest = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = idx + 1;
        if let Some(s) = line.strip_prefix("s ") {
            status = Some(s.trim());
        } else if let Some(v) = line.strip_prefix("v ") {
            let ids: std::result::Result<Vec<u32>, _> =
                v.split_whitespace().map(|t| t.parse()).collect();
            cert = Some(VertexSet::from_iter(ids.map_err(|_| Error::Parse {
                line: lineno,
                msg: "bad certificate id".into(),
            })?));
        } else if let Some(kv) = line.strip_prefix("c k ") {
            k = Some(kv.trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: "bad parameter value".into(),
            })?);
        } else {
            rest.push_str(raw);
            rest.push('\n');
        }
    }
    match status {
        Some("YES") => Ok(KernelOutcome::decided(Answer::Yes, cert)),
        Some("NO") => Ok(KernelOutcome::decided(Answer::No, cert)),
        Some("REDUCED") => {
            let graph = MultiGraph::from_text(&rest)?;
            Ok(KernelOutcome::Reduced {
                instance: Instance::new(
                    graph,
                    k.ok_or(Error::Parse {
                        line: 1,
                        msg: "reduced outcome missing 'c k' line".into(),
                    })?,
                ),
                trace: Vec::new(),
            })
        }
        other => Err(Error::Parse {
            line: 1,
            msg: format!("missing or unknown status line: {other:?}"),
        }),
    }
}

pub fn format_plc_outcome(outcome: &KernelOutcome<PlcInstance>) -> String {
    let mut out = String::new();
    match outcome {
        KernelOutcome::Decided { answer, .. } => {
            writeln!(
                out,
                "s {}",
                if *answer == Answer::Yes { "YES" } else { "NO" }
            )
            .unwrap();
        }
        KernelOutcome::Reduced { instance, .. } => {
            writeln!(out, "s REDUCED").unwrap();
            out.push_str(&instance.points.to_text(instance.k));
        }
    }
    out
}

pub fn parse_plc_outcome(text: &str) -> Result<KernelOutcome<PlcInstance>> {
    let mut status: Option<&str> = None;
    let mut rest = String::new();
    for raw in text.lines() {
        let line = raw.trim();
        if let Some(s) = line.strip_prefix("s ") {
            status = Some(s.trim());
        } else {
            rest.push_str(raw);
            rest.push('\n');
        }
    }
    match status {
        Some("YES") => Ok(KernelOutcome::decided(Answer::Yes, None)),
        Some("NO") => Ok(KernelOutcome::decided(Answer::No, None)),
        Some("REDUCED") => {
            let (points, k) = PointSet::from_text(&rest)?;
            Ok(KernelOutcome::Reduced {
                instance: PlcInstance { points, k },
                trace: Vec::new(),
            })
        }
        other => Err(Error::Parse {
            line: 1,
            msg: format!("missing or unknown status line: {other:?}"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::buss_kernel;
    use crate::outcome::TraceRecord;

    fn inst(n: usize, edges: &[(u32, u32)], k: i64) -> Instance {
        Instance::new(MultiGraph::build(n, edges).unwrap(), k)
    }

    #[test]
    fn buss_no_on_k3_verifies() {
        let original = inst(3, &[(0, 1), (1, 2), (0, 2)], 1);
        let (outcome, _) = buss_kernel(&original).unwrap();
        let report = verify_graph_outcome(&original, &outcome, Problem::VcBuss);
        assert!(report.pass);
        assert!(report.answer.unwrap().preserved);
    }

    #[test]
    fn forged_outcome_fails_size_check() {
        let original = inst(8, &[(0, 1), (2, 3), (4, 5), (6, 7)], 1);
        // claim the whole instance is a 2k kernel for k = 1
        let forged = KernelOutcome::Reduced {
            instance: original.clone(),
            trace: vec![TraceRecord::new("forged", serde_json::json!({}))],
        };
        let report = verify_graph_outcome(&original, &forged, Problem::VcNt);
        assert!(!report.pass);
        assert!(!report.size.unwrap().ok, "8 vertices exceed 2k = 2");
    }

    #[test]
    fn oversized_instance_downgrades_to_size_only() {
        let big = Instance::new(MultiGraph::empty(40), 2);
        let outcome = KernelOutcome::Reduced {
            instance: inst(2, &[(0, 1)], 2),
            trace: vec![],
        };
        let report = verify_graph_outcome(&big, &outcome, Problem::VcBuss);
        assert!(report.answer.is_none());
        assert!(!report.warnings.is_empty());
        assert!(report.pass, "size-only report still passes");
    }

    #[test]
    fn outcome_envelope_roundtrip() {
        let reduced = KernelOutcome::Reduced {
            instance: inst(3, &[(0, 1), (1, 2)], 2),
            trace: vec![],
        };
        let text = format_graph_outcome(&reduced);
        let back = parse_graph_outcome(&text).unwrap();
        match back {
            KernelOutcome::Reduced { instance, .. } => {
                assert_eq!(instance.k, 2);
                assert_eq!(instance.graph.edge_count(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }

        let decided: KernelOutcome<Instance> =
            KernelOutcome::decided(Answer::Yes, Some(VertexSet::from_iter([1, 4])));
        let text = format_graph_outcome(&decided);
        assert_eq!(parse_graph_outcome(&text).unwrap(), decided);
    }
}
