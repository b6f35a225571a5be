//! Kernelization outcomes: either a reduced instance with a trace, or an
//! early yes/no decision with an optional certificate.

use crate::graph::VertexSet;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Answer {
    Yes,
    No,
}

/// One applied-rule record; `detail` is free-form JSON so each kernelizer can
/// record what it needs (deleted sets, partitions, branch taken).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub rule: String,
    pub detail: serde_json::Value,
}

impl TraceRecord {
    pub fn new(rule: &str, detail: serde_json::Value) -> Self {
        TraceRecord {
            rule: rule.to_string(),
            detail,
        }
    }
}

/// Result of a kernelizer, generic over the instance type it reduces
/// (graph instances, structural instances, point sets).
#[derive(Debug, Clone, PartialEq)]
pub enum KernelOutcome<I> {
    Reduced {
        instance: I,
        trace: Vec<TraceRecord>,
    },
    Decided {
        answer: Answer,
        /// For vertex-cover style problems: the cover / feedback set.
        /// For matching: the endpoints of a size-k matching (2k vertices).
        certificate: Option<VertexSet>,
    },
}

impl<I> KernelOutcome<I> {
    pub fn decided(answer: Answer, certificate: Option<VertexSet>) -> Self {
        KernelOutcome::Decided {
            answer,
            certificate,
        }
    }

    pub fn is_decided(&self) -> bool {
        matches!(self, KernelOutcome::Decided { .. })
    }

    pub fn answer(&self) -> Option<Answer> {
        match self {
            KernelOutcome::Decided { answer, .. } => Some(*answer),
            KernelOutcome::Reduced { .. } => None,
        }
    }
}
