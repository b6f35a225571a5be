//! Monotone circuit value problem: circuit type, evaluator, text format, and
//! the gadget multigraph whose reduction behaviour mirrors the evaluation.
//!
//! Every gate becomes a small gadget with two "input" vertices and one
//! "output" vertex. Output vertices are welded to a 3-clique (forming a K4),
//! which keeps their degree above two, so only the Loop Rule can ever delete
//! them. An input vertex has exactly one edge leaving its gadget, to the
//! output vertex of the feeding gate. A wire carries "true" exactly when that
//! edge disappears, and a gadget's output vertex acquires a self-loop (and is
//! deleted) exactly when its gate evaluates to true.

use crate::graph::{MultiGraph, VertexId};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Input(bool),
    And(usize, usize),
    Or(usize, usize),
}

/// Topologically ordered gate list with a single designated output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneCircuit {
    gates: Vec<Gate>,
    output: usize,
}

impl MonotoneCircuit {
    pub fn new(gates: Vec<Gate>, output: usize) -> Result<Self> {
        if gates.is_empty() {
            return Err(Error::Input("circuit has no gates".into()));
        }
        if output >= gates.len() {
            return Err(Error::Input(format!("output gate g{output} does not exist")));
        }
        for (i, gate) in gates.iter().enumerate() {
            match *gate {
                Gate::Input(_) => {}
                Gate::And(a, b) | Gate::Or(a, b) => {
                    if a >= i || b >= i {
                        return Err(Error::Input(format!(
                            "gate g{i} references a non-earlier gate"
                        )));
                    }
                }
            }
        }
        Ok(MonotoneCircuit { gates, output })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn output(&self) -> usize {
        self.output
    }

    /// Standard evaluation in topological order.
    pub fn eval(&self) -> bool {
        let mut values = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let v = match *gate {
                Gate::Input(b) => b,
                Gate::And(a, b) => values[a] && values[b],
                Gate::Or(a, b) => values[a] || values[b],
            };
            values.push(v);
        }
        values[self.output]
    }

    /// Text form: `g<i> = IN <0|1>` / `g<i> = AND g<a> g<b>` / `g<i> = OR ...`
    /// lines, then `out g<i>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, gate) in self.gates.iter().enumerate() {
            let line = match *gate {
                Gate::Input(b) => format!("g{i} = IN {}", u8::from(b)),
                Gate::And(a, b) => format!("g{i} = AND g{a} g{b}"),
                Gate::Or(a, b) => format!("g{i} = OR g{a} g{b}"),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str(&format!("out g{}\n", self.output));
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut gates = Vec::new();
        let mut output = None;
        let parse_ref = |tok: &str, line: usize| -> Result<usize> {
            tok.strip_prefix('g')
                .and_then(|s| s.parse().ok())
                .ok_or(Error::Parse {
                    line,
                    msg: format!("expected gate reference, found '{tok}'"),
                })
        };
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = idx + 1;
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks[0] == "out" {
                if toks.len() != 2 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "expected 'out g<i>'".into(),
                    });
                }
                output = Some(parse_ref(toks[1], lineno)?);
                continue;
            }
            let id = parse_ref(toks[0], lineno)?;
            if id != gates.len() || toks.get(1) != Some(&"=") {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected 'g{} = ...'", gates.len()),
                });
            }
            match toks.get(2) {
                Some(&"IN") if toks.len() == 4 => {
                    let bit = match toks[3] {
                        "0" => false,
                        "1" => true,
                        other => {
                            return Err(Error::Parse {
                                line: lineno,
                                msg: format!("expected 0 or 1, found '{other}'"),
                            })
                        }
                    };
                    gates.push(Gate::Input(bit));
                }
                Some(&"AND") if toks.len() == 5 => {
                    gates.push(Gate::And(parse_ref(toks[3], lineno)?, parse_ref(toks[4], lineno)?));
                }
                Some(&"OR") if toks.len() == 5 => {
                    gates.push(Gate::Or(parse_ref(toks[3], lineno)?, parse_ref(toks[4], lineno)?));
                }
                _ => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "expected IN, AND or OR form".into(),
                    });
                }
            }
        }
        let output = output.ok_or(Error::Parse {
            line: 1,
            msg: "missing 'out' line".into(),
        })?;
        MonotoneCircuit::new(gates, output).map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })
    }
}

/// Per-gate gadget layout inside the generated multigraph.
#[derive(Debug, Clone)]
pub struct GateGadget {
    /// Input vertices (absent for constant gates).
    pub inputs: Option<(VertexId, VertexId)>,
    pub output: VertexId,
    /// The 3-clique welded onto the output vertex.
    pub clique: [VertexId; 3],
    pub internal_edges: Vec<(VertexId, VertexId)>,
}

#[derive(Debug, Clone)]
pub struct GadgetMap {
    pub gadgets: Vec<GateGadget>,
    /// Wire edges: input vertex of a gate -> output vertex of its feeder.
    pub wires: Vec<(VertexId, VertexId)>,
    pub target: VertexId,
}

/// Builds the gadget multigraph for a circuit. The target vertex (output
/// vertex of the output gate) is removed by exhaustive Leaf/Chain/Loop
/// application iff the circuit evaluates to true.
pub fn mcvp_to_graph(c: &MonotoneCircuit) -> Result<(MultiGraph, VertexId)> {
    mcvp_to_graph_with_map(c).map(|(g, map)| (g, map.target))
}

pub fn mcvp_to_graph_with_map(c: &MonotoneCircuit) -> Result<(MultiGraph, GadgetMap)> {
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    let mut gadgets: Vec<GateGadget> = Vec::new();
    let mut wires: Vec<(VertexId, VertexId)> = Vec::new();
    let mut next = 0 as VertexId;
    let mut alloc = |n: u32| {
        let base = next;
        next += n;
        base
    };

    for gate in c.gates() {
        match *gate {
            Gate::Input(bit) => {
                // output vertex + K4 clique; value "true" is a self-loop
                let z = alloc(4);
                let (c1, c2, c3) = (z + 1, z + 2, z + 3);
                let mut internal = vec![
                    (z, c1),
                    (z, c2),
                    (z, c3),
                    (c1, c2),
                    (c1, c3),
                    (c2, c3),
                ];
                if bit {
                    internal.push((z, z));
                }
                edges.extend_from_slice(&internal);
                gadgets.push(GateGadget {
                    inputs: None,
                    output: z,
                    clique: [c1, c2, c3],
                    internal_edges: internal,
                });
            }
            Gate::And(a, b) => {
                // triangle x-y-z: z gets a self-loop only when both incoming
                // wire edges vanish (the x-y path contracts onto z)
                let x = alloc(6);
                let (y, z, c1, c2, c3) = (x + 1, x + 2, x + 3, x + 4, x + 5);
                let internal = vec![
                    (x, y),
                    (x, z),
                    (y, z),
                    (z, c1),
                    (z, c2),
                    (z, c3),
                    (c1, c2),
                    (c1, c3),
                    (c2, c3),
                ];
                edges.extend_from_slice(&internal);
                wires.push((x, gadgets[a].output));
                wires.push((y, gadgets[b].output));
                gadgets.push(GateGadget {
                    inputs: Some((x, y)),
                    output: z,
                    clique: [c1, c2, c3],
                    internal_edges: internal,
                });
            }
            Gate::Or(a, b) => {
                // double edges x=z and y=z: either input alone contracts to a
                // self-loop on z
                let x = alloc(6);
                let (y, z, c1, c2, c3) = (x + 1, x + 2, x + 3, x + 4, x + 5);
                let internal = vec![
                    (x, z),
                    (x, z),
                    (y, z),
                    (y, z),
                    (z, c1),
                    (z, c2),
                    (z, c3),
                    (c1, c2),
                    (c1, c3),
                    (c2, c3),
                ];
                edges.extend_from_slice(&internal);
                wires.push((x, gadgets[a].output));
                wires.push((y, gadgets[b].output));
                gadgets.push(GateGadget {
                    inputs: Some((x, y)),
                    output: z,
                    clique: [c1, c2, c3],
                    internal_edges: internal,
                });
            }
        }
    }

    edges.extend_from_slice(&wires);
    let graph = MultiGraph::build(next as usize, &edges)?;
    let target = gadgets[c.output()].output;
    Ok((
        graph,
        GadgetMap {
            gadgets,
            wires,
            target,
        },
    ))
}
