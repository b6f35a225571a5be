//! Seeded corpus generators for tests and the `gen` CLI verb.
//!
//! All randomness flows through one explicitly seeded ChaCha generator per
//! call; the same (parameters, seed) pair always yields the same instance.

use crate::backdoor::CnfFormula;
use crate::graph::{MultiGraph, VertexId};
use crate::mcvp::{Gate, MonotoneCircuit};
use crate::plc::PointSet;
use num_bigint::{BigInt, Sign};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi style simple graph; `p_percent` is the edge probability in
/// percent.
pub fn random_simple_graph(n: usize, p_percent: u32, seed: u64) -> MultiGraph {
    let mut rng = rng_for(seed);
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in u + 1..n as VertexId {
            if rng.gen_range(0..100) < p_percent {
                edges.push((u, v));
            }
        }
    }
    MultiGraph::build(n, &edges).expect("generated edges are in range")
}

/// Random multigraph with self-loops and parallel edges sprinkled in; the
/// default corpus shape for the reduction-rule tests.
pub fn random_multigraph(n: usize, seed: u64) -> MultiGraph {
    let mut rng = rng_for(seed);
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        if rng.gen_range(0..100) < 10 {
            edges.push((u, u));
        }
        for v in u + 1..n as VertexId {
            if rng.gen_range(0..100) < 25 {
                edges.push((u, v));
                if rng.gen_range(0..100) < 20 {
                    edges.push((u, v));
                }
            }
        }
    }
    MultiGraph::build(n, &edges).expect("generated edges are in range")
}

/// Bipartite graph on vertex sets `0..nl` and `nl..nl+nr`, returned as a
/// plain multigraph (used to cross-check König's theorem).
pub fn random_bipartite_as_multigraph(nl: usize, nr: usize, p_percent: u32, seed: u64) -> MultiGraph {
    let mut rng = rng_for(seed);
    let mut edges = Vec::new();
    for u in 0..nl as VertexId {
        for v in 0..nr as VertexId {
            if rng.gen_range(0..100) < p_percent {
                edges.push((u, nl as VertexId + v));
            }
        }
    }
    MultiGraph::build(nl + nr, &edges).expect("generated edges are in range")
}

/// Bipartite edge list (left index, right index) without the multigraph
/// wrapper.
pub fn random_bipartite_edges(nl: usize, nr: usize, p_percent: u32, seed: u64) -> Vec<(u32, u32)> {
    let mut rng = rng_for(seed);
    let mut edges = Vec::new();
    for u in 0..nl as u32 {
        for v in 0..nr as u32 {
            if rng.gen_range(0..100) < p_percent {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Distinct lattice points in Z^2 with coordinates below one million.
/// Roughly half the points are placed on a few shared lines so that heavy
/// lines actually occur; the rest is scattered.
pub fn random_point_set(n: usize, seed: u64) -> PointSet {
    let mut rng = rng_for(seed);
    let mut pts: Vec<[i64; 2]> = Vec::new();
    let push_unique = |p: [i64; 2], pts: &mut Vec<[i64; 2]>| {
        if !pts.contains(&p) {
            pts.push(p);
        }
    };
    let lines = 1 + n / 4;
    for _ in 0..lines {
        let base = [rng.gen_range(0..1000i64), rng.gen_range(0..1000i64)];
        let dir = loop {
            let d = [rng.gen_range(-9..=9i64), rng.gen_range(-9..=9i64)];
            if d != [0, 0] {
                break d;
            }
        };
        let on_line = rng.gen_range(1..=4usize);
        for _ in 0..on_line {
            if pts.len() >= n {
                break;
            }
            let t = rng.gen_range(0..200i64);
            push_unique([base[0] + t * dir[0], base[1] + t * dir[1]], &mut pts);
        }
    }
    while pts.len() < n {
        push_unique(
            [rng.gen_range(0..1_000_000i64), rng.gen_range(0..1_000_000i64)],
            &mut pts,
        );
    }
    pts.truncate(n);
    let rows: Vec<&[i64]> = pts.iter().map(|p| p.as_slice()).collect();
    PointSet::from_i64(2, &rows).expect("generated points are distinct")
}

/// Distinct points with `bits`-bit coordinates (exercises exact arithmetic).
pub fn random_bigint_point_set(n: usize, bits: usize, seed: u64) -> PointSet {
    let mut rng = rng_for(seed);
    let bytes = bits.div_ceil(8);
    let mut pts: Vec<Vec<BigInt>> = Vec::new();
    while pts.len() < n {
        let coord = |rng: &mut ChaCha8Rng| {
            let mut buf = vec![0u8; bytes];
            rng.fill(&mut buf[..]);
            let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
            BigInt::from_bytes_le(sign, &buf)
        };
        let p = vec![coord(&mut rng), coord(&mut rng)];
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    PointSet::new(2, pts).expect("generated points are distinct")
}

/// Greedy 2-approximate vertex cover (take both endpoints of the smallest
/// uncovered edge); the test harness supplies these as the S parameter of
/// the structural kernels.
pub fn greedy_vertex_cover(g: &MultiGraph) -> crate::graph::VertexSet {
    let mut cover = crate::graph::VertexSet::new();
    loop {
        let uncovered = g.vertices().find_map(|v| {
            g.distinct_neighbors(v)
                .find(|&u| u > v && !cover.contains(v) && !cover.contains(u))
                .map(|u| (v, u))
        });
        match uncovered {
            None => return cover,
            Some((v, u)) => {
                cover.insert(v);
                cover.insert(u);
            }
        }
    }
}

/// Random CNF over `vars` variables with clause widths 1..=4.
pub fn random_cnf(vars: usize, clauses: usize, seed: u64) -> CnfFormula {
    let mut rng = rng_for(seed);
    let mut out = Vec::new();
    for _ in 0..clauses {
        let width = rng.gen_range(1..=4usize).min(vars);
        let mut lits = Vec::new();
        let mut used = Vec::new();
        while lits.len() < width {
            let v = rng.gen_range(1..=vars as i64);
            if used.contains(&v) {
                continue;
            }
            used.push(v);
            lits.push(if rng.gen_bool(0.5) { v } else { -v });
        }
        out.push(lits);
    }
    CnfFormula::new(vars, out).expect("generated clauses are well-formed")
}

/// CNF with a planted small backdoor: clauses are Horn (or 2CNF) except that
/// literals over the first `backdoor` variables are mixed in freely, so a
/// strong backdoor of that size exists by construction.
pub fn random_cnf_with_backdoor(
    vars: usize,
    clauses: usize,
    backdoor: usize,
    two_cnf: bool,
    seed: u64,
) -> CnfFormula {
    let mut rng = rng_for(seed.wrapping_add(0x9e37_79b9));
    let backdoor = backdoor.min(vars);
    let mut out = Vec::new();
    for _ in 0..clauses {
        let mut lits: Vec<i64> = Vec::new();
        let mut used: Vec<i64> = Vec::new();
        // the tractable part of the clause
        let core_width = if two_cnf {
            rng.gen_range(1..=2usize)
        } else {
            rng.gen_range(1..=3usize)
        };
        let mut positives = 0usize;
        while used.len() < core_width.min(vars - backdoor.min(vars)) {
            let v = rng.gen_range(backdoor as i64 + 1..=vars as i64);
            if used.contains(&v) {
                continue;
            }
            used.push(v);
            let positive = if two_cnf {
                rng.gen_bool(0.5)
            } else {
                // Horn: at most one positive literal in the core
                positives == 0 && rng.gen_bool(0.4)
            };
            if positive {
                positives += 1;
                lits.push(v);
            } else {
                lits.push(-v);
            }
        }
        // sprinkle backdoor literals
        for b in 1..=backdoor as i64 {
            if rng.gen_bool(0.35) && !used.contains(&b) {
                used.push(b);
                lits.push(if rng.gen_bool(0.5) { b } else { -b });
            }
        }
        if lits.is_empty() {
            lits.push(if rng.gen_bool(0.5) { 1 } else { -1 });
        }
        out.push(lits);
    }
    CnfFormula::new(vars, out).expect("generated clauses are well-formed")
}

/// Random monotone circuit with `gates` gates in topological order; the last
/// gate is the output.
pub fn random_circuit(gates: usize, seed: u64) -> MonotoneCircuit {
    let mut rng = rng_for(seed);
    let gates = gates.max(1);
    let mut out = Vec::with_capacity(gates);
    for i in 0..gates {
        if i == 0 || rng.gen_range(0..100) < 30 {
            out.push(Gate::Input(rng.gen_bool(0.5)));
        } else {
            let a = rng.gen_range(0..i);
            let b = rng.gen_range(0..i);
            if rng.gen_bool(0.5) {
                out.push(Gate::And(a, b));
            } else {
                out.push(Gate::Or(a, b));
            }
        }
    }
    MonotoneCircuit::new(out, gates - 1).expect("generated circuit is valid")
}
