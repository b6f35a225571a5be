//! Exhaustive desk-scale reference solvers.
//!
//! These define ground truth for every answer-preservation and size-bound
//! test. They are intentionally naive and share no logic with the production
//! kernelizers, so differential tests are meaningful. Each solver enforces a
//! hard instance-size limit before any exponential enumeration.

use crate::backdoor::CnfFormula;
use crate::graph::{MultiGraph, VertexId};
use crate::plc::PointSet;
use crate::{Error, Result};
use std::collections::HashMap;

pub const VC_LIMIT: usize = 20;
pub const MATCH_LIMIT: usize = 16;
pub const FVS_LIMIT: usize = 12;
pub const WIDTH_LIMIT: usize = 10;
pub const PLC_LIMIT: usize = 12;
pub const SAT_LIMIT: usize = 16;

fn check_limit(oracle: &'static str, limit: usize, actual: usize) -> Result<()> {
    if actual > limit {
        return Err(Error::OracleRefused {
            oracle,
            limit,
            actual,
        });
    }
    Ok(())
}

/// Minimum vertex cover size, by branching on a maximum-degree vertex:
/// either it is in the cover, or its whole neighborhood is.
pub fn vc_opt(g: &MultiGraph) -> Result<usize> {
    check_limit("vc", VC_LIMIT, g.vertex_count())?;
    if !g.is_simple() {
        return Err(Error::Input("vc oracle expects a simple graph".into()));
    }
    let verts: Vec<VertexId> = g.vertices().collect();
    let adj: HashMap<VertexId, Vec<VertexId>> = verts
        .iter()
        .map(|&v| (v, g.distinct_neighbors(v).collect()))
        .collect();

    fn rec(
        adj: &HashMap<VertexId, Vec<VertexId>>,
        removed: &mut Vec<VertexId>,
        taken: usize,
        best: &mut usize,
    ) {
        if taken >= *best {
            return;
        }
        let deg = |v: VertexId, removed: &Vec<VertexId>| {
            adj[&v]
                .iter()
                .filter(|u| !removed.contains(u))
                .count()
        };
        let pick = adj
            .keys()
            .filter(|v| !removed.contains(v))
            .map(|&v| (deg(v, removed), v))
            .filter(|&(d, _)| d > 0)
            .max_by_key(|&(d, v)| (d, std::cmp::Reverse(v)));
        let Some((_, v)) = pick else {
            *best = taken;
            return;
        };
        // branch 1: v in the cover
        removed.push(v);
        rec(adj, removed, taken + 1, best);
        removed.pop();
        // branch 2: v excluded, so N(v) is in the cover
        let nbrs: Vec<VertexId> = adj[&v]
            .iter()
            .copied()
            .filter(|u| !removed.contains(u))
            .collect();
        removed.push(v);
        for &u in &nbrs {
            removed.push(u);
        }
        rec(adj, removed, taken + nbrs.len(), best);
        for _ in 0..=nbrs.len() {
            removed.pop();
        }
    }

    let mut best = verts.len();
    rec(&adj, &mut Vec::new(), 0, &mut best);
    Ok(best)
}

/// Maximum matching size by vertex branching (self-loops are not matchable;
/// parallel edges do not help).
pub fn match_opt(g: &MultiGraph) -> Result<usize> {
    check_limit("matching", MATCH_LIMIT, g.vertex_count())?;
    let verts: Vec<VertexId> = g.vertices().collect();
    let index: HashMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = verts.len();
    let mut adj = vec![Vec::new(); n];
    for (i, &v) in verts.iter().enumerate() {
        for u in g.distinct_neighbors(v) {
            adj[i].push(index[&u]);
        }
    }

    fn rec(adj: &[Vec<usize>], used: &mut Vec<bool>, from: usize) -> usize {
        let Some(v) = (from..adj.len()).find(|&v| !used[v]) else {
            return 0;
        };
        // v stays unmatched
        used[v] = true;
        let mut best = rec(adj, used, v + 1);
        // or v is matched to some free neighbor
        for &u in &adj[v] {
            if !used[u] {
                used[u] = true;
                best = best.max(1 + rec(adj, used, v + 1));
                used[u] = false;
            }
        }
        used[v] = false;
        best
    }

    Ok(rec(&adj, &mut vec![false; n], 0))
}

/// Minimum feedback vertex set size by subset enumeration; self-loops force
/// inclusion and parallel edges are 2-cycles, both handled by the forest
/// check.
pub fn fvs_opt(g: &MultiGraph) -> Result<usize> {
    check_limit("fvs", FVS_LIMIT, g.vertex_count())?;
    let verts: Vec<VertexId> = g.vertices().collect();
    let n = verts.len();
    for size in 0..=n {
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != size {
                continue;
            }
            let keep: crate::graph::VertexSet = verts
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) == 0)
                .map(|(_, &v)| v)
                .collect();
            if g.induced_subgraph(&keep)?.is_forest() {
                return Ok(size);
            }
        }
    }
    Ok(n)
}

/// Exact tree width, path width and (paper-convention) tree depth by dynamic
/// programming over vertex subsets.
///
/// Tree depth is computed as elimination-forest height h and reported as
/// h - 1 so that it matches the nested-bag decomposition width used by the
/// rest of the toolkit; single vertex: (0, 0, 0), empty graph: (-1, -1, -1).
pub fn width_opt(g: &MultiGraph) -> Result<(i64, i64, i64)> {
    check_limit("width", WIDTH_LIMIT, g.vertex_count())?;
    if !g.is_simple() {
        return Err(Error::Input("width oracle expects a simple graph".into()));
    }
    let verts: Vec<VertexId> = g.vertices().collect();
    let n = verts.len();
    if n == 0 {
        return Ok((-1, -1, -1));
    }
    let mut nbr = vec![0u32; n];
    for (i, &v) in verts.iter().enumerate() {
        for (j, &u) in verts.iter().enumerate() {
            if i != j && g.has_edge(v, u) {
                nbr[i] |= 1 << j;
            }
        }
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };

    // tree width: eliminate vertices one by one; the cost of eliminating v
    // after the set W is the number of un-eliminated vertices reachable from
    // v through W.
    let reach_cost = |w: u32, v: usize| -> i64 {
        let mut seen = 1u32 << v;
        let mut stack = vec![v];
        let mut cost = 0i64;
        while let Some(x) = stack.pop() {
            let mut next = nbr[x] & !seen;
            while next != 0 {
                let y = next.trailing_zeros() as usize;
                next &= next - 1;
                seen |= 1 << y;
                if w & (1 << y) != 0 {
                    stack.push(y);
                } else {
                    cost += 1;
                }
            }
        }
        cost
    };
    let mut tw_dp = vec![i64::MAX; (full as usize) + 1];
    tw_dp[full as usize] = i64::MIN;
    for w in (0..full).rev() {
        let mut best = i64::MAX;
        for v in 0..n {
            if w & (1 << v) != 0 {
                continue;
            }
            let sub = tw_dp[(w | (1 << v)) as usize];
            best = best.min(reach_cost(w, v).max(sub));
        }
        tw_dp[w as usize] = best;
    }
    let tw = tw_dp[0];

    // path width via vertex separation: boundary of a prefix S is the number
    // of its vertices with a neighbor outside S.
    let boundary = |s: u32| -> i64 {
        (0..n)
            .filter(|&v| s & (1 << v) != 0 && nbr[v] & !s != 0)
            .count() as i64
    };
    let mut pw_dp = vec![i64::MAX; (full as usize) + 1];
    pw_dp[0] = 0;
    for s in 1..=full {
        let b = boundary(s);
        let mut best = i64::MAX;
        for v in 0..n {
            if s & (1 << v) != 0 {
                best = best.min(pw_dp[(s & !(1 << v)) as usize]);
            }
        }
        pw_dp[s as usize] = best.max(b);
    }
    let pw = pw_dp[full as usize];

    // tree depth: height of an optimal elimination forest, per component.
    fn td_rec(mask: u32, n: usize, nbr: &[u32], memo: &mut HashMap<u32, i64>) -> i64 {
        if mask == 0 {
            return 0;
        }
        if let Some(&h) = memo.get(&mask) {
            return h;
        }
        // split into connected components of the induced subgraph
        let mut comps = Vec::new();
        let mut rest = mask;
        while rest != 0 {
            let s = rest.trailing_zeros() as usize;
            let mut comp = 1u32 << s;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                let mut cand = nbr[x] & mask & !comp;
                while cand != 0 {
                    let y = cand.trailing_zeros() as usize;
                    cand &= cand - 1;
                    comp |= 1 << y;
                    stack.push(y);
                }
            }
            comps.push(comp);
            rest &= !comp;
        }
        let h = if comps.len() > 1 {
            comps
                .into_iter()
                .map(|c| td_rec(c, n, nbr, memo))
                .max()
                .unwrap()
        } else {
            let mut best = i64::MAX;
            for v in 0..n {
                if mask & (1 << v) != 0 {
                    best = best.min(1 + td_rec(mask & !(1 << v), n, nbr, memo));
                }
            }
            best
        };
        memo.insert(mask, h);
        h
    }
    let td_paper = td_rec(full, n, &nbr, &mut HashMap::new()) - 1;

    Ok((tw, pw, td_paper))
}

/// Minimum number of lines covering all points, over the candidate lines
/// spanned by point pairs plus singleton covers for lone points.
pub fn plc_opt(ps: &PointSet) -> Result<usize> {
    check_limit("plc", PLC_LIMIT, ps.len())?;
    let n = ps.len();
    if n == 0 {
        return Ok(0);
    }
    // candidate line = set of points on the line through some pair
    let mut candidates: Vec<u32> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut mask = (1u32 << i) | (1 << j);
            for r in 0..n {
                if r != i && r != j && crate::plc::collinear(ps.point(i), ps.point(j), ps.point(r))?
                {
                    mask |= 1 << r;
                }
            }
            candidates.push(mask);
        }
    }
    candidates.sort_unstable();
    candidates.dedup();

    fn rec(candidates: &[u32], covered: u32, n: usize, used: usize, best: &mut usize) {
        if used >= *best {
            return;
        }
        let Some(p) = (0..n).find(|&p| covered & (1 << p) == 0) else {
            *best = used;
            return;
        };
        for &line in candidates.iter().filter(|&&l| l & (1 << p) != 0) {
            rec(candidates, covered | line, n, used + 1, best);
        }
        // a line through p alone (no second input point on it)
        rec(candidates, covered | (1 << p), n, used + 1, best);
    }

    let mut best = n;
    rec(&candidates, 0, n, 0, &mut best);
    Ok(best)
}

/// Truth-table satisfiability: first satisfying assignment in ascending
/// binary order (variable 1 = least significant bit), or None.
pub fn sat_opt(phi: &CnfFormula) -> Result<Option<Vec<bool>>> {
    check_limit("sat", SAT_LIMIT, phi.num_vars())?;
    let n = phi.num_vars();
    for mask in 0u64..(1 << n) {
        let assign: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
        if phi.satisfied_by(&assign) {
            return Ok(Some(assign));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_bigint_point_set, random_simple_graph};
    use crate::graph::MultiGraph;

    fn k(n: usize) -> MultiGraph {
        let mut edges = Vec::new();
        for i in 0..n as u32 {
            for j in i + 1..n as u32 {
                edges.push((i, j));
            }
        }
        MultiGraph::build(n, &edges).unwrap()
    }

    fn star(leaves: usize) -> MultiGraph {
        let edges: Vec<_> = (1..=leaves as u32).map(|i| (0, i)).collect();
        MultiGraph::build(leaves + 1, &edges).unwrap()
    }

    fn cycle(n: usize) -> MultiGraph {
        let edges: Vec<_> = (0..n as u32).map(|i| (i, (i + 1) % n as u32)).collect();
        MultiGraph::build(n, &edges).unwrap()
    }

    fn path(n: usize) -> MultiGraph {
        let edges: Vec<_> = (0..n as u32 - 1).map(|i| (i, i + 1)).collect();
        MultiGraph::build(n, &edges).unwrap()
    }

    #[test]
    fn vc_examples() {
        assert_eq!(vc_opt(&k(3)).unwrap(), 2);
        assert_eq!(vc_opt(&star(7)).unwrap(), 1);
        assert_eq!(vc_opt(&MultiGraph::empty(4)).unwrap(), 0);
        assert_eq!(vc_opt(&cycle(4)).unwrap(), 2);
        assert_eq!(vc_opt(&k(5)).unwrap(), 4);
    }

    #[test]
    fn vc_refuses_large() {
        assert!(matches!(
            vc_opt(&MultiGraph::empty(21)),
            Err(Error::OracleRefused { .. })
        ));
    }

    #[test]
    fn match_examples() {
        assert_eq!(match_opt(&path(3)).unwrap(), 1);
        assert_eq!(match_opt(&cycle(4)).unwrap(), 2);
        assert_eq!(match_opt(&k(4)).unwrap(), 2);
        assert_eq!(match_opt(&star(5)).unwrap(), 1);
    }

    #[test]
    fn fvs_examples() {
        assert_eq!(fvs_opt(&k(3)).unwrap(), 1);
        let two_triangles =
            MultiGraph::build(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(fvs_opt(&two_triangles).unwrap(), 2);
        assert_eq!(fvs_opt(&path(5)).unwrap(), 0);
        let loopy = MultiGraph::build(2, &[(0, 0), (0, 1)]).unwrap();
        assert_eq!(fvs_opt(&loopy).unwrap(), 1);
        let dbl = MultiGraph::build(2, &[(0, 1), (0, 1)]).unwrap();
        assert_eq!(fvs_opt(&dbl).unwrap(), 1);
    }

    #[test]
    fn width_examples() {
        assert_eq!(width_opt(&path(4)).unwrap(), (1, 1, 2));
        assert_eq!(width_opt(&cycle(4)).unwrap().0, 2);
        let (tw, pw, _) = width_opt(&k(4)).unwrap();
        assert_eq!((tw, pw), (3, 3));
        assert_eq!(width_opt(&MultiGraph::empty(1)).unwrap(), (0, 0, 0));
        assert_eq!(width_opt(&MultiGraph::empty(0)).unwrap(), (-1, -1, -1));
    }

    #[test]
    fn width_inequalities_on_corpus() {
        // td (paper convention) >= pw >= tw
        for seed in 0..60u64 {
            let g = random_simple_graph(8, 30, seed);
            let (tw, pw, td) = width_opt(&g).unwrap();
            assert!(td >= pw && pw >= tw, "seed {seed}: tw {tw} pw {pw} td {td}");
        }
    }

    #[test]
    fn plc_examples() {
        let collinear3 = PointSet::from_i64(2, &[&[0, 0], &[1, 1], &[2, 2]]).unwrap();
        assert_eq!(plc_opt(&collinear3).unwrap(), 1);
        let general3 = PointSet::from_i64(2, &[&[0, 0], &[1, 0], &[0, 1]]).unwrap();
        assert_eq!(plc_opt(&general3).unwrap(), 2);
        let empty = PointSet::from_i64(2, &[]).unwrap();
        assert_eq!(plc_opt(&empty).unwrap(), 0);
    }

    #[test]
    fn plc_oracle_on_random_bigints() {
        let ps = random_bigint_point_set(6, 64, 9);
        let val = plc_opt(&ps).unwrap();
        assert!(val >= 1 && val <= 3, "line-count bounds: got {val}");
    }

    #[test]
    fn vc_plus_mis_is_n() {
        // independent max-independent-set enumeration as a cross-check
        fn mis(g: &MultiGraph) -> usize {
            let verts: Vec<VertexId> = g.vertices().collect();
            let n = verts.len();
            let mut best = 0;
            for mask in 0u32..(1 << n) {
                let chosen: Vec<VertexId> = verts
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &v)| v)
                    .collect();
                let independent = chosen
                    .iter()
                    .all(|&v| chosen.iter().all(|&u| u == v || !g.has_edge(u, v)));
                if independent {
                    best = best.max(chosen.len());
                }
            }
            best
        }
        for seed in 0..40u64 {
            let g = random_simple_graph(9, 35, seed);
            assert_eq!(
                vc_opt(&g).unwrap() + mis(&g),
                g.vertex_count(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn koenig_on_bipartite_corpus() {
        // on bipartite graphs the matching and cover oracles must agree
        for seed in 0..40u64 {
            let g = crate::gen::random_bipartite_as_multigraph(5, 5, 40, seed);
            assert_eq!(match_opt(&g).unwrap(), vc_opt(&g).unwrap(), "seed {seed}");
        }
    }
}
