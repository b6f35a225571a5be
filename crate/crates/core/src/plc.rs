//! Point-line cover kernelization over Z^d with exact arithmetic.
//!
//! Heavy lines (covering at least k'+1 points) are removed in parallel
//! rounds: since two distinct lines share at most one point, deleting all
//! points of several heavy lines at once and decrementing the budget per
//! line is sound. At the fixpoint a yes-instance has at most k'^2 points.

use crate::engine::RoundStats;
use crate::outcome::{Answer, KernelOutcome, TraceRecord};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde_json::json;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

pub type Point = Vec<BigInt>;

/// Distinct points with arbitrary-precision integer coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Point>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Input("dimension must be at least 2".into()));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::Input(format!(
                    "point has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
        }
        let mut sorted = points.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Input("duplicate points".into()));
        }
        Ok(PointSet { dim, points })
    }

    pub fn from_i64(dim: usize, rows: &[&[i64]]) -> Result<Self> {
        let points = rows
            .iter()
            .map(|row| row.iter().map(|&c| BigInt::from(c)).collect())
            .collect();
        PointSet::new(dim, points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// `p plc <d> <n> <k>` header, then n lines of d integers.
    pub fn to_text(&self, k: i64) -> String {
        let mut out = String::new();
        writeln!(out, "p plc {} {} {}", self.dim, self.points.len(), k).unwrap();
        for p in &self.points {
            let row: Vec<String> = p.iter().map(|c| c.to_string()).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<(PointSet, i64)> {
        let mut header: Option<(usize, usize, i64)> = None;
        let mut points: Vec<Point> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = idx + 1;
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line.starts_with('p') {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 5 || toks[1] != "plc" {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "expected 'p plc <d> <n> <k>'".into(),
                    });
                }
                let parse = |s: &str| -> Result<i64> {
                    s.parse().map_err(|_| Error::Parse {
                        line: lineno,
                        msg: format!("bad number '{s}'"),
                    })
                };
                header = Some((parse(toks[2])? as usize, parse(toks[3])? as usize, parse(toks[4])?));
                continue;
            }
            let (dim, ..) = header.ok_or(Error::Parse {
                line: lineno,
                msg: "point row before header".into(),
            })?;
            let coords: Result<Vec<BigInt>> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse().map_err(|_| Error::Parse {
                        line: lineno,
                        msg: format!("bad coordinate '{tok}'"),
                    })
                })
                .collect();
            let coords = coords?;
            if coords.len() != dim {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected {dim} coordinates, found {}", coords.len()),
                });
            }
            points.push(coords);
        }
        let (dim, n, k) = header.ok_or(Error::Parse {
            line: 1,
            msg: "missing 'p plc' header".into(),
        })?;
        if points.len() != n {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header promises {n} points, found {}", points.len()),
            });
        }
        let ps = PointSet::new(dim, points).map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?;
        Ok((ps, k))
    }
}

/// A point set plus the line budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlcInstance {
    pub points: PointSet,
    pub k: i64,
}

pub type PlcOutcome = KernelOutcome<PlcInstance>;

/// True iff p, q, r lie on one line: every 2x2 minor of the matrix
/// [q - p; r - p] vanishes. Exact at any coordinate magnitude.
pub fn collinear(p: &Point, q: &Point, r: &Point) -> Result<bool> {
    let d = p.len();
    if q.len() != d || r.len() != d {
        return Err(Error::Input("dimension mismatch".into()));
    }
    let u: Vec<BigInt> = (0..d).map(|i| &q[i] - &p[i]).collect();
    let w: Vec<BigInt> = (0..d).map(|i| &r[i] - &p[i]).collect();
    for i in 0..d {
        for j in i + 1..d {
            if &u[i] * &w[j] != &u[j] * &w[i] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Canonical key of the affine line through two distinct points: a primitive
/// sign-normalized direction plus the lattice anchor with canonical offset.
/// Any two points spanning the same line produce the same key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LineKey {
    anchor: Vec<BigInt>,
    direction: Vec<BigInt>,
}

impl LineKey {
    pub fn through(p: &Point, q: &Point) -> Result<LineKey> {
        if p.len() != q.len() {
            return Err(Error::Input("dimension mismatch".into()));
        }
        if p == q {
            return Err(Error::Input("identical points span no line".into()));
        }
        let mut dir: Vec<BigInt> = (0..p.len()).map(|i| &q[i] - &p[i]).collect();
        let mut gcd = BigInt::from(0);
        for c in &dir {
            gcd = gcd.gcd(c);
        }
        for c in &mut dir {
            *c = &*c / &gcd;
        }
        // sign-normalize: first nonzero coordinate positive
        let lead = dir.iter().position(|c| *c != BigInt::from(0)).unwrap();
        if dir[lead] < BigInt::from(0) {
            for c in &mut dir {
                *c = -&*c;
            }
        }
        // canonical anchor: subtract the direction until the lead coordinate
        // falls into [0, dir[lead])
        let t = p[lead].div_floor(&dir[lead]);
        let anchor: Vec<BigInt> = (0..p.len()).map(|i| &p[i] - &t * &dir[i]).collect();
        Ok(LineKey {
            anchor,
            direction: dir,
        })
    }
}

/// Point-line-cover kernel: parallel heavy-line removal to fixpoint, then
/// the k'^2 residual test.
pub fn plc_kernel(ps: &PointSet, k: i64) -> Result<(PlcOutcome, RoundStats)> {
    if k < 0 {
        return Err(Error::Input("parameter k must be non-negative".into()));
    }
    let mut stats = RoundStats::default();
    let mut alive: Vec<bool> = vec![true; ps.len()];
    let mut budget = k;
    let mut trace = Vec::new();

    loop {
        let live: Vec<usize> = (0..ps.len()).filter(|&i| alive[i]).collect();
        // group live points by the lines they span, in parallel over anchors
        let maps: Vec<BTreeMap<LineKey, BTreeSet<usize>>> = live
            .par_iter()
            .map(|&i| {
                let mut local: BTreeMap<LineKey, BTreeSet<usize>> = BTreeMap::new();
                for &j in &live {
                    if j > i {
                        let key = LineKey::through(ps.point(i), ps.point(j))
                            .expect("distinct points");
                        local.entry(key).or_default().extend([i, j]);
                    }
                }
                local
            })
            .collect();
        stats.work += live.len() as u64;
        let mut lines: BTreeMap<LineKey, BTreeSet<usize>> = BTreeMap::new();
        for local in maps {
            for (key, pts) in local {
                lines.entry(key).or_default().extend(pts);
            }
        }

        let heavy: Vec<(&LineKey, &BTreeSet<usize>)> = lines
            .iter()
            .filter(|(_, pts)| pts.len() as i64 >= budget + 1)
            .collect();
        if heavy.is_empty() {
            break;
        }
        let removed: BTreeSet<usize> = heavy
            .iter()
            .flat_map(|(_, pts)| pts.iter().copied())
            .collect();
        for &i in &removed {
            alive[i] = false;
        }
        budget -= heavy.len() as i64;
        stats.rounds += 1;
        stats.work += removed.len() as u64 + heavy.len() as u64;
        stats.record_rule("heavy-line", heavy.len() as u64);
        trace.push(TraceRecord::new(
            "heavy-line",
            json!({ "lines": heavy.len(), "points_removed": removed.len() }),
        ));
        if budget < 0 {
            return Ok((PlcOutcome::decided(Answer::No, None), stats));
        }
    }

    let survivors: Vec<Point> = (0..ps.len())
        .filter(|&i| alive[i])
        .map(|i| ps.point(i).clone())
        .collect();
    if survivors.len() as i64 > budget * budget {
        return Ok((PlcOutcome::decided(Answer::No, None), stats));
    }
    let reduced = PointSet::new(ps.dim(), survivors)?;
    Ok((
        PlcOutcome::Reduced {
            instance: PlcInstance {
                points: reduced,
                k: budget,
            },
            trace,
        },
        stats,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_bigint_point_set, random_point_set};
    use crate::oracle::plc_opt;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn pt(coords: &[i64]) -> Point {
        coords.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn collinear_examples() {
        assert!(collinear(&pt(&[0, 0]), &pt(&[1, 1]), &pt(&[2, 2])).unwrap());
        assert!(!collinear(&pt(&[0, 0]), &pt(&[1, 0]), &pt(&[0, 1])).unwrap());
        // the division family (0,0), (x,z), (y,1): collinear iff x = y*z
        assert!(collinear(&pt(&[0, 0]), &pt(&[6, 3]), &pt(&[2, 1])).unwrap());
        assert!(!collinear(&pt(&[0, 0]), &pt(&[7, 3]), &pt(&[2, 1])).unwrap());
        assert!(matches!(
            collinear(&pt(&[0, 0]), &pt(&[1, 1, 1]), &pt(&[2, 2])),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn collinear_matches_rational_slopes_on_big_coordinates() {
        // independent oracle: compare exact rational parameters of r on the
        // line through p and q
        fn rational_check(p: &Point, q: &Point, r: &Point) -> bool {
            let d = p.len();
            let (mut t, mut fixed): (Option<BigRational>, bool) = (None, true);
            for i in 0..d {
                let den = &q[i] - &p[i];
                let num = &r[i] - &p[i];
                if den == BigInt::from(0) {
                    if num != BigInt::from(0) {
                        return false;
                    }
                    continue;
                }
                let ratio = BigRational::new(num, den);
                match &t {
                    None => t = Some(ratio),
                    Some(t0) => fixed &= *t0 == ratio,
                }
            }
            fixed
        }
        for seed in 0..200u64 {
            let ps = random_bigint_point_set(3, 256, seed);
            let (p, q, r) = (ps.point(0), ps.point(1), ps.point(2));
            assert_eq!(
                collinear(p, q, r).unwrap(),
                rational_check(p, q, r),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn line_key_is_canonical() {
        for seed in 0..200u64 {
            let ps = random_bigint_point_set(2, 64, seed);
            let (a, b) = (ps.point(0), ps.point(1));
            // third collinear point c = a + 3 * (b - a)
            let c: Point = (0..2).map(|i| &a[i] + 3 * (&b[i] - &a[i])).collect();
            if c == *a || c == *b {
                continue;
            }
            let k_ab = LineKey::through(a, b).unwrap();
            let k_ac = LineKey::through(a, &c).unwrap();
            let k_cb = LineKey::through(&c, b).unwrap();
            assert_eq!(k_ab, k_ac, "seed {seed}");
            assert_eq!(k_ab, k_cb, "seed {seed}");
        }
    }

    #[test]
    fn kernel_examples() {
        // three collinear points, k = 1: heavy line removed, empty kernel
        let ps = PointSet::from_i64(2, &[&[0, 0], &[1, 1], &[2, 2]]).unwrap();
        let (outcome, stats) = plc_kernel(&ps, 1).unwrap();
        match outcome {
            PlcOutcome::Reduced { instance, .. } => {
                assert_eq!(instance.points.len(), 0);
                assert_eq!(instance.k, 0);
            }
            other => panic!("expected reduced, got {other:?}"),
        }
        assert_eq!(stats.rounds, 1);

        // three points in general position, k = 1: every pair-line is heavy,
        // so three lines leave the budget negative
        let ps = PointSet::from_i64(2, &[&[0, 0], &[1, 0], &[0, 1]]).unwrap();
        let (outcome, _) = plc_kernel(&ps, 1).unwrap();
        assert_eq!(outcome.answer(), Some(Answer::No));

        // empty point set
        let ps = PointSet::from_i64(2, &[]).unwrap();
        let (outcome, _) = plc_kernel(&ps, 0).unwrap();
        match outcome {
            PlcOutcome::Reduced { instance, .. } => assert_eq!(instance.points.len(), 0),
            other => panic!("expected reduced, got {other:?}"),
        }
    }

    #[test]
    fn kernel_preserves_answers_and_bounds() {
        for seed in 0..60u64 {
            let ps = random_point_set(10, seed);
            let truth_opt = plc_opt(&ps).unwrap() as i64;
            for k in 0..=4i64 {
                let (outcome, stats) = plc_kernel(&ps, k).unwrap();
                let truth = truth_opt <= k;
                let derived = match &outcome {
                    PlcOutcome::Decided { answer, .. } => *answer == Answer::Yes,
                    PlcOutcome::Reduced { instance, .. } => {
                        plc_opt(&instance.points).unwrap() as i64 <= instance.k
                    }
                };
                assert_eq!(derived, truth, "seed {seed} k {k}");
                if let PlcOutcome::Reduced { instance, .. } = &outcome {
                    assert!(
                        (instance.points.len() as i64) <= k * k,
                        "size bound, seed {seed} k {k}"
                    );
                }
                assert!(stats.rounds <= (k + 1) as u64, "rounds, seed {seed} k {k}");
            }
        }
    }

    #[test]
    fn text_roundtrip() {
        let ps = PointSet::from_i64(2, &[&[0, 0], &[170, -3], &[55, 99]]).unwrap();
        let text = ps.to_text(4);
        let (back, k) = PointSet::from_text(&text).unwrap();
        assert_eq!(back, ps);
        assert_eq!(k, 4);
        assert_eq!(back.to_text(4), text);
    }

    #[test]
    fn rejects_duplicates() {
        assert!(PointSet::from_i64(2, &[&[1, 2], &[1, 2]]).is_err());
    }
}
