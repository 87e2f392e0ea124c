//! Barcodes and the multiplicative bottleneck distance.
//!
//! Two barcodes are `c`-approximations of each other when their intervals can
//! be partially matched so that matched births and deaths differ by at most a
//! factor `c`, and every unmatched interval `[b, d)` has `d/b ≤ c²`. On a
//! log scale this is the ordinary bottleneck distance.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::format;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

impl Interval {
    pub fn new(dim: usize, birth: f64, death: f64) -> Self {
        Interval { dim, birth, death }
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }
}

/// Persistence intervals of all dimensions, kept sorted by
/// `(dim, birth, death)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Barcode {
    bars: Vec<Interval>,
}

impl Barcode {
    pub fn new(mut bars: Vec<Interval>) -> Self {
        sort(&mut bars);
        Barcode { bars }
    }

    pub fn bars(&self) -> &[Interval] {
        &self.bars
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn in_dim(&self, p: usize) -> Vec<(f64, f64)> {
        self.bars
            .iter()
            .filter(|b| b.dim == p)
            .map(|b| (b.birth, b.death))
            .collect()
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.bars.iter().map(|b| b.dim).max()
    }

    /// Multiplies every endpoint by `factor`; infinite deaths stay infinite.
    pub fn scaled(&self, factor: f64) -> Result<Barcode> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        Ok(Barcode::new(
            self.bars
                .iter()
                .map(|b| Interval::new(b.dim, b.birth * factor, b.death * factor))
                .collect(),
        ))
    }

    /// One `p birth death` line per interval.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for b in &self.bars {
            writeln!(
                out,
                "{} {} {}",
                b.dim,
                format::real(b.birth),
                format::real(b.death)
            )
            .expect("write to string");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Barcode> {
        Self::read(text.as_bytes())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Barcode> {
        let mut bars = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(err("expected `p birth death`"));
            }
            let dim = toks[0].parse().map_err(|_| err("bad dimension"))?;
            let birth = format::parse_real(toks[1])
                .filter(|b| *b >= 0.0)
                .ok_or_else(|| err("bad birth"))?;
            let death = format::parse_real(toks[2]).ok_or_else(|| err("bad death"))?;
            if death.partial_cmp(&birth) != Some(std::cmp::Ordering::Greater) {
                return Err(err("death must exceed birth"));
            }
            bars.push(Interval::new(dim, birth, death));
        }
        Ok(Barcode::new(bars))
    }
}

fn sort(bars: &mut [Interval]) {
    bars.sort_by(|a, b| {
        a.dim
            .cmp(&b.dim)
            .then(a.birth.total_cmp(&b.birth))
            .then(a.death.total_cmp(&b.death))
    });
}

/// `scale_barcode`: multiplies all endpoints by `factor`.
pub fn scale_barcode(b: &Barcode, factor: f64) -> Result<Barcode> {
    b.scaled(factor)
}

/// Multiplicative discrepancy of two endpoints.
fn ratio(x: f64, y: f64) -> f64 {
    match (x.is_infinite(), y.is_infinite()) {
        (true, true) => 1.0,
        (true, false) | (false, true) => f64::INFINITY,
        _ if x == 0.0 && y == 0.0 => 1.0,
        _ if x == 0.0 || y == 0.0 => f64::INFINITY,
        _ => x.max(y) / x.min(y),
    }
}

/// Cost of matching two intervals.
fn match_cost(a: (f64, f64), b: (f64, f64)) -> f64 {
    ratio(a.0, b.0).max(ratio(a.1, b.1))
}

/// Cost of leaving an interval unmatched: the `c` with `d/b = c²`.
fn deletion_cost(a: (f64, f64)) -> f64 {
    if a.1.is_infinite() || a.0 == 0.0 {
        f64::INFINITY
    } else {
        (a.1 / a.0).sqrt()
    }
}

/// Result of a multiplicative bottleneck computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MultiplicativeDistance {
    Finite(f64),
    /// No factor admits a matching (e.g. essential classes differ in count).
    Infinite,
}

impl MultiplicativeDistance {
    pub fn value(self) -> f64 {
        match self {
            MultiplicativeDistance::Finite(c) => c,
            MultiplicativeDistance::Infinite => f64::INFINITY,
        }
    }
}

/// The smallest `c ≥ 1` at which the dimension-`p` intervals of `a` and `b`
/// are `c`-approximations of each other.
///
/// Binary search over the finite set of candidate costs; each probe checks
/// for a perfect matching in the usual bipartite graph where every interval
/// may also be matched to a copy of the diagonal.
pub fn multiplicative_bottleneck(a: &Barcode, b: &Barcode, p: usize) -> MultiplicativeDistance {
    let xs = a.in_dim(p);
    let ys = b.in_dim(p);
    let mut candidates: Vec<f64> = vec![1.0];
    for x in &xs {
        candidates.push(deletion_cost(*x));
        for y in &ys {
            candidates.push(match_cost(*x, *y));
        }
    }
    candidates.extend(ys.iter().map(|y| deletion_cost(*y)));
    candidates.retain(|c| c.is_finite());
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let matcher = Matcher::new(&xs, &ys);
    let Some(&top) = candidates.last() else {
        return MultiplicativeDistance::Infinite;
    };
    if !matcher.feasible(top) {
        return MultiplicativeDistance::Infinite;
    }
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if matcher.feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    MultiplicativeDistance::Finite(candidates[lo])
}

/// Whether a `c`-matching exists between the dimension-`p` intervals.
pub fn is_c_matchable(a: &Barcode, b: &Barcode, p: usize, c: f64) -> bool {
    Matcher::new(&a.in_dim(p), &b.in_dim(p)).feasible(c)
}

struct Matcher<'a> {
    xs: &'a [(f64, f64)],
    ys: &'a [(f64, f64)],
}

impl<'a> Matcher<'a> {
    fn new(xs: &'a [(f64, f64)], ys: &'a [(f64, f64)]) -> Self {
        Matcher { xs, ys }
    }

    /// Left side: xs then diagonal copies of ys. Right side: ys then
    /// diagonal copies of xs.
    fn neighbors(&self, left: usize, c: f64) -> Vec<usize> {
        let (nx, ny) = (self.xs.len(), self.ys.len());
        let mut out = Vec::new();
        if left < nx {
            let x = self.xs[left];
            out.extend((0..ny).filter(|&j| match_cost(x, self.ys[j]) <= c));
            if deletion_cost(x) <= c {
                out.push(ny + left);
            }
        } else {
            let j = left - nx;
            if deletion_cost(self.ys[j]) <= c {
                out.push(j);
            }
            out.extend((0..nx).map(|i| ny + i));
        }
        out
    }

    fn feasible(&self, c: f64) -> bool {
        let size = self.xs.len() + self.ys.len();
        let adj: Vec<Vec<usize>> = (0..size).map(|l| self.neighbors(l, c)).collect();
        let mut match_right: Vec<Option<usize>> = vec![None; size];
        for l in 0..size {
            let mut seen = vec![false; size];
            if !augment(l, &adj, &mut seen, &mut match_right) {
                return false;
            }
        }
        true
    }
}

/// Kuhn's augmenting-path search from left vertex `l`.
fn augment(
    l: usize,
    adj: &[Vec<usize>],
    seen: &mut [bool],
    match_right: &mut [Option<usize>],
) -> bool {
    for &r in &adj[l] {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        if match_right[r].is_none_or(|l2| augment(l2, adj, seen, match_right)) {
            match_right[r] = Some(l);
            return true;
        }
    }
    false
}

/// Outcome of certifying an approximation factor in one dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub dim: usize,
    pub achieved: MultiplicativeDistance,
    pub claimed: f64,
    pub pass: bool,
}

/// Passes iff the achieved factor is at most `claimed·(1 + 1e−9)`.
pub fn certify_approximation(
    approx: &Barcode,
    exact: &Barcode,
    claimed: f64,
    p: usize,
) -> Certificate {
    let achieved = multiplicative_bottleneck(approx, exact, p);
    Certificate {
        dim: p,
        achieved,
        claimed,
        pass: achieved.value() <= claimed * (1.0 + 1e-9),
    }
}
