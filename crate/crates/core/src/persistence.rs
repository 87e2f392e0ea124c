//! Exact Rips filtrations, boundary-matrix reduction, Betti numbers, and
//! barcodes of towers.
//!
//! All homology is reduced and taken over GF(2).

use std::collections::{HashMap, HashSet};

use crate::cubical::CubicalComplex;
use crate::diagram::{Barcode, Interval};
use crate::geometry::{Metric, PointCloud};
use crate::gf2::{Gf2Matrix, Reducer};
use crate::tower::{snapshots, Event, EventStream, Mode, Snapshot};
use crate::{Error, Result};

/// Simplices with their filtration values, faces before cofaces.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Filtration {
    simplices: Vec<(Vec<usize>, f64)>,
}

impl Filtration {
    /// Checks that values never decrease and that every facet comes earlier.
    pub fn new(simplices: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        let mut seen: HashSet<&[usize]> = HashSet::with_capacity(simplices.len());
        let mut last = f64::NEG_INFINITY;
        for (i, (s, v)) in simplices.iter().enumerate() {
            if s.is_empty() || s.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "simplex {i} is not a sorted vertex list"
                )));
            }
            if v.is_nan() || *v < last {
                return Err(Error::InvalidParameter(format!(
                    "value of simplex {i} decreases"
                )));
            }
            last = *v;
            if s.len() > 1 && !facets(s).all(|f| seen.contains(f.as_slice())) {
                return Err(Error::InvalidParameter(format!(
                    "simplex {i} precedes one of its facets"
                )));
            }
            if !seen.insert(s) {
                return Err(Error::InvalidParameter(format!("simplex {i} is repeated")));
            }
        }
        Ok(Filtration { simplices })
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplices(&self) -> &[(Vec<usize>, f64)] {
        &self.simplices
    }

    /// The first `len` simplices.
    pub fn prefix(&self, len: usize) -> Filtration {
        Filtration {
            simplices: self.simplices[..len].to_vec(),
        }
    }
}

fn facets(s: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0..s.len()).map(move |i| {
        let mut f = s.to_vec();
        f.remove(i);
        f
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
    })
}

/// The Rips filtration up to dimension `max_dim + 1`, each simplex at half
/// its diameter. Ties are broken by dimension, then lexicographically.
pub fn rips_filtration(
    cloud: &PointCloud,
    metric: Metric,
    max_dim: usize,
    guard: u128,
) -> Result<Filtration> {
    let n = cloud.len();
    let top = (max_dim + 2).min(n);
    let needed: u128 = (1..=top)
        .map(|s| binomial(n, s))
        .fold(0, u128::saturating_add);
    if needed > guard {
        return Err(Error::Guardrail {
            what: "Rips simplices",
            needed,
            limit: guard,
        });
    }
    let dist: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| cloud.distance(i, j, metric)).collect())
        .collect();
    let mut out: Vec<(Vec<usize>, f64)> = Vec::with_capacity(needed as usize);
    let mut layer: Vec<(Vec<usize>, f64)> = (0..n).map(|i| (vec![i], 0.0)).collect();
    for size in 1..=top {
        if size > 1 {
            let mut next = Vec::new();
            for (s, diam) in &layer {
                let last = *s.last().expect("nonempty");
                for (v, row) in dist.iter().enumerate().skip(last + 1) {
                    let d = s.iter().map(|&u| row[u]).fold(*diam, f64::max);
                    let mut t = s.clone();
                    t.push(v);
                    next.push((t, d));
                }
            }
            layer = next;
        }
        out.extend(layer.iter().map(|(s, d)| (s.clone(), d / 2.0)));
    }
    out.sort_by(|a, b| {
        a.1.total_cmp(&b.1)
            .then(a.0.len().cmp(&b.0.len()))
            .then_with(|| a.0.cmp(&b.0))
    });
    Ok(Filtration { simplices: out })
}

/// Persistence pairs by filtration index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pairs {
    /// `(birth, death)` index pairs.
    pub finite: Vec<(usize, usize)>,
    /// Indices of simplices creating classes that never die.
    pub essential: Vec<usize>,
}

/// Standard column reduction of the filtration's boundary matrix.
pub fn reduce_pairs(f: &Filtration) -> Pairs {
    let index: HashMap<&[usize], usize> = f
        .simplices
        .iter()
        .enumerate()
        .map(|(i, (s, _))| (s.as_slice(), i))
        .collect();
    let mut reducer = Reducer::default();
    let mut paired = vec![false; f.len()];
    let mut finite = Vec::new();
    for (j, (s, _)) in f.simplices.iter().enumerate() {
        if s.len() == 1 {
            continue;
        }
        let mut col: Vec<usize> = facets(s).map(|t| index[t.as_slice()]).collect();
        col.sort_unstable();
        let col = reducer.reduce(col);
        if let Some(&low) = col.last() {
            paired[low] = true;
            paired[j] = true;
            finite.push((low, j));
            reducer.insert(col);
        }
    }
    let essential = (0..f.len()).filter(|&i| !paired[i]).collect();
    Pairs { finite, essential }
}

/// Reduced barcode in dimensions `0..=max_dim`. The component born first is
/// dropped and zero-length intervals are discarded.
pub fn reduce(f: &Filtration, max_dim: usize) -> Barcode {
    let pairs = reduce_pairs(f);
    let mut bars = Vec::new();
    let value = |i: usize| f.simplices[i].1;
    let dim = |i: usize| f.simplices[i].0.len() - 1;
    for &(b, d) in &pairs.finite {
        if dim(b) <= max_dim && value(d) > value(b) {
            bars.push(Interval::new(dim(b), value(b), value(d)));
        }
    }
    let mut dropped = false;
    for &b in &pairs.essential {
        if dim(b) == 0 && !dropped {
            dropped = true;
            continue;
        }
        if dim(b) <= max_dim {
            bars.push(Interval::new(dim(b), value(b), f64::INFINITY));
        }
    }
    Barcode::new(bars)
}

/// Reduced Betti numbers from simplex counts and boundary ranks:
/// `counts[p]` cells of dimension `p`, `ranks[p]` the rank of the boundary
/// out of dimension `p` (augmented at `p = 0`).
fn betti_from(counts: &[usize], ranks: &[usize]) -> Vec<usize> {
    (0..counts.len())
        .map(|p| counts[p] - ranks[p] - ranks.get(p + 1).copied().unwrap_or(0))
        .collect()
}

/// Reduced Betti numbers of a simplicial complex given as sorted vertex
/// lists, one entry per dimension present. Empty for the empty complex.
pub fn reduced_betti(simplices: &[Vec<usize>]) -> Vec<usize> {
    let top = simplices.iter().map(Vec::len).max().unwrap_or(0);
    if top == 0 {
        return Vec::new();
    }
    let mut by_dim: Vec<Vec<&Vec<usize>>> = vec![Vec::new(); top];
    for s in simplices {
        by_dim[s.len() - 1].push(s);
    }
    let counts: Vec<usize> = by_dim.iter().map(Vec::len).collect();
    let mut ranks = vec![usize::from(counts[0] > 0)];
    for p in 1..top {
        let rows: HashMap<&[usize], usize> = by_dim[p - 1]
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_slice(), i))
            .collect();
        let mut m = Gf2Matrix::new(rows.len());
        for s in &by_dim[p] {
            m.push_col(facets(s).map(|f| rows[f.as_slice()]).collect());
        }
        ranks.push(m.rank());
    }
    betti_from(&counts, &ranks)
}

/// Reduced Betti numbers of a cubical complex.
pub fn cubical_betti(c: &CubicalComplex) -> Result<Vec<usize>> {
    let Some(top) = c.max_dim() else {
        return Ok(Vec::new());
    };
    let counts: Vec<usize> = (0..=top).map(|p| c.faces_of_dim(p).len()).collect();
    let mut ranks = vec![usize::from(counts[0] > 0)];
    for p in 1..=top {
        ranks.push(c.boundary(p)?.rank());
    }
    Ok(betti_from(&counts, &ranks))
}

/// Per-snapshot data for one homology dimension.
struct Level<'a> {
    /// Index of each `p`-simplex.
    index: HashMap<&'a [usize], usize>,
    /// Span of the boundaries of `(p+1)`-simplices.
    boundaries: Reducer,
    /// Cycles representing a basis of reduced `H_p`.
    basis: Vec<Vec<usize>>,
}

fn level(snap: &Snapshot, p: usize) -> Level<'_> {
    let simplices: Vec<&[usize]> = snap.of_dim(p).map(Vec::as_slice).collect();
    let index: HashMap<&[usize], usize> =
        simplices.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut boundaries = Reducer::default();
    for s in snap.of_dim(p + 1) {
        let mut col: Vec<usize> = facets(s).map(|f| index[f.as_slice()]).collect();
        col.sort_unstable();
        boundaries.insert(col);
    }
    let cycles = if p == 0 {
        let mut m = Gf2Matrix::new(1);
        for _ in &simplices {
            m.push_col(vec![0]);
        }
        m.kernel()
    } else {
        let lower: Vec<&[usize]> = snap.of_dim(p - 1).map(Vec::as_slice).collect();
        let rows: HashMap<&[usize], usize> =
            lower.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut m = Gf2Matrix::new(rows.len());
        for s in &simplices {
            m.push_col(facets(s).map(|f| rows[f.as_slice()]).collect());
        }
        m.kernel()
    };
    let mut span = boundaries.clone();
    let basis = cycles
        .into_iter()
        .filter(|z| span.insert(z.clone()))
        .collect();
    Level {
        index,
        boundaries,
        basis,
    }
}

/// Pushes a `p`-chain of `from` into `to` along the tower's vertex maps.
fn push_chain(
    chain: &[usize],
    from: &[&[usize]],
    to: &Snapshot,
    to_level: &Level<'_>,
) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for &c in chain {
        let s = from[c];
        let mut img: Vec<usize> = s.iter().map(|&v| to.rep[v]).collect();
        img.sort_unstable();
        img.dedup();
        if img.len() < s.len() {
            continue;
        }
        let row = *to_level
            .index
            .get(img.as_slice())
            .ok_or_else(|| Error::Internal(format!("image {img:?} is not a simplex")))?;
        out.push(row);
    }
    out.sort_unstable();
    let mut col: Vec<usize> = Vec::with_capacity(out.len());
    for r in out {
        if col.last() == Some(&r) {
            col.pop();
        } else {
            col.push(r);
        }
    }
    Ok(col)
}

/// Ranks `r[i][j]` of the maps `H_p(K_i) → H_p(K_j)` for `i ≤ j` (zero
/// below the diagonal).
pub fn rank_table(snaps: &[Snapshot], p: usize) -> Result<Vec<Vec<usize>>> {
    let levels: Vec<Level<'_>> = snaps.iter().map(|s| level(s, p)).collect();
    let lists: Vec<Vec<&[usize]>> = snaps
        .iter()
        .map(|s| s.of_dim(p).map(Vec::as_slice).collect())
        .collect();
    let t = snaps.len();
    let mut r = vec![vec![0usize; t]; t];
    for i in 0..t {
        r[i][i] = levels[i].basis.len();
        for j in i + 1..t {
            let mut span = levels[j].boundaries.clone();
            for z in &levels[i].basis {
                let img = push_chain(z, &lists[i], &snaps[j], &levels[j])?;
                if span.insert(img) {
                    r[i][j] += 1;
                }
            }
        }
    }
    Ok(r)
}

/// Births at the first scale of a stream whose first complex is a set of
/// isolated vertices are reported at 0: below `α_0` the complex is the same.
fn birth_value(snaps: &[Snapshot], i: usize) -> f64 {
    if i == 0 && snaps[0].is_discrete() {
        0.0
    } else {
        snaps[i].alpha
    }
}

/// Barcode of a simplicial tower in dimensions `0..=max_dim`, from the
/// composite ranks: the multiplicity of `[α_i, α_{j+1})` is
/// `r(i,j) − r(i−1,j) − r(i,j+1) + r(i−1,j+1)`.
pub fn tower_barcode(stream: &EventStream, max_dim: usize) -> Result<Barcode> {
    if stream.header.mode != Mode::Simplicial {
        return Err(Error::InvalidParameter(
            "tower barcodes need a simplicial stream".into(),
        ));
    }
    let snaps = snapshots(stream)?;
    let t = snaps.len();
    let mut bars = Vec::new();
    for p in 0..=max_dim {
        let r = rank_table(&snaps, p)?;
        let at = |i: isize, j: usize| -> i64 {
            if i < 0 || j >= t {
                0
            } else {
                r[i as usize][j] as i64
            }
        };
        for i in 0..t {
            for j in i..t {
                let ii = i as isize;
                let mult = at(ii, j) - at(ii - 1, j) - at(ii, j + 1) + at(ii - 1, j + 1);
                if mult < 0 {
                    return Err(Error::Internal(format!(
                        "negative multiplicity {mult} for H{p} interval ({i}, {j})"
                    )));
                }
                let death = if j + 1 < t {
                    snaps[j + 1].alpha
                } else {
                    f64::INFINITY
                };
                let birth = birth_value(&snaps, i);
                if death > birth {
                    for _ in 0..mult {
                        bars.push(Interval::new(p, birth, death));
                    }
                }
            }
        }
    }
    Ok(Barcode::new(bars))
}

/// Barcode of a simplicial tower by coning: each contraction `j ↦ i` adds the
/// cone over the closed star of `j` with apex `i`, turning the tower into a
/// filtration with the same barcode.
pub fn coning_oracle(stream: &EventStream, max_dim: usize, guard: usize) -> Result<Barcode> {
    if stream.header.mode != Mode::Simplicial {
        return Err(Error::InvalidParameter(
            "coning needs a simplicial stream".into(),
        ));
    }
    let snaps = snapshots(stream)?;
    let mut active: HashSet<Vec<usize>> = HashSet::new();
    let mut all: HashSet<Vec<usize>> = HashSet::new();
    let mut order: Vec<(Vec<usize>, usize)> = Vec::new();
    let mut scale: Option<usize> = None;
    let mut add = |s: Vec<usize>, t: usize, order: &mut Vec<(Vec<usize>, usize)>| -> Result<()> {
        if all.insert(s.clone()) {
            order.push((s, t));
            if order.len() > guard {
                return Err(Error::Guardrail {
                    what: "coned simplices",
                    needed: order.len() as u128,
                    limit: guard as u128,
                });
            }
        }
        Ok(())
    };
    for e in &stream.events {
        match e {
            Event::Scale(_) => scale = Some(scale.map_or(0, |s| s + 1)),
            Event::Include { id, dim, vertices } => {
                let s = if *dim == 0 {
                    vec![*id]
                } else {
                    vertices.clone()
                };
                active.insert(s.clone());
                add(s, scale.unwrap_or(0), &mut order)?;
            }
            Event::Contract { keep, drop } => {
                let t = scale.unwrap_or(0);
                let star: Vec<Vec<usize>> = active
                    .iter()
                    .filter(|s| s.contains(drop))
                    .cloned()
                    .collect();
                let mut closed: HashSet<Vec<usize>> = HashSet::new();
                for s in &star {
                    for bits in 1u32..1 << s.len() {
                        closed.insert(
                            s.iter()
                                .enumerate()
                                .filter(|(b, _)| bits & (1 << b) != 0)
                                .map(|(_, &v)| v)
                                .collect(),
                        );
                    }
                }
                let mut cones: Vec<Vec<usize>> = closed
                    .into_iter()
                    .filter(|s| !s.contains(keep))
                    .map(|mut s| {
                        s.push(*keep);
                        s.sort_unstable();
                        s
                    })
                    .collect();
                cones.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
                for c in cones {
                    add(c, t, &mut order)?;
                }
                for s in star {
                    active.remove(&s);
                    let mut img: Vec<usize> = s
                        .iter()
                        .map(|&v| if v == *drop { *keep } else { v })
                        .collect();
                    img.sort_unstable();
                    img.dedup();
                    active.insert(img);
                }
            }
        }
    }
    let filtration = Filtration {
        simplices: order
            .into_iter()
            .map(|(s, t)| (s, birth_value(&snaps, t)))
            .collect(),
    };
    Ok(reduce(&filtration, max_dim))
}
