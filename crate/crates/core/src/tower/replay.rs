//! Replaying an event stream into complex snapshots, validating it on the way.

use std::collections::{HashMap, HashSet};

use super::stream::{Event, EventStream, Mode};
use crate::{Error, Result};

/// The complex in effect at one scale of a stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub mode: Mode,
    pub alpha: f64,
    /// Simplices (or cubes) as ascending lists of live vertex ids, ordered by
    /// length and then lexicographically.
    pub simplices: Vec<Vec<usize>>,
    /// Current representative of every id introduced so far. Ids that are not
    /// vertices map to themselves.
    pub rep: Vec<usize>,
}

impl Snapshot {
    /// Dimension of a simplex, or of a cube from its `2^dim` corners.
    pub fn dim_of(&self, cell: &[usize]) -> usize {
        dim_of(self.mode, cell.len())
    }

    pub fn count_by_dim(&self) -> Vec<usize> {
        let mut counts = Vec::new();
        for s in &self.simplices {
            let p = self.dim_of(s);
            if counts.len() <= p {
                counts.resize(p + 1, 0);
            }
            counts[p] += 1;
        }
        counts
    }

    pub fn of_dim(&self, p: usize) -> impl Iterator<Item = &Vec<usize>> {
        self.simplices.iter().filter(move |s| self.dim_of(s) == p)
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.simplices.last().map(|s| self.dim_of(s))
    }

    /// Whether every simplex is a vertex.
    pub fn is_discrete(&self) -> bool {
        self.simplices.iter().all(|s| s.len() == 1)
    }
}

fn dim_of(mode: Mode, len: usize) -> usize {
    match mode {
        Mode::Simplicial => len - 1,
        Mode::Cubical => len.trailing_zeros() as usize,
    }
}

/// Incremental stream replay with validation.
///
/// Rejects events before the first scale, decreasing scales, non-consecutive
/// ids, references to unknown or contracted vertices, duplicate simplices and
/// simplices whose facets are missing.
#[derive(Debug, Clone)]
pub struct Replayer {
    mode: Mode,
    parent: Vec<usize>,
    is_vertex: Vec<bool>,
    complex: HashSet<Vec<usize>>,
    /// Cubes keyed by their smallest vertex, for facet lookup.
    by_min: HashMap<usize, Vec<Vec<usize>>>,
    dirty: bool,
    alpha: Option<f64>,
    index: usize,
}

impl Replayer {
    pub fn new(mode: Mode) -> Self {
        Replayer {
            mode,
            parent: Vec::new(),
            is_vertex: Vec::new(),
            complex: HashSet::new(),
            by_min: HashMap::new(),
            dirty: false,
            alpha: None,
            index: 0,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    /// Number of ids introduced so far.
    pub fn id_count(&self) -> usize {
        self.parent.len()
    }

    pub fn find(&self, mut id: usize) -> usize {
        while self.parent[id] != id {
            id = self.parent[id];
        }
        id
    }

    pub fn is_live_vertex(&self, id: usize) -> bool {
        id < self.parent.len() && self.is_vertex[id] && self.parent[id] == id
    }

    pub fn len(&self) -> usize {
        self.complex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.complex.is_empty()
    }

    pub fn contains(&mut self, cell: &[usize]) -> bool {
        self.settle();
        self.complex.contains(cell)
    }

    /// Applies one event. `index` is only used in error messages.
    pub fn feed(&mut self, event: &Event) -> Result<()> {
        let index = self.index;
        self.index += 1;
        let bad = |msg: String| Error::malformed(index, msg);
        match event {
            Event::Scale(a) => {
                if let Some(prev) = self.alpha {
                    if *a < prev {
                        return Err(bad(format!("scale {a} follows larger scale {prev}")));
                    }
                }
                self.alpha = Some(*a);
            }
            Event::Include { id, dim, vertices } => {
                if self.alpha.is_none() {
                    return Err(bad("inclusion before the first scale".into()));
                }
                if *id != self.parent.len() {
                    return Err(bad(format!("expected id {}, got {id}", self.parent.len())));
                }
                if *dim == 0 {
                    if !vertices.is_empty() {
                        return Err(bad("a vertex inclusion lists no vertices".into()));
                    }
                    self.parent.push(*id);
                    self.is_vertex.push(true);
                    self.insert(vec![*id]);
                    return Ok(());
                }
                let expected = match self.mode {
                    Mode::Simplicial => dim + 1,
                    Mode::Cubical => {
                        if *dim >= usize::BITS as usize - 1 {
                            return Err(bad(format!("cube dimension {dim} is too large")));
                        }
                        1 << dim
                    }
                };
                if vertices.len() != expected {
                    return Err(bad(format!(
                        "a {dim}-cell needs {expected} vertices, got {}",
                        vertices.len()
                    )));
                }
                if vertices.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(bad("vertex ids must be strictly increasing".into()));
                }
                if let Some(v) = vertices.iter().find(|&&v| !self.is_live_vertex(v)) {
                    return Err(bad(format!("vertex {v} is unknown or contracted")));
                }
                self.settle();
                if self.complex.contains(vertices) {
                    return Err(bad("duplicate inclusion".into()));
                }
                let present = match self.mode {
                    Mode::Simplicial => (0..vertices.len()).all(|i| {
                        let mut f = vertices.clone();
                        f.remove(i);
                        self.complex.contains(&f)
                    }),
                    Mode::Cubical => self.facets_of(vertices).len() == 2 * dim,
                };
                if !present {
                    return Err(bad("some facet has not been included".into()));
                }
                self.parent.push(*id);
                self.is_vertex.push(false);
                self.insert(vertices.clone());
            }
            Event::Contract { keep, drop } => {
                if self.alpha.is_none() {
                    return Err(bad("contraction before the first scale".into()));
                }
                if keep >= drop {
                    return Err(bad(format!(
                        "contraction {keep} <- {drop} must point to a smaller id"
                    )));
                }
                for v in [keep, drop] {
                    if !self.is_live_vertex(*v) {
                        return Err(bad(format!("vertex {v} is unknown or contracted")));
                    }
                }
                self.parent[*drop] = *keep;
                self.dirty = true;
            }
        }
        Ok(())
    }

    /// Cubes of one dimension less whose corners all lie in `cell`.
    pub fn facets_of(&mut self, cell: &[usize]) -> Vec<Vec<usize>> {
        self.settle();
        let want = cell.len() / 2;
        let mut out = Vec::new();
        for v in cell {
            if let Some(list) = self.by_min.get(v) {
                out.extend(
                    list.iter()
                        .filter(|c| {
                            c.len() == want && c.iter().all(|x| cell.binary_search(x).is_ok())
                        })
                        .cloned(),
                );
            }
        }
        out
    }

    fn insert(&mut self, cell: Vec<usize>) {
        if self.mode == Mode::Cubical {
            self.by_min.entry(cell[0]).or_default().push(cell.clone());
        }
        self.complex.insert(cell);
    }

    /// Rewrites every simplex through the pending contractions.
    fn settle(&mut self) {
        if !self.dirty {
            return;
        }
        self.dirty = false;
        let old = std::mem::take(&mut self.complex);
        self.by_min.clear();
        for mut s in old {
            for v in s.iter_mut() {
                *v = self.find(*v);
            }
            s.sort_unstable();
            s.dedup();
            if !self.complex.contains(&s) {
                self.insert(s);
            }
        }
    }

    /// The current complex.
    pub fn snapshot(&mut self) -> Result<Snapshot> {
        self.settle();
        let mut simplices: Vec<Vec<usize>> = self.complex.iter().cloned().collect();
        if self.mode == Mode::Cubical {
            if let Some(s) = simplices.iter().find(|s| !s.len().is_power_of_two()) {
                return Err(Error::malformed(
                    self.index,
                    format!("cell {s:?} is not a cube after contraction"),
                ));
            }
        }
        simplices.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let rep = (0..self.parent.len())
            .map(|id| {
                if self.is_vertex[id] {
                    self.find(id)
                } else {
                    id
                }
            })
            .collect();
        Ok(Snapshot {
            mode: self.mode,
            alpha: self.alpha.unwrap_or(0.0),
            simplices,
            rep,
        })
    }
}

/// Replays `stream`, calling `visit` once at the end of every scale.
pub fn replay_with(
    stream: &EventStream,
    mut visit: impl FnMut(&mut Replayer) -> Result<()>,
) -> Result<()> {
    let mut r = Replayer::new(stream.header.mode);
    for (i, e) in stream.events.iter().enumerate() {
        if matches!(e, Event::Scale(_)) && i > 0 {
            visit(&mut r)?;
        }
        r.feed(e)?;
    }
    if r.alpha().is_some() {
        visit(&mut r)?;
    }
    Ok(())
}

/// Snapshots at every scale of the stream.
pub fn snapshots(stream: &EventStream) -> Result<Vec<Snapshot>> {
    let mut out = Vec::new();
    replay_with(stream, |r| {
        out.push(r.snapshot()?);
        Ok(())
    })?;
    Ok(out)
}

/// The complex at the last scale not exceeding `upto`; empty when the stream
/// has no such scale.
pub fn replay(stream: &EventStream, upto: f64) -> Result<Snapshot> {
    let mut best = None;
    replay_with(stream, |r| {
        if r.alpha().is_some_and(|a| a <= upto) {
            best = Some(r.snapshot()?);
        }
        Ok(())
    })?;
    Ok(best.unwrap_or(Snapshot {
        mode: stream.header.mode,
        alpha: 0.0,
        simplices: Vec::new(),
        rep: Vec::new(),
    }))
}

/// Replays the whole stream, discarding the complexes.
pub fn validate(stream: &EventStream) -> Result<()> {
    replay_with(stream, |r| r.snapshot().map(|_| ()))
}
