//! Counts and size audits over an event stream.

use std::collections::HashSet;

use super::replay::Replayer;
use super::stream::{Event, EventStream, Mode, StreamHeader};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Audit {
    pub name: &'static str,
    pub observed: u128,
    pub bound: Option<u128>,
    pub status: Status,
    pub note: String,
}

impl Audit {
    fn bounded(name: &'static str, observed: u128, bound: u128) -> Self {
        Audit {
            name,
            observed,
            bound: Some(bound),
            status: if observed <= bound {
                Status::Pass
            } else {
                Status::Fail
            },
            note: String::new(),
        }
    }

    fn skipped(name: &'static str, observed: u128, note: &str) -> Self {
        Audit {
            name,
            observed,
            bound: None,
            status: Status::NotApplicable,
            note: note.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleRow {
    pub alpha: f64,
    pub includes: u64,
    pub contractions: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamStats {
    pub header: StreamHeader,
    pub scales: Vec<ScaleRow>,
    pub includes_by_dim: Vec<u64>,
    pub contractions: u64,
    /// Active faces recovered from a cubical stream.
    pub active_faces: Option<u64>,
    pub audits: Vec<Audit>,
}

impl StreamStats {
    pub fn includes(&self) -> u64 {
        self.includes_by_dim.iter().sum()
    }

    /// True when no audit failed.
    pub fn passed(&self) -> bool {
        self.audits.iter().all(|a| a.status != Status::Fail)
    }
}

/// Stirling number of the second kind, saturating at `u128::MAX`.
pub fn stirling2(n: usize, k: usize) -> u128 {
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            row[j] = (j as u128)
                .saturating_mul(row[j])
                .saturating_add(row[j - 1]);
        }
        row[0] = 0;
    }
    row[k]
}

/// `n·6^{d−1}·(2k+4)·(k+3)!·S(d, k+2)`, or `None` when `k + 2 > d`.
pub fn tower_size_bound(n: usize, d: usize, k: usize) -> Option<u128> {
    if k + 2 > d {
        return None;
    }
    let factorial = (1..=(k as u128 + 3)).fold(1u128, |a, b| a.saturating_mul(b));
    Some(
        [
            n as u128,
            6u128.saturating_pow(d as u32 - 1),
            2 * k as u128 + 4,
            factorial,
            stirling2(d, k + 2),
        ]
        .into_iter()
        .fold(1u128, |a, b| a.saturating_mul(b)),
    )
}

/// `n·3^d`: active faces of a tower.
pub fn active_face_bound(n: usize, d: usize) -> u128 {
    (n as u128).saturating_mul(3u128.saturating_pow(d as u32))
}

/// `n·6^d`: cells of a cubical tower.
pub fn cubical_size_bound(n: usize, d: usize) -> u128 {
    (n as u128).saturating_mul(6u128.saturating_pow(d as u32))
}

/// Replays the stream and checks it against the size bounds.
///
/// Active faces can be recovered from a cubical stream whose first scale
/// consists of isolated vertices: those are the occupied grid points, and a
/// later cube is active when its active corners lie in none of its facets.
pub fn stream_stats(stream: &EventStream) -> StreamStats {
    let h = &stream.header;
    let mut scales: Vec<ScaleRow> = Vec::new();
    let mut includes_by_dim: Vec<u64> = Vec::new();
    let mut contractions = 0u64;

    let mut replay = Replayer::new(h.mode);
    let mut failure = None;
    let mut initial: Vec<usize> = Vec::new();
    let mut tracking = h.mode == Mode::Cubical;
    let mut active_reps: Option<HashSet<usize>> = None;
    let mut active = 0u64;

    for (i, e) in stream.events.iter().enumerate() {
        match e {
            Event::Scale(alpha) => scales.push(ScaleRow {
                alpha: *alpha,
                includes: 0,
                contractions: 0,
            }),
            Event::Include { dim, vertices, .. } => {
                if includes_by_dim.len() <= *dim {
                    includes_by_dim.resize(dim + 1, 0);
                }
                includes_by_dim[*dim] += 1;
                if let Some(row) = scales.last_mut() {
                    row.includes += 1;
                }
                if tracking && failure.is_none() {
                    if scales.len() <= 1 {
                        if *dim == 0 {
                            initial.push(replay.id_count());
                            active += 1;
                        } else {
                            tracking = false;
                        }
                    } else if *dim > 0 {
                        let reps = active_reps.get_or_insert_with(|| {
                            initial.iter().map(|&v| replay.find(v)).collect()
                        });
                        let corners: Vec<usize> = vertices
                            .iter()
                            .copied()
                            .filter(|v| reps.contains(v))
                            .collect();
                        if !corners.is_empty()
                            && replay
                                .facets_of(vertices)
                                .iter()
                                .all(|f| !corners.iter().all(|c| f.binary_search(c).is_ok()))
                        {
                            active += 1;
                        }
                    }
                }
            }
            Event::Contract { .. } => {
                contractions += 1;
                if let Some(row) = scales.last_mut() {
                    row.contractions += 1;
                }
                if scales.len() <= 1 {
                    tracking = false;
                }
                active_reps = None;
            }
        }
        if failure.is_none() {
            let boundary = matches!(e, Event::Scale(_)) && i > 0;
            let checked = if boundary {
                replay.snapshot().map(|_| ())
            } else {
                Ok(())
            };
            if let Err(err) = checked.and_then(|_| replay.feed(e)) {
                failure = Some(err.to_string());
            }
        }
    }
    if failure.is_none() && replay.alpha().is_some() {
        if let Err(err) = replay.snapshot() {
            failure = Some(err.to_string());
        }
    }

    let mut audits = vec![Audit {
        name: "well-formed",
        observed: u128::from(failure.is_none()),
        bound: None,
        status: if failure.is_none() {
            Status::Pass
        } else {
            Status::Fail
        },
        note: failure.clone().unwrap_or_default(),
    }];
    audits.push(Audit::bounded(
        "scale events",
        scales.len() as u128,
        u128::from(h.m) + 1,
    ));
    let total: u128 = includes_by_dim.iter().map(|&c| u128::from(c)).sum();
    let active_faces = (tracking && failure.is_none()).then_some(active);
    match h.mode {
        Mode::Simplicial => {
            audits.push(match tower_size_bound(h.n, h.d, h.k) {
                Some(b) => Audit::bounded("simplex inclusions", total, b),
                None => Audit::skipped("simplex inclusions", total, "bound needs k + 2 <= d"),
            });
            audits.push(Audit::skipped(
                "active faces",
                0,
                "face activity is not recorded in a simplicial stream",
            ));
        }
        Mode::Cubical => {
            audits.push(Audit::bounded("cells", total, cubical_size_bound(h.n, h.d)));
            audits.push(match active_faces {
                Some(a) => {
                    Audit::bounded("active faces", u128::from(a), active_face_bound(h.n, h.d))
                }
                None => Audit::skipped(
                    "active faces",
                    0,
                    "first scale is not a set of isolated vertices",
                ),
            });
        }
    }
    StreamStats {
        header: h.clone(),
        scales,
        includes_by_dim,
        contractions,
        active_faces,
        audits,
    }
}
