//! Scale-by-scale construction of the tower's event stream.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use super::stream::{Event, EventStream, Mode, StreamHeader};
use crate::barycentric::flags_with_top;
use crate::cubical::{ActiveVertexMap, CubicalComplex, Face, FaceKind};
use crate::geometry::{Metric, PointCloud};
use crate::lattice::{Ladder, ShiftSequence, MAX_SCALE};
use crate::{Error, Result, MAX_DIM};

/// The grid spacings used by a tower: `α_s = λ·2^s` for `s = 0..=m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleLadder {
    pub lambda: f64,
    pub m: u32,
}

impl ScaleLadder {
    pub fn alpha(&self, s: u32) -> f64 {
        self.lambda * (1u64 << s) as f64
    }

    /// Smallest `m` with `λ·2^m ≥ diameter`.
    pub fn covering(lambda: f64, diameter: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        let mut m = 0;
        while lambda * ((1u64 << m) as f64) < diameter {
            m += 1;
            if m > MAX_SCALE {
                return Err(Error::InvalidParameter(format!(
                    "diameter {diameter} needs more than {MAX_SCALE} doublings of {lambda}"
                )));
            }
        }
        Ok(ScaleLadder { lambda, m })
    }
}

/// `λ = CP_∞(P)/(3d)` and the smallest `m` with `α_m ≥ diam_∞(P)`.
///
/// A single point gets `λ = 1` and `m = 0`.
pub fn relevant_scales(cloud: &PointCloud) -> Result<ScaleLadder> {
    if cloud.len() == 1 {
        return Ok(ScaleLadder { lambda: 1.0, m: 0 });
    }
    let (_, _, cp) = cloud.closest_pair(Metric::LInf)?;
    let lambda = cp / (3 * cloud.dim()) as f64;
    ScaleLadder::covering(lambda, cloud.diameter(Metric::LInf))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TowerConfig {
    pub mode: Mode,
    /// Largest simplex dimension kept in the simplicial tower, capped at `d`.
    pub k: usize,
    pub seed: u64,
    /// Explicit sign vectors; when absent they are drawn from `seed`.
    pub shifts: Option<Vec<Vec<i8>>>,
    /// Replaces the closest-pair choice of `λ`.
    pub lambda: Option<f64>,
    /// Upper limit on `m`.
    pub max_scales: Option<u32>,
    /// Refuse to emit more than this many inclusions.
    pub guard_cells: u64,
    /// Recorded in the header only; the construction itself is in `L∞`.
    pub metric: Metric,
}

impl Default for TowerConfig {
    fn default() -> Self {
        TowerConfig {
            mode: Mode::Simplicial,
            k: 2,
            seed: 0,
            shifts: None,
            lambda: None,
            max_scales: None,
            guard_cells: 10_000_000,
            metric: Metric::LInf,
        }
    }
}

/// Bookkeeping for one face introduced by the builder.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceRecord {
    pub id: usize,
    pub scale: u32,
    pub face: Face,
    pub kind: FaceKind,
}

/// A built tower: the stream plus the grids and faces behind it.
#[derive(Debug, Clone)]
pub struct Tower {
    pub stream: EventStream,
    pub ladder: Ladder,
    pub faces: Vec<FaceRecord>,
}

impl Tower {
    /// Number of faces introduced as active faces.
    pub fn active_face_count(&self) -> usize {
        self.faces
            .iter()
            .filter(|f| f.kind == FaceKind::Active)
            .count()
    }
}

pub fn build_simplicial_tower(cloud: &PointCloud, k: usize, seed: u64) -> Result<Tower> {
    build_tower(
        cloud,
        &TowerConfig {
            k,
            seed,
            ..TowerConfig::default()
        },
    )
}

pub fn build_cubical_tower(cloud: &PointCloud, seed: u64) -> Result<Tower> {
    build_tower(
        cloud,
        &TowerConfig {
            mode: Mode::Cubical,
            k: cloud.dim(),
            seed,
            ..TowerConfig::default()
        },
    )
}

/// Builds the event stream of the simplicial or cubical tower.
///
/// At every scale the live faces are pushed through the cubical map; faces
/// sharing an image are contracted onto the smallest id, and faces of the
/// next complex that are nobody's image are included. In the simplicial
/// tower every face is a vertex of the order complex and the new simplices
/// are exactly the flags whose top face is new.
pub fn build_tower(cloud: &PointCloud, cfg: &TowerConfig) -> Result<Tower> {
    let d = cloud.dim();
    if d > MAX_DIM {
        return Err(Error::UnsupportedDimension(d));
    }
    let k = cfg.k.min(d);
    let auto = relevant_scales(cloud)?;
    let scales = match cfg.lambda {
        Some(lambda) if cloud.len() > 1 => {
            ScaleLadder::covering(lambda, cloud.diameter(Metric::LInf))?
        }
        Some(lambda) => ScaleLadder::covering(lambda, 0.0)?,
        None => auto,
    };
    let m = cfg.max_scales.map_or(scales.m, |cap| cap.min(scales.m));
    let shifts = match &cfg.shifts {
        Some(s) => ShiftSequence::Explicit(s.clone()),
        None => ShiftSequence::Seeded(cfg.seed),
    };
    let ladder = Ladder::build(scales.lambda, m, d, &shifts)?;
    let header = StreamHeader {
        n: cloud.len(),
        d,
        k,
        metric: cfg.metric,
        seed: cfg.seed,
        lambda: scales.lambda,
        m,
        mode: cfg.mode,
    };

    let mut b = Builder {
        mode: cfg.mode,
        k,
        guard: cfg.guard_cells,
        events: Vec::new(),
        faces: Vec::new(),
        next_id: 0,
        includes: 0,
    };

    let mut active = ActiveVertexMap::locate(ladder.frame(0), cloud);
    let mut complex = CubicalComplex::from_active(&active)?;
    let mut ids: HashMap<Face, usize> = HashMap::new();
    let step = b.include_new(0, &complex, &active, &mut ids)?;
    b.events.push(Event::Scale(ladder.frame(0).alpha()));
    b.events.extend(step);

    for s in 0..m {
        let next_active = active.image(&ladder);
        let next_complex = CubicalComplex::from_active(&next_active)?;
        let mut live: Vec<(usize, Face)> = ids.into_iter().map(|(f, id)| (id, f)).collect();
        live.sort_unstable_by_key(|(id, _)| *id);
        let mut next_ids: HashMap<Face, usize> = HashMap::with_capacity(next_complex.len());
        let mut step = Vec::new();
        for (id, f) in live {
            let g = ladder.face_map(&f);
            if !next_complex.contains(&g) {
                return Err(Error::Internal(format!(
                    "image of a face at scale {s} is missing from the next complex"
                )));
            }
            match next_ids.entry(g) {
                Entry::Occupied(e) => {
                    if cfg.mode == Mode::Simplicial || f.is_vertex() {
                        step.push(Event::Contract {
                            keep: *e.get(),
                            drop: id,
                        });
                    }
                }
                Entry::Vacant(e) => {
                    e.insert(id);
                }
            }
        }
        step.extend(b.include_new(s + 1, &next_complex, &next_active, &mut next_ids)?);
        if !step.is_empty() {
            b.events.push(Event::Scale(ladder.frame(s + 1).alpha()));
            b.events.extend(step);
        }
        active = next_active;
        complex = next_complex;
        ids = next_ids;
    }
    drop(complex);

    Ok(Tower {
        stream: EventStream {
            header,
            events: b.events,
        },
        ladder,
        faces: b.faces,
    })
}

struct Builder {
    mode: Mode,
    k: usize,
    guard: u64,
    events: Vec<Event>,
    faces: Vec<FaceRecord>,
    next_id: usize,
    includes: u64,
}

impl Builder {
    fn fresh(&mut self) -> Result<usize> {
        self.includes += 1;
        if self.includes > self.guard {
            return Err(Error::Guardrail {
                what: "cells",
                needed: u128::from(self.includes),
                limit: u128::from(self.guard),
            });
        }
        let id = self.next_id;
        self.next_id += 1;
        Ok(id)
    }

    /// Includes every face of `complex` missing from `ids`, followed (in the
    /// simplicial tower) by every flag whose top face is new.
    fn include_new(
        &mut self,
        scale: u32,
        complex: &CubicalComplex,
        active: &ActiveVertexMap,
        ids: &mut HashMap<Face, usize>,
    ) -> Result<Vec<Event>> {
        let mut new: Vec<(&Face, FaceKind)> = complex
            .iter()
            .filter(|(f, _)| !ids.contains_key(*f))
            .collect();
        // Active vertices first, in the order of the points they hold.
        let key = |f: &Face| {
            let rep = if f.is_vertex() {
                active.representative(&f.anchor)
            } else {
                None
            };
            (f.dim(), rep.unwrap_or(usize::MAX))
        };
        new.sort_by(|a, b| key(a.0).cmp(&key(b.0)).then_with(|| a.0.cmp(b.0)));

        let mut out = Vec::new();
        for &(f, kind) in &new {
            let id = self.fresh()?;
            ids.insert(f.clone(), id);
            self.faces.push(FaceRecord {
                id,
                scale,
                face: f.clone(),
                kind,
            });
            let (dim, vertices) = match self.mode {
                Mode::Simplicial => (0, Vec::new()),
                Mode::Cubical if f.is_vertex() => (0, Vec::new()),
                Mode::Cubical => {
                    let mut vs: Vec<usize> = f
                        .vertices()
                        .into_iter()
                        .map(|z| ids[&Face::vertex(scale, z)])
                        .collect();
                    vs.sort_unstable();
                    (f.dim(), vs)
                }
            };
            out.push(Event::Include { id, dim, vertices });
        }

        if self.mode == Mode::Simplicial && self.k > 0 {
            let mut flags: Vec<Vec<usize>> = Vec::new();
            for &(top, _) in new.iter().filter(|(f, _)| !f.is_vertex()) {
                for chain in flags_with_top(top, self.k + 1).into_iter().skip(1) {
                    let mut vs: Vec<usize> = chain.iter().map(|f| ids[f]).collect();
                    vs.sort_unstable();
                    flags.push(vs);
                }
            }
            flags.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            for vertices in flags {
                let id = self.fresh()?;
                out.push(Event::Include {
                    id,
                    dim: vertices.len() - 1,
                    vertices,
                });
            }
        }
        Ok(out)
    }
}
