//! Shifted dyadic grids.
//!
//! All grid coordinates are exact integers in units of `u = λ/2`. Frame `s`
//! has spacing `α_s = λ·2^s = 2^{s+1}·u` and its points are
//! `(offset_s + 2^{s+1}·z)·u` for `z ∈ Z^d`. Consecutive offsets satisfy
//! `offset_{s+1} = offset_s + 2^s·ε_s` with `ε_s ∈ {−1,+1}^d`, so a vertex of
//! frame `s` always sits at distance exactly `α_s/2` per coordinate from its
//! image in frame `s+1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cubical::Face;
use crate::{Error, Result, MAX_DIM};

/// Largest scale index; keeps `2^{s+2}` and the offsets inside `i64`.
pub const MAX_SCALE: u32 = 56;

/// Source of the per-scale sign vectors `ε_s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShiftSequence {
    /// Signs drawn from ChaCha8 keyed by the seed, one stream per scale.
    Seeded(u64),
    /// Explicit sign vectors, `signs[s][i] ∈ {−1, +1}`.
    Explicit(Vec<Vec<i8>>),
}

impl ShiftSequence {
    pub fn seeded(seed: u64) -> Self {
        ShiftSequence::Seeded(seed)
    }

    /// The sign vector `ε_s` in dimension `d`.
    pub fn signs(&self, s: u32, d: usize) -> Result<Vec<i8>> {
        match self {
            ShiftSequence::Seeded(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(u64::from(s));
                Ok((0..d)
                    .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
                    .collect())
            }
            ShiftSequence::Explicit(all) => {
                let v = all.get(s as usize).ok_or_else(|| {
                    Error::InvalidParameter(format!("no explicit shift for scale {s}"))
                })?;
                if v.len() != d || v.iter().any(|&e| e != 1 && e != -1) {
                    return Err(Error::InvalidParameter(format!(
                        "explicit shift for scale {s} must be {d} signs in {{-1, +1}}"
                    )));
                }
                Ok(v.clone())
            }
        }
    }
}

/// One grid `G_{α_s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFrame {
    pub scale: u32,
    pub lambda: f64,
    /// Offset of the grid point with index zero, in units of `λ/2`.
    pub offset: Vec<i64>,
}

impl GridFrame {
    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    /// Grid spacing `α_s`.
    pub fn alpha(&self) -> f64 {
        self.lambda * (1u64 << self.scale) as f64
    }

    /// Spacing in units of `λ/2`.
    pub fn step(&self) -> i64 {
        1i64 << (self.scale + 1)
    }

    /// Exact position of `z` in units of `λ/2`.
    pub fn position(&self, z: &[i64]) -> Vec<i64> {
        z.iter()
            .zip(&self.offset)
            .map(|(zi, oi)| oi + self.step() * zi)
            .collect()
    }

    /// World coordinates of `z`.
    pub fn world(&self, z: &[i64]) -> Vec<f64> {
        let u = self.lambda / 2.0;
        self.position(z).into_iter().map(|x| x as f64 * u).collect()
    }

    /// The grid vertex whose half-open cell `[x − α/2, x + α/2)^d` contains `p`.
    pub fn locate(&self, p: &[f64]) -> GridVertex {
        let u = self.lambda / 2.0;
        let alpha = self.alpha();
        let z = p
            .iter()
            .zip(&self.offset)
            .map(|(pi, oi)| ((pi - *oi as f64 * u) / alpha + 0.5).floor() as i64)
            .collect();
        GridVertex {
            scale: self.scale,
            z,
        }
    }
}

/// A point of one grid, by index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridVertex {
    pub scale: u32,
    pub z: Vec<i64>,
}

/// The frames `G_{α_0} … G_{α_m}` of one tower.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    frames: Vec<GridFrame>,
}

impl Ladder {
    /// Builds frames `0..=m`. Frame 0 is `λ·Z^d`; each next offset adds
    /// `2^s·ε_s`.
    pub fn build(lambda: f64, m: u32, d: usize, shifts: &ShiftSequence) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        if d == 0 || d > MAX_DIM {
            return Err(Error::UnsupportedDimension(d));
        }
        if m > MAX_SCALE {
            return Err(Error::InvalidParameter(format!(
                "{m} scales exceed the supported maximum {MAX_SCALE}"
            )));
        }
        let mut frames = Vec::with_capacity(m as usize + 1);
        let mut offset = vec![0i64; d];
        for s in 0..=m {
            frames.push(GridFrame {
                scale: s,
                lambda,
                offset: offset.clone(),
            });
            if s < m {
                let eps = shifts.signs(s, d)?;
                for (o, e) in offset.iter_mut().zip(eps) {
                    *o += (1i64 << s) * i64::from(e);
                }
            }
        }
        Ok(Ladder { frames })
    }

    pub fn frame(&self, s: u32) -> &GridFrame {
        &self.frames[s as usize]
    }

    pub fn frames(&self) -> &[GridFrame] {
        &self.frames
    }

    /// Index of the last frame.
    pub fn top(&self) -> u32 {
        (self.frames.len() - 1) as u32
    }

    pub fn dim(&self) -> usize {
        self.frames[0].dim()
    }

    pub fn lambda(&self) -> f64 {
        self.frames[0].lambda
    }

    /// The sign vector used to build frame `s+1` from frame `s`.
    pub fn shift(&self, s: u32) -> Vec<i8> {
        let (a, b) = (self.frame(s), self.frame(s + 1));
        a.offset
            .iter()
            .zip(&b.offset)
            .map(|(x, y)| ((y - x) >> s) as i8)
            .collect()
    }

    /// Image index of coordinate `i` of a frame-`s` vertex in frame `s+1`.
    fn map_coord(&self, s: u32, i: usize, z: i64) -> i64 {
        let (a, b) = (self.frame(s), self.frame(s + 1));
        let x = a.offset[i] + a.step() * z;
        // x − offset_{s+1} = 2^s·t with t odd; the nearest point of the next
        // frame lies at 2^s·(t ± 1), the other candidate at 3·2^s.
        let t = (x - b.offset[i]) >> s;
        let zn = (t + 1).div_euclid(4);
        debug_assert_eq!((t - 4 * zn).abs(), 1);
        zn
    }

    /// The vertex `g(v)` of frame `s+1` whose cell contains `v`.
    pub fn vertex_map(&self, v: &GridVertex) -> GridVertex {
        let s = v.scale;
        assert!(s < self.top(), "no frame above scale {s}");
        GridVertex {
            scale: s + 1,
            z: v.z
                .iter()
                .enumerate()
                .map(|(i, &zi)| self.map_coord(s, i, zi))
                .collect(),
        }
    }

    /// The face `g(f)`, computed coordinate-wise: every direction of `f` maps
    /// its interval `[a, a+1]` to `[g(a), g(a+1)]` and drops out of the mask
    /// when the two images coincide.
    pub fn face_map(&self, f: &Face) -> Face {
        let s = f.scale;
        assert!(s < self.top(), "no frame above scale {s}");
        let mut anchor = Vec::with_capacity(f.anchor.len());
        let mut mask = 0u32;
        for (i, &a) in f.anchor.iter().enumerate() {
            let lo = self.map_coord(s, i, a);
            if f.mask & (1 << i) != 0 {
                let hi = self.map_coord(s, i, a + 1);
                if hi != lo {
                    debug_assert_eq!(hi, lo + 1);
                    mask |= 1 << i;
                }
            }
            anchor.push(lo);
        }
        Face {
            scale: s + 1,
            anchor,
            mask,
        }
    }
}
