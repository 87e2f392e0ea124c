//! How long a face survives under repeated application of the cubical map.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cubical::Face;
use crate::lattice::{Ladder, ShiftSequence};
use crate::{Error, Result, MAX_DIM};

/// Scales followed per trial; a face alive after this many steps is censored.
pub const SURVIVAL_HORIZON: u32 = 48;

/// Distribution of `Y = min{j : g^j(f) is a vertex}` for a `k`-face.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalReport {
    pub d: usize,
    pub k: usize,
    pub trials: u64,
    /// `histogram[j]` counts trials with `Y = j`.
    pub histogram: Vec<u64>,
    /// Trials still alive after [`SURVIVAL_HORIZON`] steps.
    pub censored: u64,
}

impl SurvivalReport {
    /// Empirical `P(Y > j)`.
    pub fn tail(&self, j: usize) -> f64 {
        let above: u64 = self.histogram.iter().skip(j + 1).sum::<u64>() + self.censored;
        above as f64 / self.trials as f64
    }

    /// Empirical mean of `Y`, counting censored trials at the horizon.
    pub fn mean(&self) -> f64 {
        let total: u64 = self
            .histogram
            .iter()
            .enumerate()
            .map(|(j, c)| j as u64 * c)
            .sum::<u64>()
            + self.censored * u64::from(SURVIVAL_HORIZON);
        total as f64 / self.trials as f64
    }

    pub fn max_observed(&self) -> usize {
        self.histogram.iter().rposition(|&c| c > 0).unwrap_or(0)
    }
}

/// Pushes a fixed `k`-face through `trials` independent shift sequences.
pub fn survival_experiment(d: usize, k: usize, trials: u64, seed: u64) -> Result<SurvivalReport> {
    if d == 0 || d > MAX_DIM {
        return Err(Error::UnsupportedDimension(d));
    }
    if k == 0 || k > d {
        return Err(Error::InvalidParameter(format!(
            "face dimension must lie in 1..={d}, got {k}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter(
            "at least one trial is required".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut histogram = vec![0u64; SURVIVAL_HORIZON as usize + 1];
    let mut censored = 0;
    let start = Face {
        scale: 0,
        anchor: vec![0; d],
        mask: if k == 32 { u32::MAX } else { (1u32 << k) - 1 },
    };
    for _ in 0..trials {
        let ladder = Ladder::build(1.0, SURVIVAL_HORIZON, d, &ShiftSequence::Seeded(rng.gen()))?;
        let mut f = start.clone();
        let mut y = None;
        for j in 1..=SURVIVAL_HORIZON {
            f = ladder.face_map(&f);
            if f.is_vertex() {
                y = Some(j as usize);
                break;
            }
        }
        match y {
            Some(j) => histogram[j] += 1,
            None => censored += 1,
        }
    }
    Ok(SurvivalReport {
        d,
        k,
        trials,
        histogram,
        censored,
    })
}
