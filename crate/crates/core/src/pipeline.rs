//! End-to-end comparison of the tower barcode with the exact Rips barcode.

use crate::diagram::{certify_approximation, Barcode, Certificate};
use crate::geometry::{Metric, PointCloud};
use crate::persistence::{reduce, rips_filtration, tower_barcode};
use crate::tower::{build_tower, Mode, TowerConfig};
use crate::Result;

/// The approximation factor guaranteed for `metric` in dimension `d`, and
/// the factor that rescales the tower barcode to the balanced module.
///
/// In `L∞` the balanced module is `X_{2α}`, so endpoints are halved. In `L2`
/// the Euclidean and `L∞` Rips complexes satisfy `R_α ⊆ R∞_α ⊆ R_{√d·α}`;
/// balancing that pair compares `R∞_α` with `R_{d^{1/4}·α}`, which puts the
/// tower at `X_{2α/d^{1/4}}` and multiplies endpoints by `d^{1/4}/2`.
pub fn balance(metric: Metric, d: usize) -> (f64, f64) {
    match metric {
        Metric::LInf => (2.0, 0.5),
        Metric::L2 => {
            let q = (d as f64).powf(0.25);
            (2.0 * q, q / 2.0)
        }
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub metric: Metric,
    pub claimed: f64,
    /// Tower barcode after rescaling.
    pub tower: Barcode,
    pub rips: Barcode,
    pub certificates: Vec<Certificate>,
}

impl Comparison {
    pub fn passed(&self) -> bool {
        self.certificates.iter().all(|c| c.pass)
    }
}

/// Builds the simplicial tower with skeleton `min(max_dim + 1, d)`, computes
/// both barcodes up to `max_dim`, and certifies every dimension.
pub fn compare(
    cloud: &PointCloud,
    metric: Metric,
    max_dim: usize,
    seed: u64,
    guard: u64,
) -> Result<Comparison> {
    let d = cloud.dim();
    let tower = build_tower(
        cloud,
        &TowerConfig {
            mode: Mode::Simplicial,
            k: (max_dim + 1).min(d),
            seed,
            guard_cells: guard,
            metric,
            ..TowerConfig::default()
        },
    )?;
    let (claimed, factor) = balance(metric, d);
    let approx = tower_barcode(&tower.stream, max_dim)?.scaled(factor)?;
    let rips = reduce(
        &rips_filtration(cloud, metric, max_dim, u128::from(guard))?,
        max_dim,
    );
    let certificates = (0..=max_dim)
        .map(|p| certify_approximation(&approx, &rips, claimed, p))
        .collect();
    Ok(Comparison {
        metric,
        claimed,
        tower: approx,
        rips,
        certificates,
    })
}
