//! Point clouds and the two metrics used throughout: L∞ (which drives the
//! lattice construction) and Euclidean.

use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use crate::{Error, Result};

/// Distance function on `R^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    LInf,
    L2,
}

impl Metric {
    pub fn distance(self, p: &[f64], q: &[f64]) -> Result<f64> {
        match self {
            Metric::LInf => linf_distance(p, q),
            Metric::L2 => l2_distance(p, q),
        }
    }

    /// Distance without the dimension check, for internal loops over one cloud.
    pub(crate) fn dist_unchecked(self, p: &[f64], q: &[f64]) -> f64 {
        let diffs = p.iter().zip(q).map(|(a, b)| (a - b).abs());
        match self {
            Metric::LInf => diffs.fold(0.0, f64::max),
            Metric::L2 => diffs.map(|x| x * x).sum::<f64>().sqrt(),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::LInf => "linf",
            Metric::L2 => "l2",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linf" => Ok(Metric::LInf),
            "l2" => Ok(Metric::L2),
            other => Err(Error::InvalidParameter(format!("unknown metric `{other}`"))),
        }
    }
}

fn check_dims(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    Ok(())
}

pub fn linf_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    check_dims(p, q)?;
    Ok(Metric::LInf.dist_unchecked(p, q))
}

pub fn l2_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    check_dims(p, q)?;
    Ok(Metric::L2.dist_unchecked(p, q))
}

/// A finite set of distinct points in `R^d`, identified by their index.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Builds a cloud, rejecting empty input, ragged rows, non-finite
    /// coordinates and duplicate points.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyPointCloud)?;
        let dim = first.len();
        if dim == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            if let Some(c) = p.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite { point: i, coord: c });
            }
            coords.extend_from_slice(p);
        }
        let cloud = PointCloud { dim, coords };
        cloud.check_distinct()?;
        Ok(cloud)
    }

    fn check_distinct(&self) -> Result<()> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.point(a)
                .iter()
                .zip(self.point(b))
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        for w in order.windows(2) {
            if self.point(w[0]) == self.point(w[1]) {
                let (i, j) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(Error::DuplicatePoints(i, j));
            }
        }
        Ok(())
    }

    /// Parses the text format: one point per line, coordinates separated by
    /// whitespace and/or commas; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        Self::read(text.as_bytes())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut points = Vec::new();
        let mut dim = None;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let row = trimmed
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<f64>().map_err(|_| Error::Parse {
                        line: lineno + 1,
                        msg: format!("`{t}` is not a number"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            match dim {
                None => dim = Some(row.len()),
                Some(d) if d != row.len() => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: format!("expected {d} coordinates, found {}", row.len()),
                    })
                }
                _ => {}
            }
            points.push(row);
        }
        Self::new(points)
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn distance(&self, i: usize, j: usize, metric: Metric) -> f64 {
        metric.dist_unchecked(self.point(i), self.point(j))
    }

    /// Brute-force closest pair `(i, j, dist)` with `i < j`; ties go to the
    /// lexicographically smallest pair.
    pub fn closest_pair(&self, metric: Metric) -> Result<(usize, usize, f64)> {
        let n = self.len();
        if n < 2 {
            return Err(Error::TooFewPoints { needed: 2, got: n });
        }
        let mut best = (0, 1, f64::INFINITY);
        for i in 0..n {
            for j in i + 1..n {
                let dist = self.distance(i, j, metric);
                if dist < best.2 {
                    best = (i, j, dist);
                }
            }
        }
        if best.2 == 0.0 {
            return Err(Error::DuplicatePoints(best.0, best.1));
        }
        Ok(best)
    }

    /// Largest pairwise distance; zero for a single point.
    pub fn diameter(&self, metric: Metric) -> f64 {
        let n = self.len();
        let mut diam = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                diam = diam.max(self.distance(i, j, metric));
            }
        }
        diam
    }

    /// Diameter over closest-pair distance.
    pub fn spread(&self, metric: Metric) -> Result<f64> {
        let (_, _, cp) = self.closest_pair(metric)?;
        Ok(self.diameter(metric) / cp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cloud(pts: &[&[f64]]) -> PointCloud {
        PointCloud::new(pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn distances() {
        assert_eq!(linf_distance(&[0.0, 0.0], &[1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(linf_distance(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(linf_distance(&[1.0, -1.0], &[-2.0, 1.0]).unwrap(), 3.0);
        assert_eq!(l2_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(l2_distance(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(l2_distance(&[1.0, 1.0], &[2.0, 2.0]).unwrap(), 2f64.sqrt());
        assert!(matches!(
            l2_distance(&[1.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn closest_pair_examples() {
        let p = cloud(&[&[0.0], &[1.0], &[3.0]]);
        assert_eq!(p.closest_pair(Metric::LInf).unwrap(), (0, 1, 1.0));
        let p = cloud(&[&[0.0, 0.0], &[0.0, 2.0], &[5.0, 5.0]]);
        assert_eq!(p.closest_pair(Metric::LInf).unwrap(), (0, 1, 2.0));
        let p = cloud(&[&[0.0, 0.0], &[1.0, 1.0], &[1.0, 0.0]]);
        // (0,2) and (1,2) tie at distance 1; the smaller pair wins.
        assert_eq!(p.closest_pair(Metric::L2).unwrap(), (0, 2, 1.0));
        let single = cloud(&[&[0.0]]);
        assert!(matches!(
            single.closest_pair(Metric::L2),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn diameter_and_spread() {
        let p = cloud(&[&[0.0], &[1.0], &[3.0]]);
        assert_eq!(p.diameter(Metric::LInf), 3.0);
        assert_eq!(p.spread(Metric::LInf).unwrap(), 3.0);
        assert_eq!(cloud(&[&[4.0, 2.0]]).diameter(Metric::L2), 0.0);
        let square = cloud(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(square.diameter(Metric::LInf), 1.0);
        assert_eq!(cloud(&[&[0.0], &[5.0]]).spread(Metric::L2).unwrap(), 1.0);
        let p = cloud(&[&[0.0], &[1.0], &[2.0], &[10.0]]);
        assert_eq!(p.spread(Metric::LInf).unwrap(), 10.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            PointCloud::new(vec![vec![1.0, 2.0], vec![1.0, 2.0]]),
            Err(Error::DuplicatePoints(0, 1))
        ));
        assert!(matches!(
            PointCloud::new(vec![vec![f64::NAN]]),
            Err(Error::NonFinite { .. })
        ));
        assert!(matches!(
            PointCloud::new(vec![]),
            Err(Error::EmptyPointCloud)
        ));
        assert!(matches!(
            PointCloud::new(vec![vec![1.0], vec![1.0, 2.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn parses_text_format() {
        let text = "# header\n0, 1\n\n2 3\n 4,5 \n";
        let p = PointCloud::parse(text).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.point(2), &[4.0, 5.0]);
        assert!(matches!(
            PointCloud::parse("0 1\n2\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            PointCloud::parse("0 x\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    fn triple() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
        (1usize..6).prop_flat_map(|d| {
            let v = prop::collection::vec(-10.0f64..10.0, d);
            (v.clone(), v.clone(), v)
        })
    }

    proptest! {
        #[test]
        fn triangle_inequality((a, b, c) in triple()) {
            for m in [Metric::LInf, Metric::L2] {
                let ab = m.distance(&a, &b).unwrap();
                let bc = m.distance(&b, &c).unwrap();
                let ac = m.distance(&a, &c).unwrap();
                prop_assert!(ac <= ab + bc + 1e-12);
            }
        }

        #[test]
        fn norm_sandwich(p in prop::collection::vec(-10.0f64..10.0, 1..8usize), shift in -5.0f64..5.0) {
            let q: Vec<f64> = p.iter().enumerate().map(|(i, x)| x + shift * (i as f64 + 1.0).sin()).collect();
            let li = linf_distance(&p, &q).unwrap();
            let l2 = l2_distance(&p, &q).unwrap();
            let d = p.len() as f64;
            prop_assert!(li <= l2 + 1e-12);
            prop_assert!(l2 <= d.sqrt() * li + 1e-12);
        }

        #[test]
        fn spread_at_least_one(pts in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 2..12)) {
            if let Ok(cloud) = PointCloud::new(pts) {
                prop_assert!(cloud.spread(Metric::LInf).unwrap() >= 1.0);
                prop_assert!(cloud.spread(Metric::L2).unwrap() >= 1.0);
            }
        }
    }
}
