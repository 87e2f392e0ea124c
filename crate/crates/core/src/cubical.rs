//! Elementary cubes of a shifted grid, the faces spanned by occupied grid
//! points, and the cubical complexes they generate.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use crate::geometry::PointCloud;
use crate::gf2::Gf2Matrix;
use crate::lattice::{GridFrame, GridVertex, Ladder};
use crate::{Error, Result, MAX_DIM};

/// An elementary cube `∏ [anchor_i, anchor_i + [i ∈ mask]]` of frame `scale`,
/// in index coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Face {
    pub scale: u32,
    pub anchor: Vec<i64>,
    pub mask: u32,
}

impl Face {
    pub fn vertex(scale: u32, z: Vec<i64>) -> Self {
        Face {
            scale,
            anchor: z,
            mask: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_vertex(&self) -> bool {
        self.mask == 0
    }

    fn directions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.anchor.len()).filter(move |i| self.mask & (1 << i) != 0)
    }

    /// Index vectors of the `2^dim` corners, in binary order of the mask bits.
    pub fn vertices(&self) -> Vec<Vec<i64>> {
        let dirs: Vec<usize> = self.directions().collect();
        (0u32..1 << dirs.len())
            .map(|bits| {
                let mut z = self.anchor.clone();
                for (b, &i) in dirs.iter().enumerate() {
                    if bits & (1 << b) != 0 {
                        z[i] += 1;
                    }
                }
                z
            })
            .collect()
    }

    pub fn contains_point(&self, z: &[i64]) -> bool {
        self.anchor.iter().zip(z).enumerate().all(|(i, (&a, &x))| {
            if self.mask & (1 << i) != 0 {
                x == a || x == a + 1
            } else {
                x == a
            }
        })
    }

    /// Whether `other ⊆ self`.
    pub fn contains(&self, other: &Face) -> bool {
        if self.scale != other.scale || other.mask & !self.mask != 0 {
            return false;
        }
        self.anchor
            .iter()
            .zip(&other.anchor)
            .enumerate()
            .all(|(i, (&a, &b))| {
                // Fixed directions of `self` and free directions of `other`
                // must agree; a fixed direction of `other` may sit at either end.
                if self.mask & !other.mask & (1 << i) == 0 {
                    a == b
                } else {
                    b == a || b == a + 1
                }
            })
    }

    /// All faces of `self`, itself included (`3^dim` of them).
    pub fn subfaces(&self) -> Vec<Face> {
        let mut out = vec![Face {
            scale: self.scale,
            anchor: self.anchor.clone(),
            mask: 0,
        }];
        for i in self.directions() {
            let mut next = Vec::with_capacity(out.len() * 3);
            for f in out {
                let mut up = f.clone();
                up.anchor[i] += 1;
                let mut full = f.clone();
                full.mask |= 1 << i;
                next.push(f);
                next.push(up);
                next.push(full);
            }
            out = next;
        }
        out
    }

    /// The `2·dim` facets; for each direction the lower one comes first.
    pub fn facets(&self) -> Vec<Face> {
        let mut out = Vec::with_capacity(2 * self.dim());
        for i in self.directions() {
            let mut lo = self.clone();
            lo.mask &= !(1 << i);
            let mut hi = lo.clone();
            hi.anchor[i] += 1;
            out.push(lo);
            out.push(hi);
        }
        out
    }
}

impl Ord for Face {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim()
            .cmp(&other.dim())
            .then_with(|| self.scale.cmp(&other.scale))
            .then_with(|| self.anchor.cmp(&other.anchor))
            .then_with(|| self.mask.cmp(&other.mask))
    }
}

impl PartialOrd for Face {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Occupied grid points of one frame and the input points in each cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveVertexMap {
    pub scale: u32,
    cells: BTreeMap<Vec<i64>, Vec<usize>>,
}

impl ActiveVertexMap {
    /// Locates every point of `cloud` in `frame`.
    pub fn locate(frame: &GridFrame, cloud: &PointCloud) -> Self {
        let mut cells: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
        for (id, p) in cloud.iter().enumerate() {
            cells.entry(frame.locate(p).z).or_default().push(id);
        }
        ActiveVertexMap {
            scale: frame.scale,
            cells,
        }
    }

    /// Builds a map directly from cell contents; lists are sorted on entry.
    pub fn from_cells(scale: u32, cells: impl IntoIterator<Item = (Vec<i64>, Vec<usize>)>) -> Self {
        let mut map: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
        for (z, ids) in cells {
            map.entry(z).or_default().extend(ids);
        }
        for ids in map.values_mut() {
            ids.sort_unstable();
        }
        ActiveVertexMap { scale, cells: map }
    }

    /// The active vertices of the next frame: `v ↦ g(v)`, merging point lists.
    pub fn image(&self, ladder: &Ladder) -> Self {
        let mut cells: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
        for (z, ids) in &self.cells {
            let y = ladder.vertex_map(&GridVertex {
                scale: self.scale,
                z: z.clone(),
            });
            cells.entry(y.z).or_default().extend_from_slice(ids);
        }
        for ids in cells.values_mut() {
            ids.sort_unstable();
        }
        ActiveVertexMap {
            scale: self.scale + 1,
            cells,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, z: &[i64]) -> bool {
        self.cells.contains_key(z)
    }

    pub fn points(&self, z: &[i64]) -> Option<&[usize]> {
        self.cells.get(z).map(Vec::as_slice)
    }

    /// The section `b`: the smallest point id in the cell of `z`.
    pub fn representative(&self, z: &[i64]) -> Option<usize> {
        self.points(z).map(|ids| ids[0])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &Vec<usize>)> {
        self.cells.iter()
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.cells.keys()
    }
}

/// Whether `f` is spanned by the active vertices: its active corners are
/// nonempty and lie in no facet, i.e. every direction of `f` is witnessed by
/// two active corners that differ there.
pub fn is_spanned(f: &Face, active: &ActiveVertexMap) -> bool {
    let mut seen_lo = 0u32;
    let mut seen_hi = 0u32;
    let mut any = false;
    for z in f.vertices() {
        if !active.contains(&z) {
            continue;
        }
        any = true;
        for i in f.directions() {
            if z[i] == f.anchor[i] {
                seen_lo |= 1 << i;
            } else {
                seen_hi |= 1 << i;
            }
        }
    }
    any && seen_lo & seen_hi == f.mask
}

/// All faces spanned by `active`.
///
/// Each spanned face is discovered from its lexicographically smallest active
/// corner by walking the `3^d` faces incident to that corner coordinate by
/// coordinate, pruning as soon as a chosen direction has no active witness.
pub fn spanned_faces(active: &ActiveVertexMap) -> Result<Vec<Face>> {
    let verts: Vec<&Vec<i64>> = active.vertices().collect();
    let Some(d) = verts.first().map(|v| v.len()) else {
        return Ok(Vec::new());
    };
    if d > MAX_DIM {
        return Err(Error::UnsupportedDimension(d));
    }
    let mut out = Vec::new();
    for v in &verts {
        // Active grid points sharing a face with v, lexicographically larger
        // ones and smaller ones alike (the smaller ones veto discovery).
        let near: Vec<&Vec<i64>> = verts
            .iter()
            .filter(|w| *w != v && w.iter().zip(v.iter()).all(|(a, b)| (a - b).abs() <= 1))
            .copied()
            .collect();
        let mut anchor = (*v).clone();
        walk(v, &near, 0, 0, &mut anchor, active.scale, &mut out);
    }
    out.sort();
    Ok(out)
}

fn walk(
    v: &[i64],
    near: &[&Vec<i64>],
    i: usize,
    mask: u32,
    anchor: &mut Vec<i64>,
    scale: u32,
    out: &mut Vec<Face>,
) {
    if i == v.len() {
        // near now holds exactly the other active corners of the face.
        let witnessed = (0..v.len())
            .filter(|i| mask & (1 << i) != 0)
            .all(|i| near.iter().any(|w| w[i] != v[i]));
        if witnessed && near.iter().all(|w| w.as_slice() > v) {
            out.push(Face {
                scale,
                anchor: anchor.clone(),
                mask,
            });
        }
        return;
    }
    // Degenerate in direction i.
    let keep: Vec<&Vec<i64>> = near.iter().filter(|w| w[i] == v[i]).copied().collect();
    walk(v, &keep, i + 1, mask, anchor, scale, out);
    for step in [1i64, -1] {
        let keep: Vec<&Vec<i64>> = near
            .iter()
            .filter(|w| w[i] == v[i] || w[i] == v[i] + step)
            .copied()
            .collect();
        if !keep.iter().any(|w| w[i] == v[i] + step) {
            continue;
        }
        let saved = anchor[i];
        anchor[i] = v[i].min(v[i] + step);
        walk(v, &keep, i + 1, mask | 1 << i, anchor, scale, out);
        anchor[i] = saved;
    }
}

/// Whether a face of a cubical complex is spanned or only a face of one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaceKind {
    Active,
    Secondary,
}

/// A finite cubical complex of one frame, closed under taking faces.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CubicalComplex {
    faces: HashMap<Face, FaceKind>,
}

impl CubicalComplex {
    /// The closure of a set of spanned faces; the given faces are flagged
    /// active and every other face of them secondary.
    pub fn closure(spanned: &[Face]) -> Self {
        let mut faces: HashMap<Face, FaceKind> = HashMap::new();
        for f in spanned {
            faces.insert(f.clone(), FaceKind::Active);
        }
        for f in spanned {
            if f.is_vertex() {
                continue;
            }
            for g in f.subfaces() {
                faces.entry(g).or_insert(FaceKind::Secondary);
            }
        }
        CubicalComplex { faces }
    }

    /// `closure(spanned_faces(active))`.
    pub fn from_active(active: &ActiveVertexMap) -> Result<Self> {
        Ok(Self::closure(&spanned_faces(active)?))
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn contains(&self, f: &Face) -> bool {
        self.faces.contains_key(f)
    }

    pub fn kind(&self, f: &Face) -> Option<FaceKind> {
        self.faces.get(f).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Face, FaceKind)> {
        self.faces.iter().map(|(f, k)| (f, *k))
    }

    /// Faces in ascending `(dim, anchor, mask)` order.
    pub fn sorted_faces(&self) -> Vec<&Face> {
        let mut v: Vec<&Face> = self.faces.keys().collect();
        v.sort();
        v
    }

    pub fn faces_of_dim(&self, p: usize) -> Vec<&Face> {
        let mut v: Vec<&Face> = self.faces.keys().filter(|f| f.dim() == p).collect();
        v.sort();
        v
    }

    pub fn active_faces(&self) -> Vec<&Face> {
        let mut v: Vec<&Face> = self
            .faces
            .iter()
            .filter(|(_, k)| **k == FaceKind::Active)
            .map(|(f, _)| f)
            .collect();
        v.sort();
        v
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.faces.keys().map(Face::dim).max()
    }

    /// The boundary matrix from `p`-cubes to `(p−1)`-cubes, both indexed in
    /// [`faces_of_dim`](Self::faces_of_dim) order.
    pub fn boundary(&self, p: usize) -> Result<Gf2Matrix> {
        if p == 0 {
            return Err(Error::InvalidParameter(
                "boundary dimension must be ≥ 1".into(),
            ));
        }
        let rows: HashMap<&Face, usize> = self
            .faces_of_dim(p - 1)
            .into_iter()
            .enumerate()
            .map(|(i, f)| (f, i))
            .collect();
        let mut m = Gf2Matrix::new(rows.len());
        for f in self.faces_of_dim(p) {
            let col = f
                .facets()
                .iter()
                .map(|g| {
                    rows.get(g).copied().ok_or_else(|| {
                        Error::Internal(format!("facet {g:?} missing from cubical complex"))
                    })
                })
                .collect::<Result<Vec<usize>>>()?;
            m.push_col(col);
        }
        Ok(m)
    }
}

/// The cubical map on a face of `U_{α_s}`: its coordinate-wise image.
pub fn cubical_map(ladder: &Ladder, f: &Face) -> Face {
    ladder.face_map(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ShiftSequence;

    fn active(scale: u32, zs: &[&[i64]]) -> ActiveVertexMap {
        ActiveVertexMap::from_cells(
            scale,
            zs.iter().enumerate().map(|(i, z)| (z.to_vec(), vec![i])),
        )
    }

    fn face(anchor: &[i64], mask: u32) -> Face {
        Face {
            scale: 0,
            anchor: anchor.to_vec(),
            mask,
        }
    }

    #[test]
    fn locates_points() {
        let ladder = Ladder::build(1.0, 0, 1, &ShiftSequence::seeded(0)).unwrap();
        let one = PointCloud::new(vec![vec![0.1]]).unwrap();
        let v = ActiveVertexMap::locate(ladder.frame(0), &one);
        assert_eq!(v.iter().collect::<Vec<_>>(), vec![(&vec![0], &vec![0])]);

        let two = PointCloud::new(vec![vec![0.1], vec![0.2]]).unwrap();
        let v = ActiveVertexMap::locate(ladder.frame(0), &two);
        assert_eq!(v.len(), 1);
        assert_eq!(v.points(&[0]), Some(&[0usize, 1][..]));

        let apart = PointCloud::new(vec![vec![0.1], vec![1.9]]).unwrap();
        let v = ActiveVertexMap::locate(ladder.frame(0), &apart);
        assert_eq!(
            v.vertices().cloned().collect::<Vec<_>>(),
            vec![vec![0], vec![2]]
        );
    }

    #[test]
    fn antipodal_corners_span_only_the_square() {
        let v = active(0, &[&[0, 0], &[1, 1]]);
        assert!(is_spanned(&face(&[0, 0], 0b11), &v));
        assert!(is_spanned(&face(&[0, 0], 0), &v));
        assert!(!is_spanned(&face(&[0, 0], 0b01), &v));
        assert!(!is_spanned(&face(&[0, 1], 0b01), &v));
        assert!(!is_spanned(&face(&[0, 0], 0b10), &v));
        assert_eq!(
            spanned_faces(&v).unwrap(),
            vec![face(&[0, 0], 0), face(&[1, 1], 0), face(&[0, 0], 0b11)]
        );
    }

    #[test]
    fn edge_spanning() {
        let both = active(0, &[&[0, 0], &[1, 0]]);
        assert!(is_spanned(&face(&[0, 0], 0b01), &both));
        assert_eq!(
            spanned_faces(&both).unwrap(),
            vec![face(&[0, 0], 0), face(&[1, 0], 0), face(&[0, 0], 0b01)]
        );
        let one = active(0, &[&[0, 0]]);
        assert!(!is_spanned(&face(&[0, 0], 0b01), &one));
        assert_eq!(spanned_faces(&one).unwrap(), vec![face(&[0, 0], 0)]);
    }

    #[test]
    fn closure_of_a_square() {
        let v = active(0, &[&[0, 0], &[1, 1]]);
        let u = CubicalComplex::from_active(&v).unwrap();
        assert_eq!(u.len(), 9);
        let count = |dim: usize, kind: FaceKind| {
            u.iter()
                .filter(|(f, k)| f.dim() == dim && *k == kind)
                .count()
        };
        assert_eq!(count(2, FaceKind::Active), 1);
        assert_eq!(count(0, FaceKind::Active), 2);
        assert_eq!(count(1, FaceKind::Secondary), 4);
        assert_eq!(count(0, FaceKind::Secondary), 2);

        let e = CubicalComplex::closure(&[face(&[0], 1), face(&[0], 0), face(&[1], 0)]);
        assert_eq!(e.len(), 3);
        assert!(e.iter().all(|(_, k)| k == FaceKind::Active));
        assert!(CubicalComplex::closure(&[]).is_empty());
    }

    #[test]
    fn boundaries() {
        let edge = CubicalComplex::closure(&[face(&[0], 1)]);
        let d1 = edge.boundary(1).unwrap();
        assert_eq!(d1.col(0), &[0, 1]);

        let sq = CubicalComplex::closure(&[face(&[0, 0], 0b11)]);
        let d2 = sq.boundary(2).unwrap();
        assert_eq!(d2.col(0).len(), 4);
        let d1 = sq.boundary(1).unwrap();
        assert!(d1.apply(d2.col(0)).is_empty());

        let mut broken = CubicalComplex::closure(&[face(&[0, 0], 0b11)]);
        broken.faces.remove(&face(&[0, 0], 0b01));
        assert!(matches!(broken.boundary(2), Err(Error::Internal(_))));
    }

    #[test]
    fn subfaces_and_containment() {
        let cube = face(&[2, -1, 0], 0b111);
        let subs = cube.subfaces();
        assert_eq!(subs.len(), 27);
        assert!(subs.iter().all(|g| cube.contains(g)));
        assert_eq!(cube.facets().len(), 6);
        assert!(!face(&[0, 0, 0], 0b001).contains(&cube));
        assert!(face(&[0, 0], 0b01).contains(&face(&[1, 0], 0)));
        assert!(!face(&[0, 0], 0b01).contains(&face(&[0, 1], 0)));
    }

    #[test]
    fn cubical_map_examples() {
        // Two points in the same row: active edge at scale 0; with ε = +1 on
        // the edge direction it collapses to an active vertex.
        let ladder = Ladder::build(1.0, 1, 2, &ShiftSequence::Explicit(vec![vec![1, 1]])).unwrap();
        let cloud = PointCloud::new(vec![vec![0.1, 0.0], vec![1.1, 0.0]]).unwrap();
        let v0 = ActiveVertexMap::locate(ladder.frame(0), &cloud);
        let u0 = CubicalComplex::from_active(&v0).unwrap();
        let edge = face(&[0, 0], 0b01);
        assert_eq!(u0.kind(&edge), Some(FaceKind::Active));
        let v1 = v0.image(&ladder);
        let u1 = CubicalComplex::from_active(&v1).unwrap();
        let img = cubical_map(&ladder, &edge);
        assert!(img.is_vertex());
        assert_eq!(u1.kind(&img), Some(FaceKind::Active));

        // Secondary vertex of an active square maps to a vertex of the image.
        let cloud = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let v0 = ActiveVertexMap::locate(ladder.frame(0), &cloud);
        let u0 = CubicalComplex::from_active(&v0).unwrap();
        let secondary = face(&[1, 0], 0);
        assert_eq!(u0.kind(&secondary), Some(FaceKind::Secondary));
        let square_img = cubical_map(&ladder, &face(&[0, 0], 0b11));
        let img = cubical_map(&ladder, &secondary);
        assert!(img.is_vertex());
        assert!(square_img.contains(&img));
        // Index arithmetic: x = 2·1 = 2 (units of λ/2), next offset 1, t = 1,
        // z' = 0; y: x = 0, t = −1, z' = 0.
        assert_eq!(img.anchor, vec![0, 0]);
    }
}
