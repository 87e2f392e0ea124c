//! The order complex of a cubical complex: simplices are strict chains
//! (flags) of faces, vertices are the faces themselves.

use std::collections::HashMap;

use crate::cubical::{CubicalComplex, Face};
use crate::lattice::Ladder;

/// A strict chain `f_0 ⊂ f_1 ⊂ … ⊂ f_k` of faces, listed bottom-up.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlagSimplex {
    pub faces: Vec<Face>,
}

impl FlagSimplex {
    pub fn dim(&self) -> usize {
        self.faces.len() - 1
    }

    pub fn top(&self) -> &Face {
        self.faces.last().expect("flags are nonempty")
    }

    /// Whether consecutive faces are strictly nested.
    pub fn is_strict_chain(&self) -> bool {
        self.faces
            .windows(2)
            .all(|w| w[0] != w[1] && w[1].contains(&w[0]))
    }

    /// Image under the simplicial map induced by the cubical map: `g` applied
    /// to every face, repeated faces merged.
    pub fn image(&self, ladder: &Ladder) -> FlagSimplex {
        let mut faces: Vec<Face> = Vec::with_capacity(self.faces.len());
        for f in &self.faces {
            let g = ladder.face_map(f);
            if faces.last() != Some(&g) {
                faces.push(g);
            }
        }
        FlagSimplex { faces }
    }
}

/// All flags with top face `top` and at most `max_len` faces, each listed
/// bottom-up. The one-element flag `[top]` comes first.
pub fn flags_with_top(top: &Face, max_len: usize) -> Vec<Vec<Face>> {
    let mut out = Vec::new();
    if max_len == 0 {
        return out;
    }
    let mut stack = vec![top.clone()];
    descend(&mut stack, max_len, &mut out);
    out
}

fn descend(stack: &mut Vec<Face>, max_len: usize, out: &mut Vec<Vec<Face>>) {
    out.push(stack.iter().rev().cloned().collect());
    if stack.len() == max_len {
        return;
    }
    let last = stack.last().expect("nonempty").clone();
    if last.is_vertex() {
        return;
    }
    for f in last.subfaces() {
        if f != last {
            stack.push(f);
            descend(stack, max_len, out);
            stack.pop();
        }
    }
}

/// The order complex of `U`, truncated to dimension `k`.
#[derive(Debug, Clone)]
pub struct OrderComplex {
    faces: Vec<Face>,
    ids: HashMap<Face, usize>,
    simplices: Vec<Vec<usize>>,
}

impl OrderComplex {
    /// Every strict chain of at most `k + 1` faces of `U`. Vertex ids follow
    /// the `(dim, anchor, mask)` order of faces, so each chain's id list is
    /// already ascending.
    pub fn build(u: &CubicalComplex, k: usize) -> Self {
        let faces: Vec<Face> = u.sorted_faces().into_iter().cloned().collect();
        let ids: HashMap<Face, usize> = faces
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, f)| (f, i))
            .collect();
        let mut simplices = Vec::new();
        for top in &faces {
            for chain in flags_with_top(top, k + 1) {
                simplices.push(chain.iter().map(|f| ids[f]).collect());
            }
        }
        simplices
            .sort_by(|a: &Vec<usize>, b: &Vec<usize>| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        OrderComplex {
            faces,
            ids,
            simplices,
        }
    }

    /// `sd(f)`: the order complex of the faces of `f`.
    pub fn of_face(f: &Face, k: usize) -> Self {
        Self::build(&CubicalComplex::closure(std::slice::from_ref(f)), k)
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn id(&self, f: &Face) -> Option<usize> {
        self.ids.get(f).copied()
    }

    /// Simplices as ascending vertex-id lists, by dimension then lexicographically.
    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn flag(&self, simplex: &[usize]) -> FlagSimplex {
        FlagSimplex {
            faces: simplex.iter().map(|&i| self.faces[i].clone()).collect(),
        }
    }

    pub fn count_by_dim(&self) -> Vec<usize> {
        let mut counts = Vec::new();
        for s in &self.simplices {
            let p = s.len() - 1;
            if counts.len() <= p {
                counts.resize(p + 1, 0);
            }
            counts[p] += 1;
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubical::ActiveVertexMap;
    use crate::lattice::ShiftSequence;
    use std::collections::HashSet;

    fn face(anchor: &[i64], mask: u32) -> Face {
        Face {
            scale: 0,
            anchor: anchor.to_vec(),
            mask,
        }
    }

    /// Chains of a finite poset by brute force over all subsets.
    fn brute_force_chains(faces: &[Face], max_len: usize) -> Vec<usize> {
        let mut counts = vec![0; max_len];
        for bits in 1u32..1 << faces.len() {
            let mut chain: Vec<&Face> = (0..faces.len())
                .filter(|i| bits & (1 << i) != 0)
                .map(|i| &faces[i])
                .collect();
            if chain.len() > max_len {
                continue;
            }
            chain.sort_by_key(|f| f.dim());
            if chain
                .windows(2)
                .all(|w| w[0].dim() < w[1].dim() && w[1].contains(w[0]))
            {
                counts[chain.len() - 1] += 1;
            }
        }
        counts
    }

    #[test]
    fn subdivided_square() {
        let u = CubicalComplex::closure(&[face(&[0, 0], 0b11)]);
        let x = OrderComplex::build(&u, 2);
        assert_eq!(x.count_by_dim(), vec![9, 16, 8]);
        let faces: Vec<Face> = u.sorted_faces().into_iter().cloned().collect();
        assert_eq!(brute_force_chains(&faces, 3), vec![9, 16, 8]);
        // Truncation happens at chain length.
        assert_eq!(OrderComplex::build(&u, 1).count_by_dim(), vec![9, 16]);
    }

    #[test]
    fn single_vertex_and_edge() {
        let v = CubicalComplex::closure(&[face(&[4, 4], 0)]);
        assert_eq!(OrderComplex::build(&v, 3).count_by_dim(), vec![1]);
        let e = CubicalComplex::closure(&[face(&[0, 0], 0b01), face(&[0, 0], 0), face(&[1, 0], 0)]);
        let x = OrderComplex::build(&e, 2);
        // Endpoints are incomparable: two edges a⊂e, b⊂e and no triangle.
        assert_eq!(x.count_by_dim(), vec![3, 2]);
    }

    #[test]
    fn closed_under_subchains() {
        let active = ActiveVertexMap::from_cells(
            0,
            vec![
                (vec![0, 0, 0], vec![0]),
                (vec![1, 1, 0], vec![1]),
                (vec![1, 0, 1], vec![2]),
            ],
        );
        let u = CubicalComplex::from_active(&active).unwrap();
        let x = OrderComplex::build(&u, 3);
        let all: HashSet<&Vec<usize>> = x.simplices().iter().collect();
        for s in x.simplices() {
            assert!(x.flag(s).is_strict_chain());
            for drop in 0..s.len() {
                if s.len() == 1 {
                    continue;
                }
                let mut sub = s.clone();
                sub.remove(drop);
                assert!(all.contains(&sub));
            }
        }
    }

    #[test]
    fn simplicial_image_examples() {
        let edge = face(&[0], 1);
        let v = face(&[0], 0);
        let flag = FlagSimplex {
            faces: vec![v.clone(), edge.clone()],
        };
        // ε = +1 collapses [0,1]; the flag becomes the vertex g(v).
        let collapse = Ladder::build(1.0, 1, 1, &ShiftSequence::Explicit(vec![vec![1]])).unwrap();
        let img = flag.image(&collapse);
        assert_eq!(img.dim(), 0);
        assert_eq!(img.faces[0], collapse.face_map(&v));
        // ε = −1 keeps it: world 0 ↦ −1/2, world 1 ↦ 3/2 lie in one edge of
        // the next grid, so (g(v) ⊂ g(e)) is again a 1-simplex.
        let survive = Ladder::build(1.0, 1, 1, &ShiftSequence::Explicit(vec![vec![-1]])).unwrap();
        let img = flag.image(&survive);
        assert_eq!(img.dim(), 1);
        assert!(img.is_strict_chain());
        assert_eq!(survive.frame(1).world(&img.faces[0].anchor), vec![-0.5]);
        assert_eq!(img.faces[1].mask, 1);

        let point = FlagSimplex { faces: vec![v] };
        assert_eq!(point.image(&survive).dim(), 0);
    }
}
