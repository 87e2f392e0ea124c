//! Sparse linear algebra over the two-element field.
//!
//! Columns are sorted vectors of row indices; adding two columns is their
//! symmetric difference. Reduction is by lowest nonzero ("low") row.

use std::collections::HashMap;

/// `a += b` over GF(2); both sorted, result sorted.
pub fn add_assign(a: &mut Vec<usize>, b: &[usize]) {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    *a = out;
}

/// Column-major sparse matrix.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Gf2Matrix {
    nrows: usize,
    cols: Vec<Vec<usize>>,
}

impl Gf2Matrix {
    pub fn new(nrows: usize) -> Self {
        Gf2Matrix {
            nrows,
            cols: Vec::new(),
        }
    }

    /// Appends a column given by its (not necessarily sorted) nonzero rows.
    /// Repeated rows cancel.
    pub fn push_col(&mut self, mut rows: Vec<usize>) {
        rows.sort_unstable();
        let mut col: Vec<usize> = Vec::with_capacity(rows.len());
        for r in rows {
            assert!(r < self.nrows, "row {r} out of range");
            if col.last() == Some(&r) {
                col.pop();
            } else {
                col.push(r);
            }
        }
        self.cols.push(col);
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &[usize] {
        &self.cols[j]
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    pub fn rank(&self) -> usize {
        let mut r = Reducer::default();
        self.cols.iter().filter(|c| r.insert(c.to_vec())).count()
    }

    /// `self · x` for a sparse vector `x` of column indices.
    pub fn apply(&self, x: &[usize]) -> Vec<usize> {
        let mut out = Vec::new();
        for &j in x {
            add_assign(&mut out, &self.cols[j]);
        }
        out
    }

    /// A basis of the kernel, as sparse vectors of column indices.
    pub fn kernel(&self) -> Vec<Vec<usize>> {
        let mut pivots: HashMap<usize, usize> = HashMap::new();
        let mut reduced: Vec<Vec<usize>> = Vec::with_capacity(self.cols.len());
        let mut combos: Vec<Vec<usize>> = Vec::with_capacity(self.cols.len());
        let mut kernel = Vec::new();
        for (j, col) in self.cols.iter().enumerate() {
            let mut c = col.clone();
            let mut v = vec![j];
            while let Some(&low) = c.last() {
                match pivots.get(&low) {
                    Some(&k) => {
                        add_assign(&mut c, &reduced[k]);
                        add_assign(&mut v, &combos[k]);
                    }
                    None => break,
                }
            }
            match c.last() {
                Some(&low) => {
                    pivots.insert(low, reduced.len());
                }
                None => kernel.push(v.clone()),
            }
            reduced.push(c);
            combos.push(v);
        }
        kernel
    }
}

/// Incrementally maintained reduced column set, keyed by low row.
#[derive(Debug, Clone, Default)]
pub struct Reducer {
    by_low: HashMap<usize, usize>,
    cols: Vec<Vec<usize>>,
}

impl Reducer {
    /// Reduces `col` against the stored columns.
    pub fn reduce(&self, mut col: Vec<usize>) -> Vec<usize> {
        while let Some(&low) = col.last() {
            match self.by_low.get(&low) {
                Some(&k) => add_assign(&mut col, &self.cols[k]),
                None => break,
            }
        }
        col
    }

    /// Adds `col` to the span; returns whether the rank grew.
    pub fn insert(&mut self, col: Vec<usize>) -> bool {
        let col = self.reduce(col);
        match col.last() {
            Some(&low) => {
                self.by_low.insert(low, self.cols.len());
                self.cols.push(col);
                true
            }
            None => false,
        }
    }

    pub fn rank(&self) -> usize {
        self.cols.len()
    }
}
