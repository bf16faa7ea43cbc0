//! Compressed sparse row matrices and a sparse symmetric factorization.

use nalgebra::DMatrix;
use sprs::{FillInReduction, SymmetryCheck, TriMat};
use sprs_ldl::{Ldl, LdlNumeric};


#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Csr {
    /// Sums duplicate entries; the result does not depend on triplet order beyond floating-point summation order,
    /// which is fixed by a stable sort.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0; n + 1];
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr { n, row_ptr, col_idx, vals }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (self.col_idx[k], self.vals[k]))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(_, v)| v).sum()).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (c, v) in self.row(i) {
                m[(i, c)] += v;
            }
        }
        m
    }

    /// Dense submatrix over the listed rows and columns.
    pub fn submatrix(&self, idx: &[usize]) -> DMatrix<f64> {
        let mut pos = vec![usize::MAX; self.n];
        for (k, &i) in idx.iter().enumerate() {
            pos[i] = k;
        }
        let mut m = DMatrix::zeros(idx.len(), idx.len());
        for (k, &i) in idx.iter().enumerate() {
            for (c, v) in self.row(i) {
                if pos[c] != usize::MAX {
                    m[(k, pos[c])] += v;
                }
            }
        }
        m
    }
}

/// Sparse `L D Lᵀ` factorization of a symmetric matrix restricted to the rows and columns `idx`,
/// with reverse Cuthill-McKee ordering.
#[derive(Debug, Clone)]
pub struct SymmetricFactor {
    idx: Vec<usize>,
    ldl: LdlNumeric<f64, usize>,
}

impl SymmetricFactor {
    /// `entries` are `(row, col, value)` in global numbering; entries outside `idx` are dropped and
    /// duplicates are summed. Returns `None` when a pivot vanishes or the factor is not finite.
    pub fn new(n: usize, idx: &[usize], entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Option<Self> {
        let mut pos = vec![usize::MAX; n];
        for (k, &i) in idx.iter().enumerate() {
            pos[i] = k;
        }
        let mut tri = TriMat::new((idx.len(), idx.len()));
        for (r, c, v) in entries {
            let (pr, pc) = (pos[r], pos[c]);
            if pr != usize::MAX && pc != usize::MAX {
                tri.add_triplet(pr, pc, v);
            }
        }
        let mat = tri.to_csc::<usize>();
        let ldl = Ldl::new()
            .fill_in_reduction(FillInReduction::ReverseCuthillMcKee)
            .check_symmetry(SymmetryCheck::DontCheckSymmetry)
            .numeric(mat.view())
            .ok()?;
        if ldl.d().iter().any(|d| !d.is_finite() || *d == 0.0) {
            return None;
        }
        Some(SymmetricFactor { idx: idx.to_vec(), ldl })
    }

    pub fn indices(&self) -> &[usize] {
        &self.idx
    }

    /// Number of negative pivots (the inertia of an indefinite matrix).
    pub fn negative_pivots(&self) -> usize {
        self.ldl.d().iter().filter(|d| **d < 0.0).count()
    }

    /// Solves with a right-hand side ordered like `idx`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.ldl.solve(b.to_vec())
    }
}
