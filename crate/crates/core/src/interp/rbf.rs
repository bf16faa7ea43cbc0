//! Radial point interpolation over a nodal patch with a multiquadric kernel and polynomial augmentation.

use nalgebra::{DMatrix, Dyn, LU};

use super::ConvolutionConfig;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, NodePatch};

/// Relative singular-value threshold for the rank of the polynomial block.
const RANK_TOL: f64 = 1e-10;
/// Smallest accepted ratio between the extreme LU pivots.
const PIVOT_TOL: f64 = 1e-14;

/// Monomial exponents of total degree ≤ `p` in `dim` variables, ordered by degree.
pub fn monomials(dim: usize, p: usize) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for deg in 0..=p as u32 {
        match dim {
            1 => out.push([deg, 0, 0]),
            2 => (0..=deg).rev().for_each(|i| out.push([i, deg - i, 0])),
            _ => {
                for i in (0..=deg).rev() {
                    for j in (0..=deg - i).rev() {
                        out.push([i, j, deg - i - j]);
                    }
                }
            }
        }
    }
    out
}

/// Number of polynomial terms `m = C(p + dim, dim)`.
pub fn basis_size(dim: usize, p: usize) -> usize {
    monomials(dim, p).len()
}

/// Factorized moment matrix of one nodal patch.
#[derive(Debug, Clone)]
pub struct PatchBasis {
    pub patch: NodePatch,
    pub dim: usize,
    /// Shape constant `c = a Δ`.
    pub c: f64,
    pub q: f64,
    coords: Vec<[f64; 3]>,
    origin: [f64; 3],
    exponents: Vec<[u32; 3]>,
    g: DMatrix<f64>,
    lu: LU<f64, Dyn, Dyn>,
}

impl PatchBasis {
    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn m(&self) -> usize {
        self.exponents.len()
    }

    /// The assembled `[[R, P], [Pᵀ, 0]]` matrix in normalized kernel units.
    pub fn moment_matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    /// Solves `G y = rhs` with the stored factorization.
    pub fn solve(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        self.lu.solve(rhs).expect("factorization checked at construction")
    }

    /// Kernel `((r/c)² + 1)^q`, a constant multiple of `(r² + c²)^q` that yields identical weights.
    fn kernel(&self, x: &[f64; 3], node: &[f64; 3]) -> (f64, [f64; 3]) {
        let c2 = self.c * self.c;
        let mut r2 = 0.0;
        for k in 0..self.dim {
            r2 += (x[k] - node[k]).powi(2);
        }
        let base = r2 / c2 + 1.0;
        let value = base.powf(self.q);
        let slope = self.q * base.powf(self.q - 1.0) * 2.0 / c2;
        let mut grad = [0.0; 3];
        for k in 0..self.dim {
            grad[k] = slope * (x[k] - node[k]);
        }
        (value, grad)
    }

    /// Polynomial terms in coordinates shifted to the patch center and scaled by `c`.
    fn polynomial(&self, x: &[f64; 3]) -> (Vec<f64>, Vec<[f64; 3]>) {
        let y: Vec<f64> = (0..3).map(|k| (x[k] - self.origin[k]) / self.c).collect();
        let pow = |v: f64, e: u32| if e == 0 { 1.0 } else { v.powi(e as i32) };
        let dpow = |v: f64, e: u32| if e == 0 { 0.0 } else { e as f64 * pow(v, e - 1) };
        let mut values = Vec::with_capacity(self.m());
        let mut grads = Vec::with_capacity(self.m());
        for e in &self.exponents {
            let f = [pow(y[0], e[0]), pow(y[1], e[1]), pow(y[2], e[2])];
            values.push(f[0] * f[1] * f[2]);
            let mut g = [0.0; 3];
            g[0] = dpow(y[0], e[0]) * f[1] * f[2] / self.c;
            g[1] = f[0] * dpow(y[1], e[1]) * f[2] / self.c;
            g[2] = f[0] * f[1] * dpow(y[2], e[2]) / self.c;
            grads.push(g);
        }
        (values, grads)
    }

    /// Right-hand side `[R(X); P(X)]` and its `dim` derivative columns.
    pub fn rhs(&self, x: &[f64; 3]) -> DMatrix<f64> {
        let (n, m) = (self.n(), self.m());
        let mut rhs = DMatrix::zeros(n + m, 1 + self.dim);
        for (i, node) in self.coords.iter().enumerate() {
            let (v, g) = self.kernel(x, node);
            rhs[(i, 0)] = v;
            for k in 0..self.dim {
                rhs[(i, 1 + k)] = g[k];
            }
        }
        let (pv, pg) = self.polynomial(x);
        for t in 0..m {
            rhs[(n + t, 0)] = pv[t];
            for k in 0..self.dim {
                rhs[(n + t, 1 + k)] = pg[t][k];
            }
        }
        rhs
    }
}

/// Assembles and factorizes the moment matrix of `patch`.
pub fn rbf_assemble_patch(mesh: &Mesh, patch: NodePatch, config: &ConvolutionConfig) -> Result<PatchBasis> {
    let dim = mesh.dim;
    let exponents = monomials(dim, config.p);
    let (n, m) = (patch.members.len(), exponents.len());
    if n < m {
        return Err(Error::PatchTooSmall { center: patch.center, n, m });
    }
    let coords: Vec<[f64; 3]> = patch.members.iter().map(|&k| mesh.nodes[k]).collect();
    let origin = mesh.nodes[patch.center];
    let c = config.a * patch.spacing;
    let mut basis = PatchBasis {
        patch,
        dim,
        c,
        q: config.rbf_exponent,
        coords,
        origin,
        exponents,
        g: DMatrix::zeros(0, 0),
        lu: DMatrix::<f64>::identity(1, 1).lu(),
    };
    let mut g = DMatrix::zeros(n + m, n + m);
    let mut p_block = DMatrix::zeros(n, m);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = basis.kernel(&basis.coords[i], &basis.coords[j]).0;
        }
        let (pv, _) = basis.polynomial(&basis.coords[i]);
        for t in 0..m {
            g[(i, n + t)] = pv[t];
            g[(n + t, i)] = pv[t];
            p_block[(i, t)] = pv[t];
        }
    }
    let sv = p_block.singular_values();
    let smax = sv.max();
    if sv.iter().filter(|&&v| v > RANK_TOL * smax).count() < m {
        return Err(Error::SingularMomentMatrix { center: basis.patch.center });
    }
    let lu = g.clone().lu();
    let u = lu.u();
    let pivots: Vec<f64> = (0..n + m).map(|i| u[(i, i)].abs()).collect();
    let pmax = pivots.iter().cloned().fold(0.0, f64::max);
    let pmin = pivots.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(pmin > PIVOT_TOL * pmax) {
        return Err(Error::SingularMomentMatrix { center: basis.patch.center });
    }
    basis.g = g;
    basis.lu = lu;
    Ok(basis)
}

/// Patch-function values and material derivatives at `x`.
pub fn rbf_conv_patch(basis: &PatchBasis, x: [f64; 3]) -> (Vec<f64>, Vec<[f64; 3]>) {
    let y = basis.solve(&basis.rhs(&x));
    let n = basis.n();
    let values = (0..n).map(|i| y[(i, 0)]).collect();
    let derivs = (0..n)
        .map(|i| {
            let mut d = [0.0; 3];
            for k in 0..basis.dim {
                d[k] = y[(i, 1 + k)];
            }
            d
        })
        .collect();
    (values, derivs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::Kernel;
    use crate::meshgen;
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(p: usize, a: f64) -> ConvolutionConfig {
        ConvolutionConfig { s: 1, a, p, kernel: Kernel::Rbf, rbf_exponent: 1.03 }
    }

    fn center_basis(p: usize) -> (Mesh, PatchBasis) {
        let mesh = meshgen::quad_grid(2, 2, 2.0, 2.0).unwrap();
        let patch = mesh.node_patch(4, 1);
        let basis = rbf_assemble_patch(&mesh, patch, &cfg(p, 1.0)).unwrap();
        (mesh, basis)
    }

    #[test]
    fn nine_node_linear_patch_has_twelve_by_twelve_symmetric_matrix() {
        let (_, b) = center_basis(1);
        let g = b.moment_matrix();
        assert_eq!(g.shape(), (12, 12));
        assert_eq!(g, &g.transpose());
        assert!(g.view((9, 9), (3, 3)).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn factorization_inverts_on_probes() {
        let (_, b) = center_basis(1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let v = DMatrix::from_fn(12, 1, |_, _| rng.gen_range(-1.0..1.0));
            let back = b.moment_matrix() * b.solve(&v);
            assert!((back - &v).abs().max() < 1e-10);
        }
    }

    #[test]
    fn too_small_and_collinear_patches() {
        let mesh = meshgen::quad_grid(2, 2, 2.0, 2.0).unwrap();
        let two = NodePatch { center: 0, members: vec![0, 1], spacing: 1.0 };
        assert!(matches!(rbf_assemble_patch(&mesh, two, &cfg(1, 1.0)), Err(Error::PatchTooSmall { n: 2, m: 3, .. })));
        let line = NodePatch { center: 0, members: vec![0, 1, 2], spacing: 1.0 };
        assert!(matches!(rbf_assemble_patch(&mesh, line, &cfg(1, 1.0)), Err(Error::SingularMomentMatrix { .. })));
    }

    #[test]
    fn kronecker_at_patch_nodes() {
        let (mesh, b) = center_basis(1);
        for (slot, &node) in b.patch.members.iter().enumerate() {
            let (w, _) = rbf_conv_patch(&b, mesh.nodes[node]);
            for (k, v) in w.iter().enumerate() {
                let e = if k == slot { 1.0 } else { 0.0 };
                assert!((v - e).abs() < 1e-10);
            }
        }
    }

    /// Dense oracle: solve the unreduced system with the unscaled kernel (r² + c²)^q and raw coordinates.
    fn oracle(mesh: &Mesh, b: &PatchBasis, x: [f64; 3], p: usize) -> Vec<f64> {
        let n = b.n();
        let ex = monomials(2, p);
        let m = ex.len();
        let kernel = |a: [f64; 3], c: [f64; 3]| ((a[0] - c[0]).powi(2) + (a[1] - c[1]).powi(2) + b.c * b.c).powf(b.q);
        let poly = |a: [f64; 3]| ex.iter().map(|e| a[0].powi(e[0] as i32) * a[1].powi(e[1] as i32)).collect::<Vec<_>>();
        let xs: Vec<[f64; 3]> = b.patch.members.iter().map(|&k| mesh.nodes[k]).collect();
        let mut g = DMatrix::zeros(n + m, n + m);
        let mut rhs = DVector::zeros(n + m);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = kernel(xs[i], xs[j]);
            }
            let pv = poly(xs[i]);
            for t in 0..m {
                g[(i, n + t)] = pv[t];
                g[(n + t, i)] = pv[t];
            }
            rhs[i] = kernel(x, xs[i]);
        }
        for (t, v) in poly(x).into_iter().enumerate() {
            rhs[n + t] = v;
        }
        let y = g.lu().solve(&rhs).unwrap();
        (0..n).map(|i| y[i]).collect()
    }

    #[test]
    fn partition_of_unity_and_linear_reproduction_match_oracle() {
        let (mesh, b) = center_basis(1);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let x = [rng.gen_range(0.2..1.8), rng.gen_range(0.2..1.8), 0.0];
            let (w, _) = rbf_conv_patch(&b, x);
            let o = oracle(&mesh, &b, x, 1);
            for (a, c) in w.iter().zip(&o) {
                assert!((a - c).abs() < 1e-9);
            }
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for k in 0..2 {
                let rx: f64 = w.iter().zip(&b.patch.members).map(|(wi, &n)| wi * mesh.nodes[n][k]).sum();
                assert!((rx - x[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let (_, b) = center_basis(2);
        let x = [0.7, 1.3, 0.0];
        let (_, dw) = rbf_conv_patch(&b, x);
        let h = 1e-6;
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let (wp, _) = rbf_conv_patch(&b, xp);
            let (wm, _) = rbf_conv_patch(&b, xm);
            for i in 0..b.n() {
                let fd = (wp[i] - wm[i]) / (2.0 * h);
                assert!((fd - dw[i][k]).abs() < 1e-6 * (1.0 + fd.abs()));
            }
        }
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(basis_size(1, 2), 3);
        assert_eq!(basis_size(2, 1), 3);
        assert_eq!(basis_size(2, 2), 6);
        assert_eq!(basis_size(3, 1), 4);
        assert_eq!(basis_size(3, 2), 10);
    }
}
