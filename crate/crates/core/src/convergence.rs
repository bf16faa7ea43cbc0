//! Manufactured-solution convergence studies on static problems.
//!
//! The exact field is imposed on the whole boundary and the body force is chosen so that the
//! exact field is in equilibrium: `ρ₀ b_i = -A_iJkL(F) ∂²u_k/∂X_J∂X_L` with `A = ∂P/∂F`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::assembly::{ShapeTables, QuadPoint};
use crate::dynamics::{static_solve, Curve, EssentialBc, ForceLoad, LoadCase, SolverConfig, System};
use crate::error::{Error, Result};
use crate::interp::{BasisTable, ConvolutionConfig};
use crate::material::NeoHookean;
use crate::mesh::Mesh;
use crate::meshgen;
use nalgebra::Matrix3;

/// Quadrature degree for loads and error norms, high enough to make integration error negligible.
const NORM_ORDER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Bar1d,
    Plate2d,
}

impl std::str::FromStr for Problem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bar1d" => Ok(Problem::Bar1d),
            "plate2d" => Ok(Problem::Plate2d),
            other => Err(Error::Config(format!("unknown problem '{other}' (expected bar1d or plate2d)"))),
        }
    }
}

/// Interpolation used by one column of the study.
#[derive(Debug, Clone, PartialEq)]
pub enum StudyMode {
    Fem,
    Chidenn(ConvolutionConfig),
}

impl StudyMode {
    pub fn label(&self) -> String {
        match self {
            StudyMode::Fem => "fem".into(),
            StudyMode::Chidenn(c) => format!("chidenn({})", c.describe()),
        }
    }

    /// Default convolution settings for a problem: quadratic reproduction on a one-ring patch.
    pub fn chidenn_default(problem: Problem) -> Self {
        match problem {
            Problem::Bar1d => StudyMode::Chidenn(ConvolutionConfig::rbf(1, 2, 1.0)),
            Problem::Plate2d => StudyMode::Chidenn(ConvolutionConfig::rbf(1, 2, 1.0)),
        }
    }
}

/// Exact displacement, its gradient and its second derivatives at `x`.
struct Exact {
    dim: usize,
    amplitude: f64,
}

impl Exact {
    fn u(&self, x: &[f64; 3]) -> [f64; 3] {
        let a = self.amplitude;
        match self.dim {
            1 => [a * (PI * x[0]).sin(), 0.0, 0.0],
            _ => {
                let (sx, sy) = ((PI * x[0]).sin(), (PI * x[1]).sin());
                [a * sx * sy, 0.5 * a * sx * (2.0 * PI * x[1]).sin(), 0.0]
            }
        }
    }

    /// `(∂u_i/∂X_J, ∂²u_i/∂X_J∂X_L)`.
    fn derivatives(&self, x: &[f64; 3]) -> (Matrix3<f64>, [Matrix3<f64>; 3]) {
        let a = self.amplitude;
        let mut g = Matrix3::zeros();
        let mut h = [Matrix3::zeros(); 3];
        match self.dim {
            1 => {
                g[(0, 0)] = a * PI * (PI * x[0]).cos();
                h[0][(0, 0)] = -a * PI * PI * (PI * x[0]).sin();
            }
            _ => {
                let (sx, cx) = ((PI * x[0]).sin(), (PI * x[0]).cos());
                let (sy, cy) = ((PI * x[1]).sin(), (PI * x[1]).cos());
                let (s2, c2) = ((2.0 * PI * x[1]).sin(), (2.0 * PI * x[1]).cos());
                g[(0, 0)] = a * PI * cx * sy;
                g[(0, 1)] = a * PI * sx * cy;
                g[(1, 0)] = 0.5 * a * PI * cx * s2;
                g[(1, 1)] = a * PI * sx * c2;
                h[0][(0, 0)] = -a * PI * PI * sx * sy;
                h[0][(1, 1)] = -a * PI * PI * sx * sy;
                h[0][(0, 1)] = a * PI * PI * cx * cy;
                h[0][(1, 0)] = h[0][(0, 1)];
                h[1][(0, 0)] = -0.5 * a * PI * PI * sx * s2;
                h[1][(1, 1)] = -2.0 * a * PI * PI * sx * s2;
                h[1][(0, 1)] = a * PI * PI * cx * c2;
                h[1][(1, 0)] = h[1][(0, 1)];
            }
        }
        (g, h)
    }

    /// Body force density `ρ₀ b` balancing the exact field.
    fn body_force(&self, mat: &NeoHookean, x: &[f64; 3]) -> Result<[f64; 3]> {
        let (g, h) = self.derivatives(x);
        let f = Matrix3::identity() + g;
        let tangent = mat.material_tangent(&f)?;
        let mut out = [0.0; 3];
        for i in 0..self.dim {
            let mut s = 0.0;
            for j in 0..self.dim {
                for k in 0..self.dim {
                    for l in 0..self.dim {
                        s += tangent[(3 * i + j, 3 * k + l)] * h[k][(j, l)];
                    }
                }
            }
            out[i] = -s;
        }
        Ok(out)
    }
}

/// Result of one refinement level for one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelResult {
    pub elements_per_side: usize,
    pub h: f64,
    /// Relative L2 displacement error, or the failure message.
    pub error: std::result::Result<f64, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeResult {
    pub mode: StudyMode,
    pub levels: Vec<LevelResult>,
    /// Least-squares slope of log(error) against log(h); `None` with fewer than two successful levels.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    pub problem: Problem,
    pub modes: Vec<ModeResult>,
}

impl RateTable {
    pub fn render(&self) -> String {
        let mut s = format!("problem {:?}\n", self.problem);
        for m in &self.modes {
            s += &format!("mode {}\n  {:>6} {:>12} {:>14}\n", m.mode.label(), "n", "h", "L2 error");
            for l in &m.levels {
                let e = match &l.error {
                    Ok(e) => format!("{e:14.6e}"),
                    Err(msg) => format!("failed: {msg}"),
                };
                s += &format!("  {:>6} {:>12.5e} {e}\n", l.elements_per_side, l.h);
            }
            s += &match m.rate {
                Some(r) => format!("  rate {r:.3}\n"),
                None => "  rate undefined (fewer than two levels)\n".into(),
            };
        }
        s
    }
}

fn material() -> NeoHookean {
    NeoHookean::from_moduli(1.0, 5.0, 1.0).expect("valid moduli")
}

fn build_mesh(problem: Problem, n: usize) -> Result<Mesh> {
    match problem {
        Problem::Bar1d => meshgen::bar(0.0, 1.0, n),
        Problem::Plate2d => meshgen::quad_grid(n, n, 1.0, 1.0),
    }
}

fn amplitude(problem: Problem) -> f64 {
    match problem {
        Problem::Bar1d => 0.05,
        Problem::Plate2d => 0.03,
    }
}

/// Least-squares slope of `log e` against `log h`.
pub fn fitted_rate(h: &[f64], e: &[f64]) -> Option<f64> {
    if h.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

fn interpolate(point: &QuadPoint, dim: usize, d: &[f64]) -> [f64; 3] {
    let mut u = [0.0; 3];
    for (k, &node) in point.sample.nodes.iter().enumerate() {
        for i in 0..dim {
            u[i] += point.sample.values[k] * d[dim * node + i];
        }
    }
    u
}

/// Solves one level and returns the relative L2 displacement error.
pub fn solve_level(problem: Problem, n: usize, mode: &StudyMode) -> Result<f64> {
    let mesh = build_mesh(problem, n)?;
    let dim = mesh.dim;
    let exact = Exact { dim, amplitude: amplitude(problem) };
    let mat = material();
    let bases = match mode {
        StudyMode::Fem => None,
        StudyMode::Chidenn(c) => {
            c.validate(dim)?;
            Some(BasisTable::build_all(&mesh, c)?)
        }
    };
    let tables = ShapeTables::uniform(&mesh, bases.as_ref(), None)?;
    let fine = ShapeTables::uniform(&mesh, bases.as_ref(), Some(NORM_ORDER))?;

    let mut f = vec![0.0; mesh.ndof()];
    for t in &fine.elements {
        for p in &t.points {
            let b = exact.body_force(&mat, &p.sample.x)?;
            for (k, &node) in p.sample.nodes.iter().enumerate() {
                for i in 0..dim {
                    f[dim * node + i] += p.weight * p.sample.values[k] * b[i];
                }
            }
        }
    }
    let boundary: Vec<usize> = meshgen::boundary_nodes(&mesh).into_iter().collect();
    let mut essential = Vec::new();
    for &node in &boundary {
        let u = exact.u(&mesh.nodes[node]);
        for (i, ui) in u.iter().enumerate().take(dim) {
            essential.push(EssentialBc { nodes: vec![node], direction: i, curve: Curve::constant(*ui) });
        }
    }
    let loads = LoadCase::new(dim, mesh.ndof(), essential, vec![ForceLoad { vector: f, curve: Curve::constant(1.0) }])?;
    let system = System::new(tables, mat, true)?;
    let mut cfg = SolverConfig::explicit(1.0, 1);
    cfg.newton_tol = 1e-12;
    cfg.newton_max_iters = 30;
    let d = static_solve(&system, &loads, 0.0, &vec![0.0; mesh.ndof()], &cfg)?;

    let (mut num, mut den) = (0.0, 0.0);
    for t in &fine.elements {
        for p in &t.points {
            let uh = interpolate(p, dim, &d);
            let u = exact.u(&p.sample.x);
            for i in 0..dim {
                num += p.weight * (uh[i] - u[i]).powi(2);
                den += p.weight * u[i].powi(2);
            }
        }
    }
    Ok((num / den).sqrt())
}

/// Runs every mode over the refinement list. Failed levels are reported and skipped in the fit.
pub fn convergence_study(problem: Problem, refinements: &[usize], modes: &[StudyMode]) -> Result<RateTable> {
    if refinements.is_empty() || refinements.windows(2).any(|w| w[0] >= w[1]) || refinements[0] == 0 {
        return Err(Error::Config("refinements must be a non-empty, strictly ascending list of positive integers".into()));
    }
    let mut out = Vec::new();
    for mode in modes {
        let levels: Vec<LevelResult> = refinements
            .iter()
            .map(|&n| LevelResult { elements_per_side: n, h: 1.0 / n as f64, error: solve_level(problem, n, mode).map_err(|e| e.to_string()) })
            .collect();
        let ok: Vec<(f64, f64)> = levels.iter().filter_map(|l| l.error.as_ref().ok().map(|e| (l.h, *e))).collect();
        let (h, e): (Vec<f64>, Vec<f64>) = ok.into_iter().unzip();
        out.push(ModeResult { mode: mode.clone(), rate: fitted_rate(&h, &e), levels });
    }
    Ok(RateTable { problem, modes: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_of_exact_power_law() {
        let h = [0.5, 0.25, 0.125];
        let e: Vec<f64> = h.iter().map(|v: &f64| 3.0 * v.powi(2)).collect();
        assert!((fitted_rate(&h, &e).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(fitted_rate(&[0.5], &[1.0]), None);
    }

    #[test]
    fn body_force_matches_finite_difference_of_stress() {
        let mat = material();
        for dim in [1, 2] {
            let exact = Exact { dim, amplitude: 0.05 };
            let x = [0.31, 0.47, 0.0];
            let b = exact.body_force(&mat, &x).unwrap();
            let p_at = |y: [f64; 3]| mat.pk1_stress(&(Matrix3::identity() + exact.derivatives(&y).0)).unwrap();
            let eps = 1e-5;
            for i in 0..dim {
                let mut div = 0.0;
                for j in 0..dim {
                    let (mut xp, mut xm) = (x, x);
                    xp[j] += eps;
                    xm[j] -= eps;
                    div += (p_at(xp)[(i, j)] - p_at(xm)[(i, j)]) / (2.0 * eps);
                }
                assert!((b[i] + div).abs() < 1e-7 * (1.0 + div.abs()), "dim {dim} i {i}: {} vs {}", b[i], -div);
            }
        }
    }

    #[test]
    fn single_level_has_no_rate() {
        let t = convergence_study(Problem::Bar1d, &[4], &[StudyMode::Fem]).unwrap();
        assert!(t.modes[0].rate.is_none());
        assert!(t.modes[0].levels[0].error.is_ok());
        assert!(t.render().contains("rate undefined"));
        assert!(convergence_study(Problem::Bar1d, &[8, 4], &[StudyMode::Fem]).is_err());
    }
}
