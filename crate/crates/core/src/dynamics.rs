//! Time marching: explicit central difference and incremental energy minimization, with
//! essential boundary conditions and work accounting.
//!
//! The minimization mode uses the trapezoidal (average acceleration) incremental potential
//! whose stationarity condition is the discrete momentum balance at the end of the step.
//! Its velocity update is the half-step pair used by the explicit scheme.

use serde::{Deserialize, Serialize};

use crate::assembly::{consistent_mass, internal_energy, internal_force, lumped_mass, tangent_stiffness, ShapeTables};
use crate::error::{Error, Result};
use crate::material::NeoHookean;
use crate::mesh::Mesh;
use crate::sparse::{Csr, SymmetricFactor};

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 20;

/// Piecewise-linear history `(t, value)`; a single point is constant for all time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Config("load curve needs at least one point".into()));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::Config("load curve times must be strictly increasing".into()));
        }
        Ok(Curve { points })
    }

    pub fn constant(value: f64) -> Self {
        Curve { points: vec![(0.0, value)] }
    }

    /// Linear ramp from zero at t = 0 to `value` at `t_end`.
    pub fn ramp(t_end: f64, value: f64) -> Self {
        Curve { points: vec![(0.0, 0.0), (t_end, value)] }
    }

    pub fn start(&self) -> f64 {
        self.points[0].0
    }

    pub fn end(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    fn locate(&self, t: f64) -> Result<Option<usize>> {
        if self.points.len() == 1 {
            return Ok(None);
        }
        let (start, end) = (self.start(), self.end());
        let slack = 1e-9 * (end - start);
        if t < start - slack || t > end + slack {
            return Err(Error::OutsideHistory { t, start, end });
        }
        let seg = self.points.partition_point(|p| p.0 <= t).clamp(1, self.points.len() - 1) - 1;
        Ok(Some(seg))
    }

    fn segment_slope(&self, seg: usize) -> f64 {
        let (a, b) = (self.points[seg], self.points[seg + 1]);
        (b.1 - a.1) / (b.0 - a.0)
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        match self.locate(t)? {
            None => Ok(self.points[0].1),
            Some(seg) => {
                let a = self.points[seg];
                Ok(a.1 + self.segment_slope(seg) * (t - a.0))
            }
        }
    }

    /// Time derivative; at an interior breakpoint the mean of the adjacent slopes.
    pub fn slope(&self, t: f64) -> Result<f64> {
        match self.locate(t)? {
            None => Ok(0.0),
            Some(seg) => {
                let s = self.segment_slope(seg);
                if seg > 0 && t == self.points[seg].0 {
                    Ok(0.5 * (s + self.segment_slope(seg - 1)))
                } else {
                    Ok(s)
                }
            }
        }
    }
}

/// Prescribed displacement history on one direction of a node set.
#[derive(Debug, Clone, PartialEq)]
pub struct EssentialBc {
    pub nodes: Vec<usize>,
    pub direction: usize,
    pub curve: Curve,
}

/// External force `curve(t) · vector`, with `vector` an assembled traction or body-force pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceLoad {
    pub vector: Vec<f64>,
    pub curve: Curve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadCase {
    pub essential: Vec<EssentialBc>,
    pub forces: Vec<ForceLoad>,
    /// Per dof: index into `essential` of the condition that constrains it.
    constraint: Vec<Option<usize>>,
}

impl LoadCase {
    pub fn new(dim: usize, ndof: usize, essential: Vec<EssentialBc>, forces: Vec<ForceLoad>) -> Result<Self> {
        let mut constraint = vec![None; ndof];
        for (k, bc) in essential.iter().enumerate() {
            if bc.direction >= dim {
                return Err(Error::Config(format!("direction {} out of range for dimension {dim}", bc.direction)));
            }
            for &n in &bc.nodes {
                let dof = dim * n + bc.direction;
                if dof >= ndof {
                    return Err(Error::Config(format!("essential condition references node {n} outside the mesh")));
                }
                constraint[dof] = Some(k);
            }
        }
        for f in &forces {
            if f.vector.len() != ndof {
                return Err(Error::Config(format!("force vector has {} entries, expected {ndof}", f.vector.len())));
            }
        }
        Ok(LoadCase { essential, forces, constraint })
    }

    pub fn ndof(&self) -> usize {
        self.constraint.len()
    }

    pub fn is_constrained(&self, dof: usize) -> bool {
        self.constraint[dof].is_some()
    }

    pub fn free_dofs(&self) -> Vec<usize> {
        (0..self.ndof()).filter(|&i| !self.is_constrained(i)).collect()
    }

    pub fn free_mask(&self) -> Vec<bool> {
        self.constraint.iter().map(|c| c.is_none()).collect()
    }

    /// Prescribed value and rate of a constrained dof.
    pub fn prescribed(&self, dof: usize, t: f64) -> Result<Option<(f64, f64)>> {
        match self.constraint[dof] {
            None => Ok(None),
            Some(k) => {
                let c = &self.essential[k].curve;
                Ok(Some((c.value(t)?, c.slope(t)?)))
            }
        }
    }

    pub fn external_force(&self, t: f64) -> Result<Vec<f64>> {
        let mut f = vec![0.0; self.ndof()];
        for load in &self.forces {
            let s = load.curve.value(t)?;
            if s != 0.0 {
                for (fi, vi) in f.iter_mut().zip(&load.vector) {
                    *fi += s * vi;
                }
            }
        }
        Ok(f)
    }
}

/// Node-level mass; the dof-level matrix repeats it in every direction.
#[derive(Debug, Clone, PartialEq)]
pub enum Mass {
    Lumped(Vec<f64>),
    Consistent(Csr),
}

#[derive(Debug, Clone)]
pub struct System {
    pub tables: ShapeTables,
    pub material: NeoHookean,
    pub mass: Mass,
    /// Factor of the consistent mass on the free dofs of the last solve, reused while the free set is unchanged.
    mass_factor: std::sync::Arc<std::sync::Mutex<Option<SymmetricFactor>>>,
}

impl System {
    pub fn new(tables: ShapeTables, material: NeoHookean, lumped: bool) -> Result<Self> {
        let mass = if lumped {
            Mass::Lumped(lumped_mass(&tables, material.rho0)?)
        } else {
            Mass::Consistent(consistent_mass(&tables, material.rho0))
        };
        Ok(System { tables, material, mass, mass_factor: Default::default() })
    }

    pub fn dim(&self) -> usize {
        self.tables.dim
    }

    pub fn ndof(&self) -> usize {
        self.tables.ndof()
    }

    pub fn internal_force(&self, d: &[f64]) -> Result<Vec<f64>> {
        internal_force(&self.tables, &self.material, d)
    }

    pub fn internal_energy(&self, d: &[f64]) -> Result<f64> {
        internal_energy(&self.tables, &self.material, d)
    }

    /// `M x` at dof level.
    pub fn mass_apply(&self, x: &[f64]) -> Vec<f64> {
        let dim = self.dim();
        match &self.mass {
            Mass::Lumped(m) => x.iter().enumerate().map(|(i, v)| m[i / dim] * v).collect(),
            Mass::Consistent(m) => {
                let mut y = vec![0.0; x.len()];
                for r in 0..m.n {
                    for (c, v) in m.row(r) {
                        for i in 0..dim {
                            y[dim * r + i] += v * x[dim * c + i];
                        }
                    }
                }
                y
            }
        }
    }

    /// Dof-level mass entries `(row, col, value)`.
    fn mass_entries(&self) -> Vec<(usize, usize, f64)> {
        let dim = self.dim();
        match &self.mass {
            Mass::Lumped(m) => (0..self.ndof()).map(|i| (i, i, m[i / dim])).collect(),
            Mass::Consistent(m) => {
                let mut out = Vec::with_capacity(dim * m.nnz());
                for r in 0..m.n {
                    for (c, v) in m.row(r) {
                        for i in 0..dim {
                            out.push((dim * r + i, dim * c + i, v));
                        }
                    }
                }
                out
            }
        }
    }

    /// Solves `M_ff x_f = r_f` with `x` zero on constrained dofs.
    pub fn mass_solve(&self, r: &[f64], free: &[bool]) -> Result<Vec<f64>> {
        let dim = self.dim();
        match &self.mass {
            Mass::Lumped(m) => Ok(r.iter().enumerate().map(|(i, v)| if free[i] { v / m[i / dim] } else { 0.0 }).collect()),
            Mass::Consistent(_) => {
                let idx: Vec<usize> = (0..r.len()).filter(|&i| free[i]).collect();
                let mut cache = self.mass_factor.lock().expect("mass factor lock");
                if cache.as_ref().is_none_or(|f| f.indices() != idx.as_slice()) {
                    *cache = Some(SymmetricFactor::new(r.len(), &idx, self.mass_entries()).ok_or(Error::SingularMass)?);
                }
                let factor = cache.as_ref().expect("factor cached above");
                let b: Vec<f64> = idx.iter().map(|&i| r[i]).collect();
                let mut x = vec![0.0; r.len()];
                for (k, v) in idx.iter().zip(factor.solve(&b)) {
                    x[*k] = v;
                }
                Ok(x)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    ExplicitCd,
    IncrementalMin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub dt: f64,
    pub steps: usize,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_tol")]
    pub newton_tol: f64,
    #[serde(default = "default_iters")]
    pub newton_max_iters: usize,
    #[serde(default = "default_lumped")]
    pub lumped_mass: bool,
}

fn default_mode() -> Mode {
    Mode::ExplicitCd
}
fn default_tol() -> f64 {
    1e-8
}
fn default_iters() -> usize {
    25
}
fn default_lumped() -> bool {
    true
}

impl SolverConfig {
    pub fn explicit(dt: f64, steps: usize) -> Self {
        SolverConfig { dt, steps, mode: Mode::ExplicitCd, newton_tol: default_tol(), newton_max_iters: default_iters(), lumped_mass: true }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("time step must be positive (dt = {})", self.dt)));
        }
        if !(self.newton_tol > 0.0) || self.newton_max_iters == 0 {
            return Err(Error::Config("Newton tolerance and iteration limit must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub d: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
    pub t: f64,
    pub step: usize,
    /// Accumulated internal work.
    pub w_int: f64,
    /// Accumulated external work, including reaction work on constrained dofs.
    pub w_ext: f64,
    /// Internal force at `d`.
    pub f_int: Vec<f64>,
    /// Work-conjugate external force: applied loads on free dofs, reactions on constrained dofs.
    pub f_work: Vec<f64>,
}

/// Sets constrained displacements and velocities from their histories; constrained accelerations are zero.
pub fn apply_essential_bc(state: &mut State, loads: &LoadCase, t: f64) -> Result<()> {
    for dof in 0..loads.ndof() {
        if let Some((u, v)) = loads.prescribed(dof, t)? {
            state.d[dof] = u;
            state.v[dof] = v;
            state.a[dof] = 0.0;
        }
    }
    Ok(())
}

/// Accelerations `M_ff a_f = (f_ext − f_int)_f` with zero constrained accelerations; returns `(a, f_int, f_ext)`.
pub fn accelerations(system: &System, loads: &LoadCase, d: &[f64], t: f64) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let f_int = system.internal_force(d)?;
    let f_ext = loads.external_force(t)?;
    let r: Vec<f64> = f_ext.iter().zip(&f_int).map(|(e, i)| e - i).collect();
    let a = system.mass_solve(&r, &loads.free_mask())?;
    Ok((a, f_int, f_ext))
}

fn work_force(system: &System, loads: &LoadCase, a: &[f64], f_int: &[f64], f_ext: &[f64]) -> Vec<f64> {
    let ma = system.mass_apply(a);
    (0..f_ext.len())
        .map(|i| if loads.is_constrained(i) { ma[i] + f_int[i] } else { f_ext[i] })
        .collect()
}

/// Rest state at t = 0 with boundary values applied and consistent accelerations.
pub fn initialize(system: &System, loads: &LoadCase) -> Result<State> {
    let n = system.ndof();
    let mut state = State {
        d: vec![0.0; n],
        v: vec![0.0; n],
        a: vec![0.0; n],
        t: 0.0,
        step: 0,
        w_int: 0.0,
        w_ext: 0.0,
        f_int: vec![0.0; n],
        f_work: vec![0.0; n],
    };
    apply_essential_bc(&mut state, loads, 0.0)?;
    let (a, f_int, f_ext) = accelerations(system, loads, &state.d, 0.0)?;
    state.f_work = work_force(system, loads, &a, &f_int, &f_ext);
    state.a = a;
    state.f_int = f_int;
    Ok(state)
}

fn check_finite(state: &State) -> Result<()> {
    let ok = state.d.iter().chain(&state.v).chain(&state.a).all(|x| x.is_finite());
    if ok {
        Ok(())
    } else {
        Err(Error::NonFiniteState { step: state.step, t: state.t })
    }
}

/// Trapezoidal work increments over a displacement change.
fn accumulate_work(next: &mut State, prev: &State) {
    let mut dw_int = 0.0;
    let mut dw_ext = 0.0;
    for i in 0..next.d.len() {
        let dd = next.d[i] - prev.d[i];
        dw_int += 0.5 * dd * (prev.f_int[i] + next.f_int[i]);
        dw_ext += 0.5 * dd * (prev.f_work[i] + next.f_work[i]);
    }
    next.w_int = prev.w_int + dw_int;
    next.w_ext = prev.w_ext + dw_ext;
}

/// One explicit central-difference step (negative `dt` steps backward).
pub fn cd_step(state: &State, system: &System, loads: &LoadCase, dt: f64) -> Result<State> {
    let mut next = state.clone();
    let v_half: Vec<f64> = state.v.iter().zip(&state.a).map(|(v, a)| v + 0.5 * dt * a).collect();
    for i in 0..next.d.len() {
        next.d[i] = state.d[i] + dt * v_half[i];
    }
    next.t = state.t + dt;
    next.step = state.step + 1;
    next.v = v_half;
    let t1 = next.t;
    apply_essential_bc(&mut next, loads, t1)?;
    check_finite(&next)?;
    let (a, f_int, f_ext) = accelerations(system, loads, &next.d, next.t)?;
    for i in 0..next.v.len() {
        if !loads.is_constrained(i) {
            next.v[i] += 0.5 * dt * a[i];
        }
    }
    next.f_work = work_force(system, loads, &a, &f_int, &f_ext);
    next.a = a;
    next.f_int = f_int;
    check_finite(&next)?;
    accumulate_work(&mut next, state);
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub w_kin: f64,
    pub w_int: f64,
    pub w_ext: f64,
    pub balance: f64,
}

pub fn energy_report(state: &State, system: &System) -> EnergyReport {
    let mv = system.mass_apply(&state.v);
    let w_kin = 0.5 * state.v.iter().zip(&mv).map(|(a, b)| a * b).sum::<f64>();
    EnergyReport { w_kin, w_int: state.w_int, w_ext: state.w_ext, balance: w_kin + state.w_int - state.w_ext }
}

/// Incremental potential and its gradient for one step.
#[derive(Debug, Clone, PartialEq)]
pub struct Increment {
    /// `Π(Δd)`; the inertial term is absent in the static limit.
    pub pi: f64,
    /// `∂Π/∂Δd`, zero on constrained dofs.
    pub gradient: Vec<f64>,
    /// Work-accounting terms of the increment: kinetic energy change, trapezoidal internal and external work.
    pub dw_kin: f64,
    pub dw_int: f64,
    pub dw_ext: f64,
    /// End-of-step acceleration implied by `Δd`.
    pub a_next: Vec<f64>,
    pub f_int_next: Vec<f64>,
}

/// Trapezoidal predictor `dt v + dt²/4 a`.
fn predictor(state: &State, dt: f64) -> Vec<f64> {
    state.v.iter().zip(&state.a).map(|(v, a)| dt * v + 0.25 * dt * dt * a).collect()
}

/// Evaluates `Π(Δd) = (2/dt²)(Δd − Δd*)ᵀM(Δd − Δd*) + W(d + Δd) − W(d) − f_extⁿ⁺¹·Δd`.
///
/// `dynamic = false` drops the inertial term (static equilibrium increments).
pub fn incremental_energy(
    dd: &[f64],
    state: &State,
    system: &System,
    loads: &LoadCase,
    dt: f64,
    dynamic: bool,
) -> Result<Increment> {
    let n = dd.len();
    let t1 = state.t + dt;
    let d1: Vec<f64> = state.d.iter().zip(dd).map(|(d, x)| d + x).collect();
    let f_int1 = system.internal_force(&d1)?;
    let f_ext1 = loads.external_force(t1)?;
    let w1 = system.internal_energy(&d1)?;
    let w0 = system.internal_energy(&state.d)?;
    let free = loads.free_mask();
    let mut pi = w1 - w0 - dd.iter().zip(&f_ext1).map(|(a, b)| a * b).sum::<f64>();
    let mut gradient: Vec<f64> = (0..n).map(|i| if free[i] { f_int1[i] - f_ext1[i] } else { 0.0 }).collect();
    let mut a_next = vec![0.0; n];
    if dynamic {
        let pred = predictor(state, dt);
        let e: Vec<f64> = dd.iter().zip(&pred).map(|(a, b)| a - b).collect();
        let me = system.mass_apply(&e);
        let c = 2.0 / (dt * dt);
        pi += c * e.iter().zip(&me).map(|(a, b)| a * b).sum::<f64>();
        for i in 0..n {
            if free[i] {
                gradient[i] += 2.0 * c * me[i];
                a_next[i] = 2.0 * c * e[i];
            }
        }
    }
    let v_next: Vec<f64> = (0..n)
        .map(|i| match loads.prescribed(i, t1) {
            Ok(Some((_, v))) => Ok(v),
            Ok(None) => Ok(state.v[i] + 0.5 * dt * (state.a[i] + a_next[i])),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let kin = |v: &[f64]| 0.5 * v.iter().zip(system.mass_apply(v)).map(|(a, b)| a * b).sum::<f64>();
    let f_ext0 = loads.external_force(state.t)?;
    let dw_int = 0.5 * (0..n).map(|i| dd[i] * (state.f_int[i] + f_int1[i])).sum::<f64>();
    let dw_ext = 0.5 * (0..n).map(|i| dd[i] * (f_ext0[i] + f_ext1[i])).sum::<f64>();
    Ok(Increment { pi, gradient, dw_kin: kin(&v_next) - kin(&state.v), dw_int, dw_ext, a_next, f_int_next: f_int1 })
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Result of one Newton solve.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonTrace {
    pub dd: Vec<f64>,
    pub iterations: usize,
    /// Residual norm after each iteration, starting with the initial guess.
    pub residuals: Vec<f64>,
    pub increment: Increment,
}

/// Minimizes the incremental potential by Newton iteration with backtracking line search.
///
/// The initial guess is the explicit predictor `dt v^{n+1/2}` on free dofs (zero in the static limit)
/// and the prescribed increment on constrained dofs.
pub fn minimize_increment(
    state: &State,
    system: &System,
    loads: &LoadCase,
    dt: f64,
    cfg: &SolverConfig,
    dynamic: bool,
) -> Result<NewtonTrace> {
    let n = system.ndof();
    let t1 = state.t + dt;
    let free = loads.free_dofs();
    let mut dd = vec![0.0; n];
    for i in 0..n {
        dd[i] = match loads.prescribed(i, t1)? {
            Some((u, _)) => u - state.d[i],
            None if dynamic => dt * (state.v[i] + 0.5 * dt * state.a[i]),
            None => 0.0,
        };
    }
    let mut inc = incremental_energy(&dd, state, system, loads, dt, dynamic)?;
    let mut res = norm(&inc.gradient);
    let mut residuals = vec![res];
    let mass_coef = if dynamic { 4.0 / (dt * dt) } else { 0.0 };
    for iter in 0..cfg.newton_max_iters {
        if res <= cfg.newton_tol {
            return Ok(NewtonTrace { dd, iterations: iter, residuals, increment: inc });
        }
        let d1: Vec<f64> = state.d.iter().zip(&dd).map(|(a, b)| a + b).collect();
        let k = tangent_stiffness(&system.tables, &system.material, &d1)?;
        let rhs: Vec<f64> = free.iter().map(|&i| -inc.gradient[i]).collect();
        let step = solve_newton(system, &k, mass_coef, &free, &rhs, iter)?;
        let mut full = vec![0.0; n];
        for (k, &i) in free.iter().enumerate() {
            full[i] = step[k];
        }
        let slope: f64 = full.iter().zip(&inc.gradient).map(|(a, b)| a * b).sum();
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = dd.iter().zip(&full).map(|(a, b)| a + alpha * b).collect();
            if let Ok(next) = incremental_energy(&trial, state, system, loads, dt, dynamic) {
                let next_res = norm(&next.gradient);
                if next.pi <= inc.pi + ARMIJO * alpha * slope || next_res < res {
                    accepted = Some((trial, next, next_res));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((trial, next, next_res)) = accepted else {
            return Err(Error::NoConvergence { iters: iter + 1, residual: res });
        };
        dd = trial;
        inc = next;
        res = next_res;
        residuals.push(res);
    }
    if res <= cfg.newton_tol {
        return Ok(NewtonTrace { dd, iterations: cfg.newton_max_iters, residuals, increment: inc });
    }
    Err(Error::NoConvergence { iters: cfg.newton_max_iters, residual: res })
}

fn solve_newton(system: &System, k: &Csr, mass_coef: f64, free: &[usize], rhs: &[f64], iter: usize) -> Result<Vec<f64>> {
    let mut entries: Vec<(usize, usize, f64)> = (0..k.n).flat_map(|r| k.row(r).map(move |(c, v)| (r, c, v))).collect();
    if mass_coef != 0.0 {
        entries.extend(system.mass_entries().into_iter().map(|(r, c, v)| (r, c, mass_coef * v)));
    }
    let factor = SymmetricFactor::new(system.ndof(), free, entries).ok_or(Error::SingularTangent { iter })?;
    let x = factor.solve(rhs);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularTangent { iter });
    }
    Ok(x)
}

/// One step of the incremental minimization mode.
pub fn min_step(state: &State, system: &System, loads: &LoadCase, cfg: &SolverConfig) -> Result<(State, NewtonTrace)> {
    let dt = cfg.dt;
    let trace = minimize_increment(state, system, loads, dt, cfg, true)?;
    let mut next = state.clone();
    next.t = state.t + dt;
    next.step = state.step + 1;
    let n = next.d.len();
    for i in 0..n {
        next.d[i] = state.d[i] + trace.dd[i];
        next.a[i] = trace.increment.a_next[i];
        next.v[i] = state.v[i] + 0.5 * dt * (state.a[i] + next.a[i]);
    }
    let t1 = next.t;
    apply_essential_bc(&mut next, loads, t1)?;
    check_finite(&next)?;
    let f_ext = loads.external_force(next.t)?;
    next.f_int = trace.increment.f_int_next.clone();
    next.f_work = work_force(system, loads, &next.a, &next.f_int, &f_ext);
    accumulate_work(&mut next, state);
    Ok((next, trace))
}

/// Static equilibrium at time `t` starting from `d0`; returns the equilibrium displacement.
pub fn static_solve(system: &System, loads: &LoadCase, t: f64, d0: &[f64], cfg: &SolverConfig) -> Result<Vec<f64>> {
    let n = system.ndof();
    let state = State {
        d: d0.to_vec(),
        v: vec![0.0; n],
        a: vec![0.0; n],
        t: 0.0,
        step: 0,
        w_int: 0.0,
        w_ext: 0.0,
        f_int: system.internal_force(d0)?,
        f_work: vec![0.0; n],
    };
    let shifted = LoadCase { essential: shift_curves(&loads.essential, t), forces: shift_forces(&loads.forces, t), constraint: loads.constraint.clone() };
    let trace = minimize_increment(&state, system, &shifted, 1.0, cfg, false)?;
    Ok(d0.iter().zip(&trace.dd).map(|(a, b)| a + b).collect())
}

/// Freezes histories at time `t` so that a unit pseudo-step lands on their values at `t`.
fn shift_curves(bcs: &[EssentialBc], t: f64) -> Vec<EssentialBc> {
    bcs.iter()
        .map(|bc| EssentialBc { nodes: bc.nodes.clone(), direction: bc.direction, curve: Curve::constant(bc.curve.value(t).unwrap_or(0.0)) })
        .collect()
}

fn shift_forces(forces: &[ForceLoad], t: f64) -> Vec<ForceLoad> {
    forces.iter().map(|f| ForceLoad { vector: f.vector.clone(), curve: Curve::constant(f.curve.value(t).unwrap_or(0.0)) }).collect()
}

/// Critical explicit time step estimate `h_min / c_d`.
pub fn critical_time_step(mesh: &Mesh, material: &NeoHookean) -> f64 {
    mesh.min_edge_length() / material.wave_speed()
}

/// Stable central-difference step `2 / ω_max`, with `ω_max²` the largest eigenvalue of `M⁻¹ K` in the
/// undeformed state estimated by power iteration. Constraints are ignored, which can only raise `ω_max`.
pub fn stable_time_step(system: &System, iters: usize) -> Result<f64> {
    let n = system.ndof();
    let k = tangent_stiffness(&system.tables, &system.material, &vec![0.0; n])?;
    let all = vec![true; n];
    // deterministic start vector with components in every mode
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 104729) as f64 / 104729.0).collect();
    let mut lambda: f64 = 0.0;
    for _ in 0..iters.max(1) {
        let y = system.mass_solve(&k.mul_vec(&x), &all)?;
        let mx = system.mass_apply(&x);
        let num: f64 = x.iter().zip(&k.mul_vec(&x)).map(|(a, b)| a * b).sum();
        let den: f64 = x.iter().zip(&mx).map(|(a, b)| a * b).sum();
        lambda = lambda.max(num / den);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            break;
        }
        x = y.iter().map(|v| v / norm).collect();
    }
    Ok(2.0 / lambda.sqrt())
}

/// Marches `cfg.steps` steps, calling `observe` after the initial state and every step.
pub fn run(
    system: &System,
    loads: &LoadCase,
    cfg: &SolverConfig,
    mut observe: impl FnMut(&State) -> Result<()>,
) -> Result<State> {
    cfg.validate()?;
    let mut state = initialize(system, loads)?;
    observe(&state)?;
    for _ in 0..cfg.steps {
        state = match cfg.mode {
            Mode::ExplicitCd => cd_step(&state, system, loads, cfg.dt)?,
            Mode::IncrementalMin => min_step(&state, system, loads, cfg)?.0,
        };
        observe(&state)?;
    }
    Ok(state)
}
