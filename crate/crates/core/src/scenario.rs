//! Scenario files: resolution against a mesh, setup, time loop and output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::adaptivity::{build_bases, classify_enrichment, hybrid_shape_tables, Enrichment, EnrichmentMap};
use crate::assembly::{body_force, element_fields, facet_points, nodal_von_mises, von_mises_at_node, QuadPoint};
use crate::dynamics::{critical_time_step, energy_report, run, Curve, EssentialBc, ForceLoad, LoadCase, SolverConfig, State, System};
use crate::error::{Error, Result};
use crate::material::NeoHookean;
use crate::mesh::{parse_mesh, Mesh};
use crate::output::{write_vtk, CsvWriter, Snapshot};
use crate::quadrature::{default_order, PLAIN_FE_ORDER};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    pub c10: Option<f64>,
    pub d1: Option<f64>,
    pub mu0: Option<f64>,
    pub k0: Option<f64>,
    pub rho0: f64,
}

impl MaterialSpec {
    pub fn resolve(&self) -> Result<NeoHookean> {
        match (self.c10, self.d1, self.mu0, self.k0) {
            (Some(c10), Some(d1), None, None) => NeoHookean::new(c10, d1, self.rho0),
            (None, None, Some(mu0), Some(k0)) => NeoHookean::from_moduli(mu0, k0, self.rho0),
            _ => Err(Error::Config("material needs either c10 and d1, or mu0 and k0".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpolationSpec {
    #[serde(default = "plain")]
    pub default: Enrichment,
    #[serde(default)]
    pub regions: BTreeMap<String, Enrichment>,
    /// Added to every element's default quadrature degree.
    #[serde(default)]
    pub quadrature_boost: usize,
}

fn plain() -> Enrichment {
    Enrichment::PlainFe
}

impl Default for InterpolationSpec {
    fn default() -> Self {
        InterpolationSpec { default: Enrichment::PlainFe, regions: BTreeMap::new(), quadrature_boost: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EssentialSpec {
    /// Node set name.
    pub set: String,
    pub direction: usize,
    pub curve: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TractionSpec {
    pub facet_set: String,
    pub vector: Vec<f64>,
    pub curve: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyForceSpec {
    /// Acceleration-like body force per unit mass.
    pub vector: Vec<f64>,
    pub curve: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    #[serde(rename = "u_x")]
    Ux,
    #[serde(rename = "u_y")]
    Uy,
    #[serde(rename = "u_z")]
    Uz,
    VonMises,
}

impl Field {
    fn column(self) -> &'static str {
        match self {
            Field::Ux => "u_x",
            Field::Uy => "u_y",
            Field::Uz => "u_z",
            Field::VonMises => "von_mises",
        }
    }
}

/// Monitored node: given by id, by a single-node set, or as the nearest node to a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorSpec {
    pub name: String,
    pub node: Option<usize>,
    pub set: Option<String>,
    pub point: Option<Vec<f64>>,
    pub fields: Vec<Field>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Output directory, relative to the scenario file.
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default)]
    pub monitor: Vec<MonitorSpec>,
    /// Append global energies to every CSV row.
    #[serde(default)]
    pub energies: bool,
    /// VTK snapshot interval in steps; 0 writes only the final state.
    #[serde(default)]
    pub snapshot_every: usize,
    #[serde(default = "yes")]
    pub vtk: bool,
}

fn default_dir() -> String {
    "output".into()
}
fn yes() -> bool {
    true
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: default_dir(), monitor: Vec::new(), energies: false, snapshot_every: 0, vtk: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    /// Mesh file, relative to the scenario file.
    pub mesh: String,
    pub material: MaterialSpec,
    #[serde(default)]
    pub interpolation: InterpolationSpec,
    pub solver: SolverConfig,
    #[serde(default)]
    pub essential: Vec<EssentialSpec>,
    #[serde(default)]
    pub traction: Vec<TractionSpec>,
    pub body_force: Option<BodyForceSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timings {
    /// Patch bases, shape tables and mass.
    pub setup: f64,
    pub bases: f64,
    pub tables: f64,
    pub mass: f64,
    /// Time loop, total and per step.
    pub solve: f64,
    pub per_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Monitor {
    name: String,
    node: usize,
    fields: Vec<Field>,
}

/// Fully resolved scenario, ready to run.
pub struct Prepared {
    pub config: ScenarioConfig,
    pub mesh: Mesh,
    pub map: EnrichmentMap,
    pub system: System,
    pub loads: LoadCase,
    pub dt_crit: f64,
    pub timings: Timings,
    monitors: Vec<Monitor>,
}

fn curve(points: &[(f64, f64)]) -> Result<Curve> {
    Curve::new(points.to_vec())
}

fn vector3(v: &[f64], dim: usize, what: &str) -> Result<[f64; 3]> {
    if v.len() != dim {
        return Err(Error::Config(format!("{what} has {} components, mesh dimension is {dim}", v.len())));
    }
    let mut out = [0.0; 3];
    out[..dim].copy_from_slice(v);
    Ok(out)
}

impl Prepared {
    pub fn new(config: ScenarioConfig, mesh: Mesh) -> Result<Self> {
        config.solver.validate()?;
        let material = config.material.resolve()?;
        let dim = mesh.dim;
        let start = Instant::now();
        let map = classify_enrichment(&mesh, &config.interpolation.regions, &config.interpolation.default)?;

        let mut monitors = Vec::new();
        for m in &config.output.monitor {
            let node = match (m.node, &m.set, &m.point) {
                (Some(n), None, None) if n < mesh.node_count() => n,
                (None, Some(set), None) => match mesh.node_set(set)? {
                    [n] => *n,
                    other => return Err(Error::Config(format!("monitor set '{set}' has {} nodes, expected 1", other.len()))),
                },
                (None, None, Some(p)) => mesh.nearest_node(vector3(p, dim, "monitor point")?),
                _ => return Err(Error::Config(format!("monitor '{}' needs exactly one valid node, set or point", m.name))),
            };
            if m.fields.iter().any(|f| (*f == Field::Uy && dim < 2) || (*f == Field::Uz && dim < 3)) {
                return Err(Error::Config(format!("monitor '{}' asks for a displacement component beyond dimension {dim}", m.name)));
            }
            monitors.push(Monitor { name: m.name.clone(), node, fields: m.fields.clone() });
        }
        let mut essential = Vec::new();
        for e in &config.essential {
            essential.push(EssentialBc { nodes: mesh.node_set(&e.set)?.to_vec(), direction: e.direction, curve: curve(&e.curve)? });
        }
        for t in &config.traction {
            mesh.facet_set(&t.facet_set)?;
        }

        let t_bases = Instant::now();
        let bases = build_bases(&mesh, &map)?;
        let bases_time = t_bases.elapsed().as_secs_f64();
        let t_tables = Instant::now();
        let boost = config.interpolation.quadrature_boost;
        let tables = hybrid_shape_tables(&mesh, &map, &bases, boost)?;
        let tables_time = t_tables.elapsed().as_secs_f64();

        let mut forces = Vec::new();
        for t in &config.traction {
            let tr = vector3(&t.vector, dim, "traction vector")?;
            let mut points: Vec<QuadPoint> = Vec::new();
            for &f in mesh.facet_set(&t.facet_set)? {
                let element = mesh.facets[f].element;
                let (b, order) = match map.modes[element] {
                    None => (None, PLAIN_FE_ORDER + boost),
                    Some(c) => (Some(&bases[c]), default_order(map.configs[c].p) + boost),
                };
                points.extend(facet_points(&mesh, f, b, order)?);
            }
            let vector = crate::assembly::traction_force(mesh.ndof(), dim, &points, tr);
            forces.push(ForceLoad { vector, curve: curve(&t.curve)? });
        }
        if let Some(b) = &config.body_force {
            let bv = vector3(&b.vector, dim, "body force")?;
            forces.push(ForceLoad { vector: body_force(&tables, material.rho0, bv), curve: curve(&b.curve)? });
        }
        let loads = LoadCase::new(dim, mesh.ndof(), essential, forces)?;
        let t_mass = Instant::now();
        let system = System::new(tables, material, config.solver.lumped_mass)?;
        let mass_time = t_mass.elapsed().as_secs_f64();
        let dt_crit = critical_time_step(&mesh, &material);
        if config.solver.dt > 0.9 * dt_crit {
            log::warn!("dt = {:.3e} exceeds 0.9 of the critical estimate {:.3e}", config.solver.dt, dt_crit);
        }
        let timings = Timings {
            setup: start.elapsed().as_secs_f64(),
            bases: bases_time,
            tables: tables_time,
            mass: mass_time,
            ..Timings::default()
        };
        Ok(Prepared { config, mesh, map, system, loads, dt_crit, timings, monitors })
    }

    /// CSV column names: `t`, then monitored quantities in config order, then energies if requested.
    pub fn columns(&self) -> Vec<String> {
        let mut cols = vec!["t".to_string()];
        for m in &self.monitors {
            for f in &m.fields {
                cols.push(format!("{}.{}", m.name, f.column()));
            }
        }
        if self.config.output.energies {
            cols.extend(["w_kin", "w_int", "w_ext", "balance"].map(String::from));
        }
        cols
    }

    pub fn monitored_nodes(&self) -> Vec<(String, usize)> {
        self.monitors.iter().map(|m| (m.name.clone(), m.node)).collect()
    }

    /// One history row for `state`.
    pub fn row(&self, state: &State) -> Result<Vec<f64>> {
        let dim = self.mesh.dim;
        let mut row = vec![state.t];
        for m in &self.monitors {
            for f in &m.fields {
                row.push(match f {
                    Field::Ux => state.d[dim * m.node],
                    Field::Uy => state.d[dim * m.node + 1],
                    Field::Uz => state.d[dim * m.node + 2],
                    Field::VonMises => von_mises_at_node(&self.mesh, &self.system.tables, &self.system.material, &state.d, m.node)?,
                });
            }
        }
        if self.config.output.energies {
            let e = energy_report(state, &self.system);
            row.extend([e.w_kin, e.w_int, e.w_ext, e.balance]);
        }
        Ok(row)
    }

    /// Resolved configuration summary: kernel parameters, dt and quadrature degrees.
    pub fn metadata(&self) -> String {
        let mut s = format!("scenario: {}\n", self.config.name);
        let kernels: Vec<String> = self.map.configs.iter().map(|c| c.describe()).collect();
        let kernel = if kernels.is_empty() { "kernel=none (plain finite elements)".to_string() } else { kernels.join("; ") };
        s += &format!("interpolation: {kernel}; enriched elements {}/{}\n", self.map.enriched_count(), self.mesh.elements.len());
        let orders: std::collections::BTreeSet<usize> = self.system.tables.elements.iter().map(|e| e.order).collect();
        s += &format!("quadrature degree: {orders:?}\n");
        let c = &self.config.solver;
        s += &format!("solver: mode={:?} dt={} steps={} lumped_mass={} newton_tol={}\n", c.mode, c.dt, c.steps, c.lumped_mass, c.newton_tol);
        s += "von_mises: Cauchy stress, averaged over elements sharing the node\n";
        s += "w_ext: includes reaction work at prescribed dofs\n";
        for (name, node) in self.monitored_nodes() {
            let x = self.mesh.nodes[node];
            s += &format!("monitor {name}: node {node} at ({}, {}, {})\n", x[0], x[1], x[2]);
        }
        s += "config:\n";
        s += &self.config.to_toml();
        s
    }

    fn title(&self) -> String {
        let kernels: Vec<String> = self.map.configs.iter().map(|c| c.describe()).collect();
        let orders: std::collections::BTreeSet<usize> = self.system.tables.elements.iter().map(|e| e.order).collect();
        format!(
            "{} | {} | quadrature={:?} dt={}",
            self.config.name,
            if kernels.is_empty() { "kernel=none".into() } else { kernels.join("; ") },
            orders,
            self.config.solver.dt
        )
    }

    /// Runs the time loop, returning the final state and the history rows.
    pub fn run_with(&mut self, mut observe: impl FnMut(&Prepared, &State) -> Result<()>) -> Result<(State, Vec<Vec<f64>>)> {
        let mut rows = Vec::new();
        let start = Instant::now();
        let final_state = {
            let this = &*self;
            run(&this.system, &this.loads, &this.config.solver, |s| {
                rows.push(this.row(s)?);
                observe(this, s)
            })?
        };
        self.timings.solve = start.elapsed().as_secs_f64();
        self.timings.per_step = self.timings.solve / self.config.solver.steps.max(1) as f64;
        Ok((final_state, rows))
    }

    pub fn write_snapshot(&self, path: &Path, state: &State) -> Result<()> {
        let nodal = nodal_von_mises(&self.mesh, &self.system.tables, &self.system.material, &state.d)?;
        let (cell_vm, cell_w) = element_fields(&self.system.tables, &self.system.material, &state.d)?;
        let snap = Snapshot { displacement: &state.d, nodal_von_mises: &nodal, cell_von_mises: &cell_vm, cell_energy_density: &cell_w };
        write_vtk(path, &self.mesh, &format!("{} t={}", self.title(), state.t), &snap)
    }
}

/// Reads a scenario file and its mesh.
pub fn load(path: &Path) -> Result<(ScenarioConfig, Mesh, PathBuf)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let config = ScenarioConfig::parse(&text)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mesh_path = base.join(&config.mesh);
    let mesh_text = std::fs::read_to_string(&mesh_path).map_err(|e| Error::io(format!("reading mesh {}", mesh_path.display()), e))?;
    let mesh = parse_mesh(&mesh_text).map_err(|e| match e {
        Error::Parse { line, msg } => Error::Config(format!("{}:{line}: {msg}", mesh_path.display())),
        other => other,
    })?;
    Ok((config, mesh, base))
}

/// Summary of a completed run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub csv: PathBuf,
    pub snapshots: Vec<PathBuf>,
    pub timings: Timings,
    pub dt_crit: f64,
    pub kernel: String,
    pub final_state: State,
}

/// Runs a scenario file, writing the CSV history and VTK snapshots. `out_dir` overrides the configured directory.
pub fn run_scenario(path: &Path, out_dir: Option<&Path>) -> Result<RunSummary> {
    run_scenario_with(path, out_dir, |_| {})
}

/// As [`run_scenario`], calling `on_ready` once setup is complete and before the time loop starts.
pub fn run_scenario_with(path: &Path, out_dir: Option<&Path>, on_ready: impl FnOnce(&Prepared)) -> Result<RunSummary> {
    let (config, mesh, base) = load(path)?;
    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| base.join(&config.output.dir));
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let mut prepared = Prepared::new(config, mesh)?;
    on_ready(&prepared);
    let name = prepared.config.name.clone();
    let csv_path = dir.join(format!("{name}.csv"));
    let mut csv = CsvWriter::create(&csv_path, &prepared.metadata(), &prepared.columns())?;
    let every = prepared.config.output.snapshot_every;
    let vtk = prepared.config.output.vtk;
    let steps = prepared.config.solver.steps;
    let mut snapshots = Vec::new();
    let (final_state, _) = prepared.run_with(|p, s| {
        csv.row(&p.row(s)?)?;
        let due = (every > 0 && s.step % every == 0) || s.step == steps;
        if vtk && due {
            let path = dir.join(format!("{name}_{:06}.vtk", s.step));
            p.write_snapshot(&path, s)?;
            snapshots.push(path);
        }
        Ok(())
    })?;
    csv.finish()?;
    let kernel = prepared.map.configs.iter().map(|c| c.describe()).collect::<Vec<_>>().join("; ");
    Ok(RunSummary { csv: csv_path, snapshots, timings: prepared.timings, dt_crit: prepared.dt_crit, kernel, final_state })
}
