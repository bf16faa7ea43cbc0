use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chidenn::convergence::{convergence_study, Problem, StudyMode};
use chidenn::interp::ConvolutionConfig;
use chidenn::meshgen::{self, NotchedPlate};
use chidenn::mesh::parse_mesh;
use chidenn::scenario::run_scenario_with;
use chidenn::verify::{verify_suite, Level};
use chidenn::{Error, Result};

#[derive(Parser)]
#[command(name = "chidenn", version, about = "Convolution-enriched FE solver for nonlinear solid dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its CSV history and VTK snapshots.
    Run {
        config: PathBuf,
        /// Output directory, overriding the one in the scenario.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in property suites.
    Verify {
        #[arg(long, default_value = "fast")]
        level: Level,
    },
    /// Manufactured-solution convergence study.
    Convergence {
        /// bar1d or plate2d.
        problem: Problem,
        /// Elements per side, ascending.
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        refinements: Vec<usize>,
        /// `fem`, `chidenn` (problem default) or `chidenn:S,P,A`.
        #[arg(long, num_args = 1.., default_values = ["fem", "chidenn"])]
        modes: Vec<String>,
    },
    /// Write a generated mesh file.
    Mesh {
        #[command(subcommand)]
        kind: MeshKind,
        /// Destination file.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MeshKind {
    /// Plate with a semicircular notch on its left edge.
    NotchedPlate {
        #[arg(long, default_value_t = 15)]
        nx: usize,
        #[arg(long, default_value_t = 30)]
        ny: usize,
        #[arg(long, default_value_t = 0.3)]
        width: f64,
        #[arg(long, default_value_t = 1.0)]
        height: f64,
        #[arg(long, default_value_t = 0.1)]
        radius: f64,
        /// Elements closer than this to the notch tip are tagged `notch`, the rest `bulk`.
        #[arg(long, default_value_t = 0.2)]
        region_radius: f64,
    },
    /// Uniform line2 bar on [0, length].
    Bar {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        length: f64,
    },
    /// Uniform quad4 grid.
    Grid {
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        #[arg(long, default_value_t = 1.0)]
        lx: f64,
        #[arg(long, default_value_t = 1.0)]
        ly: f64,
    },
    /// Split every quad of an existing mesh file into k x k quads.
    Refine {
        input: PathBuf,
        #[arg(long)]
        k: usize,
    },
}

fn parse_mode(text: &str, problem: Problem) -> Result<StudyMode> {
    match text {
        "fem" => Ok(StudyMode::Fem),
        "chidenn" => Ok(StudyMode::chidenn_default(problem)),
        _ => {
            let bad = || Error::Config(format!("unknown mode '{text}' (expected fem, chidenn or chidenn:S,P,A)"));
            let args = text.strip_prefix("chidenn:").ok_or_else(bad)?;
            let parts: Vec<&str> = args.split(',').collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            let s = parts[0].parse().map_err(|_| bad())?;
            let p = parts[1].parse().map_err(|_| bad())?;
            let a = parts[2].parse().map_err(|_| bad())?;
            Ok(StudyMode::Chidenn(ConvolutionConfig::rbf(s, p, a)))
        }
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Config(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, out } => {
            let summary = run_scenario_with(&config, out.as_deref(), |p| {
                let kernels: Vec<String> = p.map.configs.iter().map(|c| c.describe()).collect();
                println!("kernel: {}", if kernels.is_empty() { "plain finite element".into() } else { kernels.join("; ") });
                println!("dt = {:.4e}, dt_crit ~ h_min/c_d = {:.4e}", p.config.solver.dt, p.dt_crit);
            })?;
            let t = summary.timings;
            println!("setup  {:>9.3} s (bases {:.3} s, shape tables {:.3} s, mass {:.3} s)", t.setup, t.bases, t.tables, t.mass);
            println!("solve  {:>9.3} s ({:.3e} s per step)", t.solve, t.per_step);
            println!("wrote {} and {} snapshot(s)", summary.csv.display(), summary.snapshots.len());
            Ok(true)
        }
        Command::Verify { level } => {
            let report = verify_suite(level);
            print!("{}", report.render());
            Ok(report.passed())
        }
        Command::Convergence { problem, refinements, modes } => {
            let modes = modes.iter().map(|m| parse_mode(m, problem)).collect::<Result<Vec<_>>>()?;
            let table = convergence_study(problem, &refinements, &modes)?;
            print!("{}", table.render());
            Ok(true)
        }
        Command::Mesh { kind, out } => {
            let mesh = match kind {
                MeshKind::NotchedPlate { nx, ny, width, height, radius, region_radius } => {
                    NotchedPlate { width, height, radius, nx, ny, region_radius }.build()?
                }
                MeshKind::Bar { n, length } => meshgen::bar(0.0, length, n)?,
                MeshKind::Grid { nx, ny, lx, ly } => meshgen::quad_grid(nx, ny, lx, ly)?,
                MeshKind::Refine { input, k } => {
                    let text = std::fs::read_to_string(&input).map_err(|e| Error::Config(format!("reading {}: {e}", input.display())))?;
                    meshgen::refine_quads(&parse_mesh(&text)?, k)?
                }
            };
            write_or_print(out.as_deref(), &mesh.to_text())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
