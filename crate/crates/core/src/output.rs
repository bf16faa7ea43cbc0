//! Legacy ASCII VTK snapshots and CSV time histories.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::mesh::{ElementKind, Mesh};

/// Fields written with a snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<'a> {
    pub displacement: &'a [f64],
    pub nodal_von_mises: &'a [f64],
    pub cell_von_mises: &'a [f64],
    pub cell_energy_density: &'a [f64],
}

fn vtk_cell_type(kind: ElementKind) -> u8 {
    match kind {
        ElementKind::Line2 => 3,
        ElementKind::Quad4 => 9,
        ElementKind::Tet4 => 10,
    }
}

/// Renders a legacy VTK 3.0 unstructured grid. `title` is truncated to one line of 255 characters.
pub fn vtk_string(mesh: &Mesh, title: &str, fields: &Snapshot) -> String {
    let dim = mesh.dim;
    let mut s = String::new();
    let title: String = title.replace('\n', " ").chars().take(255).collect();
    writeln!(s, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID").unwrap();
    writeln!(s, "POINTS {} double", mesh.node_count()).unwrap();
    for x in &mesh.nodes {
        writeln!(s, "{:.15e} {:.15e} {:.15e}", x[0], x[1], x[2]).unwrap();
    }
    let size: usize = mesh.elements.iter().map(|e| e.nodes.len() + 1).sum();
    writeln!(s, "CELLS {} {size}", mesh.elements.len()).unwrap();
    for e in &mesh.elements {
        let ids: Vec<String> = e.nodes.iter().map(|n| n.to_string()).collect();
        writeln!(s, "{} {}", e.nodes.len(), ids.join(" ")).unwrap();
    }
    writeln!(s, "CELL_TYPES {}", mesh.elements.len()).unwrap();
    for e in &mesh.elements {
        writeln!(s, "{}", vtk_cell_type(e.kind)).unwrap();
    }
    writeln!(s, "POINT_DATA {}\nVECTORS displacement double", mesh.node_count()).unwrap();
    for n in 0..mesh.node_count() {
        let mut u = [0.0; 3];
        u[..dim].copy_from_slice(&fields.displacement[dim * n..dim * n + dim]);
        writeln!(s, "{:.15e} {:.15e} {:.15e}", u[0], u[1], u[2]).unwrap();
    }
    scalars(&mut s, "von_mises", fields.nodal_von_mises);
    writeln!(s, "CELL_DATA {}", mesh.elements.len()).unwrap();
    scalars(&mut s, "von_mises", fields.cell_von_mises);
    scalars(&mut s, "strain_energy_density", fields.cell_energy_density);
    s
}

fn scalars(s: &mut String, name: &str, values: &[f64]) {
    writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default").unwrap();
    for v in values {
        writeln!(s, "{v:.15e}").unwrap();
    }
}

pub fn write_vtk(path: &Path, mesh: &Mesh, title: &str, fields: &Snapshot) -> Result<()> {
    std::fs::write(path, vtk_string(mesh, title, fields)).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// CSV time history: `#` metadata lines, one header line, then one row per call to [`CsvWriter::row`].
pub struct CsvWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: &Path, metadata: &str, columns: &[String]) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
        let mut w = CsvWriter { path: path.to_path_buf(), out: BufWriter::new(file) };
        let mut head = String::new();
        for line in metadata.lines() {
            writeln!(head, "# {line}").unwrap();
        }
        writeln!(head, "{}", columns.join(",")).unwrap();
        w.write(&head)?;
        Ok(w)
    }

    fn write(&mut self, text: &str) -> Result<()> {
        let path = self.path.display().to_string();
        self.out.write_all(text.as_bytes()).map_err(|e| Error::io(format!("writing {path}"), e))
    }

    /// Appends one complete row in a single write.
    pub fn row(&mut self, values: &[f64]) -> Result<()> {
        let line = values.iter().map(|v| format!("{v:.12e}")).collect::<Vec<_>>().join(",") + "\n";
        self.write(&line)
    }

    pub fn finish(mut self) -> Result<()> {
        let path = self.path.display().to_string();
        self.out.flush().map_err(|e| Error::io(format!("flushing {path}"), e))
    }
}

/// Parses a CSV written by [`CsvWriter`]: returns metadata lines, column names and rows.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<String>, Vec<Vec<f64>>)> {
    let mut meta = Vec::new();
    let mut columns = None;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(m) = line.strip_prefix('#') {
            meta.push(m.trim_start().to_string());
        } else if columns.is_none() {
            columns = Some(line.split(',').map(str::to_string).collect());
        } else if !line.is_empty() {
            let row = line
                .split(',')
                .map(|v| v.parse::<f64>().map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() }))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
    }
    Ok((meta, columns.unwrap_or_default(), rows))
}
