use chidenn::assembly::{element_fields, nodal_von_mises, ShapeTables};
use chidenn::interp::{BasisTable, ConvolutionConfig};
use chidenn::material::NeoHookean;
use chidenn::meshgen;
use chidenn::output::{read_csv, vtk_string, CsvWriter, Snapshot};
use nalgebra::Matrix3;

fn stretched(mesh: &chidenn::mesh::Mesh, stretch: f64) -> Vec<f64> {
    mesh.nodes.iter().flat_map(|x| [(stretch - 1.0) * x[0], 0.0]).collect()
}

#[test]
fn stretched_bar_has_uniform_von_mises() {
    let mesh = meshgen::quad_grid(8, 2, 4.0, 1.0).unwrap();
    let mat = NeoHookean::new(10.0, 0.05, 1.0).unwrap();
    let d = stretched(&mesh, 1.2);
    // oracle: Cauchy stress of F = diag(1.2, 1, 1) straight from the material law
    let exact = mat.von_mises(&Matrix3::new(1.2, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0)).unwrap();
    let bases = BasisTable::build_all(&mesh, &ConvolutionConfig::rbf(1, 2, 1.0)).unwrap();
    for b in [None, Some(&bases)] {
        let tables = ShapeTables::uniform(&mesh, b, None).unwrap();
        let (cells, energy) = element_fields(&tables, &mat, &d).unwrap();
        let nodal = nodal_von_mises(&mesh, &tables, &mat, &d).unwrap();
        for v in cells.iter().chain(&nodal) {
            assert!((v - exact).abs() < 1e-8 * exact, "{v} vs {exact}");
        }
        let w = energy[0];
        assert!(energy.iter().all(|e| (e - w).abs() < 1e-8 * w));
    }
}

#[test]
fn snapshot_layout_of_a_small_mesh() {
    let mesh = meshgen::quad_grid(2, 1, 2.0, 1.0).unwrap();
    let d = stretched(&mesh, 1.1);
    let nodal = vec![1.0; mesh.node_count()];
    let cells = vec![2.0; 2];
    let text = vtk_string(&mesh, "two cells", &Snapshot { displacement: &d, nodal_von_mises: &nodal, cell_von_mises: &cells, cell_energy_density: &cells });
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# vtk DataFile Version 3.0");
    assert_eq!(lines[1], "two cells");
    assert!(text.contains("POINTS 6 double"));
    assert!(text.contains("CELLS 2 10"));
    assert!(text.contains("CELL_TYPES 2\n9\n9"));
    assert!(text.contains("POINT_DATA 6") && text.contains("CELL_DATA 2"));
    assert!(text.contains("VECTORS displacement double"));
}

#[test]
fn csv_rows_after_a_single_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.csv");
    let mut w = CsvWriter::create(&path, "scenario: test\nkernel: none", &["t".into(), "a".into()]).unwrap();
    for k in 0..5 {
        w.row(&[k as f64 * 0.1, -(k as f64)]).unwrap();
    }
    w.finish().unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("t,")).count(), 1);
    let (meta, cols, rows) = read_csv(&text).unwrap();
    assert_eq!(meta.len(), 2);
    assert_eq!(cols, ["t", "a"]);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[4], [0.4, -4.0]);
}
