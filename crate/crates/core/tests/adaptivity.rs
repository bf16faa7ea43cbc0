use std::collections::BTreeMap;

use chidenn::adaptivity::{build_bases, classify_enrichment, hybrid_shape_tables, Enrichment, EnrichmentMap};
use chidenn::assembly::{deformation_gradient, internal_force, ShapeTables};
use chidenn::interp::{BasisTable, ConvolutionConfig};
use chidenn::material::NeoHookean;
use chidenn::meshgen::NotchedPlate;
use nalgebra::Matrix3;

fn notch_regions(cfg: &ConvolutionConfig) -> BTreeMap<String, Enrichment> {
    BTreeMap::from([("notch".to_string(), Enrichment::Chidenn(cfg.clone()))])
}

#[test]
fn only_the_notch_region_is_enriched() {
    let mesh = NotchedPlate::default().build().unwrap();
    let cfg = ConvolutionConfig::rbf(2, 2, 2.0);
    let map = classify_enrichment(&mesh, &notch_regions(&cfg), &Enrichment::PlainFe).unwrap();
    let tagged = mesh.region_tags.values().filter(|t| *t == "notch").count();
    assert!(tagged > 0 && tagged < mesh.elements.len());
    assert_eq!(map.enriched_count(), tagged);
    for (e, mode) in map.modes.iter().enumerate() {
        assert_eq!(mode.is_some(), mesh.region_tags[&e] == "notch");
    }
}

#[test]
fn hybrid_field_reproduces_homogeneous_deformation() {
    let mesh = NotchedPlate::default().build().unwrap();
    let map = classify_enrichment(&mesh, &notch_regions(&ConvolutionConfig::rbf(2, 2, 2.0)), &Enrichment::PlainFe).unwrap();
    let bases = build_bases(&mesh, &map).unwrap();
    let tables = hybrid_shape_tables(&mesh, &map, &bases, 0).unwrap();
    let f_bar = Matrix3::new(1.05, 0.02, 0.0, -0.03, 0.97, 0.0, 0.0, 0.0, 1.0);
    let d: Vec<f64> = mesh.nodes.iter().flat_map(|x| [(f_bar[(0, 0)] - 1.0) * x[0] + f_bar[(0, 1)] * x[1], f_bar[(1, 0)] * x[0] + (f_bar[(1, 1)] - 1.0) * x[1]]).collect();
    for t in &tables.elements {
        for p in &t.points {
            assert!((p.sample.values.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            let f = deformation_gradient(&p.sample, 2, &d);
            assert!((f - f_bar).abs().max() < 1e-10, "element {}", t.element);
        }
    }
}

#[test]
fn uniform_map_matches_direct_tables() {
    let mesh = NotchedPlate { nx: 5, ny: 12, ..NotchedPlate::default() }.build().unwrap();
    let cfg = ConvolutionConfig::rbf(1, 2, 1.5);
    let mat = NeoHookean::new(2.0, 0.1, 1.0).unwrap();
    let d: Vec<f64> = (0..mesh.ndof()).map(|i| 1e-3 * ((i as f64) * 0.37).sin()).collect();

    let map = EnrichmentMap::uniform(&mesh, &Enrichment::Chidenn(cfg.clone()));
    let hybrid = hybrid_shape_tables(&mesh, &map, &build_bases(&mesh, &map).unwrap(), 0).unwrap();
    let direct = ShapeTables::uniform(&mesh, Some(&BasisTable::build_all(&mesh, &cfg).unwrap()), None).unwrap();
    assert_eq!(internal_force(&hybrid, &mat, &d).unwrap(), internal_force(&direct, &mat, &d).unwrap());

    let plain_map = EnrichmentMap::uniform(&mesh, &Enrichment::PlainFe);
    let plain = hybrid_shape_tables(&mesh, &plain_map, &build_bases(&mesh, &plain_map).unwrap(), 0).unwrap();
    let fem = ShapeTables::uniform(&mesh, None, None).unwrap();
    assert_eq!(internal_force(&plain, &mat, &d).unwrap(), internal_force(&fem, &mat, &d).unwrap());
}

#[test]
fn hybrid_tables_are_cheaper_than_full_enrichment() {
    let mesh = NotchedPlate::default().build().unwrap();
    let cfg = ConvolutionConfig::rbf(2, 2, 2.0);
    let hybrid_map = classify_enrichment(&mesh, &notch_regions(&cfg), &Enrichment::PlainFe).unwrap();
    let full_map = EnrichmentMap::uniform(&mesh, &Enrichment::Chidenn(cfg));
    let hybrid = hybrid_shape_tables(&mesh, &hybrid_map, &build_bases(&mesh, &hybrid_map).unwrap(), 0).unwrap();
    let full = hybrid_shape_tables(&mesh, &full_map, &build_bases(&mesh, &full_map).unwrap(), 0).unwrap();
    let work = |t: &ShapeTables| t.elements.iter().map(|e| e.points.len() * e.nodes.len()).sum::<usize>();
    assert!(hybrid.point_count() < full.point_count());
    assert!(2 * work(&hybrid) < work(&full), "{} vs {}", work(&hybrid), work(&full));
}

#[test]
fn quadrature_boost_raises_only_the_order() {
    let mesh = NotchedPlate { nx: 5, ny: 12, ..NotchedPlate::default() }.build().unwrap();
    let map = classify_enrichment(&mesh, &notch_regions(&ConvolutionConfig::rbf(1, 1, 1.0)), &Enrichment::PlainFe).unwrap();
    let bases = build_bases(&mesh, &map).unwrap();
    let base = hybrid_shape_tables(&mesh, &map, &bases, 0).unwrap();
    let boosted = hybrid_shape_tables(&mesh, &map, &bases, 2).unwrap();
    for (a, b) in base.elements.iter().zip(&boosted.elements) {
        assert_eq!(a.order + 2, b.order);
        assert_eq!(a.nodes, b.nodes);
        let wa: f64 = a.points.iter().map(|p| p.weight).sum();
        let wb: f64 = b.points.iter().map(|p| p.weight).sum();
        assert!((wa - wb).abs() < 1e-12 * wa);
    }
}
