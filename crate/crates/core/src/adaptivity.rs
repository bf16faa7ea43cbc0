//! Region-wise enrichment: convolution interpolation on tagged elements, plain finite elements elsewhere.
//!
//! Enriched elements draw their patches from the full mesh, so an enriched element next to a plain
//! one may involve nodes the plain element ignores. Nodal values stay single-valued; the two sides
//! can disagree slightly along shared edges.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::assembly::ShapeTables;
use crate::error::{Error, Result};
use crate::interp::{BasisTable, ConvolutionConfig};
use crate::mesh::Mesh;
use crate::quadrature::{default_order, PLAIN_FE_ORDER};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Enrichment {
    PlainFe,
    Chidenn(ConvolutionConfig),
}

/// Per-element interpolation choice.
#[derive(Debug, Clone, PartialEq)]
pub struct EnrichmentMap {
    /// Distinct convolution configurations in first-use order.
    pub configs: Vec<ConvolutionConfig>,
    /// Per element: index into `configs`, or `None` for plain finite elements.
    pub modes: Vec<Option<usize>>,
}

impl EnrichmentMap {
    pub fn uniform(mesh: &Mesh, mode: &Enrichment) -> Self {
        classify_enrichment(mesh, &BTreeMap::new(), mode).expect("no regions to resolve")
    }

    pub fn enriched_count(&self) -> usize {
        self.modes.iter().filter(|m| m.is_some()).count()
    }

    /// Nodes of the elements using configuration `c`.
    pub fn nodes_of(&self, mesh: &Mesh, c: usize) -> Vec<usize> {
        let set: BTreeSet<usize> = self
            .modes
            .iter()
            .enumerate()
            .filter(|(_, m)| **m == Some(c))
            .flat_map(|(e, _)| mesh.elements[e].nodes.iter().copied())
            .collect();
        set.into_iter().collect()
    }
}

/// Tagged elements take their region's mode, the rest take `default`.
pub fn classify_enrichment(mesh: &Mesh, regions: &BTreeMap<String, Enrichment>, default: &Enrichment) -> Result<EnrichmentMap> {
    let tags: BTreeSet<&str> = mesh.region_tags.values().map(String::as_str).collect();
    for name in regions.keys() {
        if !tags.contains(name.as_str()) {
            return Err(Error::UnknownRegion(name.clone()));
        }
    }
    let mut configs: Vec<ConvolutionConfig> = Vec::new();
    let mut index_of = |c: &ConvolutionConfig| match configs.iter().position(|x| x == c) {
        Some(i) => i,
        None => {
            configs.push(c.clone());
            configs.len() - 1
        }
    };
    let mut modes = Vec::with_capacity(mesh.elements.len());
    for e in 0..mesh.elements.len() {
        let mode = mesh.region_tags.get(&e).and_then(|tag| regions.get(tag)).unwrap_or(default);
        modes.push(match mode {
            Enrichment::PlainFe => None,
            Enrichment::Chidenn(c) => {
                c.validate(mesh.dim)?;
                Some(index_of(c))
            }
        });
    }
    Ok(EnrichmentMap { configs, modes })
}

/// Stencils for every configuration, built only for the nodes of the elements that use it.
pub fn build_bases(mesh: &Mesh, map: &EnrichmentMap) -> Result<Vec<BasisTable>> {
    (0..map.configs.len()).map(|c| BasisTable::build(mesh, &map.configs[c], &map.nodes_of(mesh, c))).collect()
}

/// Shape tables following the map; `order_boost` raises every element's quadrature degree.
pub fn hybrid_shape_tables(mesh: &Mesh, map: &EnrichmentMap, bases: &[BasisTable], order_boost: usize) -> Result<ShapeTables> {
    if let Some(bad) = map.modes.iter().flatten().find(|&&c| c >= bases.len()) {
        return Err(Error::Config(format!("enrichment refers to configuration {bad} without a basis table")));
    }
    ShapeTables::build(mesh, |e| match map.modes[e] {
        None => (None, PLAIN_FE_ORDER + order_boost),
        Some(c) => (Some(&bases[c]), default_order(map.configs[c].p) + order_boost),
    })
}
