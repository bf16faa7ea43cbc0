//! Lagrangian mesh, its text format, and the nodal/element patches that define
//! convolution connectivity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::interp::fe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKind {
    Line2,
    Quad4,
    Tet4,
}

impl ElementKind {
    pub fn node_count(self) -> usize {
        match self {
            ElementKind::Line2 => 2,
            ElementKind::Quad4 => 4,
            ElementKind::Tet4 => 4,
        }
    }

    /// Spatial dimension of meshes built from this kind.
    pub fn dim(self) -> usize {
        match self {
            ElementKind::Line2 => 1,
            ElementKind::Quad4 => 2,
            ElementKind::Tet4 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementKind::Line2 => "line2",
            ElementKind::Quad4 => "quad4",
            ElementKind::Tet4 => "tet4",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "line2" => Some(ElementKind::Line2),
            "quad4" => Some(ElementKind::Quad4),
            "tet4" => Some(ElementKind::Tet4),
            _ => None,
        }
    }

    pub fn parent_center(self) -> [f64; 3] {
        match self {
            ElementKind::Line2 | ElementKind::Quad4 => [0.0; 3],
            ElementKind::Tet4 => [0.25, 0.25, 0.25],
        }
    }

    pub fn parent_nodes(self) -> &'static [[f64; 3]] {
        match self {
            ElementKind::Line2 => &[[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
            ElementKind::Quad4 => &[
                [-1.0, -1.0, 0.0],
                [1.0, -1.0, 0.0],
                [1.0, 1.0, 0.0],
                [-1.0, 1.0, 0.0],
            ],
            ElementKind::Tet4 => &[
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
            ],
        }
    }

    /// Local node indices of each face (boundary facet), outward-oriented.
    pub fn faces(self) -> &'static [&'static [usize]] {
        match self {
            ElementKind::Line2 => &[&[0], &[1]],
            ElementKind::Quad4 => &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]],
            ElementKind::Tet4 => &[&[0, 2, 1], &[0, 1, 3], &[0, 3, 2], &[1, 2, 3]],
        }
    }

    pub fn edges(self) -> &'static [(usize, usize)] {
        match self {
            ElementKind::Line2 => &[(0, 1)],
            ElementKind::Quad4 => &[(0, 1), (1, 2), (2, 3), (3, 0)],
            ElementKind::Tet4 => &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        }
    }

    /// Parent points where inversion is checked. Corners suffice for multilinear maps.
    fn check_points(self) -> Vec<[f64; 3]> {
        let mut pts = vec![self.parent_center()];
        if self == ElementKind::Quad4 {
            pts.extend_from_slice(self.parent_nodes());
        }
        pts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub kind: ElementKind,
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub element: usize,
    pub local_face: usize,
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodePatch {
    pub center: usize,
    /// Ascending node ids.
    pub members: Vec<usize>,
    /// Characteristic nodal distance around the center.
    pub spacing: f64,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub dim: usize,
    pub nodes: Vec<[f64; 3]>,
    pub elements: Vec<Element>,
    pub facets: Vec<Facet>,
    pub region_tags: BTreeMap<usize, String>,
    pub node_sets: BTreeMap<String, Vec<usize>>,
    pub facet_sets: BTreeMap<String, Vec<usize>>,
    node_elements: Vec<Vec<usize>>,
}

impl Mesh {
    /// Builds and validates a mesh without facets, tags or sets.
    pub fn new(dim: usize, nodes: Vec<[f64; 3]>, elements: Vec<Element>) -> Result<Self> {
        let mut mesh = Mesh {
            dim,
            nodes,
            elements,
            facets: Vec::new(),
            region_tags: BTreeMap::new(),
            node_sets: BTreeMap::new(),
            facet_sets: BTreeMap::new(),
            node_elements: Vec::new(),
        };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Appends a boundary facet and returns its id.
    pub fn add_facet(&mut self, element: usize, local_face: usize) -> Result<usize> {
        let el = self
            .elements
            .get(element)
            .ok_or_else(|| Error::InvalidMesh(format!("facet references missing element {element}")))?;
        let face = el.kind.faces().get(local_face).ok_or_else(|| {
            Error::InvalidMesh(format!("element {element} has no local face {local_face}"))
        })?;
        let nodes = face.iter().map(|&l| el.nodes[l]).collect();
        self.facets.push(Facet { element, local_face, nodes });
        Ok(self.facets.len() - 1)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn ndof(&self) -> usize {
        self.dim * self.nodes.len()
    }

    pub fn element_coords(&self, element: usize) -> Vec<[f64; 3]> {
        self.elements[element].nodes.iter().map(|&n| self.nodes[n]).collect()
    }

    pub fn elements_of_node(&self, node: usize) -> &[usize] {
        &self.node_elements[node]
    }

    fn validate(&mut self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidMesh(format!("dimension {} not in 1..=3", self.dim)));
        }
        let count = self.nodes.len();
        for (e, el) in self.elements.iter().enumerate() {
            if el.kind.dim() != self.dim {
                return Err(Error::InvalidMesh(format!(
                    "element {e} of kind {} in a {}-dimensional mesh",
                    el.kind.name(),
                    self.dim
                )));
            }
            if el.nodes.len() != el.kind.node_count() {
                return Err(Error::InvalidMesh(format!(
                    "element {e} has {} nodes, {} expects {}",
                    el.nodes.len(),
                    el.kind.name(),
                    el.kind.node_count()
                )));
            }
            if let Some(&node) = el.nodes.iter().find(|&&n| n >= count) {
                return Err(Error::DanglingNode { element: e, node, count });
            }
            let unique: BTreeSet<_> = el.nodes.iter().collect();
            if unique.len() != el.nodes.len() {
                return Err(Error::InvalidMesh(format!("element {e} repeats a node id")));
            }
            let coords = self.element_coords(e);
            for xi in el.kind.check_points() {
                let shape = fe::fe_shape_unchecked(el.kind, xi);
                let det_j = fe::jacobian(self.dim, &coords, &shape.d_xi).determinant();
                if !(det_j > 0.0) {
                    return Err(Error::InvertedElement { element: e, det_j, xi });
                }
            }
        }
        for (f, facet) in self.facets.iter().enumerate() {
            let el = self.elements.get(facet.element).ok_or_else(|| {
                Error::InvalidMesh(format!("facet {f} references missing element {}", facet.element))
            })?;
            if !facet.nodes.iter().all(|n| el.nodes.contains(n)) {
                return Err(Error::InvalidMesh(format!("facet {f} nodes are not on element {}", facet.element)));
            }
        }
        for (name, set) in &self.node_sets {
            if let Some(&n) = set.iter().find(|&&n| n >= count) {
                return Err(Error::InvalidMesh(format!("node set '{name}' references missing node {n}")));
            }
        }
        for (name, set) in &self.facet_sets {
            if let Some(&f) = set.iter().find(|&&f| f >= self.facets.len()) {
                return Err(Error::InvalidMesh(format!("facet set '{name}' references missing facet {f}")));
            }
        }
        if let Some((&e, _)) = self.region_tags.iter().find(|(&e, _)| e >= self.elements.len()) {
            return Err(Error::InvalidMesh(format!("region tag on missing element {e}")));
        }
        let mut node_elements = vec![Vec::new(); count];
        for (e, el) in self.elements.iter().enumerate() {
            for &n in &el.nodes {
                node_elements[n].push(e);
            }
        }
        self.node_elements = node_elements;
        Ok(())
    }

    /// Revalidates after direct edits of the public fields.
    pub fn refresh(&mut self) -> Result<()> {
        self.validate()
    }

    /// Nodes reachable within `s` element rings of `node` (ascending ids).
    pub fn node_patch(&self, node: usize, s: usize) -> NodePatch {
        let mut members: BTreeSet<usize> = BTreeSet::from([node]);
        let mut frontier = vec![node];
        for _ in 0..s {
            let mut next = Vec::new();
            for &n in &frontier {
                for &e in &self.node_elements[n] {
                    for &m in &self.elements[e].nodes {
                        if members.insert(m) {
                            next.push(m);
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        NodePatch {
            center: node,
            members: members.into_iter().collect(),
            spacing: self.characteristic_spacing(node).unwrap_or(0.0),
        }
    }

    /// Metric patch: nodes whose every coordinate lies within `s * delta` of the center.
    /// Coincides with [`Mesh::node_patch`] on uniform structured grids of spacing `delta`.
    pub fn node_patch_metric(&self, node: usize, s: usize, delta: f64) -> NodePatch {
        let c = self.nodes[node];
        let reach = s as f64 * delta * (1.0 + 1e-9);
        let members = (0..self.nodes.len())
            .filter(|&j| (0..self.dim).all(|k| (self.nodes[j][k] - c[k]).abs() <= reach))
            .collect();
        NodePatch { center: node, members, spacing: delta }
    }

    /// Union of the node patches of the element's own nodes.
    pub fn element_patch(&self, element: usize, s: usize) -> Vec<usize> {
        let set: BTreeSet<usize> = self.elements[element]
            .nodes
            .iter()
            .flat_map(|&n| self.node_patch(n, s).members)
            .collect();
        set.into_iter().collect()
    }

    /// Edge-connected neighbors of a node (ascending).
    pub fn edge_neighbors(&self, node: usize) -> Vec<usize> {
        let mut out = BTreeSet::new();
        for &e in &self.node_elements[node] {
            let el = &self.elements[e];
            for &(a, b) in el.kind.edges() {
                if el.nodes[a] == node {
                    out.insert(el.nodes[b]);
                } else if el.nodes[b] == node {
                    out.insert(el.nodes[a]);
                }
            }
        }
        out.into_iter().collect()
    }

    /// Mean distance from a node to its edge-connected neighbors.
    pub fn characteristic_spacing(&self, node: usize) -> Result<f64> {
        let nbrs = self.edge_neighbors(node);
        if nbrs.is_empty() {
            return Err(Error::IsolatedNode(node));
        }
        let total: f64 = nbrs.iter().map(|&j| distance(&self.nodes[node], &self.nodes[j])).sum();
        Ok(total / nbrs.len() as f64)
    }

    pub fn nearest_node(&self, point: [f64; 3]) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, x) in self.nodes.iter().enumerate() {
            let d = distance(x, &point);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    /// Smallest edge length over the mesh.
    pub fn min_edge_length(&self) -> f64 {
        let mut h = f64::INFINITY;
        for el in &self.elements {
            for &(a, b) in el.kind.edges() {
                h = h.min(distance(&self.nodes[el.nodes[a]], &self.nodes[el.nodes[b]]));
            }
        }
        h
    }

    /// Total reference volume (length in 1D, area in 2D), by exact low-order quadrature.
    pub fn volume(&self) -> f64 {
        let rule = |kind| crate::quadrature::quadrature_rule(kind, 2).expect("order 2 rule");
        self.elements
            .iter()
            .enumerate()
            .map(|(e, el)| {
                let coords = self.element_coords(e);
                let q = rule(el.kind);
                q.points
                    .iter()
                    .zip(&q.weights)
                    .map(|(xi, w)| {
                        let s = fe::fe_shape_unchecked(el.kind, *xi);
                        w * fe::jacobian(self.dim, &coords, &s.d_xi).determinant()
                    })
                    .sum::<f64>()
            })
            .sum()
    }

    pub fn node_set(&self, name: &str) -> Result<&[usize]> {
        self.node_sets
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::UnknownSet { kind: "node", name: name.to_string() })
    }

    pub fn facet_set(&self, name: &str) -> Result<&[usize]> {
        self.facet_sets
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::UnknownSet { kind: "facet", name: name.to_string() })
    }

    /// Nodes lying on the given facets (ascending).
    pub fn facet_nodes(&self, facets: &[usize]) -> Vec<usize> {
        let set: BTreeSet<usize> =
            facets.iter().flat_map(|&f| self.facets[f].nodes.iter().copied()).collect();
        set.into_iter().collect()
    }

    /// Serializes to the mesh text format accepted by [`parse_mesh`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dimension {}", self.dim);
        let _ = writeln!(out, "nodes {}", self.nodes.len());
        for (i, x) in self.nodes.iter().enumerate() {
            let _ = write!(out, "{i}");
            for c in &x[..self.dim] {
                let _ = write!(out, " {c:?}");
            }
            out.push('\n');
        }
        let _ = writeln!(out, "elements {}", self.elements.len());
        for (e, el) in self.elements.iter().enumerate() {
            let _ = write!(out, "{e} {}", el.kind.name());
            for n in &el.nodes {
                let _ = write!(out, " {n}");
            }
            if let Some(tag) = self.region_tags.get(&e) {
                let _ = write!(out, " {tag}");
            }
            out.push('\n');
        }
        if !self.facets.is_empty() {
            let _ = writeln!(out, "facets {}", self.facets.len());
            for (f, facet) in self.facets.iter().enumerate() {
                let _ = writeln!(out, "{f} {} {}", facet.element, facet.local_face);
            }
        }
        for (name, set) in &self.node_sets {
            let _ = writeln!(out, "nodeset {name} {}", set.len());
            write_ids(&mut out, set);
        }
        for (name, set) in &self.facet_sets {
            let _ = writeln!(out, "facetset {name} {}", set.len());
            write_ids(&mut out, set);
        }
        out
    }
}

fn write_ids(out: &mut String, ids: &[usize]) {
    for chunk in ids.chunks(16) {
        let line: Vec<String> = chunk.iter().map(|i| i.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
}

pub fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

struct Lines<'a> {
    tokens: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let mut tokens = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("");
            for tok in content.split_whitespace() {
                tokens.push((i + 1, tok));
            }
        }
        Lines { tokens, pos: 0 }
    }

    fn line(&self) -> usize {
        self.tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map(|t| t.0)
            .unwrap_or(1)
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let line = self.line();
        let tok = self
            .tokens
            .get(self.pos)
            .copied()
            .ok_or_else(|| Error::Parse { line, msg: format!("unexpected end of file, expected {what}") })?;
        self.pos += 1;
        Ok(tok)
    }

    fn usize(&mut self, what: &str) -> Result<usize> {
        let (line, tok) = self.next(what)?;
        tok.parse()
            .map_err(|_| Error::Parse { line, msg: format!("expected {what}, found '{tok}'") })
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        let (line, tok) = self.next(what)?;
        tok.parse()
            .map_err(|_| Error::Parse { line, msg: format!("expected {what}, found '{tok}'") })
    }
}

/// Parses the mesh text format:
///
/// ```text
/// dimension 2
/// nodes <count>
/// <id> <x> <y>            # ids 0..count-1 in order
/// elements <count>
/// <id> <kind> <node ids...> [region-tag]
/// facets <count>
/// <id> <element> <local-face>
/// nodeset <name> <count>
/// <ids...>
/// facetset <name> <count>
/// <ids...>
/// ```
pub fn parse_mesh(text: &str) -> Result<Mesh> {
    let mut lx = Lines::new(text);
    let mut dim = None;
    let mut nodes = Vec::new();
    let mut elements = Vec::new();
    let mut region_tags = BTreeMap::new();
    let mut facet_specs = Vec::new();
    let mut node_sets = BTreeMap::new();
    let mut facet_sets = BTreeMap::new();

    while lx.pos < lx.tokens.len() {
        let (line, key) = lx.next("section keyword")?;
        match key {
            "dimension" => {
                let d = lx.usize("dimension")?;
                if !(1..=3).contains(&d) {
                    return Err(Error::Parse { line, msg: format!("dimension {d} not in 1..=3") });
                }
                dim = Some(d);
            }
            "nodes" => {
                let d = dim.ok_or(Error::Parse { line, msg: "'dimension' must precede 'nodes'".into() })?;
                let count = lx.usize("node count")?;
                for i in 0..count {
                    let id_line = lx.line();
                    let id = lx.usize("node id")?;
                    if id != i {
                        return Err(Error::Parse {
                            line: id_line,
                            msg: format!("node ids must be consecutive from 0; expected {i}, found {id}"),
                        });
                    }
                    let mut x = [0.0; 3];
                    for c in x.iter_mut().take(d) {
                        *c = lx.f64("coordinate")?;
                    }
                    nodes.push(x);
                }
            }
            "elements" => {
                let count = lx.usize("element count")?;
                for i in 0..count {
                    let id_line = lx.line();
                    let id = lx.usize("element id")?;
                    if id != i {
                        return Err(Error::Parse {
                            line: id_line,
                            msg: format!("element ids must be consecutive from 0; expected {i}, found {id}"),
                        });
                    }
                    let (kl, kname) = lx.next("element kind")?;
                    let kind = ElementKind::parse(kname)
                        .ok_or_else(|| Error::Parse { line: kl, msg: format!("unknown element kind '{kname}'") })?;
                    let mut conn = Vec::with_capacity(kind.node_count());
                    for _ in 0..kind.node_count() {
                        conn.push(lx.usize("element node id")?);
                    }
                    // Optional region tag: a non-numeric token on the same line.
                    if let Some(&(tl, tok)) = lx.tokens.get(lx.pos) {
                        if tl == id_line && tok.parse::<usize>().is_err() {
                            region_tags.insert(id, tok.to_string());
                            lx.pos += 1;
                        }
                    }
                    elements.push(Element { kind, nodes: conn });
                }
            }
            "facets" => {
                let count = lx.usize("facet count")?;
                for i in 0..count {
                    let id_line = lx.line();
                    let id = lx.usize("facet id")?;
                    if id != i {
                        return Err(Error::Parse {
                            line: id_line,
                            msg: format!("facet ids must be consecutive from 0; expected {i}, found {id}"),
                        });
                    }
                    let element = lx.usize("facet element")?;
                    let face = lx.usize("local face")?;
                    facet_specs.push((id_line, element, face));
                }
            }
            "nodeset" | "facetset" => {
                let (_, name) = lx.next("set name")?;
                let count = lx.usize("set size")?;
                let mut ids = Vec::with_capacity(count);
                for _ in 0..count {
                    ids.push(lx.usize("set member id")?);
                }
                let target = if key == "nodeset" { &mut node_sets } else { &mut facet_sets };
                if target.insert(name.to_string(), ids).is_some() {
                    return Err(Error::Parse { line, msg: format!("duplicate {key} '{name}'") });
                }
            }
            other => {
                return Err(Error::Parse { line, msg: format!("unknown section '{other}'") });
            }
        }
    }

    let dim = dim.ok_or(Error::Parse { line: 1, msg: "missing 'dimension'".into() })?;
    let mut mesh = Mesh::new(dim, nodes, elements)?;
    for (line, element, face) in facet_specs {
        mesh.add_facet(element, face)
            .map_err(|e| Error::Parse { line, msg: e.to_string() })?;
    }
    mesh.region_tags = region_tags;
    mesh.node_sets = node_sets;
    mesh.facet_sets = facet_sets;
    mesh.validate()?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshgen;

    const BAR5: &str = "dimension 1\nnodes 5\n0 0\n1 1\n2 2\n3 3\n4 4\n\
                        elements 4\n0 line2 0 1\n1 line2 1 2\n2 line2 2 3\n3 line2 3 4\n";

    #[test]
    fn parses_1d_bar() {
        let mesh = parse_mesh(BAR5).unwrap();
        assert_eq!(mesh.dim, 1);
        assert_eq!(mesh.node_count(), 5);
        assert_eq!(mesh.elements.len(), 4);
    }

    #[test]
    fn clockwise_quad_is_inverted() {
        let text = "dimension 2\nnodes 4\n0 0 0\n1 0 1\n2 1 1\n3 1 0\nelements 1\n0 quad4 0 1 2 3\n";
        let err = parse_mesh(text).unwrap_err();
        assert!(matches!(err, Error::InvertedElement { .. }), "{err}");
        assert!(err.to_string().contains("inverted element"));
    }

    #[test]
    fn dangling_node_reference() {
        let mut text = String::from("dimension 1\nnodes 10\n");
        for i in 0..10 {
            text.push_str(&format!("{i} {i}\n"));
        }
        text.push_str("elements 1\n0 line2 8 99\n");
        let err = parse_mesh(&text).unwrap_err();
        assert!(matches!(err, Error::DanglingNode { node: 99, .. }));
        assert!(err.to_string().contains("dangling node reference"));
    }

    #[test]
    fn malformed_syntax_reports_line() {
        let text = "dimension 1\nnodes 2\n0 0\n1 abc\n";
        match parse_mesh(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tags_sets_and_facets_round_trip() {
        let text = "dimension 2\nnodes 4\n0 0 0\n1 1 0\n2 1 1\n3 0 1\n\
                    elements 1\n0 quad4 0 1 2 3 notch\nfacets 1\n0 0 2\n\
                    nodeset bottom 2\n0 1\nfacetset top 1\n0\n";
        let mesh = parse_mesh(text).unwrap();
        assert_eq!(mesh.region_tags[&0], "notch");
        assert_eq!(mesh.facets[0].nodes, vec![2, 3]);
        assert_eq!(mesh.node_set("bottom").unwrap(), &[0, 1]);
        let again = parse_mesh(&mesh.to_text()).unwrap();
        assert_eq!(again.facets, mesh.facets);
        assert_eq!(again.region_tags, mesh.region_tags);
        assert_eq!(again.node_sets, mesh.node_sets);
        assert_eq!(again.facet_sets, mesh.facet_sets);
    }

    #[test]
    fn one_dimensional_patches() {
        let mesh = parse_mesh(BAR5).unwrap();
        assert_eq!(mesh.node_patch(2, 1).members, vec![1, 2, 3]);
        assert_eq!(mesh.node_patch(0, 1).members, vec![0, 1]);
        assert_eq!(mesh.element_patch(1, 1), vec![0, 1, 2, 3]);
        assert_eq!(mesh.element_patch(1, 2), vec![0, 1, 2, 3, 4]);
        assert_eq!(mesh.element_patch(0, 10), (0..5).collect::<Vec<_>>());
    }

    #[test]
    fn spacing_examples() {
        let mesh = meshgen::bar(0.0, 2.0, 4).unwrap();
        assert!((mesh.characteristic_spacing(2).unwrap() - 0.5).abs() < 1e-15);
        let uneven = Mesh::new(
            1,
            vec![[-1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [2.0, 0.0, 0.0]],
            vec![
                Element { kind: ElementKind::Line2, nodes: vec![0, 1] },
                Element { kind: ElementKind::Line2, nodes: vec![1, 2] },
            ],
        )
        .unwrap();
        assert!((uneven.characteristic_spacing(1).unwrap() - 1.5).abs() < 1e-15);
        let grid = meshgen::quad_grid(3, 3, 3.0, 3.0).unwrap();
        assert!((grid.characteristic_spacing(5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn isolated_node_has_no_spacing() {
        let mesh = Mesh::new(
            1,
            vec![[0.0; 3], [1.0, 0.0, 0.0], [5.0, 0.0, 0.0]],
            vec![Element { kind: ElementKind::Line2, nodes: vec![0, 1] }],
        )
        .unwrap();
        assert!(matches!(mesh.characteristic_spacing(2), Err(Error::IsolatedNode(2))));
    }
}
