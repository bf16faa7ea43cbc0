//! Structured mesh generators used by the bundled scenarios, the verification
//! suite and the tests.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::interp::fe;
use crate::mesh::{Element, ElementKind, Mesh};

/// Uniform line2 bar on `[x0, x1]` with `n` elements. Node sets `left`, `right`;
/// facet sets `left`, `right`.
pub fn bar(x0: f64, x1: f64, n: usize) -> Result<Mesh> {
    let nodes = (0..=n).map(|i| [x0 + (x1 - x0) * i as f64 / n as f64, 0.0, 0.0]).collect();
    let elements = (0..n).map(|e| Element { kind: ElementKind::Line2, nodes: vec![e, e + 1] }).collect();
    let mut mesh = Mesh::new(1, nodes, elements)?;
    let left = mesh.add_facet(0, 0)?;
    let right = mesh.add_facet(n - 1, 1)?;
    mesh.facet_sets.insert("left".into(), vec![left]);
    mesh.facet_sets.insert("right".into(), vec![right]);
    mesh.node_sets.insert("left".into(), vec![0]);
    mesh.node_sets.insert("right".into(), vec![n]);
    mesh.refresh()?;
    Ok(mesh)
}

/// Rectangle `[0, lx] x [0, ly]` with `nx * ny` quad4 elements. Node id = `j * (nx + 1) + i`.
/// Facet and node sets `bottom`, `right`, `top`, `left`.
pub fn quad_grid(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Mesh> {
    mapped_grid(nx, ny, |u, v| [u * lx, v * ly])
}

/// Structured quad mesh of the image of the unit square under `map`.
pub fn mapped_grid(nx: usize, ny: usize, map: impl Fn(f64, f64) -> [f64; 2]) -> Result<Mesh> {
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let p = map(i as f64 / nx as f64, j as f64 / ny as f64);
            nodes.push([p[0], p[1], 0.0]);
        }
    }
    let mut elements = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            elements.push(Element {
                kind: ElementKind::Quad4,
                nodes: vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)],
            });
        }
    }
    let mut mesh = Mesh::new(2, nodes, elements)?;
    let eid = |i: usize, j: usize| j * nx + i;
    let mut sets: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for i in 0..nx {
        let f = mesh.add_facet(eid(i, 0), 0)?;
        sets.entry("bottom".into()).or_default().push(f);
    }
    for j in 0..ny {
        let f = mesh.add_facet(eid(nx - 1, j), 1)?;
        sets.entry("right".into()).or_default().push(f);
    }
    for i in 0..nx {
        let f = mesh.add_facet(eid(i, ny - 1), 2)?;
        sets.entry("top".into()).or_default().push(f);
    }
    for j in 0..ny {
        let f = mesh.add_facet(eid(0, j), 3)?;
        sets.entry("left".into()).or_default().push(f);
    }
    for (name, facets) in &sets {
        let nodes = mesh.facet_nodes(facets);
        mesh.node_sets.insert(name.clone(), nodes);
    }
    mesh.facet_sets = sets;
    mesh.refresh()?;
    Ok(mesh)
}

/// Box `[0,lx] x [0,ly] x [0,lz]` with each of the `nx*ny*nz` hexahedral cells split into six tet4.
/// Facet sets `xmin`, `xmax`, `ymin`, `ymax`, `zmin`, `zmax` with matching node sets.
pub fn tet_box(nx: usize, ny: usize, nz: usize, lx: f64, ly: f64, lz: f64) -> Result<Mesh> {
    let id = |i: usize, j: usize, k: usize| (k * (ny + 1) + j) * (nx + 1) + i;
    let mut nodes = Vec::new();
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push([
                    lx * i as f64 / nx as f64,
                    ly * j as f64 / ny as f64,
                    lz * k as f64 / nz as f64,
                ]);
            }
        }
    }
    // Kuhn subdivision: the six monotone lattice paths from corner 000 to 111.
    const PATHS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut elements = Vec::new();
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                for path in PATHS {
                    let mut c = [i, j, k];
                    let mut tet = vec![id(c[0], c[1], c[2])];
                    for axis in path {
                        c[axis] += 1;
                        tet.push(id(c[0], c[1], c[2]));
                    }
                    elements.push(tet);
                }
            }
        }
    }
    let elements = elements
        .into_iter()
        .map(|mut tet| {
            let x: Vec<[f64; 3]> = tet.iter().map(|&n| nodes[n]).collect();
            let shape = fe::fe_shape_unchecked(ElementKind::Tet4, [0.25; 3]);
            if fe::jacobian(3, &x, &shape.d_xi).determinant() < 0.0 {
                tet.swap(1, 2);
            }
            Element { kind: ElementKind::Tet4, nodes: tet }
        })
        .collect();
    let mut mesh = Mesh::new(3, nodes, elements)?;
    let bounds = [(0usize, 0.0, "xmin"), (0, lx, "xmax"), (1, 0.0, "ymin"), (1, ly, "ymax"), (2, 0.0, "zmin"), (2, lz, "zmax")];
    let mut sets: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for e in 0..mesh.elements.len() {
        for (f, face) in ElementKind::Tet4.faces().iter().enumerate() {
            let pts: Vec<[f64; 3]> = face.iter().map(|&l| mesh.nodes[mesh.elements[e].nodes[l]]).collect();
            for &(axis, value, name) in &bounds {
                if pts.iter().all(|p| (p[axis] - value).abs() < 1e-12) {
                    let id = mesh.add_facet(e, f)?;
                    sets.entry(name.to_string()).or_default().push(id);
                }
            }
        }
    }
    for (name, facets) in &sets {
        let nodes = mesh.facet_nodes(facets);
        mesh.node_sets.insert(name.clone(), nodes);
    }
    mesh.facet_sets = sets;
    mesh.refresh()?;
    Ok(mesh)
}

/// Nodes that lie on any boundary facet.
pub fn boundary_nodes(mesh: &Mesh) -> BTreeSet<usize> {
    mesh.facets.iter().flat_map(|f| f.nodes.iter().copied()).collect()
}

/// Randomly moves every node not on a facet by up to `fraction` of its characteristic
/// spacing in each direction. Deterministic for a given seed.
pub fn distort(mesh: &Mesh, fraction: f64, seed: u64) -> Result<Mesh> {
    let fixed = boundary_nodes(mesh);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = mesh.clone();
    for n in 0..mesh.node_count() {
        let h = mesh.characteristic_spacing(n)?;
        let offsets: Vec<f64> = (0..mesh.dim).map(|_| rng.gen_range(-1.0..1.0) * fraction * h).collect();
        if fixed.contains(&n) {
            continue;
        }
        for (k, o) in offsets.into_iter().enumerate() {
            out.nodes[n][k] += o;
        }
    }
    out.refresh()?;
    Ok(out)
}

/// Geometry of the notched plate: a `width x height` rectangle with a semicircular notch of
/// radius `radius` cut into the left edge at mid-height. A third of the element rows follow the arc
/// in equal-angle segments, so refining the rows also refines the arc.
#[derive(Debug, Clone, Copy)]
pub struct NotchedPlate {
    pub width: f64,
    pub height: f64,
    pub radius: f64,
    pub nx: usize,
    pub ny: usize,
    /// Elements whose centroid lies within this distance of the notch tip get the `notch` tag.
    pub region_radius: f64,
}

impl Default for NotchedPlate {
    fn default() -> Self {
        NotchedPlate { width: 0.3, height: 1.0, radius: 0.1, nx: 15, ny: 30, region_radius: 0.2 }
    }
}

impl NotchedPlate {
    pub fn notch_tip(&self) -> [f64; 3] {
        [self.radius, 0.5 * self.height, 0.0]
    }

    /// Builds the mesh. Facet/node sets `bottom`, `top`, `left`, `right`; node set `notch_tip`;
    /// region tags `notch` and `bulk`.
    pub fn build(&self) -> Result<Mesh> {
        let (w, h, r) = (self.width, self.height, self.radius);
        if r <= 0.0 || r >= 0.5 * h || r >= w {
            return Err(Error::Config("notch radius must fit inside the plate".into()));
        }
        if self.ny < 6 || self.ny % 6 != 0 {
            return Err(Error::Config("notched plate needs a positive multiple of 6 element rows".into()));
        }
        let yc = 0.5 * h;
        // left edge: straight below the notch, an arc of `na` equal-angle segments, straight above
        let na = self.ny / 3;
        let nb = (self.ny - na) / 2;
        let ny = self.ny as f64;
        let (na_f, nb_f) = (na as f64, nb as f64);
        let mut mesh = mapped_grid(self.nx, self.ny, |u, v| {
            let j = v * ny;
            let left = if j <= nb_f {
                [0.0, (yc - r) * j / nb_f]
            } else if j <= nb_f + na_f {
                let theta = -0.5 * std::f64::consts::PI + std::f64::consts::PI * (j - nb_f) / na_f;
                [r * theta.cos(), yc + r * theta.sin()]
            } else {
                [0.0, yc + r + (h - yc - r) * (j - nb_f - na_f) / nb_f]
            };
            let right = [w, v * h];
            [left[0] + (right[0] - left[0]) * u, left[1] + (right[1] - left[1]) * u]
        })?;
        let tip = mesh.nearest_node(self.notch_tip());
        mesh.node_sets.insert("notch_tip".into(), vec![tip]);
        let tip_x = mesh.nodes[tip];
        for e in 0..mesh.elements.len() {
            let c = centroid(&mesh, e);
            let d = ((c[0] - tip_x[0]).powi(2) + (c[1] - tip_x[1]).powi(2)).sqrt();
            let tag = if d < self.region_radius { "notch" } else { "bulk" };
            mesh.region_tags.insert(e, tag.to_string());
        }
        mesh.refresh()?;
        Ok(mesh)
    }
}

pub fn centroid(mesh: &Mesh, element: usize) -> [f64; 3] {
    let kind = mesh.elements[element].kind;
    let shape = fe::fe_shape_unchecked(kind, kind.parent_center());
    fe::map_point(&shape.values, &mesh.element_coords(element))
}

/// Splits every quad4 into `k x k` sub-quads through its bilinear map, so the refined mesh has
/// exactly the same (polygonal) geometry. Original nodes keep their ids; facets, facet sets and
/// region tags are inherited; node sets named like a facet set are rebuilt from it, the others
/// are kept as is.
pub fn refine_quads(mesh: &Mesh, k: usize) -> Result<Mesh> {
    if mesh.elements.iter().any(|e| e.kind != ElementKind::Quad4) {
        return Err(Error::InvalidMesh("refine_quads requires an all-quad4 mesh".into()));
    }
    let mut nodes = mesh.nodes.clone();
    let mut edge_nodes: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let mut elements = Vec::new();
    let mut region_tags = BTreeMap::new();
    let mut children: Vec<Vec<usize>> = Vec::new();

    for (e, el) in mesh.elements.iter().enumerate() {
        let coords = mesh.element_coords(e);
        let point = |a: usize, b: usize| {
            let xi = [-1.0 + 2.0 * a as f64 / k as f64, -1.0 + 2.0 * b as f64 / k as f64, 0.0];
            fe::map_point(&fe::fe_shape_unchecked(ElementKind::Quad4, xi).values, &coords)
        };
        // local lattice (a, b) in 0..=k; ids resolved corner/edge/interior
        let mut lattice = vec![usize::MAX; (k + 1) * (k + 1)];
        let at = |a: usize, b: usize| b * (k + 1) + a;
        lattice[at(0, 0)] = el.nodes[0];
        lattice[at(k, 0)] = el.nodes[1];
        lattice[at(k, k)] = el.nodes[2];
        lattice[at(0, k)] = el.nodes[3];
        // edges in local order with their lattice walk
        let walks: [(usize, usize, Box<dyn Fn(usize) -> (usize, usize)>); 4] = [
            (0, 1, Box::new(|t| (t, 0))),
            (1, 2, Box::new(move |t| (k, t))),
            (3, 2, Box::new(move |t| (t, k))),
            (0, 3, Box::new(|t| (0, t))),
        ];
        for (la, lb, walk) in walks.iter() {
            let (ga, gb) = (el.nodes[*la], el.nodes[*lb]);
            let key = (ga.min(gb), ga.max(gb));
            let ids = edge_nodes.entry(key).or_insert_with(|| {
                // points ordered from key.0 to key.1
                (1..k)
                    .map(|t| {
                        let tt = if ga == key.0 { t } else { k - t };
                        let (a, b) = walk(tt);
                        nodes.push(point(a, b));
                        nodes.len() - 1
                    })
                    .collect()
            });
            for t in 1..k {
                let idx = if ga == key.0 { t - 1 } else { k - t - 1 };
                let (a, b) = walk(t);
                lattice[at(a, b)] = ids[idx];
            }
        }
        for b in 1..k {
            for a in 1..k {
                nodes.push(point(a, b));
                lattice[at(a, b)] = nodes.len() - 1;
            }
        }
        let mut kids = Vec::with_capacity(k * k);
        for b in 0..k {
            for a in 0..k {
                let conn = vec![lattice[at(a, b)], lattice[at(a + 1, b)], lattice[at(a + 1, b + 1)], lattice[at(a, b + 1)]];
                if let Some(tag) = mesh.region_tags.get(&e) {
                    region_tags.insert(elements.len(), tag.clone());
                }
                kids.push(elements.len());
                elements.push(Element { kind: ElementKind::Quad4, nodes: conn });
            }
        }
        children.push(kids);
    }

    let mut out = Mesh::new(2, nodes, elements)?;
    out.region_tags = region_tags;
    let mut facet_map: Vec<Vec<usize>> = Vec::with_capacity(mesh.facets.len());
    for facet in &mesh.facets {
        let kids = &children[facet.element];
        let sub: Vec<(usize, usize)> = (0..k)
            .map(|t| match facet.local_face {
                0 => (t, 0),
                1 => (k - 1, t),
                2 => (t, k - 1),
                _ => (0, t),
            })
            .collect();
        let mut ids = Vec::with_capacity(k);
        for (a, b) in sub {
            ids.push(out.add_facet(kids[b * k + a], facet.local_face)?);
        }
        facet_map.push(ids);
    }
    for (name, set) in &mesh.facet_sets {
        let refined: Vec<usize> = set.iter().flat_map(|&f| facet_map[f].iter().copied()).collect();
        out.facet_sets.insert(name.clone(), refined);
    }
    for (name, set) in &mesh.node_sets {
        let nodes = match out.facet_sets.get(name) {
            Some(facets) => out.facet_nodes(facets),
            None => set.clone(),
        };
        out.node_sets.insert(name.clone(), nodes);
    }
    out.refresh()?;
    Ok(out)
}
