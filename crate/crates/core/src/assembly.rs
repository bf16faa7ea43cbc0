//! Total-Lagrangian assembly: shape tables, deformation gradient, internal and external forces,
//! mass and tangent stiffness.
//!
//! Global vectors are node-major: dof `dim * node + i`. Per-element work runs in parallel and is
//! reduced in element order, so results are bit-reproducible.

use nalgebra::Matrix3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interp::{chidenn_shape, BasisTable, ShapeSample};
use crate::material::NeoHookean;
use crate::mesh::{ElementKind, Mesh};
use crate::quadrature::{default_order, quadrature_rule, triangle_rule, PLAIN_FE_ORDER};
use crate::sparse::Csr;

/// Shape sample with its integration weight (parent weight times Jacobian determinant).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadPoint {
    pub sample: ShapeSample,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementTable {
    pub element: usize,
    /// Element patch, ascending.
    pub nodes: Vec<usize>,
    pub points: Vec<QuadPoint>,
    /// Samples at the element's own nodes, in element node order (used for nodal stress recovery).
    pub corners: Vec<ShapeSample>,
    pub order: usize,
    pub enriched: bool,
}

/// Precomputed shape tables of every element.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeTables {
    pub dim: usize,
    pub node_count: usize,
    pub elements: Vec<ElementTable>,
}

/// Quadrature degree used when none is given.
pub fn default_rule_order(bases: Option<&BasisTable>) -> usize {
    bases.map_or(PLAIN_FE_ORDER, |b| default_order(b.config.p))
}

pub fn element_table(mesh: &Mesh, element: usize, bases: Option<&BasisTable>, order: usize) -> Result<ElementTable> {
    let kind = mesh.elements[element].kind;
    let rule = quadrature_rule(kind, order)?;
    let mut points = Vec::with_capacity(rule.len());
    for (xi, w) in rule.points.iter().zip(&rule.weights) {
        let sample = chidenn_shape(mesh, element, *xi, bases)?;
        let weight = w * sample.jacobian_det;
        points.push(QuadPoint { sample, weight });
    }
    let corners = kind
        .parent_nodes()
        .iter()
        .map(|xi| chidenn_shape(mesh, element, *xi, bases))
        .collect::<Result<Vec<_>>>()?;
    let nodes = points.first().map(|p| p.sample.nodes.clone()).unwrap_or_default();
    Ok(ElementTable { element, nodes, points, corners, order, enriched: bases.is_some() })
}

impl ShapeTables {
    /// Builds tables with a per-element choice of basis table and quadrature degree.
    pub fn build<'a>(mesh: &Mesh, plan: impl Fn(usize) -> (Option<&'a BasisTable>, usize) + Sync) -> Result<Self> {
        let elements = (0..mesh.elements.len())
            .into_par_iter()
            .map(|e| {
                let (bases, order) = plan(e);
                element_table(mesh, e, bases, order)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ShapeTables { dim: mesh.dim, node_count: mesh.node_count(), elements })
    }

    /// Same interpolation on every element; `order` overrides the default quadrature degree.
    pub fn uniform(mesh: &Mesh, bases: Option<&BasisTable>, order: Option<usize>) -> Result<Self> {
        let order = order.unwrap_or_else(|| default_rule_order(bases));
        Self::build(mesh, |_| (bases, order))
    }

    pub fn ndof(&self) -> usize {
        self.dim * self.node_count
    }

    pub fn point_count(&self) -> usize {
        self.elements.iter().map(|e| e.points.len()).sum()
    }
}

/// `F_ij = δ_ij + Σ_K ∂Ñ_K/∂X_j d_iK`, padded to 3×3 with unit stretch out of plane.
pub fn deformation_gradient(sample: &ShapeSample, dim: usize, d: &[f64]) -> Matrix3<f64> {
    let mut f = Matrix3::identity();
    for (k, &node) in sample.nodes.iter().enumerate() {
        let g = &sample.grads[k];
        for i in 0..dim {
            let u = d[dim * node + i];
            for j in 0..dim {
                f[(i, j)] += u * g[j];
            }
        }
    }
    f
}

fn material_error(err: Error, element: usize, qp: usize) -> Error {
    match err {
        Error::NonPositiveJacobian { j } => Error::MaterialFailure { element, qp, j },
        other => other,
    }
}

fn scatter(tables: &ShapeTables, locals: Vec<Vec<f64>>) -> Vec<f64> {
    let dim = tables.dim;
    let mut out = vec![0.0; tables.ndof()];
    for (table, local) in tables.elements.iter().zip(locals) {
        for (k, &node) in table.nodes.iter().enumerate() {
            for i in 0..dim {
                out[dim * node + i] += local[dim * k + i];
            }
        }
    }
    out
}

fn element_internal_force(table: &ElementTable, dim: usize, mat: &NeoHookean, d: &[f64]) -> Result<Vec<f64>> {
    let mut local = vec![0.0; dim * table.nodes.len()];
    for (qp, point) in table.points.iter().enumerate() {
        let f = deformation_gradient(&point.sample, dim, d);
        let p = mat.pk1_stress(&f).map_err(|e| material_error(e, table.element, qp))?;
        for (k, g) in point.sample.grads.iter().enumerate() {
            for i in 0..dim {
                let mut s = 0.0;
                for j in 0..dim {
                    s += p[(i, j)] * g[j];
                }
                local[dim * k + i] += point.weight * s;
            }
        }
    }
    Ok(local)
}

/// Internal force `f_iK = ∫ P_ij ∂Ñ_K/∂X_j dΩ₀`.
pub fn internal_force(tables: &ShapeTables, mat: &NeoHookean, d: &[f64]) -> Result<Vec<f64>> {
    let locals = tables
        .elements
        .par_iter()
        .map(|t| element_internal_force(t, tables.dim, mat, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(scatter(tables, locals))
}

/// Internal force assembled element by element in the given order, without parallelism.
pub fn internal_force_ordered(tables: &ShapeTables, mat: &NeoHookean, d: &[f64], order: &[usize]) -> Result<Vec<f64>> {
    let dim = tables.dim;
    let mut out = vec![0.0; tables.ndof()];
    for &e in order {
        let table = &tables.elements[e];
        let local = element_internal_force(table, dim, mat, d)?;
        for (k, &node) in table.nodes.iter().enumerate() {
            for i in 0..dim {
                out[dim * node + i] += local[dim * k + i];
            }
        }
    }
    Ok(out)
}

/// Total strain energy `∫ w(F) dΩ₀`.
pub fn internal_energy(tables: &ShapeTables, mat: &NeoHookean, d: &[f64]) -> Result<f64> {
    let parts = tables
        .elements
        .par_iter()
        .map(|t| {
            let mut e = 0.0;
            for (qp, point) in t.points.iter().enumerate() {
                let f = deformation_gradient(&point.sample, tables.dim, d);
                e += point.weight * mat.strain_energy(&f).map_err(|err| material_error(err, t.element, qp))?;
            }
            Ok(e)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(parts.iter().sum())
}

/// Tangent stiffness `∂f_int/∂d` as a dof-level sparse matrix.
pub fn tangent_stiffness(tables: &ShapeTables, mat: &NeoHookean, d: &[f64]) -> Result<Csr> {
    let dim = tables.dim;
    let blocks = tables
        .elements
        .par_iter()
        .map(|t| {
            let nd = dim * t.nodes.len();
            let mut k = vec![0.0; nd * nd];
            for (qp, point) in t.points.iter().enumerate() {
                let f = deformation_gradient(&point.sample, dim, d);
                let a = mat.material_tangent(&f).map_err(|e| material_error(e, t.element, qp))?;
                let g = &point.sample.grads;
                // c[(L, k)][(i, j)] = Σ_l A_ijkl g_Ll
                let nn = t.nodes.len();
                let mut c = vec![0.0; nn * dim * dim * dim];
                for l_node in 0..nn {
                    for kk in 0..dim {
                        for i in 0..dim {
                            for j in 0..dim {
                                let mut s = 0.0;
                                for l in 0..dim {
                                    s += a[(3 * i + j, 3 * kk + l)] * g[l_node][l];
                                }
                                c[((l_node * dim + kk) * dim + i) * dim + j] = s;
                            }
                        }
                    }
                }
                for a_node in 0..nn {
                    for i in 0..dim {
                        let row = dim * a_node + i;
                        for col in 0..nd {
                            let mut s = 0.0;
                            for j in 0..dim {
                                s += g[a_node][j] * c[(col * dim + i) * dim + j];
                            }
                            k[row * nd + col] += point.weight * s;
                        }
                    }
                }
            }
            Ok(k)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut triplets = Vec::new();
    for (t, k) in tables.elements.iter().zip(blocks) {
        let nd = dim * t.nodes.len();
        let dof = |local: usize| dim * t.nodes[local / dim] + local % dim;
        for r in 0..nd {
            for c in 0..nd {
                triplets.push((dof(r), dof(c), k[r * nd + c]));
            }
        }
    }
    Ok(Csr::from_triplets(tables.ndof(), triplets))
}

/// Body force `∫ Ñ_K ρ₀ b_i dΩ₀`.
pub fn body_force(tables: &ShapeTables, rho0: f64, b: [f64; 3]) -> Vec<f64> {
    let dim = tables.dim;
    let locals = tables
        .elements
        .par_iter()
        .map(|t| {
            let mut local = vec![0.0; dim * t.nodes.len()];
            for point in &t.points {
                for (k, v) in point.sample.values.iter().enumerate() {
                    for i in 0..dim {
                        local[dim * k + i] += point.weight * rho0 * v * b[i];
                    }
                }
            }
            local
        })
        .collect();
    scatter(tables, locals)
}

/// Shape samples on a boundary facet, weights including the surface Jacobian.
pub fn facet_points(mesh: &Mesh, facet: usize, bases: Option<&BasisTable>, order: usize) -> Result<Vec<QuadPoint>> {
    let fc = &mesh.facets[facet];
    let el = &mesh.elements[fc.element];
    let face = el.kind.faces()[fc.local_face];
    let parent = el.kind.parent_nodes();
    let xs: Vec<[f64; 3]> = face.iter().map(|&a| mesh.nodes[el.nodes[a]]).collect();
    let mut out = Vec::new();
    match el.kind {
        ElementKind::Line2 => {
            out.push(QuadPoint { sample: chidenn_shape(mesh, fc.element, parent[face[0]], bases)?, weight: 1.0 });
        }
        ElementKind::Quad4 => {
            let rule = quadrature_rule(ElementKind::Line2, order)?;
            let len = crate::mesh::distance(&xs[0], &xs[1]);
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                let t = p[0];
                let (a, b) = (parent[face[0]], parent[face[1]]);
                let xi = [0.5 * (1.0 - t) * a[0] + 0.5 * (1.0 + t) * b[0], 0.5 * (1.0 - t) * a[1] + 0.5 * (1.0 + t) * b[1], 0.0];
                out.push(QuadPoint { sample: chidenn_shape(mesh, fc.element, xi, bases)?, weight: w * 0.5 * len });
            }
        }
        ElementKind::Tet4 => {
            let rule = triangle_rule(order);
            let e1: Vec<f64> = (0..3).map(|k| xs[1][k] - xs[0][k]).collect();
            let e2: Vec<f64> = (0..3).map(|k| xs[2][k] - xs[0][k]).collect();
            let cross = [e1[1] * e2[2] - e1[2] * e2[1], e1[2] * e2[0] - e1[0] * e2[2], e1[0] * e2[1] - e1[1] * e2[0]];
            let scale = (cross[0].powi(2) + cross[1].powi(2) + cross[2].powi(2)).sqrt();
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                let (u, v) = (p[0], p[1]);
                let (a, b, c) = (parent[face[0]], parent[face[1]], parent[face[2]]);
                let xi: [f64; 3] = std::array::from_fn(|k| (1.0 - u - v) * a[k] + u * b[k] + v * c[k]);
                out.push(QuadPoint { sample: chidenn_shape(mesh, fc.element, xi, bases)?, weight: w * scale });
            }
        }
    }
    Ok(out)
}

/// Traction force `∫ Ñ_K t̄_i dΓ₀` over facet samples.
pub fn traction_force(ndof: usize, dim: usize, points: &[QuadPoint], traction: [f64; 3]) -> Vec<f64> {
    let mut out = vec![0.0; ndof];
    for point in points {
        for (k, &node) in point.sample.nodes.iter().enumerate() {
            for i in 0..dim {
                out[dim * node + i] += point.weight * point.sample.values[k] * traction[i];
            }
        }
    }
    out
}

/// Node-level consistent mass `∫ ρ₀ Ñ_K Ñ_L dΩ₀`; the dof-level matrix is this times the identity per direction.
pub fn consistent_mass(tables: &ShapeTables, rho0: f64) -> Csr {
    let blocks: Vec<Vec<f64>> = tables
        .elements
        .par_iter()
        .map(|t| {
            let n = t.nodes.len();
            let mut m = vec![0.0; n * n];
            for point in &t.points {
                let v = &point.sample.values;
                for a in 0..n {
                    for b in 0..n {
                        m[a * n + b] += rho0 * point.weight * v[a] * v[b];
                    }
                }
            }
            m
        })
        .collect();
    let mut triplets = Vec::new();
    for (t, m) in tables.elements.iter().zip(blocks) {
        let n = t.nodes.len();
        for a in 0..n {
            for b in 0..n {
                triplets.push((t.nodes[a], t.nodes[b], m[a * n + b]));
            }
        }
    }
    Csr::from_triplets(tables.node_count, triplets)
}

/// Row-sum lumped node masses; errors on a non-positive row sum.
pub fn lumped_mass(tables: &ShapeTables, rho0: f64) -> Result<Vec<f64>> {
    let sums = consistent_mass(tables, rho0).row_sums();
    for (node, &m) in sums.iter().enumerate() {
        if !(m > 0.0) {
            return Err(Error::NegativeLumpedMass { dof: tables.dim * node, value: m });
        }
    }
    Ok(sums)
}

/// Nodal von Mises stress: average over adjacent elements of the value at the node's parent point.
pub fn nodal_von_mises(mesh: &Mesh, tables: &ShapeTables, mat: &NeoHookean, d: &[f64]) -> Result<Vec<f64>> {
    let mut sum = vec![0.0; mesh.node_count()];
    let mut count = vec![0usize; mesh.node_count()];
    for t in &tables.elements {
        for (a, sample) in t.corners.iter().enumerate() {
            let f = deformation_gradient(sample, tables.dim, d);
            let vm = mat.von_mises(&f).map_err(|e| material_error(e, t.element, a))?;
            let node = mesh.elements[t.element].nodes[a];
            sum[node] += vm;
            count[node] += 1;
        }
    }
    Ok(sum.iter().zip(&count).map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 }).collect())
}

/// Von Mises at one node (average over its adjacent elements).
pub fn von_mises_at_node(mesh: &Mesh, tables: &ShapeTables, mat: &NeoHookean, d: &[f64], node: usize) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0;
    for &e in mesh.elements_of_node(node) {
        let t = &tables.elements[e];
        let a = mesh.elements[e].nodes.iter().position(|&n| n == node).expect("adjacent element");
        let f = deformation_gradient(&t.corners[a], tables.dim, d);
        sum += mat.von_mises(&f).map_err(|err| material_error(err, e, a))?;
        count += 1;
    }
    Ok(if count > 0 { sum / count as f64 } else { 0.0 })
}

/// Per-element mean von Mises and strain energy density over quadrature points.
pub fn element_fields(tables: &ShapeTables, mat: &NeoHookean, d: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut vm = Vec::with_capacity(tables.elements.len());
    let mut w = Vec::with_capacity(tables.elements.len());
    for t in &tables.elements {
        let (mut sv, mut sw, mut vol) = (0.0, 0.0, 0.0);
        for (qp, point) in t.points.iter().enumerate() {
            let f = deformation_gradient(&point.sample, tables.dim, d);
            sv += point.weight * mat.von_mises(&f).map_err(|e| material_error(e, t.element, qp))?;
            sw += point.weight * mat.strain_energy(&f).map_err(|e| material_error(e, t.element, qp))?;
            vol += point.weight;
        }
        vm.push(sv / vol);
        w.push(sw / vol);
    }
    Ok((vm, w))
}
