//! Convolution-enriched element shape functions and their material derivatives.

use rayon::prelude::*;

use super::fe::{fe_shape, jacobian, map_point, physical_gradients};
use super::lagrange::lagrange_conv_patch;
use super::rbf::{basis_size, rbf_assemble_patch, rbf_conv_patch, PatchBasis};
use super::{ConvolutionConfig, Kernel};
use crate::error::{Error, Result};
use crate::mesh::{distance, Mesh, NodePatch};

/// Interpolation stencil of one node: the patch nodes and how weights over them are evaluated.
#[derive(Debug, Clone)]
pub enum Stencil {
    /// Plain finite element: the node itself with unit weight.
    Identity(usize),
    Lagrange { center: usize, members: Vec<usize>, coords: Vec<f64> },
    Rbf(PatchBasis),
}

impl Stencil {
    pub fn members(&self) -> &[usize] {
        match self {
            Stencil::Identity(n) => std::slice::from_ref(n),
            Stencil::Lagrange { members, .. } => members,
            Stencil::Rbf(b) => &b.patch.members,
        }
    }

    /// Weights over [`Stencil::members`] and their material derivatives at `x`.
    pub fn evaluate(&self, x: [f64; 3]) -> Result<(Vec<f64>, Vec<[f64; 3]>)> {
        match self {
            Stencil::Identity(_) => Ok((vec![1.0], vec![[0.0; 3]])),
            Stencil::Lagrange { coords, .. } => {
                let (w, dw) = lagrange_conv_patch(coords, x[0])?;
                Ok((w, dw.into_iter().map(|d| [d, 0.0, 0.0]).collect()))
            }
            Stencil::Rbf(b) => Ok(rbf_conv_patch(b, x)),
        }
    }
}

/// Builds the stencil of `node`.
///
/// Boundary patches that cannot support the polynomial basis are grown ring by ring until they can.
/// Lagrange stencils keep the `p + 1` patch nodes nearest the center (ties to the lower id).
pub fn build_stencil(mesh: &Mesh, node: usize, config: &ConvolutionConfig) -> Result<Stencil> {
    let mut s = config.s;
    let mut previous = 0;
    loop {
        let patch = mesh.node_patch(node, s);
        let saturated = patch.members.len() == previous;
        previous = patch.members.len();
        match config.kernel {
            Kernel::Lagrange1d => {
                let need = config.p + 1;
                if patch.members.len() >= need {
                    return Ok(lagrange_stencil(mesh, &patch, need));
                }
                if saturated {
                    return Err(Error::PatchTooSmall { center: node, n: patch.members.len(), m: need });
                }
            }
            Kernel::Rbf => {
                let m = basis_size(mesh.dim, config.p);
                let enough = patch.members.len() >= m;
                if enough || saturated {
                    match rbf_assemble_patch(mesh, patch, config) {
                        Ok(b) => return Ok(Stencil::Rbf(b)),
                        Err(e) if saturated => return Err(e),
                        Err(_) => {}
                    }
                }
            }
        }
        s += 1;
    }
}

fn lagrange_stencil(mesh: &Mesh, patch: &NodePatch, need: usize) -> Stencil {
    let c = mesh.nodes[patch.center];
    let mut ranked: Vec<(f64, usize)> = patch.members.iter().map(|&k| (distance(&mesh.nodes[k], &c), k)).collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut members: Vec<usize> = ranked[..need].iter().map(|&(_, k)| k).collect();
    members.sort_unstable();
    let coords = members.iter().map(|&k| mesh.nodes[k][0]).collect();
    Stencil::Lagrange { center: patch.center, members, coords }
}

/// Stencils of every node under one convolution configuration.
#[derive(Debug, Clone)]
pub struct BasisTable {
    pub config: ConvolutionConfig,
    stencils: Vec<Option<Stencil>>,
}

impl BasisTable {
    /// Builds stencils for the listed nodes in parallel.
    pub fn build(mesh: &Mesh, config: &ConvolutionConfig, nodes: &[usize]) -> Result<Self> {
        config.validate(mesh.dim)?;
        let built: Vec<(usize, Stencil)> = nodes
            .par_iter()
            .map(|&n| build_stencil(mesh, n, config).map(|s| (n, s)))
            .collect::<Result<_>>()?;
        let mut stencils = vec![None; mesh.node_count()];
        for (n, s) in built {
            stencils[n] = Some(s);
        }
        Ok(BasisTable { config: config.clone(), stencils })
    }

    pub fn build_all(mesh: &Mesh, config: &ConvolutionConfig) -> Result<Self> {
        let nodes: Vec<usize> = (0..mesh.node_count()).collect();
        Self::build(mesh, config, &nodes)
    }

    pub fn get(&self, node: usize) -> Result<&Stencil> {
        self.stencils.get(node).and_then(|s| s.as_ref()).ok_or(Error::MissingBasis(node))
    }

    /// Node count of the largest stencil.
    pub fn max_stencil(&self) -> usize {
        self.stencils.iter().flatten().map(|s| s.members().len()).max().unwrap_or(0)
    }
}

/// Shape values and material gradients over an element patch at one parent point.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSample {
    pub element: usize,
    pub xi: [f64; 3],
    /// Material coordinates of the point.
    pub x: [f64; 3],
    /// Element patch node ids, ascending.
    pub nodes: Vec<usize>,
    pub values: Vec<f64>,
    /// `grads[K][j]` is ∂Ñ_K/∂X_j.
    pub grads: Vec<[f64; 3]>,
    pub jacobian_det: f64,
}

/// Element patch under `bases`: union of the stencils of the element's nodes.
pub fn element_support(mesh: &Mesh, element: usize, bases: Option<&BasisTable>) -> Result<Vec<usize>> {
    let el = &mesh.elements[element];
    let Some(table) = bases else {
        let mut nodes = el.nodes.clone();
        nodes.sort_unstable();
        return Ok(nodes);
    };
    let mut nodes = Vec::new();
    for &n in &el.nodes {
        nodes.extend_from_slice(table.get(n)?.members());
    }
    nodes.sort_unstable();
    nodes.dedup();
    Ok(nodes)
}

/// Evaluates the element's shape functions at `xi`; `None` selects plain finite elements.
pub fn chidenn_shape(mesh: &Mesh, element: usize, xi: [f64; 3], bases: Option<&BasisTable>) -> Result<ShapeSample> {
    let el = &mesh.elements[element];
    let dim = mesh.dim;
    let fe = fe_shape(el.kind, xi)?;
    let coords = mesh.element_coords(element);
    let jac = jacobian(dim, &coords, &fe.d_xi);
    let det = jac.determinant();
    let jac_inv = match jac.try_inverse() {
        Some(inv) if det > 0.0 => inv,
        _ => return Err(Error::InvertedElement { element, det_j: det, xi }),
    };
    let dn = physical_gradients(dim, &fe.d_xi, &jac_inv);
    let x = map_point(&fe.values, &coords);
    let nodes = element_support(mesh, element, bases)?;
    let mut values = vec![0.0; nodes.len()];
    let mut grads = vec![[0.0; 3]; nodes.len()];
    for (a, &node) in el.nodes.iter().enumerate() {
        let identity = Stencil::Identity(node);
        let stencil = match bases {
            Some(t) => t.get(node)?,
            None => &identity,
        };
        let (w, dw) = stencil.evaluate(x)?;
        for (slot, &k) in stencil.members().iter().enumerate() {
            let idx = nodes.binary_search(&k).expect("support contains stencil");
            values[idx] += fe.values[a] * w[slot];
            for j in 0..dim {
                grads[idx][j] += dn[a][j] * w[slot] + fe.values[a] * dw[slot][j];
            }
        }
    }
    Ok(ShapeSample { element, xi, x, nodes, values, grads, jacobian_det: det })
}
