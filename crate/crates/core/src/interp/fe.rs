//! Standard finite element shape functions on the parent domains.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::mesh::ElementKind;

/// Slack allowed when checking that a parent coordinate is inside the domain.
const PARENT_TOL: f64 = 1e-10;

/// Shape function values and parent-coordinate derivatives at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct FeShape {
    pub values: Vec<f64>,
    /// `d_xi[i][k]` is dN_i/dξ_k; unused parent directions are zero.
    pub d_xi: Vec<[f64; 3]>,
}

pub fn inside_parent(kind: ElementKind, xi: [f64; 3]) -> bool {
    match kind {
        ElementKind::Line2 => xi[0].abs() <= 1.0 + PARENT_TOL,
        ElementKind::Quad4 => xi[0].abs() <= 1.0 + PARENT_TOL && xi[1].abs() <= 1.0 + PARENT_TOL,
        ElementKind::Tet4 => {
            xi.iter().all(|&c| c >= -PARENT_TOL) && xi[0] + xi[1] + xi[2] <= 1.0 + PARENT_TOL
        }
    }
}

/// Evaluates the standard shape functions of `kind` at the parent point `xi`.
pub fn fe_shape(kind: ElementKind, xi: [f64; 3]) -> Result<FeShape> {
    if !inside_parent(kind, xi) {
        return Err(Error::OutsideParentDomain { kind: kind.name(), xi });
    }
    Ok(fe_shape_unchecked(kind, xi))
}

/// Same as [`fe_shape`] without the domain check (used for inverse mapping and extrapolation).
pub fn fe_shape_unchecked(kind: ElementKind, xi: [f64; 3]) -> FeShape {
    match kind {
        ElementKind::Line2 => {
            let x = xi[0];
            FeShape {
                values: vec![0.5 * (1.0 - x), 0.5 * (1.0 + x)],
                d_xi: vec![[-0.5, 0.0, 0.0], [0.5, 0.0, 0.0]],
            }
        }
        ElementKind::Quad4 => {
            let (x, y) = (xi[0], xi[1]);
            let corners = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];
            let mut values = Vec::with_capacity(4);
            let mut d_xi = Vec::with_capacity(4);
            for (cx, cy) in corners {
                values.push(0.25 * (1.0 + cx * x) * (1.0 + cy * y));
                d_xi.push([0.25 * cx * (1.0 + cy * y), 0.25 * cy * (1.0 + cx * x), 0.0]);
            }
            FeShape { values, d_xi }
        }
        ElementKind::Tet4 => {
            let (x, y, z) = (xi[0], xi[1], xi[2]);
            FeShape {
                values: vec![1.0 - x - y - z, x, y, z],
                d_xi: vec![
                    [-1.0, -1.0, -1.0],
                    [1.0, 0.0, 0.0],
                    [0.0, 1.0, 0.0],
                    [0.0, 0.0, 1.0],
                ],
            }
        }
    }
}

/// Isoparametric Jacobian dX/dξ, padded with identity in the directions beyond `dim`.
pub fn jacobian(dim: usize, coords: &[[f64; 3]], d_xi: &[[f64; 3]]) -> Matrix3<f64> {
    let mut jac = Matrix3::identity();
    for r in 0..dim {
        for c in 0..dim {
            jac[(r, c)] = coords.iter().zip(d_xi).map(|(x, d)| x[r] * d[c]).sum();
        }
    }
    jac
}

/// Maps a parent point to material coordinates.
pub fn map_point(values: &[f64], coords: &[[f64; 3]]) -> [f64; 3] {
    let mut x = [0.0; 3];
    for (n, c) in values.iter().zip(coords) {
        for k in 0..3 {
            x[k] += n * c[k];
        }
    }
    x
}

/// Material-coordinate gradients dN_i/dX from parent derivatives and the Jacobian inverse.
pub fn physical_gradients(dim: usize, d_xi: &[[f64; 3]], jac_inv: &Matrix3<f64>) -> Vec<[f64; 3]> {
    d_xi.iter()
        .map(|d| {
            let g = jac_inv.transpose() * Vector3::new(d[0], d[1], d[2]);
            let mut out = [0.0; 3];
            out[..dim].copy_from_slice(&g.as_slice()[..dim]);
            out
        })
        .collect()
}

/// Inverts the isoparametric map by Newton iteration. Returns `None` when the iteration stalls.
pub fn inverse_map(kind: ElementKind, coords: &[[f64; 3]], x: [f64; 3]) -> Option<[f64; 3]> {
    let dim = kind.dim();
    let mut xi = kind.parent_center();
    for _ in 0..50 {
        let shape = fe_shape_unchecked(kind, xi);
        let mapped = map_point(&shape.values, coords);
        let jac = jacobian(dim, coords, &shape.d_xi);
        let inv = jac.try_inverse()?;
        let mut r = Vector3::zeros();
        for k in 0..dim {
            r[k] = x[k] - mapped[k];
        }
        let step = inv * r;
        for k in 0..dim {
            xi[k] += step[k];
        }
        if step.norm() < 1e-15 {
            break;
        }
    }
    let check = map_point(&fe_shape_unchecked(kind, xi).values, coords);
    let scale = coords.iter().flat_map(|c| c.iter()).fold(1.0_f64, |m, v| m.max(v.abs()));
    let err: f64 = (0..dim).map(|k| (check[k] - x[k]).powi(2)).sum::<f64>().sqrt();
    (err <= 1e-12 * scale).then_some(xi)
}
