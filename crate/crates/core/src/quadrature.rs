//! Gauss-type quadrature on the parent domains.

use crate::error::{Error, Result};
use crate::mesh::ElementKind;

/// Highest polynomial degree accepted by [`quadrature_rule`].
pub const MAX_ORDER: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Gauss-Legendre points and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev initial guess, then Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn points_for_degree(order: usize) -> usize {
    order / 2 + 1
}

/// Rule exact for polynomials of total degree `order` (per direction for quads).
pub fn quadrature_rule(kind: ElementKind, order: usize) -> Result<QuadratureRule> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::UnsupportedQuadrature { kind: kind.name(), order });
    }
    let rule = match kind {
        ElementKind::Line2 => {
            let (x, w) = gauss_legendre(points_for_degree(order));
            QuadratureRule { points: x.iter().map(|&p| [p, 0.0, 0.0]).collect(), weights: w }
        }
        ElementKind::Quad4 => {
            let (x, w) = gauss_legendre(points_for_degree(order));
            let mut rule = QuadratureRule { points: Vec::new(), weights: Vec::new() };
            for (j, &y) in x.iter().enumerate() {
                for (i, &xx) in x.iter().enumerate() {
                    rule.points.push([xx, y, 0.0]);
                    rule.weights.push(w[i] * w[j]);
                }
            }
            rule
        }
        ElementKind::Tet4 => match order {
            1 => QuadratureRule { points: vec![[0.25; 3]], weights: vec![1.0 / 6.0] },
            2 => {
                let a = 0.585_410_196_624_968_5;
                let b = 0.138_196_601_125_010_5;
                QuadratureRule {
                    points: vec![[b, b, b], [a, b, b], [b, a, b], [b, b, a]],
                    weights: vec![1.0 / 24.0; 4],
                }
            }
            _ => collapsed_tet_rule(order),
        },
    };
    Ok(rule)
}

/// Conical-product rule: tensor Gauss on the unit cube collapsed onto the simplex.
/// The collapse adds degree 2 in the first and 1 in the second direction.
fn collapsed_tet_rule(order: usize) -> QuadratureRule {
    let n = (order + 2) / 2 + 1;
    let (x, w) = gauss_legendre(n);
    let unit: Vec<(f64, f64)> = x.iter().zip(&w).map(|(&p, &q)| (0.5 * (p + 1.0), 0.5 * q)).collect();
    let mut rule = QuadratureRule { points: Vec::new(), weights: Vec::new() };
    for &(u, wu) in &unit {
        for &(v, wv) in &unit {
            for &(t, wt) in &unit {
                let xi = u;
                let eta = v * (1.0 - u);
                let zeta = t * (1.0 - u) * (1.0 - v);
                rule.points.push([xi, eta, zeta]);
                rule.weights.push(wu * wv * wt * (1.0 - u).powi(2) * (1.0 - v));
            }
        }
    }
    rule
}

/// Rule on the unit triangle `{u, v ≥ 0, u + v ≤ 1}` exact to degree `order`; weights sum to 1/2.
pub fn triangle_rule(order: usize) -> QuadratureRule {
    let n = (order + 1) / 2 + 1;
    let (x, w) = gauss_legendre(n);
    let unit: Vec<(f64, f64)> = x.iter().zip(&w).map(|(&p, &q)| (0.5 * (p + 1.0), 0.5 * q)).collect();
    let mut rule = QuadratureRule { points: Vec::new(), weights: Vec::new() };
    for &(u, wu) in &unit {
        for &(t, wt) in &unit {
            rule.points.push([u, t * (1.0 - u), 0.0]);
            rule.weights.push(wu * wt * (1.0 - u));
        }
    }
    rule
}

/// Default rule degree for convolution elements of reproducing order `p`.
///
/// The shape functions are not polynomial, so the degree is set by integration accuracy rather than
/// by `p`: from degree 12 on, two more degrees change assembled forces by about 1e-7 relative on
/// moderately distorted quads.
pub fn default_order(p: usize) -> usize {
    (2 * (p + 1) + 6).max(12)
}

/// Rule degree used for plain finite elements (products of linear shape functions).
pub const PLAIN_FE_ORDER: usize = 2;
