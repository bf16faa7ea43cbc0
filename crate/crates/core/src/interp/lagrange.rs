//! One-dimensional Lagrange convolution patch functions.

use crate::error::{Error, Result};

/// Lagrange weights of the stencil `coords` at `x` and their derivatives d/dX.
///
/// The polynomial order is `coords.len() - 1`; weights are the Kronecker delta at stencil nodes.
pub fn lagrange_conv_patch(coords: &[f64], x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = coords.len();
    for i in 0..n {
        for j in i + 1..n {
            if coords[i] == coords[j] {
                return Err(Error::DuplicatePatchNode(coords[i]));
            }
        }
    }
    let mut values = vec![0.0; n];
    let mut derivs = vec![0.0; n];
    for j in 0..n {
        let mut denom = 1.0;
        let mut value = 1.0;
        for m in 0..n {
            if m != j {
                denom *= coords[j] - coords[m];
                value *= x - coords[m];
            }
        }
        // d/dx of Π (x - x_m) by the product rule, without dividing by (x - x_m)
        let mut deriv = 0.0;
        for k in 0..n {
            if k == j {
                continue;
            }
            let mut term = 1.0;
            for m in 0..n {
                if m != j && m != k {
                    term *= x - coords[m];
                }
            }
            deriv += term;
        }
        values[j] = value / denom;
        derivs[j] = deriv / denom;
    }
    Ok((values, derivs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn kronecker_at_middle_node() {
        let (w, _) = lagrange_conv_patch(&[0.0, 1.0, 2.0], 1.0).unwrap();
        assert_eq!(w, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn quadratic_weights_at_half() {
        let (w, _) = lagrange_conv_patch(&[0.0, 1.0, 2.0], 0.5).unwrap();
        let expected = [0.375, 0.75, -0.125];
        for (a, b) in w.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    /// Independent oracle: fit the interpolating polynomial through a unit vector via a Vandermonde solve.
    fn vandermonde_oracle(coords: &[f64], x: f64) -> (Vec<f64>, Vec<f64>) {
        let n = coords.len();
        let v = DMatrix::from_fn(n, n, |i, k| coords[i].powi(k as i32));
        let lu = v.lu();
        let mut values = Vec::new();
        let mut derivs = Vec::new();
        for j in 0..n {
            let mut e = DVector::zeros(n);
            e[j] = 1.0;
            let c = lu.solve(&e).unwrap();
            values.push((0..n).map(|k| c[k] * x.powi(k as i32)).sum());
            derivs.push((1..n).map(|k| c[k] * k as f64 * x.powi(k as i32 - 1)).sum());
        }
        (values, derivs)
    }

    #[test]
    fn matches_polynomial_fit_oracle() {
        let coords = [-0.3, 0.4, 1.1, 2.5];
        for x in [-0.5, 0.0, 0.77, 1.9, 2.4] {
            let (w, dw) = lagrange_conv_patch(&coords, x).unwrap();
            let (ow, odw) = vandermonde_oracle(&coords, x);
            for j in 0..4 {
                assert!((w[j] - ow[j]).abs() < 1e-12);
                assert!((dw[j] - odw[j]).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn derivative_is_exact_at_nodes() {
        let coords = [0.0, 1.0, 2.0];
        let (_, dw) = lagrange_conv_patch(&coords, 1.0).unwrap();
        assert!((dw[0] + 0.5).abs() < 1e-15 && dw[1].abs() < 1e-15 && (dw[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn duplicate_coordinates_rejected() {
        assert!(matches!(lagrange_conv_patch(&[0.0, 1.0, 1.0], 0.5), Err(Error::DuplicatePatchNode(_))));
    }
}
