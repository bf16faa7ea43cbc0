//! Compressible neo-Hookean solid:
//! `w = C10 (Ī₁ − 3) + (J − 1)² / D1` with `Ī₁ = J^(−2/3) tr(FᵀF)`.
//!
//! All evaluation works on the full 3×3 deformation gradient. One- and two-dimensional
//! problems are promoted with unit stretch in the missing directions (uniaxial strain and
//! plane strain respectively), so the in-plane block of `P` is what enters the force.

use nalgebra::{Matrix3, SMatrix};

use crate::error::{Error, Result};

/// Fourth-order tangent `∂P_iJ/∂F_kL` stored at `(3i + J, 3k + L)`.
pub type Tangent = SMatrix<f64, 9, 9>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeoHookean {
    /// Pa
    pub c10: f64,
    /// 1/Pa
    pub d1: f64,
    /// kg/m³
    pub rho0: f64,
}

impl NeoHookean {
    pub fn new(c10: f64, d1: f64, rho0: f64) -> Result<Self> {
        if !(c10 > 0.0 && d1 > 0.0 && rho0 > 0.0) {
            return Err(Error::Config(format!(
                "neo-Hookean constants must be positive (C10 = {c10}, D1 = {d1}, rho0 = {rho0})"
            )));
        }
        Ok(NeoHookean { c10, d1, rho0 })
    }

    /// Constants matching the initial shear modulus `mu0` and bulk modulus `k0` in the small-strain limit.
    pub fn from_moduli(mu0: f64, k0: f64, rho0: f64) -> Result<Self> {
        if !(mu0 > 0.0 && k0 > 0.0) {
            return Err(Error::Config(format!("moduli must be positive (mu0 = {mu0}, K0 = {k0})")));
        }
        Self::new(0.5 * mu0, 2.0 / k0, rho0)
    }

    pub fn shear_modulus(&self) -> f64 {
        2.0 * self.c10
    }

    pub fn bulk_modulus(&self) -> f64 {
        2.0 / self.d1
    }

    /// Dilatational wave speed of the linearized material.
    pub fn wave_speed(&self) -> f64 {
        ((self.bulk_modulus() + 4.0 * self.shear_modulus() / 3.0) / self.rho0).sqrt()
    }

    pub fn strain_energy(&self, f: &Matrix3<f64>) -> Result<f64> {
        let j = volume_ratio(f)?;
        let i1 = f.norm_squared();
        Ok(self.c10 * (j.powf(-2.0 / 3.0) * i1 - 3.0) + (j - 1.0).powi(2) / self.d1)
    }

    /// First Piola-Kirchhoff stress `P = ∂w/∂F`.
    pub fn pk1_stress(&self, f: &Matrix3<f64>) -> Result<Matrix3<f64>> {
        let j = volume_ratio(f)?;
        let h = inverse_transpose(f, j);
        let i1 = f.norm_squared();
        let jm23 = j.powf(-2.0 / 3.0);
        Ok((f - h * (i1 / 3.0)) * (2.0 * self.c10 * jm23) + h * (2.0 / self.d1 * (j - 1.0) * j))
    }

    /// Analytic material tangent `A = ∂P/∂F`.
    pub fn material_tangent(&self, f: &Matrix3<f64>) -> Result<Tangent> {
        let j = volume_ratio(f)?;
        let h = inverse_transpose(f, j);
        let i1 = f.norm_squared();
        let jm23 = j.powf(-2.0 / 3.0);
        let iso = 2.0 * self.c10 * jm23;
        let vol = 2.0 / self.d1;
        let mut a = Tangent::zeros();
        for i in 0..3 {
            for jj in 0..3 {
                let dev = f[(i, jj)] - i1 / 3.0 * h[(i, jj)];
                for k in 0..3 {
                    for l in 0..3 {
                        let delta = if i == k && jj == l { 1.0 } else { 0.0 };
                        let d_iso = iso
                            * (-2.0 / 3.0 * h[(k, l)] * dev + delta - 2.0 / 3.0 * f[(k, l)] * h[(i, jj)]
                                + i1 / 3.0 * h[(i, l)] * h[(k, jj)]);
                        let d_vol = vol
                            * ((2.0 * j - 1.0) * j * h[(k, l)] * h[(i, jj)] - (j * j - j) * h[(i, l)] * h[(k, jj)]);
                        a[(3 * i + jj, 3 * k + l)] = d_iso + d_vol;
                    }
                }
            }
        }
        Ok(a)
    }

    /// Central finite-difference tangent, for cross-validation of [`Self::material_tangent`].
    pub fn material_tangent_fd(&self, f: &Matrix3<f64>, step: f64) -> Result<Tangent> {
        let mut a = Tangent::zeros();
        for k in 0..3 {
            for l in 0..3 {
                let mut fp = *f;
                let mut fm = *f;
                fp[(k, l)] += step;
                fm[(k, l)] -= step;
                let dp = (self.pk1_stress(&fp)? - self.pk1_stress(&fm)?) / (2.0 * step);
                for i in 0..3 {
                    for jj in 0..3 {
                        a[(3 * i + jj, 3 * k + l)] = dp[(i, jj)];
                    }
                }
            }
        }
        Ok(a)
    }

    /// Cauchy stress `σ = J⁻¹ P Fᵀ`.
    pub fn cauchy_stress(&self, f: &Matrix3<f64>) -> Result<Matrix3<f64>> {
        let j = volume_ratio(f)?;
        Ok(self.pk1_stress(f)? * f.transpose() / j)
    }

    pub fn von_mises(&self, f: &Matrix3<f64>) -> Result<f64> {
        Ok(von_mises(&self.cauchy_stress(f)?))
    }
}

pub fn volume_ratio(f: &Matrix3<f64>) -> Result<f64> {
    let j = f.determinant();
    if j > 0.0 && j.is_finite() {
        Ok(j)
    } else {
        Err(Error::NonPositiveJacobian { j })
    }
}

fn inverse_transpose(f: &Matrix3<f64>, j: f64) -> Matrix3<f64> {
    // cofactor / det; J > 0 is already checked
    let c = |r: usize, s: usize| {
        let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
        let (s1, s2) = ((s + 1) % 3, (s + 2) % 3);
        f[(r1, s1)] * f[(r2, s2)] - f[(r1, s2)] * f[(r2, s1)]
    };
    Matrix3::from_fn(|r, s| c(r, s) / j)
}

pub fn von_mises(sigma: &Matrix3<f64>) -> f64 {
    let s = sigma;
    let d = (s[(0, 0)] - s[(1, 1)]).powi(2) + (s[(1, 1)] - s[(2, 2)]).powi(2) + (s[(2, 2)] - s[(0, 0)]).powi(2);
    let shear = s[(0, 1)].powi(2) + s[(1, 2)].powi(2) + s[(2, 0)].powi(2);
    (0.5 * d + 3.0 * shear).sqrt()
}

/// Applies the tangent to a direction: `(A : dF)_iJ = Σ A_iJkL dF_kL`.
pub fn contract(a: &Tangent, df: &Matrix3<f64>) -> Matrix3<f64> {
    Matrix3::from_fn(|i, jj| {
        let mut s = 0.0;
        for k in 0..3 {
            for l in 0..3 {
                s += a[(3 * i + jj, 3 * k + l)] * df[(k, l)];
            }
        }
        s
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat() -> NeoHookean {
        NeoHookean::new(115.385e3, 4e-6, 1000.0).unwrap()
    }

    fn random_f(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
        loop {
            let f = Matrix3::identity() + Matrix3::from_fn(|_, _| rng.gen_range(-0.3..0.3));
            if f.determinant() > 0.3 {
                return f;
            }
        }
    }

    fn rel(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
        (a - b).abs().max() / b.abs().max()
    }

    #[test]
    fn from_moduli_examples() {
        let m = NeoHookean::from_moduli(1730.8, 3750.0, 1000.0).unwrap();
        assert!((m.c10 - 865.4).abs() < 1e-12);
        assert!((m.d1 - 2.0 / 3750.0).abs() < 1e-18);
        assert!((m.d1 - 5.333e-4).abs() < 1e-7);
        let m = NeoHookean::from_moduli(2.0 * 115385.0, 2.0 / 4e-6, 1.0).unwrap();
        assert!((m.c10 - 115385.0).abs() < 1e-9);
        assert!((m.d1 - 4e-6).abs() < 1e-20);
        let m = NeoHookean::from_moduli(2.0, 2.0, 1.0).unwrap();
        assert_eq!((m.c10, m.d1), (1.0, 1.0));
        assert!(NeoHookean::from_moduli(0.0, 1.0, 1.0).is_err());
        assert!(NeoHookean::from_moduli(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn reference_state_is_stress_free() {
        let m = mat();
        let i = Matrix3::identity();
        assert_eq!(m.strain_energy(&i).unwrap(), 0.0);
        assert!(m.pk1_stress(&i).unwrap().abs().max() < 1e-9);
    }

    #[test]
    fn pure_dilation_energy() {
        let m = mat();
        let f = Matrix3::identity() * 1.1_f64.powf(1.0 / 3.0);
        let w = m.strain_energy(&f).unwrap();
        assert!((w - 2500.0).abs() < 1e-7 * 2500.0, "{w}");
    }

    #[test]
    fn simple_shear_energy_closed_form() {
        // J = 1, I1 = 3 + γ², so w = C10 γ².
        let m = mat();
        let g = 0.2;
        let mut f = Matrix3::identity();
        f[(0, 1)] = g;
        let w = m.strain_energy(&f).unwrap();
        assert!((w - m.c10 * g * g).abs() < 1e-12 * m.c10);
    }

    #[test]
    fn dilation_pressure_linearization() {
        let m = mat();
        let eps: f64 = 1e-4;
        let f = Matrix3::identity() * (1.0 + eps).powf(1.0 / 3.0);
        let p = m.pk1_stress(&f).unwrap();
        let mean = p.trace() / 3.0;
        assert!((mean - 2.0 / m.d1 * eps).abs() < 2e-4 * 2.0 / m.d1 * eps);
    }

    #[test]
    fn non_positive_j_rejected() {
        let m = mat();
        let mut f = Matrix3::identity();
        f[(0, 0)] = -1.0;
        assert!(matches!(m.strain_energy(&f), Err(Error::NonPositiveJacobian { .. })));
        assert!(m.pk1_stress(&f).is_err());
        assert!(m.material_tangent(&f).is_err());
    }

    #[test]
    fn stress_matches_energy_gradient() {
        let m = mat();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = 1e-7;
        for _ in 0..100 {
            let f = random_f(&mut rng);
            let p = m.pk1_stress(&f).unwrap();
            let fd = Matrix3::from_fn(|i, j| {
                let mut fp = f;
                let mut fm = f;
                fp[(i, j)] += h;
                fm[(i, j)] -= h;
                (m.strain_energy(&fp).unwrap() - m.strain_energy(&fm).unwrap()) / (2.0 * h)
            });
            assert!(rel(&p, &fd) < 1e-6, "{}", rel(&p, &fd));
        }
    }

    #[test]
    fn tangent_matches_stress_gradient_and_is_major_symmetric() {
        let m = mat();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let f = random_f(&mut rng);
            let a = m.material_tangent(&f).unwrap();
            let fd = m.material_tangent_fd(&f, 1e-6).unwrap();
            let err = (a - fd).abs().max() / a.abs().max();
            assert!(err < 1e-5, "{err}");
            assert!((a - a.transpose()).abs().max() < 1e-9 * a.abs().max());
        }
    }

    #[test]
    fn tangent_at_identity_is_linear_elasticity() {
        let m = mat();
        let a = m.material_tangent(&Matrix3::identity()).unwrap();
        let (mu, k) = (m.shear_modulus(), m.bulk_modulus());
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        for i in 0..3 {
            for j in 0..3 {
                for kk in 0..3 {
                    for l in 0..3 {
                        let c = mu * (d(i, kk) * d(j, l) + d(i, l) * d(j, kk)) + (k - 2.0 * mu / 3.0) * d(i, j) * d(kk, l);
                        assert!((a[(3 * i + j, 3 * kk + l)] - c).abs() < 1e-6 * k);
                    }
                }
            }
        }
    }

    #[test]
    fn directional_derivative_with_symmetric_probe() {
        let m = mat();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_f(&mut rng);
        let b = Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let probe = b + b.transpose();
        let h = 1e-6;
        let fd = (m.pk1_stress(&(f + probe * h)).unwrap() - m.pk1_stress(&(f - probe * h)).unwrap()) / (2.0 * h);
        let an = contract(&m.material_tangent(&f).unwrap(), &probe);
        assert!(rel(&an, &fd) < 1e-6);
    }

    #[test]
    fn objectivity_and_isochoric_split() {
        let m = mat();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let f = random_f(&mut rng);
            let axis = nalgebra::Vector3::new(rng.gen(), rng.gen(), rng.gen::<f64>()).normalize();
            let q = nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), rng.gen_range(0.0..6.0));
            let w = m.strain_energy(&f).unwrap();
            let wq = m.strain_energy(&(q.matrix() * f)).unwrap();
            assert!((w - wq).abs() <= 1e-10 * w.abs().max(1.0));
            // isochoric part only: scale to J = 1
            let iso = f / f.determinant().cbrt();
            let expected = m.c10 * (iso.norm_squared() - 3.0);
            assert!((m.strain_energy(&iso).unwrap() - expected).abs() < 1e-9 * m.c10);
        }
    }

    #[test]
    fn von_mises_of_uniaxial_stress() {
        let mut s = Matrix3::zeros();
        s[(0, 0)] = 5.0;
        assert!((von_mises(&s) - 5.0).abs() < 1e-15);
        let mut t = Matrix3::zeros();
        t[(0, 1)] = 1.0;
        t[(1, 0)] = 1.0;
        assert!((von_mises(&t) - 3f64.sqrt()).abs() < 1e-15);
    }
}
