//! Shape functions: standard finite element bases and their convolution enrichment.

pub mod fe;
pub mod lagrange;
pub mod rbf;
pub mod shape;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fe::{fe_shape, FeShape};
pub use lagrange::lagrange_conv_patch;
pub use rbf::{rbf_assemble_patch, rbf_conv_patch, PatchBasis};
pub use shape::{chidenn_shape, element_support, BasisTable, ShapeSample, Stencil};

/// Default multiquadric exponent.
pub const DEFAULT_RBF_EXPONENT: f64 = 1.03;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Lagrange1d,
    Rbf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvolutionConfig {
    /// Patch size in element rings.
    pub s: usize,
    /// Dilation: kernel shape constant over nodal spacing.
    pub a: f64,
    /// Reproducing polynomial order.
    pub p: usize,
    pub kernel: Kernel,
    #[serde(default = "default_exponent")]
    pub rbf_exponent: f64,
}

fn default_exponent() -> f64 {
    DEFAULT_RBF_EXPONENT
}

impl ConvolutionConfig {
    pub fn rbf(s: usize, p: usize, a: f64) -> Self {
        ConvolutionConfig { s, a, p, kernel: Kernel::Rbf, rbf_exponent: DEFAULT_RBF_EXPONENT }
    }

    pub fn lagrange(s: usize, p: usize) -> Self {
        ConvolutionConfig { s, a: 1.0, p, kernel: Kernel::Lagrange1d, rbf_exponent: DEFAULT_RBF_EXPONENT }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.s == 0 || self.p == 0 {
            return Err(Error::Config(format!("patch size s and order p must be at least 1 (s = {}, p = {})", self.s, self.p)));
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::Config(format!("dilation a must be positive (a = {})", self.a)));
        }
        if !(self.rbf_exponent > 0.0 && self.rbf_exponent.is_finite()) {
            return Err(Error::Config(format!("rbf exponent must be positive (q = {})", self.rbf_exponent)));
        }
        if self.kernel == Kernel::Lagrange1d && dim != 1 {
            return Err(Error::Config(format!("lagrange1d kernel requires a 1D mesh, got dimension {dim}")));
        }
        Ok(())
    }

    /// One-line summary recorded in outputs.
    pub fn describe(&self) -> String {
        match self.kernel {
            Kernel::Lagrange1d => format!("kernel=lagrange1d s={} p={}", self.s, self.p),
            Kernel::Rbf => format!("kernel=rbf s={} p={} a={} q={}", self.s, self.p, self.a, self.rbf_exponent),
        }
    }
}
