//! Convolution-enriched finite element / meshfree solver for nonlinear solid dynamics.
//!
//! The interpolation combines standard finite element shape functions with meshfree
//! patch functions built over rings of neighboring elements. Elements may use either
//! interpolation, so enrichment can be confined to selected regions of a fixed mesh.

pub mod adaptivity;
pub mod assembly;
pub mod convergence;
pub mod dynamics;
pub mod error;
pub mod interp;
pub mod material;
pub mod mesh;
pub mod output;
pub mod meshgen;
pub mod quadrature;
pub mod scenario;
pub mod sparse;
pub mod verify;

pub use error::{Error, Result};
