use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("dangling node reference: element {element} uses node {node} but the mesh has {count} nodes")]
    DanglingNode { element: usize, node: usize, count: usize },

    #[error("inverted element {element}: Jacobian determinant {det_j:.3e} at parent point {xi:?}")]
    InvertedElement { element: usize, det_j: f64, xi: [f64; 3] },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("node {0} has no incident edges")]
    IsolatedNode(usize),

    #[error("parent coordinate {xi:?} lies outside the {kind} parent domain")]
    OutsideParentDomain { kind: &'static str, xi: [f64; 3] },

    #[error("duplicate node coordinate {0} in Lagrange patch")]
    DuplicatePatchNode(f64),

    #[error("patch of node {center} has {n} nodes, fewer than the {m} polynomial terms")]
    PatchTooSmall { center: usize, n: usize, m: usize },

    #[error("moment matrix of the patch centered at node {center} is singular (degenerate node geometry)")]
    SingularMomentMatrix { center: usize },

    #[error("missing patch basis for node {0}")]
    MissingBasis(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown region tag '{0}'")]
    UnknownRegion(String),

    #[error("unknown {kind} set '{name}'")]
    UnknownSet { kind: &'static str, name: String },

    #[error("unsupported quadrature order {order} for {kind}")]
    UnsupportedQuadrature { kind: &'static str, order: usize },

    #[error("material: non-positive volume ratio J = {j:.6e}")]
    NonPositiveJacobian { j: f64 },

    #[error("material failure at element {element}, quadrature point {qp}: J = {j:.6e}")]
    MaterialFailure { element: usize, qp: usize, j: f64 },

    #[error("lumped mass of dof {dof} is {value:.3e}; use consistent mass instead")]
    NegativeLumpedMass { dof: usize, value: f64 },

    #[error("time {t} outside load history [{start}, {end}]")]
    OutsideHistory { t: f64, start: f64, end: f64 },

    #[error("non-finite state at step {step} (t = {t}); time step is likely above the stability limit")]
    NonFiniteState { step: usize, t: f64 },

    #[error("Newton iteration did not converge after {iters} iterations (residual {residual:.3e})")]
    NoConvergence { iters: usize, residual: f64 },

    #[error("singular tangent matrix at Newton iteration {iter}")]
    SingularTangent { iter: usize },

    #[error("consistent mass matrix is singular on the free dofs")]
    SingularMass,

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the CLI: 1 for input/validation problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonPositiveJacobian { .. }
            | Error::MaterialFailure { .. }
            | Error::NegativeLumpedMass { .. }
            | Error::NonFiniteState { .. }
            | Error::NoConvergence { .. }
            | Error::SingularTangent { .. }
            | Error::SingularMass
            | Error::SingularMomentMatrix { .. } => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { context: context.into(), source }
    }
}
