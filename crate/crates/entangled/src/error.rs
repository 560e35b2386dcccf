use thiserror::Error;

/// Errors surfaced by grid, symbol and form operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dilation scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("quadrature node/value count mismatch: {nodes} nodes, {values} values")]
    QuadratureMismatch { nodes: usize, values: usize },
    #[error("requested derivative order {order} exceeds grid resolution (stencil {stencil} wider than N/4 = {limit})")]
    StencilTooWide {
        order: usize,
        stencil: usize,
        limit: usize,
    },
    #[error("imaginary residue {residue:.3e} above admissibility threshold {threshold:.3e}")]
    ImaginaryResidue { residue: f64, threshold: f64 },
    #[error("modulation parameter |u| = {u} aliases on the dual grid (limit {limit})")]
    ModulationAliases { u: f64, limit: f64 },
    #[error("invalid dyadic depth range: {0}")]
    InvalidDepthRange(String),
    #[error("window pair failed the dilation certificate: residual {residual:.3e} at (t, tau) = ({t:.6}, {tau:.6})")]
    UncertifiedPair { residual: f64, t: f64, tau: f64 },
    #[error("inequality ledger violated at step `{step}`: slack {slack:.3e} below -{tol:.1e}")]
    LedgerViolation { step: String, slack: f64, tol: f64 },
    #[error("zero input field in slot {0}")]
    ZeroField(usize),
    #[error("quadrature failed to converge: {0}")]
    QuadratureDiverged(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed field file: {0}")]
    MalformedField(String),
    #[error("unknown builtin: {0}")]
    UnknownBuiltin(String),
}

pub type Result<T> = std::result::Result<T, Error>;
