//! Error type shared by all modules of the crate.

/// Errors produced by grid construction, solvers, and verification harnesses.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// Grid parameters violate an invariant (bounds, node counts, spacing).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A finite-difference stencil does not fit on the grid.
    #[error("grid too small for stencil: need at least {needed} nodes, have {have}")]
    StencilTooSmall { needed: usize, have: usize },

    /// An operation that normalizes at x = 0 was given a grid without a zero node.
    #[error("grid does not contain x = 0 as a node")]
    NoZeroNode,

    /// Shape mismatch between fields, slices, or grids.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Non-finite value encountered where finiteness is an invariant.
    #[error("non-finite value at {context}")]
    NonFinite { context: String },

    /// A characteristic trajectory left the sampled domain of a coefficient field.
    #[error("characteristic left coefficient domain at t = {t_exit:.6} (x = {x_exit:.6})")]
    DomainEscape { t_exit: f64, x_exit: f64 },

    /// Backward traces escaped the domain for a set of output nodes.
    #[error("{count} output nodes have characteristics escaping the domain, first at (t={t:.6}, x={x:.6})")]
    NodesEscaped { count: usize, t: f64, x: f64 },

    /// Sampled coefficient window is too narrow for the requested output window.
    #[error("coefficient window [{have_lo:.3},{have_hi:.3}] too narrow: need at least [{need_lo:.3},{need_hi:.3}]")]
    InsufficientPadding {
        have_lo: f64,
        have_hi: f64,
        need_lo: f64,
        need_hi: f64,
    },

    /// Sampled growth check |a(t,x)| <= C|x| failed.
    #[error("coefficient violates the linear-growth bound: |a({t:.3},{x:.3})| = {value:.3e} > {bound:.3e}")]
    GrowthBound { t: f64, x: f64, value: f64, bound: f64 },

    /// Time step too large for the pseudo-spectral KdV integrator.
    #[error("time step {dt:.3e} exceeds the stable step {dt_max:.3e}; increase nt to at least {suggested_nt}")]
    StepSize { dt: f64, dt_max: f64, suggested_nt: usize },

    /// Initial data does not decay at the window edges.
    #[error("initial data must decay at the window edges: |edge value| = {edge:.3e} >= {limit:.3e}")]
    NonDecaying { edge: f64, limit: f64 },

    /// Requested node count is not a power of two (spectral solver).
    #[error("spectral solver requires a power-of-two node count, got {0}")]
    NotPowerOfTwo(usize),

    /// Initial mKdV data is not on the Miura fiber of the supplied KdV solution.
    #[error("initial data not Miura-compatible with q: max |B(r0) - q(t0)| = {max_dev:.3e} > {tol:.3e}")]
    MiuraIncompatible { max_dev: f64, tol: f64 },

    /// Transport of a positive kernel element was given non-positive initial data.
    #[error("initial data must be strictly positive (min = {min:.3e})")]
    NonPositive { min: f64 },

    /// Leading exponent too large: the formal mKdV evolution has no solution.
    #[error("no formal solution: right-hand-side exponent {witness} exceeds the admissible maximum {bound}")]
    NoFormalSolution { witness: String, bound: String },

    /// Exponent-set precondition failed (e.g. max >= 1 before closure).
    #[error("exponent set precondition failed: {0}")]
    ExponentSet(String),

    /// Internal consistency failure in the symbol recursion (exact matching broke).
    #[error("internal symbol-calculus inconsistency: {0}")]
    SymbolInternal(String),

    /// Symbol evaluated on the wrong side or inside |x| < 1.
    #[error("symbol evaluation outside validity: {0}")]
    SymbolEval(String),

    /// A window edge coincides with an eigenvalue; the bisection count is unstable.
    #[error("spectral window edge {edge:.6} is within tolerance of an eigenvalue; widen the window")]
    WindowEdge { edge: f64 },

    /// The two Jacobian routes (exponential formula vs finite differences) disagree.
    #[error("inconsistent characteristic trace: jacobian routes disagree by {dev:.3e} (tolerance {tol:.3e})")]
    InconsistentTrace { dev: f64, tol: f64 },

    /// Parse error in the solution-spec mini-language or CLI arguments.
    #[error("parse error: {0}")]
    Parse(String),

    /// File I/O wrapper.
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}
