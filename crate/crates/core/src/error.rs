use thiserror::Error;

/// Error taxonomy shared across the crate. The CLI maps these onto exit
/// codes: input errors to 2, size-guard refusals to 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("arithmetic error: {0}")]
    Arithmetic(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("input error: {0}")]
    Input(String),
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("inconsistency: {0}")]
    Inconsistency(String),
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Size guards for the brute-force enumerations. All bounds are inclusive.
#[derive(Debug, Clone)]
pub struct Limits {
    /// Total dimension bound for subrepresentation enumeration.
    pub max_total_dim: usize,
    /// Vertex-count bound for up-closed subset enumeration.
    pub max_up_closed_vertices: usize,
    /// Rectangle-count bound for hyperplane-arrangement scans.
    pub max_rectangles: usize,
    /// Finite-arc bound for brute-force min-cut.
    pub max_cut_arcs: usize,
    /// Hard cap on enumeration tree nodes, to fail loudly instead of hanging.
    pub max_enum_nodes: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_total_dim: 10,
            max_up_closed_vertices: 20,
            max_rectangles: 5000,
            max_cut_arcs: 20,
            max_enum_nodes: 50_000_000,
        }
    }
}

impl Limits {
    /// Default limits with a different total-dimension bound.
    pub fn with_total_dim(max_total_dim: usize) -> Self {
        Limits { max_total_dim, ..Limits::default() }
    }
}
