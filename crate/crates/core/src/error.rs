use thiserror::Error;

#[derive(Debug, Error)]
pub enum UnfoldError {
    #[error("input is not convex at vertex {vertex}: {reason}")]
    Convexity { vertex: usize, reason: String },
    #[error("malformed input: {0}")]
    Format(String),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("not in general position: {0}")]
    GeneralPosition(String),
    #[error("invalid cut tree: {0}")]
    Tree(String),
    #[error("no simple unfolding found up to lambda = 2^{cap_exponent} ({} probes)", probes.len())]
    SearchExhausted {
        cap_exponent: i32,
        probes: Vec<(f64, bool)>,
    },
    #[error("internal invariant broken: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = UnfoldError> = std::result::Result<T, E>;
