use thiserror::Error;

/// Failures raised by the geometric and flow operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("tangent plane is (nearly) a complex line: sin(alpha) = {sin_alpha:e}")]
    ComplexPoint { sin_alpha: f64 },

    #[error("tangent vectors are (nearly) parallel: Gram determinant = {gram:e}")]
    DegenerateTangent { gram: f64 },

    #[error("node ({i}, {j}) is outside the region where a stencil of reach {reach} fits")]
    OutOfDomain { i: usize, j: usize, reach: usize },

    #[error("surface is not symplectic{}: c = {c:e}", at_node(.node))]
    NotSymplectic { node: Option<(usize, usize)>, c: f64 },

    #[error("cos(alpha) = {cos_alpha:e} at node ({i}, {j}) is below the integration floor {floor}")]
    NearComplexPoint {
        i: usize,
        j: usize,
        cos_alpha: f64,
        floor: f64,
    },

    #[error("symbol direction must be nonzero")]
    ZeroDirection,

    #[error("time step {dt:e} exceeds the stability limit {limit:e}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("symplecticity lost after step: min cos(alpha) = {min_cos:e}")]
    SymplecticityLost { min_cos: f64 },

    #[error("perturbation leaves the graph regime: {reason}")]
    PerturbationTooLarge { reason: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid file line {line}: {msg}")]
    GridFormat { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, GeomError>;

fn at_node(node: &Option<(usize, usize)>) -> String {
    match node {
        Some((i, j)) => format!(" at node ({i}, {j})"),
        None => String::new(),
    }
}
