use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid point{}: {reason}", fmt_index(*.index))]
    InvalidPoint {
        index: Option<usize>,
        reason: String,
    },

    #[error("invalid tangent vector: {0}")]
    InvalidTangent(String),

    /// `p` lies in (or numerically on) the cut locus of `x`, so `logₓ p` is undefined.
    #[error("cut locus{}: log undefined from {base:?} to {target:?}", fmt_index(*.index))]
    CutLocus {
        index: Option<usize>,
        base: Vec<f64>,
        target: Vec<f64>,
    },

    #[error("masses sum to {sum}, expected 1 (tolerance 1e-6)")]
    MassSum { sum: f64 },

    #[error("mass {index} is {value}; masses must be positive and finite")]
    InvalidMass { index: usize, value: f64 },

    #[error("sample is empty")]
    EmptySample,

    #[error("{points} points but {masses} masses")]
    LengthMismatch { points: usize, masses: usize },

    /// The ambient mean is too short to project back onto the manifold.
    #[error("degenerate ambient mean: |mu| = {norm:e} <= 1e-12")]
    DegenerateMean { norm: f64 },

    /// An ambient Minkowski mean of hyperboloid points was not timelike; the input is corrupt.
    #[error("ambient Minkowski mean is not timelike (<mu,mu> = {form})")]
    NonTimelikeMean { form: f64 },

    #[error("invalid isometry: {0}")]
    InvalidIsometry(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

fn fmt_index(index: Option<usize>) -> String {
    index.map(|i| format!(" (point {i})")).unwrap_or_default()
}

impl Error {
    pub(crate) fn with_index(self, i: usize) -> Self {
        match self {
            Error::CutLocus { base, target, .. } => Error::CutLocus {
                index: Some(i),
                base,
                target,
            },
            Error::InvalidPoint { reason, .. } => Error::InvalidPoint {
                index: Some(i),
                reason,
            },
            other => other,
        }
    }
}
