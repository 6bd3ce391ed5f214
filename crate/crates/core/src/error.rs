use thiserror::Error;

/// Rejections raised while building or validating a Lévy triplet.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LevyError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("{field}: expected dimension {expected}, found {found}")]
    DimensionMismatch { field: String, expected: usize, found: usize },
    #[error("{field}: non-finite entry")]
    NonFinite { field: String },
    #[error("jumps/{component}: alpha out of range (0,2): {alpha}")]
    AlphaOutOfRange { component: usize, alpha: f64 },
    #[error("jumps/{component}: scale must be positive, got {scale}")]
    NonPositiveScale { component: usize, scale: f64 },
    #[error("jumps/{component}/atoms/{atom}: mass must be positive, got {mass}")]
    NonPositiveMass { component: usize, atom: usize, mass: f64 },
    #[error("jumps/{component}/atoms/{atom}: atom located at the origin")]
    AtomAtOrigin { component: usize, atom: usize },
    #[error("gaussian: not symmetric at ({row},{col}), gap {gap:e}")]
    AsymmetricGaussian { row: usize, col: usize, gap: f64 },
    #[error("gaussian: not positive semidefinite, smallest eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },
    #[error("jumps/{component}: invalid radial density: {reason}")]
    InvalidRadial { component: usize, reason: String },
    #[error("invalid growth bound: {0}")]
    InvalidGrowth(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl LevyError {
    /// JSON pointer into the triplet document that caused the rejection.
    pub fn pointer(&self) -> String {
        match self {
            LevyError::ZeroDimension => "/dim".into(),
            LevyError::DimensionMismatch { field, .. } | LevyError::NonFinite { field } => {
                format!("/{field}")
            }
            LevyError::AlphaOutOfRange { component, .. } => format!("/jumps/{component}/alpha"),
            LevyError::NonPositiveScale { component, .. } => format!("/jumps/{component}/scale"),
            LevyError::NonPositiveMass { component, atom, .. } => {
                format!("/jumps/{component}/atoms/{atom}/mass")
            }
            LevyError::AtomAtOrigin { component, atom } => {
                format!("/jumps/{component}/atoms/{atom}/location")
            }
            LevyError::AsymmetricGaussian { row, col, .. } => format!("/gaussian/{row}/{col}"),
            LevyError::NotPsd { .. } => "/gaussian".into(),
            LevyError::InvalidRadial { component, .. } => format!("/jumps/{component}"),
            LevyError::InvalidGrowth(_) | LevyError::Unsupported(_) => String::new(),
        }
    }
}

/// The complex extension ψ(ξ − iη) is not available at the requested point.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("domain error: {reason}")]
pub struct DomainError {
    pub reason: String,
}

impl DomainError {
    pub fn new(reason: impl Into<String>) -> Self {
        Self { reason: reason.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("grid: {0}")]
    Grid(String),
    #[error("quadrature did not converge: estimated error {estimate:e} above tolerance {tolerance:e}")]
    Nonconvergence { value_re: f64, value_im: f64, estimate: f64, tolerance: f64 },
    #[error("growth bound check failed: generalized moment is infinite")]
    GrowthBound,
    #[error("sampling unsupported: {0}")]
    Sampling(String),
    #[error(transparent)]
    Levy(#[from] LevyError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error("zero set is flagged dense; no finite subgroup description")]
    Dense,
    #[error("theorem hypothesis unmet: {0}")]
    HypothesisUnmet(String),
    #[error("exact path unavailable: {0}")]
    ExactPathUnavailable(String),
    #[error("unsupported dimension {0}; searches cover 1 to 3")]
    Dimension(usize),
    #[error("invalid search parameters: {0}")]
    InvalidSearch(String),
    #[error(transparent)]
    Levy(#[from] LevyError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}
