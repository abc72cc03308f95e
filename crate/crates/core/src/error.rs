use thiserror::Error;

/// Failures reported by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite entry in {0}")]
    NonFinite(String),
    #[error("shifted matrix sI - A is numerically singular at s = {re}{im:+}j (condition estimate {cond:.3e})")]
    SingularShift { re: f64, im: f64, cond: f64 },
    #[error("system is not stable: {0}")]
    UnstableSystem(String),
    #[error("matrix is not Hurwitz: {0}")]
    NotHurwitz(String),
    #[error("spectra overlap in Sylvester equation {context} (separation {separation:.3e})")]
    SpectrumOverlap { context: String, separation: f64 },
    #[error("{0} did not converge")]
    NoConvergence(String),
    #[error("matrix is defective or has nearly repeated eigenvalues (gap {gap:.3e})")]
    DefectiveMatrix { gap: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPsd { eigenvalue: f64 },
    #[error("H2 norm is infinite: feedthrough norm {0:.3e}")]
    NonzeroFeedthrough(f64),
    #[error("column {column} is numerically dependent on the previous ones")]
    RankDeficient { column: usize },
    #[error("biorthogonalization pivot broke down at column {column} (|w'v| = {pivot:.3e})")]
    PivotBreakdown { column: usize, pivot: f64 },
    #[error("correction matrix V'W is singular")]
    SingularCorrection,
    #[error("numerical rank {rank} is below the requested order {order}")]
    RankTooLow { rank: usize, order: usize },
    #[error("finite-difference perturbation of {0} produced an unstable reduced model")]
    PerturbationUnstable(String),
    #[error("reduced model unstable for {consecutive} consecutive iterations (last at iteration {iteration})")]
    UnstableIterate { iteration: usize, consecutive: usize },
    #[error("invalid option: {0}")]
    InvalidOption(String),
}

impl Error {
    /// Attach the name of the matrix equation to a spectrum-overlap failure.
    pub fn in_equation(self, name: &str) -> Self {
        match self {
            Error::SpectrumOverlap { separation, .. } => {
                Error::SpectrumOverlap { context: name.to_string(), separation }
            }
            other => other,
        }
    }

    /// Short variant name used in tables and exit messages.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NonFinite(_) => "NonFinite",
            Error::SingularShift { .. } => "SingularShift",
            Error::UnstableSystem(_) => "UnstableSystem",
            Error::NotHurwitz(_) => "NotHurwitz",
            Error::SpectrumOverlap { .. } => "SpectrumOverlap",
            Error::NoConvergence(_) => "NoConvergence",
            Error::DefectiveMatrix { .. } => "DefectiveMatrix",
            Error::NotPsd { .. } => "NotPSD",
            Error::NonzeroFeedthrough(_) => "NonzeroFeedthrough",
            Error::RankDeficient { .. } => "RankDeficient",
            Error::PivotBreakdown { .. } => "PivotBreakdown",
            Error::SingularCorrection => "SingularCorrection",
            Error::RankTooLow { .. } => "RankTooLow",
            Error::PerturbationUnstable(_) => "PerturbationUnstable",
            Error::UnstableIterate { .. } => "UnstableIterate",
            Error::InvalidOption(_) => "InvalidOption",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
