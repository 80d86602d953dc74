use thiserror::Error;

/// Every failure the library can report.
///
/// [`Error::kind`] gives a stable, machine-readable tag for each variant; the
/// command-line front end prints it on standard error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular: no unique solution")]
    SingularMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("negative weight {value} at {location}")]
    NegativeWeight { value: String, location: String },
    #[error("total mass diverges (spectral radius of the joint matrix is at least 1)")]
    MassDiverges,
    #[error("power iteration did not converge after {iterations} iterations (best estimate {estimate})")]
    NoConvergence { iterations: usize, estimate: f64 },
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("duplicate symbol {0:?} in alphabet")]
    DuplicateSymbol(String),
    #[error("automaton is empty: no state lies on an accepting path")]
    EmptyAutomaton,
    #[error("total mass is zero")]
    ZeroMass,
    #[error("automaton is not locally stochastic: {0}")]
    NotStochastic(String),
    #[error("ill-formed stochastic regular expression: {0}")]
    IllFormedSre(String),
    #[error("growth rate {zeta} is not an exact rational; use the float backend")]
    IrrationalGrowth { zeta: f64 },
    #[error("tropical automaton has no cycle on an accepting path")]
    NoCycle,
    #[error("tropical automaton accepts no word")]
    EmptyLanguage,
    #[error("enumeration budget exceeded: {words} words > {budget}")]
    BudgetExceeded { words: f64, budget: f64 },
    #[error("exact equivalence requires the rational backend")]
    FloatBackendUnsupported,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid automaton file: {0}")]
    Format(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SingularMatrix => "SingularMatrix",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NegativeWeight { .. } => "NegativeWeight",
            Error::MassDiverges => "MassDiverges",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::UnknownSymbol(_) => "UnknownSymbol",
            Error::DuplicateSymbol(_) => "DuplicateSymbol",
            Error::EmptyAutomaton => "EmptyAutomaton",
            Error::ZeroMass => "ZeroMass",
            Error::NotStochastic(_) => "NotStochastic",
            Error::IllFormedSre(_) => "IllFormedSre",
            Error::IrrationalGrowth { .. } => "IrrationalGrowth",
            Error::NoCycle => "NoCycle",
            Error::EmptyLanguage => "EmptyLanguage",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::FloatBackendUnsupported => "FloatBackendUnsupported",
            Error::Parse { .. } => "Parse",
            Error::Format(_) => "Format",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
