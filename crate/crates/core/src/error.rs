use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("signature ({pos},{neg},{zero}) is not Lorentzian (1,{expected_neg},0)")]
    Signature {
        pos: usize,
        neg: usize,
        zero: usize,
        expected_neg: usize,
    },

    #[error("frame: {0}")]
    Frame(String),

    #[error("outside domain: {0}")]
    Domain(String),

    #[error("cusp: {0}")]
    Cusp(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("singular fiber at t = {0}")]
    SingularFiber(String),

    #[error("digit budget exceeded after {levels} doublings (partial estimate {partial})")]
    Resource { levels: u32, partial: f64 },

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    /// The message without its category prefix; structured variants fall back to `Display`.
    pub fn detail(&self) -> String {
        match self {
            Error::Input(m)
            | Error::Degenerate(m)
            | Error::Frame(m)
            | Error::Domain(m)
            | Error::Cusp(m)
            | Error::Consistency(m)
            | Error::Config(m) => m.clone(),
            other => other.to_string(),
        }
    }

    /// Short machine-readable tag, used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension { .. } => "dimension",
            Error::Input(_) => "input",
            Error::Degenerate(_) => "degenerate",
            Error::Signature { .. } => "signature",
            Error::Frame(_) => "frame",
            Error::Domain(_) => "domain",
            Error::Cusp(_) => "cusp",
            Error::Consistency(_) => "consistency",
            Error::SingularFiber(_) => "singular-fiber",
            Error::Resource { .. } => "resource",
            Error::Config(_) => "config",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
