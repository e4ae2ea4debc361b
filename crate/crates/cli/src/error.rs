use elimsolve::groebner::GroebnerError;
use elimsolve::solvers::SolverError;
use elimsolve::synth::SynthError;
use elimsolve::templates::TemplateError;
use elimsolve::elimderive::VerifyError;
use thiserror::Error;

/// Process exit codes. Stable; documented in the README.
pub mod exit {
    pub const OK: i32 = 0;
    /// I/O and other runtime failures.
    pub const RUNTIME: i32 = 1;
    /// Bad arguments, unknown problem, wrong correspondence count.
    pub const USAGE: i32 = 2;
    pub const RESOURCE_CAP: i32 = 3;
    pub const MISMATCH: i32 = 4;
    pub const DEGENERATE: i32 = 5;
    pub const MALFORMED: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("verification failed: {0}")]
    Mismatch(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::ResourceCap(_) => exit::RESOURCE_CAP,
            CliError::Mismatch(_) => exit::MISMATCH,
            CliError::Degenerate(_) => exit::DEGENERATE,
            CliError::Malformed(_) => exit::MALFORMED,
            CliError::Runtime(_) => exit::RUNTIME,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(format!("json error: {e}"))
    }
}

impl From<GroebnerError> for CliError {
    fn from(e: GroebnerError) -> Self {
        match e {
            GroebnerError::ResourceCap { .. } => CliError::ResourceCap(e.to_string()),
            e => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Groebner(g) => g.into(),
            e => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<TemplateError> for CliError {
    fn from(e: TemplateError) -> Self {
        match e {
            TemplateError::Groebner(g) => g.into(),
            TemplateError::Io(e) => e.into(),
            e @ (TemplateError::Malformed(_) | TemplateError::Version { .. }) => CliError::Malformed(e.to_string()),
            e @ TemplateError::WrongProblem { .. } => CliError::Usage(e.to_string()),
            e => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::WrongCount { .. } | SolverError::WrongTemplate { .. } => CliError::Usage(e.to_string()),
            SolverError::NonFinite => CliError::Malformed(e.to_string()),
            SolverError::Degenerate(_)
            | SolverError::Conditioning { .. }
            | SolverError::Eigen
            | SolverError::ResultantDegenerate
            | SolverError::ExtractionSingular => CliError::Degenerate(e.to_string()),
            e => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::Config(m) => CliError::Usage(m),
            SynthError::Malformed(_) | SynthError::Csv(_) | SynthError::Json(_) => CliError::Malformed(e.to_string()),
            e => CliError::Runtime(e.to_string()),
        }
    }
}
