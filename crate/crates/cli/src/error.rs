use std::fmt;

/// Failures of a CLI run, each mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Core(dc1lab::Error),
    /// Malformed JSON input.
    Json { source: String, line: usize, column: usize, message: String },
    Usage(String),
    Io(String),
}

impl CliError {
    /// 2 for bad input or violated preconditions, 3 for budget limits,
    /// 1 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_budget() => 3,
            CliError::Core(_) | CliError::Json { .. } | CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Json { source, line, column, message } => {
                write!(f, "malformed JSON in {source} at line {line}, column {column}: {message}")
            }
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<dc1lab::Error> for CliError {
    fn from(e: dc1lab::Error) -> Self {
        CliError::Core(e)
    }
}
