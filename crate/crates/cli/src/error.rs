use std::fmt;

use dyngibbs::Error as CoreError;

/// Problems found while reading an input document.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{what}: line {line}, column {column}: {msg}")]
    Json {
        what: String,
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("{field}: expected {expected} entries, got {got}")]
    BadArity {
        field: String,
        expected: usize,
        got: usize,
    },
    #[error("edge ({u}, {v}): potential matrix is not symmetric")]
    AsymmetricEdge { u: u64, v: u64 },
    #[error("{field}: {msg}")]
    Invalid { field: String, msg: String },
    #[error("update stream line {line}: {msg}")]
    InvalidBatch { line: usize, msg: String },
}

impl FormatError {
    pub(crate) fn json(what: &str, e: serde_json::Error) -> Self {
        Self::Json {
            what: what.to_string(),
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        }
    }
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Usage = 1,
    Parse = 2,
    Regime = 3,
    Verification = 4,
}

impl ExitKind {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// An error that carries its own exit status.
#[derive(Debug, thiserror::Error)]
pub struct Failure {
    pub kind: ExitKind,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub fn fail(kind: ExitKind, message: impl Into<String>) -> anyhow::Error {
    Failure {
        kind,
        message: message.into(),
    }
    .into()
}

/// Exit status for an error chain: the first classified cause wins,
/// otherwise usage.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(f) = cause.downcast_ref::<Failure>() {
            return f.kind.code();
        }
        if cause.downcast_ref::<FormatError>().is_some() {
            return ExitKind::Parse.code();
        }
        if let Some(e) = cause.downcast_ref::<CoreError>() {
            return match e {
                CoreError::InfeasibleInstance(_)
                | CoreError::InfeasibleNeighborhood(_)
                | CoreError::RegimeViolation(_) => ExitKind::Regime.code(),
                _ => ExitKind::Usage.code(),
            };
        }
    }
    ExitKind::Usage.code()
}
