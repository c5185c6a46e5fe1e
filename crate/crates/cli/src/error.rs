use std::fmt;

/// Failure of a command, carrying its process exit status.
#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Io,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Usage => 64,
            ErrorKind::Data => 65,
            ErrorKind::Io => 2,
        }
    }
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Usage, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Data, message: message.into() }
    }

    pub fn io(context: impl fmt::Display, err: std::io::Error) -> Self {
        Self { kind: ErrorKind::Io, message: format!("{context}: {err}") }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<sparsesense::Error> for CliError {
    fn from(err: sparsesense::Error) -> Self {
        use sparsesense::Error as E;
        let kind = match &err {
            E::Argument(_) => ErrorKind::Usage,
            E::Parse { .. } | E::Format { .. } => ErrorKind::Data,
            E::Io(_) => ErrorKind::Io,
        };
        Self { kind, message: err.to_string() }
    }
}

pub type CliResult<T> = Result<T, CliError>;
