use qsum_core::adversary::AttackError;
use qsum_core::ProtocolError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serialize(String),
}

impl HarnessError {
    /// Process exit code: 2 for bad input, 3 for backend capacity, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::InvalidConfig(_) => 2,
            HarnessError::Capacity(_) => 3,
            HarnessError::Io(_) | HarnessError::Serialize(_) => 1,
        }
    }
}

impl From<ProtocolError> for HarnessError {
    fn from(e: ProtocolError) -> Self {
        match e {
            e if e.is_capacity() => HarnessError::Capacity(e.to_string()),
            ProtocolError::InvalidConfig(msg) => HarnessError::InvalidConfig(msg),
            e => HarnessError::InvalidConfig(e.to_string()),
        }
    }
}

impl From<AttackError> for HarnessError {
    fn from(e: AttackError) -> Self {
        match e {
            AttackError::Protocol(p) => p.into(),
            other => HarnessError::InvalidConfig(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Serialize(e.to_string())
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Serialize(e.to_string())
    }
}
