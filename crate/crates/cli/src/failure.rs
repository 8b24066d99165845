use std::fmt;

use seqhop::Error;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_NUMERICS: u8 = 4;

/// A command failure with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Param(_)
            | Error::Window { .. }
            | Error::Dimension { .. }
            | Error::Index { .. } => EXIT_CONFIG,
            Error::Io { .. }
            | Error::Format { .. }
            | Error::ShapeMismatch { .. }
            | Error::EmptyInput(_)
            | Error::ZeroNorm => EXIT_IO,
            Error::Numerics { .. }
            | Error::NonFinite(_)
            | Error::DegenerateWeights
            | Error::NoCrossing { .. } => EXIT_NUMERICS,
        };
        let message = match &e {
            Error::Numerics {
                frame: Some(frame), ..
            } => format!("frame {frame}: {e}"),
            _ => e.to_string(),
        };
        Self { code, message }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::io(e.to_string())
    }
}
