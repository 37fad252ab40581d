use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigensolver did not converge for state {state} after {iterations} iterations")]
    EigenNoConvergence { state: usize, iterations: usize },

    #[error("tridiagonal solve failed at row {row} (step {step})")]
    SingularSystem { row: usize, step: usize },

    #[error("non-finite value encountered at step {step}")]
    NonFinite { step: usize },

    #[error("kernel sampled at dt = {table} but propagation uses dt = {propagation}; resample the table")]
    KernelResample { table: f64, propagation: f64 },

    #[error("jerk estimate is dominated by noise (relative spread {spread:.3e}); use the harmonic Abraham-Lorentz closure")]
    NoisyJerk { spread: f64 },

    #[error("insufficient spectral resolution: {0}")]
    InsufficientResolution(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    /// `line` is 0 for problems that belong to the file as a whole.
    #[error("{path}{}: {message}", line_suffix(*line))]
    Config {
        path: String,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Errors caught while validating input, as opposed to failures during
    /// the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::Config { .. }
                | Error::KernelResample { .. }
                | Error::Empty(_)
        )
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

fn line_suffix(line: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!(":{line}")
    }
}

pub type Result<T> = std::result::Result<T, Error>;
