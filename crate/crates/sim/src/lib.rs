//! Monte Carlo sweeps, file formats and the `cc-miso` command line on top
//! of [`cc_miso_core`].

pub mod dump;
pub mod harness;
pub mod plot;
pub mod table;

use cc_miso_core::Scheme;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] cc_miso_core::Error),
    #[error("scheme {0} is not part of the result")]
    MissingScheme(u8),
    #[error("trial {trial} hit a degenerate channel on every one of {attempts} draws")]
    Redraws { trial: u64, attempts: u32 },
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("malformed table: {0}")]
    Parse(String),
}

impl HarnessError {
    fn missing(scheme: Scheme) -> Self {
        Self::MissingScheme(scheme.number())
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// `10^(db/10)`
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
