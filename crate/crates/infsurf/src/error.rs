use std::io;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unknown experiment `{0}` (see `repro list`)")]
    UnknownExperiment(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("surface file: {0}")]
    SurfaceFile(String),
    #[error(transparent)]
    Core(#[from] infsurf_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("report serialization: {0}")]
    Toml(#[from] toml::ser::Error),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::UnknownExperiment(_) => "ElX01",
            CliError::BadParams(_) => "ElX02",
            CliError::SurfaceFile(_) => "ElX03",
            CliError::Core(e) => e.code(),
            CliError::Io(_) | CliError::Csv(_) | CliError::Toml(_) => "ElX04",
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
