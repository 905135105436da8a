use gaugepeps::dualizer::DualizerError;
use gaugepeps::exact::ExactError;
use gaugepeps::fpeps::toy::ToyError;
use gaugepeps::fpeps::FpepsError;
use gaugepeps::lattice::LatticeError;
use gaugepeps::sampler::SamplerError;
use gaugepeps::spectra::SpectraError;
use std::process::ExitCode;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Resource(_) => 3,
        })
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::DimensionCap { .. } => CliError::Resource(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<SpectraError> for CliError {
    fn from(e: SpectraError) -> Self {
        match e {
            SpectraError::TooLarge { .. } => CliError::Resource(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<SamplerError> for CliError {
    fn from(e: SamplerError) -> Self {
        match e {
            SamplerError::TooManyConfigurations(..) => CliError::Resource(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<DualizerError> for CliError {
    fn from(e: DualizerError) -> Self {
        match e {
            DualizerError::Exact(x) => x.into(),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<ToyError> for CliError {
    fn from(e: ToyError) -> Self {
        match e {
            ToyError::Exact(x) => x.into(),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<FpepsError> for CliError {
    fn from(e: FpepsError) -> Self {
        match e {
            FpepsError::TooManyModes(..) => CliError::Resource(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        CliError::Config(e.to_string())
    }
}
