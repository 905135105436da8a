use crate::error::CliError;
use gaugepeps::exact::{HamiltonianKind, HamiltonianParams};
use gaugepeps::fpeps::{SiteParamsRecord, SiteTensorParams};
use gaugepeps::lattice::{Boundary, LatticeGeometry};
use gaugepeps::sampler::ChainConfig;
use gaugepeps::spectra::DEFAULT_CAP;
use serde::Deserialize;
use std::path::Path;

/// Everything an experiment reads; every section has defaults.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional guard: must match the subcommand when present.
    pub kind: Option<String>,
    pub seed: u64,
    /// Z_N modulus of the link fields.
    pub modulus: usize,
    pub geometry: GeometryConfig,
    pub hamiltonian: HamiltonianConfig,
    pub tensor: SiteParamsRecord,
    pub chain: ChainConfig,
    pub exact: ExactConfig,
    pub trotter: TrotterConfig,
    pub dualize: DualizeConfig,
    pub mc: McConfig,
    pub scan: ScanConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: None,
            seed: 0,
            modulus: 3,
            geometry: GeometryConfig::default(),
            hamiltonian: HamiltonianConfig::default(),
            tensor: SiteParamsRecord { t: 0.8, y_re: 0.3, y_im: -0.2, z_re: -0.4, z_im: 0.5, eta_p_index: 0 },
            chain: ChainConfig::default(),
            exact: ExactConfig::default(),
            trotter: TrotterConfig::default(),
            dualize: DualizeConfig::default(),
            mc: McConfig::default(),
            scan: ScanConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub width: usize,
    pub height: usize,
    pub boundary: Boundary,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self { width: 2, height: 2, boundary: Boundary::Open }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub mass: f64,
    pub hopping: f64,
    pub coupling: f64,
}

impl Default for HamiltonianConfig {
    fn default() -> Self {
        Self { mass: 0.5, hopping: 1.0, coupling: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermSet {
    Fermion,
    FermionGauged,
    KogutSusskind,
    Full,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExactConfig {
    pub terms: TermSet,
    /// Lowest physical-sector levels to report.
    pub levels: usize,
    /// Largest physical sector diagonalized densely.
    pub max_sector: usize,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self { terms: TermSet::Full, levels: 6, max_sector: 2000 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrotterConfig {
    pub time: f64,
    pub steps: Vec<usize>,
}

impl Default for TrotterConfig {
    fn default() -> Self {
        Self { time: 1.0, steps: vec![8, 16, 32, 64] }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DualizeConfig {
    /// Random physical states fed to the unitary gauge.
    pub states: usize,
}

impl Default for DualizeConfig {
    fn default() -> Self {
        Self { states: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum McMode {
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    pub mode: McMode,
    /// Wilson loops `[w, h]` anchored at the origin.
    pub loops: Vec<[usize; 2]>,
    /// Lengths of horizontal meson strings starting at the origin.
    pub mesons: Vec<usize>,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { mode: McMode::Discrete, loops: vec![[1, 1]], mesons: vec![1] }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    /// Cylinder circumference.
    pub ny: usize,
    /// Values of `t`; the other tensor parameters come from `[tensor]`.
    pub t: Vec<f64>,
    pub cap: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { ny: 2, t: vec![0.0, 0.5, 1.0], cap: DEFAULT_CAP }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<String>,
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn geometry(&self) -> Result<LatticeGeometry, CliError> {
        let g = &self.geometry;
        Ok(LatticeGeometry::new(g.width, g.height, g.boundary)?)
    }

    pub fn hamiltonian_params(&self) -> HamiltonianParams {
        let h = &self.hamiltonian;
        HamiltonianParams { mass: h.mass, hopping: h.hopping, coupling: h.coupling }
    }

    pub fn hamiltonian_kind(&self) -> HamiltonianKind {
        match self.exact.terms {
            TermSet::Fermion => HamiltonianKind::Fermion,
            TermSet::FermionGauged => HamiltonianKind::FermionGauged,
            TermSet::KogutSusskind => HamiltonianKind::KogutSusskind,
            TermSet::Full => HamiltonianKind::Full,
        }
    }

    pub fn tensor_params(&self) -> Result<SiteTensorParams, CliError> {
        Ok(SiteTensorParams::try_from(self.tensor)?)
    }

    /// Checks every precondition that does not need a computation.
    pub fn validate(&self, kind: &str) -> Result<(), CliError> {
        if let Some(k) = &self.kind {
            if k != kind {
                return Err(CliError::Config(format!("config is for `{k}`, subcommand is `{kind}`")));
            }
        }
        if self.modulus < 2 {
            return Err(CliError::Config(format!("modulus must be at least 2, got {}", self.modulus)));
        }
        self.geometry()?;
        self.tensor_params()?;
        let h = &self.hamiltonian;
        if ![h.mass, h.hopping, h.coupling].iter().all(|x| x.is_finite()) {
            return Err(CliError::Config("hamiltonian parameters must be finite".into()));
        }
        match kind {
            "trotter" => {
                if !self.trotter.time.is_finite() || self.trotter.steps.len() < 2 || self.trotter.steps.contains(&0) {
                    return Err(CliError::Config("trotter needs a finite time and at least two positive step counts".into()));
                }
            }
            "mc" => self.chain.validate()?,
            "transfer-scan" => {
                if self.scan.t.is_empty() || self.scan.t.iter().any(|t| !t.is_finite() || *t < 0.0) {
                    return Err(CliError::Config("scan.t must be a nonempty list of finite, non-negative values".into()));
                }
                if self.scan.ny < 2 {
                    return Err(CliError::Config(format!("scan.ny must be at least 2, got {}", self.scan.ny)));
                }
            }
            _ => {}
        }
        Ok(())
    }
}
