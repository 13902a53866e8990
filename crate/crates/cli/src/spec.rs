//! The JSON run specification.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use coherent_age::copulas::{Copula, CopulaFamily};
use coherent_age::montecarlo::{SimConfig, DEFAULT_SIM_POINTS};
use coherent_age::orders::{Grid, Relation, DEFAULT_GRID_SIZE};
use coherent_age::verifier::VerifyConfig;
use coherent_age::{Distribution, Structure, System};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub n: usize,
    /// Minimal path sets, 1-based. Mutually exclusive with `k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<Vec<Vec<usize>>>,
    /// Shorthand for a `k`-out-of-`n` structure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default = "independence")]
    pub copula: CopulaFamily,
    pub margin: Distribution,
}

fn independence() -> CopulaFamily {
    CopulaFamily::Independence
}

impl SystemSpec {
    pub fn structure(&self) -> Result<Structure> {
        Ok(match (&self.paths, self.k) {
            (Some(paths), None) => Structure::new(self.n, paths.clone())?,
            (None, Some(k)) => Structure::k_out_of_n(k, self.n)?,
            _ => bail!("a system needs exactly one of `paths` or `k`"),
        })
    }

    pub fn build(&self) -> Result<System> {
        Ok(System::new(
            self.structure()?,
            Copula::new(self.copula, self.n)?,
            self.margin,
        )?)
    }

    /// `k` when the structure is `k`-out-of-`n`.
    pub fn k_out_of_n(&self) -> Result<Option<usize>> {
        if let Some(k) = self.k {
            return Ok(Some(k));
        }
        let s = self.structure()?;
        let k = s.paths()[0].len();
        Ok((Structure::k_out_of_n(k, self.n)? == s).then_some(k))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_grid_size")]
    pub p_size: usize,
    #[serde(default = "default_grid_size")]
    pub x_size: usize,
    #[serde(default = "default_eps")]
    pub eps_endpoint: f64,
    /// Explicit x grid; replaces the log-spaced default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_points: Option<Vec<f64>>,
}

fn default_grid_size() -> usize {
    DEFAULT_GRID_SIZE
}

fn default_eps() -> f64 {
    1e-3
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            p_size: DEFAULT_GRID_SIZE,
            x_size: DEFAULT_GRID_SIZE,
            eps_endpoint: default_eps(),
            x_points: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub tol: f64,
    pub derivative_tol: f64,
    pub sign_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let v = VerifyConfig::default();
        Tolerances {
            tol: v.tol,
            derivative_tol: v.derivative_tol,
            sign_slack: v.sign_slack,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Written to stdout when absent.
    #[serde(default)]
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    #[serde(default = "default_samples")]
    pub sample_count: usize,
    pub seed: u64,
    #[serde(default = "default_streams")]
    pub stream_count: usize,
    #[serde(default = "default_sim_points")]
    pub grid_points: usize,
}

fn default_samples() -> usize {
    SimConfig::default().sample_count
}

fn default_streams() -> usize {
    SimConfig::default().stream_count
}

fn default_sim_points() -> usize {
    DEFAULT_SIM_POINTS
}

impl Default for SimulationSpec {
    fn default() -> Self {
        let c = SimConfig::default();
        SimulationSpec {
            sample_count: c.sample_count,
            seed: c.seed,
            stream_count: c.stream_count,
            grid_points: DEFAULT_SIM_POINTS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorollarySpec {
    pub k: usize,
    pub n: usize,
    pub l: usize,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub system1: SystemSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system2: Option<SystemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<Relation>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corollary: Option<CorollarySpec>,
}

/// Command-line overrides applied on top of the spec file.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub grid_size: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub eps_endpoint: Option<f64>,
}

/// A parsed spec together with the SHA-256 of its bytes.
#[derive(Clone, Debug)]
pub struct LoadedSpec {
    pub spec: RunSpec,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

impl LoadedSpec {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let spec: RunSpec = serde_json::from_slice(bytes).context("invalid run spec")?;
        spec.system1.structure().context("system1")?;
        if let Some(s) = &spec.system2 {
            s.structure().context("system2")?;
        }
        Ok(LoadedSpec {
            spec,
            sha256: sha256_hex(bytes),
        })
    }

    pub fn apply(&mut self, o: &Overrides) {
        let s = &mut self.spec;
        if let Some(n) = o.grid_size {
            s.grid.p_size = n;
            s.grid.x_size = n;
        }
        if let Some(t) = o.tol {
            s.tolerances.tol = t;
        }
        if let Some(e) = o.eps_endpoint {
            s.grid.eps_endpoint = e;
        }
        if let Some(seed) = o.seed {
            s.simulation.get_or_insert_with(SimulationSpec::default).seed = seed;
        }
    }
}

impl RunSpec {
    pub fn system2(&self) -> Result<&SystemSpec> {
        self.system2
            .as_ref()
            .context("this command needs a `system2` block")
    }

    pub fn relation(&self) -> Result<Relation> {
        self.relation.context("this command needs a `relation`")
    }

    pub fn p_grid(&self) -> Result<Grid> {
        Ok(Grid::unit_interval(self.grid.eps_endpoint, self.grid.p_size)?)
    }

    pub fn x_grid(&self, x: &Distribution, y: &Distribution) -> Result<Grid> {
        Ok(match &self.grid.x_points {
            Some(points) => Grid::custom(points.clone())?,
            None => Grid::for_margins(x, y, self.grid.x_size)?,
        })
    }

    pub fn verify_config(&self) -> Result<VerifyConfig> {
        let x_grid = match &self.grid.x_points {
            Some(points) => Some(Grid::custom(points.clone())?),
            None => None,
        };
        Ok(VerifyConfig {
            eps_endpoint: self.grid.eps_endpoint,
            p_grid_size: self.grid.p_size,
            x_grid_size: self.grid.x_size,
            x_grid,
            tol: self.tolerances.tol,
            derivative_tol: self.tolerances.derivative_tol,
            sign_slack: self.tolerances.sign_slack,
        })
    }

    pub fn simulation(&self) -> SimulationSpec {
        self.simulation.clone().unwrap_or_default()
    }
}
