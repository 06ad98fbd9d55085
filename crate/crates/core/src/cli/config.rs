use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cgf::GridConfig;
use crate::error::{Error, Result};
use crate::kernel::{Kernel, KernelSpec};
use crate::simulator::{Generator, HawkesModel};

/// How a tail probability is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Tilted importance sampling.
    Is,
    /// Plain Monte Carlo frequency.
    Naive,
    /// Leading saddle-point term.
    Order1,
    /// Leading term plus the first correction.
    #[default]
    Order2,
    /// Gaussian tail at `μt + σ√t y`.
    Clt,
    /// Moderate-deviation form at `μt + σ√t y`.
    Mdp,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Is => "is",
            Method::Naive => "naive",
            Method::Order1 => "order1",
            Method::Order2 => "order2",
            Method::Clt => "clt",
            Method::Mdp => "mdp",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "is" => Method::Is,
            "naive" => Method::Naive,
            "order1" => Method::Order1,
            "order2" => Method::Order2,
            "clt" => Method::Clt,
            "mdp" => Method::Mdp,
            other => return Err(Error::Config(format!("unknown method `{other}`"))),
        })
    }
}

/// Named kernels: `exp` is `e^{−2t}`, `powerlaw` is `(1+t)^{−3}`; both
/// have norm 1/2.
pub fn kernel_preset(name: &str) -> Result<KernelSpec> {
    match name {
        "exp" => Ok(KernelSpec::Exp { alpha: 1.0, beta: 2.0 }),
        "powerlaw" => Ok(KernelSpec::Powerlaw { c: 1.0, p: 3.0 }),
        other => serde_json::from_str(other)
            .map_err(|e| Error::Config(format!("kernel must be `exp`, `powerlaw` or a JSON object: {e}"))),
    }
}

/// Everything a command needs. Loaded from an optional JSON file, then
/// overridden by command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub nu: f64,
    pub kernel: KernelSpec,
    pub method: Method,
    pub t: Option<f64>,
    pub x: Option<f64>,
    pub y: Option<f64>,
    /// Series length for `mdp`; absent selects the cubic form.
    pub m: Option<usize>,
    pub n_paths: u64,
    pub seed: u64,
    pub generator: Generator,
    pub grid: GridConfig,
    /// Table rows.
    pub times: Vec<f64>,
    /// Table column groups.
    pub levels: Vec<f64>,
    /// Ladder depth for `diag`.
    pub depth: usize,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            nu: 1.0,
            kernel: KernelSpec::Exp { alpha: 1.0, beta: 2.0 },
            method: Method::default(),
            t: None,
            x: None,
            y: None,
            m: None,
            n_paths: 100_000,
            seed: 1,
            generator: Generator::default(),
            grid: GridConfig::default(),
            times: vec![5.0, 10.0, 25.0, 40.0, 50.0],
            levels: vec![4.0, 5.0],
            depth: crate::expansion::DEFAULT_DEPTH,
            threads: None,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn model(&self) -> Result<HawkesModel> {
        HawkesModel::new(self.nu, Kernel::try_from(self.kernel)?)
    }

    pub(crate) fn require_t(&self) -> Result<f64> {
        self.t.ok_or_else(|| Error::Config(format!("method `{}` needs --t", self.method.name())))
    }

    pub(crate) fn require_x(&self) -> Result<f64> {
        self.x.ok_or_else(|| Error::Config(format!("method `{}` needs --x", self.method.name())))
    }

    pub(crate) fn require_y(&self) -> Result<f64> {
        self.y.ok_or_else(|| Error::Config(format!("method `{}` needs --y", self.method.name())))
    }
}
