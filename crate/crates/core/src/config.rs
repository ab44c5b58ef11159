//! JSON configuration of solutions and verification runs.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::double::{self, DoubleWaveSolution};
use crate::error::{Error, Result};
use crate::mhd::{FluidModel, State, Vec3};
use crate::simple::{self, SimpleWaveSolution};
use crate::verify::GridSpec;
use crate::wave::Solution;

pub const SIMPLE_FAMILIES: [&str; 6] = ["E1", "E2", "E3", "A", "F_ortho", "S_parallel"];
pub const DOUBLE_FAMILIES: [&str; 11] = [
    "E1E1_aligned",
    "EE_2a",
    "EE_2b",
    "AA",
    "AE1",
    "FF_planar",
    "FF_counter",
    "FF_kappa2",
    "FE1_counter",
    "FE1_kappa2",
    "FE1_perp_kappa2",
];

/// A family tag with its scalar constants and profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionConfig {
    pub family: String,
    #[serde(default)]
    pub constants: Map<String, Value>,
    #[serde(default)]
    pub profiles: Map<String, Value>,
}

fn is_profile(v: &Value) -> bool {
    match v {
        Value::Object(_) => true,
        Value::Array(a) => a.iter().any(|x| x.is_object() || x.is_array()) && !a.iter().all(|x| x.is_number()),
        _ => false,
    }
}

impl SolutionConfig {
    /// Split a parameter struct into constants and profiles.
    pub fn from_params<P: Serialize>(family: &str, params: &P) -> Result<Self> {
        let Value::Object(map) = serde_json::to_value(params)? else {
            return Err(Error::Config("parameters must serialize to an object".into()));
        };
        let mut cfg = Self { family: family.to_string(), constants: Map::new(), profiles: Map::new() };
        for (k, v) in map {
            if is_profile(&v) {
                cfg.profiles.insert(k, v);
            } else {
                cfg.constants.insert(k, v);
            }
        }
        Ok(cfg)
    }

    fn params<P: DeserializeOwned>(&self) -> Result<P> {
        let mut all = self.constants.clone();
        for (k, v) in &self.profiles {
            if all.insert(k.clone(), v.clone()).is_some() {
                return Err(Error::Config(format!("{k} given both as constant and profile")));
            }
        }
        serde_json::from_value(Value::Object(all)).map_err(|e| Error::Config(format!("{}: {e}", self.family)))
    }

    /// Construct the solution named by `family`.
    pub fn build(&self) -> Result<Built> {
        use Built::{Double as D, Simple as S};
        let f = self.family.as_str();
        // parameter errors are input errors; everything after is construction
        let built = match f {
            "E1" => S(SimpleWaveSolution::entropic_e1(self.params::<simple::E1Params>()?)?),
            "E2" => S(SimpleWaveSolution::entropic_e2(self.params::<simple::E2Params>()?)?),
            "E3" => S(SimpleWaveSolution::entropic_e3(self.params::<simple::E3Params>()?)?),
            "A" => S(SimpleWaveSolution::alfven(self.params::<simple::AlfvenParams>()?)?),
            "F_ortho" => S(SimpleWaveSolution::fast_ortho(self.params::<simple::FastOrthoParams>()?)?),
            "S_parallel" => S(SimpleWaveSolution::slow_parallel(self.params::<simple::SlowParallelParams>()?)?),
            "E1E1_aligned" => D(DoubleWaveSolution::ee_aligned(self.params::<double::EeAlignedParams>()?)?),
            "EE_2a" => D(DoubleWaveSolution::ee_perp_a(self.params::<double::EePerpAParams>()?)?),
            "EE_2b" => D(DoubleWaveSolution::ee_perp_b(self.params::<double::EePerpBParams>()?)?),
            "AA" => D(DoubleWaveSolution::aa(self.params::<double::AaParams>()?)?),
            "AE1" => D(DoubleWaveSolution::ae1(self.params::<double::Ae1Params>()?)?),
            "FF_planar" => D(DoubleWaveSolution::ff_planar(self.params::<double::FfPlanarParams>()?)?),
            "FF_counter" => D(DoubleWaveSolution::ff_counter(self.params::<double::FfCounterParams>()?)?),
            "FF_kappa2" => D(DoubleWaveSolution::ff_kappa2(self.params::<double::FfKappa2Params>()?)?),
            "FE1_counter" => D(DoubleWaveSolution::fe1_counter(self.params::<double::Fe1CounterParams>()?)?),
            "FE1_kappa2" => D(DoubleWaveSolution::fe1_kappa2(self.params::<double::Fe1Kappa2Params>()?)?),
            "FE1_perp_kappa2" => {
                D(DoubleWaveSolution::fe1_perp_kappa2(self.params::<double::Fe1PerpKappa2Params>()?)?)
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown family {other}; expected one of {SIMPLE_FAMILIES:?} or {DOUBLE_FAMILIES:?}"
                )))
            }
        };
        Ok(built)
    }
}

/// A constructed simple or double wave.
#[derive(Clone, Debug)]
pub enum Built {
    Simple(SimpleWaveSolution),
    Double(DoubleWaveSolution),
}

impl Built {
    pub fn solution(&self) -> &dyn Solution {
        match self {
            Built::Simple(s) => s,
            Built::Double(d) => d,
        }
    }

    pub fn as_double(&self) -> Option<&DoubleWaveSolution> {
        match self {
            Built::Double(d) => Some(d),
            Built::Simple(_) => None,
        }
    }
}

/// Check names accepted in a verification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Pde,
    #[serde(rename = "divH")]
    DivH,
    Lorentz,
    Vorticity,
    Current,
    Circulation,
    Gmc,
    Rank,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// Minimum convergence order of residuals and closed-form errors.
    pub order: f64,
    /// Residual norm treated as exact.
    pub exact: f64,
    pub gmc: f64,
    /// Maximum drift of the circulation relative to its scale.
    pub circulation: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { order: 1.8, exact: 1e-10, gmc: 1e-6, circulation: 1e-3 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputPaths {
    #[serde(default)]
    pub report: Option<String>,
    #[serde(default)]
    pub csv: Option<String>,
    #[serde(default)]
    pub manifest: Option<String>,
    /// CSV dump of the AE1 beta trajectory.
    #[serde(default)]
    pub beta_csv: Option<String>,
}

/// Input of the `eigen` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenInput {
    pub state: State,
    pub kappa: f64,
    #[serde(default)]
    pub a0: Option<f64>,
    pub lvec: Vec3,
}

impl EigenInput {
    pub fn model(&self) -> FluidModel {
        FluidModel { kappa: self.kappa, a0: self.a0 }
    }
}

fn default_levels() -> Vec<usize> {
    vec![64, 128, 256]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub solution: Option<SolutionConfig>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub checks: Vec<Check>,
    #[serde(default = "default_levels")]
    pub levels: Vec<usize>,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default)]
    pub eigen: Option<EigenInput>,
    /// Amplitude of a non-solenoidal perturbation of `H`, for negative controls.
    #[serde(default)]
    pub perturbation: Option<f64>,
}

impl RunConfig {
    pub fn new(solution: SolutionConfig, grid: GridSpec) -> Self {
        Self {
            solution: Some(solution),
            grid: Some(grid),
            checks: Vec::new(),
            levels: default_levels(),
            thresholds: Thresholds::default(),
            output: OutputPaths::default(),
            eigen: None,
            perturbation: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    pub fn solution(&self) -> Result<&SolutionConfig> {
        self.solution.as_ref().ok_or_else(|| Error::Config("config has no solution".into()))
    }

    pub fn grid(&self) -> Result<&GridSpec> {
        self.grid.as_ref().ok_or_else(|| Error::Config("config has no grid".into()))
    }
}
