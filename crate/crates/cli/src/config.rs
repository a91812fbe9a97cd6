//! Run configuration: one TOML file with sectioned tables.
//!
//! Angles are multiples of pi, times multiples of `T`. All randomness
//! derives from the top-level `seed`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use dtc4::evolution::{Splitting, TimeSampling, TrotterSchedule};
use dtc4::noise::{NoiseModel, DEFAULT_NOISY_DT_FRACTION, DEFAULT_SHOTS, DEFAULT_TWO_QUBIT_RATIO};
use dtc4::recompile::{OptimizerConfig, DEFAULT_LAYERS};
use dtc4::{DisorderSpec, ModelParams, ModelSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must match the subcommand when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub model: ModelSpec,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disorder: Option<DisorderSpec>,
    #[serde(default)]
    pub evolve: EvolveConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub floquet: FloquetConfig,
    #[serde(default)]
    pub recompile: RecompileConfig,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    #[serde(rename = "dt_over_T")]
    pub dt_over_t: f64,
    pub sampling: TimeSampling,
    pub splitting: Splitting,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            dt_over_t: 0.01,
            sampling: TimeSampling::StepStart,
            splitting: Splitting::FirstOrder,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub n_periods: usize,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig { n_periods: 20 }
    }
}

/// Either an explicit list or `n` evenly spaced values from `start` to `stop` inclusive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, n: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Grid::List(ref v) => v.clone(),
            Grid::Range { start, stop, n } => match n {
                0 => Vec::new(),
                1 => vec![start],
                _ => (0..n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(rename = "JT_over_pi")]
    pub jt_over_pi: Grid,
    #[serde(rename = "hT_over_pi")]
    pub ht_over_pi: Grid,
    #[serde(default = "default_periods")]
    pub n_periods: usize,
}

fn default_periods() -> usize {
    20
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FloquetConfig {
    /// Rung counts of the finite-size scaling table; empty skips it.
    #[serde(rename = "N0_list")]
    pub n0_list: Vec<usize>,
    /// Window half-width of `s_pi/2`, in units of `pi/T`.
    pub delta_over_pi: f64,
    /// Quadruplet tolerance in units of `pi/(2T)`.
    pub quadruplet_tolerance: f64,
}

impl Default for FloquetConfig {
    fn default() -> Self {
        FloquetConfig {
            n0_list: Vec::new(),
            delta_over_pi: 0.05,
            quadruplet_tolerance: 0.02,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecompileConfig {
    pub k_max: usize,
    pub n_layers: usize,
}

impl Default for RecompileConfig {
    fn default() -> Self {
        RecompileConfig {
            k_max: 20,
            n_layers: DEFAULT_LAYERS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    /// Single-qubit error rate of the paired comparison.
    pub r1: f64,
    /// Two-qubit error rate; `ratio * r1` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r2: Option<f64>,
    /// Readout calibration file; perfect readout when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<PathBuf>,
    /// Single-qubit error rates of the Trotter threshold study.
    pub rates: Vec<f64>,
    pub n_shots: usize,
    pub n_periods: usize,
    /// Trotter step of the noisy circuits, in units of `T`.
    #[serde(rename = "dt_over_T")]
    pub dt_over_t: f64,
    /// Parameter table written by `recompile`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            r1: 1e-3,
            r2: None,
            calibration: None,
            rates: vec![1e-4, 1e-3, 1e-2],
            n_shots: DEFAULT_SHOTS,
            n_periods: 20,
            dt_over_t: DEFAULT_NOISY_DT_FRACTION,
            table: None,
        }
    }
}

/// Parses `text`, reporting the dotted path of the offending field.
pub fn parse(text: &str) -> Result<RunConfig> {
    let value: toml::Value = toml::from_str::<toml::Table>(text)
        .context("config is not valid TOML")?
        .into();
    let cfg: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        anyhow::anyhow!("config field `{path}`: {}", e.into_inner())
    })?;
    Ok(cfg)
}

pub fn load(path: &Path) -> Result<(RunConfig, String)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let cfg = parse(&text).with_context(|| format!("in {}", path.display()))?;
    Ok((cfg, text))
}

fn field<T>(path: &str, r: dtc4::Result<T>) -> Result<T> {
    r.map_err(|e| anyhow::anyhow!("config field `{path}`: {e}"))
}

fn positive_periods(path: &str, n: usize) -> Result<()> {
    if n < 8 || n % 4 != 0 {
        bail!("config field `{path}`: spectra need a multiple of 4 periods, at least 8 (got {n})");
    }
    Ok(())
}

impl RunConfig {
    pub fn params(&self) -> Result<ModelParams<f64>> {
        field("model", self.model.to_params())
    }

    pub fn schedule(&self) -> Result<TrotterSchedule<f64>> {
        Ok(field(
            "schedule.dt_over_T",
            TrotterSchedule::new(self.model.period, self.schedule.dt_over_t * self.model.period),
        )?
        .with_sampling(self.schedule.sampling)
        .with_splitting(self.schedule.splitting))
    }

    /// Disorder with its seed taken from the master seed.
    pub fn disorder(&self) -> Result<Option<DisorderSpec>> {
        let Some(d) = &self.disorder else {
            return Ok(None);
        };
        let mut d = d.clone();
        d.seed = self.seed;
        field("disorder", d.validate())?;
        Ok(Some(d))
    }

    pub fn optimizer(&self) -> Result<OptimizerConfig> {
        let mut o = self.optimizer.clone();
        o.seed = self.seed;
        field("optimizer", o.validate())?;
        Ok(o)
    }

    pub fn noise_model(&self, base: &Path) -> Result<NoiseModel> {
        let n = &self.noise;
        let mut model = NoiseModel {
            r1: n.r1,
            r2: n.r2.unwrap_or(DEFAULT_TWO_QUBIT_RATIO * n.r1),
            readout: Vec::new(),
        };
        if let Some(path) = &n.calibration {
            let path = resolve(base, path);
            let file = std::fs::File::open(&path)
                .with_context(|| format!("config field `noise.calibration`: opening {}", path.display()))?;
            model.readout = field(
                "noise.calibration",
                dtc4::noise::read_calibration(std::io::BufReader::new(file)),
            )?;
        }
        field("noise", model.validate())?;
        Ok(model)
    }

    /// Checks the fields `command` reads.
    pub fn validate_for(&self, command: &str) -> Result<()> {
        if let Some(c) = &self.command {
            if c != command {
                bail!("config field `command`: config is for `{c}`, invoked as `{command}`");
            }
        }
        if self.disorder.as_ref().is_some_and(|d| d.seed != 0) {
            bail!("config field `disorder.seed`: set the top-level `seed` instead");
        }
        if self.optimizer.seed != 0 {
            bail!("config field `optimizer.seed`: set the top-level `seed` instead");
        }
        self.params()?;
        self.schedule()?;
        self.disorder()?;
        match command {
            "evolve" => positive_periods("evolve.n_periods", self.evolve.n_periods)?,
            "phase-diagram" => {
                let Some(s) = &self.sweep else {
                    bail!("config field `sweep`: missing [sweep] table");
                };
                positive_periods("sweep.n_periods", s.n_periods)?;
                for (name, g) in [
                    ("sweep.JT_over_pi", &s.jt_over_pi),
                    ("sweep.hT_over_pi", &s.ht_over_pi),
                ] {
                    let v = g.values();
                    if v.is_empty() {
                        bail!("config field `{name}`: empty grid");
                    }
                    if v.iter().any(|x| !x.is_finite()) {
                        bail!("config field `{name}`: grid values must be finite");
                    }
                }
            }
            "floquet" => {
                let f = &self.floquet;
                if !(f.delta_over_pi > 0.0 && f.delta_over_pi < 0.25) {
                    bail!("config field `floquet.delta_over_pi`: must lie in (0, 0.25)");
                }
                if !(f.quadruplet_tolerance > 0.0 && f.quadruplet_tolerance.is_finite()) {
                    bail!("config field `floquet.quadruplet_tolerance`: must be positive");
                }
            }
            "recompile" => {
                if self.recompile.k_max == 0 {
                    bail!("config field `recompile.k_max`: need at least one step");
                }
                if self.recompile.n_layers == 0 {
                    bail!("config field `recompile.n_layers`: need at least one layer");
                }
                self.optimizer()?;
            }
            "noisy" => {
                let n = &self.noise;
                positive_periods("noise.n_periods", n.n_periods)?;
                if n.n_shots == 0 {
                    bail!("config field `noise.n_shots`: need at least one shot");
                }
                if n.rates
                    .iter()
                    .any(|r| !(0.0..1.0).contains(r) || !(DEFAULT_TWO_QUBIT_RATIO * r < 1.0))
                {
                    bail!("config field `noise.rates`: every rate r needs 0 <= r and 10 r < 1");
                }
                field(
                    "noise.dt_over_T",
                    TrotterSchedule::new(self.model.period, n.dt_over_t * self.model.period),
                )?;
                if n.table.is_none() {
                    bail!("config field `noise.table`: missing; point it at the parameter table written by `dtc4 recompile`");
                }
            }
            other => bail!("unknown command `{other}`"),
        }
        Ok(())
    }
}

/// `path` relative to the config file's directory unless absolute.
pub fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}
