//! Experiment configuration files.

use std::fs;
use std::path::{Path, PathBuf};

use morh2w_core::reducers::{FwhmorOptions, FwitiaMode, Method, SylvesterPath};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{HarnessError, Result};
use crate::weights::check_band;

/// Source of an input or output weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    #[default]
    Identity,
    File { path: PathBuf },
    Bandpass { half_order: usize, lo: f64, hi: f64 },
    /// `(I + PK)⁻¹`, where `K` is the system being reduced (a controller)
    /// and `P` is read from `loop_plant`.
    InputSensitivity { loop_plant: PathBuf },
    /// `(I + PK)⁻¹P`.
    OutputSensitivity { loop_plant: PathBuf },
}

/// Starting reduced model for the iterative methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSpec {
    /// Projection onto the slowest modes of the plant.
    #[default]
    Modal,
    /// Weighted balanced truncation of the plant.
    Balanced,
    /// Random stable model drawn from the experiment seed.
    Random,
    /// A model file; only usable for the order it has.
    File { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SylvesterSpec {
    Schur,
    ShiftedSolves,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FwitiaModeSpec {
    Robust,
    Correction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptionsSpec {
    pub max_iters: usize,
    pub pole_tol: f64,
    pub stall_window: usize,
    pub use_xbar_criterion: bool,
    pub use_e_criterion: bool,
    pub sylvester: SylvesterSpec,
    pub fwitia_mode: FwitiaModeSpec,
}

impl Default for OptionsSpec {
    fn default() -> Self {
        let d = FwhmorOptions::default();
        OptionsSpec {
            max_iters: d.max_iters,
            pole_tol: d.pole_tol,
            stall_window: d.stall_window,
            use_xbar_criterion: d.use_xbar_criterion,
            use_e_criterion: d.use_e_criterion,
            sylvester: SylvesterSpec::Schur,
            fwitia_mode: FwitiaModeSpec::Robust,
        }
    }
}

impl OptionsSpec {
    pub fn to_options(&self) -> FwhmorOptions {
        FwhmorOptions {
            max_iters: self.max_iters,
            pole_tol: self.pole_tol,
            stall_window: self.stall_window,
            use_xbar_criterion: self.use_xbar_criterion,
            use_e_criterion: self.use_e_criterion,
            record_history: true,
            sylvester: match self.sylvester {
                SylvesterSpec::Schur => SylvesterPath::Schur,
                SylvesterSpec::ShiftedSolves => SylvesterPath::ShiftedSolves,
            },
            fwitia_mode: match self.fwitia_mode {
                FwitiaModeSpec::Robust => FwitiaMode::Robust,
                FwitiaModeSpec::Correction => FwitiaMode::Correction,
            },
        }
    }
}

/// Frequency band and resolution of the error-system sigma sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SigmaSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for SigmaSpec {
    fn default() -> Self {
        SigmaSpec { lo: 1e-2, hi: 1e3, points: 400 }
    }
}

/// One comparison run: every listed method at every listed order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub plant: PathBuf,
    #[serde(default)]
    pub input_weight: WeightSpec,
    #[serde(default)]
    pub output_weight: WeightSpec,
    #[serde(deserialize_with = "de_methods", serialize_with = "ser_methods")]
    pub methods: Vec<Method>,
    pub orders: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
    pub out: PathBuf,
    #[serde(default)]
    pub options: OptionsSpec,
    #[serde(default)]
    pub init: InitSpec,
    #[serde(default)]
    pub sigma: SigmaSpec,
    /// Wall-clock columns make outputs run-dependent, so they are opt-in.
    #[serde(default)]
    pub record_timings: bool,
}

fn de_methods<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Method>, D::Error> {
    let names = Vec::<String>::deserialize(d)?;
    names.iter().map(|n| n.parse::<Method>().map_err(serde::de::Error::custom)).collect()
}

fn ser_methods<S: serde::Serializer>(methods: &[Method], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(methods.iter().map(|m| m.as_str()))
}

impl ExperimentConfig {
    /// Parse and validate; paths are left as written.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| HarnessError::Parse {
            path: origin.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read, validate and resolve a config file; relative paths are taken
    /// against the file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let cfg = Self::parse(&text, path)?;
        cfg.resolve(path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.methods.is_empty() {
            return bad("at least one method is required".into());
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return bad(format!("method {m} listed twice"));
            }
        }
        if self.orders.is_empty() || self.orders[0] == 0 {
            return bad("orders must be a nonempty list of positive integers".into());
        }
        if self.orders.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("orders must be strictly ascending, got {:?}", self.orders));
        }
        for w in [&self.input_weight, &self.output_weight] {
            if let WeightSpec::Bandpass { half_order, lo, hi } = w {
                check_band(*lo, *hi)?;
                if *half_order == 0 {
                    return bad("band-pass half_order must be at least 1".into());
                }
            }
        }
        check_band(self.sigma.lo, self.sigma.hi)?;
        if self.sigma.points < 2 {
            return bad("sigma sweep needs at least 2 points".into());
        }
        self.options.to_options().validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(())
    }

    /// Expand `${VAR}` references and anchor relative paths at `base`.
    pub fn resolve(mut self, base: &Path) -> Result<Self> {
        let fix = |p: &mut PathBuf| -> Result<()> {
            let expanded = PathBuf::from(expand_env(&p.to_string_lossy())?);
            *p = if expanded.is_absolute() { expanded } else { base.join(expanded) };
            Ok(())
        };
        fix(&mut self.plant)?;
        fix(&mut self.out)?;
        for w in [&mut self.input_weight, &mut self.output_weight] {
            match w {
                WeightSpec::File { path } => fix(path)?,
                WeightSpec::InputSensitivity { loop_plant } | WeightSpec::OutputSensitivity { loop_plant } => fix(loop_plant)?,
                _ => {}
            }
        }
        if let InitSpec::File { path } = &mut self.init {
            fix(path)?;
        }
        Ok(self)
    }
}

fn expand_env(s: &str) -> Result<String> {
    let mut out = String::new();
    let mut rest = s;
    while let Some(start) = rest.find("${") {
        out.push_str(&rest[..start]);
        let end = rest[start..]
            .find('}')
            .ok_or_else(|| HarnessError::Config(format!("unterminated variable reference in '{s}'")))?;
        let name = &rest[start + 2..start + end];
        let val = std::env::var(name)
            .map_err(|_| HarnessError::Config(format!("environment variable {name} is not set (needed by '{s}')")))?;
        out.push_str(&val);
        rest = &rest[start + end + 1..];
    }
    out.push_str(rest);
    Ok(out)
}
