//! Flat key-value experiment configuration.
//!
//! The file is TOML restricted to dotted keys:
//!
//! ```text
//! model.kind = "lambda_full"
//! model.gamma = 0.5
//! initial_state = "g1"
//! controls.enabled = true
//! time.t_final = 10.0
//! time.dt = 1e-3
//! time.record_stride = 100
//! sweep.model.gamma = [0.5, 1.0, 2.0]
//! sweep.time.t_final = { start = 1.0, stop = 10.0, step = 1.0 }
//! ```
//!
//! Every scalar key under `model.`, `time.` and `controls.` is a parameter
//! path that a sweep axis may override.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use toml::Value;

use crate::algebra::{ComplexMatrix, KetVector};
use crate::error::{Error, Result};
use crate::lindblad::{DensityMatrix, OpenSystemModel, Schedule, DEFAULT_DT};
use crate::models::{
    build_lambda_effective, build_lambda_full, build_two_atom_effective, build_two_atom_full, lambda, two_atom,
    LambdaParams, ReducedBasis, TwoAtomParams,
};

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Which system and picture to simulate, with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelChoice {
    LambdaFull(LambdaParams),
    LambdaEffective(LambdaParams),
    TwoAtomFull(TwoAtomParams),
    TwoAtomEffective(TwoAtomParams),
}

impl ModelChoice {
    pub fn from_kind(kind: &str) -> Result<Self> {
        match kind {
            "lambda_full" => Ok(Self::LambdaFull(LambdaParams::default())),
            "lambda_effective" => Ok(Self::LambdaEffective(LambdaParams::default())),
            "two_atom_full" => Ok(Self::TwoAtomFull(TwoAtomParams::default())),
            "two_atom_effective" => Ok(Self::TwoAtomEffective(TwoAtomParams::default())),
            other => Err(config_err(format!("unknown model kind '{other}'"))),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::LambdaFull(_) => "lambda_full",
            Self::LambdaEffective(_) => "lambda_effective",
            Self::TwoAtomFull(_) => "two_atom_full",
            Self::TwoAtomEffective(_) => "two_atom_effective",
        }
    }

    pub fn is_effective(&self) -> bool {
        matches!(self, Self::LambdaEffective(_) | Self::TwoAtomEffective(_))
    }

    pub fn build(&self) -> Result<OpenSystemModel> {
        match self {
            Self::LambdaFull(p) => build_lambda_full(p),
            Self::LambdaEffective(p) => build_lambda_effective(p),
            Self::TwoAtomFull(p) => build_two_atom_full(p),
            Self::TwoAtomEffective(p) => build_two_atom_effective(p),
        }
    }

    /// The same parameters in the other picture.
    pub fn counterpart(&self) -> Self {
        match self {
            Self::LambdaFull(p) => Self::LambdaEffective(p.clone()),
            Self::LambdaEffective(p) => Self::LambdaFull(p.clone()),
            Self::TwoAtomFull(p) => Self::TwoAtomEffective(p.clone()),
            Self::TwoAtomEffective(p) => Self::TwoAtomFull(p.clone()),
        }
    }

    pub fn reduced_basis(&self) -> ReducedBasis {
        match self {
            Self::LambdaFull(p) => lambda::lambda_reduced_basis(p, false),
            Self::LambdaEffective(p) => lambda::lambda_reduced_basis(p, true),
            Self::TwoAtomFull(p) => two_atom::two_atom_reduced_basis(p, false),
            Self::TwoAtomEffective(p) => two_atom::two_atom_reduced_basis(p, true),
        }
    }

    pub fn supports_noise(&self) -> bool {
        matches!(self, Self::LambdaFull(_) | Self::LambdaEffective(_))
    }

    /// Decay rate reported in noise scans: γ₁ for every model.
    pub fn gamma(&self) -> f64 {
        match self {
            Self::LambdaFull(p) | Self::LambdaEffective(p) => p.gamma1,
            Self::TwoAtomFull(p) | Self::TwoAtomEffective(p) => p.gamma1,
        }
    }

    /// Sets `model.<name>`.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let kind = self.kind();
        let unknown = || config_err(format!("model '{kind}' has no parameter '{name}'"));
        match self {
            Self::LambdaFull(p) | Self::LambdaEffective(p) => match name {
                "omega0" => p.omega0 = value,
                "theta" => p.theta = value,
                "phi" => p.phi = value,
                "gamma1" => p.gamma1 = value,
                "gamma2" => p.gamma2 = value,
                "gamma" => {
                    p.gamma1 = value;
                    p.gamma2 = value;
                }
                "mu1" => p.mu1 = value,
                "mu2" => p.mu2 = value,
                "eta" => p.eta = value,
                _ => return Err(unknown()),
            },
            Self::TwoAtomFull(p) | Self::TwoAtomEffective(p) => match name {
                "omega0" => p.omega0 = value,
                "omega_mw" => p.omega_mw = value,
                "delta" => p.delta = value,
                "lambda_c" | "lambda" => p.lambda_c = value,
                "kappa" => p.kappa = value,
                "gamma1" | "gamma" => p.gamma1 = value,
                "gamma2" => p.gamma2 = Some(value),
                "gamma2_ratio" => {
                    p.gamma2 = None;
                    p.gamma2_ratio = value;
                }
                "mu1" => p.mu1 = value,
                "mu2" => p.mu2 = value,
                "n_max" => p.n_max = as_count(value, "model.n_max")?,
                _ => return Err(unknown()),
            },
        }
        Ok(())
    }
}

fn as_count(value: f64, key: &str) -> Result<usize> {
    if value >= 0.0 && value.fract() == 0.0 && value < 1e9 {
        Ok(value as usize)
    } else {
        Err(config_err(format!("{key} must be a non-negative integer, got {value}")))
    }
}

/// Starting state of a run.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    /// A named ket of the model, e.g. `g1` or `psi1`.
    Label(String),
    /// Equal mixture of named kets, written `mixture:g1,g2`.
    Mixture(Vec<String>),
    /// Explicit density matrix from `initial_rho.re` / `initial_rho.im`.
    Explicit(ComplexMatrix),
}

impl InitialState {
    pub fn parse(s: &str) -> Self {
        match s.strip_prefix("mixture:") {
            Some(rest) => Self::Mixture(rest.split(',').map(|x| x.trim().to_string()).collect()),
            None => Self::Label(s.trim().to_string()),
        }
    }

    pub fn resolve(&self, model: &OpenSystemModel) -> Result<DensityMatrix> {
        let lookup = |label: &str| -> Result<KetVector> {
            model.state(label).cloned().ok_or_else(|| {
                let known: Vec<&str> = model.named_states().iter().map(|(l, _)| l.as_str()).collect();
                config_err(format!("unknown initial state '{label}' (known: {})", known.join(", ")))
            })
        };
        match self {
            Self::Label(l) => DensityMatrix::pure(&lookup(l)?),
            Self::Mixture(labels) => {
                let kets = labels.iter().map(|l| lookup(l)).collect::<Result<Vec<_>>>()?;
                DensityMatrix::uniform_mixture(&kets)
            }
            Self::Explicit(m) => {
                if m.dim() != model.dim() {
                    return Err(config_err(format!(
                        "initial_rho is {}x{} but the model has dimension {}",
                        m.dim(),
                        m.dim(),
                        model.dim()
                    )));
                }
                DensityMatrix::new(m.clone()).map_err(|e| config_err(format!("initial_rho: {e}")))
            }
        }
    }
}

/// One swept parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepAxis {
    pub path: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelChoice,
    pub initial_state: InitialState,
    pub controls_enabled: bool,
    pub control_gain: f64,
    pub control_cap: Option<f64>,
    pub t_final: f64,
    pub dt: f64,
    pub record_stride: usize,
    pub sweep: Vec<SweepAxis>,
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(model: ModelChoice) -> Self {
        let initial = match model {
            ModelChoice::LambdaFull(_) | ModelChoice::LambdaEffective(_) => "g1",
            ModelChoice::TwoAtomFull(_) | ModelChoice::TwoAtomEffective(_) => "psi1",
        };
        Self {
            model,
            initial_state: InitialState::Label(initial.into()),
            controls_enabled: false,
            control_gain: 1.0,
            control_cap: None,
            t_final: 10.0,
            dt: DEFAULT_DT,
            record_stride: 100,
            sweep: Vec::new(),
            output_dir: None,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let root: toml::Table = text.parse().map_err(|e| config_err(format!("{e}")))?;
        let mut flat = Vec::new();
        let mut sweep = Vec::new();
        for (key, value) in &root {
            if key == "sweep" {
                collect_sweep(value, String::new(), &mut sweep)?;
            } else {
                flatten(value, key.clone(), &mut flat);
            }
        }

        let kind = flat
            .iter()
            .find(|(k, _)| k == "model.kind")
            .and_then(|(_, v)| v.as_str())
            .ok_or_else(|| config_err("missing string key model.kind"))?;
        let mut cfg = Self::new(ModelChoice::from_kind(kind)?);
        let mut rho_re: Option<Vec<Vec<f64>>> = None;
        let mut rho_im: Option<Vec<Vec<f64>>> = None;

        for (key, value) in &flat {
            match key.as_str() {
                "model.kind" => {}
                "initial_state" => {
                    let s = value.as_str().ok_or_else(|| config_err("initial_state must be a string"))?;
                    cfg.initial_state = InitialState::parse(s);
                }
                "initial_rho.re" => rho_re = Some(real_rows(value, key)?),
                "initial_rho.im" => rho_im = Some(real_rows(value, key)?),
                "output_dir" => {
                    let s = value.as_str().ok_or_else(|| config_err("output_dir must be a string"))?;
                    cfg.output_dir = Some(PathBuf::from(s));
                }
                _ => {
                    let x = scalar(value, key)?;
                    cfg.set(key, x)?;
                }
            }
        }

        if rho_re.is_some() || rho_im.is_some() {
            let re = rho_re.ok_or_else(|| config_err("initial_rho.im given without initial_rho.re"))?;
            let dim = re.len();
            let im = rho_im.unwrap_or_else(|| vec![vec![0.0; dim]; dim]);
            if im.len() != dim || re.iter().chain(&im).any(|r| r.len() != dim) {
                return Err(config_err("initial_rho.re and initial_rho.im must be square and equal in size"));
            }
            let data = re
                .iter()
                .flatten()
                .zip(im.iter().flatten())
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect();
            let m = ComplexMatrix::from_row_major(dim, data).map_err(|e| config_err(format!("initial_rho: {e}")))?;
            cfg.initial_state = InitialState::Explicit(m);
        }

        for axis in &sweep {
            // validate the path against a scratch copy
            let mut probe = cfg.clone();
            for &v in &axis.values {
                probe.set(&axis.path, v)?;
            }
        }
        cfg.sweep = sweep;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets a dotted parameter path to a scalar value.
    pub fn set(&mut self, path: &str, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(config_err(format!("{path} must be finite")));
        }
        let (section, name) = path.split_once('.').ok_or_else(|| config_err(format!("unknown key '{path}'")))?;
        match (section, name) {
            ("model", name) => self.model.set(name, value),
            ("time", "t_final") => {
                self.t_final = value;
                Ok(())
            }
            ("time", "dt") => {
                self.dt = value;
                Ok(())
            }
            ("time", "record_stride") => {
                self.record_stride = as_count(value, path)?;
                Ok(())
            }
            ("controls", "enabled") => {
                self.controls_enabled = value != 0.0;
                Ok(())
            }
            ("controls", "gain") => {
                self.control_gain = value;
                Ok(())
            }
            ("controls", "cap") => {
                self.control_cap = Some(value);
                Ok(())
            }
            _ => Err(config_err(format!("unknown key '{path}'"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.schedule()?;
        self.build_model()?;
        if self.sweep.len() > 3 {
            return Err(config_err(format!("at most 3 sweep axes are supported, got {}", self.sweep.len())));
        }
        Ok(())
    }

    pub fn schedule(&self) -> Result<Schedule> {
        Schedule::new(self.t_final, self.dt, self.record_stride).map_err(|e| config_err(e.to_string()))
    }

    /// The configured model with gain and cap applied.
    pub fn build_model(&self) -> Result<OpenSystemModel> {
        self.model
            .build()
            .and_then(|m| m.with_control_gain(self.control_gain))
            .and_then(|m| m.with_control_cap(self.control_cap))
            .map_err(|e| match e {
                Error::Config(_) => e,
                other => config_err(format!("model {}: {other}", self.model.kind())),
            })
    }

    pub fn initial_density(&self, model: &OpenSystemModel) -> Result<DensityMatrix> {
        self.initial_state.resolve(model).map_err(|e| match e {
            Error::Config(_) => e,
            other => config_err(format!("initial state: {other}")),
        })
    }

    /// Copy without sweep axes, with the given axis values applied.
    pub fn cell(&self, values: &[f64]) -> Result<Self> {
        let mut c = self.clone();
        c.sweep.clear();
        for (axis, &v) in self.sweep.iter().zip(values) {
            c.set(&axis.path, v)?;
        }
        Ok(c)
    }
}

fn flatten(value: &Value, prefix: String, out: &mut Vec<(String, Value)>) {
    match value {
        Value::Table(t) => {
            for (k, v) in t {
                flatten(v, format!("{prefix}.{k}"), out);
            }
        }
        other => out.push((prefix, other.clone())),
    }
}

fn collect_sweep(value: &Value, prefix: String, out: &mut Vec<SweepAxis>) -> Result<()> {
    match value {
        Value::Table(t) if t.contains_key("start") => {
            let get = |k: &str| t.get(k).ok_or_else(|| config_err(format!("sweep range {prefix} needs '{k}'")));
            let start = scalar(get("start")?, &prefix)?;
            let stop = scalar(get("stop")?, &prefix)?;
            let step = scalar(get("step")?, &prefix)?;
            if !(step > 0.0) || stop < start {
                return Err(config_err(format!("sweep range {prefix} must have step > 0 and stop >= start")));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
            // snap to 12 decimals so 0.05 * 7 reads back as 0.35
            let values = (0..n).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect();
            out.push(SweepAxis { path: prefix, values });
        }
        Value::Table(t) => {
            for (k, v) in t {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                collect_sweep(v, p, out)?;
            }
        }
        Value::Array(items) => {
            let values = items.iter().map(|v| scalar(v, &prefix)).collect::<Result<Vec<_>>>()?;
            if values.is_empty() {
                return Err(config_err(format!("sweep axis {prefix} is empty")));
            }
            out.push(SweepAxis { path: prefix, values });
        }
        _ => return Err(config_err(format!("sweep axis {prefix} must be a list or a range table"))),
    }
    Ok(())
}

fn scalar(value: &Value, key: &str) -> Result<f64> {
    let x = match value {
        Value::Float(f) => *f,
        Value::Integer(i) => *i as f64,
        Value::Boolean(b) => f64::from(u8::from(*b)),
        _ => return Err(config_err(format!("{key} must be a number or boolean"))),
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(config_err(format!("{key} must be finite")))
    }
}

fn real_rows(value: &Value, key: &str) -> Result<Vec<Vec<f64>>> {
    let rows = value.as_array().ok_or_else(|| config_err(format!("{key} must be a list of rows")))?;
    rows.iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| config_err(format!("{key} rows must be lists")))?
                .iter()
                .map(|v| scalar(v, key))
                .collect()
        })
        .collect()
}
