//! JSON job manifest.
//!
//! Matrix paths are resolved relative to the directory containing the job file,
//! as is `output_dir`. Unknown fields are rejected at every level.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Reduce,
    VerifyTheorem1,
    VerifyTheorem2,
    VerifyAppendix,
    Sweep,
    Moments,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Reduce => "reduce",
            Task::VerifyTheorem1 => "verify-theorem1",
            Task::VerifyTheorem2 => "verify-theorem2",
            Task::VerifyAppendix => "verify-appendix",
            Task::Sweep => "sweep",
            Task::Moments => "moments",
        }
    }
}

/// How the integral term `P_{-1}` of an integro-DAE is supplied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorizationSpec {
    /// `P_{-1} = F_1 G F_2^H`.
    Product,
    /// `P_{-1} = F_1 G^{-1} F_2^H`.
    InverseProduct,
    /// `P_{-1}` given directly.
    Trivial,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemSpec {
    /// `P_0, …, P_l` in order; `l` is the list length minus one.
    HigherOrder {
        p: Vec<PathBuf>,
        b: PathBuf,
        /// `L_0, …, L_{l-1}`.
        l: Vec<PathBuf>,
        d: Option<PathBuf>,
    },
    IntegroDae {
        p1: PathBuf,
        p0: PathBuf,
        factorization: FactorizationSpec,
        f1: Option<PathBuf>,
        f2: Option<PathBuf>,
        g: Option<PathBuf>,
        p_minus_one: Option<PathBuf>,
        b: PathBuf,
        l: PathBuf,
        d: Option<PathBuf>,
    },
    FirstOrder {
        e: PathBuf,
        a: PathBuf,
        b: PathBuf,
        l: PathBuf,
        d: Option<PathBuf>,
    },
    /// `c` and `sigma` are `l x 1` and `l x l` files.
    CaseI {
        m: Vec<PathBuf>,
        c: PathBuf,
        sigma: PathBuf,
        r: PathBuf,
    },
    /// `sigma` is an `l x 1` file.
    CaseIi {
        c: Vec<PathBuf>,
        m: Vec<PathBuf>,
        sigma: PathBuf,
        r: PathBuf,
    },
}

impl SystemSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            SystemSpec::HigherOrder { .. } => "higher-order",
            SystemSpec::IntegroDae { .. } => "integro-dae",
            SystemSpec::FirstOrder { .. } => "first-order",
            SystemSpec::CaseI { .. } => "case-i",
            SystemSpec::CaseIi { .. } => "case-ii",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Real,
    Imaginary,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub s_min: f64,
    pub s_max: f64,
    pub count: usize,
    pub axis: Axis,
}

impl SweepSpec {
    /// `count` equispaced points from `s_min` to `s_max` on the chosen axis.
    pub fn points(&self) -> Vec<(f64, f64)> {
        (0..self.count)
            .map(|k| {
                let t = if self.count == 1 {
                    self.s_min
                } else {
                    let frac = k as f64 / (self.count - 1) as f64;
                    self.s_min + frac * (self.s_max - self.s_min)
                };
                match self.axis {
                    Axis::Real => (t, 0.0),
                    Axis::Imaginary => (0.0, t),
                }
            })
            .collect()
    }
}

fn default_tol() -> f64 {
    blockkrylov::DEFAULT_TOL
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub task: Task,
    pub system: SystemSpec,
    /// Expansion point `(re, im)`.
    pub s0: (f64, f64),
    pub n: Option<usize>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    pub jmax: Option<usize>,
    pub sweep: Option<SweepSpec>,
    pub output_dir: PathBuf,
}

impl JobSpec {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let spec: JobSpec =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("job file: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Reads and validates a job file, returning it with its base directory.
    pub fn load(path: &Path) -> Result<(Self, PathBuf), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let spec = Self::from_json(&text)?;
        let base = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok((spec, base))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(CliError::Config(format!(
                    "task {} requires {what}",
                    self.task.name()
                )))
            }
        };
        if !(self.s0.0.is_finite() && self.s0.1.is_finite()) {
            return Err(CliError::Config("s0 must be finite".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(CliError::Config("tol must be positive".into()));
        }
        if self.n == Some(0) {
            return Err(CliError::Config("n must be positive".into()));
        }
        let reducible = matches!(
            self.system,
            SystemSpec::HigherOrder { .. }
                | SystemSpec::IntegroDae { .. }
                | SystemSpec::FirstOrder { .. }
        );
        match self.task {
            Task::Reduce => {
                need(self.n.is_some(), "n")?;
                need(
                    reducible,
                    "a higher-order, integro-dae or first-order system",
                )?;
            }
            Task::Moments => {
                need(self.n.is_some(), "n")?;
                need(self.jmax.is_some(), "jmax")?;
                need(
                    reducible,
                    "a higher-order, integro-dae or first-order system",
                )?;
            }
            Task::Sweep => {
                need(self.sweep.is_some(), "a sweep block")?;
                need(
                    reducible,
                    "a higher-order, integro-dae or first-order system",
                )?;
            }
            Task::VerifyTheorem1 => need(
                matches!(
                    self.system,
                    SystemSpec::HigherOrder { .. } | SystemSpec::CaseI { .. }
                ),
                "a higher-order or case-i system",
            )?,
            Task::VerifyTheorem2 => need(
                matches!(
                    self.system,
                    SystemSpec::IntegroDae { .. } | SystemSpec::CaseIi { .. }
                ),
                "an integro-dae or case-ii system",
            )?,
            Task::VerifyAppendix => need(
                matches!(
                    self.system,
                    SystemSpec::HigherOrder { .. } | SystemSpec::IntegroDae { .. }
                ),
                "a higher-order or integro-dae system",
            )?,
        }
        if let Some(sw) = &self.sweep {
            if sw.count == 0 || !(sw.s_min.is_finite() && sw.s_max.is_finite()) {
                return Err(CliError::Config(
                    "sweep needs a positive count and finite bounds".into(),
                ));
            }
        }
        Ok(())
    }
}
