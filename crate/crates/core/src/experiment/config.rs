use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::hilbert::{c, CMatrix, C64};
use crate::protocol::{make_family, Distribution, Family, ProtocolInstance};
use crate::Error;

/// `[re, im]`.
pub type ComplexEntry = [f64; 2];

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub protocol: ProtocolSpec,
    #[serde(default = "default_samples")]
    pub omega_samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sweep: Option<SweepRange>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    #[serde(default)]
    pub bob_sub: Option<BobSubSpec>,
}

fn default_samples() -> usize {
    50
}

fn default_n() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ProtocolSpec {
    Perfect {
        #[serde(rename = "N", alias = "n", default = "default_n")]
        n: u32,
        m: usize,
        d: usize,
    },
    Near {
        #[serde(rename = "N", alias = "n", default = "default_n")]
        n: u32,
        m: usize,
        d: usize,
    },
    /// Explicit honest states on `A ⊗ B` (row-major over `A`, then `B`) and
    /// one matrix per action, either `d_b × d_b` (acting on `B`) or
    /// `d_a·d_b × d_a·d_b` (acting on `A ⊗ B`).
    Custom {
        #[serde(rename = "N", alias = "n", default = "default_n")]
        n: u32,
        d_a: usize,
        d_b: usize,
        phi0: Vec<ComplexEntry>,
        phi1: Vec<ComplexEntry>,
        actions: Vec<Vec<Vec<ComplexEntry>>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    #[serde(rename = "N_min", alias = "n_min")]
    pub n_min: u32,
    #[serde(rename = "N_max", alias = "n_max")]
    pub n_max: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

/// Bob's substitution: several distributions `omegas` mixed with weights `p`,
/// compared against the honest `target`. Missing fields default to the
/// point masses, uniform weights and the uniform target.
#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BobSubSpec {
    #[serde(default)]
    pub target: Option<Vec<f64>>,
    #[serde(default)]
    pub omegas: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub p: Option<Vec<f64>>,
}

/// Resolved substitution inputs.
#[derive(Debug, Clone)]
pub struct BobSubPlan {
    pub target: Distribution,
    pub omegas: Vec<Distribution>,
    pub p: Distribution,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let cfg: Self =
            toml::from_str(text).map_err(|e| CliError::Config(format!("malformed config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Shape checks that do not need an instance. Unitarity and
    /// normalization are checked when the instance is built.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.omega_samples == 0 {
            return Err(CliError::Config("omega_samples must be at least 1".into()));
        }
        if let Some(s) = self.sweep {
            if s.n_min > s.n_max {
                return Err(CliError::Config(format!(
                    "empty sweep range: N_min = {} > N_max = {}",
                    s.n_min, s.n_max
                )));
            }
            if s.n_min == 0 {
                return Err(CliError::Config("N_min must be at least 1".into()));
            }
        }
        if let ProtocolSpec::Custom {
            d_a,
            d_b,
            phi0,
            phi1,
            actions,
            ..
        } = &self.protocol
        {
            let dim = d_a * d_b;
            for (name, v) in [("phi0", phi0), ("phi1", phi1)] {
                if v.len() != dim {
                    return Err(CliError::Config(format!(
                        "{name} has {} entries, expected d_a*d_b = {dim}",
                        v.len()
                    )));
                }
            }
            if actions.is_empty() {
                return Err(CliError::Config("custom protocol needs at least one action".into()));
            }
            for (j, a) in actions.iter().enumerate() {
                let n = a.len();
                if n != *d_b && n != dim {
                    return Err(CliError::Config(format!(
                        "action {j} has {n} rows, expected {d_b} or {dim}"
                    )));
                }
                if a.iter().any(|row| row.len() != n) {
                    return Err(CliError::Config(format!("action {j} is not square")));
                }
            }
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        match &self.protocol {
            ProtocolSpec::Perfect { m, .. } | ProtocolSpec::Near { m, .. } => *m,
            ProtocolSpec::Custom { actions, .. } => actions.len(),
        }
    }

    pub fn security(&self) -> u32 {
        match &self.protocol {
            ProtocolSpec::Perfect { n, .. }
            | ProtocolSpec::Near { n, .. }
            | ProtocolSpec::Custom { n, .. } => *n,
        }
    }

    pub fn family(&self) -> Option<Family> {
        match self.protocol {
            ProtocolSpec::Perfect { .. } => Some(Family::Perfect),
            ProtocolSpec::Near { .. } => Some(Family::Near),
            ProtocolSpec::Custom { .. } => None,
        }
    }

    /// Builds the instance at security parameter `n`. Errors are the raw
    /// library errors so callers can decide how to classify them.
    pub fn instance(&self, n: u32) -> Result<ProtocolInstance, Error> {
        match &self.protocol {
            ProtocolSpec::Perfect { m, d, .. } => make_family(Family::Perfect, n, *m, *d),
            ProtocolSpec::Near { m, d, .. } => make_family(Family::Near, n, *m, *d),
            ProtocolSpec::Custom {
                d_a,
                d_b,
                phi0,
                phi1,
                actions,
                ..
            } => ProtocolInstance::custom(
                *d_a,
                *d_b,
                phi0.iter().map(complex).collect(),
                phi1.iter().map(complex).collect(),
                actions.iter().map(|a| matrix(a)).collect(),
                n,
            ),
        }
    }

    pub fn bob_sub_plan(&self) -> Result<BobSubPlan, CliError> {
        let m = self.m();
        let spec = self.bob_sub.clone().unwrap_or_default();
        let dist = |w: Vec<f64>, what: &str| {
            if w.len() != m {
                return Err(CliError::Config(format!(
                    "{what} has {} weights, expected m = {m}",
                    w.len()
                )));
            }
            Distribution::new(w).map_err(|e| CliError::Config(format!("{what}: {e}")))
        };
        let target = match spec.target {
            Some(w) => dist(w, "bob_sub.target")?,
            None => Distribution::uniform(m).map_err(config)?,
        };
        let omegas = match spec.omegas {
            Some(list) => list
                .into_iter()
                .enumerate()
                .map(|(k, w)| dist(w, &format!("bob_sub.omegas[{k}]")))
                .collect::<Result<Vec<_>, _>>()?,
            None => (0..m)
                .map(|j| Distribution::point_mass(m, j).map_err(config))
                .collect::<Result<Vec<_>, _>>()?,
        };
        if omegas.is_empty() {
            return Err(CliError::Config("bob_sub.omegas is empty".into()));
        }
        let p = match spec.p {
            Some(w) => {
                if w.len() != omegas.len() {
                    return Err(CliError::Config(format!(
                        "bob_sub.p has {} weights for {} distributions",
                        w.len(),
                        omegas.len()
                    )));
                }
                Distribution::new(w).map_err(|e| CliError::Config(format!("bob_sub.p: {e}")))?
            }
            None => Distribution::uniform(omegas.len()).map_err(config)?,
        };
        Ok(BobSubPlan { target, omegas, p })
    }
}

fn config(e: Error) -> CliError {
    CliError::Config(e.to_string())
}

fn complex(e: &ComplexEntry) -> C64 {
    c(e[0], e[1])
}

fn matrix(rows: &[Vec<ComplexEntry>]) -> CMatrix {
    let n = rows.len();
    CMatrix::from_fn(n, n, |i, j| complex(&rows[i][j]))
}
