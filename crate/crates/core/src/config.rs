//! The run configuration file (TOML). Every section and key is optional;
//! command-line flags override file values, which override defaults.
//!
//! ```toml
//! [simulate]
//! alpha = 0.7323
//! innovation = { kind = "skewed_t", eta = 3.0, lambda = 0.5 }
//! t = 5000
//! seed = 7
//!
//! [test]
//! measure = "signed_power_crosscorr"
//! exponent = 0.1
//! lag = 1
//! q = 8
//!
//! [mc]
//! preset = "table1"
//! replications = 2000
//! workers = 4
//!
//! [empirical]
//! q = 8
//! clustering_powers = [0.1, 0.5]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dgp::{DgpSpec, InnovationDist, DEFAULT_BURN_IN};
use crate::empirical::EmpiricalConfig;
use crate::error::{Error, Result};
use crate::experiments::{kesten_alpha_3, PresetOptions, DEFAULT_LEN, DEFAULT_SEED};
use crate::hac::KernelSpec;
use crate::io::IngestMode;
use crate::series::Measure;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub simulate: SimulateSection,
    pub test: TestSection,
    pub mc: McSection,
    pub empirical: EmpiricalConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub phi: Option<f64>,
    pub omega: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub innovation: Option<InnovationDist>,
    pub t: Option<usize>,
    pub burn_in: Option<usize>,
    pub seed: Option<u64>,
}

impl SimulateSection {
    /// Fills gaps in `self` from `base`.
    pub fn or(self, base: &SimulateSection) -> SimulateSection {
        SimulateSection {
            phi: self.phi.or(base.phi),
            omega: self.omega.or(base.omega),
            alpha: self.alpha.or(base.alpha),
            beta: self.beta.or(base.beta),
            innovation: self.innovation.or(base.innovation),
            t: self.t.or(base.t),
            burn_in: self.burn_in.or(base.burn_in),
            seed: self.seed.or(base.seed),
        }
    }

    /// Defaults: ARCH(1) with `α = π^{1/3}/2`, `ω = 0.1`, normal innovations.
    pub fn to_dgp(&self) -> DgpSpec {
        DgpSpec {
            phi: self.phi.unwrap_or(0.0),
            omega: self.omega.unwrap_or(0.1),
            alpha: self.alpha.unwrap_or_else(kesten_alpha_3),
            beta: self.beta.unwrap_or(0.0),
            innovation: self.innovation.unwrap_or(InnovationDist::StandardNormal),
            len: self.t.unwrap_or(DEFAULT_LEN),
            burn_in: self.burn_in.unwrap_or(DEFAULT_BURN_IN),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestSection {
    pub measure: Option<Measure>,
    pub exponent: Option<f64>,
    pub lag: Option<usize>,
    pub q: Option<usize>,
    pub beta0: Option<f64>,
    pub confidence: Option<f64>,
    pub column: Option<String>,
    pub mode: Option<IngestMode>,
    pub kernel: Option<KernelSpec>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSection {
    pub preset: Option<String>,
    pub replications: Option<usize>,
    pub t: Option<usize>,
    pub base_seed: Option<u64>,
    pub nominal_level: Option<f64>,
    pub pilot_len: Option<usize>,
    pub grid: Option<Vec<f64>>,
    pub workers: Option<usize>,
    pub full_scale: Option<bool>,
}

impl McSection {
    pub fn or(self, base: &McSection) -> McSection {
        McSection {
            preset: self.preset.or_else(|| base.preset.clone()),
            replications: self.replications.or(base.replications),
            t: self.t.or(base.t),
            base_seed: self.base_seed.or(base.base_seed),
            nominal_level: self.nominal_level.or(base.nominal_level),
            pilot_len: self.pilot_len.or(base.pilot_len),
            grid: self.grid.or_else(|| base.grid.clone()),
            workers: self.workers.or(base.workers),
            full_scale: self.full_scale.or(base.full_scale),
        }
    }

    pub fn to_options(&self) -> PresetOptions {
        let base = if self.full_scale.unwrap_or(false) {
            PresetOptions::full_scale()
        } else {
            PresetOptions::default()
        };
        PresetOptions {
            replications: self.replications.unwrap_or(base.replications),
            len: self.t.unwrap_or(base.len),
            base_seed: self.base_seed.unwrap_or(base.base_seed),
            nominal_level: self.nominal_level.unwrap_or(base.nominal_level),
            pilot_len: self.pilot_len.unwrap_or(base.pilot_len),
            grid: self.grid.clone().or(base.grid),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config {
            path: origin.to_string(),
            reason: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::parse(&text, &path.display().to_string())
    }
}
