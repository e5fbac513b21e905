use std::collections::BTreeMap;
use std::path::Path;

use padic_opalg_core::padic::is_prime;
use padic_opalg_core::{Context, Error};
use serde::{Deserialize, Serialize};

/// Environment variable naming a JSON config file.
pub const CONFIG_ENV: &str = "PADIC_OPALG_CONFIG";

pub const REFINE_MAX_M: &str = "refine_max_m";
pub const NEUMANN_TERMS: &str = "neumann_terms";
pub const LIFT_POWERS: &str = "lift_powers";
pub const TEICHMULLER_ITERATIONS: &str = "teichmuller_iterations";
pub const CERTIFY_DEPTH: &str = "certify_depth";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub prime: u32,
    pub precision: u32,
    pub target_valuation: i64,
    pub budgets: BTreeMap<String, u64>,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            prime: 3,
            precision: 40,
            target_valuation: 30,
            budgets: BTreeMap::new(),
            seed: 0,
        }
    }
}

/// Values given on the command line; they win over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub prime: Option<u32>,
    pub precision: Option<u32>,
    pub target_valuation: Option<i64>,
    pub seed: Option<u64>,
    pub budgets: Vec<(String, u64)>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("config {}: {e}", path.display())))
    }

    /// Defaults, then the file named by the environment, then flags.
    pub fn resolve(env_path: Option<&Path>, overrides: &Overrides) -> Result<Self, Error> {
        let mut config = match env_path {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(p) = overrides.prime {
            config.prime = p;
        }
        if let Some(n) = overrides.precision {
            config.precision = n;
        }
        if let Some(t) = overrides.target_valuation {
            config.target_valuation = t;
        }
        if let Some(s) = overrides.seed {
            config.seed = s;
        }
        for (name, value) in &overrides.budgets {
            config.budgets.insert(name.clone(), *value);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !is_prime(self.prime) {
            return Err(Error::InvalidInput(format!("{} is not prime", self.prime)));
        }
        if self.precision < 8 {
            return Err(Error::InvalidInput(format!("precision {} is below 8", self.precision)));
        }
        if self.target_valuation > self.precision as i64 {
            return Err(Error::InvalidInput(format!(
                "target valuation {} exceeds precision {}",
                self.target_valuation, self.precision
            )));
        }
        Ok(())
    }

    pub fn context(&self) -> Context {
        Context::new(self.prime, self.precision).expect("validated")
    }

    pub fn budget(&self, name: &str) -> u64 {
        if let Some(v) = self.budgets.get(name) {
            return *v;
        }
        match name {
            REFINE_MAX_M => 256,
            NEUMANN_TERMS => 4 * self.precision as u64,
            LIFT_POWERS => 64,
            TEICHMULLER_ITERATIONS => self.precision as u64,
            CERTIFY_DEPTH => 8,
            _ => 64,
        }
    }
}
