//! JSON system configuration: `{"n": 4, "d": 3, "q": 257, "sizes": [0, 15, 30], "seed": 7}`.

use std::path::Path;

use mldr_core::mldr::{plan_layout, MldrConfig, MldrSystem};
use mldr_core::Field;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

fn default_q() -> u32 {
    mldr_core::field::DEFAULT_MODULUS
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfigFile {
    pub n: usize,
    pub d: usize,
    #[serde(default = "default_q")]
    pub q: u32,
    /// Message sizes in symbols, level 1 first.
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl SystemConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: Self = serde_json::from_str(text).map_err(|e| HarnessError::Format(format!("config: {e}")))?;
        parsed.to_config()?;
        Ok(parsed)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn to_config(&self) -> Result<MldrConfig> {
        let config = MldrConfig::new(self.n, self.d, self.sizes.clone(), Field::new(self.q)?);
        config.validate()?;
        Ok(config)
    }

    pub fn system(&self) -> Result<MldrSystem> {
        Ok(plan_layout(self.to_config()?)?)
    }
}
