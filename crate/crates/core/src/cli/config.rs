use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::batch::default_sim;
use crate::error::{Error, Result};
use crate::market::{check_maturity, BarrierSpec, MarketSpec};
use crate::mc::SimConfig;
use crate::payoff::{HomogeneousPayoff, PayoffMetadata};
use crate::subordination::SubordinatorSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimSpec {
    pub payoff: PayoffMetadata,
    #[serde(default)]
    pub barrier: Option<BarrierSpec>,
    pub maturity: f64,
}

/// Everything a command needs, read from one JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub market: MarketSpec,
    pub claim: ClaimSpec,
    #[serde(default)]
    pub sim: Option<SimConfig>,
    #[serde(default)]
    pub subordinator: Option<SubordinatorSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl RunConfig {
    /// Up-and-in exchange option on the reference market.
    pub fn reference() -> Self {
        Self {
            market: MarketSpec {
                s01: 100.0,
                s02: 95.0,
                sigma1: 0.2,
                sigma2: 0.3,
                rho: 0.5,
                r: 0.05,
                r1: 0.02,
                r2: 0.01,
            },
            claim: ClaimSpec {
                payoff: PayoffMetadata::Exchange { a: 1.0, b: 1.0 },
                barrier: Some(BarrierSpec::up_in(1.05)),
                maturity: 1.0,
            },
            sim: None,
            subordinator: None,
            output: OutputSpec::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Cross-field checks done before any command runs.
    pub fn validate(&self) -> Result<()> {
        self.market.validate()?;
        check_maturity(self.claim.maturity)?;
        HomogeneousPayoff::from_metadata(&self.claim.payoff)?;
        if let Some(b) = &self.claim.barrier {
            b.validate_against(self.market.spot_ratio())?;
        }
        if let Some(s) = &self.sim {
            s.validate()?;
        }
        if let Some(s) = &self.subordinator {
            s.validate()?;
        }
        Ok(())
    }

    pub fn payoff(&self) -> Result<HomogeneousPayoff> {
        HomogeneousPayoff::from_metadata(&self.claim.payoff)
    }

    pub fn sim_or_default(&self) -> SimConfig {
        self.sim.unwrap_or_else(default_sim)
    }
}
