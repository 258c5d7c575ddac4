//! Config file loading, flag overrides and the config digest.

use std::path::Path;

use anyhow::{Context, Result};
use msakit::progressive::{PipelineConfig, Strategy};
use msakit::GapModel;
use sha2::{Digest, Sha256};

/// Flag values that override the config file when given.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub strategy: Option<Strategy>,
    pub matrix: Option<String>,
    pub gap_open: Option<f64>,
    pub gap_extend: Option<f64>,
    pub seed: Option<u64>,
}

pub fn parse_config(text: &str) -> Result<PipelineConfig> {
    Ok(toml::from_str(text)?)
}

/// Reads the optional config file, applies the overrides and validates.
pub fn load_config(path: Option<&Path>, over: &Overrides) -> Result<PipelineConfig> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            parse_config(&text).with_context(|| format!("parsing config {}", p.display()))?
        }
        None => PipelineConfig::default(),
    };
    apply(&mut cfg, over)?;
    Ok(cfg)
}

pub fn apply(cfg: &mut PipelineConfig, over: &Overrides) -> Result<()> {
    if let Some(s) = over.strategy {
        cfg.strategy = s;
    }
    if let Some(m) = &over.matrix {
        cfg.matrix = m.clone();
    }
    if over.gap_open.is_some() || over.gap_extend.is_some() {
        cfg.gap = GapModel::new(
            over.gap_open.unwrap_or(cfg.gap.open),
            over.gap_extend.unwrap_or(cfg.gap.extend),
            cfg.gap.terminal,
        )?;
    }
    if let Some(seed) = over.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(())
}

/// First 16 hex digits of the SHA-256 of the canonical TOML rendering.
pub fn digest(cfg: &PipelineConfig) -> String {
    let text = toml::to_string(cfg).expect("config serializes");
    hex::encode(Sha256::digest(text.as_bytes()))[..16].to_string()
}
