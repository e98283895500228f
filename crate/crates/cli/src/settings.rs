//! Enhancement settings: defaults, then an optional TOML file, then flags.

use std::path::PathBuf;

use clap::Args;
use lowlight_core::{EnhanceConfig, GammaSequence, LambdaParam};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// TOML file with enhancement settings
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Joint factor of the energy model, in (1, 2]
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Probe gammas, comma separated
    #[arg(long, value_name = "LIST")]
    pub gammas: Option<String>,
    /// Target mean-lightness gain
    #[arg(long = "dv", allow_negative_numbers = true)]
    pub dv_star: Option<f64>,
    /// Segmentation threshold on lightness
    #[arg(long = "seg-thresh", allow_negative_numbers = true)]
    pub seg_threshold: Option<f64>,
    /// Downsampling rate before segmentation
    #[arg(long)]
    pub downsample: Option<usize>,
    /// Subsampling rate of the fast guided filter
    #[arg(long = "gf-subsample")]
    pub gf_subsample: Option<usize>,
    /// Guided filter regularizer
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    /// Gamma working range as LO,HI
    #[arg(long = "gamma-clamp", value_name = "LO,HI")]
    pub gamma_clamp: Option<String>,
}

fn parse_list(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::config(format!("{what}: cannot parse {t:?} as a number")))
        })
        .collect()
}

impl ConfigArgs {
    pub fn resolve(&self) -> CliResult<EnhanceConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
                toml::from_str::<EnhanceConfig>(&text)
                    .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?
            }
            None => EnhanceConfig::default(),
        };
        if let Some(l) = self.lambda {
            cfg.lambda = LambdaParam::new(l)?;
        }
        if let Some(g) = &self.gammas {
            cfg.gammas = GammaSequence::new(parse_list(g, "--gammas")?)?;
        }
        if let Some(v) = self.dv_star {
            cfg.dv_star = v;
        }
        if let Some(v) = self.seg_threshold {
            cfg.seg_threshold = v;
        }
        if let Some(v) = self.downsample {
            cfg.downsample = v;
        }
        if let Some(v) = self.gf_subsample {
            cfg.gf_subsample = v;
        }
        if let Some(v) = self.eta {
            cfg.eta = v;
        }
        if let Some(s) = &self.gamma_clamp {
            match parse_list(s, "--gamma-clamp")?[..] {
                [lo, hi] => cfg.gamma_clamp = (lo, hi),
                _ => return Err(CliError::config("--gamma-clamp expects LO,HI")),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `lo:hi:step`.
pub fn parse_sweep(s: &str) -> CliResult<(f64, f64, f64)> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::config(format!("--sweep: cannot parse {t:?} as a number")))
        })
        .collect::<CliResult<_>>()?;
    match parts[..] {
        [lo, hi, step] => {
            lowlight_core::tone::sweep_grid(lo, hi, step)?;
            Ok((lo, hi, step))
        }
        _ => Err(CliError::config(format!(
            "--sweep expects LO:HI:STEP, got {s:?}"
        ))),
    }
}
