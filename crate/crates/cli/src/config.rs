use std::path::{Path, PathBuf};

use clap::Args;
use mcf_core::{FlowSpec, OptimizerConfig, QuadConfig, Schedules};
use serde::{Deserialize, Serialize};

/// Everything a run depends on; loaded from `--config` and overridden by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub flow: Option<FlowSpec>,
    /// Subcommand the config was written for; must match when set.
    pub command: Option<String>,
    /// Heat-ball radii.
    pub r: Option<Vec<f64>>,
    /// Slice times.
    pub t: Option<Vec<f64>>,
    pub quad: QuadConfig,
    pub optimizer: OptimizerConfig,
    /// Mollifier widths.
    pub eps: Vec<f64>,
    pub out: PathBuf,
    pub seed: u64,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            flow: None,
            command: None,
            r: None,
            t: None,
            quad: QuadConfig::default(),
            optimizer: OptimizerConfig::default(),
            eps: vec![0.5, 0.1, 0.02],
            out: PathBuf::from("mcf-out"),
            seed: 0,
            threads: 1,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Catalog flow name
    #[arg(long)]
    pub flow: Option<String>,
    /// JSON run configuration
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated heat-ball radii
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub r: Option<Vec<f64>>,
    /// Comma-separated slice times (negative)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t: Option<Vec<f64>>,
    /// Comma-separated mollifier widths
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads
    #[arg(long)]
    pub threads: Option<usize>,
    /// Seed of the optimizer start perturbations
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Invalid(String),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Config file (if any) with flags applied on top.
    pub fn resolve(command: &str, args: &CommonArgs) -> Result<Self, ConfigError> {
        let mut cfg = match &args.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        if let Some(c) = &cfg.command {
            if c != command {
                return Err(ConfigError::Invalid(format!(
                    "config was written for `{c}`, not `{command}`"
                )));
            }
        }
        cfg.command = Some(command.to_string());
        if let Some(name) = &args.flow {
            cfg.flow = Some(FlowSpec::named(name.clone()));
        }
        if let Some(r) = &args.r {
            cfg.r = Some(r.clone());
        }
        if let Some(t) = &args.t {
            cfg.t = Some(t.clone());
        }
        if let Some(eps) = &args.eps {
            cfg.eps = eps.clone();
        }
        if let Some(out) = &args.out {
            cfg.out = out.clone();
        }
        if let Some(threads) = args.threads {
            cfg.threads = threads;
        }
        if let Some(seed) = args.seed {
            cfg.seed = seed;
        }
        cfg.optimizer.seed = cfg.seed;
        cfg.quad.parallel = cfg.threads > 1;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.threads == 0 {
            return invalid("threads must be at least 1".into());
        }
        if let Err(e) = self.quad.validate() {
            return invalid(e.to_string());
        }
        if let Err(e) = self.optimizer.validate() {
            return invalid(e.to_string());
        }
        if self.r.as_ref().is_some_and(|r| r.is_empty() || r.iter().any(|v| !(*v > 0.0 && v.is_finite()))) {
            return invalid("radii must be positive".into());
        }
        if self.t.as_ref().is_some_and(|t| t.is_empty() || t.iter().any(|v| !v.is_finite())) {
            return invalid("times must be finite".into());
        }
        if self.eps.is_empty() || self.eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return invalid("eps values must be positive".into());
        }
        Ok(())
    }

    pub fn flow_spec(&self) -> Result<&FlowSpec, ConfigError> {
        self.flow
            .as_ref()
            .ok_or_else(|| ConfigError::Invalid("no flow given (use --flow or the config's `flow`)".into()))
    }

    pub fn radii(&self) -> Vec<f64> {
        self.r.clone().unwrap_or_else(|| Schedules::default().r)
    }

    pub fn times(&self) -> Vec<f64> {
        self.t.clone().unwrap_or_else(|| Schedules::default().t)
    }

    pub fn schedules(&self) -> Schedules {
        Schedules {
            r: self.radii(),
            t: self.times(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_defaults() {
        let args = CommonArgs {
            flow: Some("circle".into()),
            r: Some(vec![1.0, 2.0]),
            t: Some(vec![-2.0]),
            threads: Some(2),
            seed: Some(9),
            ..CommonArgs::default()
        };
        let cfg = RunConfig::resolve("ecker", &args).unwrap();
        assert_eq!(cfg.flow_spec().unwrap().name, "circle");
        assert_eq!(cfg.radii(), vec![1.0, 2.0]);
        assert!(cfg.quad.parallel);
        assert_eq!(cfg.optimizer.seed, 9);
        assert_eq!(cfg.times(), vec![-2.0]);
        assert_eq!(RunConfig::default().times(), Schedules::default().t);
    }

    #[test]
    fn rejects_unknown_keys() {
        let err = serde_json::from_str::<RunConfig>(r#"{"flw": {"name": "plane"}}"#);
        assert!(err.is_err());
        let err = serde_json::from_str::<RunConfig>(r#"{"quad": {"rel": 1e-6}}"#);
        assert!(err.is_err());
        let ok: RunConfig = serde_json::from_str(r#"{"flow": {"name": "plane"}, "quad": {"rel_tol": 1e-6}}"#).unwrap();
        assert_eq!(ok.quad.rel_tol, 1e-6);
    }

    #[test]
    fn rejects_bad_values() {
        let args = CommonArgs {
            t: Some(vec![f64::NAN]),
            ..CommonArgs::default()
        };
        assert!(RunConfig::resolve("huisken", &args).is_err());
        let args = CommonArgs {
            threads: Some(0),
            ..CommonArgs::default()
        };
        assert!(RunConfig::resolve("huisken", &args).is_err());
    }
}
