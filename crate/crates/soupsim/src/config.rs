//! Experiment configuration: a TOML file plus command-line overrides.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::alpha_of_c;
use crate::grid::{build_disk_graph, build_rect_graph, DomainGraph};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("could not parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum GraphSpec {
    Disk { radius: u32 },
    Rect { width: u32, height: u32 },
}

impl GraphSpec {
    pub fn build<F: Scalar>(&self) -> DomainGraph<F> {
        match *self {
            GraphSpec::Disk { radius } => build_disk_graph(radius),
            GraphSpec::Rect { width, height } => build_rect_graph(width, height),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    /// Central charge; the soup intensity is always alpha = c/2.
    pub c: f64,
    /// Truncated tail loop mass tolerance for the automatic length cutoff.
    pub tail_tol: f64,
    /// Explicit length cutoff; overrides `tail_tol` when set.
    pub l_max: Option<usize>,
    pub beta_candidates: Vec<f64>,
    pub replicas: usize,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            graph: GraphSpec::Disk { radius: 4 },
            c: 1.0,
            tail_tol: 1e-6,
            l_max: None,
            beta_candidates: vec![0.125, 0.25, 0.5],
            replicas: 100_000,
            seed: 1,
            out_dir: None,
            threads: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn alpha(&self) -> f64 {
        alpha_of_c(self.c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.c > 0.0 && self.c <= 1.0) {
            return Err(ConfigError::Invalid {
                key: "c",
                reason: format!("central charge must lie in (0, 1], got {}", self.c),
            });
        }
        if self.replicas < 1000 {
            return Err(ConfigError::Invalid {
                key: "replicas",
                reason: format!(
                    "statistical gates need at least 1000 replicas, got {}",
                    self.replicas
                ),
            });
        }
        if !(self.tail_tol > 0.0) {
            return Err(ConfigError::Invalid {
                key: "tail_tol",
                reason: "tail tolerance must be positive".into(),
            });
        }
        if let Some(l) = self.l_max {
            if l < 2 {
                return Err(ConfigError::Invalid {
                    key: "l_max",
                    reason: format!("length cutoff must be >= 2, got {l}"),
                });
            }
        }
        if self.beta_candidates.iter().any(|&b| b <= 0.0) {
            return Err(ConfigError::Invalid {
                key: "beta_candidates",
                reason: "intensities must be positive".into(),
            });
        }
        match self.graph {
            GraphSpec::Disk { radius } => {
                if radius == 0 {
                    return Err(ConfigError::Invalid {
                        key: "graph.radius",
                        reason: "radius must be positive".into(),
                    });
                }
            }
            GraphSpec::Rect { width, height } => {
                if width == 0 || height == 0 {
                    return Err(ConfigError::Invalid {
                        key: "graph",
                        reason: "rectangle dimensions must be positive".into(),
                    });
                }
            }
        }
        Ok(())
    }

    /// One-line header stating the run parameters.
    pub fn header(&self) -> String {
        format!(
            "# graph={:?} c={} (alpha=c/2={}) seed={} replicas={}",
            self.graph,
            self.c,
            self.alpha(),
            self.seed,
            self.replicas
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_valid() {
        let cfg = ExperimentConfig::default();
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.alpha(), 0.5);
    }

    #[test]
    fn toml_round_trip_and_overrides() {
        let text = r#"
            c = 0.5
            replicas = 2000
            seed = 9
            [graph]
            shape = "rect"
            width = 3
            height = 2
        "#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(cfg.graph, GraphSpec::Rect { width: 3, height: 2 });
        assert_eq!(cfg.alpha(), 0.25);
        assert_eq!(cfg.replicas, 2000);
        let g = cfg.graph.build::<f64>();
        assert_eq!(g.n_interior(), 6);
    }

    #[test]
    fn validation_rejects_bad_values() {
        let mut cfg = ExperimentConfig::default();
        cfg.c = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.replicas = 10;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.beta_candidates = vec![0.25, -1.0];
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.l_max = Some(1);
        assert!(cfg.validate().is_err());
    }
}
