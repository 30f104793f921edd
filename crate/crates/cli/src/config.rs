//! Experiment configuration: a declarative TOML file plus flag overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Bfs,
    Snowball,
    Ff,
    RwSubgraph,
    Gjoka,
    Proposed,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Bfs => "bfs",
            Method::Snowball => "snowball",
            Method::Ff => "ff",
            Method::RwSubgraph => "rw-subgraph",
            Method::Gjoka => "gjoka",
            Method::Proposed => "proposed",
        }
    }

    pub fn uses_random_walk(&self) -> bool {
        matches!(self, Method::RwSubgraph | Method::Gjoka | Method::Proposed)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Snowball neighbor cap.
    pub snowball_k: usize,
    /// Forest-fire forward-burning probability.
    pub ff_pf: f64,
    /// Rewiring attempts per candidate edge.
    pub rewire_coefficient: u64,
    /// Override for the collision threshold M (default 0.025 r).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collision_threshold: Option<usize>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            snowball_k: 50,
            ff_pf: 0.7,
            rewire_coefficient: 500,
            collision_threshold: None,
        }
    }
}

fn default_runs() -> usize {
    10
}

fn default_fractions() -> Vec<f64> {
    (1..=10).map(|p| p as f64 / 100.0).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Preprocessed edge-list path.
    pub dataset: PathBuf,
    pub methods: Vec<Method>,
    /// Queried-node fractions; defaults to the 1%..10% grid.
    #[serde(default = "default_fractions")]
    pub fractions: Vec<f64>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub rng_seed: u64,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub params: Params,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        let cfg: ExperimentConfig =
            toml::from_str(&text).map_err(|e| anyhow::anyhow!("config {}: {e}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.methods.is_empty() {
            anyhow::bail!("config: methods list is empty");
        }
        if self.runs == 0 {
            anyhow::bail!("config: runs must be >= 1");
        }
        for &f in &self.fractions {
            if !(f > 0.0 && f <= 1.0) {
                anyhow::bail!("config: fraction {f} outside (0, 1]");
            }
        }
        if !(self.params.ff_pf > 0.0 && self.params.ff_pf < 1.0) {
            anyhow::bail!("config: ff_pf {} outside (0, 1)", self.params.ff_pf);
        }
        if self.params.snowball_k == 0 {
            anyhow::bail!("config: snowball_k must be >= 1");
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        let text = toml::to_string_pretty(self)?;
        std::fs::write(path, text)?;
        Ok(())
    }
}
