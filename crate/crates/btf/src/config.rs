//! TOML experiment configuration.
//!
//! Every key is optional and overrides the matching default:
//!
//! ```toml
//! shape = [15, 15, 15]
//! rw_grid = { start = 0.04, stop = 1.0, step = 0.04 }
//! p_grid = [0.05, 0.15, 0.25]
//! trials = 40
//! relaxations = ["slp", "flp", "clp"]
//! adversary = { kind = "fraction", q = 0.5 }
//! seed = 7
//! check_unique = true
//! cascade = true
//! threads = 8
//! build_mode = "lazy"
//! clp_iteration_budget = 20000
//! ```

use std::path::Path;

use anyhow::{bail, Context};
use btf_core::corruption::Adversary;
use btf_core::experiment::{grid, ExperimentConfig};
use btf_core::lp::{BuildMode, Relaxation};
use btf_core::Dims;
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl GridSpec {
    pub fn values(&self) -> anyhow::Result<Vec<f64>> {
        match self {
            GridSpec::List(v) => Ok(v.clone()),
            GridSpec::Range { start, stop, step } => Ok(grid(*start, *stop, *step)?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AdversarySpec {
    None,
    Fraction { q: f64 },
    RevertP,
}

impl From<&AdversarySpec> for Adversary {
    fn from(a: &AdversarySpec) -> Self {
        match *a {
            AdversarySpec::None => Adversary::None,
            AdversarySpec::Fraction { q } => Adversary::Fraction { q },
            AdversarySpec::RevertP => Adversary::RevertP,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub shape: Option<[usize; 3]>,
    pub rw_grid: Option<GridSpec>,
    pub p_grid: Option<GridSpec>,
    pub trials: Option<usize>,
    pub relaxations: Option<Vec<String>>,
    pub adversary: Option<AdversarySpec>,
    pub seed: Option<u64>,
    pub check_unique: Option<bool>,
    pub cascade: Option<bool>,
    pub threads: Option<usize>,
    pub build_mode: Option<String>,
    pub clp_iteration_budget: Option<usize>,
}

pub fn parse_build_mode(s: &str) -> anyhow::Result<BuildMode> {
    Ok(match s.to_ascii_lowercase().as_str() {
        "eager" => BuildMode::Eager,
        "lazy" => BuildMode::Lazy,
        "auto" => BuildMode::Auto,
        other => bail!("unknown build mode {other:?}"),
    })
}

impl ConfigFile {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Applies the keys that are present to `cfg`.
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> anyhow::Result<()> {
        if let Some([n, m, l]) = self.shape {
            cfg.dims = Dims::new(n, m, l)?;
        }
        if let Some(g) = &self.rw_grid {
            cfg.rw_grid = g.values()?;
        }
        if let Some(g) = &self.p_grid {
            cfg.p_grid = g.values()?;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(r) = &self.relaxations {
            cfg.relaxations = r.iter().map(|s| s.parse::<Relaxation>()).collect::<Result<_, _>>()?;
        }
        if let Some(a) = &self.adversary {
            cfg.adversary = a.into();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(u) = self.check_unique {
            cfg.check_unique = u;
        }
        if let Some(c) = self.cascade {
            cfg.cascade = c;
        }
        if let Some(t) = self.threads {
            cfg.threads = t;
        }
        if let Some(m) = &self.build_mode {
            cfg.cuts.build_mode = parse_build_mode(m)?;
        }
        if let Some(b) = self.clp_iteration_budget {
            cfg.clp_iteration_budget = Some(b);
        }
        Ok(())
    }
}
