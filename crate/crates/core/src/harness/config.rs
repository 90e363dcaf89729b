use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalogue::PopulationSource;
use crate::error::{Error, Result};
use crate::placement::Algorithm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    FcdnUnicast,
    FcdnMulticast,
    CdnDns,
}

impl System {
    pub const ALL: [System; 3] = [System::FcdnUnicast, System::FcdnMulticast, System::CdnDns];

    pub fn name(self) -> &'static str {
        match self {
            System::FcdnUnicast => "fcdn_unicast",
            System::FcdnMulticast => "fcdn_multicast",
            System::CdnDns => "cdn_dns",
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        System::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown system `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogueSpec {
    pub n: usize,
    pub zipf_exponent: f64,
    pub bitrate_choices: Vec<f64>,
    pub volume_choices: Vec<f64>,
}

impl Default for CatalogueSpec {
    fn default() -> Self {
        Self {
            n: 1000,
            zipf_exponent: 0.8,
            bitrate_choices: vec![20.0, 40.0, 60.0],
            volume_choices: vec![20.0, 40.0, 60.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    pub k_o: Vec<usize>,
    pub k_e: Vec<usize>,
    pub k_d: Vec<usize>,
    pub tau: Vec<f64>,
    pub t: Vec<f64>,
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            k_o: vec![2, 4, 6, 8],
            k_e: vec![2, 4, 6, 8],
            k_d: vec![2, 4, 6, 8],
            tau: vec![0.1, 1.0, 10.0],
            t: vec![900.0, 1800.0, 2700.0, 3600.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub topology: PathBuf,
    pub population: PopulationSource,
    #[serde(default)]
    pub catalogue: CatalogueSpec,
    #[serde(default = "default_active_fraction")]
    pub active_fraction: f64,
    #[serde(default = "default_cache_fraction")]
    pub cache_fraction: f64,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default = "all_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "all_systems")]
    pub systems: Vec<System>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Reuse the trial-0 Pop/Cls placement in every trial.
    #[serde(default)]
    pub fix_placement: bool,
}

fn default_active_fraction() -> f64 {
    0.4
}

fn default_cache_fraction() -> f64 {
    0.5
}

fn all_algorithms() -> Vec<Algorithm> {
    Algorithm::ALL.to_vec()
}

fn all_systems() -> Vec<System> {
    System::ALL.to_vec()
}

fn default_trials() -> usize {
    50
}

impl ExperimentConfig {
    /// Config with default grids and catalogue for the given inputs.
    pub fn new(topology: impl Into<PathBuf>, population: PopulationSource) -> Self {
        Self {
            topology: topology.into(),
            population,
            catalogue: CatalogueSpec::default(),
            active_fraction: default_active_fraction(),
            cache_fraction: default_cache_fraction(),
            grids: Grids::default(),
            algorithms: all_algorithms(),
            systems: all_systems(),
            trials: default_trials(),
            master_seed: 0,
            fix_placement: false,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read a config file; relative paths inside resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.topology = base.join(&cfg.topology);
        if let PopulationSource::File { path } = &mut cfg.population {
            *path = base.join(&*path);
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let g = &self.grids;
        for (name, empty) in [
            ("k_o", g.k_o.is_empty()),
            ("k_e", g.k_e.is_empty()),
            ("k_d", g.k_d.is_empty()),
            ("tau", g.tau.is_empty()),
            ("t", g.t.is_empty()),
            ("algorithms", self.algorithms.is_empty()),
            ("systems", self.systems.is_empty()),
        ] {
            if empty {
                return bad(format!("`{name}` must not be empty"));
            }
        }
        if self.trials == 0 {
            return bad("`trials` must be at least 1".into());
        }
        let min_t = g.t.iter().copied().fold(f64::INFINITY, f64::min);
        if g.tau.iter().any(|&tau| !(tau > 0.0 && tau < min_t)) {
            return bad(format!("every tau must lie in (0, {min_t})"));
        }
        if !(0.0..=1.0).contains(&self.active_fraction) {
            return bad(format!("active_fraction {} outside [0, 1]", self.active_fraction));
        }
        if !(0.0..=1.0).contains(&self.cache_fraction) {
            return bad(format!("cache_fraction {} outside [0, 1]", self.cache_fraction));
        }
        if g.k_o.contains(&0) {
            return bad("k_o values must be at least 1".into());
        }
        if g.k_d.contains(&0) {
            return bad("k_d values must be at least 1".into());
        }
        Ok(())
    }
}
