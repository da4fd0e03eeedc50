//! Run configuration: command-line flags and the flat TOML file that
//! mirrors them. Flags win over the file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thermokit_core::ingest::SeasonDefinition;
use thermokit_core::panel::{ModelSpec, Outcome};
use thermokit_core::thermal::Grouping;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SeasonDef {
    Comfort,
    Paramid,
}

impl From<SeasonDef> for SeasonDefinition {
    fn from(s: SeasonDef) -> Self {
        match s {
            SeasonDef::Comfort => SeasonDefinition::ComfortExclusive,
            SeasonDef::Paramid => SeasonDefinition::ParamidSpan,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    Base,
    Seasonal,
}

impl From<ModelArg> for ModelSpec {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Base => ModelSpec::Base,
            ModelArg::Seasonal => ModelSpec::Seasonal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeArg {
    Cool,
    Heat,
    Combined,
}

impl From<OutcomeArg> for Outcome {
    fn from(o: OutcomeArg) -> Self {
        match o {
            OutcomeArg::Cool => Outcome::Cool,
            OutcomeArg::Heat => Outcome::Heat,
            OutcomeArg::Combined => Outcome::Combined,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GroupingArg {
    Population,
    House,
    HouseSensor,
}

impl From<GroupingArg> for Grouping {
    fn from(g: GroupingArg) -> Self {
        match g {
            GroupingArg::Population => Grouping::Population,
            GroupingArg::House => Grouping::House,
            GroupingArg::HouseSensor => Grouping::HouseSensor,
        }
    }
}

/// Every setting a run accepts. Unset values fall back to the defaults in
/// [`Resolved`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    /// Trace file or directory of trace files.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// House metadata file (canonical headers).
    #[arg(long, global = true)]
    pub metadata: Option<PathBuf>,
    /// Column mapping TOML; defaults to the DYD export layout.
    #[arg(long, global = true)]
    pub mapping: Option<PathBuf>,
    /// Output directory; each stage writes into a subdirectory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Season definition; comfort defaults to comfort, ffp/identify to paramid.
    #[arg(long, global = true, value_enum)]
    pub season_def: Option<SeasonDef>,
    /// Histogram bin width (°F), in (0, 10].
    #[arg(long, global = true)]
    pub bin_width: Option<f64>,
    /// Comfort half-width C (°F), in [0, 20].
    #[arg(long, global = true)]
    pub comfort_c: Option<f64>,
    /// CDRD rise threshold (°F), in (0, 20].
    #[arg(long, global = true)]
    pub cdrd_threshold: Option<f64>,
    /// Fit only this panel model (default: all table models).
    #[arg(long, global = true, value_enum)]
    pub model: Option<ModelArg>,
    /// Fit only this panel outcome (default: all table outcomes).
    #[arg(long, global = true, value_enum)]
    pub outcome: Option<OutcomeArg>,
    /// Grouping of the two-sigma fit filter.
    #[arg(long, global = true, value_enum)]
    pub filter_grouping: Option<GroupingArg>,
    /// Width of the fit filter in standard deviations, in (0, 10].
    #[arg(long, global = true)]
    pub filter_sigmas: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for per-house work.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Synthetic houses to generate.
    #[arg(long, global = true)]
    pub houses: Option<usize>,
    /// Days per synthetic house.
    #[arg(long, global = true)]
    pub days: Option<usize>,
    /// Temperature noise std of synthetic traces (°F).
    #[arg(long, global = true)]
    pub noise: Option<f64>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($f:ident),*) => {
        RunConfig { $($f: $top.$f.clone().or_else(|| $base.$f.clone())),* }
    };
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    /// `top` values win over `self`.
    pub fn overlay(&self, top: &RunConfig) -> RunConfig {
        let base = self;
        overlay!(
            base, top, input, metadata, mapping, out, season_def, bin_width, comfort_c, cdrd_threshold, model,
            outcome, filter_grouping, filter_sigmas, seed, jobs, houses, days, noise
        )
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let r = Resolved {
            out: self.out.clone().unwrap_or_else(|| PathBuf::from("thermokit-out")),
            bin_width: self.bin_width.unwrap_or(thermokit_core::comfort::DEFAULT_BIN_WIDTH),
            comfort_c: self.comfort_c.unwrap_or(thermokit_core::comfort::DEFAULT_COMFORT_HALF_WIDTH),
            cdrd_threshold: self.cdrd_threshold.unwrap_or(thermokit_core::comfort::DEFAULT_CDRD_THRESHOLD),
            filter_grouping: self.filter_grouping.unwrap_or(GroupingArg::Population).into(),
            filter_sigmas: self.filter_sigmas.unwrap_or(2.0),
            seed: self.seed.unwrap_or(0),
            jobs: self.jobs.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
            houses: self.houses.unwrap_or(10),
            days: self.days.unwrap_or(365),
            noise: self.noise.unwrap_or(0.0),
        };
        let check = |ok: bool, what: &str| if ok { Ok(()) } else { Err(Error::Config(format!("{what} out of range"))) };
        check(r.bin_width > 0.0 && r.bin_width <= 10.0, "bin-width (0, 10]")?;
        check((0.0..=20.0).contains(&r.comfort_c), "comfort-c [0, 20]")?;
        check(r.cdrd_threshold > 0.0 && r.cdrd_threshold <= 20.0, "cdrd-threshold (0, 20]")?;
        check(r.filter_sigmas > 0.0 && r.filter_sigmas <= 10.0, "filter-sigmas (0, 10]")?;
        check((1..=1024).contains(&r.jobs), "jobs [1, 1024]")?;
        check((1..=100_000).contains(&r.houses), "houses [1, 100000]")?;
        check((1..=3650).contains(&r.days), "days [1, 3650]")?;
        check((0.0..=10.0).contains(&r.noise), "noise [0, 10]")?;
        for (flag, p) in [("input", &self.input), ("metadata", &self.metadata), ("mapping", &self.mapping)] {
            if let Some(p) = p {
                if !p.exists() {
                    return Err(Error::Config(format!("--{flag} {}: no such file or directory", p.display())));
                }
            }
        }
        Ok(r)
    }

    pub fn require_input(&self) -> Result<&Path> {
        self.input.as_deref().ok_or_else(|| Error::Config("--input is required".into()))
    }
}

/// Effective values after defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub out: PathBuf,
    pub bin_width: f64,
    pub comfort_c: f64,
    pub cdrd_threshold: f64,
    pub filter_grouping: Grouping,
    pub filter_sigmas: f64,
    pub seed: u64,
    pub jobs: usize,
    pub houses: usize,
    pub days: usize,
    pub noise: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let c = RunConfig {
            input: Some("traces".into()),
            season_def: Some(SeasonDef::Paramid),
            bin_width: Some(0.5),
            model: Some(ModelArg::Seasonal),
            filter_grouping: Some(GroupingArg::HouseSensor),
            seed: Some(42),
            ..Default::default()
        };
        let text = c.to_toml();
        assert!(text.contains("season-def = \"paramid\""));
        assert_eq!(RunConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn flags_win() {
        let file = RunConfig { seed: Some(1), bin_width: Some(2.0), ..Default::default() };
        let flags = RunConfig { seed: Some(9), ..Default::default() };
        let merged = file.overlay(&flags);
        assert_eq!((merged.seed, merged.bin_width), (Some(9), Some(2.0)));
    }

    #[test]
    fn ranges_checked() {
        assert!(RunConfig { bin_width: Some(0.0), ..Default::default() }.resolve().is_err());
        assert!(RunConfig { jobs: Some(0), ..Default::default() }.resolve().is_err());
        assert!(RunConfig { input: Some("/nonexistent/x".into()), ..Default::default() }.resolve().is_err());
        assert!(RunConfig::from_toml("bogus = 1").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig { seed: Some(1), ..Default::default() };
        let b = RunConfig { seed: Some(2), ..Default::default() };
        assert_eq!(a.hash(), a.clone().hash());
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
