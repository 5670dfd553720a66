//! Run configuration files: TOML with an explicit schema version, laid
//! over the preset of the selected mode.

use std::path::Path;

use anyhow::{bail, Context, Result};
use lgptp::data::{AugmentConfig, Preset};
use lgptp::evolution::Mode;
use lgptp::experiment::ExperimentConfig;
use lgptp::EvolutionConfig;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// On-disk layout of a fully resolved configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: u32,
    pub preset: Preset,
    pub folds: usize,
    pub repeats: usize,
    pub evolution: EvolutionConfig,
    pub augmentation: AugmentConfig,
}

impl ConfigFile {
    pub fn from_experiment(e: &ExperimentConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            preset: e.preset,
            folds: e.folds,
            repeats: e.repeats,
            evolution: e.evolution.clone(),
            augmentation: e.augmentation.clone(),
        }
    }

    pub fn into_experiment(self) -> ExperimentConfig {
        ExperimentConfig {
            evolution: self.evolution,
            preset: self.preset,
            folds: self.folds,
            repeats: self.repeats,
            augmentation: self.augmentation,
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).context("serializing configuration")
    }
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub preset: Option<Preset>,
}

fn overlay(base: &mut toml::Table, user: &toml::Table, path: &str) -> Result<()> {
    for (key, value) in user {
        let full = if path.is_empty() {
            key.clone()
        } else {
            format!("{path}.{key}")
        };
        match (base.get_mut(key), value) {
            (None, _) => bail!("unknown configuration key `{full}`"),
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) => overlay(b, u, &full)?,
            (Some(slot), v) => *slot = v.clone(),
        }
    }
    Ok(())
}

fn file_mode(user: &toml::Table) -> Result<Option<Mode>> {
    let Some(mode) = user
        .get("evolution")
        .and_then(|e| e.as_table())
        .and_then(|e| e.get("mode"))
    else {
        return Ok(None);
    };
    let s = mode
        .as_str()
        .context("configuration key `evolution.mode` must be a string")?;
    s.parse::<Mode>()
        .map(Some)
        .map_err(|e| anyhow::anyhow!("configuration key `evolution.mode`: {e}"))
}

/// Resolves the effective configuration from an optional TOML document.
///
/// The base is the preset for the mode given on the command line, else
/// `evolution.mode` from the document, else fish. Keys in the document
/// replace preset values; a key the preset lacks is an error naming it.
pub fn resolve(text: Option<&str>, overrides: &Overrides) -> Result<ExperimentConfig> {
    let user: toml::Table = match text {
        Some(t) => toml::from_str(t).context("parsing configuration")?,
        None => toml::Table::new(),
    };
    if text.is_some() {
        match user.get("schema_version") {
            None => bail!("configuration key `schema_version` is required"),
            Some(toml::Value::Integer(v)) if *v == SCHEMA_VERSION as i64 => {}
            Some(v) => bail!(
                "configuration key `schema_version`: unsupported value {v} (expected {SCHEMA_VERSION})"
            ),
        }
    }
    let mode = match overrides.mode {
        Some(m) => m,
        None => file_mode(&user)?.unwrap_or(Mode::Fish),
    };
    let preset = ConfigFile::from_experiment(&ExperimentConfig::for_mode(mode));
    let mut table = toml::Table::try_from(&preset).context("encoding preset")?;
    overlay(&mut table, &user, "")?;
    let file: ConfigFile = toml::Value::Table(table)
        .try_into()
        .context("invalid configuration")?;
    let mut config = file.into_experiment();
    config.evolution.mode = mode;
    if let Some(seed) = overrides.seed {
        config.evolution.seed = seed;
    }
    if let Some(p) = overrides.preset {
        config.preset = p;
    }
    config
        .evolution
        .validate()
        .map_err(|e| anyhow::anyhow!("configuration key `evolution.{}`: {}", e.key, e.reason))?;
    if config.folds < 2 {
        bail!("configuration key `folds`: need at least 2");
    }
    if config.repeats == 0 {
        bail!("configuration key `repeats`: need at least 1");
    }
    let factor = config.augmentation.factor;
    if factor.is_nan() || factor < 1.0 {
        bail!("configuration key `augmentation.factor`: must be at least 1");
    }
    Ok(config)
}

pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<ExperimentConfig> {
    let text = match path {
        Some(p) => {
            Some(std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)
        }
        None => None,
    };
    resolve(text.as_deref(), overrides)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = resolve(None, &Overrides::default()).unwrap();
        assert_eq!(c, ExperimentConfig::fish());
        let text = ConfigFile::from_experiment(&c).to_toml().unwrap();
        assert_eq!(resolve(Some(&text), &Overrides::default()).unwrap(), c);
    }

    #[test]
    fn file_values_and_flags() {
        let text =
            "schema_version = 1\nrepeats = 2\n[evolution]\nmode = \"srbench\"\ngenerations = 7\n";
        let c = resolve(Some(text), &Overrides::default()).unwrap();
        assert_eq!(c.repeats, 2);
        assert_eq!(c.evolution.generations, 7);
        assert_eq!(c.evolution.register_count, 8);
        assert_eq!(c.augmentation.factor, 1.0);
        let o = Overrides {
            mode: Some(Mode::Fish),
            seed: Some(99),
            preset: Some(Preset::FtSnv),
        };
        let c = resolve(Some(text), &o).unwrap();
        assert_eq!(c.evolution.register_count, 30);
        assert_eq!(c.evolution.mode, Mode::Fish);
        assert_eq!(c.evolution.seed, 99);
        assert_eq!(c.preset, Preset::FtSnv);
    }

    #[test]
    fn unknown_key_is_named() {
        let text = "schema_version = 1\n[evolution]\npopsize = 3\n";
        let e = resolve(Some(text), &Overrides::default()).unwrap_err();
        assert!(e.to_string().contains("evolution.popsize"), "{e}");
        let e = resolve(Some("schema_version = 1\nfoo = 1\n"), &Overrides::default()).unwrap_err();
        assert!(e.to_string().contains("`foo`"), "{e}");
    }

    #[test]
    fn version_required() {
        assert!(resolve(Some("repeats = 1\n"), &Overrides::default()).is_err());
        assert!(resolve(Some("schema_version = 2\n"), &Overrides::default()).is_err());
    }

    #[test]
    fn invalid_values_name_the_key() {
        let text = "schema_version = 1\n[evolution]\npopulation_size = 0\n";
        let e = resolve(Some(text), &Overrides::default()).unwrap_err();
        assert!(e.to_string().contains("population_size"), "{e}");
        let e = resolve(
            Some("schema_version = 1\nfolds = \"six\"\n"),
            &Overrides::default(),
        )
        .unwrap_err();
        assert!(format!("{e:#}").contains("folds"), "{e:#}");
    }
}
