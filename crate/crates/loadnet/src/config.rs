//! Run configuration: a flat `key = value` file, overridden by flags.
//!
//! ```text
//! # daily model, one week of lags
//! data = clean.csv
//! holidays = holidays.txt
//! scale = daily
//! lags = 7
//! context = true
//! hidden = 15
//! split = 0.7,0.15,0.15
//! ```

use std::path::{Path, PathBuf};

use loadnet_core::aggregate::Scale;
use loadnet_core::experiments::{ExperimentPlan, DEFAULT_REPEATS};
use loadnet_core::features::{FeatureSpec, SplitSpec};
use loadnet_core::nn::TrainConfig;

use crate::{io, Error, Result};

pub const KEYS: &[&str] = &[
    "data",
    "holidays",
    "scale",
    "lags",
    "context",
    "factors",
    "hidden",
    "learning_rate",
    "epochs",
    "patience",
    "seed",
    "split",
    "repeats",
    "jobs",
    "out",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Clean hourly series CSV, or a dataset CSV of the configured scale.
    pub data: Option<PathBuf>,
    pub holidays: Option<PathBuf>,
    pub scale: Scale,
    pub lags: usize,
    pub context: bool,
    /// Context columns to keep; `None` keeps all.
    pub factors: Option<Vec<String>>,
    pub hidden: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub patience: usize,
    pub seed: u64,
    pub split: [f64; 3],
    pub repeats: usize,
    pub jobs: usize,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let train = TrainConfig::default();
        let split = SplitSpec::default();
        Self {
            data: None,
            holidays: None,
            scale: Scale::Daily,
            lags: 7,
            context: true,
            factors: None,
            hidden: 15,
            learning_rate: train.learning_rate,
            epochs: train.max_epochs,
            patience: train.patience,
            seed: 0,
            split: [
                split.train_fraction,
                split.val_fraction,
                split.test_fraction,
            ],
            repeats: DEFAULT_REPEATS,
            jobs: 1,
            out: None,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!(
            "invalid value `{value}` for `{key}`"
        ))),
    }
}

pub fn parse_split(value: &str) -> Result<[f64; 3]> {
    let parts: Vec<f64> = value
        .split(',')
        .map(|p| parse_value::<f64>("split", p.trim()))
        .collect::<Result<_>>()?;
    <[f64; 3]>::try_from(parts)
        .map_err(|_| Error::Config(format!("`split` needs three fractions, got `{value}`")))
}

pub fn parse_factors(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

impl RunConfig {
    /// Sets one key. Relative paths are resolved against `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        let value = value.trim();
        let path = || base.join(value);
        match key {
            "data" => self.data = Some(path()),
            "holidays" => self.holidays = Some(path()),
            "out" => self.out = Some(path()),
            "scale" => self.scale = value.parse()?,
            "lags" => self.lags = parse_value(key, value)?,
            "context" => self.context = parse_bool(key, value)?,
            "factors" => self.factors = Some(parse_factors(value)),
            "hidden" => self.hidden = parse_value(key, value)?,
            "learning_rate" => self.learning_rate = parse_value(key, value)?,
            "epochs" => self.epochs = parse_value(key, value)?,
            "patience" => self.patience = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "split" => self.split = parse_split(value)?,
            "repeats" => self.repeats = parse_value(key, value)?,
            "jobs" => self.jobs = parse_value(key, value)?,
            _ => return Err(Error::Config(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text`. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn apply_text(&mut self, text: &str, origin: &Path) -> Result<()> {
        let base = origin.parent().unwrap_or(Path::new(""));
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: origin.to_owned(),
                line: i + 1,
                message: format!("expected `key = value`, found `{line}`"),
            })?;
            self.set(key.trim(), value, base)
                .map_err(|e| Error::Parse {
                    path: origin.to_owned(),
                    line: i + 1,
                    message: e.to_string(),
                })?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut config = Self::default();
        config.apply_text(&io::read_text(path)?, path)?;
        Ok(config)
    }

    pub fn features(&self) -> FeatureSpec {
        FeatureSpec {
            scale: self.scale,
            lag_count: self.lags,
            include_context: self.context,
            factor_mask: self.factors.clone(),
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            max_epochs: self.epochs,
            patience: self.patience,
            seed: self.seed,
        }
    }

    pub fn split_spec(&self) -> SplitSpec {
        let [train_fraction, val_fraction, test_fraction] = self.split;
        SplitSpec {
            train_fraction,
            val_fraction,
            test_fraction,
            seed: self.seed,
        }
    }

    pub fn plan(&self) -> Result<ExperimentPlan> {
        let mut plan = ExperimentPlan::new(
            self.features(),
            self.hidden,
            self.train_config(),
            self.split_spec(),
        )?;
        plan.repeat_count = self.repeats;
        Ok(plan)
    }

    /// Every key with its resolved value, in [`KEYS`] order. Unset paths are
    /// empty strings.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let path = |p: &Option<PathBuf>| {
            p.as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default()
        };
        KEYS.iter()
            .map(|&key| {
                let value = match key {
                    "data" => path(&self.data),
                    "holidays" => path(&self.holidays),
                    "out" => path(&self.out),
                    "scale" => self.scale.to_string(),
                    "lags" => self.lags.to_string(),
                    "context" => self.context.to_string(),
                    "factors" => self
                        .factors
                        .as_ref()
                        .map(|f| f.join(","))
                        .unwrap_or_else(|| "all".into()),
                    "hidden" => self.hidden.to_string(),
                    "learning_rate" => self.learning_rate.to_string(),
                    "epochs" => self.epochs.to_string(),
                    "patience" => self.patience.to_string(),
                    "seed" => self.seed.to_string(),
                    "split" => self.split.map(|f| f.to_string()).join(","),
                    "repeats" => self.repeats.to_string(),
                    "jobs" => self.jobs.to_string(),
                    _ => unreachable!("every key is listed"),
                };
                (key, value)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_and_relative_paths() {
        let mut c = RunConfig::default();
        let text = "# comment\nscale = weekly\nlags=3\ncontext = off\ndata = d/clean.csv\nsplit = 0.6, 0.2, 0.2\n";
        c.apply_text(text, Path::new("/runs/a.conf")).unwrap();
        assert_eq!(c.scale, Scale::Weekly);
        assert_eq!(c.lags, 3);
        assert!(!c.context);
        assert_eq!(c.data.as_deref(), Some(Path::new("/runs/d/clean.csv")));
        assert_eq!(c.split, [0.6, 0.2, 0.2]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let mut c = RunConfig::default();
        let err = c
            .apply_text("lags = 2\nspeed = 9\n", Path::new("x.conf"))
            .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = c.apply_text("lags\n", Path::new("x.conf")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn defaults_build_the_reference_plan() {
        let plan = RunConfig::default().plan().unwrap();
        assert_eq!(plan.topology.to_string(), "15-15-1");
        assert_eq!(plan.repeat_count, 10);
    }

    #[test]
    fn pairs_cover_every_key() {
        let pairs = RunConfig::default().pairs();
        assert_eq!(pairs.iter().map(|p| p.0).collect::<Vec<_>>(), KEYS);
    }
}
