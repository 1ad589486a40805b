//! Run configuration: an optional `key=value` file overridden by flags.

use std::fs;
use std::path::{Path, PathBuf};

use gradtag_core::tagger::{TrainConfig, OPEN_WORLD_THRESHOLD};

use crate::CliError;

/// Everything a subcommand may need, after merging file and flags.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub corpus: Option<PathBuf>,
    pub scale: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub train: TrainConfig,
    pub threshold: f64,
    pub port: u16,
    pub k: usize,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            corpus: None,
            scale: None,
            model: None,
            out: None,
            train: TrainConfig::default(),
            threshold: OPEN_WORLD_THRESHOLD,
            port: 8080,
            k: 20,
        }
    }
}

/// Values given on the command line; `None` leaves the file/default value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub corpus: Option<PathBuf>,
    pub scale: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub max_iters: Option<usize>,
    pub tol: Option<f64>,
    pub lambda_trans: Option<f64>,
    pub lambda_emit: Option<f64>,
    pub min_count: Option<usize>,
    pub threshold: Option<f64>,
    pub port: Option<u16>,
    pub k: Option<usize>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, file: &Path, line: usize) -> Result<T, CliError> {
    value.parse().map_err(|_| CliError::Usage {
        file: Some(file.display().to_string()),
        line,
        message: format!("`{value}` is not a valid value for `{key}`"),
    })
}

impl CliConfig {
    /// Reads a config file. Blank lines and `#` comments are ignored;
    /// relative paths are taken relative to the file's directory.
    pub fn from_file(path: &Path) -> Result<CliConfig, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage {
            file: Some(path.display().to_string()),
            line: 0,
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        let mut overrides = Overrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(CliError::Usage {
                    file: Some(path.display().to_string()),
                    line,
                    message: format!("expected `key=value`, found `{content}`"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            let path_value = || Some(base.join(value));
            match key {
                "corpus" => overrides.corpus = path_value(),
                "scale" => overrides.scale = path_value(),
                "model" => overrides.model = path_value(),
                "out" => overrides.out = path_value(),
                "seed" => overrides.seed = Some(parse_value(key, value, path, line)?),
                "max_iters" => overrides.max_iters = Some(parse_value(key, value, path, line)?),
                "tol" => overrides.tol = Some(parse_value(key, value, path, line)?),
                "lambda_trans" => overrides.lambda_trans = Some(parse_value(key, value, path, line)?),
                "lambda_emit" => overrides.lambda_emit = Some(parse_value(key, value, path, line)?),
                "min_count" => overrides.min_count = Some(parse_value(key, value, path, line)?),
                "threshold" => overrides.threshold = Some(parse_value(key, value, path, line)?),
                "port" => overrides.port = Some(parse_value(key, value, path, line)?),
                "k" => overrides.k = Some(parse_value(key, value, path, line)?),
                other => {
                    return Err(CliError::Usage {
                        file: Some(path.display().to_string()),
                        line,
                        message: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        let mut config = CliConfig::default();
        config.apply(&overrides);
        Ok(config)
    }

    pub fn apply(&mut self, o: &Overrides) {
        let set = |slot: &mut Option<PathBuf>, value: &Option<PathBuf>| {
            if value.is_some() {
                slot.clone_from(value);
            }
        };
        set(&mut self.corpus, &o.corpus);
        set(&mut self.scale, &o.scale);
        set(&mut self.model, &o.model);
        set(&mut self.out, &o.out);
        let t = &mut self.train;
        t.seed = o.seed.unwrap_or(t.seed);
        t.max_iterations = o.max_iters.unwrap_or(t.max_iterations);
        t.tolerance = o.tol.unwrap_or(t.tolerance);
        t.lambda_transition = o.lambda_trans.unwrap_or(t.lambda_transition);
        t.lambda_emission = o.lambda_emit.unwrap_or(t.lambda_emission);
        t.min_word_count = o.min_count.unwrap_or(t.min_word_count);
        self.threshold = o.threshold.unwrap_or(self.threshold);
        self.port = o.port.unwrap_or(self.port);
        self.k = o.k.unwrap_or(self.k);
    }

    /// Tolerances and smoothing must be positive; the threshold a probability.
    pub fn validate(&self) -> Result<(), CliError> {
        self.train.validate().map_err(|e| CliError::usage(e.to_string()))?;
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(CliError::usage(format!(
                "threshold {} is outside [0, 1]",
                self.threshold
            )));
        }
        if self.k == 0 {
            return Err(CliError::usage("k must be at least 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "# run\ncorpus = data\nseed=7\ntol = 1e-4\n").unwrap();
        let mut config = CliConfig::from_file(&path).unwrap();
        assert_eq!(config.corpus, Some(dir.path().join("data")));
        assert_eq!(config.train.seed, 7);
        config.apply(&Overrides {
            seed: Some(9),
            ..Overrides::default()
        });
        assert_eq!((config.train.seed, config.train.tolerance), (9, 1e-4));
    }

    #[test]
    fn bad_lines_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "seed=7\nspeed=9\n").unwrap();
        assert!(matches!(
            CliConfig::from_file(&path),
            Err(CliError::Usage { line: 2, .. })
        ));
        fs::write(&path, "tol=-1\n").unwrap();
        assert!(CliConfig::from_file(&path).unwrap().validate().is_err());
    }
}
