//! Merges command-line flags with the optional key=value config file.
//! Flags win.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use topiclens::config::ConfigFile;
use topiclens::lda::Hyperparams;

use crate::TrainArgs;

/// Topic count when neither a flag nor the config file gives one.
pub const DEFAULT_TOPICS: usize = 20;

/// Bad or missing arguments; reported with exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub struct Settings {
    file: ConfigFile,
}

impl Settings {
    pub fn new(file: ConfigFile) -> Self {
        Self { file }
    }

    pub fn value<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, UsageError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.file.get_parsed(key).map_err(|e| UsageError(e.to_string())),
        }
    }

    pub fn string(&self, flag: Option<&String>, key: &str) -> Option<String> {
        flag.cloned().or_else(|| self.file.get(key).map(String::from))
    }

    pub fn path(&self, flag: Option<&PathBuf>, key: &str) -> Option<PathBuf> {
        flag.cloned().or_else(|| self.file.get(key).map(PathBuf::from))
    }

    pub fn required_path(&self, flag: Option<&PathBuf>, key: &str, flag_name: &str) -> Result<PathBuf, UsageError> {
        self.path(flag, key)
            .ok_or_else(|| UsageError(format!("missing required argument {flag_name} (or `{key}` in the config file)")))
    }

    pub fn hyperparams(&self, args: &TrainArgs) -> Result<Hyperparams, UsageError> {
        let k = self.value(args.k, "k")?.unwrap_or(DEFAULT_TOPICS);
        let defaults = Hyperparams::new(k);
        let hyper = Hyperparams {
            k,
            alpha: self.value(args.alpha, "alpha")?.unwrap_or(defaults.alpha),
            beta: self.value(args.beta, "beta")?.unwrap_or(defaults.beta),
            iterations: self.value(args.iterations, "iterations")?.unwrap_or(defaults.iterations),
            burn_in: self.value(args.burn_in, "burn_in")?.unwrap_or(defaults.burn_in),
            seed: self.value(args.seed, "seed")?.unwrap_or(0),
            min_topic_prob: self.value(args.min_topic_prob, "min_topic_prob")?.unwrap_or(defaults.min_topic_prob),
        };
        hyper.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(hyper)
    }
}
