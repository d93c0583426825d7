//! `key = value` settings shared by the library entry points and the CLI.

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    /// Nesting depth of negated Δ beyond which construction warns.
    pub notdelta_cap: usize,
    /// Largest trace alphabet satisfiability will enumerate.
    pub trace_alphabet_cap: u128,
    /// Stem plus period bound for the oracle's bounded quantifier mode.
    pub oracle_lasso_bound: usize,
    /// Check independent top-level subformulas in parallel.
    pub concurrency: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config { notdelta_cap: 2, trace_alphabet_cap: 1_000_000, oracle_lasso_bound: 6, concurrency: false }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {0}: expected `key = value`")]
    Syntax(usize),
    #[error("line {0}: unknown key `{1}`")]
    UnknownKey(usize, String),
    #[error("line {0}: bad value `{2}` for `{1}`")]
    BadValue(usize, String, String),
}

impl Config {
    /// Parses `key = value` lines; `#` starts a comment. Unset keys keep
    /// their defaults.
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut c = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax(i + 1))?;
            let (k, v) = (k.trim(), v.trim());
            let bad = || ConfigError::BadValue(i + 1, k.to_string(), v.to_string());
            match k {
                "notdelta_cap" => c.notdelta_cap = v.parse().map_err(|_| bad())?,
                "trace_alphabet_cap" => c.trace_alphabet_cap = v.replace('_', "").parse().map_err(|_| bad())?,
                "oracle_lasso_bound" => c.oracle_lasso_bound = v.parse().map_err(|_| bad())?,
                "concurrency" => {
                    c.concurrency = match v {
                        "on" | "true" | "1" => true,
                        "off" | "false" | "0" => false,
                        _ => return Err(bad()),
                    }
                }
                _ => return Err(ConfigError::UnknownKey(i + 1, k.to_string())),
            }
        }
        Ok(c)
    }
}
