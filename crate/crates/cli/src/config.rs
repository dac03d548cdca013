//! Run configuration. Precedence is fixed: built-in defaults, then the
//! config file (flat `key=value` lines, `#` comments), then command-line
//! flags.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use bugassign_core::corpus::{TimeWindow, Timestamp};
use bugassign_core::features::{Method, MethodConfig};

use crate::corpus_io::parse_timestamp;
use crate::fetch::FieldMap;
use crate::report::OutputFormat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    One(Method),
    All,
}

impl MethodChoice {
    pub fn parse(name: &str) -> Result<Self> {
        if name.eq_ignore_ascii_case("all") {
            Ok(MethodChoice::All)
        } else {
            Method::parse(name).map(MethodChoice::One).map_err(|_| {
                anyhow::anyhow!("unknown method: {name} (expected CF, CHI2, TRAM, or all)")
            })
        }
    }

    pub fn methods(self) -> Vec<Method> {
        match self {
            MethodChoice::One(m) => vec![m],
            MethodChoice::All => Method::ALL.to_vec(),
        }
    }
}

/// Everything a command run needs, with the published experimental setup as
/// the defaults: 10 folds, Laplace alpha 1, activity threshold 15,
/// status/resolution filters, 10% terms for CHI2 and 1% for TRAM.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub url: Option<String>,
    pub method: MethodChoice,
    pub folds: usize,
    pub seed: u64,
    pub alpha: f64,
    pub min_fixed: usize,
    pub statuses: Vec<String>,
    pub resolutions: Vec<String>,
    pub terms_fraction_chi2: f64,
    pub terms_fraction_tram: f64,
    pub stopwords: Option<PathBuf>,
    pub min_token_len: usize,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub top_k: usize,
    pub window_start: Option<Timestamp>,
    pub window_end: Option<Timestamp>,
    pub page_limit: usize,
    pub field_map: FieldMap,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            url: None,
            method: MethodChoice::All,
            folds: 10,
            seed: 42,
            alpha: 1.0,
            min_fixed: 15,
            statuses: vec!["CLOSED".into(), "VERIFIED".into(), "RESOLVED".into()],
            resolutions: vec!["FIXED".into()],
            terms_fraction_chi2: 0.10,
            terms_fraction_tram: 0.01,
            stopwords: None,
            min_token_len: 2,
            format: OutputFormat::Table,
            output: None,
            model: None,
            top_k: 1,
            window_start: None,
            window_end: None,
            page_limit: 500,
            field_map: FieldMap::default(),
        }
    }
}

fn comma_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

impl RunConfig {
    /// Applies one `key=value` config file on top of the current values.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        for (number, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("config line {}: expected key=value", number + 1))?;
            self.apply_key(key.trim(), value.trim())
                .with_context(|| format!("config line {}", number + 1))?;
        }
        Ok(())
    }

    fn apply_key(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "input" => self.input = Some(PathBuf::from(value)),
            "url" => self.url = Some(value.to_string()),
            "method" => self.method = MethodChoice::parse(value)?,
            "folds" => self.folds = value.parse().context("folds must be an integer")?,
            "seed" => self.seed = value.parse().context("seed must be an integer")?,
            "alpha" => self.alpha = value.parse().context("alpha must be a number")?,
            "min_fixed" => {
                self.min_fixed = value.parse().context("min_fixed must be an integer")?
            }
            "statuses" => self.statuses = comma_list(value),
            "resolutions" => self.resolutions = comma_list(value),
            "terms_fraction_chi2" => {
                self.terms_fraction_chi2 = value
                    .parse()
                    .context("terms_fraction_chi2 must be a number")?
            }
            "terms_fraction_tram" => {
                self.terms_fraction_tram = value
                    .parse()
                    .context("terms_fraction_tram must be a number")?
            }
            "stopwords" => self.stopwords = Some(PathBuf::from(value)),
            "min_token_len" => {
                self.min_token_len = value.parse().context("min_token_len must be an integer")?
            }
            "format" => self.format = OutputFormat::parse(value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "model" => self.model = Some(PathBuf::from(value)),
            "top_k" => self.top_k = value.parse().context("top_k must be an integer")?,
            "window_start" => {
                self.window_start = Some(
                    parse_timestamp(value)
                        .with_context(|| format!("window_start '{value}' is not a timestamp"))?,
                )
            }
            "window_end" => {
                self.window_end = Some(
                    parse_timestamp(value)
                        .with_context(|| format!("window_end '{value}' is not a timestamp"))?,
                )
            }
            "page_limit" => {
                self.page_limit = value.parse().context("page_limit must be an integer")?
            }
            _ => {
                if let Some(local) = key.strip_prefix("map_") {
                    self.field_map.set(local, value)?;
                } else {
                    bail!("unknown config key: {key}");
                }
            }
        }
        Ok(())
    }

    pub fn window(&self) -> Option<TimeWindow> {
        match (self.window_start, self.window_end) {
            (Some(start), Some(end)) => Some(TimeWindow { start, end }),
            (Some(start), None) => Some(TimeWindow {
                start,
                end: Timestamp(i64::MAX),
            }),
            (None, Some(end)) => Some(TimeWindow {
                start: Timestamp(i64::MIN),
                end,
            }),
            (None, None) => None,
        }
    }

    /// Per-method configuration honoring any configured fraction override.
    pub fn method_config(&self, method: Method) -> MethodConfig {
        let fraction = match method {
            Method::Chi2 => Some(self.terms_fraction_chi2),
            Method::Tram => Some(self.terms_fraction_tram),
            Method::Cf => None,
        };
        MethodConfig::for_method(method, fraction)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_the_published_setup() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.folds, 10);
        assert_eq!(cfg.alpha, 1.0);
        assert_eq!(cfg.min_fixed, 15);
        assert_eq!(cfg.terms_fraction_chi2, 0.10);
        assert_eq!(cfg.terms_fraction_tram, 0.01);
        assert_eq!(cfg.statuses, ["CLOSED", "VERIFIED", "RESOLVED"]);
        assert_eq!(cfg.resolutions, ["FIXED"]);
        assert_eq!(cfg.top_k, 1);
        assert_eq!(cfg.min_token_len, 2);
    }

    #[test]
    fn file_overrides_defaults() {
        let mut cfg = RunConfig::default();
        cfg.apply_file(
            "# paper window preset\nseed=7\nfolds=5\nstatuses=RESOLVED\n\
             window_start=2011-12-01\nwindow_end=2012-12-31T23:59:59Z\nmap_assignee=owner\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.folds, 5);
        assert_eq!(cfg.statuses, ["RESOLVED"]);
        assert!(cfg.window().is_some());
        assert_eq!(cfg.field_map.remote("assignee"), "owner");
        // Untouched keys keep their defaults.
        assert_eq!(cfg.alpha, 1.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut cfg = RunConfig::default();
        assert!(cfg.apply_file("no_such_key=1\n").is_err());
        assert!(cfg.apply_file("justtext\n").is_err());
    }

    #[test]
    fn method_configs_pick_up_fraction_overrides() {
        let mut cfg = RunConfig::default();
        cfg.apply_file("terms_fraction_chi2=0.25\n").unwrap();
        assert_eq!(cfg.method_config(Method::Chi2).term_fraction, 0.25);
        assert_eq!(cfg.method_config(Method::Tram).term_fraction, 0.01);
        assert_eq!(cfg.method_config(Method::Cf).term_fraction, 0.0);
    }
}
