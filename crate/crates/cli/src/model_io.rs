//! Versioned model files: self-describing JSON carrying the method
//! configuration echo, class list, and every log-probability table.
//! Probabilities are written as decimal strings with 17 significant digits
//! (`{:.16e}`), enough to reconstruct each double bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use bugassign_core::corpus::CategoricalField;
use bugassign_core::features::{Method, MethodConfig};
use bugassign_core::nbayes::{CategoricalSlot, NaiveBayesModel, TermTable};
use bugassign_core::textproc::Vocabulary;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("model file is version {found}, this build reads version {expected}")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("model file is corrupt: {0}")]
    Corrupt(String),
}

/// A double carried as a decimal string with 17 significant digits, so the
/// round trip is exact and the file stays self-describing.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Precise(f64);

impl Serialize for Precise {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&format!("{:.16e}", self.0))
    }
}

impl<'de> Deserialize<'de> for Precise {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s
                .parse::<f64>()
                .map(Precise)
                .map_err(|e| D::Error::custom(format!("bad probability literal '{s}': {e}"))),
            Raw::Number(x) => Ok(Precise(x)),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SlotFile {
    field: String,
    domain: Vec<String>,
    /// Indexed `[class][domain position]`.
    log_prob: Vec<Vec<Precise>>,
    log_unseen: Vec<Precise>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TermsFile {
    vocabulary: Vec<String>,
    /// Per class: term -> log probability, only terms observed in the class;
    /// everything else reconstructs from `log_denominator`.
    log_prob: Vec<BTreeMap<String, Precise>>,
    log_denominator: Vec<Precise>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    method: String,
    categorical_features: Vec<String>,
    term_fraction: f64,
    alpha: Precise,
    classes: Vec<String>,
    log_prior: Vec<Precise>,
    slots: Vec<SlotFile>,
    terms: Option<TermsFile>,
}

fn to_file(model: &NaiveBayesModel) -> ModelFile {
    ModelFile {
        version: MODEL_FORMAT_VERSION,
        method: model.config.method.name().to_string(),
        categorical_features: model
            .config
            .categorical_features
            .iter()
            .map(|f| f.name().to_string())
            .collect(),
        term_fraction: model.config.term_fraction,
        alpha: Precise(model.alpha),
        classes: model.classes.clone(),
        log_prior: model.log_prior.iter().map(|&x| Precise(x)).collect(),
        slots: model
            .config
            .categorical_features
            .iter()
            .zip(&model.slots)
            .map(|(field, slot)| SlotFile {
                field: field.name().to_string(),
                domain: slot.domain.clone(),
                log_prob: slot
                    .log_prob
                    .iter()
                    .map(|row| row.iter().map(|&x| Precise(x)).collect())
                    .collect(),
                log_unseen: slot.log_unseen.iter().map(|&x| Precise(x)).collect(),
            })
            .collect(),
        terms: model.terms.as_ref().map(|t| TermsFile {
            vocabulary: t.vocabulary.terms().to_vec(),
            log_prob: t
                .log_prob
                .iter()
                .map(|per_class| {
                    per_class
                        .iter()
                        .map(|(&col, &lp)| (t.vocabulary.term(col).to_string(), Precise(lp)))
                        .collect()
                })
                .collect(),
            log_denominator: t.log_denominator.iter().map(|&x| Precise(x)).collect(),
        }),
    }
}

fn from_file(file: ModelFile) -> Result<NaiveBayesModel> {
    if file.version != MODEL_FORMAT_VERSION {
        return Err(ModelIoError::VersionMismatch {
            found: file.version,
            expected: MODEL_FORMAT_VERSION,
        }
        .into());
    }
    let corrupt = |what: String| anyhow::Error::from(ModelIoError::Corrupt(what));

    let method = Method::parse(&file.method)
        .map_err(|_| corrupt(format!("unknown method '{}'", file.method)))?;
    let categorical_features = file
        .categorical_features
        .iter()
        .map(|name| {
            CategoricalField::parse(name)
                .map_err(|_| corrupt(format!("unknown categorical feature '{name}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    if file.slots.len() != categorical_features.len() {
        return Err(corrupt(format!(
            "{} slot tables for {} configured features",
            file.slots.len(),
            categorical_features.len()
        )));
    }
    let n_classes = file.classes.len();

    let slots = file
        .slots
        .into_iter()
        .map(|slot| {
            if slot.log_prob.len() != n_classes || slot.log_unseen.len() != n_classes {
                return Err(corrupt(format!(
                    "slot '{}' tables do not cover all {n_classes} classes",
                    slot.field
                )));
            }
            Ok(CategoricalSlot {
                domain: slot.domain,
                log_prob: slot
                    .log_prob
                    .into_iter()
                    .map(|row| row.into_iter().map(|p| p.0).collect())
                    .collect(),
                log_unseen: slot.log_unseen.into_iter().map(|p| p.0).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let terms =
        file.terms
            .map(|t| {
                if t.log_prob.len() != n_classes || t.log_denominator.len() != n_classes {
                    return Err(corrupt(format!(
                        "term tables do not cover all {n_classes} classes"
                    )));
                }
                let vocabulary = Vocabulary::from_terms(t.vocabulary);
                let log_prob =
                    t.log_prob
                        .into_iter()
                        .map(|per_class| {
                            per_class
                                .into_iter()
                                .map(|(term, lp)| {
                                    vocabulary.column(&term).map(|col| (col, lp.0)).ok_or_else(
                                        || corrupt(format!("term '{term}' outside the vocabulary")),
                                    )
                                })
                                .collect::<Result<BTreeMap<u32, f64>>>()
                        })
                        .collect::<Result<Vec<_>>>()?;
                Ok(TermTable {
                    vocabulary,
                    log_prob,
                    log_denominator: t.log_denominator.into_iter().map(|p| p.0).collect(),
                })
            })
            .transpose()?;

    Ok(NaiveBayesModel {
        config: MethodConfig {
            method,
            categorical_features,
            term_fraction: file.term_fraction,
        },
        alpha: file.alpha.0,
        classes: file.classes,
        log_prior: file.log_prior.into_iter().map(|p| p.0).collect(),
        slots,
        terms,
    })
}

pub fn save_model(model: &NaiveBayesModel, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&to_file(model))?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write model {}", path.display()))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<NaiveBayesModel> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read model {}", path.display()))?;
    let file: ModelFile = serde_json::from_str(&text)
        .map_err(|e| ModelIoError::Corrupt(e.to_string()))
        .with_context(|| format!("model file {}", path.display()))?;
    from_file(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precise_round_trips_doubles_exactly() {
        for &x in &[
            0.0,
            -0.0,
            1.0 / 3.0,
            -987.654321e-12,
            f64::MIN_POSITIVE,
            -1.2345678901234567,
            0.1 + 0.2,
        ] {
            let json = serde_json::to_string(&Precise(x)).unwrap();
            let back: Precise = serde_json::from_str(&json).unwrap();
            assert_eq!(x.to_bits(), back.0.to_bits(), "{json}");
        }
    }

    #[test]
    fn precise_accepts_plain_numbers_too() {
        let back: Precise = serde_json::from_str("-0.5").unwrap();
        assert_eq!(back.0, -0.5);
    }
}
