//! Naive Bayes developer ranking: class priors and per-feature conditional
//! tables estimated from feature vectors, posterior computation in log space
//! with log-sum-exp normalization.
//!
//! Categorical slots get one Laplace-smoothed table per slot with a reserved
//! unseen bucket; summary terms share one multinomial per class with a
//! reserved unseen pseudo-term. Both keep every per-class distribution
//! proper even though the product mixes factor types.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::BugReport;
use crate::error::{Error, Result};
use crate::features::{assemble, FeatureVector, MethodConfig};
use crate::math;
use crate::textproc::{Tokenizer, Vocabulary};

/// Smoothed conditional table of one categorical slot.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalSlot {
    /// Distinct values seen in training, lexicographically ordered.
    pub domain: Vec<String>,
    /// `log P(value | class)`, indexed `[class][domain position]`.
    pub log_prob: Vec<Vec<f64>>,
    /// `log P(unseen | class)`: the reserved bucket for values absent from
    /// the training domain.
    pub log_unseen: Vec<f64>,
}

/// Multinomial term model over the selected vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct TermTable {
    pub vocabulary: Vocabulary,
    /// `log P(term | class)` for terms observed in the class, keyed by
    /// vocabulary column. Selected terms unseen in a class fall back to the
    /// pseudo-term probability derived from `log_denominator`.
    pub log_prob: Vec<BTreeMap<u32, f64>>,
    /// Per class: `ln(total_tf + alpha * (|V| + 1))`.
    pub log_denominator: Vec<f64>,
}

impl TermTable {
    /// `log P(term at column | class)`, smoothed.
    fn log_term(&self, class: usize, column: u32, ln_alpha: f64) -> f64 {
        match self.log_prob[class].get(&column) {
            Some(&lp) => lp,
            None => ln_alpha - self.log_denominator[class],
        }
    }
}

/// A trained model: priors plus conditional tables, together with the
/// method configuration and selected vocabulary it was fitted under, so a
/// model file is self-contained for later recommendation.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesModel {
    pub config: MethodConfig,
    pub alpha: f64,
    /// Lexicographically ordered class labels (developers).
    pub classes: Vec<String>,
    pub log_prior: Vec<f64>,
    /// One table per configured categorical feature, in configuration order.
    pub slots: Vec<CategoricalSlot>,
    /// Present when the method uses text.
    pub terms: Option<TermTable>,
}

/// Ranked posterior over classes; probabilities sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    /// `(class, probability)` in descending probability, ties broken by
    /// ascending class name.
    pub scores: Vec<(String, f64)>,
}

impl Posterior {
    pub fn predicted(&self) -> &str {
        &self.scores[0].0
    }

    pub fn probability_of(&self, class: &str) -> Option<f64> {
        self.scores
            .iter()
            .find(|(c, _)| c == class)
            .map(|&(_, p)| p)
    }
}

/// Estimates a model from encoded vectors and labels.
///
/// Priors are unsmoothed empirical frequencies. Categorical slot `j` with
/// training domain `V_j`: `P(v|c) = (count(c,j,v) + alpha) / (n_c + alpha *
/// (|V_j| + 1))`, the `+1` reserving the unseen bucket. Terms over the
/// selected vocabulary `V`: `P(t|c) = (tf(t,c) + alpha) / (total_tf(c) +
/// alpha * (|V| + 1))`, the `+1` reserving the unseen pseudo-term.
pub fn train(
    cfg: &MethodConfig,
    selected: &Vocabulary,
    vectors: &[FeatureVector],
    labels: &[&str],
    alpha: f64,
) -> Result<NaiveBayesModel> {
    if vectors.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if vectors.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: vectors.len(),
            right: labels.len(),
        });
    }
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidAlpha(alpha));
    }
    let n_slots = cfg.categorical_features.len();
    for v in vectors {
        if v.categorical_values.len() != n_slots {
            return Err(Error::ShapeMismatch {
                expected: n_slots,
                got: v.categorical_values.len(),
            });
        }
        if let Some((&col, _)) = v.term_counts.last_key_value() {
            if col as usize >= selected.len() {
                return Err(Error::TermOutOfRange {
                    column: col,
                    vocabulary: selected.len(),
                });
            }
        }
    }

    let classes: Vec<String> = labels
        .iter()
        .map(|&l| l.to_owned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let class_index: BTreeMap<&str, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let n = vectors.len() as f64;
    let mut class_sizes = vec![0usize; classes.len()];
    for &label in labels {
        class_sizes[class_index[label]] += 1;
    }
    let log_prior = class_sizes
        .iter()
        .map(|&n_c| math::ln(n_c as f64 / n))
        .collect();

    let slots = (0..n_slots)
        .map(|j| {
            let domain: Vec<String> = vectors
                .iter()
                .map(|v| v.categorical_values[j].clone())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let mut counts = vec![vec![0usize; domain.len()]; classes.len()];
            for (v, &label) in vectors.iter().zip(labels) {
                let value = &v.categorical_values[j];
                let pos = domain.binary_search(value).expect("value from domain");
                counts[class_index[label]][pos] += 1;
            }
            let mut log_prob = Vec::with_capacity(classes.len());
            let mut log_unseen = Vec::with_capacity(classes.len());
            for (c, row) in counts.iter().enumerate() {
                let denom = class_sizes[c] as f64 + alpha * (domain.len() as f64 + 1.0);
                let ln_denom = math::ln(denom);
                log_prob.push(
                    row.iter()
                        .map(|&cnt| math::ln(cnt as f64 + alpha) - ln_denom)
                        .collect(),
                );
                log_unseen.push(math::ln(alpha) - ln_denom);
            }
            CategoricalSlot {
                domain,
                log_prob,
                log_unseen,
            }
        })
        .collect();

    let terms = if cfg.uses_text() {
        let mut tf = vec![BTreeMap::<u32, u64>::new(); classes.len()];
        let mut totals = vec![0u64; classes.len()];
        for (v, &label) in vectors.iter().zip(labels) {
            let c = class_index[label];
            for (&col, &count) in &v.term_counts {
                *tf[c].entry(col).or_insert(0) += count as u64;
                totals[c] += count as u64;
            }
        }
        let mut log_prob = Vec::with_capacity(classes.len());
        let mut log_denominator = Vec::with_capacity(classes.len());
        for c in 0..classes.len() {
            let denom = totals[c] as f64 + alpha * (selected.len() as f64 + 1.0);
            let ln_denom = math::ln(denom);
            log_prob.push(
                tf[c]
                    .iter()
                    .map(|(&col, &count)| (col, math::ln(count as f64 + alpha) - ln_denom))
                    .collect::<BTreeMap<u32, f64>>(),
            );
            log_denominator.push(ln_denom);
        }
        Some(TermTable {
            vocabulary: selected.clone(),
            log_prob,
            log_denominator,
        })
    } else {
        None
    };

    Ok(NaiveBayesModel {
        config: cfg.clone(),
        alpha,
        classes,
        log_prior,
        slots,
        terms,
    })
}

impl NaiveBayesModel {
    /// Ranked posterior for an encoded vector. Per class the log score is
    /// the log prior plus the categorical factors (unseen values hit the
    /// reserved bucket) plus `tf * log P(term|class)` for each counted term;
    /// log-sum-exp normalization realizes the evidence denominator.
    pub fn posterior(&self, x: &FeatureVector) -> Result<Posterior> {
        if x.categorical_values.len() != self.slots.len() {
            return Err(Error::ShapeMismatch {
                expected: self.slots.len(),
                got: x.categorical_values.len(),
            });
        }
        if let Some(terms) = &self.terms {
            if let Some((&col, _)) = x.term_counts.last_key_value() {
                if col as usize >= terms.vocabulary.len() {
                    return Err(Error::TermOutOfRange {
                        column: col,
                        vocabulary: terms.vocabulary.len(),
                    });
                }
            }
        }

        let ln_alpha = math::ln(self.alpha);
        let mut log_scores = self.log_prior.clone();
        for (j, slot) in self.slots.iter().enumerate() {
            let value = &x.categorical_values[j];
            match slot.domain.binary_search(value) {
                Ok(pos) => {
                    for (c, score) in log_scores.iter_mut().enumerate() {
                        *score += slot.log_prob[c][pos];
                    }
                }
                Err(_) => {
                    for (c, score) in log_scores.iter_mut().enumerate() {
                        *score += slot.log_unseen[c];
                    }
                }
            }
        }
        if let Some(terms) = &self.terms {
            for (&col, &tf) in &x.term_counts {
                for (c, score) in log_scores.iter_mut().enumerate() {
                    *score += tf as f64 * terms.log_term(c, col, ln_alpha);
                }
            }
        }

        let max = log_scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = log_scores.iter().map(|&s| math::exp(s - max)).sum();
        let log_z = max + math::ln(sum);

        let mut scores: Vec<(String, f64)> = self
            .classes
            .iter()
            .zip(&log_scores)
            .map(|(class, &s)| (class.clone(), math::exp(s - log_z)))
            .collect();
        scores.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Ok(Posterior { scores })
    }

    /// Encodes a raw report with the model's own configuration and
    /// vocabulary, then ranks.
    pub fn score_report(&self, report: &BugReport, tokenizer: &Tokenizer) -> Result<Posterior> {
        let empty = Vocabulary::empty();
        let selected = self.terms.as_ref().map(|t| &t.vocabulary).unwrap_or(&empty);
        let x = assemble(report, &self.config, selected, tokenizer);
        self.posterior(&x)
    }

    /// Top-k developer recommendation for a raw report.
    pub fn recommend(
        &self,
        report: &BugReport,
        tokenizer: &Tokenizer,
        k: usize,
    ) -> Result<Vec<(String, f64)>> {
        if k == 0 {
            return Err(Error::InvalidTopK);
        }
        let mut scores = self.score_report(report, tokenizer)?.scores;
        scores.truncate(k);
        Ok(scores)
    }

    /// Verifies the stochastic-table invariants: priors, every categorical
    /// slot (domain plus unseen bucket), and the term multinomial (selected
    /// vocabulary plus pseudo-term) each sum to 1 within `1e-9`.
    pub fn validate(&self) -> Result<()> {
        let check = |what: &str, sum: f64| {
            if math::abs(sum - 1.0) <= 1e-9 {
                Ok(())
            } else {
                Err(Error::BrokenInvariant(format!("{what} sums to {sum:.12}")))
            }
        };
        check(
            "priors",
            self.log_prior.iter().map(|&lp| math::exp(lp)).sum::<f64>(),
        )?;
        for (j, slot) in self.slots.iter().enumerate() {
            for c in 0..self.classes.len() {
                let sum = slot.log_prob[c]
                    .iter()
                    .map(|&lp| math::exp(lp))
                    .sum::<f64>()
                    + math::exp(slot.log_unseen[c]);
                check(&format!("slot {j} class {c}"), sum)?;
            }
        }
        if let Some(terms) = &self.terms {
            let ln_alpha = math::ln(self.alpha);
            for c in 0..self.classes.len() {
                let unseen = math::exp(ln_alpha - terms.log_denominator[c]);
                let stored: f64 = terms.log_prob[c].values().map(|&lp| math::exp(lp)).sum();
                let absent = terms.vocabulary.len() - terms.log_prob[c].len();
                let sum = stored + absent as f64 * unseen + unseen;
                check(&format!("terms class {c}"), sum)?;
            }
        }
        Ok(())
    }
}
