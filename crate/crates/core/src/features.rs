//! Feature scoring and selection: chi-square statistics for summary terms,
//! gain-ratio ranking for categorical fields, and assembly of per-method
//! feature vectors.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::{BugReport, CategoricalField, Corpus, MISSING};
use crate::error::{Error, Result};
use crate::math;
use crate::textproc::{BugTermMatrix, Tokenizer, Vocabulary};

/// The three recommendation methods under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Categorical fields only: component, operating system, priority.
    Cf,
    /// Text only: the top 10% of summary terms by chi-square.
    Chi2,
    /// Blended: the top 1% of terms plus component and reporter.
    Tram,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Cf, Method::Chi2, Method::Tram];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cf => "CF",
            Method::Chi2 => "CHI2",
            Method::Tram => "TRAM",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name.to_uppercase().as_str() {
            "CF" => Ok(Method::Cf),
            "CHI2" | "CHI-2" => Ok(Method::Chi2),
            "TRAM" => Ok(Method::Tram),
            other => Err(Error::UnknownField(other.to_owned())),
        }
    }
}

/// Which features a method uses: an ordered list of categorical fields and
/// the fraction of the term vocabulary kept by chi-square selection.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodConfig {
    pub method: Method,
    pub categorical_features: Vec<CategoricalField>,
    pub term_fraction: f64,
}

impl MethodConfig {
    pub fn cf() -> Self {
        MethodConfig {
            method: Method::Cf,
            categorical_features: vec![
                CategoricalField::Component,
                CategoricalField::OperatingSystem,
                CategoricalField::Priority,
            ],
            term_fraction: 0.0,
        }
    }

    pub fn chi2() -> Self {
        MethodConfig {
            method: Method::Chi2,
            categorical_features: vec![],
            term_fraction: 0.10,
        }
    }

    pub fn tram() -> Self {
        MethodConfig {
            method: Method::Tram,
            categorical_features: vec![CategoricalField::Component, CategoricalField::Reporter],
            term_fraction: 0.01,
        }
    }

    /// Standard configuration for a method, optionally overriding the term
    /// fraction (ignored for CF, which uses no text).
    pub fn for_method(method: Method, term_fraction: Option<f64>) -> Self {
        let mut cfg = match method {
            Method::Cf => MethodConfig::cf(),
            Method::Chi2 => MethodConfig::chi2(),
            Method::Tram => MethodConfig::tram(),
        };
        if method != Method::Cf {
            if let Some(p) = term_fraction {
                cfg.term_fraction = p;
            }
        }
        cfg
    }

    pub fn uses_text(&self) -> bool {
        self.term_fraction > 0.0
    }
}

/// Chi-square statistic of one term, maximized over one-vs-rest class splits.
#[derive(Debug, Clone, PartialEq)]
pub struct TermScore {
    pub term: String,
    pub chi2: f64,
}

/// Gain ratio of one categorical field.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureScore {
    pub feature: CategoricalField,
    pub gain_ratio: f64,
}

/// One report, encoded for a particular method: the configured categorical
/// values in order, and term frequencies keyed by column in the selected
/// vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector {
    pub categorical_values: Vec<String>,
    pub term_counts: BTreeMap<u32, u32>,
}

/// Chi-square score per vocabulary term, in vocabulary order.
///
/// For term `t` and class `c`, over `N` documents with `A` documents of `c`
/// containing `t`, `B` documents of other classes containing `t`, `C`
/// documents of `c` lacking `t`, and `D` documents of other classes lacking
/// `t`:
///
/// ```text
/// chi2(t, c) = N * (A*D - C*B)^2 / ((A+C)(B+D)(A+B)(C+D))
/// ```
///
/// A zero factor in the denominator means presence cannot discriminate and
/// scores 0. The reported score is the maximum over classes.
pub fn chi2_scores(
    matrix: &BugTermMatrix,
    vocab: &Vocabulary,
    labels: &[&str],
) -> Result<Vec<TermScore>> {
    if matrix.n_rows() != labels.len() {
        return Err(Error::LengthMismatch {
            left: matrix.n_rows(),
            right: labels.len(),
        });
    }
    let mut class_ids: BTreeMap<&str, usize> = BTreeMap::new();
    for &label in labels {
        let next = class_ids.len();
        class_ids.entry(label).or_insert(next);
    }
    if class_ids.len() < 2 {
        return Err(Error::SingleClass);
    }

    let n_classes = class_ids.len();
    let n_terms = vocab.len();
    let n = matrix.n_rows() as u64;

    let mut class_sizes = vec![0u64; n_classes];
    // Document frequency of each term, total and per class.
    let mut df = vec![0u64; n_terms];
    let mut df_class = vec![vec![0u64; n_terms]; n_classes];

    for (row, &label) in labels.iter().enumerate() {
        let class = class_ids[label];
        class_sizes[class] += 1;
        for &(col, _tf) in matrix.row(row) {
            df[col as usize] += 1;
            df_class[class][col as usize] += 1;
        }
    }

    let scores = (0..n_terms)
        .map(|t| {
            let mut best = 0.0f64;
            for c in 0..n_classes {
                let a = df_class[c][t];
                let b = df[t] - a;
                let n_c = class_sizes[c];
                let d = (n - n_c) - b;
                // Denominator factors: class size, complement size, document
                // frequency, complement document frequency.
                let f1 = n_c;
                let f2 = n - n_c;
                let f3 = df[t];
                let f4 = n - df[t];
                if f1 == 0 || f2 == 0 || f3 == 0 || f4 == 0 {
                    continue;
                }
                let cc = n_c - a;
                let diff = (a * d) as i128 - (cc * b) as i128;
                let numerator = n as u128 * (diff * diff) as u128;
                let denominator = f1 as u128 * f2 as u128 * f3 as u128 * f4 as u128;
                let value = numerator as f64 / denominator as f64;
                if value > best {
                    best = value;
                }
            }
            TermScore {
                term: vocab.term(t as u32).to_owned(),
                chi2: best,
            }
        })
        .collect();
    Ok(scores)
}

/// Number of terms kept by a fractional cut: `ceil(fraction * n)`, computed
/// with a small epsilon so decimal fractions such as 0.10 do not round up an
/// exact product (`0.10 * 10` must keep 1 term, not 2).
fn selection_size(fraction: f64, n: usize) -> usize {
    let k = math::ceil(fraction * n as f64 - 1e-9) as usize;
    k.clamp(1, n)
}

/// Keeps the best `ceil(fraction * |scores|)` terms by descending chi-square,
/// ties broken by ascending term, returned as a vocabulary.
pub fn select_terms(scores: &[TermScore], fraction: f64) -> Result<Vocabulary> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidFraction(fraction));
    }
    if scores.is_empty() {
        return Ok(Vocabulary::empty());
    }
    let mut ranked: Vec<&TermScore> = scores.iter().collect();
    ranked.sort_by(|a, b| b.chi2.total_cmp(&a.chi2).then_with(|| a.term.cmp(&b.term)));
    let k = selection_size(fraction, ranked.len());
    Ok(Vocabulary::from_terms(
        ranked[..k].iter().map(|s| s.term.clone()),
    ))
}

/// Shannon entropy in bits of a count distribution; `0 log 0` is 0.
fn entropy(counts: impl Iterator<Item = usize>, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    let mut h = 0.0;
    for count in counts {
        if count > 0 {
            let p = count as f64 / total;
            h -= p * math::log2(p);
        }
    }
    h
}

/// Gain ratio of a categorical field against the assignee label:
/// `(H(C) - H(C|f)) / H(f)`, entropies in bits over empirical frequencies.
/// A constant feature has `H(f) = 0` and scores 0 by convention.
pub fn gain_ratio(corpus: &Corpus, feature: CategoricalField) -> FeatureScore {
    let n = corpus.len();
    if n == 0 {
        return FeatureScore {
            feature,
            gain_ratio: 0.0,
        };
    }

    let mut class_counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut value_counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut joint: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for report in corpus.reports() {
        let class = report.assignee.as_str();
        let value = report.categorical(feature);
        *class_counts.entry(class).or_insert(0) += 1;
        *value_counts.entry(value).or_insert(0) += 1;
        *joint.entry((value, class)).or_insert(0) += 1;
    }

    let h_feature = entropy(value_counts.values().copied(), n);
    if h_feature == 0.0 {
        return FeatureScore {
            feature,
            gain_ratio: 0.0,
        };
    }

    let h_class = entropy(class_counts.values().copied(), n);
    let mut h_conditional = 0.0;
    for (&value, &v_count) in &value_counts {
        let within = joint
            .range((value, "")..)
            .take_while(|((v, _), _)| *v == value)
            .map(|(_, &c)| c);
        h_conditional += (v_count as f64 / n as f64) * entropy(within, v_count);
    }

    let gr = (h_class - h_conditional) / h_feature;
    FeatureScore {
        feature,
        gain_ratio: gr.clamp(0.0, 1.0),
    }
}

/// Gain ratio for each candidate field, sorted by descending ratio with ties
/// in field-name order. Pure report; method configurations stay fixed.
pub fn rank_features(corpus: &Corpus, candidates: &[CategoricalField]) -> Vec<FeatureScore> {
    let mut scores: Vec<FeatureScore> = candidates.iter().map(|&f| gain_ratio(corpus, f)).collect();
    scores.sort_by(|a, b| {
        b.gain_ratio
            .total_cmp(&a.gain_ratio)
            .then_with(|| a.feature.name().cmp(b.feature.name()))
    });
    scores
}

/// Encodes one report under a method configuration: configured categorical
/// values in order (missing values become the reserved token) and term
/// frequencies restricted to the selected vocabulary.
pub fn assemble(
    report: &BugReport,
    cfg: &MethodConfig,
    selected: &Vocabulary,
    tokenizer: &Tokenizer,
) -> FeatureVector {
    let categorical_values = cfg
        .categorical_features
        .iter()
        .map(|&f| {
            let v = report.categorical(f);
            if v.is_empty() { MISSING } else { v }.to_owned()
        })
        .collect();

    let mut term_counts = BTreeMap::new();
    if cfg.uses_text() && !selected.is_empty() {
        for token in tokenizer.tokenize(&report.summary) {
            if let Some(col) = selected.column(&token) {
                *term_counts.entry(col).or_insert(0) += 1;
            }
        }
    }

    FeatureVector {
        categorical_values,
        term_counts,
    }
}

/// Audit dump of term scores, ranked as selection would rank them:
/// `term<TAB>chi2`, one line each, after a header.
pub fn term_scores_tsv(scores: &[TermScore]) -> String {
    let mut ranked: Vec<&TermScore> = scores.iter().collect();
    ranked.sort_by(|a, b| b.chi2.total_cmp(&a.chi2).then_with(|| a.term.cmp(&b.term)));
    let mut out = String::from("term\tchi2\n");
    for s in ranked {
        out.push_str(&format!("{}\t{:.6}\n", s.term, s.chi2));
    }
    out
}

/// Audit dump of gain-ratio ranks: `feature<TAB>gain_ratio` per line.
pub fn feature_scores_tsv(scores: &[FeatureScore]) -> String {
    let mut out = String::from("feature\tgain_ratio\n");
    for s in scores {
        out.push_str(&format!("{}\t{:.6}\n", s.feature.name(), s.gain_ratio));
    }
    out
}
