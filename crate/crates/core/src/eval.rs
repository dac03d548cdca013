//! Stratified k-fold cross-validation and the evaluation metrics:
//! per-class and aggregate precision, recall, F-score, and one-vs-rest
//! rank-based AUC.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::features::MethodConfig;
use crate::pipeline::fit;
use crate::rng::SplitMix64;
use crate::textproc::Tokenizer;

/// Fold assignment for every corpus report. Within each class the report
/// indices are shuffled by a seeded SplitMix64 stream and dealt round-robin,
/// so per-class fold counts differ by at most one and the plan is a pure
/// function of `(corpus, k, seed)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    /// Fold id per corpus report position.
    pub assignment: Vec<u32>,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: u32) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn train_indices(&self, fold: u32) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &f)| f != fold)
            .map(|(i, _)| i)
            .collect()
    }
}

pub fn plan_folds(corpus: &Corpus, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::TooFewFolds(k));
    }
    if k > corpus.len() {
        return Err(Error::TooManyFolds {
            folds: k,
            reports: corpus.len(),
        });
    }

    let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, report) in corpus.reports().iter().enumerate() {
        by_class
            .entry(report.assignee.as_str())
            .or_default()
            .push(i);
    }

    let mut assignment = vec![0u32; corpus.len()];
    let mut rng = SplitMix64::new(seed);
    for indices in by_class.values_mut() {
        rng.shuffle(indices);
        for (position, &report_index) in indices.iter().enumerate() {
            assignment[report_index] = (position % k) as u32;
        }
    }
    Ok(FoldPlan {
        k,
        seed,
        assignment,
    })
}

/// One held-out prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionEntry {
    pub report_id: u64,
    pub fold: u32,
    pub true_class: String,
    pub predicted: String,
    /// Full posterior of the fold's model, descending.
    pub scores: Vec<(String, f64)>,
}

/// A fold that could not be evaluated, with the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldFailure {
    pub fold: u32,
    pub reason: String,
}

/// All held-out predictions of a cross-validation run, merged in
/// `(fold, report id)` order, plus any failed folds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictionLog {
    pub entries: Vec<PredictionEntry>,
    pub failures: Vec<FoldFailure>,
}

impl PredictionLog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Fraction of entries whose prediction matches the true class.
    pub fn accuracy(&self) -> f64 {
        if self.entries.is_empty() {
            return 0.0;
        }
        let correct = self
            .entries
            .iter()
            .filter(|e| e.predicted == e.true_class)
            .count();
        correct as f64 / self.entries.len() as f64
    }
}

/// Cross-validates one method. Per fold, the vocabulary, chi-square
/// selection, and model are fitted on the training portion only, then every
/// held-out report is scored. A training portion with fewer than two
/// classes fails that fold with a diagnostic; the remaining folds still run.
pub fn run_cv(
    corpus: &Corpus,
    cfg: &MethodConfig,
    plan: &FoldPlan,
    tokenizer: &Tokenizer,
    alpha: f64,
) -> Result<PredictionLog> {
    if plan.assignment.len() != corpus.len() {
        return Err(Error::LengthMismatch {
            left: plan.assignment.len(),
            right: corpus.len(),
        });
    }

    let mut log = PredictionLog::default();
    for fold in 0..plan.k as u32 {
        let test = plan.test_indices(fold);
        if test.is_empty() {
            continue;
        }
        let train_reports: Vec<_> = plan
            .train_indices(fold)
            .into_iter()
            .map(|i| corpus.reports()[i].clone())
            .collect();

        let distinct: BTreeSet<&str> = train_reports.iter().map(|r| r.assignee.as_str()).collect();
        if distinct.len() < 2 {
            log.failures.push(FoldFailure {
                fold,
                reason: format!("training portion has {} class(es)", distinct.len()),
            });
            continue;
        }

        let train_corpus = Corpus::new(train_reports, corpus.source(), corpus.window());
        let fold_result: Result<Vec<PredictionEntry>> = (|| {
            let fitted = fit(&train_corpus, cfg, tokenizer, alpha)?;
            test.iter()
                .map(|&i| {
                    let report = &corpus.reports()[i];
                    let posterior = fitted.model.score_report(report, tokenizer)?;
                    Ok(PredictionEntry {
                        report_id: report.id,
                        fold,
                        true_class: report.assignee.clone(),
                        predicted: posterior.predicted().to_owned(),
                        scores: posterior.scores,
                    })
                })
                .collect()
        })();
        match fold_result {
            Ok(entries) => log.entries.extend(entries),
            Err(e) => log.failures.push(FoldFailure {
                fold,
                reason: format!("{e}"),
            }),
        }
    }

    log.entries.sort_by_key(|e| (e.fold, e.report_id));
    Ok(log)
}

/// Trains on the whole corpus and scores every report with that same model
/// (fold checks disabled). Useful as a cross-check for single-report
/// recommendation paths; not an unbiased evaluation.
pub fn run_resubstitution(
    corpus: &Corpus,
    cfg: &MethodConfig,
    tokenizer: &Tokenizer,
    alpha: f64,
) -> Result<PredictionLog> {
    let fitted = fit(corpus, cfg, tokenizer, alpha)?;
    let entries = corpus
        .reports()
        .iter()
        .map(|report| {
            let posterior = fitted.model.score_report(report, tokenizer)?;
            Ok(PredictionEntry {
                report_id: report.id,
                fold: 0,
                true_class: report.assignee.clone(),
                predicted: posterior.predicted().to_owned(),
                scores: posterior.scores,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PredictionLog {
        entries,
        failures: Vec::new(),
    })
}

/// Metrics of one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub support: usize,
    /// One-vs-rest rank AUC; absent when the class has no positives or no
    /// negatives in the log.
    pub auc: Option<f64>,
}

/// Pooled evaluation report in the shape of a published results table.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub per_class: Vec<ClassMetrics>,
    /// Support-weighted macro precision.
    pub precision: f64,
    /// Support-weighted macro recall (equals pooled accuracy under top-1).
    pub recall: f64,
    /// Harmonic mean of the aggregate precision and recall.
    pub f_score: f64,
    /// Support-weighted mean of per-class AUC over classes that have both
    /// positives and negatives; 0.5 when no class qualifies.
    pub auc: f64,
    /// Pooled micro accuracy.
    pub accuracy: f64,
    pub n_entries: usize,
}

/// `2PR / (P + R)`, 0 when both are 0.
pub fn f_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Rank-based one-vs-rest AUC (Mann-Whitney) with midrank tie handling.
fn rank_auc(scores: &[f64], positive: &[bool]) -> f64 {
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    let mut ranks = vec![0.0f64; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // 1-based midrank shared by the tied block.
        let midrank = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = midrank;
        }
        i = j + 1;
    }

    let n_pos = positive.iter().filter(|&&p| p).count() as f64;
    let n_neg = n as f64 - n_pos;
    let rank_sum: f64 = (0..n).filter(|&i| positive[i]).map(|i| ranks[i]).sum();
    (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg)
}

/// Pools all predictions into one confusion matrix and computes the four
/// metrics. Aggregate precision and recall are support-weighted averages of
/// the per-class values; the aggregate F-score is their harmonic mean.
pub fn compute_metrics(log: &PredictionLog) -> Result<MetricsReport> {
    if log.entries.is_empty() {
        return Err(Error::EmptyLog);
    }
    let n = log.entries.len();

    let mut classes: BTreeSet<&str> = BTreeSet::new();
    for e in &log.entries {
        classes.insert(e.true_class.as_str());
        classes.insert(e.predicted.as_str());
    }

    // Posterior lookup per entry; a class missing from a fold's model (it
    // had no training instance there) scores 0.
    let score_maps: Vec<BTreeMap<&str, f64>> = log
        .entries
        .iter()
        .map(|e| e.scores.iter().map(|(c, p)| (c.as_str(), *p)).collect())
        .collect();

    let mut per_class = Vec::with_capacity(classes.len());
    let mut weighted_precision = 0.0;
    let mut weighted_recall = 0.0;
    let mut auc_weight = 0.0;
    let mut weighted_auc = 0.0;

    for class in classes {
        let mut tp = 0usize;
        let mut fp = 0usize;
        let mut support = 0usize;
        for e in &log.entries {
            let is_true = e.true_class == class;
            let is_predicted = e.predicted == class;
            support += is_true as usize;
            tp += (is_true && is_predicted) as usize;
            fp += (!is_true && is_predicted) as usize;
        }
        let precision = if tp + fp > 0 {
            tp as f64 / (tp + fp) as f64
        } else {
            0.0
        };
        let recall = if support > 0 {
            tp as f64 / support as f64
        } else {
            0.0
        };

        let auc = if support > 0 && support < n {
            let scores: Vec<f64> = score_maps
                .iter()
                .map(|m| m.get(class).copied().unwrap_or(0.0))
                .collect();
            let positive: Vec<bool> = log.entries.iter().map(|e| e.true_class == class).collect();
            Some(rank_auc(&scores, &positive))
        } else {
            None
        };

        weighted_precision += support as f64 * precision;
        weighted_recall += support as f64 * recall;
        if let Some(a) = auc {
            weighted_auc += support as f64 * a;
            auc_weight += support as f64;
        }

        per_class.push(ClassMetrics {
            class: class.to_owned(),
            precision,
            recall,
            f_score: f_score(precision, recall),
            support,
            auc,
        });
    }

    let precision = weighted_precision / n as f64;
    let recall = weighted_recall / n as f64;
    let auc = if auc_weight > 0.0 {
        weighted_auc / auc_weight
    } else {
        0.5
    };

    Ok(MetricsReport {
        per_class,
        precision,
        recall,
        f_score: f_score(precision, recall),
        auc,
        accuracy: log.accuracy(),
        n_entries: n,
    })
}
