//! Acceptance gate. One test per criterion, each printing a PASS line with
//! its elapsed time (run with `--nocapture` to see them):
//!
//!  1. F-score arithmetic reproduces the published comparison rows.
//!  2. Posterior matches a plain-arithmetic Bayes enumeration oracle.
//!  3. Chi-square matches a contingency-table oracle; selection sizes are
//!     exact ceilings.
//!  4. Gain-ratio anchors: class copy 1.0, constant 0.0, independent noise
//!     near 0.
//!  5. Stratified folds: exact cover, balance, determinism.
//!  6. End-to-end method separation on the bundled synthetic fixture.
//!  7. Metric identities: micro precision = micro recall under top-1,
//!     constant-score AUC = 0.5, aggregate F is the harmonic mean, and the
//!     pooled confusion matrix agrees with a brute-force oracle.
//!  8. Determinism: byte-identical evaluation output, bit-stable model
//!     round trip under 100 random queries.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use bugassign_cli::model_io::{load_model, save_model};
use bugassign_core::corpus::{BugReport, CategoricalField, Corpus, Timestamp};
use bugassign_core::eval::{
    compute_metrics, f_score, plan_folds, run_cv, PredictionEntry, PredictionLog,
};
use bugassign_core::features::{
    chi2_scores, gain_ratio, select_terms, FeatureVector, Method, MethodConfig,
};
use bugassign_core::nbayes::train;
use bugassign_core::pipeline;
use bugassign_core::rng::SplitMix64;
use bugassign_core::synth::{generate, SynthConfig};
use bugassign_core::textproc::{build_matrix, Stopwords, Tokenizer, Vocabulary};

fn pass(criterion: u32, what: &str, started: Instant) {
    println!(
        "PASS criterion {criterion}: {what} ({:.2}s)",
        started.elapsed().as_secs_f64()
    );
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic.jsonl")
}

fn report_stub(id: u64, assignee: &str) -> BugReport {
    BugReport {
        id,
        summary: String::new(),
        component: String::new(),
        operating_system: String::new(),
        priority: String::new(),
        severity: String::new(),
        reporter: String::new(),
        assignee: assignee.to_string(),
        status: String::new(),
        resolution: String::new(),
        created_at: Timestamp(id as i64),
        modified_at: Timestamp(id as i64),
        product: String::new(),
    }
}

#[test]
fn criterion_1_fscore_arithmetic_reproduces_published_rows() {
    let started = Instant::now();
    let rows = [
        (0.663, 0.634, 0.648),
        (0.685, 0.656, 0.670),
        (0.537, 0.533, 0.535),
        (0.380, 0.234, 0.290),
    ];
    for (p, r, expected) in rows {
        let rounded = (f_score(p, r) * 1000.0).round() / 1000.0;
        assert!(
            (rounded - expected).abs() <= 0.0005,
            "F({p}, {r}) rounded to {rounded}, published {expected}"
        );
    }
    pass(
        1,
        "harmonic-mean F reproduces all four published rows",
        started,
    );
}

/// Plain-arithmetic Bayes numerators: prior times smoothed conditional
/// ratios, no logarithms anywhere, normalized by the plain sum.
fn oracle_posterior(
    vectors: &[FeatureVector],
    labels: &[&str],
    vocab_len: usize,
    alpha: f64,
    x: &FeatureVector,
) -> Vec<(String, f64)> {
    let classes: Vec<String> = labels
        .iter()
        .map(|l| l.to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = vectors.len() as f64;
    let n_slots = x.categorical_values.len();

    let mut numerators = Vec::new();
    for class in &classes {
        let members: Vec<&FeatureVector> = vectors
            .iter()
            .zip(labels)
            .filter(|(_, l)| **l == class.as_str())
            .map(|(v, _)| v)
            .collect();
        let n_c = members.len() as f64;
        let mut numerator = n_c / n;

        for j in 0..n_slots {
            let domain: BTreeSet<&str> = vectors
                .iter()
                .map(|v| v.categorical_values[j].as_str())
                .collect();
            let denominator = n_c + alpha * (domain.len() as f64 + 1.0);
            let value = x.categorical_values[j].as_str();
            let conditional = if domain.contains(value) {
                let count = members
                    .iter()
                    .filter(|v| v.categorical_values[j] == value)
                    .count() as f64;
                (count + alpha) / denominator
            } else {
                alpha / denominator
            };
            numerator *= conditional;
        }

        if vocab_len > 0 {
            let total_tf: f64 = members
                .iter()
                .flat_map(|v| v.term_counts.values())
                .map(|&tf| tf as f64)
                .sum();
            let denominator = total_tf + alpha * (vocab_len as f64 + 1.0);
            for (&col, &tf_x) in &x.term_counts {
                let tf_train: f64 = members
                    .iter()
                    .filter_map(|v| v.term_counts.get(&col))
                    .map(|&tf| tf as f64)
                    .sum();
                let p = (tf_train + alpha) / denominator;
                numerator *= p.powi(tf_x as i32);
            }
        }
        numerators.push(numerator);
    }

    let total: f64 = numerators.iter().sum();
    classes
        .into_iter()
        .zip(numerators)
        .map(|(class, numerator)| (class, numerator / total))
        .collect()
}

#[test]
fn criterion_2_posterior_matches_bruteforce_enumeration() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(0xACCE97);
    let mut max_error = 0.0f64;
    let instances = 600;
    for instance in 0..instances {
        let n_slots = 1 + rng.next_below(4) as usize; // 1..=4
        let n_values = 2 + rng.next_below(4) as usize; // 2..=5
        let n_classes = 2 + rng.next_below(2) as usize; // 2..=3
        let n_rows = (n_classes as u64 + rng.next_below(28)).min(30) as usize;
        let with_terms = instance % 2 == 0;
        let vocab_len = if with_terms {
            1 + rng.next_below(3) as usize
        } else {
            0
        };
        let alpha = [0.5, 1.0, 2.0][rng.next_below(3) as usize];

        let cfg = MethodConfig {
            method: if with_terms { Method::Tram } else { Method::Cf },
            categorical_features: CategoricalField::ALL[..n_slots].to_vec(),
            term_fraction: if with_terms { 1.0 } else { 0.0 },
        };
        let vocab = Vocabulary::from_terms((0..vocab_len).map(|t| format!("term{t}")));

        let mut vectors = Vec::with_capacity(n_rows);
        let mut labels: Vec<String> = Vec::with_capacity(n_rows);
        for i in 0..n_rows {
            let class = if i < n_classes {
                i
            } else {
                rng.next_below(n_classes as u64) as usize
            };
            labels.push(format!("dev{class}"));
            let mut term_counts = BTreeMap::new();
            for t in 0..vocab_len as u32 {
                let tf = rng.next_below(3) as u32;
                if tf > 0 {
                    term_counts.insert(t, tf);
                }
            }
            vectors.push(FeatureVector {
                categorical_values: (0..n_slots)
                    .map(|_| format!("v{}", rng.next_below(n_values as u64)))
                    .collect(),
                term_counts,
            });
        }
        let label_refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let model = train(&cfg, &vocab, &vectors, &label_refs, alpha).unwrap();

        // Query: seen values mostly, sometimes a value no slot has seen.
        let mut term_counts = BTreeMap::new();
        for t in 0..vocab_len as u32 {
            let tf = rng.next_below(3) as u32;
            if tf > 0 {
                term_counts.insert(t, tf);
            }
        }
        let x = FeatureVector {
            categorical_values: (0..n_slots)
                .map(|_| {
                    if rng.next_below(5) == 0 {
                        "never-seen".to_string()
                    } else {
                        format!("v{}", rng.next_below(n_values as u64))
                    }
                })
                .collect(),
            term_counts,
        };

        let fast = model.posterior(&x).unwrap();
        let slow = oracle_posterior(&vectors, &label_refs, vocab_len, alpha, &x);
        assert_eq!(fast.scores.len(), slow.len());
        for (class, expected) in &slow {
            let got = fast.probability_of(class).unwrap();
            max_error = max_error.max((got - expected).abs());
        }
    }
    assert!(
        max_error <= 1e-9,
        "max posterior deviation {max_error} over {instances} instances"
    );
    pass(
        2,
        &format!("posterior matches enumeration oracle on {instances} instances (max err {max_error:.2e})"),
        started,
    );
}

/// Chi-square via the statistical definition: observed vs expected counts
/// over the 2x2 contingency cells, summed, maximized over classes.
fn oracle_chi2(presence: &[Vec<bool>], labels: &[&str], term: usize) -> f64 {
    let classes: BTreeSet<&str> = labels.iter().copied().collect();
    let n = labels.len() as f64;
    let mut best = 0.0f64;
    for class in classes {
        let mut observed = [[0.0f64; 2]; 2]; // [in class][has term]
        for (row, &label) in labels.iter().enumerate() {
            let i = usize::from(label == class);
            let j = usize::from(presence[row][term]);
            observed[i][j] += 1.0;
        }
        let row_totals = [
            observed[0][0] + observed[0][1],
            observed[1][0] + observed[1][1],
        ];
        let col_totals = [
            observed[0][0] + observed[1][0],
            observed[0][1] + observed[1][1],
        ];
        if row_totals.contains(&0.0) || col_totals.contains(&0.0) {
            continue;
        }
        let mut statistic = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let expected = row_totals[i] * col_totals[j] / n;
                statistic += (observed[i][j] - expected).powi(2) / expected;
            }
        }
        best = best.max(statistic);
    }
    best
}

#[test]
fn criterion_3_chi2_oracle_and_exact_selection_sizes() {
    let started = Instant::now();
    let term_names = ["talpha", "tbravo", "tcharlie", "tdelta", "techo"];
    let tokenizer = Tokenizer::new(Stopwords::none(), 2);
    let mut rng = SplitMix64::new(0xC4152);
    let corpora = 250;
    let mut max_error = 0.0f64;

    for _ in 0..corpora {
        let n_rows = 4 + rng.next_below(17) as usize; // 4..=20
        let n_classes = 2 + rng.next_below(2) as usize; // 2..=3
        let mut reports = Vec::with_capacity(n_rows);
        let mut presence = Vec::with_capacity(n_rows);
        let mut labels_owned = Vec::with_capacity(n_rows);
        for i in 0..n_rows {
            let class = if i < n_classes {
                i
            } else {
                rng.next_below(n_classes as u64) as usize
            };
            let mask: Vec<bool> = (0..term_names.len())
                .map(|_| rng.next_below(2) == 1)
                .collect();
            let mut summary_words: Vec<&'static str> = Vec::new();
            for (t, &has) in mask.iter().enumerate() {
                if has {
                    summary_push(&mut summary_words, term_names[t], &mut rng);
                }
            }
            let mut report = report_stub(i as u64, &format!("dev{class}"));
            report.summary = summary_words.join(" ");
            reports.push(report);
            presence.push(mask);
            labels_owned.push(format!("dev{class}"));
        }
        let corpus = Corpus::new(reports, "oracle", None);
        let vocab = Vocabulary::from_terms(term_names);
        let matrix = build_matrix(&corpus, &vocab, &tokenizer);
        let labels: Vec<&str> = corpus.labels();
        let scores = chi2_scores(&matrix, &vocab, &labels).unwrap();

        // Corpus construction preserves insertion order here (ids ascend
        // with creation time), so presence rows stay aligned.
        let label_strs: Vec<&str> = labels_owned.iter().map(String::as_str).collect();
        for (t, score) in scores.iter().enumerate() {
            let expected = oracle_chi2(&presence, &label_strs, t);
            max_error = max_error.max((score.chi2 - expected).abs());
        }
    }
    assert!(max_error <= 1e-9, "max chi2 deviation {max_error}");

    for n in 1..=50usize {
        let scores: Vec<_> = (0..n)
            .map(|i| bugassign_core::features::TermScore {
                term: format!("w{i:02}"),
                chi2: (i % 5) as f64,
            })
            .collect();
        for (fraction, num, den) in [(0.01, 1usize, 100usize), (0.10, 1, 10), (1.0, 1, 1)] {
            let selected = select_terms(&scores, fraction).unwrap();
            assert_eq!(
                selected.len(),
                (n * num).div_ceil(den).max(1),
                "fraction {fraction}, |V| {n}"
            );
        }
    }
    pass(
        3,
        &format!("chi2 matches contingency oracle on {corpora} corpora (max err {max_error:.2e}); selection sizes exact"),
        started,
    );
}

// Repetition helper: sometimes emit a term twice so tf > 1 while the
// presence-based oracle still sees a single occurrence.
fn summary_push(words: &mut Vec<&'static str>, term: &'static str, rng: &mut SplitMix64) {
    words.push(term);
    if rng.next_below(3) == 0 {
        words.push(term);
    }
}

#[test]
fn criterion_4_gain_ratio_anchors() {
    let started = Instant::now();

    // Class copy and constant, exact by construction.
    let mut reports = Vec::new();
    for i in 0..40u64 {
        let class = format!("dev{}", i % 4);
        let mut r = report_stub(i, &class);
        r.component = class.clone();
        r.product = "constant".to_string();
        reports.push(r);
    }
    let anchored = Corpus::new(reports, "anchors", None);
    let copy = gain_ratio(&anchored, CategoricalField::Component).gain_ratio;
    let constant = gain_ratio(&anchored, CategoricalField::Product).gain_ratio;
    assert!((copy - 1.0).abs() <= 1e-12, "class copy scored {copy}");
    assert_eq!(constant, 0.0, "constant feature scored {constant}");

    // Independent noise on a 1000-report synthetic corpus stays near zero.
    let corpus = generate(&SynthConfig {
        n_reports: 1000,
        ..SynthConfig::default()
    });
    let severity = gain_ratio(&corpus, CategoricalField::Severity).gain_ratio;
    let product = gain_ratio(&corpus, CategoricalField::Product).gain_ratio;
    assert!(severity <= 0.05, "random severity scored {severity}");
    assert!(product <= 0.05, "random product scored {product}");

    pass(
        4,
        &format!(
            "gain ratio anchors hold (copy={copy:.3}, constant={constant:.3}, noise<= {:.4})",
            severity.max(product)
        ),
        started,
    );
}

#[test]
fn criterion_5_stratified_folds_cover_balance_and_repeat() {
    let started = Instant::now();
    let corpus = generate(&SynthConfig::default());
    for seed in [1u64, 42, 9999] {
        let plan = plan_folds(&corpus, 10, seed).unwrap();
        let again = plan_folds(&corpus, 10, seed).unwrap();
        assert_eq!(plan, again, "same seed must give the identical plan");

        // Every report in exactly one fold.
        assert_eq!(plan.assignment.len(), corpus.len());
        let total: usize = (0..10u32).map(|f| plan.test_indices(f).len()).sum();
        assert_eq!(total, corpus.len());

        // Per-class fold counts differ by at most one.
        for dev in corpus.developers() {
            let mut counts = vec![0usize; 10];
            for (i, r) in corpus.reports().iter().enumerate() {
                if &r.assignee == dev {
                    counts[plan.assignment[i] as usize] += 1;
                }
            }
            let max = counts.iter().max().unwrap();
            let min = counts.iter().min().unwrap();
            assert!(max - min <= 1, "{dev}: {counts:?}");
        }
    }
    // The full CV run tests every report exactly once.
    let plan = plan_folds(&corpus, 10, 42).unwrap();
    let log = run_cv(
        &corpus,
        &MethodConfig::cf(),
        &plan,
        &Tokenizer::default(),
        1.0,
    )
    .unwrap();
    assert!(log.failures.is_empty());
    let ids: BTreeSet<u64> = log.entries.iter().map(|e| e.report_id).collect();
    assert_eq!(ids.len(), corpus.len());
    pass(
        5,
        "stratified folds cover, balance, and repeat deterministically",
        started,
    );
}

#[test]
fn criterion_6_end_to_end_method_separation() {
    let started = Instant::now();
    let corpus = generate(&SynthConfig::default());
    assert_eq!(corpus.len(), 200);
    assert_eq!(corpus.developers().len(), 8);
    let tokenizer = Tokenizer::default();
    let plan = plan_folds(&corpus, 10, 42).unwrap();

    let mut accuracy = BTreeMap::new();
    for method in Method::ALL {
        let cfg = MethodConfig::for_method(method, None);
        let log = run_cv(&corpus, &cfg, &plan, &tokenizer, 1.0).unwrap();
        assert!(log.failures.is_empty(), "{method:?} fold failures");
        accuracy.insert(method, compute_metrics(&log).unwrap().accuracy);
    }
    let cf = accuracy[&Method::Cf];
    let chi2 = accuracy[&Method::Chi2];
    let tram = accuracy[&Method::Tram];

    let majority = corpus
        .stats()
        .per_developer
        .values()
        .copied()
        .max()
        .unwrap() as f64
        / corpus.len() as f64;

    assert!(cf >= 0.75, "CF accuracy {cf}");
    assert!(cf > majority, "CF {cf} vs majority baseline {majority}");
    assert!(chi2 >= 0.60, "CHI2 accuracy {chi2}");
    assert!(
        tram >= cf.max(chi2) - 0.05,
        "TRAM {tram} vs max(CF {cf}, CHI2 {chi2}) - 0.05"
    );
    pass(
        6,
        &format!(
            "separation holds: CF={cf:.3} CHI2={chi2:.3} TRAM={tram:.3} (baseline {majority:.3})"
        ),
        started,
    );
}

/// Brute-force confusion-matrix oracle for pooled metrics.
fn oracle_metrics(entries: &[(String, String)]) -> (f64, f64, f64) {
    let classes: BTreeSet<&String> = entries.iter().flat_map(|(t, p)| [t, p]).collect();
    let n = entries.len() as f64;
    let mut weighted_p = 0.0;
    let mut weighted_r = 0.0;
    let mut correct = 0usize;
    for class in classes {
        let tp = entries
            .iter()
            .filter(|(t, p)| t == class && p == class)
            .count() as f64;
        let fp = entries
            .iter()
            .filter(|(t, p)| t != class && p == class)
            .count() as f64;
        let support = entries.iter().filter(|(t, _)| t == class).count() as f64;
        let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
        let recall = if support > 0.0 { tp / support } else { 0.0 };
        weighted_p += support * precision;
        weighted_r += support * recall;
    }
    correct += entries.iter().filter(|(t, p)| t == p).count();
    (weighted_p / n, weighted_r / n, correct as f64 / n)
}

#[test]
fn criterion_7_metric_identities() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(0x7777);

    for round in 0..40 {
        let n = 1 + rng.next_below(30) as usize;
        let entries: Vec<PredictionEntry> = (0..n)
            .map(|i| {
                let truth = format!("dev{}", rng.next_below(4));
                let predicted = format!("dev{}", rng.next_below(4));
                PredictionEntry {
                    report_id: i as u64,
                    fold: 0,
                    true_class: truth,
                    predicted,
                    scores: (0..4).map(|c| (format!("dev{c}"), 0.25)).collect(),
                }
            })
            .collect();
        let log = PredictionLog {
            entries,
            failures: vec![],
        };
        let metrics = compute_metrics(&log).unwrap();

        // Micro precision = micro recall = accuracy under one
        // recommendation per report: both denominators are the entry count.
        let correct = log
            .entries
            .iter()
            .filter(|e| e.predicted == e.true_class)
            .count() as f64;
        let micro_precision = correct / log.entries.len() as f64;
        let micro_recall = correct / log.entries.len() as f64;
        assert_eq!(micro_precision, micro_recall);
        assert!((metrics.accuracy - micro_precision).abs() <= 1e-12);

        // Aggregate F is the harmonic mean of the report's own aggregates.
        assert!(
            (metrics.f_score - f_score(metrics.precision, metrics.recall)).abs() <= 1e-12,
            "round {round}"
        );

        // Pooled confusion matrix agrees with the brute-force oracle.
        let pairs: Vec<(String, String)> = log
            .entries
            .iter()
            .map(|e| (e.true_class.clone(), e.predicted.clone()))
            .collect();
        let (op, or, oacc) = oracle_metrics(&pairs);
        assert!((metrics.precision - op).abs() <= 1e-12);
        assert!((metrics.recall - or).abs() <= 1e-12);
        assert!((metrics.accuracy - oacc).abs() <= 1e-12);

        // Constant scores mean every per-class AUC is exactly chance.
        for per_class in &metrics.per_class {
            if let Some(auc) = per_class.auc {
                assert!((auc - 0.5).abs() <= 1e-9, "constant-score AUC {auc}");
            }
        }
        if metrics.per_class.iter().any(|c| c.auc.is_some()) {
            assert!((metrics.auc - 0.5).abs() <= 1e-9);
        }
    }
    pass(
        7,
        "micro identity, harmonic F, constant-score AUC=0.5, confusion oracle",
        started,
    );
}

#[test]
fn criterion_8_determinism_and_model_round_trip() {
    let started = Instant::now();

    // Byte-identical evaluation reports for a fixed seed.
    let fixture_path = fixture();
    let args = [
        "evaluate",
        "--input",
        fixture_path.to_str().unwrap(),
        "--method",
        "all",
        "--seed",
        "42",
    ];
    let first = Command::new(env!("CARGO_BIN_EXE_bugassign"))
        .args(args)
        .output()
        .expect("binary runs");
    let second = Command::new(env!("CARGO_BIN_EXE_bugassign"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(first.status.success());
    assert!(!first.stdout.is_empty());
    assert_eq!(
        first.stdout, second.stdout,
        "evaluation output must be byte-identical"
    );

    // Model round trip: identical posteriors on 100 random query vectors.
    let corpus = generate(&SynthConfig::default());
    let fitted = pipeline::fit(&corpus, &MethodConfig::tram(), &Tokenizer::default(), 1.0).unwrap();
    let dir = tempfile::TempDir::new().unwrap();
    let path = dir.path().join("model.json");
    save_model(&fitted.model, &path).unwrap();
    let loaded = load_model(&path).unwrap();

    let vocab_len = fitted
        .model
        .terms
        .as_ref()
        .map(|t| t.vocabulary.len() as u64)
        .unwrap_or(0);
    let mut rng = SplitMix64::new(0x800D);
    for _ in 0..100 {
        let mut term_counts = BTreeMap::new();
        if vocab_len > 0 {
            for _ in 0..rng.next_below(4) {
                term_counts.insert(
                    rng.next_below(vocab_len) as u32,
                    1 + rng.next_below(4) as u32,
                );
            }
        }
        let x = FeatureVector {
            categorical_values: vec![
                format!("component{}", rng.next_below(12)),
                format!("user{}", rng.next_below(12)),
            ],
            term_counts,
        };
        let a = fitted.model.posterior(&x).unwrap();
        let b = loaded.posterior(&x).unwrap();
        assert_eq!(a, b, "posterior drifted across the model round trip");
    }
    pass(
        8,
        "byte-identical reports and bit-stable model round trip",
        started,
    );
}
