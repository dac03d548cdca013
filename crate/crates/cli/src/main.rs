//! `bugassign`: a workbench for tracker-driven developer recommendation.
//! Subcommands wire the pipeline end to end: ingest/refine a corpus, rank
//! categorical fields, cross-validate the CF/CHI2/TRAM methods, train a
//! model, and recommend developers for new reports.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use bugassign_core::corpus::{BugReport, CategoricalField, Corpus, RefineRules, Timestamp};
use bugassign_core::eval::{compute_metrics, plan_folds, run_cv, MetricsReport, PredictionLog};
use bugassign_core::features::{feature_scores_tsv, rank_features, term_scores_tsv, Method};
use bugassign_core::pipeline;
use bugassign_core::synth::{generate, SynthConfig};
use bugassign_core::textproc::{Stopwords, Tokenizer};

use bugassign_cli::config::{MethodChoice, RunConfig};
use bugassign_cli::corpus_io::{
    format_timestamp, load_corpus, parse_timestamp, save_corpus, CorpusFormat, LoadDiagnostics,
    LoadOptions, PRIORITIES,
};
use bugassign_cli::fetch::{fetch_corpus, replay_snapshot, FilterQuery};
use bugassign_cli::model_io::{load_model, save_model};
use bugassign_cli::report::{predictions_jsonl, render_report, OutputFormat};

/// Failures carry the exit code family: 2 for input/IO, 3 for evaluation,
/// 4 for malformed requests. Usage problems exit 64 via clap.
#[derive(Debug)]
enum CliError {
    Input(anyhow::Error),
    Evaluation(anyhow::Error),
    BadRequest(anyhow::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Evaluation(_) => 3,
            CliError::BadRequest(_) => 4,
        }
    }

    fn message(&self) -> &anyhow::Error {
        match self {
            CliError::Input(e) | CliError::Evaluation(e) | CliError::BadRequest(e) => e,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "bugassign",
    version,
    about = "Bug-report triage workbench: ingest tracker corpora, rank features, \
             evaluate the CF/CHI2/TRAM recommenders, train models, recommend developers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load (or fetch) a corpus, apply refinement, report statistics
    Ingest(IngestArgs),
    /// Stratified cross-validation of the recommendation methods
    Evaluate(EvaluateArgs),
    /// Rank the categorical report fields by gain ratio
    RankFeatures(RankFeaturesArgs),
    /// Train a model on a whole corpus and write it to a model file
    Train(TrainArgs),
    /// Recommend developers for one bug report using a saved model
    Recommend(RecommendArgs),
    /// Write the bundled deterministic synthetic corpus
    Synth(SynthArgs),
}

// The source may also come from a config file, so the group is exclusive
// but not required here; a missing source is caught after config merging.
#[derive(Args)]
#[command(group(clap::ArgGroup::new("ingest_source").multiple(false)))]
struct IngestArgs {
    /// Flat key=value config file applied before the flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Corpus file (.jsonl or .csv)
    #[arg(long, group = "ingest_source")]
    input: Option<PathBuf>,
    /// Tracker base URL exposing a Bugzilla-style /rest/bug endpoint
    #[arg(long, group = "ingest_source")]
    url: Option<String>,
    /// Replay a previously written fetch snapshot instead of going live
    #[arg(long, group = "ingest_source")]
    replay: Option<PathBuf>,
    /// Activity threshold: keep developers with at least this many reports
    #[arg(long)]
    min_fixed: Option<usize>,
    /// Qualifying statuses, comma separated
    #[arg(long, value_delimiter = ',')]
    statuses: Option<Vec<String>>,
    /// Qualifying resolutions, comma separated
    #[arg(long, value_delimiter = ',')]
    resolutions: Option<Vec<String>>,
    /// Keep only reports created at or after this time (UTC)
    #[arg(long)]
    window_start: Option<String>,
    /// Keep only reports created at or before this time (UTC)
    #[arg(long)]
    window_end: Option<String>,
    /// Where to write the refined corpus (.jsonl or .csv)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Where a live fetch writes its raw snapshot (default snapshot.jsonl)
    #[arg(long)]
    snapshot: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Flat key=value config file applied before the flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Corpus file to evaluate on (expects an already refined corpus)
    #[arg(long)]
    input: Option<PathBuf>,
    /// CF, CHI2, TRAM, or all
    #[arg(long)]
    method: Option<String>,
    /// Number of cross-validation folds
    #[arg(long)]
    folds: Option<usize>,
    /// Seed for the fold shuffle
    #[arg(long)]
    seed: Option<u64>,
    /// Laplace smoothing constant
    #[arg(long)]
    alpha: Option<f64>,
    /// Override the selected-term fraction for both text methods
    #[arg(long)]
    terms_fraction: Option<f64>,
    /// Custom stopword file (one word per line, # comments)
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// table, json, or csv
    #[arg(long)]
    format: Option<String>,
    /// Write the report here instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
    /// Export per-prediction JSONL here (per method, suffixed under --method all)
    #[arg(long)]
    predictions: Option<PathBuf>,
}

#[derive(Args)]
struct RankFeaturesArgs {
    /// Flat key=value config file applied before the flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Corpus file (.jsonl or .csv)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write the TSV here instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// Flat key=value config file applied before the flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Corpus file (.jsonl or .csv)
    #[arg(long)]
    input: Option<PathBuf>,
    /// A single method: CF, CHI2, or TRAM
    #[arg(long)]
    method: Option<String>,
    /// Laplace smoothing constant
    #[arg(long)]
    alpha: Option<f64>,
    /// Override the selected-term fraction for both text methods
    #[arg(long)]
    terms_fraction: Option<f64>,
    /// Custom stopword file (one word per line, # comments)
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Where to write the model file
    #[arg(long)]
    model: Option<PathBuf>,
    /// Dump the ranked chi-square term scores as TSV
    #[arg(long)]
    dump_terms: Option<PathBuf>,
    /// Dump the bug-term matrix as "row col tf" triplets
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
}

#[derive(Args)]
struct RecommendArgs {
    /// Flat key=value config file applied before the flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Saved model file
    #[arg(long)]
    model: Option<PathBuf>,
    /// Number of developers to print
    #[arg(long)]
    top_k: Option<usize>,
    /// Custom stopword file (one word per line, # comments)
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Read the report as a JSON object (first line of a .jsonl works)
    #[arg(long)]
    report_file: Option<PathBuf>,
    /// Inline report fields instead of --report-file
    #[arg(long)]
    id: Option<u64>,
    #[arg(long)]
    summary: Option<String>,
    #[arg(long)]
    component: Option<String>,
    #[arg(long = "os")]
    operating_system: Option<String>,
    #[arg(long)]
    priority: Option<String>,
    #[arg(long)]
    severity: Option<String>,
    #[arg(long)]
    reporter: Option<String>,
    #[arg(long)]
    product: Option<String>,
}

#[derive(Args)]
struct SynthArgs {
    /// Flat key=value config file applied before the flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Where to write the corpus (.jsonl or .csv)
    #[arg(long)]
    output: PathBuf,
    /// Generator seed (default from config, then 42)
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 200)]
    reports: usize,
    #[arg(long, default_value_t = 8)]
    developers: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(64),
            };
        }
    };
    let result = match cli.command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::RankFeatures(args) => cmd_rank_features(args),
        Command::Train(args) => cmd_train(args),
        Command::Recommend(args) => cmd_recommend(args),
        Command::Synth(args) => cmd_synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.message());
            ExitCode::from(e.code())
        }
    }
}

/// Defaults, then the config file, then (in each command) the flags.
fn base_config(config: &Option<PathBuf>) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = config {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))
            .map_err(CliError::Input)?;
        cfg.apply_file(&text).map_err(CliError::Input)?;
    }
    Ok(cfg)
}

fn tokenizer_from(cfg: &RunConfig) -> CliResult<Tokenizer> {
    let stopwords = match &cfg.stopwords {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read stopword file {}", path.display()))
                .map_err(CliError::Input)?;
            Stopwords::parse(&text)
        }
        None => Stopwords::smart(),
    };
    Ok(Tokenizer::new(stopwords, cfg.min_token_len))
}

fn load_input(cfg: &RunConfig) -> CliResult<(Corpus, LoadDiagnostics)> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::Input(anyhow!("no --input corpus file given")))?;
    let opts = LoadOptions {
        window: cfg.window(),
        ..LoadOptions::default()
    };
    load_corpus(path, &opts).map_err(CliError::Input)
}

fn warn_diagnostics(diag: &LoadDiagnostics) {
    if diag.skipped() > 0 {
        eprintln!(
            "warning: skipped {} row(s): {} malformed, {} missing id, {} missing assignee, \
             {} duplicate id, {} invalid priority",
            diag.skipped(),
            diag.malformed,
            diag.missing_id,
            diag.missing_assignee,
            diag.duplicate_id,
            diag.invalid_priority
        );
    }
    if diag.excluded_by_window > 0 {
        eprintln!(
            "note: {} report(s) outside the configured time window",
            diag.excluded_by_window
        );
    }
}

fn project_label(cfg: &RunConfig) -> String {
    cfg.input
        .as_ref()
        .and_then(|p| p.file_stem())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".to_string())
}

fn parse_window_flag(value: &Option<String>, name: &str) -> CliResult<Option<Timestamp>> {
    match value {
        None => Ok(None),
        Some(text) => parse_timestamp(text)
            .map(Some)
            .ok_or_else(|| CliError::BadRequest(anyhow!("{name} '{text}' is not a timestamp"))),
    }
}

fn cmd_ingest(args: IngestArgs) -> CliResult<()> {
    let mut cfg = base_config(&args.config)?;
    if let Some(v) = args.input {
        cfg.input = Some(v);
    }
    if let Some(v) = args.url {
        cfg.url = Some(v);
    }
    if let Some(v) = args.min_fixed {
        cfg.min_fixed = v;
    }
    if let Some(v) = args.statuses {
        cfg.statuses = v;
    }
    if let Some(v) = args.resolutions {
        cfg.resolutions = v;
    }
    if let Some(t) = parse_window_flag(&args.window_start, "--window-start")? {
        cfg.window_start = Some(t);
    }
    if let Some(t) = parse_window_flag(&args.window_end, "--window-end")? {
        cfg.window_end = Some(t);
    }

    if args.replay.is_none() && cfg.url.is_none() && cfg.input.is_none() {
        return Err(CliError::Input(anyhow!(
            "ingest needs a source: --input, --url, or --replay (or input=/url= in the config file)"
        )));
    }
    let (corpus, diagnostics) = if let Some(snapshot) = &args.replay {
        let outcome =
            replay_snapshot(snapshot, &cfg.field_map, cfg.window()).map_err(CliError::Input)?;
        (outcome.corpus, outcome.diagnostics)
    } else if let Some(url) = &cfg.url {
        let query = FilterQuery {
            statuses: cfg.statuses.clone(),
            resolutions: cfg.resolutions.clone(),
            created_after: cfg.window_start.map(format_timestamp),
            page_limit: cfg.page_limit,
        };
        let snapshot = args
            .snapshot
            .clone()
            .unwrap_or_else(|| PathBuf::from("snapshot.jsonl"));
        let outcome = fetch_corpus(url, &query, &cfg.field_map, cfg.window(), &snapshot)
            .map_err(CliError::Input)?;
        eprintln!(
            "fetched {} page(s) from {url}; snapshot written to {}",
            outcome.pages,
            snapshot.display()
        );
        (outcome.corpus, outcome.diagnostics)
    } else {
        load_input(&cfg)?
    };
    warn_diagnostics(&diagnostics);

    let statuses: Vec<&str> = cfg.statuses.iter().map(String::as_str).collect();
    let resolutions: Vec<&str> = cfg.resolutions.iter().map(String::as_str).collect();
    let rules = RefineRules::new(statuses, resolutions, cfg.min_fixed)
        .map_err(|e| CliError::BadRequest(e.into()))?;
    let (refined, info) = corpus.refine(&rules);

    if info.dropped_by_filter > 0 {
        eprintln!(
            "refinement dropped {} report(s) by status/resolution",
            info.dropped_by_filter
        );
    }
    if !info.pruned_developers.is_empty() {
        eprintln!(
            "refinement pruned {} developer(s) under the activity threshold {}",
            info.pruned_developers.len(),
            cfg.min_fixed
        );
    }
    if !info.below_threshold_after_prune.is_empty() {
        eprintln!(
            "warning: developers below threshold after the single pruning pass: {:?}",
            info.below_threshold_after_prune
        );
    }
    if refined.is_empty() {
        eprintln!("warning: refined corpus is empty");
    }

    let stats = refined.stats();
    println!(
        "{:<16} {:>16} {:>16}",
        "Name", "# of Bug Reports", "# of Developers"
    );
    println!(
        "{:<16} {:>16} {:>16}",
        refined.source(),
        stats.n_reports,
        stats.n_developers
    );
    println!(
        "reports={} developers={}",
        stats.n_reports, stats.n_developers
    );

    if let Some(path) = &args.output {
        let format = CorpusFormat::from_path(path).unwrap_or(CorpusFormat::Jsonl);
        save_corpus(&refined, path, format).map_err(CliError::Input)?;
        eprintln!("refined corpus written to {}", path.display());
    }
    Ok(())
}

fn evaluate_one(
    corpus: &Corpus,
    cfg: &RunConfig,
    method: Method,
    tokenizer: &Tokenizer,
) -> CliResult<(MetricsReport, PredictionLog)> {
    let plan =
        plan_folds(corpus, cfg.folds, cfg.seed).map_err(|e| CliError::Evaluation(e.into()))?;
    let method_cfg = cfg.method_config(method);
    let log = run_cv(corpus, &method_cfg, &plan, tokenizer, cfg.alpha)
        .map_err(|e| CliError::Evaluation(e.into()))?;
    for failure in &log.failures {
        eprintln!(
            "warning: {} fold {} failed: {}",
            method.name(),
            failure.fold,
            failure.reason
        );
    }
    if log.entries.is_empty() {
        return Err(CliError::Evaluation(anyhow!(
            "{}: every fold failed; no predictions to score",
            method.name()
        )));
    }
    let metrics = compute_metrics(&log).map_err(|e| CliError::Evaluation(e.into()))?;
    Ok((metrics, log))
}

/// Insert a method suffix before the extension: preds.jsonl -> preds.CF.jsonl.
fn suffixed(path: &Path, method: Method) -> PathBuf {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => path.with_extension(format!("{}.{ext}", method.name())),
        None => path.with_extension(method.name()),
    }
}

fn cmd_evaluate(args: EvaluateArgs) -> CliResult<()> {
    let mut cfg = base_config(&args.config)?;
    if let Some(v) = args.input {
        cfg.input = Some(v);
    }
    if let Some(v) = &args.method {
        cfg.method = MethodChoice::parse(v).map_err(CliError::BadRequest)?;
    }
    if let Some(v) = args.folds {
        cfg.folds = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = args.terms_fraction {
        cfg.terms_fraction_chi2 = v;
        cfg.terms_fraction_tram = v;
    }
    if let Some(v) = args.stopwords {
        cfg.stopwords = Some(v);
    }
    if let Some(v) = &args.format {
        cfg.format = OutputFormat::parse(v).map_err(CliError::BadRequest)?;
    }
    if let Some(v) = args.output {
        cfg.output = Some(v);
    }

    let (corpus, diagnostics) = load_input(&cfg)?;
    warn_diagnostics(&diagnostics);
    let tokenizer = tokenizer_from(&cfg)?;

    let methods = cfg.method.methods();
    let mut rows = Vec::with_capacity(methods.len());
    for method in &methods {
        let (metrics, log) = evaluate_one(&corpus, &cfg, *method, &tokenizer)?;
        if let Some(base) = &args.predictions {
            let path = if methods.len() == 1 {
                base.clone()
            } else {
                suffixed(base, *method)
            };
            fs::write(&path, predictions_jsonl(&log))
                .with_context(|| format!("cannot write predictions {}", path.display()))
                .map_err(CliError::Input)?;
        }
        rows.push((*method, metrics));
    }

    let text = render_report(&project_label(&cfg), &rows, cfg.format);
    match &cfg.output {
        Some(path) => {
            fs::write(path, text)
                .with_context(|| format!("cannot write report {}", path.display()))
                .map_err(CliError::Input)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_rank_features(args: RankFeaturesArgs) -> CliResult<()> {
    let mut cfg = base_config(&args.config)?;
    if let Some(v) = args.input {
        cfg.input = Some(v);
    }
    let (corpus, diagnostics) = load_input(&cfg)?;
    warn_diagnostics(&diagnostics);
    if corpus.is_empty() {
        return Err(CliError::Input(anyhow!("corpus is empty; nothing to rank")));
    }
    let ranked = rank_features(&corpus, &CategoricalField::ALL);
    let tsv = feature_scores_tsv(&ranked);
    match &args.output {
        Some(path) => {
            fs::write(path, tsv)
                .with_context(|| format!("cannot write ranking {}", path.display()))
                .map_err(CliError::Input)?;
        }
        None => print!("{tsv}"),
    }
    Ok(())
}

fn cmd_train(args: TrainArgs) -> CliResult<()> {
    let mut cfg = base_config(&args.config)?;
    if let Some(v) = args.input {
        cfg.input = Some(v);
    }
    if let Some(v) = &args.method {
        cfg.method = MethodChoice::parse(v).map_err(CliError::BadRequest)?;
    }
    if let Some(v) = args.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = args.terms_fraction {
        cfg.terms_fraction_chi2 = v;
        cfg.terms_fraction_tram = v;
    }
    if let Some(v) = args.stopwords {
        cfg.stopwords = Some(v);
    }
    if let Some(v) = args.model {
        cfg.model = Some(v);
    }
    let method = match cfg.method {
        MethodChoice::One(m) => m,
        MethodChoice::All => {
            return Err(CliError::BadRequest(anyhow!(
                "train needs a single --method (CF, CHI2, or TRAM)"
            )))
        }
    };
    let model_path = cfg
        .model
        .clone()
        .ok_or_else(|| CliError::BadRequest(anyhow!("train needs --model <path> to write to")))?;

    let (corpus, diagnostics) = load_input(&cfg)?;
    warn_diagnostics(&diagnostics);
    let tokenizer = tokenizer_from(&cfg)?;
    let fitted = pipeline::fit(&corpus, &cfg.method_config(method), &tokenizer, cfg.alpha)
        .map_err(|e| CliError::Evaluation(e.into()))?;

    if let Some(path) = &args.dump_terms {
        let scores = fitted.term_scores.as_deref().unwrap_or(&[]);
        fs::write(path, term_scores_tsv(scores))
            .with_context(|| format!("cannot write term scores {}", path.display()))
            .map_err(CliError::Input)?;
    }
    if let Some(path) = &args.dump_matrix {
        let vocabulary = bugassign_core::textproc::build_vocabulary(&corpus, &tokenizer);
        let matrix = bugassign_core::textproc::build_matrix(&corpus, &vocabulary, &tokenizer);
        fs::write(path, matrix.to_triplets())
            .with_context(|| format!("cannot write matrix triplets {}", path.display()))
            .map_err(CliError::Input)?;
    }

    save_model(&fitted.model, &model_path).map_err(CliError::Input)?;
    let selected = fitted
        .model
        .terms
        .as_ref()
        .map(|t| t.vocabulary.len())
        .unwrap_or(0);
    println!(
        "model saved to {} (method={}, classes={}, selected_terms={})",
        model_path.display(),
        method.name(),
        fitted.model.classes.len(),
        selected
    );
    Ok(())
}

fn recommend_report(args: &RecommendArgs) -> CliResult<BugReport> {
    let bad = |msg: String| CliError::BadRequest(anyhow!(msg));
    if let Some(path) = &args.report_file {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read report file {}", path.display()))
            .map_err(CliError::Input)?;
        let line = text
            .lines()
            .find(|l| !l.trim().is_empty())
            .ok_or_else(|| bad(format!("report file {} is empty", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(line)
            .map_err(|e| bad(format!("report file is not a JSON object: {e}")))?;
        let get = |key: &str| {
            value
                .get(key)
                .and_then(|v| v.as_str())
                .unwrap_or("")
                .to_string()
        };
        Ok(new_report(
            value.get("id").and_then(|v| v.as_u64()).unwrap_or(1),
            get("summary"),
            get("component"),
            get("op_sys"),
            get("priority"),
            get("severity"),
            get("reporter"),
            get("product"),
        )?)
    } else {
        Ok(new_report(
            args.id.unwrap_or(1),
            args.summary.clone().unwrap_or_default(),
            args.component.clone().unwrap_or_default(),
            args.operating_system.clone().unwrap_or_default(),
            args.priority.clone().unwrap_or_default(),
            args.severity.clone().unwrap_or_default(),
            args.reporter.clone().unwrap_or_default(),
            args.product.clone().unwrap_or_default(),
        )?)
    }
}

#[allow(clippy::too_many_arguments)]
fn new_report(
    id: u64,
    summary: String,
    component: String,
    operating_system: String,
    priority: String,
    severity: String,
    reporter: String,
    product: String,
) -> CliResult<BugReport> {
    let priority = priority.trim().to_uppercase();
    if !priority.is_empty()
        && priority != bugassign_core::corpus::MISSING.to_uppercase()
        && !PRIORITIES.contains(&priority.as_str())
    {
        return Err(CliError::BadRequest(anyhow!(
            "priority '{priority}' is not one of {PRIORITIES:?}"
        )));
    }
    Ok(BugReport {
        id: id.max(1),
        summary,
        component,
        operating_system,
        priority,
        severity,
        reporter,
        assignee: String::new(),
        status: String::new(),
        resolution: String::new(),
        created_at: Timestamp(0),
        modified_at: Timestamp(0),
        product,
    })
}

fn cmd_recommend(args: RecommendArgs) -> CliResult<()> {
    let mut cfg = base_config(&args.config)?;
    if let Some(v) = &args.model {
        cfg.model = Some(v.clone());
    }
    if let Some(v) = args.top_k {
        cfg.top_k = v;
    }
    if let Some(v) = &args.stopwords {
        cfg.stopwords = Some(v.clone());
    }
    let model_path = cfg
        .model
        .clone()
        .ok_or_else(|| CliError::Input(anyhow!("recommend needs --model <path>")))?;
    let model = load_model(&model_path).map_err(CliError::Input)?;
    let tokenizer = tokenizer_from(&cfg)?;
    let report = recommend_report(&args)?;

    let ranked = model
        .recommend(&report, &tokenizer, cfg.top_k.max(1))
        .map_err(|e| CliError::BadRequest(e.into()))?;
    for (rank, (developer, probability)) in ranked.iter().enumerate() {
        println!("{} {} {:.4}", rank + 1, developer, probability);
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> CliResult<()> {
    let cfg = base_config(&args.config)?;
    let synth = SynthConfig {
        n_reports: args.reports,
        n_developers: args.developers,
        seed: args.seed.unwrap_or(cfg.seed),
        ..SynthConfig::default()
    };
    if !(2..=8).contains(&synth.n_developers) {
        return Err(CliError::BadRequest(anyhow!(
            "--developers must be between 2 and 8"
        )));
    }
    let corpus = generate(&synth);
    let format = CorpusFormat::from_path(&args.output).unwrap_or(CorpusFormat::Jsonl);
    save_corpus(&corpus, &args.output, format).map_err(CliError::Input)?;
    println!(
        "wrote {} reports for {} developers to {}",
        corpus.len(),
        corpus.developers().len(),
        args.output.display()
    );
    Ok(())
}
