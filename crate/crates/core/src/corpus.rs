//! Bug-report data model: individual reports, the corpus that holds them,
//! tracker-style refinement (status/resolution filter plus inactive-developer
//! pruning), and summary statistics.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Reserved token standing in for an absent optional categorical value.
pub const MISSING: &str = "(missing)";

/// Seconds since the Unix epoch, UTC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(pub i64);

/// Inclusive `[start, end]` time window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeWindow {
    pub start: Timestamp,
    pub end: Timestamp,
}

impl TimeWindow {
    pub fn contains(&self, t: Timestamp) -> bool {
        self.start <= t && t <= self.end
    }
}

/// One bug record as mined from a tracker. The assignee doubles as the
/// class label for training.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BugReport {
    pub id: u64,
    pub summary: String,
    pub component: String,
    pub operating_system: String,
    pub priority: String,
    pub severity: String,
    pub reporter: String,
    pub assignee: String,
    pub status: String,
    pub resolution: String,
    pub created_at: Timestamp,
    pub modified_at: Timestamp,
    pub product: String,
}

/// The categorical bug-report fields usable as classifier features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CategoricalField {
    Component,
    OperatingSystem,
    Priority,
    Severity,
    Reporter,
    Product,
}

impl CategoricalField {
    pub const ALL: [CategoricalField; 6] = [
        CategoricalField::Component,
        CategoricalField::OperatingSystem,
        CategoricalField::Priority,
        CategoricalField::Severity,
        CategoricalField::Reporter,
        CategoricalField::Product,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CategoricalField::Component => "component",
            CategoricalField::OperatingSystem => "operating_system",
            CategoricalField::Priority => "priority",
            CategoricalField::Severity => "severity",
            CategoricalField::Reporter => "reporter",
            CategoricalField::Product => "product",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "component" => Ok(CategoricalField::Component),
            "operating_system" | "op_sys" => Ok(CategoricalField::OperatingSystem),
            "priority" => Ok(CategoricalField::Priority),
            "severity" => Ok(CategoricalField::Severity),
            "reporter" => Ok(CategoricalField::Reporter),
            "product" => Ok(CategoricalField::Product),
            other => Err(Error::UnknownField(other.to_owned())),
        }
    }
}

impl BugReport {
    /// Value of a categorical field, with empty strings mapped to the
    /// reserved missing token.
    pub fn categorical(&self, field: CategoricalField) -> &str {
        let raw = match field {
            CategoricalField::Component => &self.component,
            CategoricalField::OperatingSystem => &self.operating_system,
            CategoricalField::Priority => &self.priority,
            CategoricalField::Severity => &self.severity,
            CategoricalField::Reporter => &self.reporter,
            CategoricalField::Product => &self.product,
        };
        if raw.is_empty() {
            MISSING
        } else {
            raw
        }
    }
}

/// An immutable, deterministically ordered collection of bug reports.
///
/// Reports are kept sorted by `(created_at, id)` and the developer set is
/// derived from the assignee values, so two corpora built from the same
/// records compare equal regardless of input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    reports: Vec<BugReport>,
    developers: BTreeSet<String>,
    source: String,
    window: Option<TimeWindow>,
}

/// Counts in the shape of a tracker-statistics table.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorpusStats {
    pub n_reports: usize,
    pub n_developers: usize,
    pub per_developer: BTreeMap<String, usize>,
}

/// Refinement parameters: which life-cycle states qualify a report for
/// training and how many qualifying reports a developer needs to be
/// considered active. Matching is case-insensitive on upper-cased tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefineRules {
    statuses: BTreeSet<String>,
    resolutions: BTreeSet<String>,
    min_fixed: usize,
}

impl Default for RefineRules {
    fn default() -> Self {
        RefineRules::new(
            ["CLOSED", "VERIFIED", "RESOLVED"].iter().copied(),
            ["FIXED"].iter().copied(),
            15,
        )
        .expect("default threshold is valid")
    }
}

impl RefineRules {
    pub fn new<'a, S, R>(statuses: S, resolutions: R, min_fixed: usize) -> Result<Self>
    where
        S: IntoIterator<Item = &'a str>,
        R: IntoIterator<Item = &'a str>,
    {
        if min_fixed == 0 {
            return Err(Error::InvalidMinFixed);
        }
        Ok(RefineRules {
            statuses: statuses.into_iter().map(upper).collect(),
            resolutions: resolutions.into_iter().map(upper).collect(),
            min_fixed,
        })
    }

    pub fn min_fixed(&self) -> usize {
        self.min_fixed
    }

    pub fn statuses(&self) -> &BTreeSet<String> {
        &self.statuses
    }

    pub fn resolutions(&self) -> &BTreeSet<String> {
        &self.resolutions
    }

    fn admits(&self, report: &BugReport) -> bool {
        self.statuses.contains(&upper(&report.status))
            && self.resolutions.contains(&upper(&report.resolution))
    }
}

fn upper(s: &str) -> String {
    s.to_uppercase()
}

/// What `Corpus::refine` did, alongside the refined corpus itself.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RefineReport {
    /// Reports dropped by the status/resolution filter.
    pub dropped_by_filter: usize,
    /// Developers pruned for falling under the activity threshold, with the
    /// number of qualifying reports they had.
    pub pruned_developers: BTreeMap<String, usize>,
    /// Developers left under the threshold after the single pruning pass.
    /// Pruning removes whole developers, so counts of the survivors are
    /// untouched and this stays empty; it is recomputed and reported on
    /// every run so a violation cannot pass silently.
    pub below_threshold_after_prune: Vec<String>,
}

impl Corpus {
    /// Builds a corpus from records, sorting them into the canonical
    /// `(created_at, id)` order and deriving the developer set.
    ///
    /// Panics if two records share an id; loaders are expected to reject
    /// duplicates (with diagnostics) before constructing a corpus.
    pub fn new(mut reports: Vec<BugReport>, source: &str, window: Option<TimeWindow>) -> Self {
        reports.sort_by_key(|r| (r.created_at, r.id));
        let mut ids = BTreeSet::new();
        for r in &reports {
            assert!(ids.insert(r.id), "duplicate report id {} in corpus", r.id);
        }
        let developers = reports.iter().map(|r| r.assignee.clone()).collect();
        Corpus {
            reports,
            developers,
            source: source.to_owned(),
            window,
        }
    }

    pub fn reports(&self) -> &[BugReport] {
        &self.reports
    }

    pub fn developers(&self) -> &BTreeSet<String> {
        &self.developers
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn window(&self) -> Option<TimeWindow> {
        self.window
    }

    pub fn len(&self) -> usize {
        self.reports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reports.is_empty()
    }

    /// Assignee labels aligned with `reports()`.
    pub fn labels(&self) -> Vec<&str> {
        self.reports.iter().map(|r| r.assignee.as_str()).collect()
    }

    /// Report and developer counts.
    pub fn stats(&self) -> CorpusStats {
        let mut per_developer: BTreeMap<String, usize> = BTreeMap::new();
        for r in &self.reports {
            *per_developer.entry(r.assignee.clone()).or_insert(0) += 1;
        }
        CorpusStats {
            n_reports: self.reports.len(),
            n_developers: per_developer.len(),
            per_developer,
        }
    }

    /// Keeps reports in the qualifying life-cycle states, then removes every
    /// report of developers with fewer than `min_fixed` qualifying reports.
    /// The pruning pass runs exactly once; no report is mutated and the
    /// result is always a subset of the input.
    pub fn refine(&self, rules: &RefineRules) -> (Corpus, RefineReport) {
        let filtered: Vec<&BugReport> = self.reports.iter().filter(|r| rules.admits(r)).collect();
        let dropped_by_filter = self.reports.len() - filtered.len();

        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for r in &filtered {
            *counts.entry(r.assignee.as_str()).or_insert(0) += 1;
        }

        let pruned_developers: BTreeMap<String, usize> = counts
            .iter()
            .filter(|(_, &n)| n < rules.min_fixed)
            .map(|(dev, &n)| ((*dev).to_owned(), n))
            .collect();

        let kept: Vec<BugReport> = filtered
            .into_iter()
            .filter(|r| !pruned_developers.contains_key(&r.assignee))
            .cloned()
            .collect();

        let corpus = Corpus::new(kept, &self.source, self.window);

        // Single-pass check: every surviving developer must still clear the
        // threshold. Structurally guaranteed (pruning is per-developer), but
        // recomputed so the legal failure mode would be visible.
        let below_threshold_after_prune: Vec<String> = corpus
            .stats()
            .per_developer
            .into_iter()
            .filter(|(_, n)| *n < rules.min_fixed)
            .map(|(dev, _)| dev)
            .collect();

        (
            corpus,
            RefineReport {
                dropped_by_filter,
                pruned_developers,
                below_threshold_after_prune,
            },
        )
    }
}
