//! Bugzilla-style REST ingestion: `GET {base}/rest/bug` with repeated
//! status/resolution query parameters, a creation-time lower bound, and
//! limit/offset pagination. Every fetch writes a snapshot file (metadata
//! line followed by the raw page bodies as JSONL) so any run can be
//! replayed offline, byte for byte.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::thread;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use bugassign_core::corpus::{Corpus, TimeWindow};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corpus_io::{format_timestamp, LoadDiagnostics};

const MAX_ATTEMPTS: u32 = 3;
const BACKOFF_BASE_MS: u64 = 100;
const MAX_PAGES: usize = 10_000;

/// Local field name -> remote field name. Defaults follow the Bugzilla REST
/// schema; override individual entries through configuration for trackers
/// that drifted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMap {
    map: BTreeMap<String, String>,
}

pub const LOCAL_FIELDS: [&str; 13] = [
    "id",
    "summary",
    "component",
    "op_sys",
    "priority",
    "severity",
    "reporter",
    "assignee",
    "status",
    "resolution",
    "created_at",
    "modified_at",
    "product",
];

impl Default for FieldMap {
    fn default() -> Self {
        let mut map = BTreeMap::new();
        for field in LOCAL_FIELDS {
            map.insert(field.to_string(), field.to_string());
        }
        map.insert("reporter".into(), "creator".into());
        map.insert("assignee".into(), "assigned_to".into());
        map.insert("created_at".into(), "creation_time".into());
        map.insert("modified_at".into(), "last_change_time".into());
        FieldMap { map }
    }
}

impl FieldMap {
    pub fn remote<'a>(&'a self, local: &'a str) -> &'a str {
        self.map.get(local).map(String::as_str).unwrap_or(local)
    }

    pub fn set(&mut self, local: &str, remote: &str) -> Result<()> {
        if !LOCAL_FIELDS.contains(&local) {
            bail!("unknown local field in mapping: {local}");
        }
        self.map.insert(local.to_string(), remote.to_string());
        Ok(())
    }
}

/// Search filter sent to the tracker.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FilterQuery {
    pub statuses: Vec<String>,
    pub resolutions: Vec<String>,
    /// Lower bound sent as the creation-time parameter; the upper bound of
    /// a window is enforced client-side.
    pub created_after: Option<String>,
    pub page_limit: usize,
}

impl Default for FilterQuery {
    fn default() -> Self {
        FilterQuery {
            statuses: vec!["CLOSED".into(), "VERIFIED".into(), "RESOLVED".into()],
            resolutions: vec!["FIXED".into()],
            created_after: None,
            page_limit: 500,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SnapshotHeader {
    url: String,
    query: FilterQuery,
    fetched_at: String,
}

#[derive(Debug)]
pub struct FetchOutcome {
    pub corpus: Corpus,
    pub diagnostics: LoadDiagnostics,
    pub pages: usize,
}

fn get_with_retry(agent: &ureq::Agent, url: &str, params: &[(String, String)]) -> Result<String> {
    let mut last_error = None;
    for attempt in 0..MAX_ATTEMPTS {
        if attempt > 0 {
            thread::sleep(Duration::from_millis(BACKOFF_BASE_MS << (attempt - 1)));
        }
        let mut request = agent.get(url);
        for (key, value) in params {
            request = request.query(key, value);
        }
        match request.call() {
            Ok(response) => {
                return response
                    .into_string()
                    .context("failed reading response body");
            }
            Err(ureq::Error::Status(code, _)) if code >= 500 => {
                last_error = Some(anyhow!("server returned {code}"));
            }
            Err(ureq::Error::Status(code, _)) => {
                bail!("request to {url} failed with status {code}");
            }
            Err(e) => {
                last_error = Some(anyhow!("transport error: {e}"));
            }
        }
    }
    Err(last_error
        .unwrap_or_else(|| anyhow!("request failed"))
        .context(format!("giving up on {url} after {MAX_ATTEMPTS} attempts")))
}

/// Pulls one string field out of a remote bug object. `mandatory` fields
/// must be present as keys, otherwise the schema has drifted and the fetch
/// fails naming the field.
fn remote_str(bug: &Value, map: &FieldMap, local: &str, mandatory: bool) -> Result<String> {
    let remote = map.remote(local);
    match bug.get(remote) {
        Some(Value::Null) | None if mandatory => Err(anyhow!(
            "schema drift: remote field '{remote}' (mapped from '{local}') missing from bug object"
        )),
        Some(Value::Null) | None => Ok(String::new()),
        Some(Value::String(s)) => Ok(s.clone()),
        Some(other) => Ok(other.to_string()),
    }
}

/// Converts the `bugs` array of one page into wire rows and feeds them to
/// the shared row validation path.
fn page_to_reports(
    page: &Value,
    map: &FieldMap,
    window: Option<TimeWindow>,
    seen: &mut BTreeSet<u64>,
    diag: &mut LoadDiagnostics,
    reports: &mut Vec<bugassign_core::corpus::BugReport>,
) -> Result<usize> {
    let bugs = page
        .get("bugs")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("schema drift: response has no 'bugs' array"))?;
    for bug in bugs {
        let id = bug
            .get(map.remote("id"))
            .ok_or_else(|| anyhow!("schema drift: remote field '{}' missing", map.remote("id")))?
            .as_u64();
        let row = crate::corpus_io::Row {
            id,
            summary: remote_str(bug, map, "summary", false)?,
            component: remote_str(bug, map, "component", false)?,
            op_sys: remote_str(bug, map, "op_sys", false)?,
            priority: remote_str(bug, map, "priority", false)?,
            severity: remote_str(bug, map, "severity", false)?,
            reporter: remote_str(bug, map, "reporter", false)?,
            assignee: remote_str(bug, map, "assignee", true)?,
            status: remote_str(bug, map, "status", false)?,
            resolution: remote_str(bug, map, "resolution", false)?,
            created_at: remote_str(bug, map, "created_at", true)?,
            modified_at: remote_str(bug, map, "modified_at", false)?,
            product: remote_str(bug, map, "product", false)?,
        };
        if let Some(report) = crate::corpus_io::convert_row(row, window, seen, diag) {
            reports.push(report);
        }
    }
    Ok(bugs.len())
}

/// Live fetch: paginates until a short page, validates rows, snapshots the
/// raw responses, and assembles the corpus (source = base URL).
pub fn fetch_corpus(
    base_url: &str,
    query: &FilterQuery,
    map: &FieldMap,
    window: Option<TimeWindow>,
    snapshot_path: &Path,
) -> Result<FetchOutcome> {
    let agent = ureq::AgentBuilder::new()
        .timeout(Duration::from_secs(30))
        .build();
    let url = format!("{}/rest/bug", base_url.trim_end_matches('/'));

    let mut params: Vec<(String, String)> = Vec::new();
    for s in &query.statuses {
        params.push(("status".into(), s.clone()));
    }
    for r in &query.resolutions {
        params.push(("resolution".into(), r.clone()));
    }
    if let Some(after) = &query.created_after {
        params.push(("creation_time".into(), after.clone()));
    }

    let mut pages: Vec<Value> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut diag = LoadDiagnostics::default();
    let mut reports = Vec::new();
    let mut offset = 0usize;
    loop {
        if pages.len() >= MAX_PAGES {
            bail!("pagination did not terminate after {MAX_PAGES} pages");
        }
        let mut page_params = params.clone();
        page_params.push(("limit".into(), query.page_limit.to_string()));
        page_params.push(("offset".into(), offset.to_string()));
        let body = get_with_retry(&agent, &url, &page_params)?;
        let page: Value = serde_json::from_str(&body)
            .with_context(|| format!("page at offset {offset} is not valid JSON"))?;
        let got = page_to_reports(&page, map, window, &mut seen, &mut diag, &mut reports)?;
        pages.push(page);
        if got < query.page_limit {
            break;
        }
        offset += query.page_limit;
    }

    write_snapshot(snapshot_path, base_url, query, &pages)?;
    Ok(FetchOutcome {
        corpus: Corpus::new(reports, base_url, window),
        diagnostics: diag,
        pages: pages.len(),
    })
}

fn write_snapshot(path: &Path, url: &str, query: &FilterQuery, pages: &[Value]) -> Result<()> {
    let header = SnapshotHeader {
        url: url.to_string(),
        query: query.clone(),
        fetched_at: format_timestamp(bugassign_core::corpus::Timestamp(
            chrono::Utc::now().timestamp(),
        )),
    };
    let mut out = serde_json::to_string(&header)?;
    out.push('\n');
    for page in pages {
        // Responses are re-serialized compactly; JSONL needs one line each.
        out.push_str(&serde_json::to_string(page)?);
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("cannot write snapshot {}", path.display()))?;
    Ok(())
}

/// Offline replay of a snapshot through the identical conversion path; the
/// resulting corpus equals the live fetch that wrote the snapshot.
pub fn replay_snapshot(
    path: &Path,
    map: &FieldMap,
    window: Option<TimeWindow>,
) -> Result<FetchOutcome> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read snapshot {}", path.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: SnapshotHeader = serde_json::from_str(
        lines
            .next()
            .ok_or_else(|| anyhow!("snapshot {} is empty", path.display()))?,
    )
    .context("snapshot metadata line is not valid")?;

    let mut seen = BTreeSet::new();
    let mut diag = LoadDiagnostics::default();
    let mut reports = Vec::new();
    let mut pages = 0usize;
    for line in lines {
        let page: Value = serde_json::from_str(line)
            .with_context(|| format!("snapshot page {} is not valid JSON", pages + 1))?;
        page_to_reports(&page, map, window, &mut seen, &mut diag, &mut reports)?;
        pages += 1;
    }
    Ok(FetchOutcome {
        corpus: Corpus::new(reports, &header.url, window),
        diagnostics: diag,
        pages,
    })
}
