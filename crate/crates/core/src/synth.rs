//! Deterministic synthetic-corpus generator. The mined tracker datasets
//! behind the published tables cannot be redistributed, so a seeded
//! generator with class-conditional component, operating-system, priority,
//! reporter, and summary-vocabulary distributions stands in for them in
//! tests and demos.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{BugReport, Corpus, Timestamp};
use crate::rng::SplitMix64;

const DEVELOPERS: [&str; 8] = [
    "amara", "bruno", "chen", "delia", "edgar", "farah", "goran", "hiro",
];
const COMPONENTS: [&str; 8] = [
    "editor",
    "compiler",
    "debugger",
    "profiler",
    "installer",
    "designer",
    "terminal",
    "network",
];
const SIGNATURES: [[&str; 2]; 8] = [
    ["viewport", "sprite"],
    ["codegen", "inliner"],
    ["breakpoint", "stacktrace"],
    ["sampler", "flamegraph"],
    ["bundler", "manifest"],
    ["layout", "stylesheet"],
    ["scrollback", "keymap"],
    ["socket", "handshake"],
];
const OPERATING_SYSTEMS: [&str; 4] = ["linux", "windows", "macos", "freebsd"];
const PRIORITIES: [&str; 5] = ["P1", "P2", "P3", "P4", "P5"];
const SEVERITIES: [&str; 6] = ["blocker", "critical", "major", "normal", "minor", "trivial"];
const PRODUCTS: [&str; 2] = ["workbench", "platform"];

// 2011-12-01T00:00:00Z.
const EPOCH_START: i64 = 1_322_697_600;

/// Shape and signal strengths of the generated corpus. The fidelity knobs
/// are the probability that a report carries its developer's "home" value
/// for that field rather than a random one.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_reports: usize,
    /// Between 2 and 8; each developer owns a component, a dedicated
    /// reporter, a home operating system and priority, and a two-word
    /// summary vocabulary.
    pub n_developers: usize,
    pub seed: u64,
    pub component_fidelity: f64,
    pub os_fidelity: f64,
    pub priority_fidelity: f64,
    pub reporter_fidelity: f64,
    /// Probability per summary keyword of drawing from the developer's own
    /// vocabulary. The remainder leaks to the paired developer (pairs are
    /// consecutive indices), so summaries alone confuse pairs while the
    /// categorical fields still separate them.
    pub summary_fidelity: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_reports: 200,
            n_developers: 8,
            seed: 42,
            component_fidelity: 0.90,
            os_fidelity: 0.50,
            priority_fidelity: 0.40,
            reporter_fidelity: 0.80,
            summary_fidelity: 0.70,
        }
    }
}

/// Filler words shared across all classes: consonant-vowel syllable triples,
/// deterministic and disjoint from the signature vocabularies.
fn noise_vocabulary(size: usize) -> Vec<String> {
    const CONSONANTS: [&str; 14] = [
        "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z",
    ];
    const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];
    let mut words = Vec::with_capacity(size);
    'outer: for c1 in CONSONANTS {
        for v1 in VOWELS {
            for c2 in CONSONANTS {
                for v2 in VOWELS {
                    for c3 in CONSONANTS {
                        for v3 in VOWELS {
                            words.push(format!("{c1}{v1}{c2}{v2}{c3}{v3}"));
                            if words.len() == size {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
    }
    words
}

/// Generates the corpus. Reports are dealt to developers round-robin, so
/// per-developer counts are fixed by construction; all reports carry
/// qualifying status/resolution values and timestamps one hour apart.
pub fn generate(cfg: &SynthConfig) -> Corpus {
    assert!(
        (2..=DEVELOPERS.len()).contains(&cfg.n_developers),
        "supported developer counts are 2..=8"
    );
    let mut rng = SplitMix64::new(cfg.seed);
    let noise = noise_vocabulary(200);
    let devs = cfg.n_developers;

    let reporters: Vec<String> = (0..devs)
        .map(|d| format!("user_{}", DEVELOPERS[d]))
        .collect();

    let statuses = ["RESOLVED", "VERIFIED", "CLOSED"];
    let mut reports = Vec::with_capacity(cfg.n_reports);
    for i in 0..cfg.n_reports {
        let dev = i % devs;

        let component = if rng.next_f64() < cfg.component_fidelity {
            COMPONENTS[dev]
        } else {
            let mut other = rng.next_below(devs as u64 - 1) as usize;
            if other >= dev {
                other += 1;
            }
            COMPONENTS[other]
        };
        let operating_system = if rng.next_f64() < cfg.os_fidelity {
            OPERATING_SYSTEMS[dev % OPERATING_SYSTEMS.len()]
        } else {
            rng.choose(&OPERATING_SYSTEMS)
        };
        let priority = if rng.next_f64() < cfg.priority_fidelity {
            PRIORITIES[dev % PRIORITIES.len()]
        } else {
            rng.choose(&PRIORITIES)
        };
        let reporter = if rng.next_f64() < cfg.reporter_fidelity {
            reporters[dev].clone()
        } else {
            reporters[rng.next_below(devs as u64) as usize].clone()
        };

        // Word leakage goes to the paired developer; with an odd developer
        // count the last one leaks to its predecessor.
        let partner = if dev.is_multiple_of(2) {
            if dev + 1 < devs {
                dev + 1
            } else {
                dev.saturating_sub(1)
            }
        } else {
            dev - 1
        };
        let mut words: Vec<&str> = Vec::with_capacity(8);
        if rng.next_f64() < 0.25 {
            words.push("the");
        }
        for _ in 0..4 {
            let pool = if rng.next_f64() < cfg.summary_fidelity {
                dev
            } else {
                partner
            };
            words.push(SIGNATURES[pool][rng.next_below(2) as usize]);
        }
        let noise_a = rng.choose(&noise);
        let noise_b = rng.choose(&noise);
        words.push(noise_a);
        words.push(noise_b);
        let mut summary = words.join(" ");
        if rng.next_f64() < 0.25 {
            summary.push_str(&format!(" {}", 1000 + rng.next_below(9000)));
        }

        let created = Timestamp(EPOCH_START + i as i64 * 3600);
        reports.push(BugReport {
            id: 224_000 + i as u64,
            summary,
            component: component.to_string(),
            operating_system: operating_system.to_string(),
            priority: priority.to_string(),
            severity: rng.choose(&SEVERITIES).to_string(),
            reporter,
            assignee: DEVELOPERS[dev].to_string(),
            status: statuses[i % statuses.len()].to_string(),
            resolution: "FIXED".to_string(),
            created_at: created,
            modified_at: Timestamp(created.0 + 86_400),
            product: rng.choose(&PRODUCTS).to_string(),
        });
    }
    Corpus::new(reports, "synthetic", None)
}
