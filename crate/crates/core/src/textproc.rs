//! Summary preprocessing: tokenization with stopword removal, vocabulary
//! construction, and the sparse term-frequency bug-term matrix.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::Corpus;

/// Words excluded from tokenization. Parsed from a plain-text list,
/// one word per line, `#` starting a comment line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stopwords {
    words: BTreeSet<String>,
}

impl Stopwords {
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_lowercase())
            .collect();
        Stopwords { words }
    }

    /// The bundled SMART English list.
    pub fn smart() -> Self {
        Stopwords::parse(include_str!("../data/stopwords_smart.txt"))
    }

    /// No stopwords at all; every token survives.
    pub fn none() -> Self {
        Stopwords {
            words: BTreeSet::new(),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Tokenization pipeline: lower-case, split on any non-alphabetic code
/// point (which also strips punctuation and digits), drop short tokens,
/// drop stopwords. Order and duplicates are preserved. No stemming.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    stopwords: Stopwords,
    min_len: usize,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Tokenizer::new(Stopwords::smart(), 2)
    }
}

impl Tokenizer {
    pub fn new(stopwords: Stopwords, min_len: usize) -> Self {
        Tokenizer {
            stopwords,
            // A zero minimum would let the empty segments between
            // consecutive separators through.
            min_len: min_len.max(1),
        }
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        text.to_lowercase()
            .split(|c: char| !c.is_alphabetic())
            .filter(|t| t.chars().count() >= self.min_len)
            .filter(|t| !self.stopwords.contains(t))
            .map(str::to_owned)
            .collect()
    }
}

/// Distinct terms in lexicographic order, with the inverse index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: BTreeMap<String, u32>,
}

impl Vocabulary {
    pub fn empty() -> Self {
        Vocabulary {
            terms: Vec::new(),
            index: BTreeMap::new(),
        }
    }

    /// Deduplicates and orders the given terms.
    pub fn from_terms<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = terms.into_iter().map(Into::into).collect();
        let terms: Vec<String> = set.into_iter().collect();
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Vocabulary { terms, index }
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term(&self, column: u32) -> &str {
        &self.terms[column as usize]
    }

    pub fn column(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Sparse document-term counts; one row per corpus report, in corpus order.
/// Stored entries always have `tf >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BugTermMatrix {
    rows: Vec<Vec<(u32, u32)>>,
    n_columns: usize,
}

impl BugTermMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_columns(&self) -> usize {
        self.n_columns
    }

    /// `(column, tf)` pairs of one row, ordered by column.
    pub fn row(&self, row: usize) -> &[(u32, u32)] {
        &self.rows[row]
    }

    /// Total token count of a row.
    pub fn row_sum(&self, row: usize) -> u64 {
        self.rows[row].iter().map(|&(_, tf)| tf as u64).sum()
    }

    /// Debug export: one `row col tf` triplet per line.
    pub fn to_triplets(&self) -> String {
        let mut out = String::new();
        for (i, row) in self.rows.iter().enumerate() {
            for &(col, tf) in row {
                out.push_str(&format!("{i} {col} {tf}\n"));
            }
        }
        out
    }
}

/// Union of all summary tokens across the corpus, lexicographically ordered.
pub fn build_vocabulary(corpus: &Corpus, tokenizer: &Tokenizer) -> Vocabulary {
    let mut terms: BTreeSet<String> = BTreeSet::new();
    for report in corpus.reports() {
        terms.extend(tokenizer.tokenize(&report.summary));
    }
    Vocabulary::from_terms(terms)
}

/// Term-frequency matrix over the given vocabulary; tokens outside the
/// vocabulary are dropped, so a vocabulary fitted on one corpus can be
/// applied to another.
pub fn build_matrix(corpus: &Corpus, vocab: &Vocabulary, tokenizer: &Tokenizer) -> BugTermMatrix {
    let rows = corpus
        .reports()
        .iter()
        .map(|report| {
            let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
            for token in tokenizer.tokenize(&report.summary) {
                if let Some(col) = vocab.column(&token) {
                    *counts.entry(col).or_insert(0) += 1;
                }
            }
            counts.into_iter().collect()
        })
        .collect();
    BugTermMatrix {
        rows,
        n_columns: vocab.len(),
    }
}
