//! End-to-end fitting: tokenize summaries, select terms by chi-square on the
//! training corpus, encode vectors, and train the classifier. Used both for
//! whole-corpus model building and per fold during cross-validation, so term
//! selection never sees held-out reports.

use alloc::vec::Vec;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::features::{assemble, chi2_scores, select_terms, MethodConfig, TermScore};
use crate::nbayes::{train, NaiveBayesModel};
use crate::textproc::{build_matrix, build_vocabulary, Tokenizer, Vocabulary};

/// A trained model plus the term scores behind its selection (absent for
/// methods that use no text).
#[derive(Debug, Clone)]
pub struct FitOutput {
    pub model: NaiveBayesModel,
    pub term_scores: Option<Vec<TermScore>>,
}

/// Fits a model on the whole given corpus.
pub fn fit(
    corpus: &Corpus,
    cfg: &MethodConfig,
    tokenizer: &Tokenizer,
    alpha: f64,
) -> Result<FitOutput> {
    if corpus.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let labels = corpus.labels();

    let (selected, term_scores) = if cfg.uses_text() {
        let vocabulary = build_vocabulary(corpus, tokenizer);
        let matrix = build_matrix(corpus, &vocabulary, tokenizer);
        let scores = chi2_scores(&matrix, &vocabulary, &labels)?;
        let selected = select_terms(&scores, cfg.term_fraction)?;
        (selected, Some(scores))
    } else {
        (Vocabulary::empty(), None)
    };

    let vectors: Vec<_> = corpus
        .reports()
        .iter()
        .map(|r| assemble(r, cfg, &selected, tokenizer))
        .collect();
    let model = train(cfg, &selected, &vectors, &labels, alpha)?;
    Ok(FitOutput { model, term_scores })
}
