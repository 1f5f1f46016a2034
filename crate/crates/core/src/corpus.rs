//! Document ingestion, tokenization, vocabulary construction and
//! document-frequency pruning.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Read};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A document as read from the source table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    pub doc_id: usize,
    pub title: String,
    pub body: String,
}

/// Tokenization and pruning settings.
#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessConfig {
    /// Terms present in more than this fraction of documents are removed.
    pub df_ratio_threshold: f64,
    pub stopwords: BTreeSet<String>,
    pub min_token_length: usize,
}

pub const DEFAULT_DF_RATIO_THRESHOLD: f64 = 0.5;
pub const DEFAULT_MIN_TOKEN_LENGTH: usize = 3;

const ENGLISH_STOPWORDS: &[&str] = &[
    "a",
    "about",
    "above",
    "after",
    "again",
    "against",
    "all",
    "also",
    "am",
    "an",
    "and",
    "any",
    "are",
    "as",
    "at",
    "be",
    "because",
    "been",
    "before",
    "being",
    "below",
    "between",
    "both",
    "but",
    "by",
    "can",
    "could",
    "did",
    "do",
    "does",
    "doing",
    "down",
    "during",
    "each",
    "few",
    "for",
    "from",
    "further",
    "had",
    "has",
    "have",
    "having",
    "he",
    "her",
    "here",
    "hers",
    "herself",
    "him",
    "himself",
    "his",
    "how",
    "however",
    "i",
    "if",
    "in",
    "into",
    "is",
    "it",
    "its",
    "itself",
    "just",
    "may",
    "me",
    "more",
    "most",
    "my",
    "myself",
    "no",
    "nor",
    "not",
    "now",
    "of",
    "off",
    "on",
    "once",
    "one",
    "only",
    "or",
    "other",
    "our",
    "ours",
    "ourselves",
    "out",
    "over",
    "own",
    "paper",
    "same",
    "she",
    "should",
    "so",
    "some",
    "such",
    "than",
    "that",
    "the",
    "their",
    "theirs",
    "them",
    "themselves",
    "then",
    "there",
    "these",
    "they",
    "this",
    "those",
    "through",
    "thus",
    "to",
    "too",
    "two",
    "under",
    "until",
    "up",
    "use",
    "used",
    "using",
    "very",
    "via",
    "was",
    "we",
    "were",
    "what",
    "when",
    "where",
    "which",
    "while",
    "who",
    "whom",
    "why",
    "will",
    "with",
    "within",
    "would",
    "you",
    "your",
    "yours",
];

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.df_ratio_threshold > 0.0 && self.df_ratio_threshold <= 1.0) {
            return Err(Error::config(format!(
                "df_ratio_threshold must lie in (0, 1], got {}",
                self.df_ratio_threshold
            )));
        }
        if self.min_token_length == 0 {
            return Err(Error::config("min_token_length must be at least 1"));
        }
        Ok(())
    }
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            df_ratio_threshold: DEFAULT_DF_RATIO_THRESHOLD,
            stopwords: default_stopwords(),
            min_token_length: DEFAULT_MIN_TOKEN_LENGTH,
        }
    }
}

pub fn default_stopwords() -> BTreeSet<String> {
    ENGLISH_STOPWORDS.iter().map(|s| s.to_string()).collect()
}

/// Reads a stopword list: one word per line, blank lines ignored.
pub fn read_stopwords<R: BufRead>(reader: R) -> Result<BTreeSet<String>> {
    let mut words = BTreeSet::new();
    for line in reader.lines() {
        let line = line?;
        let word = line.trim();
        if !word.is_empty() {
            words.insert(word.to_lowercase());
        }
    }
    Ok(words)
}

/// Reads documents from CSV with a header row. `title_column` and
/// `body_column` name the columns to use; other columns are ignored.
pub fn ingest<R: Read>(source: R, title_column: &str, body_column: &str) -> Result<Vec<RawDocument>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(source);
    let mut records = reader.records();

    let header = match records.next() {
        None => return Err(Error::EmptyCorpus),
        Some(header) => header?,
    };
    let column = |name: &str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Ingest { row: 0, message: format!("header has no column named {name:?}") })
    };
    let title_idx = column(title_column)?;
    let body_idx = column(body_column)?;

    let mut docs = Vec::new();
    for (i, record) in records.enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::Ingest { row, message: e.to_string() })?;
        if record.len() != header.len() {
            return Err(Error::Ingest {
                row,
                message: format!("expected {} columns, found {}", header.len(), record.len()),
            });
        }
        let title = record[title_idx].trim();
        if title.is_empty() {
            return Err(Error::Ingest { row, message: "empty title".into() });
        }
        docs.push(RawDocument { doc_id: docs.len(), title: title.to_string(), body: record[body_idx].to_string() });
    }
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(docs)
}

/// Lowercases, splits on non-alphanumeric characters and drops short tokens
/// and stopwords. Token order follows the text.
pub fn tokenize(body: &str, cfg: &PreprocessConfig) -> Vec<String> {
    body.split(|c: char| !c.is_alphanumeric())
        .filter(|tok| !tok.is_empty())
        .map(str::to_lowercase)
        .filter(|tok| tok.chars().count() >= cfg.min_token_length && !cfg.stopwords.contains(tok))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    terms: Vec<String>,
    term_ids: HashMap<String, usize>,
    doc_freq: Vec<usize>,
}

impl Vocabulary {
    /// Builds a vocabulary from terms already in id order. Document
    /// frequencies are unknown and reported as zero.
    pub fn from_terms(terms: Vec<String>) -> Result<Self> {
        let doc_freq = vec![0; terms.len()];
        Self::with_doc_freq(terms, doc_freq)
    }

    fn with_doc_freq(terms: Vec<String>, doc_freq: Vec<usize>) -> Result<Self> {
        let mut term_ids = HashMap::with_capacity(terms.len());
        for (id, term) in terms.iter().enumerate() {
            if term_ids.insert(term.clone(), id).is_some() {
                return Err(Error::Format(format!("duplicate vocabulary term {term:?}")));
            }
        }
        Ok(Self { terms, term_ids, doc_freq })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term(&self, id: usize) -> &str {
        &self.terms[id]
    }

    pub fn id(&self, term: &str) -> Option<usize> {
        self.term_ids.get(term).copied()
    }

    pub fn doc_freq(&self, id: usize) -> usize {
        self.doc_freq[id]
    }

    pub fn into_terms(self) -> Vec<String> {
        self.terms
    }
}

/// Terms sorted lexicographically, with the number of documents containing
/// each term at least once.
pub fn build_vocabulary<S: AsRef<str>>(docs: &[Vec<S>]) -> Vocabulary {
    let df = document_frequencies(docs);
    let (terms, doc_freq) = df.into_iter().map(|(t, n)| (t.to_string(), n)).unzip();
    Vocabulary::with_doc_freq(terms, doc_freq).expect("BTreeMap keys are unique")
}

fn document_frequencies<S: AsRef<str>>(docs: &[Vec<S>]) -> BTreeMap<&str, usize> {
    let mut df = BTreeMap::new();
    for doc in docs {
        let present: BTreeSet<&str> = doc.iter().map(AsRef::as_ref).collect();
        for term in present {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    df
}

/// Documents as term-id sequences over a shared vocabulary.
///
/// Documents whose tokens were all pruned stay in place with an empty token
/// list so that document ids keep matching the source rows. They are skipped
/// by the sampler.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedCorpus {
    pub docs: Vec<Vec<usize>>,
    pub vocabulary: Vocabulary,
    pub titles: Vec<String>,
}

impl TokenizedCorpus {
    pub fn new(docs: Vec<Vec<usize>>, vocabulary: Vocabulary, titles: Vec<String>) -> Result<Self> {
        if docs.len() != titles.len() {
            return Err(Error::Dimension(format!("{} documents but {} titles", docs.len(), titles.len())));
        }
        let v = vocabulary.len();
        if let Some(bad) = docs.iter().flatten().find(|&&w| w >= v) {
            return Err(Error::Dimension(format!("token id {bad} outside vocabulary of size {v}")));
        }
        Ok(Self { docs, vocabulary, titles })
    }

    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn vocab_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn num_tokens(&self) -> usize {
        self.docs.iter().map(Vec::len).sum()
    }

    /// Whether the document has any tokens left to train on.
    pub fn is_trainable(&self, doc_id: usize) -> bool {
        !self.docs[doc_id].is_empty()
    }

    pub fn empty_docs(&self) -> Vec<usize> {
        (0..self.docs.len()).filter(|&d| !self.is_trainable(d)).collect()
    }
}

/// Removes every term whose document-frequency ratio exceeds `threshold`,
/// then assigns dense ids to the remaining terms.
pub fn prune_high_frequency<S: AsRef<str>>(
    docs: &[Vec<S>],
    titles: Vec<String>,
    threshold: f64,
) -> Result<(TokenizedCorpus, BTreeSet<String>)> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::config(format!("df_ratio_threshold must lie in (0, 1], got {threshold}")));
    }
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let total = docs.len() as f64;
    let removed: BTreeSet<String> = document_frequencies(docs)
        .into_iter()
        .filter(|&(_, df)| df as f64 / total > threshold)
        .map(|(term, _)| term.to_string())
        .collect();

    let kept: Vec<Vec<&str>> =
        docs.iter().map(|doc| doc.iter().map(AsRef::as_ref).filter(|t| !removed.contains(*t)).collect()).collect();
    let vocabulary = build_vocabulary(&kept);
    let ids =
        kept.iter().map(|doc| doc.iter().map(|t| vocabulary.id(t).expect("term in vocabulary")).collect()).collect();
    Ok((TokenizedCorpus::new(ids, vocabulary, titles)?, removed))
}

/// Output of [`preprocess`].
#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub corpus: TokenizedCorpus,
    pub removed_terms: BTreeSet<String>,
}

/// Tokenizes and prunes a set of ingested documents.
pub fn preprocess(raw: &[RawDocument], cfg: &PreprocessConfig) -> Result<Preprocessed> {
    cfg.validate()?;
    let tokens: Vec<Vec<String>> = raw.iter().map(|d| tokenize(&d.body, cfg)).collect();
    let titles = raw.iter().map(|d| d.title.clone()).collect();
    let (corpus, removed_terms) = prune_high_frequency(&tokens, titles, cfg.df_ratio_threshold)?;
    Ok(Preprocessed { corpus, removed_terms })
}
