//! Views derived from a fitted model: topic ranks per document, top words
//! per topic, and per-document word scores that mix topic-word
//! probabilities by the document's thresholded topic weights.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lda::{Matrix, TopicModel, TrainedModel};

pub const DEFAULT_TOP_WORDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisplayMode {
    #[default]
    Rank,
    Probability,
}

impl DisplayMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DisplayMode::Rank => "rank",
            DisplayMode::Probability => "probability",
        }
    }
}

impl fmt::Display for DisplayMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DisplayMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rank" => Ok(DisplayMode::Rank),
            "probability" => Ok(DisplayMode::Probability),
            other => Err(Error::config(format!("unknown mode {other:?} (expected rank or probability)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyticsConfig {
    pub top_words_per_topic: usize,
    /// Searchable words kept per document.
    pub top_words_per_doc: usize,
    pub mode: DisplayMode,
}

impl Default for AnalyticsConfig {
    fn default() -> Self {
        Self { top_words_per_topic: DEFAULT_TOP_WORDS, top_words_per_doc: DEFAULT_TOP_WORDS, mode: DisplayMode::Rank }
    }
}

impl AnalyticsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.top_words_per_topic == 0 || self.top_words_per_doc == 0 {
            return Err(Error::config("top word counts must be at least 1"));
        }
        Ok(())
    }
}

/// Display label of a 0-based topic id.
pub fn topic_label(topic: usize) -> String {
    format!("T{}", topic + 1)
}

/// Ranks of each topic, 1 for the most probable. Ties go to the lower
/// topic index.
pub fn rank_topics(row: &[f64]) -> Vec<usize> {
    let mut ranks = vec![0; row.len()];
    for (r, topic) in descending_order(row).into_iter().enumerate() {
        ranks[topic] = r + 1;
    }
    ranks
}

/// Indices sorted by descending value, ascending index on ties.
fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order
}

fn top_n(values: &[f64], n: usize) -> Vec<(usize, f64)> {
    descending_order(values).into_iter().take(n).map(|i| (i, values[i])).collect()
}

/// D×K topic ranks, each row a permutation of 1..=K.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankMatrix {
    k: usize,
    ranks: Vec<usize>,
}

impl RankMatrix {
    pub fn from_theta(theta: &Matrix) -> Self {
        let ranks = theta.iter_rows().flat_map(rank_topics).collect();
        Self { k: theta.cols(), ranks }
    }

    pub fn num_docs(&self) -> usize {
        self.ranks.len().checked_div(self.k).unwrap_or(0)
    }

    pub fn row(&self, doc: usize) -> &[usize] {
        &self.ranks[doc * self.k..(doc + 1) * self.k]
    }
}

/// Per topic, the `k` highest-probability term ids with their φ values,
/// descending, ties by ascending term id. Rows hold `min(k, V)` entries.
pub fn top_topic_words(phi: &Matrix, k: usize) -> Vec<Vec<(usize, f64)>> {
    phi.iter_rows().map(|row| top_n(row, k)).collect()
}

/// Score of every term for one document: `Σ_i φ[i][x] · θ[i]`, summed over
/// topics in ascending order.
pub fn word_scores(phi: &Matrix, theta_row: &[f64]) -> Vec<f64> {
    let mut scores = vec![0.0; phi.cols()];
    for (topic, &weight) in theta_row.iter().enumerate() {
        for (s, &p) in scores.iter_mut().zip(phi.row(topic)) {
            *s += p * weight;
        }
    }
    scores
}

/// The `n` best-scoring terms of a document, using its thresholded θ row.
pub fn doc_word_scores(model: &TopicModel, doc_id: usize, n: usize) -> Result<Vec<(usize, f64)>> {
    if doc_id >= model.num_docs() {
        return Err(Error::DocumentOutOfRange { doc_id, len: model.num_docs() });
    }
    let theta = crate::lda::apply_min_threshold(model.theta.row(doc_id), model.hyper.min_topic_prob)?;
    Ok(top_n(&word_scores(&model.phi, &theta), n))
}

/// Per-document axis values in the requested mode.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisTable {
    pub mode: DisplayMode,
    k: usize,
    values: Vec<f64>,
}

impl AxisTable {
    pub fn row(&self, doc: usize) -> &[f64] {
        &self.values[doc * self.k..(doc + 1) * self.k]
    }

    pub fn num_docs(&self) -> usize {
        self.values.len().checked_div(self.k).unwrap_or(0)
    }
}

/// Rank mode yields the rank matrix, probability mode the thresholded θ.
pub fn distribution_view(theta_thresholded: &Matrix, ranks: &RankMatrix, mode: DisplayMode) -> AxisTable {
    let values = match mode {
        DisplayMode::Rank => ranks.ranks.iter().map(|&r| r as f64).collect(),
        DisplayMode::Probability => theta_thresholded.as_slice().to_vec(),
    };
    AxisTable { mode, k: theta_thresholded.cols(), values }
}

/// A term with its weight under some topic or document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedTerm {
    pub term: String,
    pub p: f64,
}

pub type TopicWordList = Vec<Vec<WeightedTerm>>;
pub type DocWordScores = Vec<Vec<WeightedTerm>>;

/// Everything the exploration views read, computed once from a model.
#[derive(Debug, Clone)]
pub struct Analytics {
    pub config: AnalyticsConfig,
    pub titles: Vec<String>,
    pub theta: Matrix,
    pub ranks: RankMatrix,
    pub topic_words: TopicWordList,
    pub doc_words: DocWordScores,
    rank_view: AxisTable,
    prob_view: AxisTable,
}

impl Analytics {
    pub fn new(trained: &TrainedModel, config: AnalyticsConfig) -> Result<Self> {
        config.validate()?;
        let model = &trained.model;
        let vocab = &trained.vocabulary;
        let label = |pairs: Vec<(usize, f64)>| -> Vec<WeightedTerm> {
            pairs.into_iter().map(|(id, p)| WeightedTerm { term: vocab.term(id).to_string(), p }).collect()
        };

        let theta = model.thresholded_theta();
        let ranks = RankMatrix::from_theta(&theta);
        let topic_words = top_topic_words(&model.phi, config.top_words_per_topic).into_iter().map(label).collect();
        let doc_words = theta
            .iter_rows()
            .map(|row| label(top_n(&word_scores(&model.phi, row), config.top_words_per_doc)))
            .collect();
        let rank_view = distribution_view(&theta, &ranks, DisplayMode::Rank);
        let prob_view = distribution_view(&theta, &ranks, DisplayMode::Probability);
        Ok(Self { config, titles: trained.titles.clone(), theta, ranks, topic_words, doc_words, rank_view, prob_view })
    }

    pub fn num_docs(&self) -> usize {
        self.titles.len()
    }

    pub fn num_topics(&self) -> usize {
        self.theta.cols()
    }

    pub fn view(&self, mode: DisplayMode) -> &AxisTable {
        match mode {
            DisplayMode::Rank => &self.rank_view,
            DisplayMode::Probability => &self.prob_view,
        }
    }

    /// Whether `word` is one of the document's searchable words, ignoring case.
    pub fn has_top_word(&self, doc: usize, word: &str) -> bool {
        let word = word.to_lowercase();
        self.doc_words[doc].iter().any(|w| w.term.to_lowercase() == word)
    }

    /// Treemap root: one equally weighted cell per topic.
    pub fn treemap_topics(&self) -> Vec<(String, f64)> {
        (0..self.num_topics()).map(|t| (topic_label(t), 1.0)).collect()
    }

    /// Treemap drill-down: the topic's top words weighted by φ.
    pub fn treemap_words(&self, topic: usize) -> Option<Vec<(String, f64)>> {
        self.topic_words.get(topic).map(|words| words.iter().map(|w| (w.term.clone(), w.p)).collect())
    }

    pub fn topics_json(&self) -> TopicsResponse {
        let topics = self
            .topic_words
            .iter()
            .enumerate()
            .map(|(id, words)| TopicSummary { id, label: topic_label(id), words: words.clone() })
            .collect();
        TopicsResponse { topics }
    }

    pub fn documents_json(&self, mode: DisplayMode) -> DocumentsResponse {
        let docs = (0..self.num_docs())
            .map(|y| DocumentRow {
                id: y,
                title: self.titles[y].clone(),
                top_words: self.doc_words[y].clone(),
                ranks: self.ranks.row(y).to_vec(),
                probs: self.theta.row(y).to_vec(),
            })
            .collect();
        DocumentsResponse { mode, k: self.num_topics(), docs }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicSummary {
    pub id: usize,
    pub label: String,
    pub words: Vec<WeightedTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicsResponse {
    pub topics: Vec<TopicSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentRow {
    pub id: usize,
    pub title: String,
    pub top_words: Vec<WeightedTerm>,
    pub ranks: Vec<usize>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentsResponse {
    pub mode: DisplayMode,
    pub k: usize,
    pub docs: Vec<DocumentRow>,
}
