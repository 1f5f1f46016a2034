//! LDA topic models: hyperparameters, the fitted φ/θ matrices, collapsed
//! Gibbs training and the model file format.

mod gibbs;
mod model_file;

pub use gibbs::{train_gibbs, GibbsSampler};
pub use model_file::{load_model, read_model, save_model, write_model, TrainedModel, MODEL_VERSION, RNG_ALGORITHM};

use serde::{Deserialize, Serialize};

use crate::corpus::TokenizedCorpus;
use crate::error::{Error, Result};

/// Dense row-major matrix of probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} values cannot fill a {rows}x{cols} matrix", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

pub const DEFAULT_BETA: f64 = 0.01;
pub const DEFAULT_ITERATIONS: usize = 1000;
pub const DEFAULT_BURN_IN: usize = 200;
pub const DEFAULT_MIN_TOPIC_PROB: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    /// Number of topics.
    pub k: usize,
    /// Symmetric document-topic concentration.
    pub alpha: f64,
    /// Symmetric topic-word concentration.
    pub beta: f64,
    /// Total Gibbs sweeps.
    pub iterations: usize,
    /// Sweeps before the chain is considered mixed. Must be below `iterations`.
    pub burn_in: usize,
    pub seed: u64,
    /// Topic probabilities below this value are zeroed before ranking and
    /// word scoring.
    pub min_topic_prob: f64,
}

impl Hyperparams {
    /// Defaults for `k` topics: alpha = 50/k, beta = 0.01, 1000 sweeps with
    /// 200 burn-in, seed 0, threshold 0.01.
    pub fn new(k: usize) -> Self {
        Self {
            k,
            alpha: 50.0 / k.max(1) as f64,
            beta: DEFAULT_BETA,
            iterations: DEFAULT_ITERATIONS,
            burn_in: DEFAULT_BURN_IN,
            seed: 0,
            min_topic_prob: DEFAULT_MIN_TOPIC_PROB,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::config("topic count k must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::config(format!("beta must be positive, got {}", self.beta)));
        }
        if self.iterations < 1 {
            return Err(Error::config("iterations must be at least 1"));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::config(format!(
                "burn_in ({}) must be below iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        check_tau(self.min_topic_prob)
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if (0.0..1.0).contains(&tau) {
        Ok(())
    } else {
        Err(Error::config(format!("min_topic_prob must lie in [0, 1), got {tau}")))
    }
}

/// A fitted topic model.
///
/// `phi` is K×V with `phi[i][x]` the probability of term x under topic i.
/// `theta` is D×K with `theta[y][i]` the probability of topic i in document
/// y, before any minimum-probability thresholding.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    pub phi: Matrix,
    pub theta: Matrix,
    pub hyper: Hyperparams,
}

impl TopicModel {
    pub fn new(phi: Matrix, theta: Matrix, hyper: Hyperparams) -> Result<Self> {
        if phi.rows() != hyper.k || theta.cols() != hyper.k {
            return Err(Error::Dimension(format!(
                "phi is {}x{} and theta is {}x{} for k = {}",
                phi.rows(),
                phi.cols(),
                theta.rows(),
                theta.cols(),
                hyper.k
            )));
        }
        Ok(Self { phi, theta, hyper })
    }

    pub fn num_topics(&self) -> usize {
        self.hyper.k
    }

    pub fn vocab_size(&self) -> usize {
        self.phi.cols()
    }

    pub fn num_docs(&self) -> usize {
        self.theta.rows()
    }

    /// θ with [`apply_min_threshold`] applied to every row.
    pub fn thresholded_theta(&self) -> Matrix {
        let mut out = self.theta.clone();
        for y in 0..out.rows() {
            let row = apply_min_threshold(self.theta.row(y), self.hyper.min_topic_prob)
                .expect("threshold validated with hyperparameters");
            out.row_mut(y).copy_from_slice(&row);
        }
        out
    }
}

/// Zeroes every entry below `tau` without renormalizing. If every entry is
/// below `tau`, the largest one (lowest index on ties) is kept.
pub fn apply_min_threshold(row: &[f64], tau: f64) -> Result<Vec<f64>> {
    check_tau(tau)?;
    let mut out: Vec<f64> = row.iter().map(|&p| if p < tau { 0.0 } else { p }).collect();
    if !row.is_empty() && out.iter().all(|&p| p == 0.0) {
        let best = argmax(row);
        out[best] = row[best];
    }
    Ok(out)
}

pub(crate) fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in row.iter().enumerate() {
        if p > row[best] {
            best = i;
        }
    }
    best
}

/// Sum over every token of `ln Σ_i θ[d][i]·φ[i][w]`.
pub fn log_likelihood(corpus: &TokenizedCorpus, model: &TopicModel) -> Result<f64> {
    if model.num_docs() != corpus.num_docs() || model.vocab_size() != corpus.vocab_size() {
        return Err(Error::Dimension(format!(
            "model covers {} documents and {} terms, corpus has {} and {}",
            model.num_docs(),
            model.vocab_size(),
            corpus.num_docs(),
            corpus.vocab_size()
        )));
    }
    let mut total = 0.0;
    for (y, doc) in corpus.docs.iter().enumerate() {
        let theta = model.theta.row(y);
        for &w in doc {
            let p: f64 = theta.iter().enumerate().map(|(i, t)| t * model.phi.get(i, w)).sum();
            total += p.ln();
        }
    }
    Ok(total)
}
