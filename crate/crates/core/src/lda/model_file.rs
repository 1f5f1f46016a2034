//! Versioned JSON model container.
//!
//! The file is compact JSON whose first member is a fixed `format` tag, so
//! every valid file starts with the same magic prefix. Floats are written in
//! shortest round-trip form and read back bit-exactly.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Hyperparams, Matrix, TopicModel};
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

pub const MODEL_VERSION: u32 = 1;
/// Generator used by the sampler, recorded so runs can be reproduced.
pub const RNG_ALGORITHM: &str = "chacha8";

const FORMAT_TAG: &str = "topiclens-model";
const MAGIC: &[u8] = b"{\"format\":\"topiclens-model\"";

/// A topic model together with the vocabulary and document titles it was
/// trained on.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub model: TopicModel,
    pub vocabulary: Vocabulary,
    pub titles: Vec<String>,
}

impl TrainedModel {
    pub fn new(model: TopicModel, vocabulary: Vocabulary, titles: Vec<String>) -> Result<Self> {
        if vocabulary.len() != model.vocab_size() || titles.len() != model.num_docs() {
            return Err(Error::Dimension(format!(
                "model has {} terms and {} documents, got {} terms and {} titles",
                model.vocab_size(),
                model.num_docs(),
                vocabulary.len(),
                titles.len()
            )));
        }
        Ok(Self { model, vocabulary, titles })
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    k: usize,
    v: usize,
    d: usize,
    alpha: f64,
    beta: f64,
    iterations: usize,
    burn_in: usize,
    seed: u64,
    rng: String,
    min_topic_prob: f64,
    phi: Vec<f64>,
    theta: Vec<f64>,
    vocabulary: Vec<String>,
    titles: Vec<String>,
}

pub fn write_model<W: Write>(mut out: W, trained: &TrainedModel) -> Result<()> {
    let m = &trained.model;
    let h = &m.hyper;
    let file = ModelFile {
        format: FORMAT_TAG.into(),
        version: MODEL_VERSION,
        k: h.k,
        v: m.vocab_size(),
        d: m.num_docs(),
        alpha: h.alpha,
        beta: h.beta,
        iterations: h.iterations,
        burn_in: h.burn_in,
        seed: h.seed,
        rng: RNG_ALGORITHM.into(),
        min_topic_prob: h.min_topic_prob,
        phi: m.phi.as_slice().to_vec(),
        theta: m.theta.as_slice().to_vec(),
        vocabulary: trained.vocabulary.terms().to_vec(),
        titles: trained.titles.clone(),
    };
    serde_json::to_writer(&mut out, &file).map_err(|e| Error::Format(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_model<R: Read>(mut input: R) -> Result<TrainedModel> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if !bytes.starts_with(MAGIC) {
        return Err(Error::Format("not a model file (bad magic)".into()));
    }
    let file: ModelFile = serde_json::from_slice(&bytes).map_err(|e| Error::Format(e.to_string()))?;
    if file.version != MODEL_VERSION {
        return Err(Error::Version { found: file.version, expected: MODEL_VERSION });
    }
    if file.rng != RNG_ALGORITHM {
        return Err(Error::Format(format!("unknown rng algorithm {:?}", file.rng)));
    }
    if file.vocabulary.len() != file.v || file.titles.len() != file.d {
        return Err(Error::Format("vocabulary or titles disagree with declared dimensions".into()));
    }
    let corrupt = |e: Error| Error::Format(e.to_string());
    let phi = Matrix::from_row_major(file.k, file.v, file.phi).map_err(corrupt)?;
    let theta = Matrix::from_row_major(file.d, file.k, file.theta).map_err(corrupt)?;
    let hyper = Hyperparams {
        k: file.k,
        alpha: file.alpha,
        beta: file.beta,
        iterations: file.iterations,
        burn_in: file.burn_in,
        seed: file.seed,
        min_topic_prob: file.min_topic_prob,
    };
    hyper.validate().map_err(corrupt)?;
    let model = TopicModel::new(phi, theta, hyper).map_err(corrupt)?;
    let vocabulary = Vocabulary::from_terms(file.vocabulary)?;
    TrainedModel::new(model, vocabulary, file.titles).map_err(corrupt)
}

pub fn save_model(path: impl AsRef<Path>, trained: &TrainedModel) -> Result<()> {
    let mut buf = Vec::new();
    write_model(&mut buf, trained)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel> {
    read_model(fs::File::open(path)?)
}
