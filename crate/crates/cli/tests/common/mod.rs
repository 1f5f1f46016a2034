#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};
use std::time::Duration;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tower::ServiceExt;

use topiclens::corpus::Vocabulary;
use topiclens::lda::{Hyperparams, Matrix, TopicModel, TrainedModel};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_topiclens"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn topiclens")
}

pub fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "topiclens {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

pub fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// A model with random φ and θ rows; no training involved.
pub fn random_trained(rng: &mut ChaCha8Rng, d: usize, k: usize, v: usize, tau: f64) -> TrainedModel {
    let phi: Vec<Vec<f64>> = (0..k).map(|_| random_simplex(rng, v)).collect();
    let theta: Vec<Vec<f64>> = (0..d).map(|_| random_simplex(rng, k)).collect();
    let hyper = Hyperparams { min_topic_prob: tau, ..Hyperparams::new(k) };
    let model = TopicModel::new(Matrix::from_rows(&phi).unwrap(), Matrix::from_rows(&theta).unwrap(), hyper).unwrap();
    let vocab = Vocabulary::from_terms((0..v).map(|x| format!("t{x}")).collect()).unwrap();
    let titles = (0..d).map(|y| format!("Document {y}, part \"{}\"", y % 3)).collect();
    TrainedModel::new(model, vocab, titles).unwrap()
}

pub async fn http(app: &Router, method: &str, uri: &str, body: Option<String>) -> (StatusCode, Vec<u8>) {
    let body = body.map_or_else(Body::empty, Body::from);
    let req = Request::builder().method(method).uri(uri).body(body).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

pub const SESSION_TTL: Duration = Duration::from_secs(600);
