//! Seeded corpus generators for tests, benchmarks and demos.
//!
//! [`planted_topics`] samples token ids from known topic-word and
//! document-topic distributions, so a trained model can be compared with the
//! generating one. [`abstracts_csv`] writes an abstract-like CSV corpus in
//! which "data" and "visualization" occur in most documents.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::corpus::{TokenizedCorpus, Vocabulary};
use crate::lda::Matrix;

/// A corpus together with the distributions it was sampled from.
#[derive(Debug, Clone)]
pub struct PlantedCorpus {
    pub corpus: TokenizedCorpus,
    /// K×V generating topic-word distributions.
    pub phi: Matrix,
    /// D×K generating document-topic distributions.
    pub theta: Matrix,
}

fn symmetric_dirichlet(rng: &mut ChaCha8Rng, len: usize, concentration: f64) -> Vec<f64> {
    let gamma = Gamma::new(concentration, 1.0).expect("positive concentration");
    loop {
        let draws: Vec<f64> = (0..len).map(|_| gamma.sample(rng)).collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 {
            return draws.into_iter().map(|x| x / total).collect();
        }
    }
}

fn sample_index(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let u = rng.random::<f64>() * weights.iter().sum::<f64>();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Samples `docs` documents of `doc_len` tokens from `k` topics whose
/// supports are disjoint blocks of `words_per_topic` terms. Document mixtures
/// are drawn from a symmetric Dirichlet with concentration `alpha`.
pub fn planted_topics(
    k: usize,
    words_per_topic: usize,
    docs: usize,
    doc_len: usize,
    alpha: f64,
    seed: u64,
) -> PlantedCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = k * words_per_topic;

    let mut phi = Matrix::zeros(k, v);
    for t in 0..k {
        let weights = symmetric_dirichlet(&mut rng, words_per_topic, 1.0);
        phi.row_mut(t)[t * words_per_topic..(t + 1) * words_per_topic].copy_from_slice(&weights);
    }

    let mut theta = Matrix::zeros(docs, k);
    let mut token_docs = Vec::with_capacity(docs);
    for d in 0..docs {
        let mix = symmetric_dirichlet(&mut rng, k, alpha);
        theta.row_mut(d).copy_from_slice(&mix);
        let tokens = (0..doc_len)
            .map(|_| {
                let topic = sample_index(&mut rng, &mix);
                sample_index(&mut rng, phi.row(topic))
            })
            .collect();
        token_docs.push(tokens);
    }

    let terms = (0..v).map(|x| format!("w{x:04}")).collect();
    let vocabulary = Vocabulary::from_terms(terms).expect("unique generated terms");
    let titles = (0..docs).map(|d| format!("Synthetic document {d}")).collect();
    let corpus = TokenizedCorpus::new(token_docs, vocabulary, titles).expect("ids within vocabulary");
    PlantedCorpus { corpus, phi, theta }
}

const THEMES: [[&str; 10]; 20] = [
    ["network", "graph", "nodes", "edges", "layout", "force", "directed", "bundling", "links", "centrality"],
    [
        "treemap",
        "hierarchical",
        "rectangles",
        "nesting",
        "squarified",
        "filling",
        "partition",
        "containment",
        "sunburst",
        "icicle",
    ],
    [
        "parallel",
        "coordinates",
        "axes",
        "polylines",
        "multivariate",
        "dimensions",
        "clutter",
        "ordering",
        "correlation",
        "brushes",
    ],
    ["text", "documents", "topics", "corpus", "words", "semantic", "keywords", "lda", "summarization", "themes"],
    [
        "volume",
        "rendering",
        "raycasting",
        "transfer",
        "scalar",
        "isosurface",
        "voxels",
        "medical",
        "opacity",
        "shading",
    ],
    [
        "flow",
        "vector",
        "streamlines",
        "glyphs",
        "turbulence",
        "particles",
        "advection",
        "vortex",
        "integration",
        "pathlines",
    ],
    ["map", "geographic", "cartographic", "region", "choropleth", "location", "terrain", "urban", "mobility", "census"],
    ["time", "series", "temporal", "trends", "events", "timeline", "animation", "periodic", "forecasting", "history"],
    [
        "user",
        "study",
        "evaluation",
        "participants",
        "experiment",
        "tasks",
        "accuracy",
        "perception",
        "cognitive",
        "crowdsourced",
    ],
    [
        "interaction",
        "linking",
        "zooming",
        "panning",
        "selection",
        "navigation",
        "gestures",
        "touch",
        "direct",
        "manipulation",
    ],
    [
        "color",
        "palette",
        "contrast",
        "luminance",
        "hue",
        "saturation",
        "colormap",
        "categorical",
        "encoding",
        "opponent",
    ],
    [
        "uncertainty",
        "error",
        "probabilistic",
        "ensemble",
        "variability",
        "confidence",
        "distributions",
        "risk",
        "ambiguity",
        "noise",
    ],
    ["social", "media", "twitter", "sentiment", "communities", "influence", "diffusion", "online", "messages", "posts"],
    [
        "software",
        "code",
        "program",
        "execution",
        "debugging",
        "traces",
        "profiling",
        "repository",
        "developers",
        "compiler",
    ],
    [
        "genomics",
        "biology",
        "protein",
        "sequences",
        "gene",
        "expression",
        "molecular",
        "cells",
        "pathway",
        "biomedical",
    ],
    [
        "dashboard",
        "business",
        "analytics",
        "reporting",
        "metrics",
        "decision",
        "enterprise",
        "kpi",
        "monitoring",
        "storytelling",
    ],
    ["matrix", "heatmap", "adjacency", "reordering", "seriation", "rows", "columns", "dense", "blocks", "permutation"],
    [
        "immersive",
        "virtual",
        "reality",
        "stereoscopic",
        "headset",
        "environments",
        "collaboration",
        "presence",
        "augmented",
        "room",
    ],
    [
        "scatterplot",
        "projection",
        "dimensionality",
        "reduction",
        "embedding",
        "tsne",
        "pca",
        "clusters",
        "points",
        "neighborhood",
    ],
    [
        "education",
        "learning",
        "students",
        "teaching",
        "classroom",
        "literacy",
        "novices",
        "curriculum",
        "course",
        "instruction",
    ],
];

const FILLER: [&str; 12] = [
    "approach",
    "method",
    "results",
    "system",
    "design",
    "present",
    "novel",
    "propose",
    "technique",
    "framework",
    "analysis",
    "tool",
];

const GLUE: [&str; 6] = ["the", "of", "and", "for", "with", "we"];

/// Writes a `title,abstract` CSV of `docs` abstract-like documents. Each
/// document mixes a primary and a secondary theme out of 20, some generic
/// research vocabulary, stopwords, and (in about nine of ten documents each)
/// the words "data" and "visualization".
pub fn abstracts_csv(docs: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = csv::WriterBuilder::new().from_writer(Vec::new());
    out.write_record(["title", "abstract"]).expect("write to memory");
    for d in 0..docs {
        let primary = rng.random_range(0..THEMES.len());
        let secondary = rng.random_range(0..THEMES.len());
        let len = rng.random_range(60..110);
        let mut words: Vec<&str> = Vec::with_capacity(len + 4);
        for _ in 0..len {
            let roll = rng.random::<f64>();
            let pool: &[&str] = if roll < 0.6 {
                &THEMES[primary]
            } else if roll < 0.8 {
                &THEMES[secondary]
            } else if roll < 0.9 {
                &FILLER
            } else {
                &GLUE
            };
            words.push(pool.choose(&mut rng).expect("non-empty pool"));
        }
        for common in ["data", "visualization"] {
            if rng.random::<f64>() < 0.9 {
                let at = rng.random_range(0..=words.len());
                words.insert(at, common);
            }
        }
        let mut body = String::new();
        for (i, w) in words.iter().enumerate() {
            if i > 0 {
                body.push_str(if i % 13 == 0 {
                    ". "
                } else if i % 7 == 0 {
                    ", "
                } else {
                    " "
                });
            }
            body.push_str(w);
        }
        body.push('.');
        let theme = THEMES[primary];
        let title = format!(
            "{}{} {} for {} ({})",
            theme[0][..1].to_uppercase(),
            &theme[0][1..],
            theme.choose(&mut rng).expect("non-empty theme"),
            THEMES[secondary].choose(&mut rng).expect("non-empty theme"),
            d + 1
        );
        out.write_record([title.as_str(), body.as_str()]).expect("write to memory");
    }
    String::from_utf8(out.into_inner().expect("flush to memory")).expect("utf-8 input")
}
