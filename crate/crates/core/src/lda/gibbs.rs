use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Hyperparams, Matrix, TopicModel};
use crate::corpus::TokenizedCorpus;
use crate::error::{Error, Result};

/// Collapsed Gibbs sampler state for LDA.
///
/// Holds one topic assignment per token plus the count tables the
/// conditional needs. Documents without tokens never enter the tables.
pub struct GibbsSampler<'a> {
    corpus: &'a TokenizedCorpus,
    hyper: Hyperparams,
    rng: ChaCha8Rng,
    assignments: Vec<Vec<usize>>,
    /// D×K tokens of each document assigned to each topic.
    doc_topic: Vec<u32>,
    /// K×V occurrences of each term assigned to each topic.
    topic_word: Vec<u32>,
    /// Tokens assigned to each topic.
    topic_totals: Vec<u32>,
    weights: Vec<f64>,
    sweeps: usize,
}

impl<'a> GibbsSampler<'a> {
    /// Validates the inputs and draws a uniformly random initial assignment.
    pub fn new(corpus: &'a TokenizedCorpus, hyper: &Hyperparams) -> Result<Self> {
        hyper.validate()?;
        if corpus.num_tokens() == 0 || corpus.vocab_size() == 0 {
            return Err(Error::EmptyCorpus);
        }
        let k = hyper.k;
        let v = corpus.vocab_size();
        let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
        let mut sampler = Self {
            corpus,
            hyper: hyper.clone(),
            assignments: Vec::with_capacity(corpus.num_docs()),
            doc_topic: vec![0; corpus.num_docs() * k],
            topic_word: vec![0; k * v],
            topic_totals: vec![0; k],
            weights: vec![0.0; k],
            sweeps: 0,
            rng: ChaCha8Rng::seed_from_u64(0),
        };
        for (d, doc) in corpus.docs.iter().enumerate() {
            let mut z = Vec::with_capacity(doc.len());
            for &w in doc {
                let topic = rng.random_range(0..k);
                sampler.add(d, w, topic);
                z.push(topic);
            }
            sampler.assignments.push(z);
        }
        sampler.rng = rng;
        Ok(sampler)
    }

    fn add(&mut self, d: usize, w: usize, topic: usize) {
        let v = self.corpus.vocab_size();
        self.doc_topic[d * self.hyper.k + topic] += 1;
        self.topic_word[topic * v + w] += 1;
        self.topic_totals[topic] += 1;
    }

    fn remove(&mut self, d: usize, w: usize, topic: usize) {
        let v = self.corpus.vocab_size();
        self.doc_topic[d * self.hyper.k + topic] -= 1;
        self.topic_word[topic * v + w] -= 1;
        self.topic_totals[topic] -= 1;
    }

    /// Resamples every token's topic once, in document then position order.
    pub fn sweep(&mut self) {
        let k = self.hyper.k;
        let v = self.corpus.vocab_size();
        let alpha = self.hyper.alpha;
        let beta = self.hyper.beta;
        let v_beta = v as f64 * beta;
        let corpus = self.corpus;

        for (d, doc) in corpus.docs.iter().enumerate() {
            for (pos, &w) in doc.iter().enumerate() {
                let old = self.assignments[d][pos];
                self.remove(d, w, old);

                let doc_row = &self.doc_topic[d * k..(d + 1) * k];
                let mut total = 0.0;
                for topic in 0..k {
                    let p = (doc_row[topic] as f64 + alpha) * (self.topic_word[topic * v + w] as f64 + beta)
                        / (self.topic_totals[topic] as f64 + v_beta);
                    total += p;
                    self.weights[topic] = total;
                }
                let u = self.rng.random::<f64>() * total;
                let new = self.weights.iter().position(|&c| u < c).unwrap_or(k - 1);

                self.add(d, w, new);
                self.assignments[d][pos] = new;
            }
        }
        self.sweeps += 1;
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// Smoothed point estimates from the current assignment:
    /// θ[y][i] = (n_yi + α) / (N_y + Kα) and φ[i][x] = (m_ix + β) / (M_i + Vβ).
    /// Documents without tokens get uniform θ.
    pub fn estimate(&self) -> TopicModel {
        let k = self.hyper.k;
        let v = self.corpus.vocab_size();
        let alpha = self.hyper.alpha;
        let beta = self.hyper.beta;

        let mut phi = Matrix::zeros(k, v);
        for topic in 0..k {
            let denom = self.topic_totals[topic] as f64 + v as f64 * beta;
            let counts = &self.topic_word[topic * v..(topic + 1) * v];
            for (p, &m) in phi.row_mut(topic).iter_mut().zip(counts) {
                *p = (m as f64 + beta) / denom;
            }
        }

        let mut theta = Matrix::zeros(self.corpus.num_docs(), k);
        for (d, doc) in self.corpus.docs.iter().enumerate() {
            let row = theta.row_mut(d);
            if doc.is_empty() {
                row.fill(1.0 / k as f64);
                continue;
            }
            let denom = doc.len() as f64 + k as f64 * alpha;
            let counts = &self.doc_topic[d * k..(d + 1) * k];
            for (p, &n) in row.iter_mut().zip(counts) {
                *p = (n as f64 + alpha) / denom;
            }
        }

        TopicModel::new(phi, theta, self.hyper.clone()).expect("dimensions follow hyperparameters")
    }

    /// Checks that the count tables agree with the assignments: per
    /// document, topic counts sum to its length; per topic, term counts sum
    /// to the topic total.
    pub fn counts_consistent(&self) -> bool {
        let k = self.hyper.k;
        let v = self.corpus.vocab_size();
        let docs_ok =
            self.corpus.docs.iter().enumerate().all(|(d, doc)| {
                self.doc_topic[d * k..(d + 1) * k].iter().map(|&n| n as usize).sum::<usize>() == doc.len()
            });
        let topics_ok = (0..k).all(|t| {
            self.topic_word[t * v..(t + 1) * v].iter().map(|&m| m as u64).sum::<u64>() == self.topic_totals[t] as u64
        });
        let mut recount = vec![0u32; k * v];
        for (doc, z) in self.corpus.docs.iter().zip(&self.assignments) {
            for (&w, &t) in doc.iter().zip(z) {
                recount[t * v + w] += 1;
            }
        }
        docs_ok && topics_ok && recount == self.topic_word
    }
}

/// Runs `hyper.iterations` sweeps from a seeded random start and returns
/// the estimate from the final state. Equal inputs give bit-identical
/// models.
pub fn train_gibbs(corpus: &TokenizedCorpus, hyper: &Hyperparams) -> Result<TopicModel> {
    let mut sampler = GibbsSampler::new(corpus, hyper)?;
    for _ in 0..hyper.iterations {
        sampler.sweep();
    }
    Ok(sampler.estimate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Vocabulary;

    fn corpus(docs: Vec<Vec<usize>>, v: usize) -> TokenizedCorpus {
        let terms = (0..v).map(|i| format!("w{i}")).collect();
        let titles = (0..docs.len()).map(|i| format!("doc {i}")).collect();
        TokenizedCorpus::new(docs, Vocabulary::from_terms(terms).unwrap(), titles).unwrap()
    }

    fn quick(k: usize, seed: u64) -> Hyperparams {
        Hyperparams { iterations: 30, burn_in: 5, seed, ..Hyperparams::new(k) }
    }

    #[test]
    fn single_topic_matches_closed_form() {
        let c = corpus(vec![vec![0, 1, 1, 2], vec![2, 2], vec![], vec![3]], 5);
        let hyper = quick(1, 3);
        let model = train_gibbs(&c, &hyper).unwrap();
        for y in 0..c.num_docs() {
            assert_eq!(model.theta.row(y), &[1.0]);
        }
        let counts = [1.0, 2.0, 3.0, 1.0, 0.0];
        let total = 7.0;
        for (x, &n) in counts.iter().enumerate() {
            let expected = (n + hyper.beta) / (total + 5.0 * hyper.beta);
            assert!((model.phi.get(0, x) - expected).abs() <= 1e-12);
        }
    }

    #[test]
    fn seeded_runs_are_identical() {
        let c = corpus(vec![vec![0, 1, 2, 3, 0, 1], vec![4, 5, 4, 5, 3], vec![0, 5, 2]], 6);
        let a = train_gibbs(&c, &quick(3, 11)).unwrap();
        let b = train_gibbs(&c, &quick(3, 11)).unwrap();
        assert_eq!(a, b);
        let other = train_gibbs(&c, &quick(3, 12)).unwrap();
        assert_ne!(a.theta, other.theta);
    }

    #[test]
    fn rows_are_stochastic_and_empty_docs_uniform() {
        let c = corpus(vec![vec![0, 1, 2], vec![], vec![2, 3, 3, 1]], 4);
        let model = train_gibbs(&c, &quick(4, 1)).unwrap();
        for row in model.phi.iter_rows().chain(model.theta.iter_rows()) {
            assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            assert!(row.iter().all(|&p| p >= 0.0));
        }
        assert_eq!(model.theta.row(1), &[0.25; 4]);
    }

    #[test]
    fn counts_stay_consistent_across_sweeps() {
        let c = corpus(vec![vec![0, 1, 2, 0], vec![3, 3, 1], vec![], vec![2]], 4);
        let mut s = GibbsSampler::new(&c, &quick(3, 9)).unwrap();
        assert!(s.counts_consistent());
        for _ in 0..20 {
            s.sweep();
            assert!(s.counts_consistent());
        }
        assert_eq!(s.sweeps(), 20);
    }

    #[test]
    fn rejects_empty_corpus_and_bad_k() {
        let c = corpus(vec![vec![], vec![]], 2);
        assert!(matches!(train_gibbs(&c, &quick(2, 0)), Err(Error::EmptyCorpus)));
        let c = corpus(vec![vec![0]], 1);
        let hyper = Hyperparams { k: 0, ..quick(1, 0) };
        assert!(matches!(train_gibbs(&c, &hyper), Err(Error::Config(_))));
    }
}
