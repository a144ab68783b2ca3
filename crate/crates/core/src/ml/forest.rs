//! Random forest: bootstrap-aggregated Gini trees with square-root feature
//! subsampling at every node and out-of-bag accuracy tracking.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{best_gini_split, partition, Node};
use crate::util::mix_seed;

const FOREST_SEED_STREAM: u64 = 0x464f_5245;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestParams {
    pub trees: Vec<Node>,
    /// Accuracy of out-of-bag majority votes on the training rows, when at
    /// least one row was ever out of bag.
    pub oob_accuracy: Option<f64>,
}

impl ForestParams {
    pub fn score(&self, z: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.eval(z)).sum();
        sum / self.trees.len() as f64
    }
}

fn grow(x: &[Vec<f64>], y: &[u8], idx: &[usize], mtry: usize, rng: &mut ChaCha8Rng) -> Node {
    let pos = idx.iter().filter(|&&i| y[i] == 1).count();
    let leaf = |pos: usize| Node::Leaf {
        value: pos as f64 / idx.len() as f64,
    };
    if pos == 0 || pos == idx.len() || idx.len() < 2 {
        return leaf(pos);
    }
    let mut features: Vec<usize> = (0..x[0].len()).collect();
    let (chosen, _) = features.partial_shuffle(rng, mtry);
    let mut chosen = chosen.to_vec();
    chosen.sort_unstable();
    let Some(split) = best_gini_split(x, y, idx, &chosen) else {
        return leaf(pos);
    };
    let (left_idx, right_idx) = partition(x, idx, &split);
    Node::Split {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(grow(x, y, &left_idx, mtry, rng)),
        right: Box::new(grow(x, y, &right_idx, mtry, rng)),
    }
}

pub fn fit(x: &[Vec<f64>], y: &[u8], n_trees: usize, seed: u64) -> ForestParams {
    let n = x.len();
    let p = x[0].len();
    let mtry = ((p as f64).sqrt().floor() as usize).max(1);
    let base = mix_seed(seed, FOREST_SEED_STREAM);

    let per_tree: Vec<(Node, Vec<(usize, f64)>)> = (0..n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(base, t as u64));
            let mut in_bag = vec![false; n];
            let idx: Vec<usize> = (0..n)
                .map(|_| {
                    let i = rng.random_range(0..n);
                    in_bag[i] = true;
                    i
                })
                .collect();
            let node = grow(x, y, &idx, mtry, &mut rng);
            let oob: Vec<(usize, f64)> = (0..n)
                .filter(|&i| !in_bag[i])
                .map(|i| (i, node.eval(&x[i])))
                .collect();
            (node, oob)
        })
        .collect();

    let mut vote_sum = vec![0.0f64; n];
    let mut vote_count = vec![0usize; n];
    let mut trees = Vec::with_capacity(n_trees);
    for (node, oob) in per_tree {
        for (i, s) in oob {
            vote_sum[i] += s;
            vote_count[i] += 1;
        }
        trees.push(node);
    }
    let mut covered = 0usize;
    let mut correct = 0usize;
    for i in 0..n {
        if vote_count[i] > 0 {
            covered += 1;
            let pred = vote_sum[i] / vote_count[i] as f64 >= 0.5;
            if pred == (y[i] == 1) {
                correct += 1;
            }
        }
    }
    let oob_accuracy = (covered > 0).then(|| correct as f64 / covered as f64);
    ForestParams {
        trees,
        oob_accuracy,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{testdata, train, ModelFamily, ModelParams, ModelSpec};
    use super::*;

    fn small_spec(seed: u64) -> ModelSpec {
        let mut spec = ModelSpec::new(ModelFamily::RandomForest, seed);
        spec.hyper.forest_trees = 100;
        spec
    }

    #[test]
    fn oob_accuracy_is_high_on_blobs() {
        let data = testdata::blobs(100, 4, 4.0, 71);
        let model = train(&small_spec(3), &data).unwrap();
        let ModelParams::Forest(f) = &model.params else {
            panic!("wrong params")
        };
        let oob = f.oob_accuracy.expect("oob coverage");
        assert!(oob >= 0.95, "oob accuracy {oob}");
    }

    #[test]
    fn held_out_accuracy_is_high_on_blobs() {
        let train_data = testdata::blobs(100, 4, 4.0, 72);
        let test_data = testdata::blobs(100, 4, 4.0, 73);
        let model = train(&small_spec(3), &train_data).unwrap();
        let correct = test_data
            .values
            .iter()
            .zip(&test_data.labels)
            .filter(|(row, &l)| (model.score(row).unwrap() >= 0.5) == (l == 1))
            .count();
        assert!(correct as f64 / test_data.n_rows() as f64 >= 0.95);
    }

    #[test]
    fn retrain_is_bit_identical() {
        let data = testdata::blobs(30, 3, 2.0, 74);
        let x = data.values.clone();
        let a = fit(&x, &data.labels, 50, 11);
        let b = fit(&x, &data.labels, 50, 11);
        let probe = vec![0.7, -0.3, 1.9];
        assert_eq!(a.score(&probe).to_bits(), b.score(&probe).to_bits());
        assert_eq!(a.oob_accuracy, b.oob_accuracy);
    }

    #[test]
    fn different_seeds_give_different_forests() {
        let data = testdata::blobs(30, 3, 1.0, 75);
        let x = data.values.clone();
        let a = fit(&x, &data.labels, 20, 1);
        let b = fit(&x, &data.labels, 20, 2);
        let probe = vec![0.5, 0.5, 0.5];
        assert_ne!(a.score(&probe).to_bits(), b.score(&probe).to_bits());
    }

    #[test]
    fn single_feature_uses_mtry_one() {
        let data = testdata::blobs(50, 1, 5.0, 76);
        let x = data.values.clone();
        let params = fit(&x, &data.labels, 30, 4);
        assert!(params.oob_accuracy.unwrap() >= 0.9);
    }
}
