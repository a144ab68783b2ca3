//! Stochastic gradient boosting of depth-limited regression trees on the
//! logistic loss, with Newton leaf values and per-round subsampling.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sigmoid;
use super::tree::{best_variance_split, partition, Node};
use crate::util::mix_seed;

const SGB_SEED_STREAM: u64 = 0x5347_4200;
/// Newton leaf steps are clamped to this magnitude to keep pure leaves from
/// saturating the ensemble in one round.
const MAX_LEAF_VALUE: f64 = 10.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SgbParams {
    /// Initial log-odds.
    pub f0: f64,
    pub shrinkage: f64,
    pub trees: Vec<Node>,
    /// Mean training logistic loss recorded after each round.
    pub train_loss_curve: Vec<f64>,
}

impl SgbParams {
    pub fn score(&self, z: &[f64]) -> f64 {
        let mut f = self.f0;
        for tree in &self.trees {
            f += self.shrinkage * tree.eval(z);
        }
        sigmoid(f)
    }
}

fn grow(
    x: &[Vec<f64>],
    residual: &[f64],
    weight: &[f64],
    idx: &[usize],
    depth_left: usize,
    features: &[usize],
) -> Node {
    let newton_leaf = |idx: &[usize]| {
        let num: f64 = idx.iter().map(|&i| residual[i]).sum();
        let den: f64 = idx.iter().map(|&i| weight[i]).sum();
        Node::Leaf {
            value: (num / den.max(1e-10)).clamp(-MAX_LEAF_VALUE, MAX_LEAF_VALUE),
        }
    };
    if depth_left == 0 || idx.len() < 2 {
        return newton_leaf(idx);
    }
    let Some(split) = best_variance_split(x, residual, idx, features) else {
        return newton_leaf(idx);
    };
    let (left_idx, right_idx) = partition(x, idx, &split);
    Node::Split {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(grow(
            x,
            residual,
            weight,
            &left_idx,
            depth_left - 1,
            features,
        )),
        right: Box::new(grow(
            x,
            residual,
            weight,
            &right_idx,
            depth_left - 1,
            features,
        )),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn fit(
    x: &[Vec<f64>],
    y: &[u8],
    rounds: usize,
    depth: usize,
    shrinkage: f64,
    subsample: f64,
    seed: u64,
) -> SgbParams {
    let n = x.len();
    let features: Vec<usize> = (0..x[0].len()).collect();
    let p_bar = y.iter().map(|&l| l as f64).sum::<f64>() / n as f64;
    let p_bar = p_bar.clamp(1e-6, 1.0 - 1e-6);
    let f0 = (p_bar / (1.0 - p_bar)).ln();

    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, SGB_SEED_STREAM));
    let mut f = vec![f0; n];
    let mut trees = Vec::with_capacity(rounds);
    let mut train_loss_curve = Vec::with_capacity(rounds);
    let m = ((n as f64 * subsample).floor() as usize).clamp(1, n);
    let mut order: Vec<usize> = (0..n).collect();

    for _ in 0..rounds {
        let sample: Vec<usize> = if m == n {
            order.clone()
        } else {
            let (chosen, _) = order.partial_shuffle(&mut rng, m);
            chosen.to_vec()
        };
        let mut residual = vec![0.0f64; n];
        let mut weight = vec![0.0f64; n];
        for &i in &sample {
            let p = sigmoid(f[i]);
            residual[i] = y[i] as f64 - p;
            weight[i] = (p * (1.0 - p)).max(1e-10);
        }
        let tree = grow(x, &residual, &weight, &sample, depth, &features);
        for i in 0..n {
            f[i] += shrinkage * tree.eval(&x[i]);
        }
        let loss = -(0..n)
            .map(|i| {
                let p = sigmoid(f[i]).clamp(1e-12, 1.0 - 1e-12);
                if y[i] == 1 {
                    p.ln()
                } else {
                    (1.0 - p).ln()
                }
            })
            .sum::<f64>()
            / n as f64;
        train_loss_curve.push(loss);
        trees.push(tree);
    }

    SgbParams {
        f0,
        shrinkage,
        trees,
        train_loss_curve,
    }
}
