//! Binary decision-tree machinery: a shared node type, greedy split search
//! under Gini / entropy / variance criteria, and a C4.5-lineage classifier
//! with gain-ratio selection and pessimistic error pruning.

use serde::{Deserialize, Serialize};
use statrs::distribution::ContinuousCDF;

/// Minimum rows a node must hold before a split is attempted.
const MIN_SPLIT: usize = 4;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    pub fn eval(&self, row: &[f64]) -> f64 {
        match self {
            Node::Leaf { value } => *value,
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if row[*feature] <= *threshold {
                    left.eval(row)
                } else {
                    right.eval(row)
                }
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::Split { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

pub fn partition(x: &[Vec<f64>], idx: &[usize], split: &Split) -> (Vec<usize>, Vec<usize>) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for &i in idx {
        if x[i][split.feature] <= split.threshold {
            left.push(i);
        } else {
            right.push(i);
        }
    }
    (left, right)
}

fn sorted_by_feature(x: &[Vec<f64>], idx: &[usize], feature: usize) -> Vec<usize> {
    let mut order = idx.to_vec();
    order.sort_by(|&a, &b| x[a][feature].total_cmp(&x[b][feature]).then(a.cmp(&b)));
    order
}

fn gini(pos: f64, n: f64) -> f64 {
    if n == 0.0 {
        return 0.0;
    }
    let p = pos / n;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}

/// Best Gini-gain split over the given candidate features. Thresholds sit
/// halfway between consecutive distinct values; ties keep the first
/// candidate encountered.
pub fn best_gini_split(
    x: &[Vec<f64>],
    y: &[u8],
    idx: &[usize],
    features: &[usize],
) -> Option<Split> {
    let n = idx.len() as f64;
    let total_pos = idx.iter().filter(|&&i| y[i] == 1).count() as f64;
    let parent = gini(total_pos, n);
    let mut best: Option<Split> = None;
    for &f in features {
        let order = sorted_by_feature(x, idx, f);
        let mut pos_left = 0.0f64;
        for (k, &i) in order.iter().enumerate().take(order.len() - 1) {
            pos_left += y[i] as f64;
            let a = x[i][f];
            let b = x[order[k + 1]][f];
            if a == b {
                continue;
            }
            let n_l = (k + 1) as f64;
            let n_r = n - n_l;
            let child =
                (n_l / n) * gini(pos_left, n_l) + (n_r / n) * gini(total_pos - pos_left, n_r);
            let gain = parent - child;
            if gain > 1e-12 && best.is_none_or(|s| gain > s.gain) {
                best = Some(Split {
                    feature: f,
                    threshold: a + (b - a) / 2.0,
                    gain,
                });
            }
        }
    }
    best
}

/// Best variance-reduction split for regression targets, same threshold and
/// tie conventions as [`best_gini_split`].
pub fn best_variance_split(
    x: &[Vec<f64>],
    targets: &[f64],
    idx: &[usize],
    features: &[usize],
) -> Option<Split> {
    let n = idx.len() as f64;
    let total_sum: f64 = idx.iter().map(|&i| targets[i]).sum();
    let total_sq: f64 = idx.iter().map(|&i| targets[i] * targets[i]).sum();
    let parent_sse = total_sq - total_sum * total_sum / n;
    let mut best: Option<Split> = None;
    for &f in features {
        let order = sorted_by_feature(x, idx, f);
        let mut sum_l = 0.0f64;
        let mut sq_l = 0.0f64;
        for (k, &i) in order.iter().enumerate().take(order.len() - 1) {
            sum_l += targets[i];
            sq_l += targets[i] * targets[i];
            let a = x[i][f];
            let b = x[order[k + 1]][f];
            if a == b {
                continue;
            }
            let n_l = (k + 1) as f64;
            let n_r = n - n_l;
            let sse_l = sq_l - sum_l * sum_l / n_l;
            let sse_r = (total_sq - sq_l) - (total_sum - sum_l) * (total_sum - sum_l) / n_r;
            let gain = parent_sse - sse_l - sse_r;
            if gain > 1e-12 && best.is_none_or(|s| gain > s.gain) {
                best = Some(Split {
                    feature: f,
                    threshold: a + (b - a) / 2.0,
                    gain,
                });
            }
        }
    }
    best
}

fn entropy(pos: f64, n: f64) -> f64 {
    if n == 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &c in &[pos, n - pos] {
        if c > 0.0 {
            let p = c / n;
            h -= p * p.ln();
        }
    }
    h
}

/// C4.5 split selection: among candidates whose information gain reaches the
/// average positive gain, maximize gain ratio.
fn best_gain_ratio_split(x: &[Vec<f64>], y: &[u8], idx: &[usize]) -> Option<Split> {
    let n = idx.len() as f64;
    let total_pos = idx.iter().filter(|&&i| y[i] == 1).count() as f64;
    let parent = entropy(total_pos, n);
    // (feature, threshold, gain, ratio)
    let mut candidates: Vec<(usize, f64, f64, f64)> = Vec::new();
    for f in 0..x[0].len() {
        let order = sorted_by_feature(x, idx, f);
        let mut pos_left = 0.0f64;
        for (k, &i) in order.iter().enumerate().take(order.len() - 1) {
            pos_left += y[i] as f64;
            let a = x[i][f];
            let b = x[order[k + 1]][f];
            if a == b {
                continue;
            }
            let n_l = (k + 1) as f64;
            let n_r = n - n_l;
            let child =
                (n_l / n) * entropy(pos_left, n_l) + (n_r / n) * entropy(total_pos - pos_left, n_r);
            let gain = parent - child;
            if gain <= 1e-12 {
                continue;
            }
            let w_l = n_l / n;
            let split_info = -(w_l * w_l.ln() + (1.0 - w_l) * (1.0 - w_l).ln());
            candidates.push((f, a + (b - a) / 2.0, gain, gain / split_info));
        }
    }
    if candidates.is_empty() {
        return None;
    }
    let avg_gain = candidates.iter().map(|c| c.2).sum::<f64>() / candidates.len() as f64;
    let mut best: Option<&(usize, f64, f64, f64)> = None;
    for c in &candidates {
        if c.2 + 1e-12 < avg_gain {
            continue;
        }
        if best.is_none_or(|b| c.3 > b.3 + 1e-12) {
            best = Some(c);
        }
    }
    best.map(|&(feature, threshold, gain, _)| Split {
        feature,
        threshold,
        gain,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct C50Params {
    pub root: Node,
}

impl C50Params {
    pub fn score(&self, z: &[f64]) -> f64 {
        self.root.eval(z)
    }
}

fn laplace_value(y: &[u8], idx: &[usize]) -> f64 {
    let pos = idx.iter().filter(|&&i| y[i] == 1).count() as f64;
    (pos + 1.0) / (idx.len() as f64 + 2.0)
}

fn build_unpruned(x: &[Vec<f64>], y: &[u8], idx: &[usize]) -> Node {
    let pos = idx.iter().filter(|&&i| y[i] == 1).count();
    if pos == 0 || pos == idx.len() || idx.len() < MIN_SPLIT {
        return Node::Leaf {
            value: laplace_value(y, idx),
        };
    }
    let Some(split) = best_gain_ratio_split(x, y, idx) else {
        return Node::Leaf {
            value: laplace_value(y, idx),
        };
    };
    let (left_idx, right_idx) = partition(x, idx, &split);
    Node::Split {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(build_unpruned(x, y, &left_idx)),
        right: Box::new(build_unpruned(x, y, &right_idx)),
    }
}

/// Upper confidence bound on the error count of a node that misclassifies
/// `e` of its `n` rows: the rate u solving P(Binomial(n, u) <= e) = cf,
/// computed through the inverse regularized beta. For e = 0 this reduces to
/// n * (1 - cf^(1/n)).
fn pessimistic_errors(n: f64, e: f64, cf: f64) -> f64 {
    if n == 0.0 {
        return 0.0;
    }
    if e >= n {
        return n;
    }
    let bound = statrs::distribution::Beta::new(e + 1.0, n - e)
        .expect("valid beta shape")
        .inverse_cdf(1.0 - cf);
    n * bound
}

fn prune(node: Node, x: &[Vec<f64>], y: &[u8], idx: &[usize], cf: f64) -> (Node, f64) {
    let n = idx.len() as f64;
    let pos = idx.iter().filter(|&&i| y[i] == 1).count() as f64;
    match node {
        Node::Leaf { value } => {
            let errors = if value >= 0.5 { n - pos } else { pos };
            (Node::Leaf { value }, pessimistic_errors(n, errors, cf))
        }
        Node::Split {
            feature,
            threshold,
            left,
            right,
        } => {
            let split = Split {
                feature,
                threshold,
                gain: 0.0,
            };
            let (left_idx, right_idx) = partition(x, idx, &split);
            let (left, left_err) = prune(*left, x, y, &left_idx, cf);
            let (right, right_err) = prune(*right, x, y, &right_idx, cf);
            let subtree_err = left_err + right_err;
            let leaf_errors = pos.min(n - pos);
            let leaf_err = pessimistic_errors(n, leaf_errors, cf);
            if leaf_err <= subtree_err + 1e-12 {
                (
                    Node::Leaf {
                        value: laplace_value(y, idx),
                    },
                    leaf_err,
                )
            } else {
                (
                    Node::Split {
                        feature,
                        threshold,
                        left: Box::new(left),
                        right: Box::new(right),
                    },
                    subtree_err,
                )
            }
        }
    }
}

pub fn fit_c50(x: &[Vec<f64>], y: &[u8], confidence: f64) -> C50Params {
    let idx: Vec<usize> = (0..x.len()).collect();
    let unpruned = build_unpruned(x, y, &idx);
    let cf = confidence.clamp(1e-6, 0.5);
    let (root, _) = prune(unpruned, x, y, &idx, cf);
    C50Params { root }
}

#[cfg(test)]
mod tests {
    use super::super::{testdata, train, ModelFamily, ModelSpec};
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hand_worked_split_and_leaves() {
        // Values 1..4 with labels 0,0,1,1: the only sensible cut is at 2.5
        // where gain = ln 2 and split info = ln 2, so the ratio is 1.
        let x = vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]];
        let y = vec![0u8, 0, 1, 1];
        let idx = [0usize, 1, 2, 3];
        let split = best_gain_ratio_split(&x, &y, &idx).unwrap();
        assert_eq!(split.feature, 0);
        assert_eq!(split.threshold, 2.5);
        assert!((split.gain - (2.0f64).ln()).abs() < 1e-12);

        let params = fit_c50(&x, &y, 0.25);
        // Pure children of two rows each survive pruning here.
        assert_eq!(params.root.leaf_count(), 2);
        assert_eq!(params.score(&[1.5]), 0.25); // Laplace (0+1)/(2+2)
        assert_eq!(params.score(&[3.9]), 0.75);
    }

    #[test]
    fn gini_split_prefers_clean_separation() {
        let x = vec![
            vec![0.0, 5.0],
            vec![1.0, -3.0],
            vec![2.0, 4.0],
            vec![10.0, -2.0],
            vec![11.0, 3.0],
            vec![12.0, -5.0],
        ];
        let y = vec![0u8, 0, 0, 1, 1, 1];
        let idx: Vec<usize> = (0..6).collect();
        let split = best_gini_split(&x, &y, &idx, &[0, 1]).unwrap();
        assert_eq!(split.feature, 0);
        assert_eq!(split.threshold, 6.0);
        assert!((split.gain - 0.5).abs() < 1e-12);
    }

    #[test]
    fn variance_split_matches_sse_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<Vec<f64>> = (0..40).map(|_| vec![rng.random_range(-1.0..1.0)]).collect();
        let t: Vec<f64> = x
            .iter()
            .map(|r| if r[0] > 0.2 { 3.0 } else { -1.0 })
            .collect();
        let idx: Vec<usize> = (0..40).collect();
        let split = best_variance_split(&x, &t, &idx, &[0]).unwrap();
        // The jump sits at 0.2, so the chosen threshold must bracket it.
        let mut below = x
            .iter()
            .map(|r| r[0])
            .filter(|&v| v <= 0.2)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut above = x
            .iter()
            .map(|r| r[0])
            .filter(|&v| v > 0.2)
            .fold(f64::INFINITY, f64::min);
        below = below.max(-1.0);
        above = above.min(1.0);
        assert!(split.threshold > below && split.threshold < above);
    }

    #[test]
    fn pessimistic_errors_match_exact_binomial_bound() {
        let cf = 0.25f64;
        // Error-free nodes: n * (1 - cf^(1/n)), the standard worked values.
        for &n in &[1.0f64, 6.0, 9.0, 16.0] {
            let expected = n * (1.0 - cf.powf(1.0 / n));
            assert!((pessimistic_errors(n, 0.0, cf) - expected).abs() < 1e-9);
        }
        assert!((pessimistic_errors(1.0, 0.0, cf) - 0.75).abs() < 1e-9);
        // Monotone in observed errors.
        assert!(pessimistic_errors(6.0, 0.0, cf) < pessimistic_errors(6.0, 1.0, cf));
        assert!(pessimistic_errors(6.0, 1.0, cf) < pessimistic_errors(6.0, 2.0, cf));
        // More data with the same error rate shrinks the per-row bound.
        assert!(
            pessimistic_errors(100.0, 10.0, cf) / 100.0 < pessimistic_errors(10.0, 1.0, cf) / 10.0
        );
    }

    #[test]
    fn pruning_collapses_subtree_when_child_majorities_agree() {
        // A classic collapse: three pure leaves of sizes 6, 9, and 1 that all
        // predict the majority class cost more pessimistic errors than one
        // leaf over all 16 rows with a single error.
        let e16 = pessimistic_errors(16.0, 1.0, 0.25);
        let split_cost = pessimistic_errors(6.0, 0.0, 0.25)
            + pessimistic_errors(9.0, 0.0, 0.25)
            + pessimistic_errors(1.0, 0.0, 0.25);
        assert!(e16 < split_cost, "{e16} vs {split_cost}");
    }

    #[test]
    fn pruning_collapses_noise_tree() {
        // Labels are 20% minority noise with no real structure: the greedy
        // build isolates the minority rows, pruning should collapse most of
        // that structure because every region keeps the same majority.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..200 {
            x.push(vec![i as f64]);
            y.push(u8::from(rng.random_range(0..10) < 2));
        }
        let idx: Vec<usize> = (0..x.len()).collect();
        let unpruned = build_unpruned(&x, &y, &idx);
        let pruned = fit_c50(&x, &y, 0.25);
        assert!(
            unpruned.leaf_count() >= 20,
            "unpruned {}",
            unpruned.leaf_count()
        );
        assert!(
            pruned.root.leaf_count() <= unpruned.leaf_count() / 4,
            "pruned {} vs unpruned {}",
            pruned.root.leaf_count(),
            unpruned.leaf_count()
        );
    }

    #[test]
    fn classifies_blobs() {
        let train_data = testdata::blobs(100, 3, 6.0, 61);
        let test_data = testdata::blobs(100, 3, 6.0, 62);
        let model = train(&ModelSpec::new(ModelFamily::C50Tree, 1), &train_data).unwrap();
        let correct = test_data
            .values
            .iter()
            .zip(&test_data.labels)
            .filter(|(row, &l)| (model.score(row).unwrap() >= 0.5) == (l == 1))
            .count();
        assert!(correct as f64 / test_data.n_rows() as f64 >= 0.95);
    }
}
