//! Evaluation protocol: stratified holdout and k-fold cross-validation,
//! confusion-matrix metrics, Cohen's kappa, ROC/AUROC, and the feature-set ×
//! model benchmark grid.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::features::FeatureSet;
use crate::ml::{train, FeatureMatrix, ModelSpec, TrainedModel};
use crate::util::mix_seed;
use crate::{HrvError, Result};

const HOLDOUT_SEED_STREAM: u64 = 0x484f_4c44;
const FOLD_SEED_STREAM: u64 = 0x464f_4c44;

#[derive(Debug, Clone, Copy)]
pub struct EvalProtocol {
    pub holdout_fraction: f64,
    pub cv_folds: usize,
    pub stratified: bool,
    pub split_seed: u64,
    pub decision_threshold: f64,
}

impl Default for EvalProtocol {
    fn default() -> Self {
        EvalProtocol {
            holdout_fraction: 0.2,
            cv_folds: 10,
            stratified: true,
            split_seed: 42,
            decision_threshold: 0.5,
        }
    }
}

impl EvalProtocol {
    pub fn validate(&self) -> Result<()> {
        if !(self.holdout_fraction > 0.0 && self.holdout_fraction < 1.0) {
            return Err(HrvError::Config(
                "holdout fraction must lie strictly between 0 and 1".into(),
            ));
        }
        if self.cv_folds < 2 {
            return Err(HrvError::Config("cv folds must be at least 2".into()));
        }
        if !(self.decision_threshold >= 0.0 && self.decision_threshold <= 1.0) {
            return Err(HrvError::Config(
                "decision threshold must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Counts with MI as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fn_: usize,
    pub fp: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn from_scores(labels: &[u8], scores: &[f64], threshold: f64) -> ConfusionMatrix {
        let mut cm = ConfusionMatrix {
            tp: 0,
            fn_: 0,
            fp: 0,
            tn: 0,
        };
        for (&label, &score) in labels.iter().zip(scores) {
            let predicted_mi = score >= threshold;
            match (label == 1, predicted_mi) {
                (true, true) => cm.tp += 1,
                (true, false) => cm.fn_ += 1,
                (false, true) => cm.fp += 1,
                (false, false) => cm.tn += 1,
            }
        }
        cm
    }

    pub fn total(&self) -> usize {
        self.tp + self.fn_ + self.fp + self.tn
    }

    pub fn accuracy(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    pub fn sensitivity(&self) -> Option<f64> {
        let pos = self.tp + self.fn_;
        (pos > 0).then(|| self.tp as f64 / pos as f64)
    }

    pub fn specificity(&self) -> Option<f64> {
        let neg = self.tn + self.fp;
        (neg > 0).then(|| self.tn as f64 / neg as f64)
    }
}

/// Cohen's kappa: (p_o - p_e) / (1 - p_e); absent when chance agreement is
/// exactly 1 (single-cell matrix).
pub fn kappa(cm: &ConfusionMatrix) -> Option<f64> {
    let n = cm.total() as f64;
    let tp = cm.tp as f64;
    let fn_ = cm.fn_ as f64;
    let fp = cm.fp as f64;
    let tn = cm.tn as f64;
    let p_o = (tp + tn) / n;
    let p_e = ((tp + fn_) * (tp + fp) + (fp + tn) * (fn_ + tn)) / (n * n);
    if p_e == 1.0 {
        return None;
    }
    Some((p_o - p_e) / (1.0 - p_e))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricBlock {
    pub accuracy: f64,
    pub kappa: Option<f64>,
    pub auroc: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

impl MetricBlock {
    pub fn from_scores(labels: &[u8], scores: &[f64], threshold: f64) -> MetricBlock {
        let cm = ConfusionMatrix::from_scores(labels, scores, threshold);
        let auroc = roc_auroc(labels, scores).ok().map(|(_, a)| a);
        MetricBlock {
            accuracy: cm.accuracy(),
            kappa: kappa(&cm),
            auroc,
            sensitivity: cm.sensitivity(),
            specificity: cm.specificity(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

/// ROC sweep over descending distinct score thresholds with tied scores
/// grouped into single steps, plus the trapezoidal AUROC (equivalent to the
/// tie-adjusted Mann-Whitney statistic).
pub fn roc_auroc(labels: &[u8], scores: &[f64]) -> Result<(Vec<RocPoint>, f64)> {
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(HrvError::SingleClass);
    }
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));

    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    let mut auroc = 0.0f64;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0usize;
    while i < order.len() {
        let threshold = scores[order[i]];
        let mut j = i;
        while j < order.len() && scores[order[j]] == threshold {
            if labels[order[j]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            j += 1;
        }
        let prev = *points.last().expect("seeded");
        let fpr = fp as f64 / n_neg as f64;
        let tpr = tp as f64 / n_pos as f64;
        auroc += (fpr - prev.fpr) * (tpr + prev.tpr) / 2.0;
        points.push(RocPoint {
            threshold,
            fpr,
            tpr,
        });
        i = j;
    }
    Ok((points, auroc))
}

/// Stratified holdout: per class, shuffle by seed and keep
/// round(count × (1 − holdout_fraction)) rows (ties up) for training.
pub fn split_holdout(
    data: &FeatureMatrix,
    protocol: &EvalProtocol,
) -> Result<(FeatureMatrix, FeatureMatrix)> {
    protocol.validate()?;
    data.validate()?;
    let train_fraction = 1.0 - protocol.holdout_fraction;
    let mut train_rows = Vec::new();
    let mut test_rows = Vec::new();
    for class in 0..2u8 {
        let mut rows: Vec<usize> = (0..data.n_rows())
            .filter(|&r| data.labels[r] == class)
            .collect();
        if rows.is_empty() {
            return Err(HrvError::TooSmall(format!(
                "class {class} has no rows to split"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(
            protocol.split_seed,
            HOLDOUT_SEED_STREAM + class as u64,
        ));
        rows.shuffle(&mut rng);
        let keep = (rows.len() as f64 * train_fraction + 0.5).floor() as usize;
        if keep < protocol.cv_folds {
            return Err(HrvError::TooSmall(format!(
                "class {class} would keep {keep} training rows, fewer than {} folds",
                protocol.cv_folds
            )));
        }
        if keep >= rows.len() {
            return Err(HrvError::TooSmall(format!(
                "class {class} would hold out no test rows"
            )));
        }
        train_rows.extend_from_slice(&rows[..keep]);
        test_rows.extend_from_slice(&rows[keep..]);
    }
    train_rows.sort_unstable();
    test_rows.sort_unstable();
    Ok((data.subset_rows(&train_rows), data.subset_rows(&test_rows)))
}

/// Per-row validation-fold ids: classes are shuffled separately and dealt
/// round-robin, with each class's deal offset by the running remainder so
/// overall fold sizes differ by at most one.
pub fn fold_assignments(labels: &[u8], folds: usize, seed: u64) -> Vec<usize> {
    let mut assignment = vec![0usize; labels.len()];
    let mut offset = 0usize;
    for class in 0..2u8 {
        let mut rows: Vec<usize> = (0..labels.len()).filter(|&r| labels[r] == class).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, FOLD_SEED_STREAM + class as u64));
        rows.shuffle(&mut rng);
        for (j, &row) in rows.iter().enumerate() {
            assignment[row] = (j + offset) % folds;
        }
        offset = (offset + rows.len()) % folds;
    }
    assignment
}

#[derive(Debug, Clone)]
pub struct CvOutcome {
    /// One block over the pooled out-of-fold scores (the primary CV number).
    pub pooled: MetricBlock,
    pub per_fold: Vec<MetricBlock>,
}

pub fn cross_validate(
    spec: &ModelSpec,
    data: &FeatureMatrix,
    protocol: &EvalProtocol,
) -> Result<CvOutcome> {
    protocol.validate()?;
    data.validate()?;
    let folds = protocol.cv_folds;
    let assignment = fold_assignments(&data.labels, folds, protocol.split_seed);
    let mut oof_scores = vec![0.0f64; data.n_rows()];
    let mut per_fold = Vec::with_capacity(folds);
    for fold in 0..folds {
        let train_rows: Vec<usize> = (0..data.n_rows())
            .filter(|&r| assignment[r] != fold)
            .collect();
        let val_rows: Vec<usize> = (0..data.n_rows())
            .filter(|&r| assignment[r] == fold)
            .collect();
        if val_rows.is_empty() {
            return Err(HrvError::FoldDegenerate(format!("fold {fold} is empty")));
        }
        let train_data = data.subset_rows(&train_rows);
        let (neg, pos) = train_data.class_counts();
        if neg < 2 || pos < 2 {
            return Err(HrvError::FoldDegenerate(format!(
                "fold {fold} leaves a class with fewer than 2 training rows"
            )));
        }
        let mut fold_spec = spec.clone();
        fold_spec.train_seed = mix_seed(spec.train_seed, fold as u64);
        let model = train(&fold_spec, &train_data)?;
        let mut fold_labels = Vec::with_capacity(val_rows.len());
        let mut fold_scores = Vec::with_capacity(val_rows.len());
        for &row in &val_rows {
            let score = model.score(&data.values[row])?;
            oof_scores[row] = score;
            fold_labels.push(data.labels[row]);
            fold_scores.push(score);
        }
        per_fold.push(MetricBlock::from_scores(
            &fold_labels,
            &fold_scores,
            protocol.decision_threshold,
        ));
    }
    let pooled = MetricBlock::from_scores(&data.labels, &oof_scores, protocol.decision_threshold);
    Ok(CvOutcome { pooled, per_fold })
}

/// One benchmark cell: a feature set × model family pairing.
#[derive(Debug, Clone)]
pub struct BenchCell {
    pub set: FeatureSet,
    pub spec: ModelSpec,
    /// Cross-validation on the 80% training portion.
    pub cv: CvOutcome,
    /// Metrics of the train-refit model on the held-out 20%.
    pub holdout: MetricBlock,
    /// ROC points of the held-out scores.
    pub roc: Vec<RocPoint>,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub cells: Vec<BenchCell>,
}

impl BenchReport {
    pub fn cell(&self, set: FeatureSet, family: crate::ml::ModelFamily) -> Option<&BenchCell> {
        self.cells
            .iter()
            .find(|c| c.set == set && c.spec.family == family)
    }
}

/// Run the full grid: one stratified holdout split shared by every cell,
/// cross-validation on the training portion, a refit scored on the held-out
/// portion. Per-cell seeds derive from each model's train seed and the grid
/// position.
pub fn benchmark_feature_sets(
    features: &FeatureMatrix,
    sets: &[FeatureSet],
    specs: &[ModelSpec],
    protocol: &EvalProtocol,
) -> Result<BenchReport> {
    let (train_all, test_all) = split_holdout(features, protocol)?;
    let mut cells = Vec::with_capacity(sets.len() * specs.len());
    for (set_index, &set) in sets.iter().enumerate() {
        let names: Vec<String> = set.columns().iter().map(|c| c.to_string()).collect();
        let train_set = train_all.select_features(&names)?;
        let test_set = test_all.select_features(&names)?;
        for spec in specs {
            let mut cell_spec = spec.clone();
            cell_spec.train_seed = mix_seed(spec.train_seed, set_index as u64);
            let cv = cross_validate(&cell_spec, &train_set, protocol)?;
            let model: TrainedModel = train(&cell_spec, &train_set)?;
            let scores = model.score_rows(&test_set)?;
            let holdout =
                MetricBlock::from_scores(&test_set.labels, &scores, protocol.decision_threshold);
            let (roc, _) = roc_auroc(&test_set.labels, &scores)?;
            cells.push(BenchCell {
                set,
                spec: cell_spec,
                cv,
                holdout,
                roc,
            });
        }
    }
    Ok(BenchReport { cells })
}
