//! From-scratch implementations of the eight benchmark classifier families
//! behind one train/score interface.
//!
//! Every family standardizes features with train-set statistics, scores rows
//! with a probability-like value in [0, 1] (positive class = MI = label 1),
//! and is a deterministic function of (spec, data) including `train_seed`.

pub mod bayes;
pub mod boosting;
pub mod forest;
pub mod knn;
pub mod linear;
pub mod svm;
pub mod tree;

use serde::{Deserialize, Serialize};

use crate::{HrvError, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    pub row_ids: Vec<String>,
    pub feature_names: Vec<String>,
    /// Row-major values, `values[row][column]`.
    pub values: Vec<Vec<f64>>,
    /// 0 = Healthy, 1 = MI.
    pub labels: Vec<u8>,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.values.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.labels.len() || self.values.len() != self.row_ids.len() {
            return Err(HrvError::Config(
                "feature matrix row counts disagree".into(),
            ));
        }
        let mut names = self.feature_names.clone();
        names.sort();
        names.dedup();
        if names.len() != self.feature_names.len() {
            return Err(HrvError::Config("duplicate feature names".into()));
        }
        for row in &self.values {
            if row.len() != self.feature_names.len() {
                return Err(HrvError::Config("ragged feature matrix".into()));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(HrvError::Config("non-finite feature value".into()));
            }
        }
        if self.labels.iter().any(|&l| l > 1) {
            return Err(HrvError::Config("labels must be 0 or 1".into()));
        }
        Ok(())
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&l| l == 1).count();
        (self.labels.len() - pos, pos)
    }

    /// Restrict to the named columns, in the order given.
    pub fn select_features(&self, names: &[String]) -> Result<FeatureMatrix> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.feature_names
                    .iter()
                    .position(|f| f == n)
                    .ok_or_else(|| HrvError::Config(format!("unknown feature column {n}")))
            })
            .collect::<Result<_>>()?;
        Ok(FeatureMatrix {
            row_ids: self.row_ids.clone(),
            feature_names: names.to_vec(),
            values: self
                .values
                .iter()
                .map(|row| idx.iter().map(|&i| row[i]).collect())
                .collect(),
            labels: self.labels.clone(),
        })
    }

    pub fn subset_rows(&self, rows: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            row_ids: rows.iter().map(|&r| self.row_ids[r].clone()).collect(),
            feature_names: self.feature_names.clone(),
            values: rows.iter().map(|&r| self.values[r].clone()).collect(),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelFamily {
    LogisticRegression,
    LinearDiscriminantAnalysis,
    KNearestNeighbor,
    RandomForest,
    SupportVectorMachine,
    NaiveBayes,
    C50Tree,
    StochasticGradientBoosting,
}

pub const ALL_FAMILIES: [ModelFamily; 8] = [
    ModelFamily::LogisticRegression,
    ModelFamily::LinearDiscriminantAnalysis,
    ModelFamily::KNearestNeighbor,
    ModelFamily::RandomForest,
    ModelFamily::SupportVectorMachine,
    ModelFamily::NaiveBayes,
    ModelFamily::C50Tree,
    ModelFamily::StochasticGradientBoosting,
];

impl ModelFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelFamily::LogisticRegression => "LogisticRegression",
            ModelFamily::LinearDiscriminantAnalysis => "LinearDiscriminantAnalysis",
            ModelFamily::KNearestNeighbor => "KNearestNeighbor",
            ModelFamily::RandomForest => "RandomForest",
            ModelFamily::SupportVectorMachine => "SupportVectorMachine",
            ModelFamily::NaiveBayes => "NaiveBayes",
            ModelFamily::C50Tree => "C50Tree",
            ModelFamily::StochasticGradientBoosting => "StochasticGradientBoosting",
        }
    }

    /// Short lowercase name, used in file names and CLI filters.
    pub fn slug(self) -> &'static str {
        match self {
            ModelFamily::LogisticRegression => "lr",
            ModelFamily::LinearDiscriminantAnalysis => "lda",
            ModelFamily::KNearestNeighbor => "knn",
            ModelFamily::RandomForest => "rf",
            ModelFamily::SupportVectorMachine => "svm",
            ModelFamily::NaiveBayes => "nb",
            ModelFamily::C50Tree => "c50",
            ModelFamily::StochasticGradientBoosting => "sgb",
        }
    }

    /// Accepts the canonical name or a short CLI alias.
    pub fn parse(text: &str) -> Option<ModelFamily> {
        match text {
            "LogisticRegression" | "lr" => Some(ModelFamily::LogisticRegression),
            "LinearDiscriminantAnalysis" | "lda" => Some(ModelFamily::LinearDiscriminantAnalysis),
            "KNearestNeighbor" | "knn" => Some(ModelFamily::KNearestNeighbor),
            "RandomForest" | "rf" => Some(ModelFamily::RandomForest),
            "SupportVectorMachine" | "svm" => Some(ModelFamily::SupportVectorMachine),
            "NaiveBayes" | "nb" => Some(ModelFamily::NaiveBayes),
            "C50Tree" | "c50" => Some(ModelFamily::C50Tree),
            "StochasticGradientBoosting" | "sgb" => Some(ModelFamily::StochasticGradientBoosting),
            _ => None,
        }
    }
}

/// Hyperparameters for every family; each family reads only its own knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub ridge: f64,
    pub lda_loading: f64,
    pub knn_k: usize,
    pub forest_trees: usize,
    pub svm_c: f64,
    pub svm_epochs: usize,
    pub nb_variance_floor: f64,
    pub c50_confidence: f64,
    pub sgb_rounds: usize,
    pub sgb_depth: usize,
    pub sgb_shrinkage: f64,
    pub sgb_subsample: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            ridge: 1e-6,
            lda_loading: 1e-6,
            knn_k: 5,
            forest_trees: 500,
            svm_c: 1.0,
            svm_epochs: 100,
            nb_variance_floor: 1e-9,
            c50_confidence: 0.25,
            sgb_rounds: 200,
            sgb_depth: 3,
            sgb_shrinkage: 0.1,
            sgb_subsample: 0.5,
        }
    }
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<()> {
        let bad = self.ridge < 0.0
            || self.lda_loading < 0.0
            || self.knn_k == 0
            || self.forest_trees == 0
            || self.svm_c <= 0.0
            || self.svm_epochs == 0
            || self.nb_variance_floor <= 0.0
            || !(0.0 < self.c50_confidence && self.c50_confidence < 1.0)
            || self.sgb_rounds == 0
            || self.sgb_depth == 0
            || !(0.0 < self.sgb_shrinkage && self.sgb_shrinkage <= 1.0)
            || !(0.0 < self.sgb_subsample && self.sgb_subsample <= 1.0);
        if bad {
            return Err(HrvError::Config("invalid hyperparameters".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: ModelFamily,
    pub train_seed: u64,
    pub hyper: Hyperparameters,
}

impl ModelSpec {
    pub fn new(family: ModelFamily, train_seed: u64) -> Self {
        ModelSpec {
            family,
            train_seed,
            hyper: Hyperparameters::default(),
        }
    }
}

/// Per-feature (mean, sd) learned on training data; sd 0 maps to 1 so
/// constant columns standardize to zero instead of NaN.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(data: &FeatureMatrix) -> Standardizer {
        let n = data.n_rows() as f64;
        let p = data.n_features();
        let mut means = vec![0.0; p];
        for row in &data.values {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        let mut sds = vec![0.0; p];
        for row in &data.values {
            for ((s, v), m) in sds.iter_mut().zip(row).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        for s in &mut sds {
            *s = (*s / n).sqrt();
            if *s == 0.0 {
                *s = 1.0;
            }
        }
        Standardizer { means, sds }
    }

    pub fn apply_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.means)
            .zip(&self.sds)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    pub fn apply(&self, data: &FeatureMatrix) -> Vec<Vec<f64>> {
        data.values.iter().map(|row| self.apply_row(row)).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ModelParams {
    Logistic(linear::LogisticParams),
    Lda(linear::LdaParams),
    Knn(knn::KnnParams),
    Forest(forest::ForestParams),
    Svm(svm::SvmParams),
    NaiveBayes(bayes::NaiveBayesParams),
    C50(tree::C50Params),
    Sgb(boosting::SgbParams),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedModel {
    pub spec: ModelSpec,
    pub feature_names: Vec<String>,
    pub standardizer: Standardizer,
    pub params: ModelParams,
}

/// Numerically safe logistic function with output strictly inside [0, 1].
pub(crate) fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z.clamp(-40.0, 40.0)).exp())
}

/// Fit a model. Requires at least two rows of each class and one feature.
pub fn train(spec: &ModelSpec, data: &FeatureMatrix) -> Result<TrainedModel> {
    data.validate()?;
    spec.hyper.validate()?;
    let (neg, pos) = data.class_counts();
    if neg < 2 || pos < 2 {
        return Err(HrvError::DegenerateClass);
    }
    if data.n_features() == 0 {
        return Err(HrvError::Config("no feature columns".into()));
    }

    let standardizer = Standardizer::fit(data);
    let x = standardizer.apply(data);
    let y = &data.labels;
    let h = &spec.hyper;

    let params = match spec.family {
        ModelFamily::LogisticRegression => {
            ModelParams::Logistic(linear::fit_logistic(&x, y, h.ridge))
        }
        ModelFamily::LinearDiscriminantAnalysis => {
            ModelParams::Lda(linear::fit_lda(&x, y, h.lda_loading)?)
        }
        ModelFamily::KNearestNeighbor => ModelParams::Knn(knn::fit(&x, y, h.knn_k)),
        ModelFamily::RandomForest => {
            ModelParams::Forest(forest::fit(&x, y, h.forest_trees, spec.train_seed))
        }
        ModelFamily::SupportVectorMachine => {
            ModelParams::Svm(svm::fit(&x, y, h.svm_c, h.svm_epochs, spec.train_seed))
        }
        ModelFamily::NaiveBayes => ModelParams::NaiveBayes(bayes::fit(&x, y, h.nb_variance_floor)),
        ModelFamily::C50Tree => ModelParams::C50(tree::fit_c50(&x, y, h.c50_confidence)),
        ModelFamily::StochasticGradientBoosting => ModelParams::Sgb(boosting::fit(
            &x,
            y,
            h.sgb_rounds,
            h.sgb_depth,
            h.sgb_shrinkage,
            h.sgb_subsample,
            spec.train_seed,
        )),
    };

    Ok(TrainedModel {
        spec: spec.clone(),
        feature_names: data.feature_names.clone(),
        standardizer,
        params,
    })
}

impl TrainedModel {
    /// Probability-like score in [0, 1]; class prediction is score >= 0.5.
    pub fn score(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.feature_names.len() {
            return Err(HrvError::ArityMismatch {
                expected: self.feature_names.len(),
                got: row.len(),
            });
        }
        let z = self.standardizer.apply_row(row);
        Ok(match &self.params {
            ModelParams::Logistic(p) => p.score(&z),
            ModelParams::Lda(p) => p.score(&z),
            ModelParams::Knn(p) => p.score(&z),
            ModelParams::Forest(p) => p.score(&z),
            ModelParams::Svm(p) => p.score(&z),
            ModelParams::NaiveBayes(p) => p.score(&z),
            ModelParams::C50(p) => p.score(&z),
            ModelParams::Sgb(p) => p.score(&z),
        })
    }

    pub fn score_rows(&self, data: &FeatureMatrix) -> Result<Vec<f64>> {
        data.values.iter().map(|row| self.score(row)).collect()
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            format_version: u32,
            model: &'a TrainedModel,
        }
        serde_json::to_string_pretty(&Doc {
            format_version: MODEL_FORMAT_VERSION,
            model: self,
        })
        .expect("model serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<TrainedModel> {
        #[derive(Deserialize)]
        struct Doc {
            format_version: u32,
            model: TrainedModel,
        }
        let doc: Doc =
            serde_json::from_str(text).map_err(|e| HrvError::Config(format!("model JSON: {e}")))?;
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(HrvError::Config(format!(
                "unsupported model format version {}",
                doc.format_version
            )));
        }
        Ok(doc.model)
    }
}

#[cfg(test)]
pub(crate) mod testdata {
    use super::FeatureMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    /// Two Gaussian blobs separated by `separation` SDs along every axis.
    pub fn blobs(n_per_class: usize, dims: usize, separation: f64, seed: u64) -> FeatureMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let unit = Normal::new(0.0, 1.0).unwrap();
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for class in 0..2u8 {
            let center = if class == 0 { 0.0 } else { separation };
            for _ in 0..n_per_class {
                values.push((0..dims).map(|_| center + unit.sample(&mut rng)).collect());
                labels.push(class);
            }
        }
        let row_ids = (0..values.len()).map(|i| format!("row_{i:03}")).collect();
        FeatureMatrix {
            row_ids,
            feature_names: (0..dims).map(|d| format!("f{d}")).collect(),
            values,
            labels,
        }
    }

    /// Single constant feature with balanced labels.
    pub fn constant_feature(n_per_class: usize) -> FeatureMatrix {
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for class in 0..2u8 {
            for _ in 0..n_per_class {
                values.push(vec![3.5]);
                labels.push(class);
            }
        }
        let row_ids = (0..values.len()).map(|i| format!("row_{i:03}")).collect();
        FeatureMatrix {
            row_ids,
            feature_names: vec!["c".into()],
            values,
            labels,
        }
    }

    /// Noise features with independently shuffled labels.
    pub fn noise(n_rows: usize, dims: usize, seed: u64) -> FeatureMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<Vec<f64>> = (0..n_rows)
            .map(|_| (0..dims).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let labels: Vec<u8> = (0..n_rows).map(|i| (i % 2) as u8).collect();
        let row_ids = (0..n_rows).map(|i| format!("row_{i:03}")).collect();
        FeatureMatrix {
            row_ids,
            feature_names: (0..dims).map(|d| format!("n{d}")).collect(),
            values,
            labels,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_feature_is_uninformative_for_every_family() {
        let data = testdata::constant_feature(100);
        for family in ALL_FAMILIES {
            let model = train(&ModelSpec::new(family, 7), &data).unwrap();
            for row in &data.values {
                let s = model.score(row).unwrap();
                assert!(
                    (0.45..=0.55).contains(&s),
                    "{}: score {s} outside [0.45, 0.55]",
                    family.as_str()
                );
            }
        }
    }

    #[test]
    fn determinism_across_retrains() {
        let data = testdata::blobs(40, 3, 2.0, 11);
        for family in ALL_FAMILIES {
            let spec = ModelSpec::new(family, 99);
            let a = train(&spec, &data).unwrap();
            let b = train(&spec, &data).unwrap();
            for row in &data.values {
                let sa = a.score(row).unwrap();
                let sb = b.score(row).unwrap();
                assert_eq!(sa.to_bits(), sb.to_bits(), "{}", family.as_str());
            }
        }
    }

    #[test]
    fn json_round_trip_preserves_scores() {
        let data = testdata::blobs(30, 4, 1.5, 3);
        for family in ALL_FAMILIES {
            let model = train(&ModelSpec::new(family, 5), &data).unwrap();
            let restored = TrainedModel::from_json(&model.to_json()).unwrap();
            for row in &data.values {
                assert_eq!(
                    model.score(row).unwrap().to_bits(),
                    restored.score(row).unwrap().to_bits(),
                    "{}",
                    family.as_str()
                );
            }
        }
    }

    #[test]
    fn rejects_degenerate_class() {
        let mut data = testdata::blobs(10, 2, 1.0, 1);
        for l in &mut data.labels {
            *l = 0;
        }
        assert!(matches!(
            train(&ModelSpec::new(ModelFamily::NaiveBayes, 1), &data),
            Err(HrvError::DegenerateClass)
        ));
    }

    #[test]
    fn rejects_arity_mismatch() {
        let data = testdata::blobs(10, 3, 1.0, 2);
        let model = train(&ModelSpec::new(ModelFamily::LogisticRegression, 1), &data).unwrap();
        assert!(matches!(
            model.score(&[1.0, 2.0]),
            Err(HrvError::ArityMismatch {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn standardization_invariance_under_column_rescale() {
        let data = testdata::blobs(60, 4, 1.2, 21);
        // Rescale column 2 by an affine map, train/test consistently.
        let mut rescaled = data.clone();
        for row in &mut rescaled.values {
            row[2] = row[2] * 37.5 - 11.0;
        }
        for family in ALL_FAMILIES {
            let spec = ModelSpec::new(family, 4);
            let m1 = train(&spec, &data).unwrap();
            let m2 = train(&spec, &rescaled).unwrap();
            for (row1, row2) in data.values.iter().zip(&rescaled.values) {
                let s1 = m1.score(row1).unwrap();
                let s2 = m2.score(row2).unwrap();
                assert_eq!(s1 >= 0.5, s2 >= 0.5, "{}: labels differ", family.as_str());
                match family {
                    ModelFamily::LogisticRegression
                    | ModelFamily::LinearDiscriminantAnalysis
                    | ModelFamily::KNearestNeighbor
                    | ModelFamily::NaiveBayes => {
                        assert!((s1 - s2).abs() < 1e-6, "{}: {s1} vs {s2}", family.as_str());
                    }
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn feature_selection_and_row_subset() {
        let data = testdata::blobs(5, 3, 1.0, 8);
        let sel = data.select_features(&["f2".into(), "f0".into()]).unwrap();
        assert_eq!(sel.feature_names, vec!["f2".to_string(), "f0".to_string()]);
        assert_eq!(sel.values[0][0], data.values[0][2]);
        assert_eq!(sel.values[0][1], data.values[0][0]);
        assert!(data.select_features(&["missing".into()]).is_err());

        let sub = data.subset_rows(&[0, 9]);
        assert_eq!(sub.n_rows(), 2);
        assert_eq!(sub.row_ids[1], data.row_ids[9]);
    }
}
