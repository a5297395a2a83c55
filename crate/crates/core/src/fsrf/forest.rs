use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{check_features, FeatureMeta, FeatureValue, SurvivalDataset};
use crate::error::{domain, Error, Result};
use crate::fairness::{GroupPartition, GroupRule};

use super::params::ForestParams;
use super::tree::{fit_tree, SurvivalTree, TrainingData};

pub const MODEL_FORMAT: &str = "fairsurv-fsrf";
pub const MODEL_VERSION: u32 = 1;

/// A trained forest. Immutable after fitting and safe to share across threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FsrfModel {
    pub format: String,
    pub version: u32,
    pub params: ForestParams,
    pub seed: u64,
    pub feature_meta: Vec<FeatureMeta>,
    /// Sensitive grouping used at training time, reused when evaluating.
    pub group_rule: Option<GroupRule>,
    pub trees: Vec<SurvivalTree>,
}

/// Per-tree generator: one ChaCha stream per tree index, so the forest does
/// not depend on how trees are scheduled across threads.
fn tree_rng(seed: u64, tree: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree as u64);
    rng
}

/// Fits `params.n_trees` trees in parallel on the current rayon pool.
pub fn fit_forest(
    dataset: &SurvivalDataset,
    params: &ForestParams,
    partition: &GroupPartition,
    seed: u64,
) -> Result<FsrfModel> {
    if dataset.event_count() == 0 {
        return Err(Error::NoEvents);
    }
    let params = params.resolve(dataset.n_features())?;
    let data = TrainingData::new(dataset, partition)?;
    let n = data.len();
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|b| {
            let mut rng = tree_rng(seed, b);
            let sample: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            fit_tree(&data, &sample, &params, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FsrfModel {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        params,
        seed,
        feature_meta: dataset.feature_meta.clone(),
        group_rule: None,
        trees,
    })
}

impl FsrfModel {
    pub fn with_group_rule(mut self, rule: GroupRule) -> Self {
        self.group_rule = Some(rule);
        self
    }

    /// Mean leaf risk over trees.
    pub fn predict_risk(&self, features: &[FeatureValue]) -> Result<f64> {
        check_features(features, &self.feature_meta)?;
        let sum: f64 = self.trees.iter().map(|t| t.leaf_risk(features)).sum();
        Ok(sum / self.trees.len() as f64)
    }

    /// `exp(−H̄(t))` with `H̄` the mean routed leaf cumulative hazard.
    pub fn predict_survival(&self, features: &[FeatureValue], t: f64) -> Result<f64> {
        check_features(features, &self.feature_meta)?;
        if !(t >= 0.0) {
            return Err(domain(format!("time must be >= 0, got {t}")));
        }
        Ok((-self.cumulative_hazard(features, t)).exp())
    }

    fn cumulative_hazard(&self, features: &[FeatureValue], t: f64) -> f64 {
        let sum: f64 = self
            .trees
            .iter()
            .map(|tree| tree.leaf_hazard(features).eval(t))
            .sum();
        sum / self.trees.len() as f64
    }

    pub fn predict_risks(&self, dataset: &SurvivalDataset) -> Result<Vec<f64>> {
        dataset
            .records
            .par_iter()
            .map(|r| self.predict_risk(&r.features))
            .collect()
    }

    pub fn predict_survivals(&self, dataset: &SurvivalDataset, t: f64) -> Result<Vec<f64>> {
        dataset
            .records
            .par_iter()
            .map(|r| self.predict_survival(&r.features, t))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: FsrfModel = serde_json::from_str(text)?;
        if model.format != MODEL_FORMAT {
            return Err(Error::Format(format!("not a model file: format '{}'", model.format)));
        }
        if model.version != MODEL_VERSION {
            return Err(Error::Format(format!(
                "unsupported model version {} (expected {MODEL_VERSION})",
                model.version
            )));
        }
        if model.trees.is_empty() {
            return Err(Error::Format("model has no trees".into()));
        }
        Ok(model)
    }
}
