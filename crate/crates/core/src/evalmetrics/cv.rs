use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{SensitiveKind, SurvivalDataset};
use crate::error::{Error, Result};
use crate::fairness::GroupRule;
use crate::fsrf::{fit_forest, ForestParams};

use super::{default_time, evaluate};

/// Fold index per record. Events and censored records are shuffled separately
/// and dealt round-robin, so each fold gets its share of events.
pub fn stratified_folds(events: &[bool], k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut with: Vec<usize> = (0..events.len()).filter(|&i| events[i]).collect();
    let mut without: Vec<usize> = (0..events.len()).filter(|&i| !events[i]).collect();
    with.shuffle(&mut rng);
    without.shuffle(&mut rng);
    let mut fold = vec![0; events.len()];
    for (pos, &i) in with.iter().chain(&without).enumerate() {
        fold[i] = pos % k.max(1);
    }
    fold
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRow {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub ci: Option<f64>,
    pub c_index: f64,
    pub brier: f64,
    pub td_auc: f64,
    pub fc_verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub sd: f64,
    pub n: usize,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Summary> {
        let v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return None;
        }
        let n = v.len();
        let mean = v.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Summary { mean, sd, n })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedFold {
    pub fold: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds_requested: usize,
    pub seed: u64,
    pub time: f64,
    pub folds: Vec<FoldRow>,
    pub skipped: Vec<SkippedFold>,
    pub ci: Option<Summary>,
    pub c_index: Option<Summary>,
    pub brier: Option<Summary>,
    pub td_auc: Option<Summary>,
}

fn skippable(e: &Error) -> bool {
    matches!(
        e,
        Error::NoEvents
            | Error::NoComparablePairs
            | Error::NotEstimable(_)
            | Error::EmptyInput(_)
            | Error::ConstantAttribute
            | Error::DegenerateVariance
    )
}

fn run_fold(
    dataset: &SurvivalDataset,
    params: &ForestParams,
    seed: u64,
    fold: usize,
    assignment: &[usize],
    t: f64,
    bins: usize,
) -> Result<FoldRow> {
    let (test_idx, train_idx): (Vec<usize>, Vec<usize>) =
        (0..dataset.len()).partition(|&i| assignment[i] == fold);
    let train = dataset.subset(&train_idx);
    let test = dataset.subset(&test_idx);
    if test.event_count() == 0 || train.event_count() == 0 {
        return Err(Error::NoEvents);
    }
    // an outcome-driven threshold may only look at the training fold
    let meta = &dataset.sensitive_meta;
    let rule = if meta.kind == SensitiveKind::Continuous && meta.threshold.is_none() {
        GroupRule::fit(&train)?
    } else {
        GroupRule::from_dataset(dataset)?
    };
    let model = fit_forest(&train, params, &rule.partition(&train)?, seed)?;
    let risks = model.predict_risks(&test)?;
    let survival = model.predict_survivals(&test, t)?;
    let report = evaluate(&test.records, &risks, &survival, &rule.partition(&test)?, t, bins)?;
    Ok(FoldRow {
        fold,
        n_train: train.len(),
        n_test: test.len(),
        ci: report.ci,
        c_index: report.c_index,
        brier: report.brier,
        td_auc: report.td_auc,
        fc_verdict: report.fc_verdict.to_string(),
    })
}

/// Stratified k-fold cross-validation of the forest. Folds whose metrics
/// cannot be estimated are reported in `skipped`; if every fold is skipped the
/// whole run fails. `t` defaults to the median event time of the full data.
pub fn cross_validate(
    dataset: &SurvivalDataset,
    params: &ForestParams,
    k: usize,
    seed: u64,
    t: Option<f64>,
    bins: usize,
) -> Result<CvReport> {
    if k < 2 || k > dataset.len() {
        return Err(Error::Domain(format!(
            "folds must lie in 2..={}, got {k}",
            dataset.len()
        )));
    }
    let t = match t {
        Some(t) => t,
        None => default_time(&dataset.records)?,
    };
    let events: Vec<bool> = dataset.records.iter().map(|r| r.event).collect();
    let assignment = stratified_folds(&events, k, seed);
    let mut folds = Vec::new();
    let mut skipped = Vec::new();
    for fold in 0..k {
        match run_fold(dataset, params, seed, fold, &assignment, t, bins) {
            Ok(row) => folds.push(row),
            Err(e) if skippable(&e) => skipped.push(SkippedFold {
                fold,
                reason: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    if folds.is_empty() {
        return Err(Error::NotEstimable("every fold was skipped".into()));
    }
    Ok(CvReport {
        folds_requested: k,
        seed,
        time: t,
        ci: Summary::of(folds.iter().filter_map(|f| f.ci)),
        c_index: Summary::of(folds.iter().map(|f| f.c_index)),
        brier: Summary::of(folds.iter().map(|f| f.brier)),
        td_auc: Summary::of(folds.iter().map(|f| f.td_auc)),
        folds,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn events_spread_over_folds() {
        let events: Vec<bool> = (0..50).map(|i| i % 5 == 0).collect();
        let f = stratified_folds(&events, 5, 3);
        for k in 0..5 {
            let n = f.iter().filter(|&&g| g == k).count();
            let e = (0..50).filter(|&i| f[i] == k && events[i]).count();
            assert_eq!(n, 10);
            assert_eq!(e, 2);
        }
        assert_eq!(f, stratified_folds(&events, 5, 3));
        assert_ne!(f, stratified_folds(&events, 5, 4));
    }

    #[test]
    fn summary_stats() {
        let s = Summary::of([1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.sd, 1.0);
        assert_eq!(Summary::of([4.0]).unwrap().sd, 0.0);
        assert!(Summary::of([]).is_none());
    }
}
