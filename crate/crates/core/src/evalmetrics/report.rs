use serde::{Deserialize, Serialize};

use crate::data::Outcome;
use crate::error::{Error, Result};
use crate::fairness::{
    concordance_imparity_par, fair_calibration, CalibrationReport, CalibrationVerdict,
    GroupPartition,
};

use super::{brier_score_detail, check_len, harrell_c_index, td_auc_grid};

/// Median observed event time, the default evaluation time.
pub fn default_time<O: Outcome>(records: &[O]) -> Result<f64> {
    let mut times: Vec<f64> = records.iter().filter(|r| r.event()).map(|r| r.time()).collect();
    if times.is_empty() {
        return Err(Error::NoEvents);
    }
    times.sort_by(f64::total_cmp);
    let m = times.len();
    Ok(if m % 2 == 1 {
        times[m / 2]
    } else {
        0.5 * (times[m / 2 - 1] + times[m / 2])
    })
}

/// Accuracy metrics restricted to one sensitive group. A metric that cannot be
/// estimated on the group is `None` with the reason in `notes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupMetrics {
    pub group: usize,
    pub label: String,
    pub n: usize,
    pub events: usize,
    pub c_index: Option<f64>,
    pub brier: Option<f64>,
    pub td_auc: Option<f64>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub time: f64,
    pub n: usize,
    pub c_index: f64,
    pub brier: f64,
    /// Records left out of the Brier score for a zero censoring weight.
    pub brier_dropped: usize,
    /// Mean of the time-dependent AUC over the event-time grid.
    pub td_auc: f64,
    pub td_auc_points: usize,
    /// Concordance imparity; `None` when no group has a permissible pair.
    pub ci: Option<f64>,
    pub cf: Vec<Option<f64>>,
    pub fc_verdict: CalibrationVerdict,
    pub calibration: CalibrationReport,
    pub per_group: Vec<GroupMetrics>,
}

fn keep<T>(notes: &mut Vec<String>, what: &str, res: Result<T>) -> Result<Option<T>> {
    match res {
        Ok(v) => Ok(Some(v)),
        Err(e @ (Error::NoComparablePairs | Error::NotEstimable(_) | Error::NoEvents | Error::EmptyInput(_))) => {
            notes.push(format!("{what}: {e}"));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Per-group metrics, each computed on the group's records alone.
pub fn group_breakdown<O: Outcome + Clone + Sync>(
    records: &[O],
    risks: &[f64],
    predicted_survival: &[f64],
    t: f64,
    partition: &GroupPartition,
) -> Result<Vec<GroupMetrics>> {
    check_len(records.len(), risks)?;
    check_len(records.len(), predicted_survival)?;
    partition.check_len(records.len())?;
    partition
        .members()
        .into_iter()
        .enumerate()
        .map(|(g, idx)| {
            let recs: Vec<O> = idx.iter().map(|&i| records[i].clone()).collect();
            let r: Vec<f64> = idx.iter().map(|&i| risks[i]).collect();
            let s: Vec<f64> = idx.iter().map(|&i| predicted_survival[i]).collect();
            let mut notes = Vec::new();
            let c_index = keep(&mut notes, "c-index", harrell_c_index(&recs, &r))?;
            let brier = keep(&mut notes, "brier", brier_score_detail(&recs, &s, t).map(|b| b.score))?;
            let td_auc = keep(&mut notes, "td-auc", td_auc_grid(&recs, &r).map(|g| g.mean))?;
            Ok(GroupMetrics {
                group: g,
                label: partition.labels()[g].clone(),
                n: recs.len(),
                events: recs.iter().filter(|r| r.event()).count(),
                c_index,
                brier,
                td_auc,
                notes,
            })
        })
        .collect()
}

/// Full evaluation of risk scores and survival probabilities at `t`.
pub fn evaluate<O: Outcome + Clone + Sync>(
    records: &[O],
    risks: &[f64],
    predicted_survival: &[f64],
    partition: &GroupPartition,
    t: f64,
    bins: usize,
) -> Result<MetricsReport> {
    let c_index = harrell_c_index(records, risks)?;
    let brier = brier_score_detail(records, predicted_survival, t)?;
    let grid = td_auc_grid(records, risks)?;
    let (ci, cf) = match concordance_imparity_par(records, risks, partition) {
        Ok(res) => (Some(res.ci), res.cf),
        Err(Error::NoComparablePairs) => (None, vec![None; partition.k()]),
        Err(e) => return Err(e),
    };
    let calibration = fair_calibration(records, predicted_survival, partition, t, bins)?;
    Ok(MetricsReport {
        time: t,
        n: records.len(),
        c_index,
        brier: brier.score,
        brier_dropped: brier.dropped,
        td_auc: grid.mean,
        td_auc_points: grid.values.len(),
        ci,
        cf,
        fc_verdict: calibration.verdict,
        calibration,
        per_group: group_breakdown(records, risks, predicted_survival, t, partition)?,
    })
}
