use serde::{Deserialize, Serialize};

use crate::data::Outcome;
use crate::error::{domain, Error, Result};
use crate::survstats::{chi_square_sf, kaplan_meier, wilcoxon_signed_rank};

use super::GroupPartition;

pub const DEFAULT_BINS: usize = 10;

/// Significance level for each group's Hosmer–Lemeshow test.
const HL_ALPHA: f64 = 0.05;
/// Every pairwise Wilcoxon p-value must exceed this for the difference branch.
const DIFFERENCE_P: f64 = 0.5;
/// Denominator guard for bins whose mean prediction is 0 or 1.
const PBAR_CLAMP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBin {
    /// Kaplan–Meier survival at the evaluation time among the bin's records.
    pub km: f64,
    /// Mean predicted survival probability.
    pub pbar: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HlResult {
    pub hl: f64,
    pub bins: Vec<CalibrationBin>,
}

/// Hosmer–Lemeshow statistic with Kaplan–Meier observed proportions.
///
/// Records are stably sorted by prediction and cut into `bins` index ranges of
/// near-equal size; with fewer records than bins, each record is its own bin.
pub fn hl_statistic<O: Outcome>(
    group_records: &[O],
    predicted: &[f64],
    t: f64,
    bins: usize,
) -> Result<HlResult> {
    let n = group_records.len();
    if n == 0 {
        return Err(Error::EmptyInput("calibration group has no records"));
    }
    if predicted.len() != n {
        return Err(Error::Shape {
            expected: n,
            actual: predicted.len(),
        });
    }
    if bins == 0 {
        return Err(domain("calibration needs at least one bin"));
    }
    if predicted.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(domain("predicted probabilities must lie in [0, 1]"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| predicted[a].total_cmp(&predicted[b]));

    let b_eff = bins.min(n);
    let mut out = Vec::with_capacity(b_eff);
    let mut hl = 0.0;
    for b in 0..b_eff {
        let idx = &order[b * n / b_eff..(b + 1) * n / b_eff];
        let members: Vec<(f64, bool)> = idx
            .iter()
            .map(|&i| (group_records[i].time(), group_records[i].event()))
            .collect();
        let km = kaplan_meier(&members)?.eval(t);
        let pbar = idx.iter().map(|&i| predicted[i]).sum::<f64>() / idx.len() as f64;
        let denom_p = pbar.clamp(PBAR_CLAMP, 1.0 - PBAR_CLAMP);
        hl += (km - pbar).powi(2) * idx.len() as f64 / (denom_p * (1.0 - denom_p));
        out.push(CalibrationBin {
            km,
            pbar,
            n: idx.len(),
        });
    }
    Ok(HlResult { hl, bins: out })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CalibrationVerdict {
    /// Every group passes its goodness-of-fit test.
    FairCalibratedRepresentation,
    /// Some group fails, but the calibration errors agree across groups.
    FairCalibratedDifference,
    BiasedCalibrated,
}

impl CalibrationVerdict {
    pub fn is_fair(self) -> bool {
        !matches!(self, CalibrationVerdict::BiasedCalibrated)
    }
}

impl std::fmt::Display for CalibrationVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CalibrationVerdict::FairCalibratedRepresentation => "fair calibrated (representation)",
            CalibrationVerdict::FairCalibratedDifference => "fair calibrated (difference)",
            CalibrationVerdict::BiasedCalibrated => "biased calibrated",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupCalibration {
    pub group: usize,
    pub label: String,
    pub n: usize,
    pub hl: f64,
    pub df: u32,
    pub p_value: f64,
    pub bins: Vec<CalibrationBin>,
}

impl GroupCalibration {
    /// Per-bin calibration error `KM_i − p̄_i`.
    pub fn differences(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.km - b.pbar).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseDifference {
    pub a: usize,
    pub b: usize,
    /// Wilcoxon signed-rank p-value; `None` when the groups have different bin counts.
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub time: f64,
    pub bins: usize,
    pub per_group: Vec<GroupCalibration>,
    /// Groups of the partition with no records in the evaluated data.
    pub empty_groups: Vec<usize>,
    pub verdict: CalibrationVerdict,
    /// Only computed when the representation test fails.
    pub difference_p: Option<Vec<PairwiseDifference>>,
}

/// Three-way fair calibration verdict at time `t`.
pub fn fair_calibration<O: Outcome>(
    records: &[O],
    predicted: &[f64],
    partition: &GroupPartition,
    t: f64,
    bins: usize,
) -> Result<CalibrationReport> {
    partition.check_len(records.len())?;
    if predicted.len() != records.len() {
        return Err(Error::Shape {
            expected: records.len(),
            actual: predicted.len(),
        });
    }
    let mut per_group = Vec::new();
    let mut empty_groups = Vec::new();
    for (g, members) in partition.members().into_iter().enumerate() {
        if members.is_empty() {
            empty_groups.push(g);
            continue;
        }
        let recs: Vec<(f64, bool)> = members
            .iter()
            .map(|&i| (records[i].time(), records[i].event()))
            .collect();
        let preds: Vec<f64> = members.iter().map(|&i| predicted[i]).collect();
        let res = hl_statistic(&recs, &preds, t, bins)?;
        let df = (res.bins.len() as u32).saturating_sub(2).max(1);
        let p_value = chi_square_sf(res.hl, df)?;
        per_group.push(GroupCalibration {
            group: g,
            label: partition.labels()[g].clone(),
            n: members.len(),
            hl: res.hl,
            df,
            p_value,
            bins: res.bins,
        });
    }
    if per_group.is_empty() {
        return Err(Error::EmptyInput("no group has records"));
    }

    let representation = per_group.iter().all(|g| g.p_value >= HL_ALPHA);
    let (verdict, difference_p) = if representation {
        (CalibrationVerdict::FairCalibratedRepresentation, None)
    } else {
        let mut pairs = Vec::new();
        for (x, gx) in per_group.iter().enumerate() {
            for gy in &per_group[x + 1..] {
                let (dx, dy) = (gx.differences(), gy.differences());
                let p_value = if dx.len() == dy.len() {
                    Some(wilcoxon_signed_rank(&dx, &dy)?)
                } else {
                    None
                };
                pairs.push(PairwiseDifference {
                    a: gx.group,
                    b: gy.group,
                    p_value,
                });
            }
        }
        let consistent = !pairs.is_empty()
            && pairs
                .iter()
                .all(|p| p.p_value.is_some_and(|v| v > DIFFERENCE_P));
        let verdict = if consistent {
            CalibrationVerdict::FairCalibratedDifference
        } else {
            CalibrationVerdict::BiasedCalibrated
        };
        (verdict, Some(pairs))
    };

    Ok(CalibrationReport {
        time: t,
        bins,
        per_group,
        empty_groups,
        verdict,
        difference_p,
    })
}
