use serde::{Deserialize, Serialize};

use crate::data::Outcome;
use crate::error::{domain, Error, Result};
use crate::survstats::{kaplan_meier, StepFunction};

use super::check_len;

/// Kaplan–Meier estimate of the censoring survival `G`, with the event
/// indicator flipped.
pub fn censoring_survival<O: Outcome>(records: &[O]) -> Result<StepFunction> {
    let flipped: Vec<(f64, bool)> = records.iter().map(|r| (r.time(), !r.event())).collect();
    kaplan_meier(&flipped)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrierScore {
    pub score: f64,
    /// Records averaged over, censored-before-`t` ones included at weight 0.
    pub used: usize,
    /// Records dropped because their censoring weight was zero.
    pub dropped: usize,
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(domain(format!("evaluation time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// IPCW Brier score of predicted survival probabilities at `t`.
pub fn brier_score<O: Outcome>(records: &[O], predicted_survival: &[f64], t: f64) -> Result<f64> {
    brier_score_detail(records, predicted_survival, t).map(|b| b.score)
}

pub fn brier_score_detail<O: Outcome>(
    records: &[O],
    predicted_survival: &[f64],
    t: f64,
) -> Result<BrierScore> {
    check_len(records.len(), predicted_survival)?;
    check_time(t)?;
    if predicted_survival.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(domain("predicted survival probabilities must lie in [0, 1]"));
    }
    let g = censoring_survival(records)?;
    let g_t = g.eval(t);
    let mut sum = 0.0;
    let mut used = 0;
    let mut dropped = 0;
    for (r, &s) in records.iter().zip(predicted_survival) {
        let (term, weight) = if r.time() <= t && r.event() {
            (s * s, g.eval_left(r.time()))
        } else if r.time() > t {
            ((1.0 - s) * (1.0 - s), g_t)
        } else {
            used += 1;
            continue;
        };
        if weight <= 0.0 {
            dropped += 1;
            continue;
        }
        used += 1;
        sum += term / weight;
    }
    if used == 0 {
        return Err(Error::NotEstimable(format!("no usable records for the Brier score at t = {t}")));
    }
    Ok(BrierScore {
        score: sum / used as f64,
        used,
        dropped,
    })
}

/// Records ordered by risk, with the censoring curve, reused across times.
struct AucContext<'a, O> {
    records: &'a [O],
    risks: &'a [f64],
    by_risk: Vec<usize>,
    g: StepFunction,
}

impl<'a, O: Outcome> AucContext<'a, O> {
    fn new(records: &'a [O], risks: &'a [f64]) -> Result<Self> {
        check_len(records.len(), risks)?;
        if risks.iter().any(|r| !r.is_finite()) {
            return Err(domain("risk scores must be finite"));
        }
        let mut by_risk: Vec<usize> = (0..records.len()).collect();
        by_risk.sort_by(|&a, &b| risks[a].total_cmp(&risks[b]));
        Ok(Self {
            records,
            risks,
            by_risk,
            g: censoring_survival(records)?,
        })
    }

    fn at(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        // control risks come out sorted because `by_risk` is
        let controls: Vec<f64> = self
            .by_risk
            .iter()
            .filter(|&&i| self.records[i].time() > t)
            .map(|&i| self.risks[i])
            .collect();
        let mut num = 0.0;
        let mut den = 0.0;
        let mut cases = 0usize;
        for (r, &risk) in self.records.iter().zip(self.risks) {
            if !(r.event() && r.time() <= t) {
                continue;
            }
            let g = self.g.eval_left(r.time());
            if g <= 0.0 {
                continue;
            }
            cases += 1;
            let below = controls.partition_point(|&c| c < risk);
            let not_above = controls.partition_point(|&c| c <= risk);
            num += (below as f64 + 0.5 * (not_above - below) as f64) / g;
            den += 1.0 / g;
        }
        if cases == 0 || controls.is_empty() {
            return Err(Error::NotEstimable(format!(
                "time-dependent AUC at t = {t} needs at least one case and one control"
            )));
        }
        Ok(num / (den * controls.len() as f64))
    }
}

/// Cumulative/dynamic AUC at `t`: cases are events at or before `t`
/// weighted by `1/G(T⁻)`, controls are records still at risk after `t`.
pub fn time_dependent_auc<O: Outcome>(records: &[O], risks: &[f64], t: f64) -> Result<f64> {
    AucContext::new(records, risks)?.at(t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdAucGrid {
    pub mean: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Mean time-dependent AUC over the distinct event times between the 10th and
/// 90th percentiles of the observed event times. Times where the AUC is not
/// estimable are left out of the grid.
pub fn td_auc_grid<O: Outcome>(records: &[O], risks: &[f64]) -> Result<TdAucGrid> {
    let ctx = AucContext::new(records, risks)?;
    let mut event_times: Vec<f64> = records.iter().filter(|r| r.event()).map(|r| r.time()).collect();
    if event_times.is_empty() {
        return Err(Error::NoEvents);
    }
    event_times.sort_by(f64::total_cmp);
    let (lo, hi) = (quantile(&event_times, 0.1), quantile(&event_times, 0.9));
    event_times.dedup();
    let mut times = Vec::new();
    let mut values = Vec::new();
    for &t in event_times.iter().filter(|&&t| t >= lo && t <= hi) {
        match ctx.at(t) {
            Ok(v) => {
                times.push(t);
                values.push(v);
            }
            Err(Error::NotEstimable(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if values.is_empty() {
        return Err(Error::NotEstimable("no time in the AUC grid is estimable".into()));
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(TdAucGrid { mean, times, values })
}
