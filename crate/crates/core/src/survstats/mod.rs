//! Nonparametric estimators for right-censored data and the tail functions
//! the fairness and calibration code relies on.

mod estimators;
mod logrank;
mod step;
mod tails;
mod wilcoxon;

pub use estimators::{kaplan_meier, nelson_aalen, survival_from_hazard};
pub use logrank::logrank_statistic;
pub(crate) use logrank::two_sample_pass;
pub use step::StepFunction;
pub use tails::{chi_square_sf, normal_sf};
pub use wilcoxon::wilcoxon_signed_rank;

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Sorted, de-duplicated event counts: `(time, events, at_risk)` per distinct
/// time that has at least one event. Records with time equal to an event time
/// are in its risk set, censored ones included.
pub(crate) fn event_table<O: crate::data::Outcome>(records: &[O]) -> Vec<(f64, usize, usize)> {
    let mut obs: Vec<(f64, bool)> = records.iter().map(|r| (r.time(), r.event())).collect();
    obs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = obs.len();
    let mut table = Vec::new();
    let mut i = 0;
    while i < n {
        let t = obs[i].0;
        let mut j = i;
        let mut d = 0;
        while j < n && obs[j].0 == t {
            d += usize::from(obs[j].1);
            j += 1;
        }
        if d > 0 {
            table.push((t, d, n - i));
        }
        i = j;
    }
    table
}
