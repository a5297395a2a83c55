use crate::data::Outcome;
use crate::error::{Error, Result};

use super::CompensatedSum;

/// Pooled two-sample summary over the distinct event times of a sample that is
/// already sorted by ascending time.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TwoSample {
    /// Σ (O_j − E_j) for side A.
    pub observed_minus_expected: f64,
    /// Σ V_j (hypergeometric variance).
    pub variance: f64,
    /// Nelson–Aalen cumulative hazard of side A at its last event time.
    pub hazard_a: f64,
    /// Same for side B.
    pub hazard_b: f64,
}

impl TwoSample {
    pub(crate) fn statistic(&self) -> Result<f64> {
        if !(self.variance > 0.0) {
            return Err(Error::DegenerateVariance);
        }
        Ok(self.observed_minus_expected / self.variance.sqrt())
    }
}

/// One pass over `(time, event, in_a)` triples sorted by ascending time.
pub(crate) fn two_sample_pass<I>(sorted: I, n_a: usize, n_b: usize) -> TwoSample
where
    I: IntoIterator<Item = (f64, bool, bool)>,
{
    let mut o_minus_e = CompensatedSum::default();
    let mut var = CompensatedSum::default();
    let mut hazard_a = 0.0;
    let mut hazard_b = 0.0;

    // at-risk counts shrink as we walk forward
    let mut at_risk_a = n_a;
    let mut at_risk_b = n_b;

    let mut iter = sorted.into_iter().peekable();
    while let Some((t, event, in_a)) = iter.next() {
        let (mut d_a, mut d_b, mut left_a, mut left_b) = (0usize, 0usize, 0usize, 0usize);
        let mut tally = |event: bool, in_a: bool| {
            if in_a {
                left_a += 1;
                d_a += usize::from(event);
            } else {
                left_b += 1;
                d_b += usize::from(event);
            }
        };
        tally(event, in_a);
        while let Some(&(t2, e2, a2)) = iter.peek() {
            if t2 != t {
                break;
            }
            tally(e2, a2);
            iter.next();
        }

        let d = d_a + d_b;
        if d > 0 {
            let n = (at_risk_a + at_risk_b) as f64;
            let na = at_risk_a as f64;
            let nb = at_risk_b as f64;
            let df = d as f64;
            // d_a − d·n_a/n, written so swapping the sides negates it exactly
            o_minus_e.add((d_a as f64 * nb - d_b as f64 * na) / n);
            if n > 1.0 {
                var.add(na * nb * df * (n - df) / (n * n * (n - 1.0)));
            }
            if d_a > 0 {
                hazard_a += d_a as f64 / na;
            }
            if d_b > 0 {
                hazard_b += d_b as f64 / nb;
            }
        }
        at_risk_a -= left_a;
        at_risk_b -= left_b;
    }

    TwoSample {
        observed_minus_expected: o_minus_e.value(),
        variance: var.value(),
        hazard_a,
        hazard_b,
    }
}

/// Standardized two-sample logrank statistic Σ(O−E)/√ΣV for `group_a`.
///
/// Positive values mean `group_a` has more events than expected under a
/// common hazard.
pub fn logrank_statistic<O: Outcome>(group_a: &[O], group_b: &[O]) -> Result<f64> {
    if group_a.is_empty() || group_b.is_empty() {
        return Err(Error::EmptyInput("logrank needs two non-empty groups"));
    }
    let mut pooled: Vec<(f64, bool, bool)> = group_a
        .iter()
        .map(|r| (r.time(), r.event(), true))
        .chain(group_b.iter().map(|r| (r.time(), r.event(), false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    two_sample_pass(pooled, group_a.len(), group_b.len()).statistic()
}
