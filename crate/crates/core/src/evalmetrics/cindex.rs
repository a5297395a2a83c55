use rayon::prelude::*;

use crate::data::Outcome;
use crate::error::{domain, Error, Result};

use super::check_len;

/// Harrell's C over comparable pairs: the shorter time is an event. Pairs with
/// equal observed times are not comparable; tied risks count one half.
pub fn harrell_c_index<O: Outcome + Sync>(records: &[O], risks: &[f64]) -> Result<f64> {
    check_len(records.len(), risks)?;
    if risks.iter().any(|r| !r.is_finite()) {
        return Err(domain("risk scores must be finite"));
    }
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| records[a].time().total_cmp(&records[b].time()));
    let times: Vec<f64> = order.iter().map(|&i| records[i].time()).collect();
    let events: Vec<bool> = order.iter().map(|&i| records[i].event()).collect();
    let r: Vec<f64> = order.iter().map(|&i| risks[i]).collect();

    // integer half-credits keep the parallel sum exact
    let (pairs, halves) = (0..times.len())
        .into_par_iter()
        .filter(|&i| events[i])
        .map(|i| {
            let start = times.partition_point(|&t| t <= times[i]);
            let mut h = 0u64;
            for j in start..times.len() {
                h += if r[i] > r[j] {
                    2
                } else if r[i] == r[j] {
                    1
                } else {
                    0
                };
            }
            ((times.len() - start) as u64, h)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if pairs == 0 {
        return Err(Error::NoComparablePairs);
    }
    Ok(halves as f64 / (2 * pairs) as f64)
}
