use crate::data::Outcome;
use crate::error::{domain, Error, Result};
use crate::fsrf::fsd;
use crate::survstats::two_sample_pass;

use super::sweep::{Grouping, ImparitySweep, LEFT};

/// Picks a binarization threshold for a continuous sensitive attribute.
///
/// Candidates are midpoints between consecutive distinct values. Each one
/// splits `records` into `value <= threshold` and the rest; the split is scored
/// by the fair survival difference with both sides as the groups and each
/// side's Nelson–Aalen node risk as the risk score. The highest score wins,
/// ties going to the smaller threshold.
pub fn discretize_sensitive<O: Outcome>(values: &[f64], records: &[O]) -> Result<f64> {
    if values.len() != records.len() {
        return Err(Error::Shape {
            expected: records.len(),
            actual: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(domain("sensitive values must be finite"));
    }
    let mut by_value: Vec<usize> = (0..values.len()).collect();
    by_value.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let distinct = {
        let mut d: Vec<f64> = by_value.iter().map(|&i| values[i]).collect();
        d.dedup();
        d
    };
    if distinct.len() < 2 {
        return Err(Error::ConstantAttribute);
    }

    let times: Vec<f64> = records.iter().map(|r| r.time()).collect();
    let events: Vec<bool> = records.iter().map(|r| r.event()).collect();
    let mut by_time: Vec<usize> = (0..records.len()).collect();
    by_time.sort_by(|&a, &b| times[a].total_cmp(&times[b]));

    let mut sweep = ImparitySweep::new(&times, &events, Grouping::BySide);
    let n = records.len();
    let mut n_left = 0;
    let mut cursor = 0;
    let mut best: Option<(f64, f64)> = None;

    for w in distinct.windows(2) {
        while cursor < n && values[by_value[cursor]] <= w[0] {
            sweep.move_to(by_value[cursor], LEFT);
            cursor += 1;
            n_left += 1;
        }
        let threshold = 0.5 * (w[0] + w[1]);
        let pass = two_sample_pass(
            by_time
                .iter()
                .map(|&i| (times[i], events[i], sweep.side(i) == LEFT)),
            n_left,
            n - n_left,
        );
        let Ok(sd) = pass.statistic() else { continue };
        let Ok(ci) = sweep.tally(pass.hazard_a, pass.hazard_b).imparity() else {
            continue;
        };
        let score = fsd(sd, ci)?;
        if best.is_none_or(|(s, _)| score > s) {
            best = Some((score, threshold));
        }
    }

    best.map(|(_, t)| t)
        .ok_or_else(|| Error::NotEstimable("no threshold candidate could be scored".into()))
}
