use crate::error::{Error, Result};

use super::normal_sf;

/// Two-sided Wilcoxon signed-rank p-value for paired samples.
///
/// Zero differences are dropped, tied magnitudes share their average rank, and
/// the normal approximation uses the tie-corrected variance with a continuity
/// correction of 0.5. All-zero differences give 1.0.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape {
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyInput("wilcoxon needs at least one pair"));
    }
    let mut diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(crate::error::domain("non-finite paired difference"));
    }
    if diffs.is_empty() {
        return Ok(1.0);
    }
    diffs.sort_by(|x, y| x.abs().total_cmp(&y.abs()));

    let n = diffs.len();
    let mut w_plus = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && diffs[j + 1].abs() == diffs[i].abs() {
            j += 1;
        }
        // ranks i+1 ..= j+1 share their mean
        let avg_rank = (i + j + 2) as f64 / 2.0;
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        w_plus += avg_rank * diffs[i..=j].iter().filter(|d| **d > 0.0).count() as f64;
        i = j + 1;
    }

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    if !(var > 0.0) {
        return Ok(1.0);
    }
    let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    Ok((2.0 * normal_sf(z)).min(1.0))
}
