use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Outcome;
use crate::error::{domain, Error, Result};

use super::GroupPartition;

/// Concordance credit for a permissible pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Increment {
    Zero,
    Half,
    One,
}

impl Increment {
    fn from_halves(h: u8) -> Self {
        match h {
            0 => Increment::Zero,
            1 => Increment::Half,
            _ => Increment::One,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Increment::Zero => 0.0,
            Increment::Half => 0.5,
            Increment::One => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairOutcome {
    Omitted,
    Permissible(Increment),
}

/// Credit in half-units for an ordered permissible pair `(i, j)`, one entry
/// per risk ordering: `[r_i > r_j, r_i == r_j, r_i < r_j]`. `None` when the
/// pair is not comparable under censoring.
#[inline]
pub(crate) fn pair_halves(t_i: f64, e_i: bool, t_j: f64, e_j: bool) -> Option<[u8; 3]> {
    if t_i < t_j {
        e_i.then_some([2, 1, 0])
    } else if t_j < t_i {
        e_j.then_some([0, 1, 2])
    } else {
        match (e_i, e_j) {
            (true, true) => Some([1, 2, 1]),
            (false, true) => Some([1, 1, 2]),
            (true, false) => Some([2, 1, 1]),
            (false, false) => None,
        }
    }
}

#[inline]
pub(crate) fn ordering_slot(r_i: f64, r_j: f64) -> usize {
    if r_i > r_j {
        0
    } else if r_i == r_j {
        1
    } else {
        2
    }
}

/// Decides whether the ordered pair `(i, j)` is permissible and, if so, how
/// much concordance credit record `i`'s group earns. Higher risk means an
/// earlier expected event.
pub fn classify_pair<O: Outcome>(rec_i: &O, rec_j: &O, r_i: f64, r_j: f64) -> Result<PairOutcome> {
    if !r_i.is_finite() || !r_j.is_finite() {
        return Err(domain("risk scores must be finite"));
    }
    Ok(
        match pair_halves(rec_i.time(), rec_i.event(), rec_j.time(), rec_j.event()) {
            None => PairOutcome::Omitted,
            Some(h) => PairOutcome::Permissible(Increment::from_halves(h[ordering_slot(r_i, r_j)])),
        },
    )
}

/// Per-group permissible pair counts and concordance credit. Credit is kept
/// in half-units so tallies merge exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcordanceTally {
    pub permissible: Vec<u64>,
    concordant_halves: Vec<u64>,
}

impl ConcordanceTally {
    pub fn zeros(k: usize) -> Self {
        Self {
            permissible: vec![0; k],
            concordant_halves: vec![0; k],
        }
    }

    pub(crate) fn from_halves(permissible: Vec<u64>, concordant_halves: Vec<u64>) -> Self {
        Self {
            permissible,
            concordant_halves,
        }
    }

    pub fn k(&self) -> usize {
        self.permissible.len()
    }

    /// Weighted concordant count `C_g`.
    pub fn concordant(&self, g: usize) -> f64 {
        self.concordant_halves[g] as f64 / 2.0
    }

    pub fn concordant_halves(&self) -> &[u64] {
        &self.concordant_halves
    }

    pub fn merge(mut self, other: &ConcordanceTally) -> Self {
        for g in 0..self.k() {
            self.permissible[g] += other.permissible[g];
            self.concordant_halves[g] += other.concordant_halves[g];
        }
        self
    }

    /// Concordance fraction per group, `None` where the group has no pairs.
    pub fn fractions(&self) -> Vec<Option<f64>> {
        (0..self.k())
            .map(|g| {
                (self.permissible[g] > 0)
                    .then(|| self.concordant_halves[g] as f64 / (2.0 * self.permissible[g] as f64))
            })
            .collect()
    }

    /// Largest gap between concordance fractions of groups that have pairs.
    pub fn imparity(&self) -> Result<f64> {
        let cf: Vec<f64> = self.fractions().into_iter().flatten().collect();
        if cf.is_empty() {
            return Err(Error::NoComparablePairs);
        }
        let hi = cf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = cf.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(hi - lo)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImparityResult {
    pub ci: f64,
    /// Concordance fraction per group; `None` for groups without permissible pairs.
    pub cf: Vec<Option<f64>>,
    pub tally: ConcordanceTally,
}

impl ImparityResult {
    /// Groups left out of the maximum because they had no permissible pairs.
    pub fn excluded_groups(&self) -> Vec<usize> {
        self.cf
            .iter()
            .enumerate()
            .filter_map(|(g, cf)| cf.is_none().then_some(g))
            .collect()
    }
}

struct PairInputs<'a> {
    times: Vec<f64>,
    events: Vec<bool>,
    risks: &'a [f64],
    groups: &'a [usize],
    k: usize,
}

impl<'a> PairInputs<'a> {
    fn new<O: Outcome>(records: &[O], risks: &'a [f64], partition: &'a GroupPartition) -> Result<Self> {
        if risks.len() != records.len() {
            return Err(Error::Shape {
                expected: records.len(),
                actual: risks.len(),
            });
        }
        partition.check_len(records.len())?;
        if risks.iter().any(|r| !r.is_finite()) {
            return Err(domain("risk scores must be finite"));
        }
        Ok(Self {
            times: records.iter().map(|r| r.time()).collect(),
            events: records.iter().map(|r| r.event()).collect(),
            risks,
            groups: partition.group_of(),
            k: partition.k(),
        })
    }

    fn sweep_rows(&self, rows: std::ops::Range<usize>) -> ConcordanceTally {
        let n = self.times.len();
        let mut perm = vec![0u64; self.k];
        let mut conc = vec![0u64; self.k];
        for i in rows {
            let (t_i, e_i, r_i) = (self.times[i], self.events[i], self.risks[i]);
            let (mut p, mut c) = (0u64, 0u64);
            for j in 0..n {
                if j == i {
                    continue;
                }
                if let Some(h) = pair_halves(t_i, e_i, self.times[j], self.events[j]) {
                    p += 1;
                    c += u64::from(h[ordering_slot(r_i, self.risks[j])]);
                }
            }
            let g = self.groups[i];
            perm[g] += p;
            conc[g] += c;
        }
        ConcordanceTally::from_halves(perm, conc)
    }

    fn finish(&self, tally: ConcordanceTally) -> Result<ImparityResult> {
        let ci = if self.k < 2 {
            // a single group has nothing to deviate from, but must still have pairs
            tally.imparity().map(|_| 0.0)?
        } else {
            tally.imparity()?
        };
        Ok(ImparityResult {
            ci,
            cf: tally.fractions(),
            tally,
        })
    }
}

/// Concordance imparity: the largest difference in per-group concordance
/// fractions over all ordered permissible pairs, each pair credited to the
/// group of its first record.
///
/// Groups with no permissible pairs are left out of the maximum; when no group
/// has any, the metric is undefined.
pub fn concordance_imparity<O: Outcome>(
    records: &[O],
    risks: &[f64],
    partition: &GroupPartition,
) -> Result<ImparityResult> {
    let inputs = PairInputs::new(records, risks, partition)?;
    let tally = inputs.sweep_rows(0..records.len());
    inputs.finish(tally)
}

const ROW_CHUNK: usize = 64;

/// Same result as [`concordance_imparity`], with the outer loop split into
/// row blocks on the current rayon pool. Tallies are integers, so the merge is
/// exact regardless of thread count.
pub fn concordance_imparity_par<O: Outcome>(
    records: &[O],
    risks: &[f64],
    partition: &GroupPartition,
) -> Result<ImparityResult> {
    let inputs = PairInputs::new(records, risks, partition)?;
    let n = records.len();
    let blocks: Vec<usize> = (0..n).step_by(ROW_CHUNK).collect();
    let tally = blocks
        .par_iter()
        .map(|&start| inputs.sweep_rows(start..(start + ROW_CHUNK).min(n)))
        .reduce(|| ConcordanceTally::zeros(inputs.k), |a, b| a.merge(&b));
    inputs.finish(tally)
}
