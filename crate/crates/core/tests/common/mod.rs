//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use fairsurv::data::{SensitiveMeta, SensitiveValue, SurvivalDataset, SurvivalRecord};
use fairsurv::FeatureMeta;
use rand::Rng;

/// Straight transcription of the pairwise concordance rules, crediting each
/// ordered pair to the group of its first record. Returns `(P_g, C_g)`.
pub fn brute_force_tally(
    times: &[f64],
    events: &[bool],
    risks: &[f64],
    groups: &[usize],
    k: usize,
) -> (Vec<u64>, Vec<f64>) {
    let mut p = vec![0u64; k];
    let mut c = vec![0f64; k];
    let n = times.len();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let g = groups[i];
            let (ti, tj, ei, ej, ri, rj) = (times[i], times[j], events[i], events[j], risks[i], risks[j]);
            if ti < tj {
                if !ei {
                    continue;
                }
                p[g] += 1;
                if ri > rj {
                    c[g] += 1.0;
                } else if ri == rj {
                    c[g] += 0.5;
                }
            } else if ti > tj {
                if !ej {
                    continue;
                }
                p[g] += 1;
                if rj > ri {
                    c[g] += 1.0;
                } else if ri == rj {
                    c[g] += 0.5;
                }
            } else {
                if !ei && !ej {
                    continue;
                }
                p[g] += 1;
                if ei && ej {
                    c[g] += if ri == rj { 1.0 } else { 0.5 };
                } else if (ei && ri > rj) || (ej && rj > ri) {
                    c[g] += 1.0;
                } else {
                    c[g] += 0.5;
                }
            }
        }
    }
    (p, c)
}

/// CI from brute-force tallies; `None` when no group has a pair.
pub fn brute_force_ci(p: &[u64], c: &[f64]) -> Option<f64> {
    let cf: Vec<f64> = p
        .iter()
        .zip(c)
        .filter(|(p, _)| **p > 0)
        .map(|(p, c)| c / *p as f64)
        .collect();
    if cf.is_empty() {
        return None;
    }
    let hi = cf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = cf.iter().copied().fold(f64::INFINITY, f64::min);
    Some(hi - lo)
}

/// Exact two-sided p-value of the signed-rank statistic for distinct,
/// nonzero differences, by enumerating every sign pattern.
pub fn wilcoxon_exact(diffs: &[f64]) -> f64 {
    let n = diffs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diffs[a].abs().total_cmp(&diffs[b].abs()));
    let mut rank = vec![0u32; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r as u32 + 1;
    }
    let w_obs: u32 = (0..n).filter(|&i| diffs[i] > 0.0).map(|i| rank[i]).sum();
    let total = (n * (n + 1) / 2) as f64;
    let centre = total / 2.0;
    let dev = (w_obs as f64 - centre).abs();
    let mut extreme = 0u64;
    for mask in 0u32..(1 << n) {
        let w: u32 = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| b as u32 + 1).sum();
        if (w as f64 - centre).abs() >= dev - 1e-9 {
            extreme += 1;
        }
    }
    extreme as f64 / f64::from(1u32 << n)
}

/// Two-sample logrank statistic written out term by term.
pub fn logrank_oracle(a: &[(f64, bool)], b: &[(f64, bool)]) -> f64 {
    let mut times: Vec<f64> = a.iter().chain(b).filter(|r| r.1).map(|r| r.0).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let (mut num, mut var) = (0.0, 0.0);
    for t in times {
        let at_risk = |s: &[(f64, bool)]| s.iter().filter(|r| r.0 >= t).count() as f64;
        let dead = |s: &[(f64, bool)]| s.iter().filter(|r| r.0 == t && r.1).count() as f64;
        let (na, nb) = (at_risk(a), at_risk(b));
        let n = na + nb;
        let d = dead(a) + dead(b);
        num += dead(a) - d * na / n;
        if n > 1.0 {
            var += d * (na / n) * (1.0 - na / n) * (n - d) / (n - 1.0);
        }
    }
    num / var.sqrt()
}

/// Classical AUC: share of (positive, negative) pairs ranked correctly, ties half.
pub fn auc(pos: &[f64], neg: &[f64]) -> f64 {
    let mut s = 0.0;
    for &p in pos {
        for &q in neg {
            if p > q {
                s += 1.0;
            } else if p == q {
                s += 0.5;
            }
        }
    }
    s / (pos.len() * neg.len()) as f64
}

pub fn group_label(g: usize) -> SensitiveValue {
    SensitiveValue::Label(format!("g{g}"))
}

/// Dataset with the given outcomes, numeric features and categorical groups.
pub fn dataset(
    times: &[f64],
    events: &[bool],
    features: &[Vec<f64>],
    groups: &[usize],
) -> SurvivalDataset {
    let p = features.first().map_or(0, Vec::len);
    let records = (0..times.len())
        .map(|i| {
            SurvivalRecord::new(
                features[i].iter().map(|&v| fairsurv::FeatureValue::Numeric(v)).collect(),
                times[i],
                events[i],
                group_label(groups[i]),
            )
            .unwrap()
        })
        .collect();
    let meta = (0..p).map(|j| FeatureMeta::numeric(format!("x{j}"))).collect();
    SurvivalDataset::new(records, meta, SensitiveMeta::categorical("g")).unwrap()
}

/// Random outcomes with integer times (so ties occur) and a given censoring share.
pub fn random_outcomes<R: Rng>(rng: &mut R, n: usize, censoring: f64, max_time: u32) -> (Vec<f64>, Vec<bool>) {
    let times = (0..n).map(|_| f64::from(rng.random_range(1..=max_time))).collect();
    let events = (0..n).map(|_| !rng.random_bool(censoring)).collect();
    (times, events)
}

/// Random risks; half the time drawn from a small grid to force ties.
pub fn random_risks<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let coarse = rng.random_bool(0.5);
    (0..n)
        .map(|_| {
            if coarse {
                f64::from(rng.random_range(0..5u32))
            } else {
                rng.random::<f64>()
            }
        })
        .collect()
}

/// Distinct times: a random permutation of 1..=n.
pub fn distinct_times<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    use rand::seq::SliceRandom;
    let mut t: Vec<f64> = (1..=n).map(|v| v as f64).collect();
    t.shuffle(rng);
    t
}

/// Groups with every label in `0..k` present at least once (needs n >= k).
pub fn random_groups<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut g: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    for (i, slot) in g.iter_mut().take(k).enumerate() {
        *slot = i;
    }
    g
}
