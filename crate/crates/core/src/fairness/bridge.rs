use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

use super::GroupPartition;

/// AUC of one group's records against the members of one group (possibly itself).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AucPart {
    pub against: usize,
    /// Ordered comparable pairs `(i in group, j in against)`.
    pub pairs: u64,
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgroupAuc {
    pub group: usize,
    /// Intra-group part first, then one entry per other group.
    pub parts: Vec<AucPart>,
    /// Pair-count weighted combination of the parts.
    pub weighted: f64,
}

/// Subgroup AUCs for an ordinal outcome where a larger outcome should receive a
/// larger score. Pairs with equal outcomes are not comparable.
pub fn subgroup_auc(outcome: &[f64], scores: &[f64], partition: &GroupPartition) -> Result<Vec<SubgroupAuc>> {
    let n = outcome.len();
    if scores.len() != n {
        return Err(Error::Shape {
            expected: n,
            actual: scores.len(),
        });
    }
    partition.check_len(n)?;
    if scores.iter().chain(outcome).any(|v| !v.is_finite()) {
        return Err(domain("scores and outcomes must be finite"));
    }
    let k = partition.k();
    let groups = partition.group_of();
    // [group][against] -> (pairs, concordant half-units)
    let mut counts = vec![vec![(0u64, 0u64); k]; k];
    for i in 0..n {
        for j in 0..n {
            if i == j || outcome[i] == outcome[j] {
                continue;
            }
            let positive_first = outcome[i] > outcome[j];
            let halves = if scores[i] == scores[j] {
                1
            } else if (scores[i] > scores[j]) == positive_first {
                2
            } else {
                0
            };
            let c = &mut counts[groups[i]][groups[j]];
            c.0 += 1;
            c.1 += halves;
        }
    }

    let mut out = Vec::with_capacity(k);
    for g in 0..k {
        let order = std::iter::once(g).chain((0..k).filter(|&h| h != g));
        let parts: Vec<AucPart> = order
            .map(|h| {
                let (pairs, halves) = counts[g][h];
                AucPart {
                    against: h,
                    pairs,
                    auc: (pairs > 0).then(|| halves as f64 / (2.0 * pairs as f64)),
                }
            })
            .collect();
        let total: u64 = parts.iter().map(|p| p.pairs).sum();
        if total == 0 {
            return Err(Error::NoComparablePairs);
        }
        let weighted = parts
            .iter()
            .filter_map(|p| p.auc.map(|a| p.pairs as f64 * a))
            .sum::<f64>()
            / total as f64;
        out.push(SubgroupAuc {
            group: g,
            parts,
            weighted,
        });
    }
    Ok(out)
}

/// Largest gap between weighted subgroup AUCs, for an ordinal outcome.
pub fn ci_uncensored_ordinal(outcome: &[f64], scores: &[f64], partition: &GroupPartition) -> Result<f64> {
    let saucs = subgroup_auc(outcome, scores, partition)?;
    let mut ci: f64 = 0.0;
    for (x, a) in saucs.iter().enumerate() {
        for b in &saucs[x + 1..] {
            ci = ci.max((a.weighted - b.weighted).abs());
        }
    }
    Ok(ci)
}

/// Largest gap between weighted subgroup AUCs for binary labels
/// (`true` = positive, expected to score higher).
pub fn ci_uncensored(labels: &[bool], scores: &[f64], partition: &GroupPartition) -> Result<f64> {
    let outcome: Vec<f64> = labels.iter().map(|&l| f64::from(u8::from(l))).collect();
    ci_uncensored_ordinal(&outcome, scores, partition)
}
