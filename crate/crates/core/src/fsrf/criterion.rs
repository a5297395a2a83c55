use serde::{Deserialize, Serialize};

use crate::data::{FeatureValue, Outcome, SurvivalRecord};
use crate::error::{domain, Error, Result};
use crate::fairness::{concordance_imparity, GroupPartition};
use crate::survstats::{logrank_statistic, nelson_aalen};

/// Fair survival difference `log|sd| − log ci`.
///
/// A split with no imparity scores `+∞`; otherwise a split with no survival
/// separation scores `−∞`.
pub fn fsd(sd: f64, ci: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&ci) {
        return Err(domain(format!("imparity must lie in [0, 1], got {ci}")));
    }
    if !sd.is_finite() {
        return Err(domain(format!("survival difference must be finite, got {sd}")));
    }
    if ci == 0.0 {
        Ok(f64::INFINITY)
    } else if sd == 0.0 {
        Ok(f64::NEG_INFINITY)
    } else {
        Ok(sd.abs().ln() - ci.ln())
    }
}

/// Nelson–Aalen cumulative hazard of the node at its last event time.
pub fn node_risk<O: Outcome>(records: &[O]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::EmptyInput("node has no records"));
    }
    Ok(nelson_aalen(records)?.final_value())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitRule {
    /// Left when the value is `<=` the threshold.
    Threshold(f64),
    /// Left when the category code matches; everything else goes right.
    Category(u32),
}

impl SplitRule {
    #[inline]
    pub fn goes_left(&self, value: f64) -> bool {
        match *self {
            SplitRule::Threshold(t) => value <= t,
            SplitRule::Category(c) => value == f64::from(c),
        }
    }

    pub fn goes_left_value(&self, value: FeatureValue) -> bool {
        self.goes_left(value.as_f64())
    }

    pub(crate) fn order_key(&self) -> f64 {
        match *self {
            SplitRule::Threshold(t) => t,
            SplitRule::Category(c) => f64::from(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitCandidate {
    pub attribute: usize,
    pub rule: SplitRule,
    /// Magnitude of the logrank statistic between the children.
    pub sd: f64,
    /// Imparity of the two-risk assignment over the parent; `None` when the
    /// criterion does not use it.
    pub ci: Option<f64>,
    /// Split score: the fair survival difference, or `log|SD|` without the CI term.
    pub fsd: f64,
    pub n_left: usize,
    pub n_right: usize,
}

impl SplitCandidate {
    /// Strict preference: higher score, then lower CI, then larger SD.
    /// Equal keys fall back to enumeration order (attribute, then threshold).
    pub(crate) fn beats(&self, other: &SplitCandidate) -> bool {
        if self.fsd != other.fsd {
            return self.fsd > other.fsd;
        }
        let (a, b) = (self.ci.unwrap_or(0.0), other.ci.unwrap_or(0.0));
        if a != b {
            return a < b;
        }
        if self.sd != other.sd {
            return self.sd > other.sd;
        }
        (self.attribute, self.rule.order_key()) < (other.attribute, other.rule.order_key())
    }
}

/// Scores one candidate split of `parent` by direct evaluation.
///
/// The children's node risks become every parent record's risk score, and CI
/// is the imparity of that assignment over the parent under `partition`. A
/// parent with no permissible pairs counts as CI = 0.
pub fn score_split(
    parent: &[SurvivalRecord],
    attribute: usize,
    rule: SplitRule,
    partition: &GroupPartition,
    min_leaf: usize,
) -> Result<SplitCandidate> {
    partition.check_len(parent.len())?;
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut goes_left = Vec::with_capacity(parent.len());
    for r in parent {
        let v = r
            .features
            .get(attribute)
            .ok_or_else(|| Error::Schema(format!("record has no feature {attribute}")))?;
        let l = rule.goes_left_value(*v);
        goes_left.push(l);
        if l {
            left.push(r);
        } else {
            right.push(r);
        }
    }
    if left.len() < min_leaf.max(1) || right.len() < min_leaf.max(1) {
        return Err(domain("split violates the minimum leaf size"));
    }
    let sd = logrank_statistic(&left, &right)?.abs();
    let (risk_l, risk_r) = (node_risk(&left)?, node_risk(&right)?);
    let risks: Vec<f64> = goes_left
        .iter()
        .map(|&l| if l { risk_l } else { risk_r })
        .collect();
    let ci = match concordance_imparity(parent, &risks, partition) {
        Ok(res) => res.ci,
        Err(Error::NoComparablePairs) => 0.0,
        Err(e) => return Err(e),
    };
    Ok(SplitCandidate {
        attribute,
        rule,
        sd,
        ci: Some(ci),
        fsd: fsd(sd, ci)?,
        n_left: left.len(),
        n_right: right.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::SurvivalRecord;

    #[test]
    fn fsd_branches() {
        assert_eq!(fsd(3.0, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(fsd(0.0, 0.0).unwrap(), f64::INFINITY);
        assert!((fsd(std::f64::consts::E, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fsd(0.0, 0.2).unwrap(), f64::NEG_INFINITY);
        assert!((fsd(-2.0, 0.5).unwrap() - (2.0f64.ln() - 0.5f64.ln())).abs() < 1e-15);
        assert!(fsd(1.0, 1.5).is_err());
        assert!(fsd(1.0, -0.1).is_err());
    }

    #[test]
    fn node_risk_values() {
        assert_eq!(node_risk(&[(1.0, false), (3.0, false)]).unwrap(), 0.0);
        assert!((node_risk(&[(1.0, true), (2.0, false), (3.0, true)]).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(node_risk(&[(2.0, true)]).unwrap(), 1.0);
        let none: [(f64, bool); 0] = [];
        assert!(matches!(node_risk(&none), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn rule_routing() {
        assert!(SplitRule::Threshold(1.5).goes_left(1.5));
        assert!(!SplitRule::Threshold(1.5).goes_left(1.6));
        assert!(SplitRule::Category(2).goes_left(2.0));
        assert!(!SplitRule::Category(2).goes_left(1.0));
    }

    fn rec(x: f64, t: f64, e: bool) -> SurvivalRecord {
        SurvivalRecord::bare(t, e).with_features(vec![FeatureValue::Numeric(x)])
    }

    #[test]
    fn identical_children_have_no_separation() {
        // mirror-image children: same outcomes on both sides
        let parent: Vec<SurvivalRecord> = [(1.0, true), (2.0, false), (3.0, true)]
            .iter()
            .flat_map(|&(t, e)| [rec(0.0, t, e), rec(1.0, t, e)])
            .collect();
        let groups = GroupPartition::from_indices(vec![0, 1, 1, 0, 0, 1], 2).unwrap();
        let c = score_split(&parent, 0, SplitRule::Threshold(0.5), &groups, 1).unwrap();
        assert!(c.sd.abs() < 1e-12);
    }

    #[test]
    fn rejects_small_children() {
        let parent = vec![rec(0.0, 1.0, true), rec(1.0, 2.0, true), rec(2.0, 3.0, true)];
        let groups = GroupPartition::single(3);
        assert!(score_split(&parent, 0, SplitRule::Threshold(0.5), &groups, 2).is_err());
        assert!(score_split(&parent, 0, SplitRule::Threshold(5.0), &groups, 1).is_err());
    }
}
