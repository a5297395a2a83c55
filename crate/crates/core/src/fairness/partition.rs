use serde::{Deserialize, Serialize};

use crate::data::{SensitiveKind, SensitiveValue, SurvivalDataset};
use crate::error::{Error, Result};

/// Assignment of records to sensitive groups `0..k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupPartition {
    group_of: Vec<usize>,
    labels: Vec<String>,
    threshold: Option<f64>,
}

/// How raw sensitive values map to group indices; stored with a trained model
/// so evaluation data is partitioned the same way.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupRule {
    /// Group index is the position of the label in `labels`.
    Labels { labels: Vec<String> },
    /// Group 0 is the deprived value, group 1 everything else.
    Deprived { value: String },
    /// Group 0 is `value <= threshold`, group 1 the rest.
    Threshold { threshold: f64 },
}

impl GroupRule {
    /// Derives the rule from a dataset's sensitive metadata. Continuous
    /// attributes need a threshold already set in the metadata.
    pub fn from_dataset(dataset: &SurvivalDataset) -> Result<Self> {
        let meta = &dataset.sensitive_meta;
        match meta.kind {
            SensitiveKind::Categorical => {
                if let Some(v) = &meta.deprived_value {
                    return Ok(GroupRule::Deprived { value: v.clone() });
                }
                let mut labels: Vec<String> = dataset
                    .records
                    .iter()
                    .filter_map(|r| match &r.group_raw {
                        SensitiveValue::Label(l) => Some(l.clone()),
                        SensitiveValue::Value(_) => None,
                    })
                    .collect();
                labels.sort();
                labels.dedup();
                Ok(GroupRule::Labels { labels })
            }
            SensitiveKind::Continuous => meta
                .threshold
                .map(|threshold| GroupRule::Threshold { threshold })
                .ok_or_else(|| {
                    Error::Schema(format!(
                        "continuous sensitive attribute '{}' has no threshold; discretize it first",
                        meta.column
                    ))
                }),
        }
    }

    /// Like [`GroupRule::from_dataset`], except that a continuous attribute
    /// without a threshold is discretized on `dataset` first.
    pub fn fit(dataset: &SurvivalDataset) -> Result<Self> {
        let meta = &dataset.sensitive_meta;
        if meta.kind == SensitiveKind::Continuous && meta.threshold.is_none() {
            let values: Vec<f64> = dataset
                .records
                .iter()
                .map(|r| match r.group_raw {
                    SensitiveValue::Value(v) => Ok(v),
                    SensitiveValue::Label(_) => Err(Error::Schema(
                        "continuous sensitive attribute holds a label".into(),
                    )),
                })
                .collect::<Result<_>>()?;
            let threshold = super::discretize_sensitive(&values, &dataset.records)?;
            return Ok(GroupRule::Threshold { threshold });
        }
        Self::from_dataset(dataset)
    }

    pub fn labels(&self) -> Vec<String> {
        match self {
            GroupRule::Labels { labels } => labels.clone(),
            GroupRule::Deprived { value } => vec![value.clone(), format!("not {value}")],
            GroupRule::Threshold { threshold } => {
                vec![format!("<= {threshold}"), format!("> {threshold}")]
            }
        }
    }

    pub fn group_of(&self, value: &SensitiveValue) -> Result<usize> {
        match (self, value) {
            (GroupRule::Labels { labels }, SensitiveValue::Label(l)) => labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| Error::Schema(format!("unknown sensitive label '{l}'"))),
            (GroupRule::Deprived { value }, SensitiveValue::Label(l)) => {
                Ok(usize::from(l != value))
            }
            (GroupRule::Threshold { threshold }, SensitiveValue::Value(v)) => {
                Ok(usize::from(*v > *threshold))
            }
            _ => Err(Error::Schema(
                "sensitive value kind does not match the grouping rule".into(),
            )),
        }
    }

    pub fn partition(&self, dataset: &SurvivalDataset) -> Result<GroupPartition> {
        let group_of = dataset
            .records
            .iter()
            .map(|r| self.group_of(&r.group_raw))
            .collect::<Result<Vec<_>>>()?;
        let threshold = match self {
            GroupRule::Threshold { threshold } => Some(*threshold),
            _ => None,
        };
        GroupPartition::new(group_of, self.labels(), threshold)
    }
}

impl GroupPartition {
    pub fn new(group_of: Vec<usize>, labels: Vec<String>, threshold: Option<f64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyInput("partition needs at least one group"));
        }
        if let Some(bad) = group_of.iter().find(|&&g| g >= labels.len()) {
            return Err(crate::error::domain(format!(
                "group index {bad} out of range for {} groups",
                labels.len()
            )));
        }
        Ok(Self {
            group_of,
            labels,
            threshold,
        })
    }

    /// Builds a partition from bare indices with generated labels.
    pub fn from_indices(group_of: Vec<usize>, k: usize) -> Result<Self> {
        Self::new(group_of, (0..k).map(|g| format!("group{g}")).collect(), None)
    }

    pub fn single(n: usize) -> Self {
        Self {
            group_of: vec![0; n],
            labels: vec!["all".into()],
            threshold: None,
        }
    }

    /// Partition from the dataset's own sensitive metadata.
    pub fn from_dataset(dataset: &SurvivalDataset) -> Result<Self> {
        GroupRule::from_dataset(dataset)?.partition(dataset)
    }

    pub fn k(&self) -> usize {
        self.labels.len()
    }

    pub fn len(&self) -> usize {
        self.group_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.group_of.is_empty()
    }

    pub fn group_of(&self) -> &[usize] {
        &self.group_of
    }

    pub fn group(&self, record: usize) -> usize {
        self.group_of[record]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn threshold(&self) -> Option<f64> {
        self.threshold
    }

    /// Record indices per group.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k()];
        for (i, &g) in self.group_of.iter().enumerate() {
            out[g].push(i);
        }
        out
    }

    /// Same groups, restricted to (and reordered by) `indices`.
    pub fn restrict(&self, indices: &[usize]) -> GroupPartition {
        GroupPartition {
            group_of: indices.iter().map(|&i| self.group_of[i]).collect(),
            labels: self.labels.clone(),
            threshold: self.threshold,
        }
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.group_of.len() != n {
            return Err(Error::Shape {
                expected: n,
                actual: self.group_of.len(),
            });
        }
        Ok(())
    }
}
