//! Censored observations and the dataset container shared by every module.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Anything that carries an observed time and an event flag.
pub trait Outcome {
    fn time(&self) -> f64;
    fn event(&self) -> bool;
}

impl Outcome for (f64, bool) {
    fn time(&self) -> f64 {
        self.0
    }
    fn event(&self) -> bool {
        self.1
    }
}

impl<T: Outcome> Outcome for &T {
    fn time(&self) -> f64 {
        (**self).time()
    }
    fn event(&self) -> bool {
        (**self).event()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FeatureValue {
    Numeric(f64),
    /// Dictionary code into the column's sorted label list.
    Category(u32),
}

impl FeatureValue {
    pub fn as_f64(self) -> f64 {
        match self {
            FeatureValue::Numeric(v) => v,
            FeatureValue::Category(c) => f64::from(c),
        }
    }
}

/// Raw value of the sensitive attribute before it is mapped to a group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SensitiveValue {
    Label(String),
    Value(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalRecord {
    pub features: Vec<FeatureValue>,
    pub time: f64,
    pub event: bool,
    pub group_raw: SensitiveValue,
}

impl SurvivalRecord {
    pub fn new(
        features: Vec<FeatureValue>,
        time: f64,
        event: bool,
        group_raw: SensitiveValue,
    ) -> Result<Self> {
        if !time.is_finite() || time < 0.0 {
            return Err(domain(format!("observed time must be finite and >= 0, got {time}")));
        }
        Ok(Self {
            features,
            time,
            event,
            group_raw,
        })
    }

    /// A record with no features and an empty group label; handy for estimator inputs.
    pub fn bare(time: f64, event: bool) -> Self {
        Self {
            features: Vec::new(),
            time,
            event,
            group_raw: SensitiveValue::Label(String::new()),
        }
    }

    pub fn with_features(mut self, features: Vec<FeatureValue>) -> Self {
        self.features = features;
        self
    }

    pub fn with_group(mut self, group_raw: SensitiveValue) -> Self {
        self.group_raw = group_raw;
        self
    }
}

impl Outcome for SurvivalRecord {
    fn time(&self) -> f64 {
        self.time
    }
    fn event(&self) -> bool {
        self.event
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FeatureKind {
    Numeric,
    Categorical { labels: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMeta {
    pub name: String,
    pub kind: FeatureKind,
}

impl FeatureMeta {
    pub fn numeric(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: FeatureKind::Numeric,
        }
    }

    pub fn categorical(name: impl Into<String>, labels: Vec<String>) -> Self {
        Self {
            name: name.into(),
            kind: FeatureKind::Categorical { labels },
        }
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self.kind, FeatureKind::Categorical { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SensitiveKind {
    Categorical,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitiveMeta {
    pub column: String,
    pub kind: SensitiveKind,
    /// Label of the deprived group; when set, categorical attributes collapse
    /// to deprived-vs-rest.
    #[serde(default)]
    pub deprived_value: Option<String>,
    /// Binarization threshold chosen for a continuous attribute.
    #[serde(default)]
    pub threshold: Option<f64>,
}

impl SensitiveMeta {
    pub fn categorical(column: impl Into<String>) -> Self {
        Self {
            column: column.into(),
            kind: SensitiveKind::Categorical,
            deprived_value: None,
            threshold: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalDataset {
    pub records: Vec<SurvivalRecord>,
    pub feature_meta: Vec<FeatureMeta>,
    pub sensitive_meta: SensitiveMeta,
}

impl SurvivalDataset {
    /// Validates arity, feature kinds and the presence of at least one event.
    pub fn new(
        records: Vec<SurvivalRecord>,
        feature_meta: Vec<FeatureMeta>,
        sensitive_meta: SensitiveMeta,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyInput("dataset has no records"));
        }
        for (i, r) in records.iter().enumerate() {
            check_features(&r.features, &feature_meta).map_err(|e| match e {
                Error::Schema(msg) => Error::Schema(format!("record {i}: {msg}")),
                other => other,
            })?;
            if !r.time.is_finite() || r.time < 0.0 {
                return Err(domain(format!("record {i}: invalid time {}", r.time)));
            }
            match (&r.group_raw, sensitive_meta.kind) {
                (SensitiveValue::Label(_), SensitiveKind::Categorical)
                | (SensitiveValue::Value(_), SensitiveKind::Continuous) => {}
                _ => {
                    return Err(Error::Schema(format!(
                        "record {i}: sensitive value does not match declared kind"
                    )))
                }
            }
        }
        if !records.iter().any(|r| r.event) {
            return Err(Error::NoEvents);
        }
        Ok(Self {
            records,
            feature_meta,
            sensitive_meta,
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_meta.len()
    }

    pub fn event_count(&self) -> usize {
        self.records.iter().filter(|r| r.event).count()
    }

    /// Rows selected by index, in the given order. The result may contain no
    /// events; metrics downstream report that as not estimable.
    pub fn subset(&self, indices: &[usize]) -> SurvivalDataset {
        SurvivalDataset {
            records: indices.iter().map(|&i| self.records[i].clone()).collect(),
            feature_meta: self.feature_meta.clone(),
            sensitive_meta: self.sensitive_meta.clone(),
        }
    }
}

/// Checks a feature vector against column metadata.
pub fn check_features(features: &[FeatureValue], meta: &[FeatureMeta]) -> Result<()> {
    if features.len() != meta.len() {
        return Err(Error::Schema(format!(
            "expected {} features, got {}",
            meta.len(),
            features.len()
        )));
    }
    for (value, m) in features.iter().zip(meta) {
        match (value, &m.kind) {
            (FeatureValue::Numeric(v), FeatureKind::Numeric) if v.is_finite() => {}
            (FeatureValue::Category(c), FeatureKind::Categorical { labels })
                if (*c as usize) < labels.len() => {}
            _ => {
                return Err(Error::Schema(format!(
                    "feature '{}' has a value of the wrong kind",
                    m.name
                )))
            }
        }
    }
    Ok(())
}
