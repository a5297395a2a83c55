use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{FeatureKind, SensitiveKind, SensitiveMeta};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKindName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKindName {
    Numeric,
    Categorical,
}

/// Column layout of a delimited survival file.
///
/// ```toml
/// delimiter = ","
/// time_column = "week"
/// event_column = "arrest"
/// event_value = "1"
/// sensitive_column = "race"
/// sensitive_kind = "categorical"
/// deprived_value = "black"
///
/// [[features]]
/// name = "age"
/// kind = "numeric"
/// ```
///
/// `censored_value`, when set, makes any event cell other than the two
/// declared values a parse error. A continuous sensitive attribute may carry a
/// fixed `sensitive_threshold`; without one it is discretized at training time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSchema {
    #[serde(default = "default_delimiter")]
    pub delimiter: String,
    pub time_column: String,
    pub event_column: String,
    #[serde(default = "default_event_value")]
    pub event_value: String,
    #[serde(default)]
    pub censored_value: Option<String>,
    pub sensitive_column: String,
    #[serde(default = "default_sensitive_kind")]
    pub sensitive_kind: SensitiveKind,
    #[serde(default)]
    pub deprived_value: Option<String>,
    #[serde(default)]
    pub sensitive_threshold: Option<f64>,
    pub features: Vec<FeatureSpec>,
}

fn default_delimiter() -> String {
    ",".into()
}

fn default_event_value() -> String {
    "1".into()
}

fn default_sensitive_kind() -> SensitiveKind {
    SensitiveKind::Categorical
}

pub const BUNDLED_SCHEMAS: [&str; 4] = ["support", "rossi", "compas", "kkbox"];

/// One of the schemas shipped with the crate, by dataset name.
pub fn bundled_schema(name: &str) -> Result<DatasetSchema> {
    let text = match name.to_ascii_lowercase().as_str() {
        "support" => include_str!("../../schemas/support.toml"),
        "rossi" => include_str!("../../schemas/rossi.toml"),
        "compas" => include_str!("../../schemas/compas.toml"),
        "kkbox" => include_str!("../../schemas/kkbox.toml"),
        other => return Err(Error::Schema(format!("no bundled schema named '{other}'"))),
    };
    DatasetSchema::from_toml(text)
}

impl DatasetSchema {
    pub fn from_toml(text: &str) -> Result<Self> {
        let schema: DatasetSchema =
            toml::from_str(text).map_err(|e| Error::Schema(format!("invalid schema: {e}")))?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Schema(format!("cannot read schema {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn delimiter_byte(&self) -> Result<u8> {
        match self.delimiter.as_str() {
            "\\t" | "tab" => Ok(b'\t'),
            d if d.len() == 1 => Ok(d.as_bytes()[0]),
            d => Err(Error::Schema(format!("delimiter must be one byte, got '{d}'"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.delimiter_byte()?;
        let (t, e, s) = (&self.time_column, &self.event_column, &self.sensitive_column);
        if t == e || t == s || e == s {
            return Err(Error::Schema(
                "time, event and sensitive columns must be distinct".into(),
            ));
        }
        for (i, f) in self.features.iter().enumerate() {
            if &f.name == t || &f.name == e {
                return Err(Error::Schema(format!(
                    "feature '{}' duplicates the time or event column",
                    f.name
                )));
            }
            if self.features[..i].iter().any(|g| g.name == f.name) {
                return Err(Error::Schema(format!("feature '{}' listed twice", f.name)));
            }
        }
        if self.features.is_empty() {
            return Err(Error::Schema("schema declares no features".into()));
        }
        match self.sensitive_kind {
            SensitiveKind::Categorical if self.sensitive_threshold.is_some() => Err(Error::Schema(
                "sensitive_threshold only applies to a continuous sensitive attribute".into(),
            )),
            SensitiveKind::Continuous if self.deprived_value.is_some() => Err(Error::Schema(
                "deprived_value only applies to a categorical sensitive attribute".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn sensitive_meta(&self) -> SensitiveMeta {
        SensitiveMeta {
            column: self.sensitive_column.clone(),
            kind: self.sensitive_kind,
            deprived_value: self.deprived_value.clone(),
            threshold: self.sensitive_threshold,
        }
    }

    /// Token written for censored records.
    pub(crate) fn censored_token(&self) -> String {
        self.censored_value.clone().unwrap_or_else(|| {
            if self.event_value == "0" { "1" } else { "0" }.to_string()
        })
    }

    pub(crate) fn parse_event(&self, cell: &str) -> std::result::Result<bool, String> {
        if same_token(cell, &self.event_value) {
            return Ok(true);
        }
        match &self.censored_value {
            Some(c) if !same_token(cell, c) => Err(format!(
                "event value '{cell}' is neither '{}' nor '{c}'",
                self.event_value
            )),
            _ => Ok(false),
        }
    }
}

/// Equal as text, or as numbers when both sides parse ("1" matches "1.0").
fn same_token(a: &str, b: &str) -> bool {
    a == b
        || matches!((a.parse::<f64>(), b.parse::<f64>()), (Ok(x), Ok(y)) if x == y)
}

impl From<FeatureKindName> for FeatureKind {
    fn from(k: FeatureKindName) -> Self {
        match k {
            FeatureKindName::Numeric => FeatureKind::Numeric,
            FeatureKindName::Categorical => FeatureKind::Categorical { labels: Vec::new() },
        }
    }
}
