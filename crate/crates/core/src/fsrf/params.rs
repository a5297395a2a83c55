use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitCriterion {
    /// `log|SD| − log CI`, with `+∞` for CI = 0.
    FairSurvivalDifference,
    /// `log|SD|` only: a plain logrank survival forest.
    LogrankOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Features tried per split; `None` means `ceil(sqrt(#features))`.
    pub mtry: Option<usize>,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    pub bootstrap: bool,
    pub criterion: SplitCriterion,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            mtry: None,
            min_leaf: 15,
            max_depth: None,
            bootstrap: true,
            criterion: SplitCriterion::FairSurvivalDifference,
        }
    }
}

impl ForestParams {
    /// Checks the parameters against the feature count and fills in `mtry`.
    pub fn resolve(&self, n_features: usize) -> Result<ForestParams> {
        if n_features == 0 {
            return Err(domain("forest needs at least one feature"));
        }
        if self.n_trees == 0 {
            return Err(domain("n_trees must be positive"));
        }
        if self.min_leaf == 0 {
            return Err(domain("min_leaf must be >= 1"));
        }
        let mtry = self
            .mtry
            .unwrap_or_else(|| (n_features as f64).sqrt().ceil() as usize);
        if mtry == 0 || mtry > n_features {
            return Err(domain(format!(
                "mtry must be in 1..={n_features}, got {mtry}"
            )));
        }
        Ok(ForestParams {
            mtry: Some(mtry),
            ..self.clone()
        })
    }

    pub(crate) fn mtry_or(&self, n_features: usize) -> usize {
        self.mtry
            .unwrap_or_else(|| (n_features as f64).sqrt().ceil() as usize)
            .clamp(1, n_features)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_defaults() {
        let p = ForestParams::default().resolve(10).unwrap();
        assert_eq!(p.mtry, Some(4));
        assert_eq!(p.min_leaf, 15);
        assert_eq!(p.n_trees, 100);
        assert!(p.bootstrap);
    }

    #[test]
    fn resolve_rejects_bad_values() {
        let bad = ForestParams {
            mtry: Some(5),
            ..Default::default()
        };
        assert!(bad.resolve(4).is_err());
        let bad = ForestParams {
            min_leaf: 0,
            ..Default::default()
        };
        assert!(bad.resolve(4).is_err());
        assert!(ForestParams::default().resolve(0).is_err());
    }
}
