//! Fairness auditing and debiased random survival forests for right-censored
//! data.
//!
//! The crate is split the way the analysis pipeline runs:
//!
//! - [`survstats`]: Kaplan–Meier, Nelson–Aalen, logrank and tail functions.
//! - [`fairness`]: concordance imparity, fair calibration and the uncensored
//!   subgroup-AUC counterpart.
//! - [`evalmetrics`]: C-index, IPCW Brier score and time-dependent AUC.
//! - [`fsrf`]: the fair survival random forest learner.
//! - [`dataio`]: CSV ingestion and a synthetic biased-data generator.

pub mod data;
pub mod dataio;
pub mod error;
pub mod evalmetrics;
pub mod fairness;
pub mod fsrf;
pub mod survstats;

pub use data::{
    FeatureKind, FeatureMeta, FeatureValue, Outcome, SensitiveKind, SensitiveMeta,
    SensitiveValue, SurvivalDataset, SurvivalRecord,
};
pub use error::{Error, Result};
