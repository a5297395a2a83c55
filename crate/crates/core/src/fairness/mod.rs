//! Fairness under censoring: concordance imparity, fair calibration, and the
//! subgroup-AUC form that concordance imparity reduces to without censoring.

mod bridge;
mod calibration;
mod concordance;
mod discretize;
mod partition;
pub(crate) mod sweep;

pub use bridge::{ci_uncensored, ci_uncensored_ordinal, subgroup_auc};
pub use calibration::{
    fair_calibration, hl_statistic, CalibrationBin, CalibrationReport, CalibrationVerdict,
    GroupCalibration, HlResult, PairwiseDifference, DEFAULT_BINS,
};
pub use concordance::{
    classify_pair, concordance_imparity, concordance_imparity_par, ConcordanceTally,
    ImparityResult, Increment, PairOutcome,
};
pub use discretize::discretize_sensitive;
pub use partition::{GroupPartition, GroupRule};
