//! Censoring-aware accuracy metrics: Harrell's C-index, the IPCW Brier score
//! and cumulative/dynamic time-dependent AUC, plus per-group breakdowns.

mod cindex;
mod cv;
mod ipcw;
mod report;

pub use cindex::harrell_c_index;
pub use cv::{cross_validate, stratified_folds, CvReport, FoldRow, SkippedFold, Summary};
pub use ipcw::{
    brier_score, brier_score_detail, censoring_survival, td_auc_grid, time_dependent_auc,
    BrierScore, TdAucGrid,
};
pub use report::{default_time, evaluate, group_breakdown, GroupMetrics, MetricsReport};

use crate::error::{Error, Result};

pub(crate) fn check_len(n: usize, values: &[f64]) -> Result<()> {
    if values.len() != n {
        return Err(Error::Shape {
            expected: n,
            actual: values.len(),
        });
    }
    Ok(())
}
