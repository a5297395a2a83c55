//! Fair survival random forest: survival trees whose splits maximize the fair
//! survival difference, with Nelson–Aalen leaf risks, bagged into a forest.

mod criterion;
mod forest;
mod params;
mod tree;

pub use criterion::{fsd, node_risk, score_split, SplitCandidate, SplitRule};
pub use forest::{fit_forest, FsrfModel, MODEL_FORMAT, MODEL_VERSION};
pub use params::{ForestParams, SplitCriterion};
pub use tree::{best_split, fit_tree, Node, SurvivalTree, TrainingData};
