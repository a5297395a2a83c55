use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{FeatureValue, SurvivalDataset};
use crate::error::{Error, Result};
use crate::fairness::sweep::{Grouping, ImparitySweep, LEFT, RIGHT};
use crate::fairness::GroupPartition;
use crate::survstats::{nelson_aalen, two_sample_pass, StepFunction};

use super::criterion::{fsd, SplitCandidate, SplitRule};
use super::params::{ForestParams, SplitCriterion};

/// Column-major view of a dataset with its sensitive groups, built once per fit.
#[derive(Debug, Clone)]
pub struct TrainingData {
    columns: Vec<Vec<f64>>,
    categorical: Vec<bool>,
    times: Vec<f64>,
    events: Vec<bool>,
    groups: Vec<usize>,
    k: usize,
}

impl TrainingData {
    pub fn new(dataset: &SurvivalDataset, partition: &GroupPartition) -> Result<Self> {
        partition.check_len(dataset.len())?;
        let p = dataset.n_features();
        let mut columns = vec![Vec::with_capacity(dataset.len()); p];
        for r in &dataset.records {
            for (col, v) in columns.iter_mut().zip(&r.features) {
                col.push(v.as_f64());
            }
        }
        Ok(Self {
            columns,
            categorical: dataset.feature_meta.iter().map(|m| m.is_categorical()).collect(),
            times: dataset.records.iter().map(|r| r.time).collect(),
            events: dataset.records.iter().map(|r| r.event).collect(),
            groups: partition.group_of().to_vec(),
            k: partition.k(),
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Split {
        attribute: usize,
        rule: SplitRule,
        left: usize,
        right: usize,
    },
    Leaf {
        /// Cumulative hazard at the node's last event time.
        risk: f64,
        /// Training records in the leaf, bootstrap copies included.
        size: usize,
        hazard: StepFunction,
    },
}

/// Binary survival tree stored as an arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalTree {
    pub nodes: Vec<Node>,
}

impl SurvivalTree {
    fn leaf(&self, features: &[FeatureValue]) -> (f64, &StepFunction) {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Split {
                    attribute,
                    rule,
                    left,
                    right,
                } => {
                    idx = if rule.goes_left_value(features[*attribute]) {
                        *left
                    } else {
                        *right
                    };
                }
                Node::Leaf { risk, hazard, .. } => return (*risk, hazard),
            }
        }
    }

    /// Risk of the leaf the record routes to. Features must already be validated.
    pub fn leaf_risk(&self, features: &[FeatureValue]) -> f64 {
        self.leaf(features).0
    }

    pub fn leaf_hazard(&self, features: &[FeatureValue]) -> &StepFunction {
        self.leaf(features).1
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
                Node::Leaf { .. } => 0,
            }
        }
        go(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }
}

struct NodeView<'a> {
    times: &'a [f64],
    events: &'a [bool],
    by_time: &'a [usize],
    criterion: SplitCriterion,
}

impl NodeView<'_> {
    fn evaluate(
        &self,
        goes_left: &[bool],
        sweep: Option<&ImparitySweep<'_>>,
        n_left: usize,
        attribute: usize,
        rule: SplitRule,
    ) -> Option<SplitCandidate> {
        let m = self.times.len();
        let pass = two_sample_pass(
            self.by_time
                .iter()
                .map(|&i| (self.times[i], self.events[i], goes_left[i])),
            n_left,
            m - n_left,
        );
        let sd = pass.statistic().ok()?.abs();
        let (ci, score) = match (self.criterion, sweep) {
            (SplitCriterion::FairSurvivalDifference, Some(sweep)) => {
                let ci = match sweep.tally(pass.hazard_a, pass.hazard_b).imparity() {
                    Ok(ci) => ci,
                    Err(Error::NoComparablePairs) => 0.0,
                    Err(_) => return None,
                };
                (Some(ci), fsd(sd, ci).ok()?)
            }
            _ => {
                let score = if sd == 0.0 { f64::NEG_INFINITY } else { sd.ln() };
                (None, score)
            }
        };
        Some(SplitCandidate {
            attribute,
            rule,
            sd,
            ci,
            fsd: score,
            n_left,
            n_right: m - n_left,
        })
    }
}

fn keep_best(best: &mut Option<SplitCandidate>, cand: Option<SplitCandidate>) {
    if let Some(c) = cand {
        if best.as_ref().is_none_or(|b| c.beats(b)) {
            *best = Some(c);
        }
    }
}

/// Best split of `node` (row indices into `data`, repeats allowed) over `mtry`
/// randomly drawn features. `None` when the node is too small or no candidate
/// can be scored.
pub fn best_split<R: Rng + ?Sized>(
    data: &TrainingData,
    node: &[usize],
    rng: &mut R,
    params: &ForestParams,
) -> Option<SplitCandidate> {
    let m = node.len();
    let min_leaf = params.min_leaf.max(1);
    if m < 2 * min_leaf || data.n_features() == 0 {
        return None;
    }
    let mtry = params.mtry_or(data.n_features());
    let mut features = rand::seq::index::sample(rng, data.n_features(), mtry).into_vec();
    features.sort_unstable();

    let times: Vec<f64> = node.iter().map(|&i| data.times[i]).collect();
    let events: Vec<bool> = node.iter().map(|&i| data.events[i]).collect();
    let groups: Vec<usize> = node.iter().map(|&i| data.groups[i]).collect();
    let mut by_time: Vec<usize> = (0..m).collect();
    by_time.sort_by(|&a, &b| times[a].total_cmp(&times[b]));

    let view = NodeView {
        times: &times,
        events: &events,
        by_time: &by_time,
        criterion: params.criterion,
    };
    let base = match params.criterion {
        SplitCriterion::FairSurvivalDifference => Some(ImparitySweep::new(
            &times,
            &events,
            Grouping::Fixed(&groups, data.k),
        )),
        SplitCriterion::LogrankOnly => None,
    };

    let mut best: Option<SplitCandidate> = None;
    let mut goes_left = vec![false; m];
    for &f in &features {
        let column = &data.columns[f];
        let values: Vec<f64> = node.iter().map(|&i| column[i]).collect();
        let mut sweep = base.clone();
        goes_left.fill(false);

        if data.categorical[f] {
            let mut cats = values.clone();
            cats.sort_by(f64::total_cmp);
            cats.dedup();
            if cats.len() < 2 {
                continue;
            }
            for &c in &cats {
                let members: Vec<usize> = (0..m).filter(|&i| values[i] == c).collect();
                let n_left = members.len();
                if n_left < min_leaf || m - n_left < min_leaf {
                    continue;
                }
                for &i in &members {
                    goes_left[i] = true;
                    if let Some(s) = sweep.as_mut() {
                        s.move_to(i, LEFT);
                    }
                }
                let rule = SplitRule::Category(c as u32);
                keep_best(&mut best, view.evaluate(&goes_left, sweep.as_ref(), n_left, f, rule));
                for &i in &members {
                    goes_left[i] = false;
                    if let Some(s) = sweep.as_mut() {
                        s.move_to(i, RIGHT);
                    }
                }
            }
        } else {
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            let mut cursor = 0;
            while cursor < m {
                let v = values[order[cursor]];
                while cursor < m && values[order[cursor]] == v {
                    let i = order[cursor];
                    goes_left[i] = true;
                    if let Some(s) = sweep.as_mut() {
                        s.move_to(i, LEFT);
                    }
                    cursor += 1;
                }
                if cursor == m {
                    break;
                }
                let n_left = cursor;
                if n_left < min_leaf {
                    continue;
                }
                if m - n_left < min_leaf {
                    break;
                }
                let rule = SplitRule::Threshold(0.5 * (v + values[order[cursor]]));
                keep_best(&mut best, view.evaluate(&goes_left, sweep.as_ref(), n_left, f, rule));
            }
        }
    }
    best
}

/// Grows one tree on `sample` (row indices, repeats allowed).
pub fn fit_tree<R: Rng + ?Sized>(
    data: &TrainingData,
    sample: &[usize],
    params: &ForestParams,
    rng: &mut R,
) -> Result<SurvivalTree> {
    if sample.is_empty() {
        return Err(Error::EmptyInput("tree sample is empty"));
    }
    let mut nodes = Vec::new();
    grow(data, sample.to_vec(), 0, params, rng, &mut nodes)?;
    Ok(SurvivalTree { nodes })
}

fn grow<R: Rng + ?Sized>(
    data: &TrainingData,
    node: Vec<usize>,
    depth: usize,
    params: &ForestParams,
    rng: &mut R,
    nodes: &mut Vec<Node>,
) -> Result<usize> {
    let id = nodes.len();
    let has_event = node.iter().any(|&i| data.events[i]);
    let depth_ok = params.max_depth.is_none_or(|d| depth < d);
    let split = if has_event && depth_ok {
        best_split(data, &node, rng, params)
    } else {
        None
    };

    let Some(split) = split else {
        let outcomes: Vec<(f64, bool)> = node.iter().map(|&i| (data.times[i], data.events[i])).collect();
        let hazard = nelson_aalen(&outcomes)?;
        nodes.push(Node::Leaf {
            risk: hazard.final_value(),
            size: node.len(),
            hazard,
        });
        return Ok(id);
    };

    let column = &data.columns[split.attribute];
    let (left, right): (Vec<usize>, Vec<usize>) =
        node.iter().partition(|&&i| split.rule.goes_left(column[i]));
    drop(node);
    // placeholder, patched once the children exist
    nodes.push(Node::Split {
        attribute: split.attribute,
        rule: split.rule,
        left: 0,
        right: 0,
    });
    let l = grow(data, left, depth + 1, params, rng, nodes)?;
    let r = grow(data, right, depth + 1, params, rng, nodes)?;
    if let Node::Split { left, right, .. } = &mut nodes[id] {
        *left = l;
        *right = r;
    }
    Ok(id)
}
