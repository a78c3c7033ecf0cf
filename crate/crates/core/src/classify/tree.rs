//! Binary decision trees on numeric features.
//!
//! Candidate thresholds are midpoints between consecutive distinct sorted
//! values; a row goes left when `x[feature] <= threshold`. A split is
//! admissible only when both children keep at least `min_node` rows; nodes
//! split until they are pure or no admissible split has positive gain. Optional pessimistic pruning collapses a subtree when its summed
//! upper-bound error estimate is not below that of a single leaf.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::{Family, LabeledDataset, ModelParams, Predictor, TrainedModel};
use crate::error::{Error, Result};

const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitCriterion {
    InformationGain,
    GainRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeOptions {
    pub criterion: SplitCriterion,
    pub min_node: usize,
    /// Confidence factor for pessimistic pruning; `None` leaves the tree
    /// unpruned.
    pub pruning_confidence: Option<f64>,
}

impl Default for TreeOptions {
    fn default() -> Self {
        Self {
            criterion: SplitCriterion::InformationGain,
            min_node: 2,
            pruning_confidence: Some(0.25),
        }
    }
}

impl TreeOptions {
    pub fn unpruned() -> Self {
        Self { pruning_confidence: None, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        patients: usize,
        controls: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        patients: usize,
        controls: usize,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    fn counts(&self) -> (usize, usize) {
        match self {
            Node::Leaf { patients, controls } | Node::Split { patients, controls, .. } => (*patients, *controls),
        }
    }

    fn leaf_of(&self) -> Node {
        let (patients, controls) = self.counts();
        Node::Leaf { patients, controls }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::Split { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

fn leaf_fraction(patients: usize, controls: usize) -> f64 {
    let n = patients + controls;
    if n == 0 {
        0.0
    } else {
        patients as f64 / n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub options: TreeOptions,
    pub root: Node,
}

impl TreeModel {
    /// Patient fraction of the training rows in the leaf reached by `x`.
    pub fn leaf_score(&self, x: &[f64]) -> f64 {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { patients, controls } => return leaf_fraction(*patients, *controls),
                Node::Split { feature, threshold, left, right, .. } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }
}

impl Predictor for TreeModel {
    fn score(&self, x: &[f64]) -> f64 {
        self.leaf_score(x)
    }
}

fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Binary entropy of a class-count pair, in bits.
pub fn entropy_bits(patients: usize, controls: usize) -> f64 {
    let n = (patients + controls) as f64;
    if n == 0.0 {
        return 0.0;
    }
    plogp(patients as f64 / n) + plogp(controls as f64 / n)
}

/// Entropy reduction of splitting `parent` into `left` and `right`; each
/// argument is a `(patients, controls)` pair.
pub fn information_gain(parent: (usize, usize), left: (usize, usize), right: (usize, usize)) -> f64 {
    let n = (parent.0 + parent.1) as f64;
    let nl = (left.0 + left.1) as f64;
    let nr = (right.0 + right.1) as f64;
    entropy_bits(parent.0, parent.1) - nl / n * entropy_bits(left.0, left.1) - nr / n * entropy_bits(right.0, right.1)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    score: f64,
    feature: usize,
    threshold: f64,
}

/// Random feature sampling for forest members.
pub(crate) struct FeatureSampler<'r> {
    pub rng: &'r mut ChaCha8Rng,
    pub subset_size: usize,
}

pub(crate) struct Grower<'a> {
    rows: &'a [Vec<f64>],
    patient: Vec<bool>,
    criterion: SplitCriterion,
    min_node: usize,
    n_features: usize,
}

impl<'a> Grower<'a> {
    pub(crate) fn new(data: &'a LabeledDataset, criterion: SplitCriterion, min_node: usize) -> Self {
        Self {
            rows: data.rows(),
            patient: data.labels().iter().map(|l| l.is_patient()).collect(),
            criterion,
            min_node,
            n_features: data.n_features(),
        }
    }

    fn counts(&self, idx: &[usize]) -> (usize, usize) {
        let p = idx.iter().filter(|&&i| self.patient[i]).count();
        (p, idx.len() - p)
    }

    fn best_on_feature(&self, idx: &[usize], feature: usize, parent: (usize, usize)) -> Option<Candidate> {
        let mut sorted = idx.to_vec();
        sorted.sort_by(|&a, &b| self.rows[a][feature].total_cmp(&self.rows[b][feature]));
        let n = sorted.len();
        let mut best: Option<Candidate> = None;
        let mut left = (0usize, 0usize);
        for w in 0..n - 1 {
            if self.patient[sorted[w]] {
                left.0 += 1;
            } else {
                left.1 += 1;
            }
            let lo = self.rows[sorted[w]][feature];
            let hi = self.rows[sorted[w + 1]][feature];
            if lo == hi || w + 1 < self.min_node || n - w - 1 < self.min_node {
                continue;
            }
            let right = (parent.0 - left.0, parent.1 - left.1);
            let gain = information_gain(parent, left, right);
            let score = match self.criterion {
                SplitCriterion::InformationGain => gain,
                SplitCriterion::GainRatio => {
                    let split_info = entropy_bits(w + 1, n - w - 1);
                    gain / split_info
                }
            };
            if gain > MIN_GAIN && best.is_none_or(|b| score > b.score) {
                let mid = lo + (hi - lo) / 2.0;
                let threshold = if mid < hi { mid } else { lo };
                best = Some(Candidate { score, feature, threshold });
            }
        }
        best
    }

    fn choose_split(&self, idx: &[usize], parent: (usize, usize), sampler: Option<&mut FeatureSampler>) -> Option<Candidate> {
        let better = |acc: Option<Candidate>, c: Option<Candidate>| match (acc, c) {
            (Some(a), Some(c)) if c.score > a.score => Some(c),
            (None, c) => c,
            (a, _) => a,
        };
        match sampler {
            None => (0..self.n_features).fold(None, |acc, f| better(acc, self.best_on_feature(idx, f, parent))),
            Some(s) => {
                let mut order: Vec<usize> = (0..self.n_features).collect();
                order.shuffle(s.rng);
                let mut best = None;
                for (tried, &f) in order.iter().enumerate() {
                    // past the subset, keep drawing only until a useful split appears
                    if tried >= s.subset_size && best.is_some() {
                        break;
                    }
                    best = better(best, self.best_on_feature(idx, f, parent));
                }
                best
            }
        }
    }

    pub(crate) fn grow(&self, idx: &[usize], mut sampler: Option<&mut FeatureSampler>) -> Node {
        let (patients, controls) = self.counts(idx);
        if patients == 0 || controls == 0 || idx.len() < 2 * self.min_node {
            return Node::Leaf { patients, controls };
        }
        let Some(split) = self.choose_split(idx, (patients, controls), sampler.as_deref_mut()) else {
            return Node::Leaf { patients, controls };
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.rows[i][split.feature] <= split.threshold);
        let left = self.grow(&l, sampler.as_deref_mut());
        let right = self.grow(&r, sampler);
        Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            patients,
            controls,
            left: Box::new(left),
            right: Box::new(right),
        }
    }
}

/// Upper confidence bound on the error count of a leaf that misclassifies
/// `errors` of `n` rows (Wilson score bound with `z = Phi^-1(1 - cf)`).
pub fn pessimistic_errors(errors: usize, n: usize, z: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n_f = n as f64;
    let f = errors as f64 / n_f;
    let z2 = z * z;
    let upper = (f + z2 / (2.0 * n_f) + z * (f / n_f - f * f / n_f + z2 / (4.0 * n_f * n_f)).max(0.0).sqrt())
        / (1.0 + z2 / n_f);
    n_f * upper
}

fn leaf_errors(patients: usize, controls: usize) -> usize {
    if leaf_fraction(patients, controls) > 0.5 {
        controls
    } else {
        patients
    }
}

/// Returns the pruned node and its summed leaf error bound.
fn prune(node: Node, z: f64) -> (Node, f64) {
    match node {
        Node::Leaf { patients, controls } => {
            let e = pessimistic_errors(leaf_errors(patients, controls), patients + controls, z);
            (node, e)
        }
        Node::Split { feature, threshold, patients, controls, left, right } => {
            let (left, el) = prune(*left, z);
            let (right, er) = prune(*right, z);
            let subtree = el + er;
            let as_leaf = pessimistic_errors(leaf_errors(patients, controls), patients + controls, z);
            let node = Node::Split { feature, threshold, patients, controls, left: Box::new(left), right: Box::new(right) };
            if subtree >= as_leaf {
                (node.leaf_of(), as_leaf)
            } else {
                (node, subtree)
            }
        }
    }
}

pub fn train_decision_tree(data: &LabeledDataset) -> Result<TrainedModel> {
    train_decision_tree_with(data, &TreeOptions::default())
}

pub fn train_decision_tree_with(data: &LabeledDataset, options: &TreeOptions) -> Result<TrainedModel> {
    if data.len() < 2 {
        return Err(Error::Training(format!("decision tree needs at least 2 examples, got {}", data.len())));
    }
    if options.min_node == 0 {
        return Err(Error::Param("min_node must be at least 1".into()));
    }
    let grower = Grower::new(data, options.criterion, options.min_node);
    let idx: Vec<usize> = (0..data.len()).collect();
    let mut root = grower.grow(&idx, None);
    if let Some(cf) = options.pruning_confidence {
        if !(cf > 0.0 && cf < 0.5) {
            return Err(Error::Param(format!("pruning confidence must lie in (0, 0.5), got {cf}")));
        }
        let z = Normal::standard().inverse_cdf(1.0 - cf);
        root = prune(root, z).0;
    }
    Ok(TrainedModel::new(
        Family::DecisionTree,
        data,
        None,
        ModelParams::Tree(TreeModel { options: *options, root }),
    ))
}
