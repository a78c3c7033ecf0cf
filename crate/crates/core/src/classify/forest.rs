//! Random forest: bootstrap-sampled, unpruned information-gain trees with
//! `int(log2 k) + 1` random candidate features per node.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{FeatureSampler, Grower, Node, SplitCriterion, TreeModel, TreeOptions};
use super::{Family, LabeledDataset, ModelParams, Predictor, TrainedModel};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded};

pub const N_TREES: usize = 100;

pub fn feature_subset_size(k: usize) -> usize {
    (k as f64).log2().floor() as usize + 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub seed: u64,
    pub tree_seeds: Vec<u64>,
    pub subset_size: usize,
    pub trees: Vec<TreeModel>,
}

impl ForestModel {
    pub fn votes_for_patient(&self, x: &[f64]) -> usize {
        self.trees.iter().filter(|t| t.leaf_score(x) > 0.5).count()
    }
}

impl Predictor for ForestModel {
    /// Fraction of trees voting Patient.
    fn score(&self, x: &[f64]) -> f64 {
        self.votes_for_patient(x) as f64 / self.trees.len() as f64
    }
}

fn grow_member(data: &LabeledDataset, seed: u64, subset_size: usize) -> TreeModel {
    let mut rng = seeded(seed);
    let n = data.len();
    let sample: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    let grower = Grower::new(data, SplitCriterion::InformationGain, 1);
    let mut sampler = FeatureSampler { rng: &mut rng, subset_size };
    let root: Node = grower.grow(&sample, Some(&mut sampler));
    TreeModel {
        options: TreeOptions { min_node: 1, ..TreeOptions::unpruned() },
        root,
    }
}

/// Member `t` is grown from the seed `derive_seed(seed, [t])`, so members
/// may be built in any order.
pub fn train_random_forest(data: &LabeledDataset, seed: u64) -> Result<TrainedModel> {
    if data.len() < 2 {
        return Err(Error::Training(format!("random forest needs at least 2 examples, got {}", data.len())));
    }
    let subset_size = feature_subset_size(data.n_features());
    let tree_seeds: Vec<u64> = (0..N_TREES as u64).map(|t| derive_seed(seed, &[t])).collect();
    let trees = tree_seeds
        .par_iter()
        .map(|&s| grow_member(data, s, subset_size))
        .collect();
    Ok(TrainedModel::new(
        Family::RandomForest,
        data,
        Some(seed),
        ModelParams::Forest(ForestModel { seed, tree_seeds, subset_size, trees }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::ClassLabel;
    use crate::signal::ClassLabel::{Control, Patient};

    fn forest(model: &TrainedModel) -> &ForestModel {
        match &model.params {
            ModelParams::Forest(f) => f,
            _ => unreachable!(),
        }
    }

    #[test]
    fn subset_sizes() {
        assert_eq!(feature_subset_size(1), 1);
        assert_eq!(feature_subset_size(2), 2);
        assert_eq!(feature_subset_size(3), 2);
        assert_eq!(feature_subset_size(10), 4);
        assert_eq!(feature_subset_size(38), 6);
    }

    #[test]
    fn hundred_trees_replay_identically() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![(i as f64 * 0.9).sin(), (i as f64 * 0.3).cos(), i as f64 % 3.0]).collect();
        let labels: Vec<ClassLabel> = (0..40).map(|i| if (i * 3) % 5 < 2 { Patient } else { Control }).collect();
        let data = LabeledDataset::from_rows(rows.clone(), labels).unwrap();
        let a = train_random_forest(&data, 5).unwrap();
        let b = train_random_forest(&data, 5).unwrap();
        assert_eq!(forest(&a).trees.len(), N_TREES);
        assert_eq!(a, b);
        for r in &rows {
            assert_eq!(a.predict_score(r).unwrap().to_bits(), b.predict_score(r).unwrap().to_bits());
        }
        let c = train_random_forest(&data, 6).unwrap();
        assert_ne!(forest(&a).trees, forest(&c).trees);
    }

    #[test]
    fn majority_vote_threshold() {
        let leaf = |p, c| TreeModel { options: TreeOptions::unpruned(), root: Node::Leaf { patients: p, controls: c } };
        let mut trees: Vec<TreeModel> = (0..63).map(|_| leaf(1, 0)).collect();
        trees.extend((0..37).map(|_| leaf(0, 1)));
        let f = ForestModel { seed: 0, tree_seeds: vec![0; 100], subset_size: 1, trees };
        assert_eq!(f.score(&[0.0]), 0.63);

        let mut tied: Vec<TreeModel> = (0..50).map(|_| leaf(1, 0)).collect();
        tied.extend((0..50).map(|_| leaf(0, 1)));
        let data = LabeledDataset::from_rows(vec![vec![0.0], vec![1.0]], vec![Patient, Control]).unwrap();
        let model = TrainedModel::new(
            Family::RandomForest,
            &data,
            Some(0),
            ModelParams::Forest(ForestModel { seed: 0, tree_seeds: vec![0; 100], subset_size: 1, trees: tied }),
        );
        assert_eq!(model.predict_label(&[0.0]).unwrap(), Control);
    }
}
