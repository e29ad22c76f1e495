//! Drawing labeled subsets from a dataset with ground truth.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Dataset;
use crate::ssl::LabeledSet;

/// How many labels to reveal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetMode {
    /// The same number from every class.
    PerClass(usize),
    /// A total drawn uniformly over all nodes, then grouped by class
    /// (classes may come out empty).
    Total(usize),
}

/// Where the labels go.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Placement {
    /// Uniformly at random without replacement.
    UniformRandom,
    /// Exactly these node indices, one list per class. Every index must
    /// carry the matching ground-truth label.
    FixedIndices(Vec<Vec<usize>>),
}

#[derive(Debug, Clone)]
pub struct LabelBudget {
    pub mode: BudgetMode,
    pub seed: u64,
    pub placement: Placement,
}

impl LabelBudget {
    pub fn per_class(count: usize, seed: u64) -> Self {
        Self {
            mode: BudgetMode::PerClass(count),
            seed,
            placement: Placement::UniformRandom,
        }
    }

    pub fn total(count: usize, seed: u64) -> Self {
        Self {
            mode: BudgetMode::Total(count),
            seed,
            placement: Placement::UniformRandom,
        }
    }

    pub fn fixed(indices: Vec<Vec<usize>>) -> Self {
        Self {
            mode: BudgetMode::Total(0), // ignored for fixed placement
            seed: 0,
            placement: Placement::FixedIndices(indices),
        }
    }
}

// Partial Fisher-Yates: the first `take` elements of a shuffled copy.
fn sample_without_replacement(
    pool: &[usize],
    take: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let mut pool = pool.to_vec();
    let n = pool.len();
    for i in 0..take {
        let j = i + rng.random_range(0..n - i);
        pool.swap(i, j);
    }
    pool.truncate(take);
    pool
}

/// Samples a labeled set as prescribed by `budget`. Requires ground-truth
/// labels on the dataset; deterministic per seed.
pub fn sample_labeled_set(data: &Dataset, budget: &LabelBudget) -> Result<LabeledSet> {
    let truth = data
        .labels()
        .ok_or_else(|| Error::Input("dataset carries no ground-truth labels".into()))?;
    let k = data.n_clusters().unwrap_or(0);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &c) in truth.iter().enumerate() {
        by_class[c].push(i);
    }

    match &budget.placement {
        Placement::FixedIndices(lists) => {
            for (c, list) in lists.iter().enumerate() {
                for &i in list {
                    if i >= data.len() {
                        return Err(Error::Input(format!(
                            "fixed label index {i} out of range for {} nodes",
                            data.len()
                        )));
                    }
                    if truth[i] != c {
                        return Err(Error::Input(format!(
                            "fixed label index {i} is in class list {c} but has true label {}",
                            truth[i]
                        )));
                    }
                }
            }
            LabeledSet::new(data.len(), lists.clone())
        }
        Placement::UniformRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
            match budget.mode {
                BudgetMode::PerClass(m) => {
                    let mut classes = Vec::with_capacity(k);
                    for (c, pool) in by_class.iter().enumerate() {
                        if m > pool.len() {
                            return Err(Error::Config(format!(
                                "budget {m} exceeds the {} members of class {c}",
                                pool.len()
                            )));
                        }
                        let mut chosen = sample_without_replacement(pool, m, &mut rng);
                        chosen.sort_unstable();
                        classes.push(chosen);
                    }
                    LabeledSet::new(data.len(), classes)
                }
                BudgetMode::Total(t) => {
                    if t > data.len() {
                        return Err(Error::Config(format!(
                            "budget {t} exceeds the dataset size {}",
                            data.len()
                        )));
                    }
                    let all: Vec<usize> = (0..data.len()).collect();
                    let chosen = sample_without_replacement(&all, t, &mut rng);
                    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); k];
                    for i in chosen {
                        classes[truth[i]].push(i);
                    }
                    for class in &mut classes {
                        class.sort_unstable();
                    }
                    LabeledSet::new(data.len(), classes)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::moons::{generate_moons, MoonsSpec};

    fn fixture() -> Dataset {
        generate_moons(&MoonsSpec {
            n_points: 60,
            n_moons: 2,
            noise_std: 0.05,
            seed: 9,
        })
        .unwrap()
    }

    #[test]
    fn per_class_counts_and_membership() {
        let data = fixture();
        let s = sample_labeled_set(&data, &LabelBudget::per_class(5, 3)).unwrap();
        assert_eq!(s.class_count(), 2);
        assert_eq!(s.labeled_count(), 10);
        let truth = data.labels().unwrap();
        for (c, class) in s.classes().iter().enumerate() {
            assert_eq!(class.len(), 5);
            for &i in class {
                assert_eq!(truth[i], c);
            }
        }
    }

    #[test]
    fn whole_class_budget_takes_everything() {
        let data = fixture();
        let s = sample_labeled_set(&data, &LabelBudget::per_class(30, 1)).unwrap();
        assert_eq!(s.labeled_count(), 60);
        assert!(sample_labeled_set(&data, &LabelBudget::per_class(31, 1)).is_err());
    }

    #[test]
    fn total_mode_groups_by_class() {
        let data = fixture();
        let s = sample_labeled_set(&data, &LabelBudget::total(12, 5)).unwrap();
        assert_eq!(s.labeled_count(), 12);
        assert_eq!(s.class_count(), 2);
    }

    #[test]
    fn different_seeds_differ_and_same_seed_repeats() {
        let data = fixture();
        let a = sample_labeled_set(&data, &LabelBudget::per_class(8, 10)).unwrap();
        let b = sample_labeled_set(&data, &LabelBudget::per_class(8, 10)).unwrap();
        let c = sample_labeled_set(&data, &LabelBudget::per_class(8, 11)).unwrap();
        assert_eq!(a.classes(), b.classes());
        assert_ne!(a.classes(), c.classes());
    }

    #[test]
    fn fixed_indices_must_match_truth() {
        let data = fixture();
        let truth = data.labels().unwrap();
        let i0 = truth.iter().position(|&c| c == 0).unwrap();
        let i1 = truth.iter().position(|&c| c == 1).unwrap();
        let ok = sample_labeled_set(
            &data,
            &LabelBudget::fixed(vec![vec![i0], vec![i1]]),
        )
        .unwrap();
        assert_eq!(ok.labeled_count(), 2);
        let bad = sample_labeled_set(&data, &LabelBudget::fixed(vec![vec![i1], vec![i0]]));
        assert!(bad.is_err());
        let oob = sample_labeled_set(&data, &LabelBudget::fixed(vec![vec![9999], vec![]]));
        assert!(oob.is_err());
    }
}
