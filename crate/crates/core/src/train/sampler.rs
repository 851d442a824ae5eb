//! Few-shot subsets.
//!
//! Algorithm, so subsets can be regenerated anywhere: seed a ChaCha8 stream
//! with `seed` (the `rand_chacha` `seed_from_u64` expansion). Visit classes
//! in byte order of their labels. For each class take the indices of its
//! instances in dataset order and run a partial Fisher-Yates shuffle for `m`
//! rounds: at round `i`, draw `j` uniformly from `i..n` as
//! `i + gen_range(0..(n - i) as u64)` and swap positions `i` and `j`. The
//! first `m` indices, in that order, are the draw. The same stream is used
//! across classes (and, for [`few_shot_split`], continues from the train
//! pool into the dev pool).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Dataset;

/// Sampled train and dev subsets, and the classes that came up short.
#[derive(Debug, Clone, PartialEq)]
pub struct FewShotSample {
    pub train: Dataset,
    pub dev: Dataset,
    /// Classes with fewer than K training instances available.
    pub train_shortfall: Vec<String>,
    /// Classes with fewer than K dev instances available.
    pub dev_shortfall: Vec<String>,
}

fn sorted_classes(dataset: &Dataset) -> Vec<&str> {
    let mut classes: Vec<&str> = dataset.classes.iter().map(String::as_str).collect();
    for inst in &dataset.instances {
        if !classes.contains(&inst.label.as_str()) {
            classes.push(&inst.label);
        }
    }
    classes.sort_unstable();
    classes
}

fn class_indices(dataset: &Dataset, class: &str) -> Vec<usize> {
    dataset
        .instances
        .iter()
        .enumerate()
        .filter(|(_, inst)| inst.label == class)
        .map(|(i, _)| i)
        .collect()
}

/// Partial Fisher-Yates: the first `m` entries of `items` become a uniform
/// draw without replacement.
pub fn partial_shuffle<T, R: Rng>(items: &mut [T], m: usize, rng: &mut R) {
    let n = items.len();
    for i in 0..m.min(n) {
        let j = i + rng.random_range(0..(n - i) as u64) as usize;
        items.swap(i, j);
    }
}

/// Full shuffle with the same draw rule as [`partial_shuffle`].
pub fn shuffle<T, R: Rng>(items: &mut [T], rng: &mut R) {
    let n = items.len();
    partial_shuffle(items, n, rng);
}

fn subset(pool: &Dataset, name: &str, indices: Vec<usize>) -> Dataset {
    Dataset {
        split: name.to_string(),
        classes: pool.classes.clone(),
        instances: indices.into_iter().map(|i| pool.instances[i].clone()).collect(),
    }
}

fn draw(pool: &Dataset, k: usize, rng: &mut ChaCha8Rng, shortfall: &mut Vec<String>) -> Vec<usize> {
    let mut out = Vec::new();
    for class in sorted_classes(pool) {
        let mut idx = class_indices(pool, class);
        if idx.len() < k {
            shortfall.push(class.to_string());
        }
        let m = k.min(idx.len());
        partial_shuffle(&mut idx, m, rng);
        out.extend_from_slice(&idx[..m]);
    }
    out
}

/// Draws K train and K dev instances per class from one pool; the two
/// subsets are disjoint. Per class, the first K of the `2K`-round draw go to
/// train and the rest to dev.
pub fn few_shot_sample(dataset: &Dataset, k: usize, seed: u64) -> FewShotSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut dev) = (Vec::new(), Vec::new());
    let (mut train_short, mut dev_short) = (Vec::new(), Vec::new());
    for class in sorted_classes(dataset) {
        let mut idx = class_indices(dataset, class);
        let m = (2 * k).min(idx.len());
        partial_shuffle(&mut idx, m, &mut rng);
        let t = k.min(m);
        if t < k {
            train_short.push(class.to_string());
        }
        if m - t < k {
            dev_short.push(class.to_string());
        }
        train.extend_from_slice(&idx[..t]);
        dev.extend_from_slice(&idx[t..m]);
    }
    FewShotSample {
        train: subset(dataset, &format!("train-k{k}-s{seed}"), train),
        dev: subset(dataset, &format!("dev-k{k}-s{seed}"), dev),
        train_shortfall: train_short,
        dev_shortfall: dev_short,
    }
}

/// Draws K per class from a train pool, then K per class from a separate
/// dev pool, continuing the same random stream.
pub fn few_shot_split(train_pool: &Dataset, dev_pool: &Dataset, k: usize, seed: u64) -> FewShotSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train_short, mut dev_short) = (Vec::new(), Vec::new());
    let train = draw(train_pool, k, &mut rng, &mut train_short);
    let dev = draw(dev_pool, k, &mut rng, &mut dev_short);
    FewShotSample {
        train: subset(train_pool, &format!("train-k{k}-s{seed}"), train),
        dev: subset(dev_pool, &format!("dev-k{k}-s{seed}"), dev),
        train_shortfall: train_short,
        dev_shortfall: dev_short,
    }
}
