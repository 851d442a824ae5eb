use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

use common::{fixture_pool, subset_digest, PINNED_K8};
use ptr_rules::corpus::{generate_synthetic, Dataset};
use ptr_rules::mlm::ModelConfig;
use ptr_rules::task::Task;
use ptr_rules::train::{
    adam_update, few_shot_sample, few_shot_split, lr_at, train, warmup_steps, FewShotConfig, Objective,
    TrainConfig,
};

/// The sampling procedure written out from its documentation.
fn reference_sample(pool: &Dataset, k: usize, seed: u64) -> (Vec<String>, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<&str> = pool.instances.iter().map(|i| i.label.as_str()).collect();
    labels.sort();
    labels.dedup();
    let (mut train, mut dev) = (Vec::new(), Vec::new());
    for label in labels {
        let mut idx: Vec<usize> = (0..pool.len()).filter(|&i| pool.instances[i].label == label).collect();
        let n = idx.len();
        let m = (2 * k).min(n);
        for i in 0..m {
            let j = i + rng.random_range(0..(n - i) as u64) as usize;
            idx.swap(i, j);
        }
        let t = k.min(m);
        train.extend(idx[..t].iter().map(|&i| pool.instances[i].id.clone()));
        dev.extend(idx[t..m].iter().map(|&i| pool.instances[i].id.clone()));
    }
    (train, dev)
}

fn ids(d: &Dataset) -> Vec<String> {
    d.instances.iter().map(|i| i.id.clone()).collect()
}

#[test]
fn sampler_matches_the_documented_procedure() {
    let pool = fixture_pool();
    for seed in FewShotConfig::default().seeds {
        for k in [1, 8, 16, 32] {
            let s = few_shot_sample(&pool, k, seed);
            let (train, dev) = reference_sample(&pool, k, seed);
            assert_eq!(ids(&s.train), train, "seed {seed} k {k}");
            assert_eq!(ids(&s.dev), dev, "seed {seed} k {k}");
        }
    }
}

#[test]
fn sampler_subsets_are_disjoint_and_sized() {
    let pool = fixture_pool();
    let s = few_shot_sample(&pool, 8, 13);
    for id in ids(&s.train) {
        assert!(!ids(&s.dev).contains(&id));
    }
    assert_eq!(s.train.len(), 32);
    // per:age has 9 instances: 8 train, 1 dev.
    assert_eq!(s.dev.len(), 8 + 8 + 8 + 1);
    assert_eq!(s.dev_shortfall, vec!["per:age".to_string()]);
    assert!(s.train_shortfall.is_empty());
    let s = few_shot_sample(&pool, 16, 13);
    assert_eq!(s.train_shortfall, vec!["per:age".to_string()]);
}

#[test]
fn split_continues_the_stream_into_the_dev_pool() {
    let pool = fixture_pool();
    let a = few_shot_split(&pool, &pool, 4, 42);
    let b = few_shot_split(&pool, &pool, 4, 42);
    assert_eq!(a, b);
    assert_ne!(ids(&a.train), ids(&a.dev));
}

#[test]
fn warmup_and_decay_at_every_step() {
    let cfg = TrainConfig {
        learning_rate: 1e-3,
        warmup_fraction: 0.1,
        ..TrainConfig::default()
    };
    for total in [1usize, 7, 10, 64, 100, 250, 1001] {
        let w = warmup_steps(total, 0.1);
        assert_eq!(w, (total as f64 / 10.0).ceil() as usize, "total {total}");
        for step in 0..=total + 2 {
            let want = if step >= total {
                0.0
            } else if step < w {
                1e-3 * step as f64 / w as f64
            } else {
                1e-3 * (total - step) as f64 / (total - w) as f64
            };
            assert_eq!(lr_at(step, total, &cfg), want, "step {step} of {total}");
        }
    }
    // 0.1 * 30 is 3.0000000000000004 in floating point; still three steps.
    assert_eq!(warmup_steps(30, 0.1), 3);
}

#[test]
fn adam_matches_a_hand_written_update_on_a_quadratic() {
    let a = [1.0, 4.0, 0.25];
    let c = [0.5, -1.0, 2.0];
    let (lr, wd) = (0.05, 0.01);
    let mut theta = vec![1.0, 1.0, -1.0];
    let (mut m, mut v) = (vec![0.0; 3], vec![0.0; 3]);
    let mut th = theta.clone();
    let (mut mm, mut vv) = ([0.0f64; 3], [0.0f64; 3]);
    for t in 1..=3u64 {
        let grad: Vec<f64> = (0..3).map(|i| a[i] * (theta[i] - c[i])).collect();
        adam_update(&mut theta, &grad, &mut m, &mut v, t, lr, wd);
        for i in 0..3 {
            let g = a[i] * (th[i] - c[i]);
            th[i] *= 1.0 - lr * wd;
            mm[i] = 0.9 * mm[i] + 0.1 * g;
            vv[i] = 0.999 * vv[i] + 0.001 * g * g;
            let mh = mm[i] / (1.0 - 0.9f64.powi(t as i32));
            let vh = vv[i] / (1.0 - 0.999f64.powi(t as i32));
            th[i] -= lr * mh / (vh.sqrt() + 1e-8);
        }
        for i in 0..3 {
            assert!((theta[i] - th[i]).abs() < 1e-15, "step {t} coord {i}");
        }
    }
}

#[test]
fn first_adam_step_moves_by_the_learning_rate() {
    let mut theta = vec![1.0];
    adam_update(&mut theta, &[1.0], &mut [0.0], &mut [0.0], 1, 0.1, 0.0);
    assert!((theta[0] - 0.9).abs() < 1e-8);
}

fn small_task() -> (Task, Dataset, Dataset) {
    let task = Task::load(concat!(env!("CARGO_MANIFEST_DIR"), "/specs/synthetic4.ptr")).unwrap();
    let train_set = generate_synthetic(&task.spec, 6, 1, 0.0);
    let dev = generate_synthetic(&task.spec, 3, 2, 0.0);
    (task, train_set, dev)
}

#[test]
fn training_is_deterministic() {
    let (task, train_set, dev) = small_task();
    let cfg = ModelConfig {
        d_model: 16,
        n_heads: 2,
        d_ff: 32,
        ..ModelConfig::default()
    };
    let model = task.model(cfg, task.vocab(&[&train_set, &dev]), 3).unwrap();
    for objective in [Objective::Ptr, Objective::ClsBaseline] {
        let tc = TrainConfig {
            epochs: 2,
            batch_size: 5,
            seed: 9,
            objective,
            ..TrainConfig::default()
        };
        let a = train(&model, &task.schema, &train_set, &dev, &tc).unwrap();
        let b = train(&model, &task.schema, &train_set, &dev, &tc).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.model.params, b.model.params);
        assert_eq!(a.history.steps.len(), 2 * 24usize.div_ceil(5));
        let other = TrainConfig { seed: 10, ..tc.clone() };
        let c = train(&model, &task.schema, &train_set, &dev, &other).unwrap();
        assert_ne!(a.history, c.history);
    }
}

#[test]
fn zero_epochs_returns_the_model_unchanged() {
    let (task, train_set, dev) = small_task();
    let model = task.model(ModelConfig::default(), task.vocab(&[&train_set, &dev]), 1).unwrap();
    let tc = TrainConfig {
        epochs: 0,
        ..TrainConfig::default()
    };
    let out = train(&model, &task.schema, &train_set, &dev, &tc).unwrap();
    assert_eq!(out.model.params, model.params);
    assert!(out.history.steps.is_empty());
}

#[test]
fn missing_dev_set_keeps_the_last_model() {
    let (task, train_set, _) = small_task();
    let empty = Dataset::from_instances("dev", Vec::new());
    let model = task.model(ModelConfig::default(), task.vocab(&[&train_set]), 1).unwrap();
    let tc = TrainConfig {
        epochs: 1,
        ..TrainConfig::default()
    };
    let out = train(&model, &task.schema, &train_set, &empty, &tc).unwrap();
    assert!(out.dev_empty);
    assert_eq!(out.best_epoch, None);
}

#[test]
fn bad_configs_are_rejected() {
    let (task, train_set, dev) = small_task();
    let model = task.model(ModelConfig::default(), task.vocab(&[&train_set, &dev]), 1).unwrap();
    for tc in [
        TrainConfig { batch_size: 0, ..TrainConfig::default() },
        TrainConfig { learning_rate: -1.0, ..TrainConfig::default() },
        TrainConfig { warmup_fraction: 1.5, ..TrainConfig::default() },
    ] {
        assert!(train(&model, &task.schema, &train_set, &dev, &tc).is_err());
    }
}

#[test]
fn pinned_subsets_for_the_default_seeds() {
    let pool = fixture_pool();
    for (seed, want) in PINNED_K8 {
        assert_eq!(subset_digest(&pool, 8, seed), want, "seed {seed}");
    }
    let s = few_shot_sample(&pool, 8, 13);
    assert_eq!(s.train.instances[0].label, "no_relation");
    assert_eq!(s.train.instances[31].label, "per:title");
}
