use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::graph::chronological_split;
use crate::manifold::{branch_counts, reset_branch_counts};
use crate::synthetic::{planted_communities, PlantedConfig};

fn small_net() -> crate::graph::InteractionNetwork {
    let cfg = PlantedConfig {
        users: 30,
        items: 20,
        interactions: 400,
        ..PlantedConfig::default()
    };
    planted_communities(&cfg, 11)
}

fn small_cfg(mode: Mode) -> TrainConfig {
    TrainConfig {
        n_intervals: 4,
        epochs: 2,
        embedding_dim: 8,
        mode,
        learning_rate: 1e-2,
        ..TrainConfig::default()
    }
}

#[test]
fn rank_ties_go_to_lower_id() {
    let s = [0.5, 0.9, 0.5, 0.1];
    assert_eq!(rank_of(&s, 1), 1);
    assert_eq!(rank_of(&s, 0), 2);
    assert_eq!(rank_of(&s, 2), 3);
    assert_eq!(rank_of(&s, 3), 4);
}

#[test]
fn metrics_examples() {
    let (mrr, rec) = metrics_from_ranks(&[1, 2, 4], &[1, 3]);
    assert!((mrr - (1.0 + 0.5 + 0.25) / 3.0).abs() < 1e-15);
    assert!((rec[&1] - 1.0 / 3.0).abs() < 1e-15);
    assert!((rec[&3] - 2.0 / 3.0).abs() < 1e-15);
    let (mrr, rec) = metrics_from_ranks(&[], &[10]);
    assert_eq!(mrr, 0.0);
    assert_eq!(rec[&10], 0.0);
}

#[test]
fn random_scores_match_harmonic_expectation() {
    let m = 100;
    let trials = 20_000;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ranks: Vec<usize> = (0..trials)
        .map(|_| {
            let s: Vec<f64> = (0..m).map(|_| rng.gen()).collect();
            rank_of(&s, rng.gen_range(0..m))
        })
        .collect();
    let (mrr, _) = metrics_from_ranks(&ranks, &[10]);
    let h: f64 = (1..=m).map(|k| 1.0 / k as f64).sum();
    let mean = h / m as f64;
    let second: f64 = (1..=m).map(|k| 1.0 / (k * k) as f64).sum::<f64>() / m as f64;
    let sd = ((second - mean * mean) / trials as f64).sqrt();
    assert!((mrr - mean).abs() < 3.0 * sd, "mrr {mrr} expected {mean} ± {sd}");
}

#[test]
fn mode_parsing() {
    assert_eq!("static-curvature".parse::<Mode>().unwrap(), Mode::Static);
    assert_eq!("euclidean".parse::<Mode>().unwrap(), Mode::Euclidean);
    assert!("hyper".parse::<Mode>().is_err());
}

#[test]
fn config_validation() {
    let mut c = TrainConfig::default();
    assert!(c.validate().is_ok());
    c.neg_rate = 0.0;
    assert!(matches!(c.validate(), Err(TrainError::Config(_))));
    let c = TrainConfig {
        n_intervals: 0,
        ..TrainConfig::default()
    };
    assert!(c.validate().is_err());
}

#[test]
fn zero_epochs_returns_initial_model() {
    let net = small_net();
    let cfg = TrainConfig {
        epochs: 0,
        ..small_cfg(Mode::Euclidean)
    };
    let out = train(&net, None, &cfg, None, |_| {}).unwrap();
    assert!(out.log.is_empty());
    assert_eq!(out.model.schedule, vec![[0.0, 0.0]]);
}

#[test]
fn runs_are_reproducible_and_checkpoints_round_trip() {
    let net = small_net();
    let (tr, va, te) = chronological_split(&net, [0.8, 0.1, 0.1]).unwrap();
    let cfg = small_cfg(Mode::Full);
    let mut streamed = Vec::new();
    let a = train(&tr, Some(&va), &cfg, None, |l| streamed.push(l.clone())).unwrap();
    let b = train(&tr, Some(&va), &cfg, None, |_| {}).unwrap();
    assert_eq!(a.log, b.log);
    assert_eq!(a.log, streamed);
    assert_eq!(a.model, b.model);
    assert!(a.log.iter().all(|l| l.loss.is_finite() && l.val_mrr.is_some()));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    a.model.checkpoint(&path).unwrap();
    let back = restore(&path).unwrap();
    let ks = [1, 10];
    assert_eq!(evaluate(&a.model, &te, &ks), evaluate(&back, &te, &ks));
}

#[test]
fn checkpoint_version_is_checked() {
    let net = small_net();
    let cfg = TrainConfig {
        epochs: 0,
        ..small_cfg(Mode::Static)
    };
    let model = train(&net, None, &cfg, None, |_| {}).unwrap().model;
    let text = model.to_json().unwrap().replacen("\"version\":1", "\"version\":99", 1);
    assert!(matches!(
        Model::from_json(&text),
        Err(TrainError::Version { found: 99, .. })
    ));
    assert!(Model::from_json("{\"version\":1,\"model\":").is_err());
}

#[test]
fn euclidean_mode_never_takes_curved_branch() {
    let net = small_net();
    reset_branch_counts();
    let out = train(&net, None, &small_cfg(Mode::Euclidean), None, |_| {}).unwrap();
    let c = branch_counts();
    assert_eq!(c.curved, 0);
    assert!(c.flat > 0);
    assert!(out.model.schedule.iter().all(|k| *k == [0.0, 0.0]));
}

#[test]
fn static_mode_keeps_configured_curvatures() {
    let net = small_net();
    let cfg = TrainConfig {
        static_kappa_user: -0.5,
        static_kappa_item: 0.25,
        ..small_cfg(Mode::Static)
    };
    let out = train(&net, None, &cfg, None, |_| {}).unwrap();
    assert_eq!(out.model.schedule.len(), cfg.n_intervals + 1);
    assert!(out.model.schedule.iter().all(|k| *k == [-0.5, 0.25]));
}

#[test]
fn full_mode_curvatures_stay_bounded() {
    let net = small_net();
    let cfg = TrainConfig {
        curvature_bound: 0.5,
        ..small_cfg(Mode::Full)
    };
    let out = train(&net, None, &cfg, None, |_| {}).unwrap();
    for k in &out.model.schedule {
        assert!(k.iter().all(|x| x.abs() <= 0.5), "{k:?}");
    }
}

#[test]
fn top_k_is_sorted_and_sized() {
    let net = small_net();
    let out = train(&net, None, &small_cfg(Mode::Full), None, |_| {}).unwrap();
    let top = out.model.top_k(3, 5);
    assert_eq!(top.len(), 5);
    assert!(top.windows(2).all(|w| w[0].1 >= w[1].1));
    assert!(top.iter().all(|(_, p)| (0.0..=1.0).contains(p)));
}
