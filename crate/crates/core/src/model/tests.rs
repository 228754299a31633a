use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::diff::{gradient_check, Var};
use crate::graph::{IntervalBatch, InteractionRecord};
use crate::linalg::{self, Matrix};
use crate::manifold::Curvature;
use crate::scalar::Real;

fn rand_vec(rng: &mut ChaCha8Rng, n: usize, s: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-s..s)).collect()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn toy_params(d: usize, seed: u64) -> (ModelConfig, ModelParams<f64>) {
    let cfg = ModelConfig::new(4, 3, d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (store, layout) = ParamLayout::init(&cfg, &mut rng).unwrap();
    let p = ModelParams::from_store(&cfg, &layout, &store);
    (cfg, p)
}

#[test]
fn encode_time_examples() {
    for t in [0.0, 1.5, -3.0] {
        assert_eq!(encode_time(t, &[0.0], &[0.0]), vec![1.0]);
        let v = encode_time(t, &[0.0, 0.0], &[0.0, std::f64::consts::FRAC_PI_2]);
        assert!(close(&v, &[0.5f64.sqrt(), 0.0], 1e-15));
    }
}

#[test]
fn embed_interaction_examples() {
    let code = encode_time(0.3, &[1.0, 2.0], &[0.1, 0.2]);
    let zero = embed_interaction(&[0.5], &code, &Matrix::zeros(2, 3));
    assert_eq!(zero, vec![0.0, 0.0]);
    let w1 = Matrix::new(2, 2, vec![0.3, -0.2, 0.5, 0.1]);
    let e = embed_interaction::<f64>(&[], &code, &w1);
    assert_eq!(e, linalg::tanh(&w1.matvec(&code)));
}

#[test]
fn embed_interaction_gradient() {
    let code = [0.4, -0.3];
    let r = gradient_check(
        |w: &[Var]| {
            let w1 = Matrix::new(2, 3, w.to_vec());
            let code: Vec<Var> = code.iter().map(|&c| Var::constant(c)).collect();
            Var::sum(&embed_interaction(&[0.7], &code, &w1))
        },
        &[0.1, -0.4, 0.3, 0.2, 0.5, -0.6],
        1e-6,
        1e-4,
    );
    assert!(r.passed(), "{}", r.max_rel_error);
}

#[test]
fn fuse_examples() {
    let id = Mlp::identity(2);
    let e = vec![0.3, -0.7];
    for mode in [FusionMode::Early, FusionMode::Late] {
        for pooling in [Pooling::Mean, Pooling::Max] {
            let cfg = FusionConfig {
                mode,
                pooling,
                layers: 1,
            };
            assert_eq!(fuse_edges(&[e.clone()], &id, &cfg), Some(e.clone()));
            assert_eq!(fuse_edges::<f64>(&[], &id, &cfg), None);
        }
    }
    let early = FusionConfig::default();
    let neg = linalg::neg(&e);
    assert_eq!(fuse_edges(&[e.clone(), neg], &id, &early), Some(vec![0.0, 0.0]));
    let late = FusionConfig {
        mode: FusionMode::Late,
        pooling: Pooling::Max,
        layers: 1,
    };
    let mlp = Mlp {
        w: Matrix::new(2, 2, vec![1.0, 1.0, 0.0, -1.0]),
        b: vec![0.0, 0.5],
        tanh: false,
    };
    let edges = vec![vec![1.0, 2.0], vec![-1.0, -3.0], vec![0.5, 0.0]];
    // mapped: (3, -1.5), (-4, 3.5), (0.5, 0.5)
    assert_eq!(fuse_edges(&edges, &mlp, &late), Some(vec![3.0, 3.5]));
}

#[test]
fn attention_examples() {
    let q = vec![0.2, -0.1, 0.4];
    let a = vec![1.0, 0.5, 2.0];
    assert_eq!(attention_weights(&q, &[vec![1.0, 2.0, 3.0]], &a), vec![1.0]);
    let n = vec![0.3, 0.3, -0.2];
    let w = attention_weights(&q, &[n.clone(), n.clone(), n], &a);
    assert!(close(&w, &[1.0 / 3.0; 3], 1e-15));
    let nbs = vec![vec![0.1, 0.2, 0.3], vec![-0.5, 0.0, 0.2], vec![0.4, -0.4, 0.0]];
    let w1 = attention_weights(&q, &nbs, &a);
    assert!((w1.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    // shifting every neighbour by c adds (a∘q)·c to every score
    let c = [1.0, -2.0, 0.5];
    let shifted: Vec<Vec<f64>> = nbs.iter().map(|n| linalg::add(n, &c)).collect();
    assert!(close(&attention_weights(&q, &shifted, &a), &w1, 1e-14));
}

#[test]
fn aggregate_identity_without_neighbors() {
    let (_, mut p) = toy_params(3, 1);
    p.m[0] = Matrix::identity(3);
    let cfg = FusionConfig::default();
    let k = Curvature::new(-1.0);
    let u = vec![0.2, -0.1, 0.3];
    let h = k.log0(&u);
    let out = aggregate_user(&p, &cfg, &h, &[], &[], &k, &Curvature::new(-0.5));
    assert!(close(&out, &u, 1e-15));
}

/// Plain linear algebra: `M1 h + M2 e' + M3 Σ α_j n_j`.
fn flat_reference(p: &ModelParams<f64>, h: &[f64], edges: &[Vec<f64>], nb: &[Vec<f64>]) -> Vec<f64> {
    let e = p.fusion.apply(&linalg::mean_pool(edges));
    let a = attention_weights(h, nb, &p.attn_user);
    let mut mid = vec![0.0; h.len()];
    for (w, n) in a.iter().zip(nb) {
        mid = linalg::add(&mid, &linalg::scale(n, *w));
    }
    let t1 = p.m[0].matvec(h);
    let t2 = p.m[1].matvec(&e);
    let t3 = p.m[2].matvec(&mid);
    linalg::add(&linalg::add(&t1, &t2), &t3)
}

#[test]
fn flat_collapse() {
    let (_, p) = toy_params(4, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let flat = Curvature::new(0.0);
    for _ in 0..20 {
        let h = rand_vec(&mut rng, 4, 0.5);
        let edges: Vec<_> = (0..3).map(|_| rand_vec(&mut rng, 4, 0.8)).collect();
        let nb: Vec<_> = (0..2).map(|_| rand_vec(&mut rng, 4, 0.5)).collect();
        let out = aggregate_user(&p, &FusionConfig::default(), &h, &edges, &nb, &flat, &flat);
        assert!(close(&out, &flat_reference(&p, &h, &edges, &nb), 1e-12));
    }
}

#[test]
fn user_item_mirror() {
    let (_, mut p) = toy_params(3, 3);
    for k in 0..3 {
        p.m[k + 3] = p.m[k].clone();
    }
    p.attn_item = p.attn_user.clone();
    let cfg = FusionConfig::default();
    let (ku, ki) = (Curvature::new(-0.7), Curvature::new(0.4));
    let h = vec![0.1, 0.2, -0.3];
    let edges = vec![vec![0.3, 0.1, 0.0]];
    let nb = vec![vec![-0.2, 0.1, 0.4], vec![0.5, 0.0, 0.1]];
    let a = aggregate_user(&p, &cfg, &h, &edges, &nb, &ku, &ki);
    let b = aggregate_item(&p, &cfg, &h, &edges, &nb, &ku, &ki);
    assert_eq!(a, b);
}

#[test]
fn aggregate_item_gradient_wrt_m4() {
    let (_, p) = toy_params(3, 4);
    let cfg = FusionConfig::default();
    let h = [0.1, 0.2, -0.3];
    let edges = [[0.3, 0.1, 0.0]];
    let nb = [[-0.2, 0.1, 0.4], [0.5, 0.0, 0.1]];
    let m4 = p.m[3].data.clone();
    let r = gradient_check(
        |w: &[Var]| {
            let mut q: ModelParams<Var> = ModelParams {
                user_table: p.user_table.map(Var::constant),
                item_table: p.item_table.map(Var::constant),
                m: p.m.clone().map(|m| m.map(Var::constant)),
                w1: p.w1.map(Var::constant),
                omega: crate::scalar::lift(&p.omega),
                theta: crate::scalar::lift(&p.theta),
                attn_user: crate::scalar::lift(&p.attn_user),
                attn_item: crate::scalar::lift(&p.attn_item),
                fusion: Mlp {
                    w: p.fusion.w.map(Var::constant),
                    b: crate::scalar::lift(&p.fusion.b),
                    tanh: true,
                },
                rho: Var::constant(p.rho),
                curv: crate::curvature::CurvNN {
                    w_in: crate::scalar::lift(&p.curv.w_in),
                    b_in: crate::scalar::lift(&p.curv.b_in),
                    w_hidden: p.curv.w_hidden.map(Var::constant),
                    b_hidden: crate::scalar::lift(&p.curv.b_hidden),
                    w2: p.curv.w2.map(Var::constant),
                },
            };
            q.m[3] = Matrix::new(3, 3, w.to_vec());
            let lift = |x: &[f64]| crate::scalar::lift::<Var>(x);
            let ki = Curvature::new(Var::constant(-0.8));
            let ku = Curvature::new(Var::constant(-0.3));
            let e: Vec<Vec<Var>> = edges.iter().map(|x| lift(x)).collect();
            let n: Vec<Vec<Var>> = nb.iter().map(|x| lift(x)).collect();
            let out = aggregate_item(&q, &cfg, &lift(&h), &e, &n, &ki, &ku);
            let probe = lift(&[0.3, -0.5, 0.7]);
            Var::dot(&out, &probe)
        },
        &m4,
        1e-6,
        1e-4,
    );
    assert!(r.passed(), "{}", r.max_rel_error);
}

#[test]
fn interval_aggregation_touches_only_active_nodes() {
    let (mut cfg, p) = toy_params(3, 6);
    cfg.fusion.layers = 2;
    let recs = vec![InteractionRecord::new(0, 1, 0.2), InteractionRecord::new(2, 1, 0.4)];
    let batch = IntervalBatch::new(0, 0.0, 1.0, recs);
    let k = Curvature::new(-1.0);
    let out = aggregate_interval(&p, &cfg, &batch, &k, &k);
    assert_eq!(out.users.keys().copied().collect::<Vec<_>>(), vec![0, 2]);
    assert_eq!(out.items.keys().copied().collect::<Vec<_>>(), vec![1]);
    assert!(out.users.values().flatten().all(|x| x.is_finite()));
}

#[test]
fn advance_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pts: Vec<Vec<f64>> = (0..5).map(|_| rand_vec(&mut rng, 3, 0.4)).collect();
    let a = Curvature::new(-1.0);
    let b = Curvature::new(-0.3);
    assert_eq!(advance_interval(&pts, &a, &a), pts);
    let origin = vec![vec![0.0; 3]];
    assert_eq!(advance_interval(&origin, &a, &b), origin);
    let there = advance_interval(&pts, &a, &b);
    let back = advance_interval(&there, &b, &a);
    for (x, y) in back.iter().zip(&pts) {
        assert!(close(x, y, 1e-8));
    }
}

#[test]
fn score_examples() {
    assert_eq!(fermi_dirac(2.0, 2.0, 1.0), 0.5);
    let k = Curvature::new(-1.0);
    let vu = [0.1, 0.0];
    let mut last = 1.0;
    for s in [0.2, 0.5, 1.0, 2.0, 4.0] {
        let p = score(&vu, &[s, 0.0], &k, &k, 0.0, 2.0, 1.0);
        assert!(p < last && p > 0.0);
        last = p;
    }
    // equal curvatures: the two decoders agree, so ρ is irrelevant
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let a = rand_vec(&mut rng, 3, 1.0);
        let b = rand_vec(&mut rng, 3, 1.0);
        let p1 = score(&a, &b, &k, &k, -3.0, 2.0, 1.0);
        let p2 = score(&a, &b, &k, &k, 3.0, 2.0, 1.0);
        assert!((p1 - p2).abs() < 1e-12);
    }
}

#[test]
fn loss_examples() {
    let l = loss::<f64>(&[1.0, 1.0], &[0.0], &[0.0, 0.0]);
    assert!(l.total.is_finite());
    assert!(l.pull.abs() < 1e-11);
    assert!((l.push - PROB_FLOOR.ln()).abs() < 1e-9);
    assert_eq!(l.curvature, 0.0);
    let better = loss(&[0.9], &[0.1], &[0.0]);
    let worse = loss(&[0.6], &[0.4], &[0.0]);
    assert!(better.total < worse.total);
    assert_eq!(loss::<f64>(&[], &[], &[-0.5, 0.25]).curvature, 0.75);
}

#[test]
fn negative_sampling_examples() {
    let pos: Vec<(usize, usize)> = (0..10).map(|k| (k % 4, k % 6)).collect();
    let neg = negative_sample(&pos, 20, 0.2, 5, 11);
    assert_eq!(neg.len(), 10);
    assert_eq!(neg, negative_sample(&pos, 20, 0.2, 5, 11));
    for n in &neg {
        assert!(!pos.contains(n));
    }
    let full: Vec<(usize, usize)> = vec![(0, 0), (0, 1)];
    assert!(negative_sample(&full, 2, 1.0, 5, 0).is_empty());
    let mixed = vec![(0, 0), (0, 1), (1, 0)];
    let n = negative_sample(&mixed, 2, 1.0, 1, 0);
    assert_eq!(n, vec![(1, 1); 3]);
}

#[test]
fn config_validation() {
    let mut cfg = ModelConfig::new(2, 2, 4);
    assert!(cfg.validate().is_ok());
    cfg.fusion.layers = 0;
    assert!(cfg.validate().is_err());
}

proptest! {
    #[test]
    fn time_code_bounded(t in -100.0f64..100.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = rand_vec(&mut rng, 8, 5.0);
        let th = rand_vec(&mut rng, 8, 5.0);
        let v = encode_time(t, &w, &th);
        prop_assert!(linalg::norm2(&v) <= 1.0 + 1e-12);
        let bound = (1.0f64 / 8.0).sqrt() + 1e-15;
        prop_assert!(v.iter().all(|c| c.abs() <= bound));
    }

    #[test]
    fn score_role_swap(
        seed in any::<u64>(),
        ku in -2.0f64..1.0,
        ki in -2.0f64..1.0,
        rho in -3.0f64..3.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = rand_vec(&mut rng, 4, 0.6);
        let b = rand_vec(&mut rng, 4, 0.6);
        let (cu, ci) = (Curvature::new(ku), Curvature::new(ki));
        let p = score(&a, &b, &cu, &ci, rho, 2.0, 1.0);
        let q = score(&b, &a, &ci, &cu, -rho, 2.0, 1.0);
        prop_assert!((p - q).abs() < 1e-12);
        prop_assert!(p > 0.0 && p < 1.0);
    }
}
