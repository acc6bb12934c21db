use std::f64::consts::{PI, TAU};

use angsync::baselines::{estimate_lsqr, estimate_sdp, sdp_objective, LsqrOptions, SdpOptions};
use angsync::generators::{gen_complete, gen_small_world, CompleteModelParams, SmallWorldParams};
use angsync::metrics::rho1;
use angsync::{Method, OffsetGraph};
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};

#[test]
fn all_good_graphs_are_solved_exactly() {
    let (g, t) = gen_small_world(&SmallWorldParams { n: 120, epsilon: 0.3, p: 1.0, seed: 4 }).unwrap();
    assert!(g.is_connected());

    let l = estimate_lsqr(&g, &LsqrOptions::default()).unwrap();
    assert_eq!(l.method, Method::Lsqr);
    assert!((rho1(&l.theta_hat, &t.theta).unwrap() - 1.0).abs() < 1e-6);

    let s = estimate_sdp(&g, &SdpOptions::default()).unwrap();
    assert_eq!(s.estimate.method, Method::Sdp);
    assert!((rho1(&s.estimate.theta_hat, &t.theta).unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(s.theta_rank, 1);
    // the planted assignment attains 2m, the largest possible value
    assert!((s.objective - 2.0 * g.m() as f64).abs() < 1e-6 * g.m() as f64);
}

#[test]
fn objective_examples() {
    let (g, t) = gen_complete(&CompleteModelParams { n: 20, p: 1.0, seed: 2 }).unwrap();
    assert!((sdp_objective(&g, &t.theta).unwrap() - 2.0 * g.m() as f64).abs() < 1e-9);

    let single = OffsetGraph::new(2, [(0, 1, PI)]).unwrap();
    assert!((sdp_objective(&single, &[0.0, 0.0]).unwrap() + 2.0).abs() < 1e-12);
    assert!(sdp_objective(&single, &[0.0]).is_err());
}

#[test]
fn random_assignment_on_noise_cancels() {
    let n = 100;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let trials = 20;
    let mut total = 0.0;
    for seed in 0..trials {
        let (g, _) = gen_complete(&CompleteModelParams { n, p: 0.0, seed }).unwrap();
        let theta: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * TAU).collect();
        total += sdp_objective(&g, &theta).unwrap().abs();
    }
    // each of the m terms is 2 cos(U); the sum has standard deviation sqrt(2m) ~ n
    let mean = total / trials as f64;
    assert!(mean < 3.0 * n as f64, "{mean}");
}

#[test]
fn ascent_is_monotone_and_feasible() {
    for p in [0.3, 0.7] {
        let (g, _) = gen_small_world(&SmallWorldParams { n: 80, epsilon: 0.4, p, seed: 9 }).unwrap();
        let s = estimate_sdp(&g, &SdpOptions { seed: 1, ..Default::default() }).unwrap();
        assert!(s.history.windows(2).all(|w| w[1] >= w[0]), "p={p}");
        assert!(s.max_row_norm_error <= 1e-12, "{}", s.max_row_norm_error);
        let r = s.rank;
        for row in s.factor.chunks(r) {
            let norm: f64 = row.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() <= 1e-12);
        }
        assert!((s.objective - s.history.last().unwrap()).abs() < 1e-9 * s.objective.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn relaxation_dominates_its_rounding(n in 5usize..40, p in 0.0f64..1.0, seed in 0u64..1000) {
        let (g, _) = gen_complete(&CompleteModelParams { n, p, seed }).unwrap();
        let s = estimate_sdp(&g, &SdpOptions { seed, ..Default::default() }).unwrap();
        let rounded = sdp_objective(&g, &s.estimate.theta_hat).unwrap();
        prop_assert!(s.objective >= rounded - 1e-9 * s.objective.abs().max(1.0));
    }
}

/// Maximum of the quadratic form over angles on a grid of `levels` points,
/// with vertex 0 fixed at angle 0.
fn grid_maximum(graph: &OffsetGraph, levels: usize) -> f64 {
    let n = graph.n();
    let step = TAU / levels as f64;
    let mut theta = vec![0.0; n];
    let mut best = f64::NEG_INFINITY;
    let total = levels.pow((n - 1) as u32);
    for code in 0..total {
        let mut c = code;
        for t in theta.iter_mut().skip(1) {
            *t = (c % levels) as f64 * step;
            c /= levels;
        }
        best = best.max(sdp_objective(graph, &theta).unwrap());
    }
    best
}

#[test]
fn factorized_sdp_matches_grid_search() {
    let n = 5;
    let levels = 64;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
    let theta: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * TAU).collect();
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let noise = (rng.random::<f64>() - 0.5) * 0.2;
            triples.push((i, j, theta[i] - theta[j] + noise));
        }
    }
    let g = OffsetGraph::new(n, triples).unwrap();
    let s = estimate_sdp(&g, &SdpOptions { rank: Some(n), ..Default::default() }).unwrap();
    let grid = grid_maximum(&g, levels);
    // a grid point lies within pi/levels of the optimum in every free angle, so
    // each edge argument moves by at most 2 pi/levels
    let deficit = 2.0 * g.m() as f64 * (TAU / levels as f64);
    assert!(s.objective >= grid - 1e-9, "{} < {grid}", s.objective);
    assert!(s.objective - grid <= deficit, "{} vs {grid}", s.objective);
    assert_eq!(s.theta_rank, 1);
}

#[test]
fn disconnected_graphs_anchor_each_component() {
    let theta = [0.3, 1.1, 2.0, 4.0, 5.5, 0.2];
    let edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5)];
    let g = OffsetGraph::new(6, edges.iter().map(|&(i, j)| (i, j, theta[i] - theta[j]))).unwrap();
    let e = estimate_lsqr(&g, &LsqrOptions::default()).unwrap();
    assert_eq!(e.components, 2);
    assert!(e.converged);
    // each component is exact up to its own phase
    for comp in [[0, 1, 2].as_slice(), [3, 4, 5].as_slice()] {
        let est: Vec<f64> = comp.iter().map(|&k| e.theta_hat[k]).collect();
        let truth: Vec<f64> = comp.iter().map(|&k| theta[k]).collect();
        assert!((rho1(&est, &truth).unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn solver_options_are_validated() {
    let g = OffsetGraph::new(3, [(0, 1, 0.0)]).unwrap();
    assert!(estimate_sdp(&g, &SdpOptions { rank: Some(0), ..Default::default() }).is_err());
    assert!(estimate_sdp(&g, &SdpOptions { rank: Some(4), ..Default::default() }).is_err());
}

#[test]
fn small_world_single_instances() {
    let (g, t) = gen_small_world(&SmallWorldParams { n: 200, epsilon: 0.3, p: 0.7, seed: 1 }).unwrap();
    let s = estimate_sdp(&g, &SdpOptions { seed: 1, ..Default::default() }).unwrap();
    assert!(rho1(&s.estimate.theta_hat, &t.theta).unwrap() > 0.95);
    assert!(s.theta_rank <= 3);
    let l = estimate_lsqr(&g, &LsqrOptions::default()).unwrap();
    let r = rho1(&l.theta_hat, &t.theta).unwrap();
    assert!(r < 0.95 && r > 0.3, "{r}");
}
