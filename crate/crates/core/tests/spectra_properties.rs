use angsync::eig::{build_sync_matrix, top_eigpair};
use angsync::generators::{gen_complete, gen_small_world, CompleteModelParams, SmallWorldParams};
use angsync::spectra::{full_spectrum, histogram, top_k_spectrum};
use angsync::theory::wigner_edge;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trace_and_frobenius_identities(n in 2usize..60, p in 0.0f64..1.0, shift in -2.0f64..2.0, seed in any::<u64>()) {
        let (g, _) = gen_complete(&CompleteModelParams { n, p, seed }).unwrap();
        let h = build_sync_matrix(&g, shift);
        let values = full_spectrum(&h).unwrap();
        prop_assert_eq!(values.len(), n);
        prop_assert!(values.windows(2).all(|w| w[0] >= w[1]));
        let trace: f64 = values.iter().sum();
        prop_assert!((trace - n as f64 * shift).abs() <= 1e-8 * n as f64);
        let frob: f64 = values.iter().map(|v| v * v).sum();
        let m = g.m() as f64;
        prop_assert!((frob - (2.0 * m + n as f64 * shift * shift)).abs() <= 1e-8 * m.max(1.0));
    }

    #[test]
    fn dense_and_power_iteration_agree(n in 3usize..50, eps in 0.3f64..1.0, p in 0.0f64..1.0, seed in any::<u64>()) {
        let (g, _) = gen_small_world(&SmallWorldParams { n, epsilon: eps, p, seed }).unwrap();
        prop_assume!(g.m() > 0);
        let h = build_sync_matrix(&g, 0.0);
        let top = top_k_spectrum(&h, 1).unwrap()[0];
        let pair = top_eigpair(&h, 1e-12, 1_000_000, seed).unwrap();
        prop_assert!(pair.converged);
        prop_assert!((pair.value - top).abs() <= 1e-8 * top.abs().max(1.0), "{} vs {}", pair.value, top);
    }

    #[test]
    fn histogram_counts_everything(values in proptest::collection::vec(-1e3f64..1e3, 1..200), bins in 1usize..30) {
        let h = histogram(&values, bins).unwrap();
        prop_assert_eq!(h.len(), bins);
        prop_assert_eq!(h.iter().map(|b| b.1).sum::<usize>(), values.len());
    }
}

#[test]
fn pure_noise_stays_inside_the_semicircle() {
    let (g, _) = gen_complete(&CompleteModelParams { n: 400, p: 0.0, seed: 3 }).unwrap();
    let values = full_spectrum(&build_sync_matrix(&g, 0.0)).unwrap();
    let edge = wigner_edge(400, 0.0).unwrap();
    assert!(values[0] < 1.05 * edge && values[0] > 0.9 * edge, "{}", values[0]);
    assert!(values[399] > -1.05 * edge && values[399] < -0.9 * edge, "{}", values[399]);
}

#[test]
fn at_threshold_no_outlier_separates() {
    let p = 0.05;
    let edge = wigner_edge(400, p).unwrap();
    let seeds = 10u64;
    let below = (0..seeds)
        .filter(|&seed| {
            let (g, _) = gen_complete(&CompleteModelParams { n: 400, p, seed }).unwrap();
            full_spectrum(&build_sync_matrix(&g, p)).unwrap()[0] < 1.05 * edge
        })
        .count();
    assert!(below as u64 * 10 >= seeds * 8, "{below}/{seeds}");
}
