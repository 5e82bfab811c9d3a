mod common;

use common::*;
use ksets_core::datagen::{gen_sbm, gen_two_rings, sbm_rates, sbm_threshold, RingsConfig};
use ksets_core::euclidean_distance;
use proptest::prelude::*;

#[test]
fn rings_are_deterministic_and_in_range() {
    let cfg = RingsConfig::default();
    let a = gen_two_rings(&cfg, 7).unwrap();
    assert_eq!(a, gen_two_rings(&cfg, 7).unwrap());
    assert_ne!(a.data, gen_two_rings(&cfg, 8).unwrap().data);
    assert_eq!(a.data.len(), 500);
    assert_eq!(a.labels.iter().filter(|&&l| l == 0).count(), 300);
    assert!(a.labels[..300].iter().all(|&l| l == 0));
    for (p, &l) in a.data.iter().zip(&a.labels) {
        let r = p[0].hypot(p[1]);
        let [lo, hi] = if l == 0 { cfg.r_outer } else { cfg.r_inner };
        assert!(r >= lo - 1e-9 && r <= hi + 1e-9, "{r}");
    }
    // rings are at least the radial gap apart
    let d = euclidean_distance(&a.data).unwrap();
    let min_cross = (0..300)
        .flat_map(|i| (300..500).map(move |j| (i, j)))
        .map(|(i, j)| d.get(i, j))
        .fold(f64::INFINITY, f64::min);
    assert!(min_cross >= 8.0 - 1e-9);
}

#[test]
fn rings_reject_bad_config() {
    let cfg = RingsConfig {
        r_inner: [12.0, 10.0],
        ..RingsConfig::default()
    };
    assert!(gen_two_rings(&cfg, 0).is_err());
    let cfg = RingsConfig {
        n_inner: 0,
        ..RingsConfig::default()
    };
    assert!(gen_two_rings(&cfg, 0).is_err());
}

#[test]
fn sbm_rates_algebra() {
    let (c_in, c_out) = sbm_rates(2, 3.0, 5.9).unwrap();
    assert!((c_in - c_out - 5.9).abs() < 1e-12);
    assert!((c_in + c_out - 6.0).abs() < 1e-12);
    assert!((sbm_threshold(2, 3.0) - 2.0 * 3f64.sqrt()).abs() < 1e-12);
    assert!(sbm_rates(2, 3.0, 7.0).is_err());
}

#[test]
fn sbm_mean_degree_and_determinism() {
    let (c_in, c_out) = sbm_rates(2, 3.0, 2.5).unwrap();
    let a = gen_sbm(1000, 2, c_in, c_out, 3).unwrap();
    assert_eq!(a, gen_sbm(1000, 2, c_in, c_out, 3).unwrap());
    // before isolated vertices are dropped the expected mean degree is ~3
    let mean = 2.0 * a.data.edge_count() as f64 / 1000.0;
    assert!((2.5..=3.5).contains(&mean), "{mean}");
    assert_eq!(a.labels.len(), a.data.n());
    assert!((0..a.data.n()).all(|v| a.data.degree(v) > 0));
    assert!(a.labels.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn sbm_rejects_bad_parameters() {
    assert!(gen_sbm(10, 3, 1.0, 1.0, 0).is_err());
    assert!(gen_sbm(10, 2, 20.0, 1.0, 0).is_err());
    assert!(gen_sbm(10, 2, 1.0, -1.0, 0).is_err());
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn sbm_without_cross_rate_has_no_cross_edges(seed in any::<u64>(), q in 1usize..4) {
        let n = 60 * q;
        let ds = gen_sbm(n, q, 6.0, 0.0, seed).unwrap();
        for (a, b) in ds.data.edges() {
            prop_assert_eq!(ds.labels[a], ds.labels[b]);
        }
    }

    #[test]
    fn rings_radii_hold_for_any_seed(seed in any::<u64>()) {
        let cfg = RingsConfig { n_outer: 40, n_inner: 30, ..RingsConfig::default() };
        let ds = gen_two_rings(&cfg, seed).unwrap();
        for (p, &l) in ds.data.iter().zip(&ds.labels) {
            let r = p[0].hypot(p[1]);
            let [lo, hi] = if l == 0 { cfg.r_outer } else { cfg.r_inner };
            prop_assert!(r >= lo - 1e-9 && r <= hi + 1e-9);
        }
    }
}

#[test]
fn sbm_is_uniform_enough() {
    // with c_in = c_out the block structure is invisible: cross edges are about half
    let mut rng = TestRng::new(11);
    let seed = rng.below(1 << 30) as u64;
    let ds = gen_sbm(400, 2, 4.0, 4.0, seed).unwrap();
    let cross = ds
        .data
        .edges()
        .iter()
        .filter(|&&(a, b)| ds.labels[a] != ds.labels[b])
        .count();
    let frac = cross as f64 / ds.data.edge_count() as f64;
    assert!((0.4..0.6).contains(&frac), "{frac}");
}
