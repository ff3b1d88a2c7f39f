use super::theory::{predicted_generator_block, GeneratorPart};
use super::*;
use crate::dynamics::{replica_rng, run_replicas, sample_initial, InitialDistribution};
use crate::oracle::{expectation, Distribution};
use proptest::prelude::*;

fn ring(values: &[u8]) -> Configuration {
    Configuration::from_values(Topology::ring(values.len()).unwrap(), values).unwrap()
}

#[test]
fn density_examples() {
    assert_eq!(density_of_ones(&ring(&[1; 5])), 1.0);
    assert_eq!(density_of_ones(&ring(&[2; 5])), 0.0);
    assert_eq!(density_of_ones(&ring(&[1, 2, 2, 1])), 0.5);
}

#[test]
fn block_indicator_examples() {
    assert_eq!(block_indicator(&ring(&[1; 6]), 3, 0).unwrap(), 1);
    assert_eq!(block_indicator(&ring(&[2; 6]), 1, 0).unwrap(), 0);
    let c = ring(&[2, 1, 1, 2, 2, 2]);
    assert_eq!(block_indicator(&c, 2, 0).unwrap(), 1);
    assert_eq!(block_indicator(&c, 3, 0).unwrap(), 0);
    // Wraps on a ring.
    assert_eq!(block_indicator(&ring(&[1, 2, 2, 2, 1]), 2, 3).unwrap(), 1);
    assert!(block_indicator(&c, 0, 0).is_err());
    assert!(block_indicator(&c, 7, 0).is_err());
    let i = Configuration::from_values(Topology::interval(4).unwrap(), &[1, 1, 1, 1]).unwrap();
    assert_eq!(block_indicator(&i, 3, 0).unwrap(), 1);
    assert!(block_indicator(&i, 3, 1).is_err());
}

#[test]
fn gap_examples() {
    let g = gap_statistics(&ring(&[1, 2, 2, 1])).unwrap();
    assert_eq!(g.into_iter().collect::<Vec<_>>(), vec![(1, 1), (3, 1)]);
    let g = gap_statistics(&ring(&[1, 2, 1, 2, 1, 2])).unwrap();
    assert_eq!(g.into_iter().collect::<Vec<_>>(), vec![(2, 3)]);
    let c = ring(&[1, 2, 2, 1, 1, 2, 2, 2]);
    assert_eq!(dual_gap_statistics(&c).unwrap(), gap_statistics(&c.global_flip()).unwrap());
    assert!(matches!(gap_statistics(&ring(&[1, 2, 2])), Err(Error::Undefined(_))));
    let i = Configuration::from_values(Topology::interval(4).unwrap(), &[1, 1, 1, 1]).unwrap();
    assert!(matches!(gap_statistics(&i), Err(Error::Unsupported(_))));
}

#[test]
fn renewal_examples() {
    assert_eq!(renewal_identity_residual(&ring(&[1, 2, 1, 2])).unwrap(), 0.0);
    assert_eq!(renewal_identity_residual(&ring(&[1; 4])).unwrap(), 0.0);
    assert_eq!(renewal_identity_residual(&ring(&[2, 2, 1])).unwrap(), 0.0);
    assert!(matches!(renewal_identity_residual(&ring(&[2; 4])), Err(Error::Undefined(_))));
}

#[test]
fn pair_correlation_of_product_sample_is_small() {
    let mut rng = replica_rng(31, 0);
    let c = sample_initial(&InitialDistribution::Product { rho: 0.4 }, Topology::ring(100_000).unwrap(), &mut rng).unwrap();
    for r in 1..5 {
        assert!(pair_correlation(&c, r).abs() < 0.01);
    }
    let alt = ring(&[1, 2, 1, 2, 1, 2]);
    assert!((pair_correlation(&alt, 2) - 0.25).abs() < 1e-15);
    assert!((pair_correlation(&alt, 1) + 0.25).abs() < 1e-15);
}

/// `∫ (part) H_n dλ_ρ` on a small ring by enumerating every configuration.
fn exact_block_value(n_sites: usize, rho: f64, n: usize, which: GeneratorPart) -> f64 {
    let t = Topology::ring(n_sites).unwrap();
    expectation(&Distribution::product(t, rho), |c| {
        let h = |d: &Configuration| block_indicator(d, n, 0).unwrap() as f64;
        let before = h(c);
        (0..n_sites)
            .map(|x| match which {
                GeneratorPart::LS => h(&c.add(x).unwrap()) - before,
                GeneratorPart::LF => h(&c.flip(x).unwrap()) - before,
                GeneratorPart::SA => h(&c.add(x).unwrap()) + h(&c.anti_add(x).unwrap()) - 2.0 * before,
            })
            .sum()
    })
}

#[test]
fn block_estimator_matches_enumeration_on_small_ring() {
    // On a 10-site ring many samples fall back to the whole ring, so both
    // code paths are exercised against the exact finite-ring value.
    let mut rng = replica_rng(32, 0);
    for (rho, n, which) in [(0.5, 2, GeneratorPart::LS), (0.3, 2, GeneratorPart::SA), (0.7, 3, GeneratorPart::LF), (0.15, 2, GeneratorPart::LS)] {
        let exact = exact_block_value(10, rho, n, which);
        let est = mc_generator_block_estimate(rho, n, which, 200_000, Topology::ring(10).unwrap(), &mut rng).unwrap();
        assert!((est.mean - exact).abs() < 1.5 * est.half_width.max(1e-3), "{which:?} ρ={rho}: {est:?} vs {exact}");
    }
}

#[test]
fn block_enumeration_on_large_ring_approaches_formulas() {
    // Ring of 14 sites: wrap corrections are small at ρ = 0.5.
    for (n, which) in [(2, GeneratorPart::LS), (2, GeneratorPart::LF), (2, GeneratorPart::SA), (3, GeneratorPart::SA)] {
        let exact = exact_block_value(14, 0.5, n, which);
        let formula = predicted_generator_block(0.5, n, which).unwrap();
        assert!((exact - formula).abs() < 0.01, "{which:?} n={n}: {exact} vs {formula}");
    }
}

#[test]
fn block_estimator_examples() {
    let big = Topology::ring(100_000).unwrap();
    let mut rng = replica_rng(33, 0);
    for (n, which, expected) in [(2, GeneratorPart::LS, -1.0), (2, GeneratorPart::LF, 0.0), (3, GeneratorPart::SA, 0.125)] {
        let est = mc_generator_block_estimate(0.5, n, which, 1_000_000, big, &mut rng).unwrap();
        // A single 95% interval misses 5% of the time; 1.5 half-widths is
        // about 3σ. Coverage itself is checked below.
        assert!((est.mean - expected).abs() < 1.5 * est.half_width, "{which:?}: {est:?}");
        assert!(est.half_width <= 0.02);
    }
}

#[test]
fn block_estimator_refusals() {
    let big = Topology::ring(1000).unwrap();
    let mut rng = replica_rng(34, 0);
    assert!(mc_generator_block_estimate(0.0, 2, GeneratorPart::LS, 100, big, &mut rng).is_err());
    assert!(mc_generator_block_estimate(1.0, 2, GeneratorPart::LS, 100, big, &mut rng).is_err());
    assert!(mc_generator_block_estimate(0.5, 0, GeneratorPart::LS, 100, big, &mut rng).is_err());
    assert!(mc_generator_block_estimate(0.5, 2, GeneratorPart::LS, 10, big, &mut rng).is_err());
    let interval = Topology::interval(1000).unwrap();
    assert!(mc_generator_block_estimate(0.5, 2, GeneratorPart::LS, 100, interval, &mut rng).is_err());
}

#[test]
fn block_estimator_coverage() {
    let big = Topology::ring(100_000).unwrap();
    let covered = run_replicas(100, 35, |_, mut rng| {
        let est = mc_generator_block_estimate(0.5, 2, GeneratorPart::LS, 20_000, big, &mut rng).unwrap();
        est.covers(-1.0)
    });
    let hits = covered.iter().filter(|&&c| c).count();
    assert!(hits >= 93, "{hits}/100 intervals cover the closed form");
}

#[test]
fn replicate_means_interval() {
    let values: Vec<f64> = (0..40).map(|i| (i % 4) as f64).collect();
    let e = replicate_means(&values).unwrap();
    assert_eq!(e.mean, 1.5);
    assert!(e.half_width > 0.0 && e.half_width < 0.5);
    assert_eq!(e.method, CiMethod::ReplicateMeans);
}

fn values_strategy() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(prop_oneof![Just(1u8), Just(2u8)], 3..200)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3000))]

    #[test]
    fn renewal_identity_is_exact(values in values_strategy()) {
        let c = ring(&values);
        prop_assume!(c.count_ones() > 0);
        prop_assert_eq!(renewal_identity_residual(&c).unwrap(), 0.0);
    }

    #[test]
    fn gaps_sum_to_ring_length(values in values_strategy()) {
        let c = ring(&values);
        prop_assume!(c.count_ones() >= 2);
        let g = gap_statistics(&c).unwrap();
        prop_assert_eq!(g.iter().map(|(d, k)| d * k).sum::<usize>(), c.len());
        prop_assert_eq!(g.values().sum::<usize>(), c.count_ones());
    }
}
