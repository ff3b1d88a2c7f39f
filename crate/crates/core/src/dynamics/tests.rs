use super::*;
use crate::oracle::{transient_distribution, Distribution, ExactChain};

fn ring(n: usize) -> Topology {
    Topology::ring(n).unwrap()
}

#[test]
fn sample_initial_examples() {
    let mut rng = replica_rng(1, 0);
    let t = ring(50);
    let c = sample_initial(&InitialDistribution::Product { rho: 0.0 }, t, &mut rng).unwrap();
    assert_eq!(c.count_ones(), 0);
    let c = sample_initial(&InitialDistribution::Product { rho: 1.0 }, t, &mut rng).unwrap();
    assert_eq!(c.count_twos(), 0);
    let c = sample_initial(&InitialDistribution::AllOnes, t, &mut rng).unwrap();
    assert_eq!(c.count_ones(), 50);
    let i = Topology::interval(9).unwrap();
    let c = sample_initial(&InitialDistribution::SingleOne { y: 0 }, i, &mut rng).unwrap();
    assert_eq!(c.values(), vec![1, 2, 2, 2, 2, 2, 2, 2, 2]);
    assert!(sample_initial(&InitialDistribution::Product { rho: 1.5 }, t, &mut rng).is_err());
    assert!(sample_initial(&InitialDistribution::SingleOne { y: 9 }, i, &mut rng).is_err());
}

#[test]
fn product_sampling_marginal() {
    let mut rng = replica_rng(2, 0);
    let n = 200_000;
    let c = sample_initial(&InitialDistribution::Product { rho: 0.3 }, ring(n), &mut rng).unwrap();
    let sd = (0.3f64 * 0.7 / n as f64).sqrt();
    assert!((c.density_of_ones() - 0.3).abs() < 4.0 * sd);
}

#[test]
fn waiting_times_match_total_rate() {
    // N = 4, α = 1: total rate 8.
    let spec = ModelSpec::sf_pure(1.0);
    let mut state = SimState::new(Configuration::constant(ring(4), Height::One), replica_rng(3, 0));
    let k = 200_000;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..k {
        let dt = step(&mut state, &spec).unwrap().dt;
        sum += dt;
        sum_sq += dt * dt;
    }
    let mean = sum / k as f64;
    // Exponential(8): mean 1/8, second moment 2/64.
    assert!((mean - 0.125).abs() < 4.0 * 0.125 / (k as f64).sqrt());
    assert!((sum_sq / k as f64 - 2.0 / 64.0).abs() < 0.002);
}

#[test]
fn zero_rates_never_step() {
    let spec = ModelSpec::Sa { alpha: 0.0, beta: 0.0 };
    let mut state = SimState::new(Configuration::constant(ring(5), Height::One), replica_rng(0, 0));
    assert!(step(&mut state, &spec).is_none());
    let out = run_until(&mut state, &spec, 3.0, &[1.0, 2.0], |c| c.count_ones());
    assert_eq!(out, vec![(1.0, 5), (2.0, 5)]);
    assert_eq!(state.t, 3.0);
}

#[test]
fn identity_events_advance_clock() {
    // All-2 ring with additions only: nothing changes, time moves on.
    let spec = ModelSpec::Sa { alpha: 1.0, beta: 0.0 };
    let all2 = Configuration::constant(ring(6), Height::Two);
    let mut state = SimState::new(all2.clone(), replica_rng(4, 0));
    for _ in 0..10 {
        let out = step(&mut state, &spec).unwrap();
        assert!(!out.event.changed);
        assert!(out.dt > 0.0);
    }
    assert_eq!(state.cfg, all2);
    assert_eq!(state.counters.additions, 10);
}

fn trajectory(seed: u64, spec: &ModelSpec) -> (Vec<(EventKind, usize, u64)>, EventCounters) {
    let mut rng = replica_rng(seed, 7);
    let cfg = sample_initial(&InitialDistribution::Product { rho: 0.5 }, ring(64), &mut rng).unwrap();
    let mut state = SimState::new(cfg, rng);
    let events = (0..5000)
        .map(|_| {
            let o = step(&mut state, spec).unwrap();
            (o.event.kind, o.event.site, o.dt.to_bits())
        })
        .collect();
    (events, state.counters)
}

#[test]
fn same_seed_same_trajectory() {
    for spec in [
        ModelSpec::sf_pure(0.7),
        ModelSpec::Sf { alpha: 0.3, flip: FlipRateSpec::Glauber { gamma: 0.25 } },
        ModelSpec::Sa { alpha: 0.4, beta: 0.6 },
    ] {
        assert_eq!(trajectory(11, &spec), trajectory(11, &spec));
        assert_ne!(trajectory(11, &spec).0, trajectory(12, &spec).0);
    }
}

#[test]
fn replica_streams_are_stable() {
    let a = run_replicas(4, 9, |r, mut rng| (r, rng.random::<u64>()));
    let b = run_replicas(8, 9, |r, mut rng| (r, rng.random::<u64>()));
    assert_eq!(a[..], b[..4]);
    assert!(a.windows(2).all(|w| w[0].1 != w[1].1));
}

#[test]
fn chained_runs_match_single_run() {
    let spec = ModelSpec::sf_pure(0.5);
    let start = Configuration::constant(ring(30), Height::One);
    let mut one = SimState::new(start.clone(), replica_rng(5, 0));
    let single = run_until(&mut one, &spec, 2.0, &[0.5, 1.0, 1.5, 2.0], |c| c.values());
    let mut two = SimState::new(start, replica_rng(5, 0));
    let mut chained = run_until(&mut two, &spec, 1.0, &[0.5, 1.0], |c| c.values());
    chained.extend(run_until(&mut two, &spec, 2.0, &[1.5, 2.0], |c| c.values()));
    assert_eq!(single, chained);
    assert_eq!(one.cfg, two.cfg);
    assert_eq!(one.counters, two.counters);
}

#[test]
fn run_until_now_samples_only_current() {
    let spec = ModelSpec::sf_pure(0.5);
    let mut state = SimState::new(Configuration::constant(ring(10), Height::One), replica_rng(6, 0));
    let out = run_until(&mut state, &spec, 0.0, &[0.0, 1.0], |c| c.count_ones());
    assert_eq!(out, vec![(0.0, 10)]);
    assert_eq!(state.counters.total(), 0);
}

fn event_fraction_check(spec: ModelSpec, expected: f64) {
    let mut rng = replica_rng(8, 0);
    let cfg = sample_initial(&InitialDistribution::Product { rho: 0.5 }, ring(1000), &mut rng).unwrap();
    let mut state = SimState::new(cfg, rng);
    let k = 1_000_000u64;
    for _ in 0..k {
        step(&mut state, &spec).unwrap();
    }
    state.cfg.audit().unwrap();
    let frac = state.counters.additions as f64 / k as f64;
    let sd = (expected * (1.0 - expected) / k as f64).sqrt();
    assert!((frac - expected).abs() < 4.0 * sd, "{frac} vs {expected}");
}

#[test]
fn addition_fraction_sf_pure() {
    event_fraction_check(ModelSpec::sf_pure(0.5), 0.5 / 1.5);
}

#[test]
fn addition_fraction_sa() {
    event_fraction_check(ModelSpec::Sa { alpha: 0.3, beta: 0.7 }, 0.3);
}

#[test]
fn glauber_thinning_matches_rates() {
    // Frozen configuration, one event per trial: per-site acceptance
    // frequency of flip proposals against c(x, η)/M.
    let flip = FlipRateSpec::Glauber { gamma: 0.25 };
    let spec = ModelSpec::Sf { alpha: 0.2, flip };
    let cfg = Configuration::from_values(ring(8), &[1, 1, 2, 1, 2, 2, 2, 1]).unwrap();
    let big_m = flip.max_rate();
    let mut proposals = [0u64; 8];
    let mut accepted = [0u64; 8];
    let mut state = SimState::new(cfg.clone(), replica_rng(10, 0));
    for _ in 0..1_000_000 {
        state.cfg = cfg.clone();
        let o = step(&mut state, &spec).unwrap();
        match o.event.kind {
            EventKind::Flip => {
                proposals[o.event.site] += 1;
                accepted[o.event.site] += 1;
            }
            EventKind::RejectedFlip => proposals[o.event.site] += 1,
            _ => {}
        }
    }
    let mut chi2 = 0.0;
    for x in 0..8 {
        let p = flip.rate(&cfg, x) / big_m;
        assert!((1.0 / 3.0 - 1e-12..=1.0 + 1e-12).contains(&p));
        let n = proposals[x] as f64;
        let sd = (n * p * (1.0 - p)).sqrt();
        if sd > 0.0 {
            let z = (accepted[x] as f64 - n * p) / sd;
            // 3σ family-wise over 8 sites.
            assert!(z.abs() < 3.6, "site {x}: z = {z}");
            chi2 += z * z;
        } else {
            assert_eq!(accepted[x], proposals[x]);
        }
    }
    // Chi-square with at most 8 degrees of freedom; 99.9% point is 26.1.
    assert!(chi2 < 26.1, "chi2 = {chi2}");
}

#[test]
fn pure_flips_relax_to_half() {
    let spec = ModelSpec::sf_pure(0.0);
    let mut state = SimState::new(Configuration::constant(ring(20_000), Height::Two), replica_rng(12, 0));
    let out = run_until(&mut state, &spec, 3.0, &[0.5, 3.0], |c| c.density_of_ones());
    // Independent flips: ρ(t) = (1 − e^{−2t})/2.
    assert!((out[0].1 - 0.5 * (1.0 - (-1.0f64).exp())).abs() < 0.015);
    assert!((out[1].1 - 0.5).abs() < 0.015);
}

#[test]
fn freezing_examples() {
    let mut never = SimState::new(Configuration::constant(ring(2000), Height::One), replica_rng(13, 0));
    assert_eq!(freezing_time(&mut never, &ModelSpec::sf_pure(0.0), FreezeTarget::OnesBelow(1e-3), 3.0).unwrap(), None);
    assert_eq!(never.t, 3.0);

    let mut sf = SimState::new(Configuration::constant(ring(20_000), Height::One), replica_rng(14, 0));
    let t = freezing_time(&mut sf, &ModelSpec::sf_pure(2.0), FreezeTarget::OnesBelow(1e-3), 5.0).unwrap().unwrap();
    assert!((t - 0.5 * (3.0f64 / 1.002).ln()).abs() < 0.03, "t = {t}");

    let mut sa = SimState::new(Configuration::constant(ring(20_000), Height::Two), replica_rng(15, 0));
    let spec = ModelSpec::Sa { alpha: 0.3, beta: 0.7 };
    let t = freezing_time(&mut sa, &spec, FreezeTarget::TwosBelow(1e-3), 10.0).unwrap().unwrap();
    assert!((t - 2.5).abs() < 0.1, "t = {t}");

    let mut bad = SimState::new(Configuration::constant(ring(10), Height::One), replica_rng(0, 0));
    assert!(freezing_time(&mut bad, &spec, FreezeTarget::OnesBelow(0.0), 1.0).is_err());
}

#[test]
fn biased_flips_stationary_density() {
    // κ = 0.3, α = 0.2: the density ODE ρ' = 1 − κ − α − 2ρ settles at 0.25.
    let spec = ModelSpec::Sf { alpha: 0.2, flip: FlipRateSpec::Biased { kappa: 0.3 } };
    let mut rng = replica_rng(16, 0);
    let cfg = sample_initial(&InitialDistribution::Product { rho: 0.5 }, ring(20_000), &mut rng).unwrap();
    let mut state = SimState::new(cfg, rng);
    let times: Vec<f64> = (0..=20).map(|i| 5.0 + 0.5 * i as f64).collect();
    let out = run_until(&mut state, &spec, 15.0, &times, |c| c.density_of_ones());
    let mean = out.iter().map(|p| p.1).sum::<f64>() / out.len() as f64;
    assert!((mean - 0.25).abs() < 0.01, "mean = {mean}");
}

#[test]
fn lone_one_vanish_scales_with_alpha() {
    let median = |alpha: f64| {
        let mut v = run_replicas(301, 17, |_, rng| lone_one_vanish_time(1000, alpha, 10, rng).unwrap());
        v.sort_by(f64::total_cmp);
        v[150]
    };
    let ratio = median(1.0) / median(2.0);
    assert!(ratio > 2.0 / 1.3 && ratio < 2.0 * 1.3, "ratio = {ratio}");
    assert!(lone_one_vanish_time(100, 1.0, 60, replica_rng(0, 0)).is_err());
    assert!(lone_one_vanish_time(100, 0.0, 5, replica_rng(0, 0)).is_err());
}

#[test]
fn marginals_match_oracle_small_ring() {
    let topology = ring(8);
    let replicas = 100_000;
    let times = [0.5, 1.0, 2.0];
    for alpha in [0.5, 2.0] {
        let spec = ModelSpec::sf_pure(alpha);
        let chain = ExactChain::new(topology, spec).unwrap();
        let init = Distribution::all_ones(topology);
        let exact: Vec<Vec<f64>> = times
            .iter()
            .map(|&t| {
                let d = transient_distribution(&chain, &init, t).unwrap();
                (0..8).map(|x| d.prob_one_at(x)).collect()
            })
            .collect();
        let samples = run_replicas(replicas, 18, |_, rng| {
            let mut state = SimState::new(Configuration::constant(topology, Height::One), rng);
            run_until(&mut state, &spec, 2.0, &times, |c| {
                (0..8).map(|x| c.height(x) == Height::One).collect::<Vec<_>>()
            })
        });
        for (k, _) in times.iter().enumerate() {
            let mut pooled = 0.0;
            let mut pooled_exact = 0.0;
            for x in 0..8 {
                let p = exact[k][x];
                let hits = samples.iter().filter(|s| s[k].1[x]).count() as f64;
                let sd = (p * (1.0 - p) / replicas as f64).sqrt();
                // 48 site/time/α comparisons: 3σ family-wise is about 4σ each.
                assert!((hits / replicas as f64 - p).abs() < 4.0 * sd, "α={alpha} k={k} x={x}");
                pooled += hits;
                pooled_exact += p;
            }
            // The site average is one statistic; sites are correlated, so
            // bound its spread by the single-site σ.
            let p = pooled_exact / 8.0;
            let sd = (p * (1.0 - p) / replicas as f64).sqrt();
            assert!((pooled / (8.0 * replicas as f64) - p).abs() < 3.0 * sd);
        }
    }
}
