use fddi_errlab::analytics::RingParams;
use fddi_errlab::fcs::CheckPolynomial;
use fddi_errlab::frame::ValidityMode;
use fddi_errlab::sim::*;
use proptest::prelude::*;

fn ring(links: u32, p: f64, bits: f64) -> RingParams {
    RingParams::new(links, p, bits).unwrap()
}

fn within_sigma(count: u64, n: u64, p: f64, k: f64) -> bool {
    (count as f64 - n as f64 * p).abs() <= k * binomial_sigma(n, p)
}

#[test]
fn noiseless_ring_delivers_everything() {
    let t = run(&SimConfig::new(ring(10, 0.0, 1000.0), 2000, 1)).unwrap();
    assert_eq!(t.delivered_clean, 2000);
    assert_eq!(t.struck, 0);
    let t = run_token(&SimConfig::new(ring(10, 0.0, 1000.0), 2000, 1)).unwrap();
    assert_eq!(t.token_lost, 0);
}

#[test]
fn same_seed_same_tally() {
    let cfg = SimConfig::new(ring(5, 2e-4, 1000.0), 20_000, 42);
    assert_eq!(run(&cfg).unwrap(), run(&cfg).unwrap());
    let other = SimConfig::new(ring(5, 2e-4, 1000.0), 20_000, 43);
    assert_ne!(run(&cfg).unwrap().struck, run(&other).unwrap().struck);
}

#[test]
fn frame_error_fraction_matches_closed_form() {
    let n = 200_000;
    for (p, l) in [(1e-4, 10u32), (1e-5, 50)] {
        let t = run(&SimConfig::new(ring(l, p, 1000.0), n, 7)).unwrap();
        let expect = 1.0 - (1.0 - p).powf(l as f64 * 1001.0);
        assert!(within_sigma(t.struck, n, expect, 3.0), "p {p} L {l}: {} vs {expect}", t.struck);
        assert_eq!(t.classified(), n);
        assert_eq!(t.undetected_error, 0);
    }
}

#[test]
fn token_loss_fraction_matches_closed_form() {
    let n = 200_000;
    let t = run_token(&SimConfig::new(ring(50, 1e-4, 1000.0), n, 9)).unwrap();
    let expect = 1.0 - (1.0 - 1e-4f64).powf(31.0 * 50.0);
    assert!((expect - 0.14359).abs() < 1e-5);
    assert!(within_sigma(t.token_lost, n, expect, 3.0), "{} vs {expect}", t.token_lost);
    assert_eq!(t.token_lost, t.struck);
    assert_eq!(t.token_conversions, 0);
}

#[test]
fn single_events_never_convert_tokens() {
    assert_eq!(token_single_event_conversions(), 0);
}

#[test]
fn uniform_destination_runs() {
    let cfg = SimConfig::new(ring(20, 1e-4, 1000.0), 20_000, 3).with_destination(Destination::Uniform);
    let t = run(&cfg).unwrap();
    let all = run(&SimConfig::new(ring(20, 1e-4, 1000.0), 20_000, 3)).unwrap();
    assert!(t.struck < all.struck);
    assert_eq!(t.classified(), 20_000);
}

#[test]
fn config_validation() {
    let mut cfg = SimConfig::new(ring(4, 1e-3, 1000.0), 0, 1);
    assert_eq!(run(&cfg), Err(SimError::NoTrials));
    cfg.trials = 10;
    cfg.ring.ber = 0.2;
    assert_eq!(run(&cfg), Err(SimError::BerOutOfRange(0.2)));
    cfg.ring.ber = 1e-3;
    cfg.ring.frame_bits = 1005.0;
    assert!(matches!(run(&cfg), Err(SimError::FrameSize(_))));
    cfg.ring.frame_bits = 1000.0;
    cfg.destination = Destination::Fixed(5);
    assert!(matches!(run(&cfg), Err(SimError::DestinationOutOfRange { .. })));
}

#[test]
fn enhanced_rules_never_admit_more() {
    let cfg = SimConfig::new(ring(4, 1e-3, 1000.0), 10_000, 0).with_check(CheckPolynomial::weak8());
    let r = compare_modes(&cfg, &[1, 2, 3, 4, 5]).unwrap();
    assert!(r.holds(), "{r:?}");
    assert!(r.baseline_total() > 0);
}

#[test]
fn undetected_instances_replay() {
    let cfg = SimConfig::new(ring(4, 1e-3, 1000.0), 20_000, 11)
        .with_check(CheckPolynomial::weak8())
        .with_mode(ValidityMode::Baseline);
    let t = run(&cfg).unwrap();
    assert!(!t.undetected.is_empty());
    for u in &t.undetected {
        let r = replay(&cfg, u);
        assert_eq!(r.outcome, Outcome::UndetectedError);
        assert_eq!(r.mechanism, Some(u.mechanism));
        assert!(r.explained(), "{u:?} {r:?}");
    }
}

#[test]
fn full_check_sees_no_undetected_at_high_noise() {
    let cfg = SimConfig::new(ring(4, 1e-3, 1000.0), 20_000, 5).with_mode(ValidityMode::Baseline);
    assert_eq!(run(&cfg).unwrap().undetected_error, 0);
}

#[test]
fn merged_frames_pass_at_the_check_rate() {
    let m = merge_scenario(&CheckPolynomial::weak8(), 200_000, 1);
    assert!(m.z_score().abs() < 3.0, "{m:?}");
    assert!(m.wilson_95.0 < m.expected_rate && m.expected_rate < m.wilson_95.1);
    let m = merge_scenario(CheckPolynomial::fddi(), 200_000, 1);
    assert_eq!(m.accepted, 0);
}

#[test]
fn splice_at_frame_boundary_is_intact() {
    let mut rng = trial_rng(1, 0);
    let a = random_frame(&mut rng, CheckPolynomial::fddi(), 20);
    let b = random_frame(&mut rng, CheckPolynomial::fddi(), 40);
    let whole_a = splice(&a, a.data_symbols(), &b, b.data_symbols());
    assert_eq!(whole_a, a.data());
    assert!(CheckPolynomial::fddi().check_nibbles(&whole_a).unwrap());
    let whole_b = splice(&a, 0, &b, 0);
    assert!(CheckPolynomial::fddi().check_nibbles(&whole_b).unwrap());
}

#[test]
fn wilson_reference_values() {
    let (lo, hi) = wilson_interval(0, 10, 1.96);
    assert_eq!(lo, 0.0);
    assert!((hi - 0.2775).abs() < 1e-4);
    let (lo, hi) = wilson_interval(5, 10, 1.96);
    assert!((lo - 0.2366).abs() < 1e-4 && (hi - 0.7634).abs() < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn every_trial_gets_one_class(links in 1u32..8, p in 0.0f64..0.01, octets in 22u32..80, seed in any::<u64>()) {
        let cfg = SimConfig::new(ring(links, p, 10.0 * octets as f64), 300, seed);
        let t = run(&cfg).unwrap();
        prop_assert_eq!(t.classified(), 300);
        prop_assert!(t.struck <= 300);
        prop_assert_eq!(t.delivered_clean + t.struck >= 300, true);
    }
}
