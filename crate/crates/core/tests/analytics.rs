use fddi_errlab::analytics::*;
use fddi_errlab::frame::ValidityMode;
use proptest::prelude::*;

fn large() -> RingParams {
    RingParams::large_ring()
}

#[test]
fn summary_grid_matches_reference() {
    let checks = check_reference();
    assert_eq!(checks.len(), 10 * 4 * 2);
    let bad: Vec<_> = checks.iter().filter(|c| !c.ok).collect();
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn headline_examples() {
    let p = large();
    let fe = frame_error(&p);
    assert!(matches_printed(fe.probability, 1.13e-2));
    assert!(matches_printed(fe.mean_time_s * 1e3, 32.0));
    let tl = token_loss(&p);
    assert!(matches_printed(tl.probability, 7.75e-6));
    assert!(matches_printed(tl.mean_time_s, 229.0));
    assert!(matches_printed(ue_false_ed(&p, ValidityMode::Enhanced).probability, 4.93e-25));
    assert!(matches_printed(ue_false_ed(&p, ValidityMode::Baseline).mean_time_years(), 362.0));
    assert!(matches_printed(ue_false_ed(&p, ValidityMode::OptionA).probability, 2.32e-35));
    assert!(matches_printed(ue_false_sd(&p).mean_time_years(), 7.47e12));
    assert!(matches_printed(ue_fcs(&p, 3, true).probability, 2.74e-24));
    assert!(matches_printed(ue_fcs(&p, 4, true).probability, 3.64e-30));
}

#[test]
fn zero_noise() {
    let p = RingParams::new(10, 0.0, 1000.0).unwrap();
    let fe = frame_error(&p);
    assert_eq!(fe.probability, 0.0);
    assert_eq!(fe.exact_probability, Some(0.0));
    assert!(fe.mean_time_s.is_infinite());
    assert_eq!(token_loss(&p).probability, 0.0);
    assert_eq!(ue_false_sd(&p).probability, 0.0);
}

#[test]
fn merged_frames() {
    let m = merged_frame_prob();
    assert!(matches_printed(m, 2.33e-10));
    // 2^32 is 4.29E9; the reciprocal is sometimes quoted as 4.34E9
    assert!(matches_printed(1.0 / m, 4.29e9));
}

#[test]
fn three_events_need_long_frames() {
    for octets in [111.0, 1000.0, 1553.0] {
        let p = RingParams::from_octets(1000, 2.5e-10, octets).unwrap();
        assert_eq!(ue_fcs(&p, 3, true).probability, 0.0, "{octets}");
    }
    let p = RingParams::from_octets(1000, 2.5e-10, 1560.0).unwrap();
    assert!(ue_fcs(&p, 3, true).probability > 0.0);
}

#[test]
fn known_triples_match_printed_rows() {
    let p = large();
    let mut total = 0.0;
    for row in &KNOWN_TRIPLES {
        let v = triple_probability(row, &p);
        let rel = (v - row.printed_probability).abs() / row.printed_probability;
        assert!(rel < 0.02, "{row:?}: {v:e}");
        total += v;
    }
    assert!((total - KNOWN_TRIPLES_TOTAL).abs() / KNOWN_TRIPLES_TOTAL < 0.02);
    let (per_row, sum) = triple_coefficients();
    assert!((per_row[0] - 3.90625e-3).abs() < 1e-12);
    assert!(sum > per_row[0]);
}

#[test]
fn shorter_frames_scale_linearly() {
    let a = ue_false_sd(&large()).probability;
    let b = ue_false_sd(&RingParams::from_octets(1000, 2.5e-10, 450.0).unwrap()).probability;
    let ratio = a / b;
    assert!((ratio - (45000.0 - 180.0) / (4500.0 - 180.0)).abs() < 1e-9);
}

#[test]
fn parameter_validation() {
    assert_eq!(RingParams::new(0, 1e-9, 1000.0), Err(AnalyticsError::ZeroLinks));
    assert!(matches!(RingParams::new(1, -1.0, 1000.0), Err(AnalyticsError::InvalidBer(_))));
    assert!(matches!(RingParams::new(1, 1e-9, 100.0), Err(AnalyticsError::FrameTooShort(_))));
    assert!(matches!(large().with_latency(-1.0), Err(AnalyticsError::InvalidLatency(_))));
    assert!(large().warnings().is_empty());
    assert_eq!(RingParams::new(50, 1e-4, 45000.0).unwrap().warnings().len(), 1);
}

proptest! {
    #[test]
    fn exact_and_first_order_agree(p in 1e-14f64..1e-9, links in 1u32..500, f in 220.0f64..90000.0) {
        let r = RingParams::new(links, p, f).unwrap();
        prop_assume!(r.load() < 1e-3);
        for rep in [frame_error(&r), token_loss(&r)] {
            let exact = rep.exact_probability.unwrap();
            prop_assert!((exact - rep.probability).abs() <= 0.01 * rep.probability);
        }
    }

    #[test]
    fn rates_monotone(p in 1e-12f64..1e-6, links in 1u32..2000, f in 220.0f64..90000.0, bump in 1.0f64..3.0) {
        let base = RingParams::new(links, p, f).unwrap();
        let variants = [
            RingParams::new(links, p * bump, f).unwrap(),
            RingParams::new(links + (bump * 10.0) as u32, p, f).unwrap(),
            RingParams::new(links, p, f * bump).unwrap(),
        ];
        for row in SummaryRow::ALL {
            let a = row.evaluate(&base).probability;
            for v in &variants {
                let b = row.evaluate(v).probability;
                prop_assert!(b >= a * (1.0 - 1e-12), "{:?}: {} -> {}", row, a, b);
            }
        }
    }
}
