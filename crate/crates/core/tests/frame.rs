use fddi_errlab::fcs::{fcs_check_nibbles, CheckPolynomial};
use fddi_errlab::frame::*;
use fddi_errlab::noise::strike_symbols;
use fddi_errlab::phy::{encode_symbols, format_symbols, parse_symbols, Symbol};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DA: [u8; 12] = [0, 0, 0, 0, 0xA, 0xB, 0, 1, 2, 3, 4, 5];
const SA: [u8; 12] = [0, 0, 0, 0, 0xA, 0xB, 9, 8, 7, 6, 5, 4];
const LLC_FC: [u8; 2] = [0x5, 0x1];

fn random_frame(rng: &mut ChaCha8Rng, info_pairs: usize) -> Frame {
    let info = (0..2 * info_pairs).map(|_| rng.random_range(0..16)).collect();
    build_frame(LLC_FC, DA, SA, info).unwrap()
}

fn single_frame(events: &[ParseEvent]) -> &Candidate {
    match events {
        [ParseEvent::Frame(c)] => c,
        other => panic!("expected one frame, got {other:?}"),
    }
}

#[test]
fn minimal_frame_sizes() {
    let f = build_frame(LLC_FC, DA, SA, vec![]).unwrap();
    assert_eq!(f.data_symbols(), 34);
    assert_eq!(f.data().len(), 34);
    assert_eq!(f.code_bits(), 50 + 170);
    assert_eq!(f.indicators, vec![Symbol::R; 3]);
    assert!(fcs_check_nibbles(&f.data()).unwrap());
    let syms = f.symbols();
    assert_eq!(syms.len() * 5, f.code_bits());
    assert_eq!(syms[f.sd_index()], Symbol::J);
    assert_eq!(syms[f.ed_index()], Symbol::T);
}

#[test]
fn construction_errors() {
    assert_eq!(build_frame(LLC_FC, DA, SA, vec![1]), Err(FrameError::OddInfoLength(1)));
    assert_eq!(build_frame([0x8, 0], DA, SA, vec![]), Err(FrameError::TokenFcUsedForFrame(8, 0)));
    assert_eq!(build_frame([0xC, 0], DA, SA, vec![]), Err(FrameError::TokenFcUsedForFrame(0xC, 0)));
    assert_eq!(build_frame([0x10, 0], DA, SA, vec![]), Err(FrameError::InvalidNibble(0x10)));
    assert!(build_frame([0x8, 1], DA, SA, vec![]).is_ok());
}

#[test]
fn token_serialization() {
    let t = Token { restricted: false };
    let r = Token { restricted: true };
    assert_eq!(format_symbols(&serialize(&Pdu::Token(t))), "IIIIJK80TT");
    assert_eq!(format_symbols(&r.symbols()), "IIIIJKC0TT");
    assert_eq!(encode_symbols(&t.symbols_with_preamble(0)).unwrap().len(), 30);
    let a = encode_symbols(&t.symbols()).unwrap();
    let b = encode_symbols(&r.symbols()).unwrap();
    let diff = a.bits().iter().zip(b.bits()).filter(|(x, y)| x != y).count();
    assert_eq!(diff, 1);
    assert_eq!(
        parse(&t.symbols()),
        vec![ParseEvent::Token { sd_index: 4, restricted: false }]
    );
    assert_eq!(parse(&r.symbols()), vec![ParseEvent::Token { sd_index: 4, restricted: true }]);
}

#[test]
fn fc_classes() {
    assert!(is_token_fc([0x8, 0]) && is_token_fc([0xC, 0]));
    assert!(!is_token_fc([0x8, 1]) && !is_token_fc([0x0, 0]));
    for fc in [[0x0, 0x0], [0x4, 0x0], [0x0, 0x8], [0x4, 0x8], [0x2, 0x7], [0xE, 0xF], [0x6, 0x1]] {
        assert!(is_fcs_exempt_fc(fc), "{fc:?}");
    }
    for fc in [[0x5, 0x0], [0x0, 0x1], [0x1, 0x0], [0x8, 0x0], [0xD, 0x3]] {
        assert!(!is_fcs_exempt_fc(fc), "{fc:?}");
    }
}

#[test]
fn pristine_frame_is_valid() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = random_frame(&mut rng, 20);
    let events = parse(&f.symbols());
    let c = single_frame(&events);
    assert_eq!(c.data, f.data());
    assert_eq!(c.status, f.indicators);
    assert_eq!(validate(c), ValidityVerdict::VALID);
    for mode in [ValidityMode::Baseline, ValidityMode::Enhanced, ValidityMode::OptionA] {
        assert!(validate_with(c, &StationPolicy::new(mode)).valid);
    }
}

#[test]
fn e_indicator_set_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut f = random_frame(&mut rng, 4);
    f.indicators[0] = Symbol::S;
    let events = parse(&f.symbols());
    let c = single_frame(&events);
    assert_eq!(validate(c), ValidityVerdict::invalid(Failure::EIndicatorNotR));
    assert!(validate_with(c, &StationPolicy::new(ValidityMode::Baseline)).valid);
}

#[test]
fn exempt_fc_skips_fcs() {
    let mut f = build_frame([0, 0], DA, SA, vec![1, 2]).unwrap();
    f.fcs.0 ^= 1;
    let events = parse(&f.symbols());
    let c = single_frame(&events);
    assert!(validate(c).valid);
    let strict = StationPolicy::default().honor_exempt_fc(false);
    assert_eq!(validate_with(c, &strict), ValidityVerdict::invalid(Failure::BadFcs));
}

#[test]
fn length_rules() {
    // 26 header symbols then T: even but too short
    let text = format!("IIIIJK{}TRRR", "1".repeat(28));
    let events = parse(&parse_symbols(&text).unwrap());
    assert_eq!(validate(single_frame(&events)), ValidityVerdict::invalid(Failure::BadLength));
    let text = format!("IIIIJK{}TRRR", "1".repeat(35));
    let events = parse(&parse_symbols(&text).unwrap());
    assert_eq!(validate(single_frame(&events)), ValidityVerdict::invalid(Failure::FramingViolation));
}

#[test]
fn halt_inside_frame_aborts() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_frame(&mut rng, 10);
    let mut syms = f.symbols();
    syms[f.sd_index() + 20] = Symbol::Halt;
    let events = parse(&syms);
    assert_eq!(
        events[0],
        ParseEvent::Aborted { sd_index: 4, at: 24, reason: AbortKind::SymbolViolation }
    );
    let rx = receive(&syms, &StationPolicy::default());
    assert_eq!(rx[0].verdict.failure, Failure::SymbolViolation);
    assert!(rx.iter().all(|r| !r.verdict.valid));
    // the repeater idles out the rest of the frame
    let out = repeat_station(&syms, &StationPolicy::default());
    assert!(out[24..].iter().all(|&s| s == Symbol::Idle));
    assert_eq!(&out[..24], &syms[..24]);
}

#[test]
fn t_in_address_is_framing_violation() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let f = random_frame(&mut rng, 10);
    let mut syms = f.symbols();
    syms[f.sd_index() + 2 + 5] = Symbol::T;
    let rx = receive(&syms, &StationPolicy::default());
    assert_eq!(rx[0].verdict.failure, Failure::FramingViolation);
    assert!(rx.iter().all(|r| !r.verdict.valid));
}

#[test]
fn repeat_rules() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = random_frame(&mut rng, 6);
    let enhanced = StationPolicy::default();
    let baseline = StationPolicy::new(ValidityMode::Baseline);
    let e = f.ed_index() + 1;

    let good = f.symbols();
    assert_eq!(repeat_station(&good, &enhanced), good);

    let mut bad = good.clone();
    bad[f.sd_index() + 10] = Symbol::Data((f.da[6] + 1) & 0xf);
    let out = repeat_station(&bad, &enhanced);
    assert_eq!(out[e], Symbol::S);
    assert_eq!(repeat_station(&bad, &baseline)[e], Symbol::S);

    let mut mangled = good.clone();
    mangled[e] = Symbol::Data(7);
    assert_eq!(repeat_station(&mangled, &enhanced)[e], Symbol::S);
    assert_eq!(repeat_station(&mangled, &baseline)[e], Symbol::Data(7));

    // a set E is never reset, even with a good FCS
    let mut set = good.clone();
    set[e] = Symbol::S;
    assert_eq!(repeat_station(&set, &enhanced)[e], Symbol::S);
}

#[test]
fn address_recognition_sets_a_and_c() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let f = random_frame(&mut rng, 2);
    let e = f.ed_index() + 1;
    let dest = StationPolicy::default().with_address(DA, true);
    let out = repeat_station(&f.symbols(), &dest);
    assert_eq!(&out[e..e + 3], &[Symbol::R, Symbol::S, Symbol::S]);
    let other = StationPolicy::default().with_address(SA, true);
    assert_eq!(repeat_station(&f.symbols(), &other), f.symbols());
    assert_eq!(repeat_station(&out, &dest), out);
}

#[test]
fn restart_on_inner_jk() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = random_frame(&mut rng, 30);
    let mut syms = f.symbols();
    let at = f.sd_index() + 40;
    syms[at] = Symbol::J;
    syms[at + 1] = Symbol::K;
    let events = parse(&syms);
    assert_eq!(events[0], ParseEvent::Aborted { sd_index: 4, at, reason: AbortKind::Restarted });
    let ParseEvent::Frame(c) = &events[1] else { panic!() };
    assert_eq!(c.sd_index, at);
    assert_eq!(validate(c).failure, Failure::BadFcs);
}

fn destination_outcomes(syms: &[Symbol], policy: &StationPolicy) -> Vec<Reception> {
    receive(syms, policy)
}

#[test]
fn single_event_never_yields_corrupted_valid_frame() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let f = random_frame(&mut rng, 60);
    let syms = f.symbols();
    let strict = StationPolicy::default().honor_exempt_fc(false);
    let first_guarded = 5 * f.sd_index() as isize - 1;
    let last_guarded = 5 * (f.ed_index() as isize + 2) - 1;
    for cell in -1..(5 * syms.len() as isize) {
        let rx = strike_symbols(&syms, &[cell]).unwrap();
        let outcomes = destination_outcomes(&rx, &strict);
        for r in &outcomes {
            if let (ParseEvent::Frame(c), true) = (&r.event, r.verdict.valid) {
                assert_eq!(c.data, f.data(), "cell {cell} delivered corrupted data");
                assert!(cell < first_guarded || cell >= last_guarded, "cell {cell} accepted");
            }
        }
        if (first_guarded..last_guarded).contains(&cell) {
            assert!(outcomes.iter().all(|r| !r.verdict.valid || matches!(r.event, ParseEvent::Token { .. })), "cell {cell}");
        }
    }
}

#[test]
fn exempt_fc_classes_admit_single_event_errors() {
    // With the exemption honored, a single event can turn a normal FC into
    // an exempt one; this is the only way one event gets past the receiver.
    let policy = StationPolicy::default();
    let mut accepted = 0;
    for fc0 in 0..16u8 {
        for fc1 in 0..16u8 {
            let fc = [fc0, fc1];
            if is_token_fc(fc) || is_fcs_exempt_fc(fc) {
                continue;
            }
            let f = build_frame(fc, DA, SA, vec![]).unwrap();
            let syms = f.symbols();
            for cell in (5 * f.sd_index() as isize + 5)..(5 * f.sd_index() as isize + 25) {
                let rx = strike_symbols(&syms, &[cell]).unwrap();
                for r in receive(&rx, &policy) {
                    if let (ParseEvent::Frame(c), true) = (&r.event, r.verdict.valid) {
                        if c.data != f.data() {
                            accepted += 1;
                            assert!(is_fcs_exempt_fc(c.fc().unwrap()));
                        }
                    }
                }
            }
        }
    }
    assert!(accepted > 0);
}

#[test]
fn single_event_always_loses_token() {
    for restricted in [false, true] {
        let t = Token { restricted };
        let syms = t.symbols();
        for cell in 19..50isize {
            let rx = strike_symbols(&syms, &[cell]).unwrap();
            let events = parse(&rx);
            assert!(
                !events.contains(&ParseEvent::Token { sd_index: 4, restricted }),
                "cell {cell}"
            );
            assert!(
                !events.iter().any(|e| matches!(e, ParseEvent::Token { .. })),
                "cell {cell} converted the token"
            );
        }
    }
}

#[test]
fn weakened_check_frames() {
    let g = CheckPolynomial::weak8();
    let f = build_frame_with(&g, LLC_FC, DA, SA, vec![3, 4]).unwrap();
    let policy = StationPolicy::default().with_check(g);
    let events = parse(&f.symbols());
    assert!(validate_with(single_frame(&events), &policy).valid);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn roundtrip_all_lengths(seed in any::<u64>(), pairs in 0usize..=200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_frame(&mut rng, pairs);
        let syms = f.symbols();
        let events = parse(&syms);
        let c = single_frame(&events);
        prop_assert_eq!(&c.data, &f.data());
        prop_assert!(validate(c).valid);
        prop_assert_eq!(repeat_station(&syms, &StationPolicy::default()), syms);
    }

    #[test]
    fn repeat_is_idempotent(seed in any::<u64>(), cells in proptest::collection::vec(-1isize..600, 0..6)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_frame(&mut rng, 40);
        let rx = strike_symbols(&f.symbols(), &cells).unwrap();
        for mode in [ValidityMode::Baseline, ValidityMode::Enhanced] {
            let p = StationPolicy::new(mode);
            let once = repeat_station(&rx, &p);
            prop_assert_eq!(once.len(), rx.len());
            prop_assert_eq!(repeat_station(&once, &p), once);
        }
    }

    #[test]
    fn enhanced_acceptance_implies_baseline(seed in any::<u64>(), cells in proptest::collection::vec(-1isize..600, 1..5)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_frame(&mut rng, 40);
        let rx = strike_symbols(&f.symbols(), &cells).unwrap();
        let g = CheckPolynomial::weak8();
        let enh = receive(&rx, &StationPolicy::new(ValidityMode::Enhanced).with_check(g.clone()));
        let base = receive(&rx, &StationPolicy::new(ValidityMode::Baseline).with_check(g));
        prop_assert_eq!(enh.len(), base.len());
        for (a, b) in enh.iter().zip(&base) {
            prop_assert!(!a.verdict.valid || b.verdict.valid);
        }
    }
}
