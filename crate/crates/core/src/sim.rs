//! Seeded Monte Carlo runs of frames and tokens around a ring.
//!
//! Every trial draws from its own ChaCha8 stream (`seed`, stream = trial
//! number), so tallies do not depend on how trials are scheduled. Noise is
//! placed by geometric skips over the `F + 1` cells of each link: the frame
//! (preamble included) plus the cell before it. For tokens the window is the
//! 30 cells from J through the second T plus the cell before J.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::Serialize;
use thiserror::Error;

use crate::analytics::{RingParams, TOKEN_CELLS};
use crate::fcs::{CheckPolynomial, GfPoly};
use crate::frame::{
    build_frame_with, is_token_fc, parse, receive, repeat_station, Candidate, Failure, Frame, ParseEvent,
    StationPolicy, Token, ValidityMode, ADDRESS_SYMBOLS, DEFAULT_PREAMBLE, MIN_DATA_SYMBOLS,
};
use crate::noise::strike_groups;
use crate::phy::{decode_bits, Symbol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("noise probability {0} outside [0, 0.1]")]
    BerOutOfRange(f64),
    #[error("frame of {0} code-bits is not a whole number of octets of at least 22")]
    FrameSize(f64),
    #[error("destination link {link} outside 1..={links}")]
    DestinationOutOfRange { link: u32, links: u32 },
}

/// Which link's far end receives the frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Destination {
    /// The frame crosses exactly this many links.
    Fixed(u32),
    /// Uniform over 1..=L-1 (1 on a single-link ring).
    Uniform,
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub ring: RingParams,
    pub trials: u64,
    pub seed: u64,
    pub mode: ValidityMode,
    pub check: CheckPolynomial,
    pub destination: Destination,
    /// Keep at most this many undetected instances for replay.
    pub log_limit: usize,
}

impl SimConfig {
    /// Frames cross every link of the ring.
    pub fn new(ring: RingParams, trials: u64, seed: u64) -> Self {
        SimConfig {
            destination: Destination::Fixed(ring.links),
            ring,
            trials,
            seed,
            mode: ValidityMode::Enhanced,
            check: CheckPolynomial::fddi().clone(),
            log_limit: 64,
        }
    }

    pub fn with_mode(mut self, mode: ValidityMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_check(mut self, check: CheckPolynomial) -> Self {
        self.check = check;
        self
    }

    pub fn with_destination(mut self, destination: Destination) -> Self {
        self.destination = destination;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::NoTrials);
        }
        let p = self.ring.ber;
        if !(0.0..=0.1).contains(&p) {
            return Err(SimError::BerOutOfRange(p));
        }
        let f = self.ring.frame_bits;
        if f.fract() != 0.0 || (f as u64) % 10 != 0 || f < 220.0 {
            return Err(SimError::FrameSize(f));
        }
        if let Destination::Fixed(l) = self.destination {
            if l == 0 || l > self.ring.links {
                return Err(SimError::DestinationOutOfRange {
                    link: l,
                    links: self.ring.links,
                });
            }
        }
        Ok(())
    }

    pub fn policy(&self) -> StationPolicy {
        StationPolicy::new(self.mode).with_check(self.check.clone()).honor_exempt_fc(false)
    }

    fn info_symbols(&self) -> usize {
        (self.ring.frame_bits as usize - 50) / 5 - MIN_DATA_SYMBOLS
    }
}

/// Outcome classes; exactly one per trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    DeliveredClean,
    SymbolViolation,
    FramingViolation,
    BadFcs,
    EMarkedUpstream,
    UndetectedError,
    TokenLost,
}

impl Outcome {
    pub const ALL: [Outcome; 7] = [
        Outcome::DeliveredClean,
        Outcome::SymbolViolation,
        Outcome::FramingViolation,
        Outcome::BadFcs,
        Outcome::EMarkedUpstream,
        Outcome::UndetectedError,
        Outcome::TokenLost,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Outcome::DeliveredClean => "delivered_clean",
            Outcome::SymbolViolation => "symbol_violation",
            Outcome::FramingViolation => "framing_violation",
            Outcome::BadFcs => "bad_fcs",
            Outcome::EMarkedUpstream => "e_marked_upstream",
            Outcome::UndetectedError => "undetected_error",
            Outcome::TokenLost => "token_lost",
        }
    }
}

/// How a corrupted frame got past the destination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mechanism {
    FalseStartDelimiter,
    FalseEndDelimiter,
    FcsCodeword,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UndetectedInstance {
    pub trial: u64,
    /// Cells struck on each link; 0 is the cell before the frame.
    pub strikes: Vec<Vec<usize>>,
    pub mechanism: Mechanism,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OutcomeTally {
    pub trials: u64,
    pub delivered_clean: u64,
    pub symbol_violation: u64,
    pub framing_violation: u64,
    pub bad_fcs: u64,
    pub e_marked_upstream: u64,
    pub undetected_error: u64,
    pub token_lost: u64,
    /// Trials with at least one noise event on the traversed links.
    pub struck: u64,
    /// Tokens whose restricted flag flipped.
    pub token_conversions: u64,
    pub undetected: Vec<UndetectedInstance>,
}

impl OutcomeTally {
    pub fn count(&self, o: Outcome) -> u64 {
        match o {
            Outcome::DeliveredClean => self.delivered_clean,
            Outcome::SymbolViolation => self.symbol_violation,
            Outcome::FramingViolation => self.framing_violation,
            Outcome::BadFcs => self.bad_fcs,
            Outcome::EMarkedUpstream => self.e_marked_upstream,
            Outcome::UndetectedError => self.undetected_error,
            Outcome::TokenLost => self.token_lost,
        }
    }

    fn bump(&mut self, o: Outcome) {
        *match o {
            Outcome::DeliveredClean => &mut self.delivered_clean,
            Outcome::SymbolViolation => &mut self.symbol_violation,
            Outcome::FramingViolation => &mut self.framing_violation,
            Outcome::BadFcs => &mut self.bad_fcs,
            Outcome::EMarkedUpstream => &mut self.e_marked_upstream,
            Outcome::UndetectedError => &mut self.undetected_error,
            Outcome::TokenLost => &mut self.token_lost,
        } += 1;
    }

    pub fn classified(&self) -> u64 {
        Outcome::ALL.iter().map(|&o| self.count(o)).sum()
    }

    pub fn fraction(&self, o: Outcome) -> f64 {
        self.count(o) as f64 / self.trials as f64
    }

    pub fn struck_fraction(&self) -> f64 {
        self.struck as f64 / self.trials as f64
    }

    pub fn merge(mut self, other: OutcomeTally, log_limit: usize) -> OutcomeTally {
        self.trials += other.trials;
        self.delivered_clean += other.delivered_clean;
        self.symbol_violation += other.symbol_violation;
        self.framing_violation += other.framing_violation;
        self.bad_fcs += other.bad_fcs;
        self.e_marked_upstream += other.e_marked_upstream;
        self.undetected_error += other.undetected_error;
        self.token_lost += other.token_lost;
        self.struck += other.struck;
        self.token_conversions += other.token_conversions;
        self.undetected.extend(other.undetected);
        self.undetected.sort_by_key(|u| u.trial);
        self.undetected.truncate(log_limit);
        self
    }
}

/// 95% (z = 1.96) or other Wilson score interval for `k` successes in `n`.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Binomial standard deviation of a count.
pub fn binomial_sigma(n: u64, p: f64) -> f64 {
    (n as f64 * p * (1.0 - p)).sqrt()
}

const FRAME_WINDOW_START: isize = -1;
const TOKEN_WINDOW_START: isize = 5 * DEFAULT_PREAMBLE as isize - 1;

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Cells (0-based within a window of `cells`) hit on one link.
fn strikes(rng: &mut ChaCha8Rng, geo: Option<&Geometric>, cells: usize) -> Vec<usize> {
    let mut out = Vec::new();
    if let Some(geo) = geo {
        let mut pos = geo.sample(rng);
        while pos < cells as u64 {
            out.push(pos as usize);
            pos += 1 + geo.sample(rng);
        }
    }
    out
}

fn geometric(p: f64) -> Option<Geometric> {
    (p > 0.0).then(|| Geometric::new(p).expect("p checked in validate"))
}

fn apply(stream: &[Symbol], window_start: isize, cells: &[usize]) -> Vec<Symbol> {
    let mut groups: Vec<u8> = stream.iter().map(|s| s.code_group().bits()).collect();
    for &c in cells {
        strike_groups(&mut groups, window_start + c as isize).expect("strike inside stream");
    }
    groups.into_iter().map(decode_bits).collect()
}

/// A frame with uniformly random FC (tokens excluded), addresses and INFO.
pub fn random_frame(rng: &mut ChaCha8Rng, check: &CheckPolynomial, info_len: usize) -> Frame {
    let fc = loop {
        let fc = [rng.random_range(0..16u8), rng.random_range(0..16u8)];
        if !is_token_fc(fc) {
            break fc;
        }
    };
    let mut da = [0u8; ADDRESS_SYMBOLS];
    let mut sa = [0u8; ADDRESS_SYMBOLS];
    da.iter_mut().chain(sa.iter_mut()).for_each(|n| *n = rng.random_range(0..16));
    let info = (0..info_len).map(|_| rng.random_range(0..16)).collect();
    build_frame_with(check, fc, da, sa, info).expect("random frame is well formed")
}

/// The stream arriving at the destination after crossing links with the
/// given strikes; intermediate stations repeat.
fn traverse(frame_stream: &[Symbol], window_start: isize, per_link: &[Vec<usize>], policy: &StationPolicy) -> Vec<Symbol> {
    let mut stream = frame_stream.to_vec();
    let last = per_link.len() - 1;
    for (i, cells) in per_link.iter().enumerate() {
        if cells.is_empty() {
            // a repeated stream is a fixed point of the next repeater
            continue;
        }
        stream = apply(&stream, window_start, cells);
        if i < last {
            stream = repeat_station(&stream, policy);
        }
    }
    stream
}

fn classify(frame: &Frame, arrived: &[Symbol], policy: &StationPolicy) -> (Outcome, Option<Mechanism>) {
    let sent = frame.data();
    let receptions = receive(arrived, policy);
    let mut clean = false;
    for r in &receptions {
        if let ParseEvent::Frame(c) = &r.event {
            if r.verdict.valid {
                if c.data != sent {
                    return (Outcome::UndetectedError, Some(mechanism(frame, c)));
                }
                clean = true;
            }
        }
    }
    if clean {
        return (Outcome::DeliveredClean, None);
    }
    let first = receptions.iter().find(|r| !r.verdict.valid).map(|r| r.verdict.failure);
    let outcome = match first {
        Some(Failure::SymbolViolation) => Outcome::SymbolViolation,
        Some(Failure::BadFcs) => Outcome::BadFcs,
        Some(Failure::EIndicatorNotR) => Outcome::EMarkedUpstream,
        // no frame recognized at all, or a structural fault
        _ => Outcome::FramingViolation,
    };
    (outcome, None)
}

fn mechanism(frame: &Frame, accepted: &Candidate) -> Mechanism {
    if accepted.sd_index != frame.sd_index() {
        Mechanism::FalseStartDelimiter
    } else if accepted.ed_index != frame.ed_index() {
        Mechanism::FalseEndDelimiter
    } else {
        Mechanism::FcsCodeword
    }
}

struct TrialResult {
    outcome: Outcome,
    struck: bool,
    undetected: Option<UndetectedInstance>,
}

fn links_for(config: &SimConfig, rng: &mut ChaCha8Rng) -> u32 {
    match config.destination {
        Destination::Fixed(l) => l,
        Destination::Uniform if config.ring.links > 1 => rng.random_range(1..config.ring.links),
        Destination::Uniform => 1,
    }
}

fn frame_trial(config: &SimConfig, policy: &StationPolicy, geo: Option<&Geometric>, trial: u64) -> TrialResult {
    let mut rng = trial_rng(config.seed, trial);
    let links = links_for(config, &mut rng);
    let cells = config.ring.frame_bits as usize + 1;
    let per_link: Vec<Vec<usize>> = (0..links).map(|_| strikes(&mut rng, geo, cells)).collect();
    if per_link.iter().all(|c| c.is_empty()) {
        return TrialResult {
            outcome: Outcome::DeliveredClean,
            struck: false,
            undetected: None,
        };
    }
    let frame = random_frame(&mut rng, &config.check, config.info_symbols());
    let arrived = traverse(&frame.symbols(), FRAME_WINDOW_START, &per_link, policy);
    let (outcome, mech) = classify(&frame, &arrived, policy);
    TrialResult {
        outcome,
        struck: true,
        undetected: mech.map(|mechanism| UndetectedInstance {
            trial,
            strikes: per_link,
            mechanism,
        }),
    }
}

fn run_trials(config: &SimConfig, one: impl Fn(u64) -> TrialResult + Sync) -> OutcomeTally {
    let fold = |range: std::ops::Range<u64>| {
        let mut t = OutcomeTally::default();
        for trial in range {
            let r = one(trial);
            t.trials += 1;
            t.bump(r.outcome);
            t.struck += u64::from(r.struck);
            if let Some(u) = r.undetected {
                if t.undetected.len() < config.log_limit {
                    t.undetected.push(u);
                }
            }
        }
        t
    };
    let chunk = 4096u64;
    let chunks: Vec<std::ops::Range<u64>> = (0..config.trials.div_ceil(chunk))
        .map(|i| i * chunk..((i + 1) * chunk).min(config.trials))
        .collect();
    #[cfg(feature = "parallel")]
    let parts: Vec<OutcomeTally> = {
        use rayon::prelude::*;
        chunks.into_par_iter().map(fold).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<OutcomeTally> = chunks.into_iter().map(fold).collect();
    parts.into_iter().fold(OutcomeTally::default(), |a, b| a.merge(b, config.log_limit))
}

/// Send one random frame per trial across the ring and classify what the
/// destination makes of it.
pub fn run(config: &SimConfig) -> Result<OutcomeTally, SimError> {
    config.validate()?;
    let policy = config.policy();
    let geo = geometric(config.ring.ber);
    Ok(run_trials(config, |trial| frame_trial(config, &policy, geo.as_ref(), trial)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplayReport {
    pub mode: ValidityMode,
    pub outcome: Outcome,
    pub mechanism: Option<Mechanism>,
    pub max_events_on_one_link: usize,
    /// For a same-boundary acceptance: the XOR of sent and delivered data is
    /// divisible by the check polynomial.
    pub codeword_verified: Option<bool>,
}

impl ReplayReport {
    /// Either a false delimiter (under enhanced rules it takes two or more
    /// events on one link, the second supplying the R after a false T), or an
    /// error pattern that is a multiple of the check polynomial.
    pub fn explained(&self) -> bool {
        let needed = if self.mode == ValidityMode::Baseline { 1 } else { 2 };
        match self.mechanism {
            Some(Mechanism::FalseStartDelimiter | Mechanism::FalseEndDelimiter) => {
                self.max_events_on_one_link >= needed
            }
            Some(Mechanism::FcsCodeword) => self.codeword_verified == Some(true),
            None => false,
        }
    }
}

/// Re-run a logged undetected instance from its recorded strikes.
pub fn replay(config: &SimConfig, instance: &UndetectedInstance) -> ReplayReport {
    let mut rng = trial_rng(config.seed, instance.trial);
    let _ = links_for(config, &mut rng);
    let geo = geometric(config.ring.ber);
    let cells = config.ring.frame_bits as usize + 1;
    for _ in 0..instance.strikes.len() {
        strikes(&mut rng, geo.as_ref(), cells);
    }
    let frame = random_frame(&mut rng, &config.check, config.info_symbols());
    let policy = config.policy();
    let arrived = traverse(&frame.symbols(), FRAME_WINDOW_START, &instance.strikes, &policy);
    let (outcome, mechanism) = classify(&frame, &arrived, &policy);
    let codeword_verified = (mechanism == Some(Mechanism::FcsCodeword)).then(|| {
        let sent = frame.data();
        receive(&arrived, &policy)
            .into_iter()
            .find_map(|r| match r.event {
                ParseEvent::Frame(c) if r.verdict.valid && c.data != sent => Some(c.data),
                _ => None,
            })
            .is_some_and(|got| {
                let bits: Vec<bool> = sent
                    .iter()
                    .zip(&got)
                    .flat_map(|(a, b)| (0..4).rev().map(move |i| ((a ^ b) >> i) & 1 == 1))
                    .collect();
                GfPoly::from_msb_bits(&bits).rem(&config.check.as_gf()).is_some_and(|r| r.is_zero())
            })
    });
    ReplayReport {
        mode: config.mode,
        outcome,
        mechanism,
        max_events_on_one_link: instance.strikes.iter().map(Vec::len).max().unwrap_or(0),
        codeword_verified,
    }
}

/// Circulate a non-restricted token; it is lost at the first station that
/// receives a struck copy and does not see the same token.
pub fn run_token(config: &SimConfig) -> Result<OutcomeTally, SimError> {
    config.validate()?;
    let geo = geometric(config.ring.ber);
    let token = Token { restricted: false };
    let stream = token.symbols();
    let window_start = TOKEN_WINDOW_START;
    let mut tally = OutcomeTally::default();
    let one = |trial: u64| {
        let mut rng = trial_rng(config.seed, trial);
        let mut conversions = 0;
        for _ in 0..config.ring.links {
            let cells = strikes(&mut rng, geo.as_ref(), TOKEN_CELLS as usize);
            if cells.is_empty() {
                continue;
            }
            let got = apply(&stream, window_start, &cells);
            let seen = parse(&got);
            let same = matches!(seen.as_slice(), [ParseEvent::Token { sd_index, restricted }]
                if *sd_index == DEFAULT_PREAMBLE && *restricted == token.restricted);
            if seen.iter().any(|e| matches!(e, ParseEvent::Token { restricted, .. } if *restricted != token.restricted)) {
                conversions += 1;
            }
            return (if same { Outcome::DeliveredClean } else { Outcome::TokenLost }, true, conversions);
        }
        (Outcome::DeliveredClean, false, 0)
    };
    #[cfg(feature = "parallel")]
    let results: Vec<(Outcome, bool, u64)> = {
        use rayon::prelude::*;
        (0..config.trials).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(Outcome, bool, u64)> = (0..config.trials).map(one).collect();
    for (o, struck, conv) in results {
        tally.trials += 1;
        tally.bump(o);
        tally.struck += u64::from(struck);
        tally.token_conversions += conv;
    }
    Ok(tally)
}

/// Restricted/non-restricted conversions over every single event in the
/// token window, for both token kinds.
pub fn token_single_event_conversions() -> u64 {
    let window_start = TOKEN_WINDOW_START;
    let mut n = 0;
    for restricted in [false, true] {
        let stream = Token { restricted }.symbols();
        for c in 0..TOKEN_CELLS as usize {
            let got = apply(&stream, window_start, &[c]);
            n += parse(&got)
                .iter()
                .filter(|e| matches!(e, ParseEvent::Token { restricted: r, .. } if *r != restricted))
                .count() as u64;
        }
    }
    n
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MergeEstimate {
    pub trials: u64,
    /// Splices that reproduce one of the two frames unchanged; always valid
    /// and left out of the rate.
    pub intact: u64,
    pub accepted: u64,
    pub check_degree: u32,
    pub expected_rate: f64,
    /// `accepted / (trials - intact)`.
    pub rate: f64,
    pub wilson_95: (f64, f64),
}

impl MergeEstimate {
    pub fn merged(&self) -> u64 {
        self.trials - self.intact
    }

    /// Deviation of the accepted count from expectation, in binomial sigmas.
    pub fn z_score(&self) -> f64 {
        let n = self.merged();
        (self.accepted as f64 - n as f64 * self.expected_rate) / binomial_sigma(n, self.expected_rate)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Splice {
    Intact,
    Accepted,
    Rejected,
}

/// Splice the head of one frame onto the tail of another at random cut
/// points and count splices whose FCS checks.
pub fn merge_scenario(check: &CheckPolynomial, trials: u64, seed: u64) -> MergeEstimate {
    let one = |trial: u64| -> Splice {
        let mut rng = trial_rng(seed, trial);
        let la = 2 * rng.random_range(0..60usize);
        let lb = 2 * rng.random_range(0..60usize);
        let a = random_frame(&mut rng, check, la);
        let b = random_frame(&mut rng, check, lb);
        // keep at least one symbol of each and a legal length
        let cut_a = rng.random_range(1..a.data_symbols());
        let cut_b = rng.random_range(1..=(b.data_symbols() + cut_a - MIN_DATA_SYMBOLS).min(b.data_symbols() - 1));
        let merged = splice(&a, cut_a, &b, cut_b);
        if merged == a.data() || merged == b.data() {
            Splice::Intact
        } else if check.check_nibbles(&merged).unwrap_or(false) {
            Splice::Accepted
        } else {
            Splice::Rejected
        }
    };
    #[cfg(feature = "parallel")]
    let outcomes: Vec<Splice> = {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<Splice> = (0..trials).map(one).collect();
    let intact = outcomes.iter().filter(|&&o| o == Splice::Intact).count() as u64;
    let accepted = outcomes.iter().filter(|&&o| o == Splice::Accepted).count() as u64;
    let merged = trials - intact;
    MergeEstimate {
        trials,
        intact,
        accepted,
        check_degree: check.degree(),
        expected_rate: 0.5f64.powi(check.degree() as i32),
        rate: accepted as f64 / merged.max(1) as f64,
        wilson_95: wilson_interval(accepted, merged, 1.96),
    }
}

/// Splice at the given cut points; cutting at both frame ends gives back
/// the first frame unchanged.
pub fn splice(a: &Frame, cut_a: usize, b: &Frame, cut_b: usize) -> Vec<u8> {
    let mut merged = a.data()[..cut_a].to_vec();
    merged.extend_from_slice(&b.data()[cut_b..]);
    merged
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedComparison {
    pub seed: u64,
    pub enhanced_undetected: u64,
    pub baseline_undetected: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnhancementReport {
    pub per_seed: Vec<SeedComparison>,
    /// Trials accepted with corrupted data under enhanced rules but not
    /// under baseline rules.
    pub implication_violations: u64,
    /// Undetected instances whose replay shows no known mechanism.
    pub unexplained: u64,
    pub mechanisms: Vec<(Mechanism, u64)>,
}

impl EnhancementReport {
    pub fn enhanced_total(&self) -> u64 {
        self.per_seed.iter().map(|s| s.enhanced_undetected).sum()
    }

    pub fn baseline_total(&self) -> u64 {
        self.per_seed.iter().map(|s| s.baseline_undetected).sum()
    }

    pub fn holds(&self) -> bool {
        self.baseline_total() >= self.enhanced_total()
            && self.per_seed.iter().all(|s| s.baseline_undetected >= s.enhanced_undetected)
            && self.implication_violations == 0
            && self.unexplained == 0
    }
}

/// Run the same noise under enhanced and baseline rules for each seed and
/// replay every undetected instance.
pub fn compare_modes(config: &SimConfig, seeds: &[u64]) -> Result<EnhancementReport, SimError> {
    let mut per_seed = Vec::new();
    let mut implication_violations = 0;
    let mut unexplained = 0;
    let mut mechanisms = vec![
        (Mechanism::FalseStartDelimiter, 0),
        (Mechanism::FalseEndDelimiter, 0),
        (Mechanism::FcsCodeword, 0),
    ];
    for &seed in seeds {
        let mut cfg = config.clone();
        cfg.seed = seed;
        cfg.log_limit = usize::MAX;
        let enhanced_cfg = cfg.clone().with_mode(ValidityMode::Enhanced);
        let baseline_cfg = cfg.with_mode(ValidityMode::Baseline);
        let enhanced = run(&enhanced_cfg)?;
        let baseline = run(&baseline_cfg)?;
        for u in &enhanced.undetected {
            if !baseline.undetected.iter().any(|b| b.trial == u.trial) {
                implication_violations += 1;
            }
        }
        for (cfg, tally) in [(&enhanced_cfg, &enhanced), (&baseline_cfg, &baseline)] {
            for u in &tally.undetected {
                let r = replay(cfg, u);
                if !r.explained() || r.outcome != Outcome::UndetectedError {
                    unexplained += 1;
                }
                if let Some(m) = mechanisms.iter_mut().find(|(m, _)| *m == u.mechanism) {
                    m.1 += 1;
                }
            }
        }
        per_seed.push(SeedComparison {
            seed,
            enhanced_undetected: enhanced.undetected_error,
            baseline_undetected: baseline.undetected_error,
        });
    }
    Ok(EnhancementReport {
        per_seed,
        implication_violations,
        unexplained,
        mechanisms,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingleEventSweep {
    pub cells: usize,
    /// First and one-past-last cell that must leave no valid frame: from the
    /// cell before J through the E indicator.
    pub guarded: (isize, isize),
    /// Cells after which the destination accepted altered data.
    pub corrupted_accepts: Vec<isize>,
    /// Guarded cells after which any frame was accepted.
    pub guarded_accepts: Vec<isize>,
}

impl SingleEventSweep {
    pub fn holds(&self) -> bool {
        self.corrupted_accepts.is_empty() && self.guarded_accepts.is_empty()
    }
}

/// Strike every cell of the serialized frame once, on its own, and check
/// what a destination with `policy` accepts.
pub fn single_event_sweep(frame: &Frame, policy: &StationPolicy) -> SingleEventSweep {
    let syms = frame.symbols();
    let sent = frame.data();
    let guarded = (5 * frame.sd_index() as isize - 1, 5 * (frame.ed_index() as isize + 2) - 1);
    let groups: Vec<u8> = syms.iter().map(|s| s.code_group().bits()).collect();
    let cells: Vec<isize> = (-1..5 * syms.len() as isize).collect();
    let one = |&cell: &isize| -> (bool, bool) {
        let mut g = groups.clone();
        strike_groups(&mut g, cell).expect("cell inside stream");
        let rx: Vec<Symbol> = g.into_iter().map(decode_bits).collect();
        let mut corrupted = false;
        let mut any = false;
        for r in receive(&rx, policy) {
            if let (ParseEvent::Frame(c), true) = (&r.event, r.verdict.valid) {
                any = true;
                corrupted |= c.data != sent;
            }
        }
        (corrupted, any && (guarded.0..guarded.1).contains(&cell))
    };
    #[cfg(feature = "parallel")]
    let results: Vec<(bool, bool)> = {
        use rayon::prelude::*;
        cells.par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(bool, bool)> = cells.iter().map(one).collect();
    let pick = |f: fn(&(bool, bool)) -> bool| {
        cells.iter().zip(&results).filter(|(_, r)| f(r)).map(|(c, _)| *c).collect()
    };
    SingleEventSweep {
        cells: cells.len(),
        guarded,
        corrupted_accepts: pick(|r| r.0),
        guarded_accepts: pick(|r| r.1),
    }
}
