//! Exhaustive residue searches for error combinations the FCS cannot see.
//!
//! Symbol positions are numbered from the last FCS symbol backwards, so a
//! pattern at position `s` contributes `pattern(x) * x^(4s)` to the error
//! polynomial. A combination is undetected iff the residues of its placed
//! patterns sum to zero. Residues are invariant under a common shift only up
//! to a nonzero factor, so every search fixes the lowest event at position 0
//! and reports offset classes.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::analytics::{triple_probability, RingParams, KNOWN_TRIPLES, KNOWN_TRIPLES_TOTAL};
use crate::fcs::{is_codeword_exponents, CheckPolynomial, GfPoly, KNOWN_MULTIPLES};
use crate::noise::ErrorPattern;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("{events}-event search over {requested} data symbols exceeds the limit of {limit}")]
    BoundExceeded { events: usize, requested: u32, limit: u32 },
    #[error("searches cover 1 to 5 events, got {0}")]
    UnsupportedEvents(usize),
    #[error("no weight-{weight} multiple of degree <= {bound}")]
    NotFoundWithinBound { weight: usize, bound: u32 },
    #[error("weight must be in 3..=8, got {0}")]
    UnsupportedWeight(usize),
}

/// Largest frame (data symbols) each search size accepts.
pub fn data_symbol_limit(events: usize) -> Option<u32> {
    match events {
        1..=3 => Some(9000),
        4 => Some(1000),
        5 => Some(64),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PlacedPattern {
    pub symbol_position: u32,
    pub pattern: ErrorPattern,
    pub residue: u64,
}

impl PlacedPattern {
    pub fn new(check: &CheckPolynomial, pattern: ErrorPattern, symbol_position: u32) -> Self {
        let residue = check.mul_mod(check.reduce(pattern.bits() as u64), check.xpow(4 * symbol_position as u64));
        PlacedPattern {
            symbol_position,
            pattern,
            residue,
        }
    }

    pub fn exponents(&self) -> Vec<u64> {
        let base = 4 * self.symbol_position as u64;
        (0..8).filter(|b| (self.pattern.bits() >> b) & 1 == 1).map(|b| base + b).collect()
    }

    pub fn last_symbol(&self) -> u32 {
        self.symbol_position + self.pattern.symbols() - 1
    }
}

/// Error polynomial of a set of placements; overlapping bits cancel.
pub fn error_polynomial(events: &[PlacedPattern]) -> GfPoly {
    GfPoly::from_exponents(events.iter().flat_map(|e| e.exponents()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hit {
    /// Sorted by position; the first is at position 0.
    pub events: Vec<PlacedPattern>,
}

impl Hit {
    /// Highest symbol position occupied; the combination fits in frames with
    /// more data symbols than this.
    pub fn span(&self) -> u32 {
        self.events.iter().map(|e| e.last_symbol()).max().unwrap_or(0)
    }

    pub fn polynomial(&self) -> GfPoly {
        error_polynomial(&self.events)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub events: usize,
    pub data_symbols: u32,
    pub hits: Vec<Hit>,
}

impl SearchResult {
    pub fn min_span(&self) -> Option<u32> {
        self.hits.iter().map(|h| h.span()).min()
    }
}

/// Every placement of every pattern in a frame of `n` data symbols.
fn catalog(check: &CheckPolynomial, patterns: &[ErrorPattern], n: u32) -> Vec<PlacedPattern> {
    let mut out = Vec::new();
    for &p in patterns {
        let last = n.saturating_sub(p.symbols() - 1);
        let mut r = check.reduce(p.bits() as u64);
        for s in 0..last {
            out.push(PlacedPattern {
                symbol_position: s,
                pattern: p,
                residue: r,
            });
            r = check.push_nibble(r, 0);
        }
    }
    out
}

/// Open-addressing map from residue to catalog indices. Residues are already
/// uniformly spread, so the low bits serve as the hash.
struct ResidueIndex {
    mask: usize,
    keys: Vec<u64>,
    vals: Vec<u32>,
}

impl ResidueIndex {
    const EMPTY: u32 = u32::MAX;

    fn build(items: &[PlacedPattern]) -> Self {
        let cap = (items.len() * 2).next_power_of_two().max(16);
        let mut idx = ResidueIndex {
            mask: cap - 1,
            keys: vec![0; cap],
            vals: vec![Self::EMPTY; cap],
        };
        for (i, it) in items.iter().enumerate() {
            let mut slot = Self::hash(it.residue) & idx.mask;
            while idx.vals[slot] != Self::EMPTY {
                slot = (slot + 1) & idx.mask;
            }
            idx.keys[slot] = it.residue;
            idx.vals[slot] = i as u32;
        }
        idx
    }

    #[inline]
    fn hash(r: u64) -> usize {
        (r ^ (r >> 17)).wrapping_mul(0x9E37_79B9_7F4A_7C15) as usize >> 7
    }

    #[inline]
    fn for_each(&self, residue: u64, mut f: impl FnMut(u32)) {
        let mut slot = Self::hash(residue) & self.mask;
        while self.vals[slot] != Self::EMPTY {
            if self.keys[slot] == residue {
                f(self.vals[slot]);
            }
            slot = (slot + 1) & self.mask;
        }
    }
}

fn canonical(mut events: Vec<PlacedPattern>) -> Option<Vec<PlacedPattern>> {
    events.sort();
    if error_polynomial(&events).is_zero() {
        return None;
    }
    Some(events)
}

/// Visit strictly increasing index tuples of length `len` drawn from `0..n`.
fn for_each_tuple(n: usize, len: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, stack: &mut Vec<usize>, len: usize, f: &mut impl FnMut(&[usize])) {
        if stack.len() == len {
            f(stack);
            return;
        }
        for i in start..n {
            stack.push(i);
            rec(i + 1, n, stack, len, f);
            stack.pop();
        }
    }
    rec(0, n, &mut Vec::with_capacity(len), len, f);
}

/// All undetected combinations of `events` patterns from the ten-pattern
/// alphabet in frames with `data_symbols` data symbols (FCS included).
pub fn find_undetected(events: usize, data_symbols: u32) -> Result<SearchResult, SearchError> {
    find_undetected_with(CheckPolynomial::fddi(), &ErrorPattern::ALPHABET, events, data_symbols)
}

/// Meet in the middle: one event fixed at position 0, `events - 2` more
/// enumerated, and the last looked up by residue.
pub fn find_undetected_with(
    check: &CheckPolynomial,
    patterns: &[ErrorPattern],
    events: usize,
    data_symbols: u32,
) -> Result<SearchResult, SearchError> {
    let limit = data_symbol_limit(events).ok_or(SearchError::UnsupportedEvents(events))?;
    if data_symbols > limit {
        return Err(SearchError::BoundExceeded {
            events,
            requested: data_symbols,
            limit,
        });
    }
    let cat = catalog(check, patterns, data_symbols);
    let firsts: Vec<PlacedPattern> = cat.iter().copied().filter(|p| p.symbol_position == 0).collect();
    let mut found: BTreeSet<Vec<PlacedPattern>> = BTreeSet::new();

    if events == 1 {
        for f in &firsts {
            if f.residue == 0 {
                found.extend(canonical(vec![*f]));
            }
        }
    } else {
        let index = ResidueIndex::build(&cat);
        let middle = events - 2;
        let search_first = |first: &PlacedPattern| -> Vec<Vec<PlacedPattern>> {
            let mut local = Vec::new();
            for_each_tuple(cat.len(), middle, &mut |mid: &[usize]| {
                let target = mid.iter().fold(first.residue, |acc, &i| acc ^ cat[i].residue);
                index.for_each(target, |j| {
                    let mut evs = Vec::with_capacity(events);
                    evs.push(*first);
                    evs.extend(mid.iter().map(|&i| cat[i]));
                    evs.push(cat[j as usize]);
                    if let Some(c) = canonical(evs) {
                        local.push(c);
                    }
                });
            });
            local
        };
        #[cfg(feature = "parallel")]
        let per_first: Vec<Vec<Vec<PlacedPattern>>> = {
            use rayon::prelude::*;
            firsts.par_iter().map(search_first).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let per_first: Vec<Vec<Vec<PlacedPattern>>> = firsts.iter().map(search_first).collect();
        for hs in per_first {
            found.extend(hs);
        }
    }

    let mut hits: Vec<Hit> = found
        .into_iter()
        .filter(|evs| evs.len() == events)
        .map(|events| Hit { events })
        .collect();
    hits.sort_by(|a, b| a.span().cmp(&b.span()).then_with(|| a.events.cmp(&b.events)));
    Ok(SearchResult {
        events,
        data_symbols,
        hits,
    })
}

/// Brute-force counterpart of [`find_undetected_with`] for three events,
/// used to cross-check it on small frames.
pub fn find_undetected_naive3(check: &CheckPolynomial, patterns: &[ErrorPattern], data_symbols: u32) -> Vec<Hit> {
    let cat = catalog(check, patterns, data_symbols);
    let mut found = BTreeSet::new();
    for a in cat.iter().filter(|p| p.symbol_position == 0) {
        for (bi, b) in cat.iter().enumerate() {
            for c in &cat[bi..] {
                if a.residue ^ b.residue ^ c.residue == 0 {
                    found.extend(canonical(vec![*a, *b, *c]));
                }
            }
        }
    }
    let mut hits: Vec<Hit> = found.into_iter().map(|events| Hit { events }).collect();
    hits.sort_by(|a, b| a.span().cmp(&b.span()).then_with(|| a.events.cmp(&b.events)));
    hits
}

/// Minimum-degree multiples of the FCS generator with exactly `weight` terms
/// and a constant term.
pub fn min_degree_multiple(weight: usize, degree_bound: u32) -> Result<Vec<GfPoly>, SearchError> {
    min_degree_multiple_with(CheckPolynomial::fddi(), weight, degree_bound)
}

/// For each degree `d` in turn, look for `1 + x^d + (weight - 2 inner terms)`
/// divisible by the generator. Inner terms are split into a stored half and
/// an enumerated half; every smaller degree is exhausted before `d` is tried,
/// so the first degree with a solution is the minimum. Returns every solution
/// of that degree.
pub fn min_degree_multiple_with(
    check: &CheckPolynomial,
    weight: usize,
    degree_bound: u32,
) -> Result<Vec<GfPoly>, SearchError> {
    if !(3..=8).contains(&weight) {
        return Err(SearchError::UnsupportedWeight(weight));
    }
    let inner = weight - 2;
    let stored = inner.div_ceil(2);
    let enumerated = inner - stored;
    let xp: Vec<u64> = (0..=degree_bound as u64).map(|k| check.xpow(k)).collect();
    let mut table: HashMap<u64, Vec<Vec<u32>>> = HashMap::new();

    for d in (weight as u32 - 1)..=degree_bound {
        // add stored subsets whose largest exponent is d - 1
        let newest = d - 1;
        if newest >= 1 {
            let mut add = |rest: &[usize]| {
                let mut set: Vec<u32> = rest.iter().map(|&i| i as u32 + 1).collect();
                set.push(newest);
                let key = set.iter().fold(0, |acc, &e| acc ^ xp[e as usize]);
                table.entry(key).or_default().push(set);
            };
            for_each_tuple(newest as usize - 1, stored - 1, &mut add);
        }
        let target = 1 ^ xp[d as usize];
        let mut solutions = BTreeSet::new();
        let mut probe = |picked: &[usize]| {
            let picked: Vec<u32> = picked.iter().map(|&i| i as u32 + 1).collect();
            let key = picked.iter().fold(target, |acc, &e| acc ^ xp[e as usize]);
            if let Some(sets) = table.get(&key) {
                for s in sets {
                    if s.iter().all(|e| !picked.contains(e)) {
                        let mut exps: Vec<u64> = vec![0, d as u64];
                        exps.extend(s.iter().map(|&e| e as u64));
                        exps.extend(picked.iter().map(|&e| e as u64));
                        exps.sort_unstable();
                        solutions.insert(exps);
                    }
                }
            }
        };
        for_each_tuple(d as usize - 1, enumerated, &mut probe);
        if !solutions.is_empty() {
            return Ok(solutions.into_iter().map(GfPoly::from_exponents).collect());
        }
    }
    Err(SearchError::NotFoundWithinBound {
        weight,
        bound: degree_bound,
    })
}

/// Smallest degree of a weight-`weight` multiple by plain enumeration; only
/// practical for small generators.
pub fn min_degree_multiple_naive(check: &CheckPolynomial, weight: usize, degree_bound: u32) -> Option<u32> {
    for d in (weight as u32 - 1)..=degree_bound {
        let mut found = false;
        for_each_tuple(d as usize - 1, weight - 2, &mut |inner: &[usize]| {
            if found {
                return;
            }
            let mut p = GfPoly::from_exponents([0, d as u64]);
            for &i in inner {
                p.toggle(i as u64 + 1);
            }
            if p.rem(&check.as_gf()).is_some_and(|r| r.is_zero()) {
                found = true;
            }
        });
        if found {
            return Some(d);
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultipleCheck {
    pub weight: u32,
    pub exponents: Vec<u64>,
    pub is_codeword: bool,
}

/// Each listed minimum-degree multiple really is a multiple.
pub fn verify_table6() -> Vec<MultipleCheck> {
    KNOWN_MULTIPLES
        .iter()
        .map(|(w, exps)| MultipleCheck {
            weight: *w,
            exponents: exps.to_vec(),
            is_codeword: exps.len() == *w as usize && is_codeword_exponents(exps),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TripleCheck {
    pub row: usize,
    pub events: [(u32, ErrorPattern); 3],
    pub codeword_at_zero: bool,
    pub shift: u32,
    pub codeword_at_shift: bool,
    pub probability: f64,
    pub printed_probability: f64,
    pub relative_error: f64,
}

impl TripleCheck {
    pub fn ok(&self, tolerance: f64) -> bool {
        self.codeword_at_zero && self.codeword_at_shift && self.relative_error <= tolerance
    }
}

fn triple_exponents(row: usize, shift: u32) -> Vec<u64> {
    let check = CheckPolynomial::fddi();
    let evs: Vec<PlacedPattern> = KNOWN_TRIPLES[row]
        .events
        .iter()
        .map(|e| PlacedPattern::new(check, e.pattern, e.offset + shift))
        .collect();
    error_polynomial(&evs).exponents()
}

/// Each known undetected triple is a codeword at position 0 and at a random
/// position, and its probability for the large ring matches the printed one.
pub fn verify_table8(seed: u64) -> Vec<TripleCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ring = RingParams::large_ring();
    KNOWN_TRIPLES
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let shift = rng.random_range(1..(ring.data_symbols() as u32 - row.span()));
            let probability = triple_probability(row, &ring);
            TripleCheck {
                row: i,
                events: row.events.map(|e| (e.offset, e.pattern)),
                codeword_at_zero: is_codeword_exponents(&triple_exponents(i, 0)),
                shift,
                codeword_at_shift: is_codeword_exponents(&triple_exponents(i, shift)),
                probability,
                printed_probability: row.printed_probability,
                relative_error: (probability - row.printed_probability).abs() / row.printed_probability,
            }
        })
        .collect()
}

/// Sum of the recomputed per-row probabilities against the printed total.
pub fn table8_total() -> (f64, f64) {
    let ring = RingParams::large_ring();
    (KNOWN_TRIPLES.iter().map(|r| triple_probability(r, &ring)).sum(), KNOWN_TRIPLES_TOTAL)
}

/// Largest frame (data symbols) in which every combination of `events`
/// events is detected, as listed.
pub const DETECTION_THRESHOLDS: [(usize, u32); 3] = [(3, 3096), (4, 434), (5, 30)];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdCheck {
    pub events: usize,
    pub printed_data_symbols: u32,
    /// Hits at the printed size (expected none).
    pub hits_at_threshold: usize,
    /// Smallest span among hits in a frame one symbol longer.
    pub min_span_above: Option<u32>,
}

impl ThresholdCheck {
    pub fn ok(&self) -> bool {
        self.hits_at_threshold == 0 && self.min_span_above == Some(self.printed_data_symbols)
    }
}

pub fn verify_threshold(events: usize, printed: u32) -> Result<ThresholdCheck, SearchError> {
    let at = find_undetected(events, printed)?;
    let above = find_undetected(events, printed + 1)?;
    Ok(ThresholdCheck {
        events,
        printed_data_symbols: printed,
        hits_at_threshold: at.hits.len(),
        min_span_above: above.min_span(),
    })
}

/// Fraction of random four-event placements that are undetected, over
/// `trials` samples in a frame of `data_symbols` data symbols.
pub fn sample_undetected(check: &CheckPolynomial, events: usize, data_symbols: u32, trials: u64, seed: u64) -> u64 {
    let cat = catalog(check, &ErrorPattern::ALPHABET, data_symbols);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0;
    for _ in 0..trials {
        let mut r = 0;
        for _ in 0..events {
            r ^= cat[rng.random_range(0..cat.len())].residue;
        }
        if r == 0 {
            hits += 1;
        }
    }
    hits
}

/// Number of bursts of exactly `len` bits (first and last bit set) starting
/// at bit `offset` that the check cannot see. Walks all `2^(len-2)` inner
/// patterns in Gray-code order, one XOR per pattern.
pub fn burst_codeword_count(check: &CheckPolynomial, len: u32, offset: u64) -> u64 {
    assert!((1..=40).contains(&len), "burst length {len} out of range");
    if len == 1 {
        return u64::from(check.xpow(offset) == 0);
    }
    let base = check.xpow(offset) ^ check.xpow(offset + len as u64 - 1);
    let inner: Vec<u64> = (1..len as u64 - 1).map(|i| check.xpow(offset + i)).collect();
    let free = inner.len() as u32;
    // split the Gray walk over the top bits so chunks can run in parallel
    let split = free.min(6);
    let low = free - split;
    let walk = |chunk: u64| -> u64 {
        let mut r = base;
        for (b, t) in inner[low as usize..].iter().enumerate() {
            if (chunk >> b) & 1 == 1 {
                r ^= t;
            }
        }
        let mut count = u64::from(r == 0);
        for k in 1u64..(1u64 << low) {
            r ^= inner[k.trailing_zeros() as usize];
            count += u64::from(r == 0);
        }
        count
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..1u64 << split).into_par_iter().map(walk).sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..1u64 << split).map(walk).sum()
    }
}
