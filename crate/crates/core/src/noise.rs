//! Single noise events and their effect on 4B/5B data symbols.
//!
//! A noise event inverts the received level of one code cell. Under NRZI that
//! inverts the code-bit of the cell and of the cell after it. Inside a symbol
//! this changes two adjacent code-bits (positions 1-2 through 4-5); across a
//! symbol boundary it changes bit 5 of one symbol and bit 1 of the next.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::phy::{decode_bits, decode_group, CodeGroup, LevelStream, Symbol, SymbolClass};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NoiseError {
    #[error("cell index {index} outside -1..{len}")]
    IndexOutOfRange { index: isize, len: usize },
    #[error("invalid error pattern {0:?}")]
    InvalidPattern(String),
}

/// One misjudged code cell; index -1 is the cell before the stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NoiseEvent {
    pub cell_index: isize,
}

impl NoiseEvent {
    pub fn at(cell_index: isize) -> Self {
        NoiseEvent { cell_index }
    }
}

pub fn apply_noise(levels: &LevelStream, event: NoiseEvent) -> Result<LevelStream, NoiseError> {
    let len = levels.len();
    let mut out = levels.clone();
    match event.cell_index {
        -1 => out.leading = out.leading.flipped(),
        i if i >= 0 && (i as usize) < len => {
            let i = i as usize;
            out.levels[i] = out.levels[i].flipped();
        }
        index => return Err(NoiseError::IndexOutOfRange { index, len }),
    }
    Ok(out)
}

/// Invert the received level of `cell` in a sequence of 5-bit code groups,
/// working directly on code-bits. Cell -1 precedes the first group.
pub fn strike_groups(groups: &mut [u8], cell: isize) -> Result<(), NoiseError> {
    let len = groups.len() * 5;
    if cell < -1 || cell >= len as isize {
        return Err(NoiseError::IndexOutOfRange { index: cell, len });
    }
    for bit in [cell, cell + 1] {
        if bit >= 0 && (bit as usize) < len {
            let b = bit as usize;
            groups[b / 5] ^= 1 << (4 - b % 5);
        }
    }
    Ok(())
}

/// The received symbols after noise strikes each of `cells` once.
pub fn strike_symbols(symbols: &[Symbol], cells: &[isize]) -> Result<Vec<Symbol>, NoiseError> {
    let mut groups: Vec<u8> = symbols.iter().map(|s| s.code_group().bits()).collect();
    for &c in cells {
        strike_groups(&mut groups, c)?;
    }
    Ok(groups.into_iter().map(decode_bits).collect())
}

/// The code-bit positions a single event can change within one symbol,
/// in the column order of the effect table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChangedBits {
    P1,
    P12,
    P23,
    P34,
    P45,
    P5,
}

impl ChangedBits {
    pub const ALL: [ChangedBits; 6] = [
        ChangedBits::P1,
        ChangedBits::P12,
        ChangedBits::P23,
        ChangedBits::P34,
        ChangedBits::P45,
        ChangedBits::P5,
    ];

    pub const INTRASYMBOL: [ChangedBits; 4] = [
        ChangedBits::P12,
        ChangedBits::P23,
        ChangedBits::P34,
        ChangedBits::P45,
    ];

    /// XOR mask over a code group (bit 4 = position 1).
    pub fn mask(self) -> u8 {
        match self {
            ChangedBits::P1 => 0b10000,
            ChangedBits::P12 => 0b11000,
            ChangedBits::P23 => 0b01100,
            ChangedBits::P34 => 0b00110,
            ChangedBits::P45 => 0b00011,
            ChangedBits::P5 => 0b00001,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ChangedBits::P1 => "1",
            ChangedBits::P12 => "1, 2",
            ChangedBits::P23 => "2, 3",
            ChangedBits::P34 => "3, 4",
            ChangedBits::P45 => "4, 5",
            ChangedBits::P5 => "5",
        }
    }

    pub fn is_intersymbol(self) -> bool {
        matches!(self, ChangedBits::P1 | ChangedBits::P5)
    }
}

/// Symbol received when data symbol `value` has `bits` inverted.
pub fn symbol_effect(value: u8, bits: ChangedBits) -> Symbol {
    let g = Symbol::Data(value & 0xf).code_group().bits() ^ bits.mask();
    decode_group(CodeGroup::new(g).expect("mask stays within five bits"))
}

/// Noise on the cell boundary between data symbols `a` and `b`.
pub fn pair_effect(a: u8, b: u8) -> (Symbol, Symbol) {
    (symbol_effect(a, ChangedBits::P5), symbol_effect(b, ChangedBits::P1))
}

/// XOR mask applied to data-bits by a noise event that leaves only data
/// symbols behind. Four-bit patterns hit one symbol, eight-bit patterns hit
/// two adjacent symbols; the high quartet belongs to the earlier-transmitted one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ErrorPattern {
    bits: u8,
    symbols: u8,
}

impl ErrorPattern {
    pub const fn single(bits: u8) -> Self {
        ErrorPattern { bits: bits & 0xf, symbols: 1 }
    }

    pub const fn double(first: u8, second: u8) -> Self {
        ErrorPattern {
            bits: ((first & 0xf) << 4) | (second & 0xf),
            symbols: 2,
        }
    }

    /// The ten patterns a single event can produce, in frequency-table order.
    pub const ALPHABET: [ErrorPattern; 10] = [
        ErrorPattern::single(0b0010),
        ErrorPattern::single(0b0101),
        ErrorPattern::single(0b0110),
        ErrorPattern::single(0b1000),
        ErrorPattern::single(0b1001),
        ErrorPattern::single(0b1010),
        ErrorPattern::single(0b1100),
        ErrorPattern::single(0b1111),
        ErrorPattern::double(0b0001, 0b0110),
        ErrorPattern::double(0b0001, 0b1000),
    ];

    pub fn bits(self) -> u8 {
        self.bits
    }

    /// Number of data symbols covered (1 or 2).
    pub fn symbols(self) -> u32 {
        self.symbols as u32
    }

    pub fn width(self) -> u32 {
        4 * self.symbols()
    }

    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn alphabet_index(self) -> Option<usize> {
        Self::ALPHABET.iter().position(|&p| p == self)
    }
}

impl fmt::Display for ErrorPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.symbols == 1 {
            write!(f, "{:04b}", self.bits)
        } else {
            write!(f, "{:04b}-{:04b}", self.bits >> 4, self.bits & 0xf)
        }
    }
}

impl FromStr for ErrorPattern {
    type Err = NoiseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits: String = s.chars().filter(|c| *c != '-' && *c != '_').collect();
        let bad = || NoiseError::InvalidPattern(s.to_string());
        if !digits.chars().all(|c| c == '0' || c == '1') {
            return Err(bad());
        }
        let v = u8::from_str_radix(&digits, 2).map_err(|_| bad())?;
        match digits.len() {
            4 if v != 0 => Ok(ErrorPattern::single(v)),
            8 if v >> 4 != 0 && v & 0xf != 0 => Ok(ErrorPattern::double(v >> 4, v & 0xf)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for ErrorPattern {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ErrorPattern {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Outcome classes for a noise event inside one data symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IntraOutcome {
    Data,
    J,
    K,
    R,
    S,
    T,
    /// H, I, Q, V or VH.
    Violation,
}

impl IntraOutcome {
    pub const ALL: [IntraOutcome; 7] = [
        IntraOutcome::Data,
        IntraOutcome::J,
        IntraOutcome::K,
        IntraOutcome::R,
        IntraOutcome::S,
        IntraOutcome::T,
        IntraOutcome::Violation,
    ];

    fn of(s: Symbol) -> IntraOutcome {
        match s {
            Symbol::Data(_) => IntraOutcome::Data,
            Symbol::J => IntraOutcome::J,
            Symbol::K => IntraOutcome::K,
            Symbol::R => IntraOutcome::R,
            Symbol::S => IntraOutcome::S,
            Symbol::T => IntraOutcome::T,
            _ => IntraOutcome::Violation,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            IntraOutcome::Data => "Data",
            IntraOutcome::J => "J",
            IntraOutcome::K => "K",
            IntraOutcome::R => "R",
            IntraOutcome::S => "S",
            IntraOutcome::T => "T",
            IntraOutcome::Violation => "H, I, V, VH",
        }
    }
}

/// Outcome classes for a noise event on the boundary between two data symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InterOutcome {
    DataData,
    DataT,
    DataR,
    DataS,
    /// At least one of the two symbols is H, I, Q, V or VH.
    AnyViolation,
    /// Anything else; never occurs with the standard code table.
    Other,
}

impl InterOutcome {
    pub const ALL: [InterOutcome; 6] = [
        InterOutcome::DataData,
        InterOutcome::DataT,
        InterOutcome::DataR,
        InterOutcome::DataS,
        InterOutcome::AnyViolation,
        InterOutcome::Other,
    ];

    fn of(first: Symbol, second: Symbol) -> InterOutcome {
        let bad = |s: Symbol| matches!(s.class(), SymbolClass::LineState | SymbolClass::Violation);
        if bad(first) || bad(second) {
            return InterOutcome::AnyViolation;
        }
        match (first, second) {
            (Symbol::Data(_), Symbol::Data(_)) => InterOutcome::DataData,
            (Symbol::Data(_), Symbol::T) => InterOutcome::DataT,
            (Symbol::Data(_), Symbol::R) => InterOutcome::DataR,
            (Symbol::Data(_), Symbol::S) => InterOutcome::DataS,
            _ => InterOutcome::Other,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            InterOutcome::DataData => "Data-data",
            InterOutcome::DataT => "Data-T",
            InterOutcome::DataR => "Data-R",
            InterOutcome::DataS => "Data-S",
            InterOutcome::AnyViolation => "At least one H, I, V, VH",
            InterOutcome::Other => "Other",
        }
    }
}

/// Number of equally likely single-event cases per data symbol (one per cell).
pub const CELLS_PER_SYMBOL: u32 = 5;
pub const INTRASYMBOL_CASES: u32 = 16 * 4;
pub const INTERSYMBOL_CASES: u32 = 16 * 16;

/// Everything derivable from exhaustively applying one noise event to every
/// data symbol and every pair of adjacent data symbols.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EffectTabulation {
    /// `effects[v][c]`: symbol received from data `v` with column `c` of
    /// [`ChangedBits::ALL`] inverted.
    pub effects: [[Symbol; 6]; 16],
    /// Data-bit XOR patterns for the cells of `effects` that stay data.
    pub data_patterns: [[Option<u8>; 6]; 16],
    pub intrasymbol: Vec<(IntraOutcome, u32)>,
    pub intersymbol: Vec<(InterOutcome, u32)>,
    /// Frequency of each pattern of [`ErrorPattern::ALPHABET`].
    pub pattern_counts: Vec<(ErrorPattern, u32)>,
}

pub fn tabulate_effects() -> EffectTabulation {
    let mut effects = [[Symbol::Quiet; 6]; 16];
    let mut data_patterns = [[None; 6]; 16];
    for v in 0..16u8 {
        for (c, bits) in ChangedBits::ALL.iter().enumerate() {
            let s = symbol_effect(v, *bits);
            effects[v as usize][c] = s;
            data_patterns[v as usize][c] = s.data_value().map(|d| d ^ v);
        }
    }

    let mut intra = std::collections::BTreeMap::new();
    let mut patterns = std::collections::BTreeMap::new();
    for v in 0..16u8 {
        for bits in ChangedBits::INTRASYMBOL {
            let s = symbol_effect(v, bits);
            *intra.entry(IntraOutcome::of(s)).or_insert(0u32) += 1;
            if let Some(d) = s.data_value() {
                *patterns.entry(ErrorPattern::single(d ^ v)).or_insert(0u32) += 1;
            }
        }
    }

    let mut inter = std::collections::BTreeMap::new();
    for a in 0..16u8 {
        for b in 0..16u8 {
            let (x, y) = pair_effect(a, b);
            *inter.entry(InterOutcome::of(x, y)).or_insert(0u32) += 1;
            if let (Some(dx), Some(dy)) = (x.data_value(), y.data_value()) {
                *patterns
                    .entry(ErrorPattern::double(dx ^ a, dy ^ b))
                    .or_insert(0u32) += 1;
            }
        }
    }

    EffectTabulation {
        effects,
        data_patterns,
        intrasymbol: IntraOutcome::ALL
            .iter()
            .map(|o| (*o, intra.get(o).copied().unwrap_or(0)))
            .collect(),
        intersymbol: InterOutcome::ALL
            .iter()
            .map(|o| (*o, inter.get(o).copied().unwrap_or(0)))
            .collect(),
        pattern_counts: {
            let mut v: Vec<_> = patterns.into_iter().collect();
            v.sort_by_key(|(p, _)| (p.symbols(), p.bits()));
            v
        },
    }
}

impl EffectTabulation {
    pub fn intra_count(&self, o: IntraOutcome) -> u32 {
        self.intrasymbol.iter().find(|(k, _)| *k == o).map_or(0, |(_, c)| *c)
    }

    pub fn inter_count(&self, o: InterOutcome) -> u32 {
        self.intersymbol.iter().find(|(k, _)| *k == o).map_or(0, |(_, c)| *c)
    }

    pub fn pattern_count(&self, p: ErrorPattern) -> u32 {
        self.pattern_counts
            .iter()
            .find(|(k, _)| *k == p)
            .map_or(0, |(_, c)| *c)
    }

    /// Fraction of all single-event data symbol errors.
    pub fn intra_fraction(&self, o: IntraOutcome) -> f64 {
        self.intra_count(o) as f64 / (16 * CELLS_PER_SYMBOL) as f64
    }

    pub fn inter_fraction(&self, o: InterOutcome) -> f64 {
        self.inter_count(o) as f64 / (256 * CELLS_PER_SYMBOL) as f64
    }

    /// Fraction of data errors that produce pattern `p`.
    pub fn pattern_fraction(&self, p: ErrorPattern) -> f64 {
        let denom = if p.symbols() == 1 { 16 * CELLS_PER_SYMBOL } else { 256 * CELLS_PER_SYMBOL };
        self.pattern_count(p) as f64 / denom as f64
    }

    /// Share of errors whose outcome is entirely data symbols.
    pub fn data_to_data_fraction(&self) -> f64 {
        self.intra_fraction(IntraOutcome::Data) + self.inter_fraction(InterOutcome::DataData)
    }

    /// Share of errors producing at least one line-state or violation symbol.
    pub fn symbol_violation_fraction(&self) -> f64 {
        self.intra_fraction(IntraOutcome::Violation) + self.inter_fraction(InterOutcome::AnyViolation)
    }

    /// Share of errors in which a data symbol becomes T (intra- and intersymbol).
    pub fn to_t_fraction(&self) -> f64 {
        self.intra_fraction(IntraOutcome::T) + self.inter_fraction(InterOutcome::DataT)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::{decode_stream, encode_symbols, nrzi_demodulate, nrzi_modulate, Level};

    #[test]
    fn effect_examples() {
        assert_eq!(symbol_effect(3, ChangedBits::P45), Symbol::Data(0xA));
        assert!(matches!(symbol_effect(0, ChangedBits::P12), Symbol::Violation(_)));
        assert_eq!(symbol_effect(1, ChangedBits::P1), Symbol::S);
        assert_eq!(pair_effect(0, 0), (Symbol::Idle, Symbol::Data(6)));
        assert_eq!(pair_effect(2, 4), (Symbol::Data(3), Symbol::Data(0xC)));
    }

    #[test]
    fn apply_noise_bounds_and_involution() {
        let levels = nrzi_modulate(&encode_symbols(&[Symbol::Data(0)]).unwrap(), Level::Low);
        assert!(apply_noise(&levels, NoiseEvent::at(5)).is_err());
        assert!(apply_noise(&levels, NoiseEvent::at(-2)).is_err());
        for i in -1..5 {
            let once = apply_noise(&levels, NoiseEvent::at(i)).unwrap();
            assert_ne!(once, levels);
            assert_eq!(apply_noise(&once, NoiseEvent::at(i)).unwrap(), levels);
        }
        let hit = apply_noise(&levels, NoiseEvent::at(3)).unwrap();
        assert_eq!(decode_stream(&nrzi_demodulate(&hit)), vec![Symbol::Data(0xF)]);
    }

    // The table must agree with actually flipping levels on the NRZI waveform.
    #[test]
    fn effects_match_waveform_path() {
        for a in 0..16u8 {
            for b in 0..16u8 {
                let bits = encode_symbols(&[Symbol::Data(a), Symbol::Data(b)]).unwrap();
                let levels = nrzi_modulate(&bits, Level::Low);
                for cell in 0..4 {
                    let hit = apply_noise(&levels, NoiseEvent::at(cell)).unwrap();
                    let syms = decode_stream(&nrzi_demodulate(&hit));
                    assert_eq!(syms[0], symbol_effect(a, ChangedBits::INTRASYMBOL[cell as usize]));
                    assert_eq!(syms[1], Symbol::Data(b));
                }
                let hit = apply_noise(&levels, NoiseEvent::at(4)).unwrap();
                let syms = decode_stream(&nrzi_demodulate(&hit));
                assert_eq!((syms[0], syms[1]), pair_effect(a, b));
            }
        }
    }

    #[test]
    fn pair_outcomes() {
        let t = tabulate_effects();
        assert_eq!(t.inter_count(InterOutcome::DataData), 84);
        assert_eq!(t.inter_count(InterOutcome::Other), 0);
        assert_eq!(t.intrasymbol.iter().map(|(_, c)| c).sum::<u32>(), 64);
        assert_eq!(t.intersymbol.iter().map(|(_, c)| c).sum::<u32>(), 256);
    }

    #[test]
    fn alphabet_is_closed_and_bounded() {
        let t = tabulate_effects();
        let found: Vec<_> = t.pattern_counts.iter().map(|(p, _)| *p).collect();
        assert_eq!(found, ErrorPattern::ALPHABET.to_vec());
        for p in ErrorPattern::ALPHABET {
            assert!(p.weight() <= 4);
        }
    }

    #[test]
    fn pattern_text() {
        for p in ErrorPattern::ALPHABET {
            assert_eq!(p.to_string().parse::<ErrorPattern>().unwrap(), p);
        }
        assert_eq!("00011000".parse::<ErrorPattern>().unwrap(), ErrorPattern::double(1, 8));
        assert!("0000".parse::<ErrorPattern>().is_err());
        assert!("101".parse::<ErrorPattern>().is_err());
    }

    #[test]
    fn fractions() {
        let t = tabulate_effects();
        assert!((t.data_to_data_fraction() - 0.465625).abs() < 1e-12);
        assert!((t.symbol_violation_fraction() - 0.3390625).abs() < 1e-12);
        assert!((t.pattern_fraction(ErrorPattern::double(1, 6)) - 28.0 / 1280.0).abs() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // Every event changes exactly the code-bits of its own cell and the next one.
            #[test]
            fn two_bit_theorem(data in proptest::collection::vec(0u8..16, 1..40), cell in any::<prop::sample::Index>()) {
                let syms: Vec<_> = data.iter().map(|&d| Symbol::Data(d)).collect();
                let bits = encode_symbols(&syms).unwrap();
                let levels = nrzi_modulate(&bits, Level::Low);
                let n = bits.len();
                let cell = cell.index(n + 1) as isize - 1;
                let received = nrzi_demodulate(&apply_noise(&levels, NoiseEvent::at(cell)).unwrap());
                let diff: Vec<usize> = (0..n).filter(|&i| bits.bits()[i] != received.bits()[i]).collect();
                let expected: Vec<usize> = [cell, cell + 1]
                    .into_iter()
                    .filter(|&i| i >= 0 && (i as usize) < n)
                    .map(|i| i as usize)
                    .collect();
                prop_assert_eq!(diff, expected);
            }
        }
    }
}
