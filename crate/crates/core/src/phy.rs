//! 4B/5B symbol alphabet and NRZI modulation.
//!
//! Code groups are five code-bits read in transmission order: bit position 1
//! is the first transmitted and is stored as the most significant of the five
//! bits of a [`CodeGroup`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PhyError {
    #[error("symbol {0} is a code violation and cannot be transmitted")]
    AttemptToTransmitViolation(Symbol),
    #[error("invalid symbol character {0:?}")]
    InvalidSymbolChar(char),
    #[error("code group {0:#07b} is wider than five bits")]
    InvalidCodeGroup(u8),
    #[error("data value {0} does not fit in a quartet")]
    InvalidDataValue(u8),
}

/// Five code-bits, first transmitted bit in bit 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CodeGroup(u8);

impl CodeGroup {
    pub fn new(bits: u8) -> Result<Self, PhyError> {
        if bits < 32 {
            Ok(CodeGroup(bits))
        } else {
            Err(PhyError::InvalidCodeGroup(bits))
        }
    }

    pub const fn bits(self) -> u8 {
        self.0
    }

    /// Code-bit at 1-based position `pos` (1 = first transmitted).
    pub fn bit(self, pos: usize) -> bool {
        debug_assert!((1..=5).contains(&pos));
        (self.0 >> (5 - pos)) & 1 == 1
    }

    pub fn all() -> impl Iterator<Item = CodeGroup> {
        (0..32).map(CodeGroup)
    }
}

impl fmt::Display for CodeGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:05b}", self.0)
    }
}

/// One of the 32 received symbols.
///
/// Violation groups keep their code group so that decoding stays a bijection
/// over all 5-bit groups; [`Symbol::ViolationHalt`] is the subset that a
/// receiver must treat as Halt.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symbol {
    Data(u8),
    Quiet,
    Idle,
    Halt,
    J,
    K,
    T,
    R,
    S,
    Violation(CodeGroup),
    ViolationHalt(CodeGroup),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymbolClass {
    Data,
    LineState,
    Control,
    Violation,
}

const DATA_GROUPS: [u8; 16] = [
    0b11110, 0b01001, 0b10100, 0b10101, 0b01010, 0b01011, 0b01110, 0b01111, 0b10010, 0b10011,
    0b10110, 0b10111, 0b11010, 0b11011, 0b11100, 0b11101,
];

/// Invalid groups that a receiver interprets as Halt.
const VH_GROUPS: [u8; 4] = [0b00001, 0b00010, 0b01000, 0b10000];

const DECODE_TABLE: [Symbol; 32] = build_decode_table();

const fn build_decode_table() -> [Symbol; 32] {
    let mut table = [Symbol::Quiet; 32];
    let mut g = 0;
    while g < 32 {
        table[g] = Symbol::Violation(CodeGroup(g as u8));
        g += 1;
    }
    let mut v = 0;
    while v < 16 {
        table[DATA_GROUPS[v] as usize] = Symbol::Data(v as u8);
        v += 1;
    }
    table[0b00000] = Symbol::Quiet;
    table[0b11111] = Symbol::Idle;
    table[0b00100] = Symbol::Halt;
    table[0b11000] = Symbol::J;
    table[0b10001] = Symbol::K;
    table[0b01101] = Symbol::T;
    table[0b00111] = Symbol::R;
    table[0b11001] = Symbol::S;
    let mut h = 0;
    while h < VH_GROUPS.len() {
        table[VH_GROUPS[h] as usize] = Symbol::ViolationHalt(CodeGroup(VH_GROUPS[h]));
        h += 1;
    }
    table
}

impl Symbol {
    pub fn data(value: u8) -> Result<Symbol, PhyError> {
        if value < 16 {
            Ok(Symbol::Data(value))
        } else {
            Err(PhyError::InvalidDataValue(value))
        }
    }

    pub fn class(self) -> SymbolClass {
        match self {
            Symbol::Data(_) => SymbolClass::Data,
            Symbol::Quiet | Symbol::Idle | Symbol::Halt => SymbolClass::LineState,
            Symbol::J | Symbol::K | Symbol::T | Symbol::R | Symbol::S => SymbolClass::Control,
            Symbol::Violation(_) | Symbol::ViolationHalt(_) => SymbolClass::Violation,
        }
    }

    /// Line-state or violation symbol: aborts any frame in progress.
    pub fn aborts_frame(self) -> bool {
        matches!(self.class(), SymbolClass::LineState | SymbolClass::Violation)
    }

    pub fn is_data(self) -> bool {
        matches!(self, Symbol::Data(_))
    }

    pub fn data_value(self) -> Option<u8> {
        match self {
            Symbol::Data(v) => Some(v),
            _ => None,
        }
    }

    /// The code group this symbol was received as (total, including violations).
    pub fn code_group(self) -> CodeGroup {
        match self {
            Symbol::Data(v) => CodeGroup(DATA_GROUPS[v as usize & 0xf]),
            Symbol::Quiet => CodeGroup(0b00000),
            Symbol::Idle => CodeGroup(0b11111),
            Symbol::Halt => CodeGroup(0b00100),
            Symbol::J => CodeGroup(0b11000),
            Symbol::K => CodeGroup(0b10001),
            Symbol::T => CodeGroup(0b01101),
            Symbol::R => CodeGroup(0b00111),
            Symbol::S => CodeGroup(0b11001),
            Symbol::Violation(g) | Symbol::ViolationHalt(g) => g,
        }
    }

    /// Single-character notation: hex digit for data, letter otherwise.
    /// Both violation kinds print as `V`.
    pub fn to_char(self) -> char {
        match self {
            Symbol::Data(v) => char::from_digit(v as u32, 16)
                .unwrap()
                .to_ascii_uppercase(),
            Symbol::Quiet => 'Q',
            Symbol::Idle => 'I',
            Symbol::Halt => 'H',
            Symbol::J => 'J',
            Symbol::K => 'K',
            Symbol::T => 'T',
            Symbol::R => 'R',
            Symbol::S => 'S',
            Symbol::Violation(_) | Symbol::ViolationHalt(_) => 'V',
        }
    }

    /// Table-style label that distinguishes `V` from `VH`.
    pub fn label(self) -> String {
        match self {
            Symbol::ViolationHalt(_) => "VH".to_string(),
            s => s.to_char().to_string(),
        }
    }

    pub fn from_char(c: char) -> Result<Symbol, PhyError> {
        if let Some(v) = c.to_digit(16) {
            return Ok(Symbol::Data(v as u8));
        }
        Ok(match c.to_ascii_uppercase() {
            'Q' => Symbol::Quiet,
            'I' => Symbol::Idle,
            'H' => Symbol::Halt,
            'J' => Symbol::J,
            'K' => Symbol::K,
            'T' => Symbol::T,
            'R' => Symbol::R,
            'S' => Symbol::S,
            'V' => Symbol::Violation(CodeGroup(0b00011)),
            _ => return Err(PhyError::InvalidSymbolChar(c)),
        })
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Code group for a transmittable symbol.
pub fn encode_symbol(s: Symbol) -> Result<CodeGroup, PhyError> {
    match s {
        Symbol::Violation(_) | Symbol::ViolationHalt(_) => {
            Err(PhyError::AttemptToTransmitViolation(s))
        }
        Symbol::Data(v) if v > 15 => Err(PhyError::InvalidDataValue(v)),
        _ => Ok(s.code_group()),
    }
}

/// Total decoder over all 32 groups.
pub fn decode_group(g: CodeGroup) -> Symbol {
    DECODE_TABLE[g.0 as usize]
}

/// Decode the low five bits of `bits`.
pub fn decode_bits(bits: u8) -> Symbol {
    DECODE_TABLE[(bits & 0x1f) as usize]
}

/// Parse the text notation (`IIIIJK10...T`). Whitespace is ignored.
pub fn parse_symbols(text: &str) -> Result<Vec<Symbol>, PhyError> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(Symbol::from_char)
        .collect()
}

pub fn format_symbols(symbols: &[Symbol]) -> String {
    symbols.iter().map(|s| s.to_char()).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeStream {
    bits: Vec<bool>,
}

impl CodeStream {
    pub fn new(bits: Vec<bool>) -> Self {
        CodeStream { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    pub fn push_group(&mut self, g: CodeGroup) {
        self.bits.extend((1..=5).map(|p| g.bit(p)));
    }

    /// Groups of five starting at bit 0; a trailing partial group is dropped.
    pub fn groups(&self) -> impl Iterator<Item = CodeGroup> + '_ {
        self.bits.chunks_exact(5).map(|c| {
            CodeGroup(c.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8))
        })
    }
}

impl FromStr for CodeStream {
    type Err = PhyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                c => Err(PhyError::InvalidSymbolChar(c)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(CodeStream::new)
    }
}

impl fmt::Display for CodeStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn encode_symbols(symbols: &[Symbol]) -> Result<CodeStream, PhyError> {
    let mut stream = CodeStream::new(Vec::with_capacity(symbols.len() * 5));
    for &s in symbols {
        stream.push_group(encode_symbol(s)?);
    }
    Ok(stream)
}

pub fn decode_stream(stream: &CodeStream) -> Vec<Symbol> {
    stream.groups().map(decode_group).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    #[default]
    Low,
    High,
}

impl Level {
    pub fn flipped(self) -> Level {
        match self {
            Level::Low => Level::High,
            Level::High => Level::Low,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Level::Low => 'L',
            Level::High => 'H',
        }
    }
}

/// Signal levels, one per code cell, plus the level of the cell before the
/// first one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LevelStream {
    pub leading: Level,
    pub levels: Vec<Level>,
}

impl LevelStream {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn inverted(&self) -> LevelStream {
        LevelStream {
            leading: self.leading.flipped(),
            levels: self.levels.iter().map(|l| l.flipped()).collect(),
        }
    }
}

impl fmt::Display for LevelStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.levels {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

/// A one is a transition, a zero holds the previous level.
pub fn nrzi_modulate(bits: &CodeStream, leading: Level) -> LevelStream {
    let levels = bits
        .bits()
        .iter()
        .scan(leading, |level, &b| {
            if b {
                *level = level.flipped();
            }
            Some(*level)
        })
        .collect();
    LevelStream { leading, levels }
}

pub fn nrzi_demodulate(levels: &LevelStream) -> CodeStream {
    let mut prev = levels.leading;
    let bits = levels
        .levels
        .iter()
        .map(|&l| {
            let b = l != prev;
            prev = l;
            b
        })
        .collect();
    CodeStream::new(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(s: &str) -> CodeStream {
        s.parse().unwrap()
    }

    #[test]
    fn table_examples() {
        assert_eq!(encode_symbol(Symbol::Data(5)).unwrap().to_string(), "01011");
        assert_eq!(encode_symbol(Symbol::J).unwrap().to_string(), "11000");
        assert!(matches!(
            encode_symbol(Symbol::from_char('V').unwrap()),
            Err(PhyError::AttemptToTransmitViolation(_))
        ));
        assert_eq!(decode_group(CodeGroup(0b11110)), Symbol::Data(0));
        assert!(matches!(decode_group(CodeGroup(0b00001)), Symbol::ViolationHalt(_)));
        assert!(matches!(decode_group(CodeGroup(0b00110)), Symbol::Violation(_)));
    }

    #[test]
    fn violation_sets_match_code_assignments() {
        let mut v = vec![];
        let mut vh = vec![];
        for g in CodeGroup::all() {
            match decode_group(g) {
                Symbol::Violation(_) => v.push(g.bits()),
                Symbol::ViolationHalt(_) => vh.push(g.bits()),
                _ => {}
            }
        }
        assert_eq!(vh, vec![0b00001, 0b00010, 0b01000, 0b10000]);
        assert_eq!(v, vec![0b00011, 0b00101, 0b00110, 0b01100]);
    }

    #[test]
    fn class_counts_and_bijection() {
        let mut seen = std::collections::HashSet::new();
        let mut counts = std::collections::HashMap::new();
        for g in CodeGroup::all() {
            let s = decode_group(g);
            assert_eq!(s.code_group(), g);
            assert!(seen.insert(s));
            *counts.entry(s.class()).or_insert(0) += 1;
        }
        assert_eq!(counts[&SymbolClass::Data], 16);
        assert_eq!(counts[&SymbolClass::LineState], 3);
        assert_eq!(counts[&SymbolClass::Control], 5);
        assert_eq!(counts[&SymbolClass::Violation], 8);
    }

    #[test]
    fn transmittable_roundtrip() {
        for g in CodeGroup::all() {
            let s = decode_group(g);
            match encode_symbol(s) {
                Ok(back) => assert_eq!(decode_group(back), s),
                Err(_) => assert_eq!(s.class(), SymbolClass::Violation),
            }
        }
    }

    #[test]
    fn data_groups_have_short_zero_runs() {
        for v in 0..16 {
            let g = encode_symbol(Symbol::Data(v)).unwrap();
            let s = g.to_string();
            assert!(!s.contains("000"), "data {v:X} = {s}");
        }
    }

    #[test]
    fn nrzi_examples() {
        let levels = nrzi_modulate(&cs("11110"), Level::Low);
        assert_eq!(levels.to_string(), "HLHLL");
        assert_eq!(nrzi_demodulate(&levels), cs("11110"));

        let zeros = nrzi_modulate(&cs("0000000"), Level::Low);
        assert!(zeros.levels.iter().all(|&l| l == Level::Low));
        assert_eq!(nrzi_demodulate(&zeros), cs("0000000"));
    }

    #[test]
    fn figure3_flip_fourth_cell() {
        let mut levels = nrzi_modulate(&cs("11110"), Level::Low);
        levels.levels[3] = levels.levels[3].flipped();
        let bits = nrzi_demodulate(&levels);
        assert_eq!(bits, cs("11101"));
        assert_eq!(decode_stream(&bits), vec![Symbol::Data(0xF)]);
    }

    #[test]
    fn text_notation() {
        let syms = parse_symbols("IIII JK 80 TT").unwrap();
        assert_eq!(format_symbols(&syms), "IIIIJK80TT");
        assert!(parse_symbols("IIX").is_err());
        assert_eq!(parse_symbols("a").unwrap(), vec![Symbol::Data(10)]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn nrzi_roundtrip(bits in proptest::collection::vec(any::<bool>(), 0..400), high in any::<bool>()) {
                let leading = if high { Level::High } else { Level::Low };
                let stream = CodeStream::new(bits);
                prop_assert_eq!(nrzi_demodulate(&nrzi_modulate(&stream, leading)), stream);
            }

            #[test]
            fn demodulation_ignores_polarity(bits in proptest::collection::vec(any::<bool>(), 0..400)) {
                let levels = nrzi_modulate(&CodeStream::new(bits), Level::Low);
                prop_assert_eq!(nrzi_demodulate(&levels), nrzi_demodulate(&levels.inverted()));
            }
        }
    }
}
