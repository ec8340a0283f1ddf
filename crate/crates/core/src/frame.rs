//! Frames and tokens: construction, serialization, stream parsing, validity
//! checking and the indicator rules applied by repeating stations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fcs::{CheckPolynomial, FcsValue};
use crate::phy::Symbol;

pub const FC_SYMBOLS: usize = 2;
pub const ADDRESS_SYMBOLS: usize = 12;
pub const FCS_SYMBOLS: usize = 8;
/// FC + DA + SA
pub const HEADER_SYMBOLS: usize = FC_SYMBOLS + 2 * ADDRESS_SYMBOLS;
/// FC + DA + SA + FCS, the shortest valid data length.
pub const MIN_DATA_SYMBOLS: usize = HEADER_SYMBOLS + FCS_SYMBOLS;
pub const DEFAULT_PREAMBLE: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("INFO field has {0} symbols; it must be a whole number of octets")]
    OddInfoLength(usize),
    #[error("FC {0:X}{1:X} is reserved for tokens")]
    TokenFcUsedForFrame(u8, u8),
    #[error("nibble value {0} out of range")]
    InvalidNibble(u8),
}

/// FC = 1X00 0000.
pub fn is_token_fc(fc: [u8; 2]) -> bool {
    fc[0] & 0b1011 == 0b1000 && fc[1] == 0
}

/// FC = 0X00 r000 or XX10 XXXX: frames accepted without an FCS check.
pub fn is_fcs_exempt_fc(fc: [u8; 2]) -> bool {
    (fc[0] & 0b1011 == 0 && fc[1] & 0b0111 == 0) || fc[0] & 0b0011 == 0b0010
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub fc: [u8; 2],
    pub da: [u8; ADDRESS_SYMBOLS],
    pub sa: [u8; ADDRESS_SYMBOLS],
    pub info: Vec<u8>,
    pub fcs: FcsValue,
    pub indicators: Vec<Symbol>,
    pub preamble_len: usize,
}

pub fn build_frame(fc: [u8; 2], da: [u8; 12], sa: [u8; 12], info: Vec<u8>) -> Result<Frame, FrameError> {
    build_frame_with(CheckPolynomial::fddi(), fc, da, sa, info)
}

/// Same as [`build_frame`] with the FCS computed over another generator.
pub fn build_frame_with(
    check: &CheckPolynomial,
    fc: [u8; 2],
    da: [u8; 12],
    sa: [u8; 12],
    info: Vec<u8>,
) -> Result<Frame, FrameError> {
    if let Some(&bad) = fc.iter().chain(&da).chain(&sa).chain(&info).find(|&&n| n > 0xf) {
        return Err(FrameError::InvalidNibble(bad));
    }
    if info.len() % 2 != 0 {
        return Err(FrameError::OddInfoLength(info.len()));
    }
    if is_token_fc(fc) {
        return Err(FrameError::TokenFcUsedForFrame(fc[0], fc[1]));
    }
    let mut frame = Frame {
        fc,
        da,
        sa,
        info,
        fcs: FcsValue(0),
        indicators: vec![Symbol::R; 3],
        preamble_len: DEFAULT_PREAMBLE,
    };
    frame.fcs = check.compute_nibbles(&frame.covered());
    Ok(frame)
}

impl Frame {
    /// FC through INFO: the symbols the FCS is computed over.
    pub fn covered(&self) -> Vec<u8> {
        let mut v = Vec::with_capacity(HEADER_SYMBOLS + self.info.len());
        v.extend_from_slice(&self.fc);
        v.extend_from_slice(&self.da);
        v.extend_from_slice(&self.sa);
        v.extend_from_slice(&self.info);
        v
    }

    /// FC through FCS.
    pub fn data(&self) -> Vec<u8> {
        let mut v = self.covered();
        v.extend_from_slice(&self.fcs.nibbles());
        v
    }

    pub fn data_symbols(&self) -> usize {
        MIN_DATA_SYMBOLS + self.info.len()
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out = vec![Symbol::Idle; self.preamble_len];
        out.push(Symbol::J);
        out.push(Symbol::K);
        out.extend(self.data().into_iter().map(Symbol::Data));
        out.push(Symbol::T);
        out.extend_from_slice(&self.indicators);
        out
    }

    /// Index of the starting J within [`Frame::symbols`].
    pub fn sd_index(&self) -> usize {
        self.preamble_len
    }

    /// Index of the ending T within [`Frame::symbols`].
    pub fn ed_index(&self) -> usize {
        self.preamble_len + 2 + self.data_symbols()
    }

    /// Frame length F in code-bits, preamble included.
    pub fn code_bits(&self) -> usize {
        5 * (self.preamble_len + 2 + self.data_symbols() + 1 + self.indicators.len())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub restricted: bool,
}

impl Token {
    pub fn fc(self) -> [u8; 2] {
        [if self.restricted { 0xC } else { 0x8 }, 0]
    }

    pub fn symbols(self) -> Vec<Symbol> {
        self.symbols_with_preamble(DEFAULT_PREAMBLE)
    }

    pub fn symbols_with_preamble(self, preamble: usize) -> Vec<Symbol> {
        let fc = self.fc();
        let mut out = vec![Symbol::Idle; preamble];
        out.extend([Symbol::J, Symbol::K, Symbol::Data(fc[0]), Symbol::Data(fc[1]), Symbol::T, Symbol::T]);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pdu {
    Frame(Frame),
    Token(Token),
}

pub fn serialize(pdu: &Pdu) -> Vec<Symbol> {
    match pdu {
        Pdu::Frame(f) => f.symbols(),
        Pdu::Token(t) => t.symbols(),
    }
}

/// A JK ... T sequence that is not a token.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub sd_index: usize,
    pub ed_index: usize,
    pub data: Vec<u8>,
    /// Symbols following T up to the next J or line state.
    pub status: Vec<Symbol>,
}

impl Candidate {
    pub fn fc(&self) -> Option<[u8; 2]> {
        (self.data.len() >= 2).then(|| [self.data[0], self.data[1]])
    }

    pub fn da(&self) -> Option<&[u8]> {
        self.data.get(FC_SYMBOLS..FC_SYMBOLS + ADDRESS_SYMBOLS)
    }

    pub fn e_indicator(&self) -> Option<Symbol> {
        self.status.first().copied()
    }

    pub fn a_indicator(&self) -> Option<Symbol> {
        self.status.get(1).copied()
    }

    /// A T inside FC/DA/SA, an odd data count, or a token FC.
    pub fn framing_fault(&self) -> bool {
        self.data.len() < HEADER_SYMBOLS || self.data.len() % 2 != 0 || self.fc().is_some_and(is_token_fc)
    }

    pub fn valid_length(&self) -> bool {
        self.data.len() % 2 == 0 && self.data.len() >= MIN_DATA_SYMBOLS
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortKind {
    /// Q, I, H, V or VH inside a frame.
    SymbolViolation,
    /// J, K, R or S out of place inside a frame.
    StrayControl,
    /// A new JK started before the current frame ended.
    Restarted,
    /// The stream ended inside a frame.
    Unterminated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParseEvent {
    Frame(Candidate),
    Token { sd_index: usize, restricted: bool },
    Aborted { sd_index: usize, at: usize, reason: AbortKind },
}

impl ParseEvent {
    pub fn sd_index(&self) -> usize {
        match self {
            ParseEvent::Frame(c) => c.sd_index,
            ParseEvent::Token { sd_index, .. } | ParseEvent::Aborted { sd_index, .. } => *sd_index,
        }
    }
}

fn is_status(s: Symbol) -> bool {
    matches!(s, Symbol::Data(_) | Symbol::K | Symbol::T | Symbol::R | Symbol::S)
}

/// Split a received symbol stream into PDU candidates and aborts.
///
/// Starting delimiters are only recognized on the symbol boundaries of the
/// stream as given.
pub fn parse(stream: &[Symbol]) -> Vec<ParseEvent> {
    let mut events = Vec::new();
    let n = stream.len();
    let mut i = 0;
    'outer: while i + 1 < n {
        if !(stream[i] == Symbol::J && stream[i + 1] == Symbol::K) {
            i += 1;
            continue;
        }
        let sd = i;
        let mut data = Vec::new();
        let mut j = sd + 2;
        while j < n {
            match stream[j] {
                Symbol::Data(v) => data.push(v),
                Symbol::T => {
                    if data.len() == 2 && is_token_fc([data[0], data[1]]) && stream.get(j + 1) == Some(&Symbol::T) {
                        events.push(ParseEvent::Token {
                            sd_index: sd,
                            restricted: data[0] & 0b0100 != 0,
                        });
                        i = j + 2;
                        continue 'outer;
                    }
                    let mut end = j + 1;
                    while end < n && is_status(stream[end]) {
                        end += 1;
                    }
                    events.push(ParseEvent::Frame(Candidate {
                        sd_index: sd,
                        ed_index: j,
                        data,
                        status: stream[j + 1..end].to_vec(),
                    }));
                    i = end;
                    continue 'outer;
                }
                Symbol::J if stream.get(j + 1) == Some(&Symbol::K) => {
                    events.push(ParseEvent::Aborted {
                        sd_index: sd,
                        at: j,
                        reason: AbortKind::Restarted,
                    });
                    i = j;
                    continue 'outer;
                }
                s => {
                    let reason = if s.aborts_frame() {
                        AbortKind::SymbolViolation
                    } else {
                        AbortKind::StrayControl
                    };
                    events.push(ParseEvent::Aborted { sd_index: sd, at: j, reason });
                    i = j + 1;
                    continue 'outer;
                }
            }
            j += 1;
        }
        events.push(ParseEvent::Aborted {
            sd_index: sd,
            at: n,
            reason: AbortKind::Unterminated,
        });
        break;
    }
    events
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidityMode {
    /// Standard criteria only; the E indicator is not inspected on receipt
    /// and stations only set E on an FCS error.
    Baseline,
    /// E must be R on receipt; stations never reset E and force a mangled E
    /// to S.
    #[default]
    Enhanced,
    /// Enhanced, and additionally the A indicator must be R or S.
    OptionA,
}

impl ValidityMode {
    pub fn label(self) -> &'static str {
        match self {
            ValidityMode::Baseline => "baseline",
            ValidityMode::Enhanced => "enhanced",
            ValidityMode::OptionA => "option_a",
        }
    }
}

/// Station configuration for receiving and repeating.
#[derive(Clone, Debug)]
pub struct StationPolicy {
    pub mode: ValidityMode,
    pub check: CheckPolynomial,
    /// Accept FC classes 0X00 r000 and XX10 XXXX without an FCS check.
    pub honor_exempt_fc: bool,
    /// Own address; matching frames get A (and C when copying) set.
    pub address: Option<[u8; ADDRESS_SYMBOLS]>,
    pub copies: bool,
}

impl Default for StationPolicy {
    fn default() -> Self {
        StationPolicy::new(ValidityMode::Enhanced)
    }
}

impl StationPolicy {
    pub fn new(mode: ValidityMode) -> Self {
        StationPolicy {
            mode,
            check: CheckPolynomial::fddi().clone(),
            honor_exempt_fc: true,
            address: None,
            copies: false,
        }
    }

    pub fn with_check(mut self, check: CheckPolynomial) -> Self {
        self.check = check;
        self
    }

    pub fn honor_exempt_fc(mut self, honor: bool) -> Self {
        self.honor_exempt_fc = honor;
        self
    }

    pub fn with_address(mut self, address: [u8; ADDRESS_SYMBOLS], copies: bool) -> Self {
        self.address = Some(address);
        self.copies = copies;
        self
    }

    fn fcs_ok(&self, c: &Candidate) -> bool {
        self.check.check_nibbles(&c.data).unwrap_or(false)
    }

    fn exempt(&self, c: &Candidate) -> bool {
        self.honor_exempt_fc && c.fc().is_some_and(is_fcs_exempt_fc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Failure {
    None,
    SymbolViolation,
    FramingViolation,
    BadLength,
    BadFcs,
    #[serde(rename = "e_indicator_not_R")]
    EIndicatorNotR,
    /// Option A only: the A indicator is neither R nor S.
    AIndicatorInvalid,
}

impl Failure {
    pub fn label(self) -> &'static str {
        match self {
            Failure::None => "none",
            Failure::SymbolViolation => "symbol_violation",
            Failure::FramingViolation => "framing_violation",
            Failure::BadLength => "bad_length",
            Failure::BadFcs => "bad_fcs",
            Failure::EIndicatorNotR => "e_indicator_not_R",
            Failure::AIndicatorInvalid => "a_indicator_invalid",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityVerdict {
    pub valid: bool,
    pub failure: Failure,
}

impl ValidityVerdict {
    pub const VALID: ValidityVerdict = ValidityVerdict {
        valid: true,
        failure: Failure::None,
    };

    pub fn invalid(failure: Failure) -> Self {
        ValidityVerdict { valid: false, failure }
    }
}

/// Receive-side validity with the default (enhanced) policy.
pub fn validate(candidate: &Candidate) -> ValidityVerdict {
    validate_with(candidate, &StationPolicy::default())
}

pub fn validate_with(c: &Candidate, policy: &StationPolicy) -> ValidityVerdict {
    if c.framing_fault() {
        return ValidityVerdict::invalid(Failure::FramingViolation);
    }
    if !c.valid_length() {
        return ValidityVerdict::invalid(Failure::BadLength);
    }
    if !policy.exempt(c) && !policy.fcs_ok(c) {
        return ValidityVerdict::invalid(Failure::BadFcs);
    }
    if policy.mode != ValidityMode::Baseline && c.e_indicator() != Some(Symbol::R) {
        return ValidityVerdict::invalid(Failure::EIndicatorNotR);
    }
    if policy.mode == ValidityMode::OptionA && !matches!(c.a_indicator(), Some(Symbol::R | Symbol::S)) {
        return ValidityVerdict::invalid(Failure::AIndicatorInvalid);
    }
    ValidityVerdict::VALID
}

/// One parse event together with its verdict.
#[derive(Clone, Debug, Serialize)]
pub struct Reception {
    pub event: ParseEvent,
    pub verdict: ValidityVerdict,
}

pub fn receive(stream: &[Symbol], policy: &StationPolicy) -> Vec<Reception> {
    parse(stream)
        .into_iter()
        .map(|event| {
            let verdict = match &event {
                ParseEvent::Frame(c) => validate_with(c, policy),
                ParseEvent::Token { .. } => ValidityVerdict::VALID,
                ParseEvent::Aborted { reason, .. } => ValidityVerdict::invalid(match reason {
                    AbortKind::SymbolViolation => Failure::SymbolViolation,
                    _ => Failure::FramingViolation,
                }),
            };
            Reception { event, verdict }
        })
        .collect()
}

/// What a repeating station transmits for a received stream.
///
/// Symbols outside any PDU, and the remainder of an aborted frame, are sent
/// as Idle. Frame status indicators are updated according to the policy.
/// The output has the same length as the input and repeating it again
/// changes nothing.
pub fn repeat_station(stream: &[Symbol], policy: &StationPolicy) -> Vec<Symbol> {
    let mut out = vec![Symbol::Idle; stream.len()];
    for event in parse(stream) {
        match event {
            ParseEvent::Token { sd_index, .. } => {
                out[sd_index..sd_index + 6].copy_from_slice(&stream[sd_index..sd_index + 6]);
            }
            ParseEvent::Aborted { sd_index, at, .. } => {
                out[sd_index..at].copy_from_slice(&stream[sd_index..at]);
            }
            ParseEvent::Frame(c) => {
                let end = c.ed_index + 1 + c.status.len();
                out[c.sd_index..end].copy_from_slice(&stream[c.sd_index..end]);
                let fs = c.ed_index + 1;
                let bad_fcs = !policy.exempt(&c) && !policy.fcs_ok(&c);
                if let Some(e) = c.e_indicator() {
                    let set = match policy.mode {
                        ValidityMode::Baseline => bad_fcs,
                        _ => bad_fcs || e != Symbol::R,
                    };
                    if set {
                        out[fs] = Symbol::S;
                    }
                }
                if let (Some(addr), Some(da)) = (policy.address, c.da()) {
                    if da == addr {
                        if c.a_indicator() == Some(Symbol::R) {
                            out[fs + 1] = Symbol::S;
                        }
                        if policy.copies && !bad_fcs && c.status.get(2) == Some(&Symbol::R) {
                            out[fs + 2] = Symbol::S;
                        }
                    }
                }
            }
        }
    }
    out
}
