//! The 32-bit frame check sequence and residue arithmetic modulo its generator.
//!
//! Data-bit sequences are mapped to polynomials with the first transmitted bit
//! at the highest exponent. The checked condition includes the complementing
//! convention of the standard:
//!
//! `(x^n I + x^32 (f + I)) mod g == 0`, with `I = 1 + x + ... + x^31`
//!
//! where `f` is the covered sequence including the FCS and `n` its length.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::gf2::GfPoly;

/// `x^32 + x^26 + x^23 + x^22 + x^16 + x^12 + x^11 + x^10 + x^8 + x^7 + x^5 + x^4 + x^2 + x + 1`
pub const FCS_GENERATOR: u64 = 0x1_04C1_1DB7;

pub const FCS_BITS: usize = 32;

const ONES32: u64 = 0xFFFF_FFFF;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FcsError {
    #[error("division by the zero polynomial")]
    ZeroModulus,
    #[error("sequence of {len} data-bits is shorter than the {FCS_BITS}-bit FCS")]
    TooShort { len: usize },
    #[error("generator {0:#x} must have degree 4..=32 and a constant term")]
    InvalidGenerator(u64),
}

/// A transmitted FCS field value; bit 31 is sent first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FcsValue(pub u32);

impl FcsValue {
    pub fn bits(self) -> Vec<bool> {
        (0..32).rev().map(|i| (self.0 >> i) & 1 == 1).collect()
    }

    /// The eight data-symbol values of the FCS field, in transmission order.
    pub fn nibbles(self) -> [u8; 8] {
        let mut out = [0u8; 8];
        for (i, n) in out.iter_mut().enumerate() {
            *n = ((self.0 >> (28 - 4 * i)) & 0xf) as u8;
        }
        out
    }

    pub fn from_nibbles(nibbles: &[u8; 8]) -> FcsValue {
        FcsValue(nibbles.iter().fold(0u32, |acc, &n| (acc << 4) | (n & 0xf) as u32))
    }
}

impl fmt::Display for FcsValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08X}", self.0)
    }
}

/// Residue arithmetic for a generator of degree at most 32.
///
/// The FDDI generator is the normal case; lower-degree generators are used to
/// make chance acceptance frequent enough to measure.
#[derive(Clone, Debug)]
pub struct CheckPolynomial {
    poly: u64,
    degree: u32,
    mask: u64,
    nibble_table: [u64; 16],
    x32: u64,
    x64: u64,
    ones: u64,
}

impl CheckPolynomial {
    pub fn new(poly: u64) -> Result<Self, FcsError> {
        if poly == 0 || poly & 1 == 0 {
            return Err(FcsError::InvalidGenerator(poly));
        }
        let degree = 63 - poly.leading_zeros();
        if !(4..=32).contains(&degree) {
            return Err(FcsError::InvalidGenerator(poly));
        }
        let mut cp = CheckPolynomial {
            poly,
            degree,
            mask: (1u64 << degree) - 1,
            nibble_table: [0; 16],
            x32: 0,
            x64: 0,
            ones: 0,
        };
        for v in 0..16u64 {
            cp.nibble_table[v as usize] = cp.reduce(v << degree);
        }
        cp.x32 = cp.xpow(32);
        cp.x64 = cp.xpow(64);
        cp.ones = cp.reduce(ONES32);
        Ok(cp)
    }

    /// The FDDI / IEEE 802 generator.
    pub fn fddi() -> &'static CheckPolynomial {
        static G: OnceLock<CheckPolynomial> = OnceLock::new();
        G.get_or_init(|| CheckPolynomial::new(FCS_GENERATOR).expect("valid generator"))
    }

    /// `x^8 + x^2 + x + 1`
    pub fn weak8() -> CheckPolynomial {
        CheckPolynomial::new(0x107).expect("valid generator")
    }

    /// `x^16 + x^12 + x^5 + 1`
    pub fn weak16() -> CheckPolynomial {
        CheckPolynomial::new(0x1_1021).expect("valid generator")
    }

    pub fn poly(&self) -> u64 {
        self.poly
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn as_gf(&self) -> GfPoly {
        GfPoly::from_u64(self.poly)
    }

    /// Reduce an arbitrary 64-bit polynomial.
    pub fn reduce(&self, mut v: u64) -> u64 {
        while v > self.mask {
            let top = 63 - v.leading_zeros();
            v ^= self.poly << (top - self.degree);
        }
        v
    }

    pub fn mul_mod(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a <= self.mask && b <= self.mask);
        let mut acc = 0u64;
        let mut b = b;
        while b != 0 {
            let i = b.trailing_zeros();
            acc ^= a << i;
            b &= b - 1;
        }
        self.reduce(acc)
    }

    /// `x^k mod g` by square-and-multiply.
    pub fn xpow(&self, k: u64) -> u64 {
        let mut result = 1u64;
        let mut base = self.reduce(2);
        let mut k = k;
        while k != 0 {
            if k & 1 == 1 {
                result = self.mul_mod(result, base);
            }
            base = self.mul_mod(base, base);
            k >>= 1;
        }
        result
    }

    /// `r * x^4 + nibble mod g`
    #[inline]
    pub fn push_nibble(&self, r: u64, nibble: u8) -> u64 {
        let top = (r >> (self.degree - 4)) as usize;
        ((r << 4) & self.mask) ^ self.nibble_table[top] ^ (nibble & 0xf) as u64
    }

    #[inline]
    pub fn push_bit(&self, r: u64, bit: bool) -> u64 {
        let r = (r << 1) | bit as u64;
        if r >> self.degree & 1 == 1 {
            r ^ self.poly
        } else {
            r
        }
    }

    pub fn residue(&self, p: &GfPoly) -> u64 {
        p.words()
            .iter()
            .rev()
            .fold(0, |r, &w| self.mul_mod(r, self.x64) ^ self.reduce(w))
    }

    /// Residue of a sparse polynomial given by its exponents.
    pub fn residue_sparse(&self, exponents: &[u64]) -> u64 {
        exponents.iter().fold(0, |acc, &e| acc ^ self.xpow(e))
    }

    pub fn rem_bits(&self, bits: &[bool]) -> u64 {
        bits.iter().fold(0, |r, &b| self.push_bit(r, b))
    }

    pub fn rem_nibbles(&self, nibbles: &[u8]) -> u64 {
        nibbles.iter().fold(0, |r, &n| self.push_nibble(r, n))
    }

    fn fcs_from_rem(&self, payload_rem: u64, payload_len: u64) -> FcsValue {
        let r = self.mul_mod(self.xpow(payload_len), self.ones) ^ self.mul_mod(self.x32, payload_rem);
        FcsValue((ONES32 ^ r) as u32)
    }

    fn syndrome(&self, frame_rem: u64, frame_len: u64) -> u64 {
        self.mul_mod(self.xpow(frame_len), self.ones) ^ self.mul_mod(self.x32, frame_rem ^ self.ones)
    }

    pub fn compute_bits(&self, payload: &[bool]) -> FcsValue {
        self.fcs_from_rem(self.rem_bits(payload), payload.len() as u64)
    }

    pub fn compute_nibbles(&self, payload: &[u8]) -> FcsValue {
        self.fcs_from_rem(self.rem_nibbles(payload), 4 * payload.len() as u64)
    }

    pub fn check_bits(&self, frame: &[bool]) -> Result<bool, FcsError> {
        if frame.len() < FCS_BITS {
            return Err(FcsError::TooShort { len: frame.len() });
        }
        Ok(self.syndrome(self.rem_bits(frame), frame.len() as u64) == 0)
    }

    pub fn check_nibbles(&self, frame: &[u8]) -> Result<bool, FcsError> {
        if frame.len() * 4 < FCS_BITS {
            return Err(FcsError::TooShort { len: frame.len() * 4 });
        }
        Ok(self.syndrome(self.rem_nibbles(frame), 4 * frame.len() as u64) == 0)
    }
}

pub fn generator() -> GfPoly {
    GfPoly::from_u64(FCS_GENERATOR)
}

pub fn poly_mod(f: &GfPoly, g: &GfPoly) -> Result<GfPoly, FcsError> {
    f.rem(g).ok_or(FcsError::ZeroModulus)
}

/// `x^k mod g`.
pub fn xpow_mod(k: u64) -> GfPoly {
    GfPoly::from_u64(CheckPolynomial::fddi().xpow(k))
}

pub fn fcs_compute(payload: &[bool]) -> FcsValue {
    CheckPolynomial::fddi().compute_bits(payload)
}

pub fn fcs_check(frame_bits: &[bool]) -> Result<bool, FcsError> {
    CheckPolynomial::fddi().check_bits(frame_bits)
}

pub fn fcs_compute_nibbles(payload: &[u8]) -> FcsValue {
    CheckPolynomial::fddi().compute_nibbles(payload)
}

pub fn fcs_check_nibbles(frame: &[u8]) -> Result<bool, FcsError> {
    CheckPolynomial::fddi().check_nibbles(frame)
}

/// True iff the generator divides `e`, i.e. adding `e` to any frame leaves
/// its check result unchanged.
pub fn is_codeword(e: &GfPoly) -> bool {
    let g = CheckPolynomial::fddi();
    let exps = e.exponents();
    // sparse evaluation is cheaper for the huge low-weight multiples
    if exps.len() < 64 {
        g.residue_sparse(&exps) == 0
    } else {
        g.residue(e) == 0
    }
}

pub fn is_codeword_exponents(exponents: &[u64]) -> bool {
    CheckPolynomial::fddi().residue_sparse(exponents) == 0
}

/// Minimum-degree multiples of the generator for Hamming weights 3 to 13.
pub const KNOWN_MULTIPLES: [(u32, &[u64]); 11] = [
    (3, &[0, 41678, 91639]),
    (4, &[0, 2215, 2866, 3006]),
    (5, &[0, 89, 117, 155, 300]),
    (6, &[0, 79, 85, 123, 186, 203]),
    (7, &[0, 45, 53, 74, 80, 120, 123]),
    (8, &[0, 5, 13, 16, 36, 41, 88, 89]),
    (9, &[0, 2, 3, 18, 19, 32, 37, 57, 66]),
    (10, &[0, 3, 7, 25, 27, 30, 33, 36, 38, 53]),
    (11, &[0, 5, 7, 16, 31, 32, 35, 37, 41, 43, 44]),
    (12, &[0, 3, 5, 7, 8, 13, 18, 21, 24, 26, 30, 42]),
    (13, &[0, 1, 6, 15, 18, 20, 23, 29, 33, 35, 37, 40, 42]),
];
