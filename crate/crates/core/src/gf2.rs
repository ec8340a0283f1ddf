//! Dense polynomials over GF(2).

use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use serde::{Serialize, Serializer};

/// Polynomial over GF(2) with coefficient `k` stored in bit `k % 64` of word
/// `k / 64`. High zero words are always trimmed, so equality is structural.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct GfPoly {
    words: Vec<u64>,
}

impl GfPoly {
    pub fn zero() -> Self {
        GfPoly { words: vec![] }
    }

    pub fn one() -> Self {
        GfPoly::from_u64(1)
    }

    pub fn from_u64(bits: u64) -> Self {
        let mut p = GfPoly { words: vec![bits] };
        p.trim();
        p
    }

    pub fn monomial(k: u64) -> Self {
        let mut p = GfPoly::zero();
        p.toggle(k);
        p
    }

    /// Sum of `x^e` over `exps`; repeated exponents cancel.
    pub fn from_exponents<I: IntoIterator<Item = u64>>(exps: I) -> Self {
        let mut p = GfPoly::zero();
        for e in exps {
            p.toggle(e);
        }
        p
    }

    /// The first bit gets the highest exponent, the last bit exponent 0.
    pub fn from_msb_bits(bits: &[bool]) -> Self {
        let n = bits.len() as u64;
        GfPoly::from_exponents(
            bits.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| n - 1 - i as u64),
        )
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn toggle(&mut self, k: u64) {
        let w = (k / 64) as usize;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] ^= 1 << (k % 64);
        self.trim();
    }

    /// Little-endian 64-bit coefficient words.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn coeff(&self, k: u64) -> bool {
        self.words
            .get((k / 64) as usize)
            .is_some_and(|w| (w >> (k % 64)) & 1 == 1)
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u64> {
        let top = *self.words.last()?;
        Some((self.words.len() as u64 - 1) * 64 + 63 - top.leading_zeros() as u64)
    }

    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn exponents(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.weight() as usize);
        for (i, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as u64;
                out.push(i as u64 * 64 + b);
                w &= w - 1;
            }
        }
        out
    }

    pub fn to_u64(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    /// Multiply by `x^k`.
    pub fn shl(&self, k: u64) -> GfPoly {
        if self.is_zero() {
            return GfPoly::zero();
        }
        let word_shift = (k / 64) as usize;
        let bit_shift = k % 64;
        let mut words = vec![0u64; self.words.len() + word_shift + 1];
        for (i, &w) in self.words.iter().enumerate() {
            words[i + word_shift] ^= w << bit_shift;
            if bit_shift != 0 {
                words[i + word_shift + 1] ^= w >> (64 - bit_shift);
            }
        }
        let mut p = GfPoly { words };
        p.trim();
        p
    }

    pub fn mul(&self, other: &GfPoly) -> GfPoly {
        let mut acc = GfPoly::zero();
        for e in other.exponents() {
            acc ^= &self.shl(e);
        }
        acc
    }

    /// Remainder of division by `modulus`; `None` if the modulus is zero.
    pub fn rem(&self, modulus: &GfPoly) -> Option<GfPoly> {
        let dg = modulus.degree()?;
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < dg {
                break;
            }
            r.xor_shifted(modulus, dr - dg);
        }
        Some(r)
    }

    fn xor_shifted(&mut self, other: &GfPoly, k: u64) {
        let word_shift = (k / 64) as usize;
        let bit_shift = k % 64;
        let need = other.words.len() + word_shift + 1;
        if self.words.len() < need {
            self.words.resize(need, 0);
        }
        for (i, &w) in other.words.iter().enumerate() {
            self.words[i + word_shift] ^= w << bit_shift;
            if bit_shift != 0 {
                self.words[i + word_shift + 1] ^= w >> (64 - bit_shift);
            }
        }
        self.trim();
    }
}

impl BitXorAssign<&GfPoly> for GfPoly {
    fn bitxor_assign(&mut self, rhs: &GfPoly) {
        if self.words.len() < rhs.words.len() {
            self.words.resize(rhs.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
        self.trim();
    }
}

impl BitXor<&GfPoly> for &GfPoly {
    type Output = GfPoly;

    fn bitxor(self, rhs: &GfPoly) -> GfPoly {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

impl fmt::Debug for GfPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GfPoly({self})")
    }
}

/// Written as `1 + x^2 + x^5`, lowest term first.
impl fmt::Display for GfPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .exponents()
            .into_iter()
            .map(|e| match e {
                0 => "1".to_string(),
                1 => "x".to_string(),
                e => format!("x^{e}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

impl Serialize for GfPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.exponents().serialize(serializer)
    }
}
