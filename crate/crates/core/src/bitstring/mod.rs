//! Fixed-width bit strings and addition in `Z_{2^n}` and `Z_{2^n - 1}`.
//!
//! Bits are stored least-significant-first in packed `u64` words. Every
//! textual form (display, parsing, block patterns) is most-significant-first.

mod families;
mod parse;

pub use families::{alternating, periodic, sparse, with_block_count};
pub use parse::parse_alpha;

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

fn word_count(width: usize) -> usize {
    width.div_ceil(WORD_BITS)
}

/// The ambient group the addition happens in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModulusKind {
    /// `Z_{2^n}`: the final carry is dropped.
    #[serde(rename = "pow2")]
    Pow2,
    /// `Z_{2^n - 1}`: the final carry re-enters at bit 0.
    #[serde(rename = "pow2m1")]
    Pow2Minus1,
}

impl ModulusKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModulusKind::Pow2 => "pow2",
            ModulusKind::Pow2Minus1 => "pow2m1",
        }
    }
}

impl fmt::Display for ModulusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModulusKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pow2" => Ok(ModulusKind::Pow2),
            "pow2m1" => Ok(ModulusKind::Pow2Minus1),
            other => Err(Error::parse(
                "modulus",
                format!("expected pow2 or pow2m1, got {other:?}"),
            )),
        }
    }
}

/// A modulus `2^n` or `2^n - 1` for a given width `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Modulus {
    kind: ModulusKind,
    width: usize,
}

impl Modulus {
    pub fn new(kind: ModulusKind, width: usize) -> Result<Self> {
        let min = match kind {
            ModulusKind::Pow2 => 1,
            ModulusKind::Pow2Minus1 => 2,
        };
        if width < min {
            return Err(Error::OutOfRange(format!(
                "width {width} is too small for modulus {kind}"
            )));
        }
        Ok(Modulus { kind, width })
    }

    pub fn pow2(width: usize) -> Result<Self> {
        Self::new(ModulusKind::Pow2, width)
    }

    pub fn pow2_minus1(width: usize) -> Result<Self> {
        Self::new(ModulusKind::Pow2Minus1, width)
    }

    pub fn kind(&self) -> ModulusKind {
        self.kind
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of residues, i.e. the size of the group.
    pub fn order(&self) -> BigUint {
        let full = BigUint::one() << self.width;
        match self.kind {
            ModulusKind::Pow2 => full,
            ModulusKind::Pow2Minus1 => full - 1u32,
        }
    }

    /// Checks that `s` is a valid element of this group.
    pub fn check(&self, s: &BitString) -> Result<()> {
        if s.width() != self.width {
            return Err(Error::WidthMismatch {
                left: s.width(),
                right: self.width,
            });
        }
        if self.kind == ModulusKind::Pow2Minus1 && s.is_all_ones() {
            return Err(Error::InvalidResidue { width: self.width });
        }
        Ok(())
    }
}

/// An `n`-bit string with leading zeros retained.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    width: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(width: usize) -> Self {
        BitString {
            width,
            words: vec![0; word_count(width)],
        }
    }

    pub fn ones(width: usize) -> Self {
        Self::from_words(vec![u64::MAX; word_count(width)], width)
    }

    /// Builds a string from packed little-endian words; bits above `width` are cleared.
    pub fn from_words(mut words: Vec<u64>, width: usize) -> Self {
        words.resize(word_count(width), 0);
        let mut s = BitString { width, words };
        s.mask_top();
        s
    }

    pub fn from_u64(value: u64, width: usize) -> Result<Self> {
        if width < 64 && value >> width != 0 {
            return Err(Error::OutOfRange(format!(
                "{value} does not fit in {width} bits"
            )));
        }
        Ok(Self::from_words(vec![value], width))
    }

    pub fn from_biguint(value: &BigUint, width: usize) -> Result<Self> {
        if value.bits() as usize > width {
            return Err(Error::OutOfRange(format!(
                "{value} does not fit in {width} bits"
            )));
        }
        Ok(Self::from_words(value.to_u64_digits(), width))
    }

    /// Builds a string from bits given least-significant first.
    pub fn from_lsb_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut width = 0;
        for bit in bits {
            if width % WORD_BITS == 0 {
                words.push(0);
            }
            if bit {
                words[width / WORD_BITS] |= 1 << (width % WORD_BITS);
            }
            width += 1;
        }
        BitString { width, words }
    }

    /// Parses a plain `0`/`1` string written most-significant first.
    pub fn from_msb_str(text: &str) -> Result<Self> {
        if text.is_empty() {
            return Err(Error::parse("bits", "empty bit string"));
        }
        let mut bits = Vec::with_capacity(text.len());
        for ch in text.chars().rev() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => {
                    return Err(Error::parse(
                        "bits",
                        format!("unexpected character {other:?}"),
                    ))
                }
            }
        }
        Ok(Self::from_lsb_bits(bits))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Bit at position `i`, counting from the least significant bit.
    pub fn bit(&self, i: usize) -> bool {
        assert!(
            i < self.width,
            "bit index {i} out of range for width {}",
            self.width
        );
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    pub fn set_bit(&mut self, i: usize, value: bool) {
        assert!(
            i < self.width,
            "bit index {i} out of range for width {}",
            self.width
        );
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    /// Bits from least to most significant.
    pub fn iter_lsb(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.width).map(move |i| self.bit(i))
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_all_ones(&self) -> bool {
        self.weight() == self.width
    }

    pub fn to_biguint(&self) -> BigUint {
        let digits: Vec<u32> = self
            .words
            .iter()
            .flat_map(|&w| [w as u32, (w >> 32) as u32])
            .collect();
        BigUint::new(digits)
    }

    /// The value as a `u64`, when the width allows it.
    pub fn to_u64(&self) -> Option<u64> {
        match self.words.as_slice() {
            [] => Some(0),
            [w] => Some(*w),
            [w, rest @ ..] if rest.iter().all(|&r| r == 0) => Some(*w),
            _ => None,
        }
    }

    /// Lowercase hexadecimal, zero-padded to `ceil(width / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.width.div_ceil(4);
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut nibble = 0u8;
            for b in 0..4 {
                let i = d * 4 + b;
                if i < self.width && self.bit(i) {
                    nibble |= 1 << b;
                }
            }
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    fn mask_top(&mut self) {
        let rem = self.width % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.width).rev() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({}: {})", self.width, self)
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        BitString::from_msb_str(&text).map_err(serde::de::Error::custom)
    }
}

/// Number of one digits.
pub fn hamming_weight(s: &BitString) -> usize {
    s.weight()
}

/// Ripple-adds `a + b + carry_in` word by word into `out`, returning the carry out of bit `width - 1`.
///
/// `out` must hold `ceil(width / 64)` words; bits above `width` are cleared.
pub fn add_words(a: &[u64], b: &[u64], carry_in: bool, width: usize, out: &mut [u64]) -> bool {
    let nwords = word_count(width);
    debug_assert!(a.len() >= nwords && b.len() >= nwords && out.len() >= nwords);
    let mut carry = carry_in as u64;
    for i in 0..nwords {
        let (s1, o1) = a[i].overflowing_add(b[i]);
        let (s2, o2) = s1.overflowing_add(carry);
        out[i] = s2;
        carry = (o1 | o2) as u64;
    }
    let rem = width % WORD_BITS;
    if rem == 0 {
        carry == 1
    } else {
        let top = out[nwords - 1];
        out[nwords - 1] = top & ((1u64 << rem) - 1);
        top >> rem & 1 == 1
    }
}

/// Result of adding within a modulus, together with the realized carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarryTrace {
    pub sum: BitString,
    /// Bit `i` is the carry entering position `i`; bit 0 is the incoming
    /// (end-around) carry.
    pub carries_in: BitString,
    /// Carry leaving position `n - 1`.
    pub carry_out: bool,
}

/// Adds `s + alpha` in the group given by `modulus`, recording every carry.
pub fn add_traced(s: &BitString, alpha: &BitString, modulus: Modulus) -> Result<CarryTrace> {
    modulus.check(s)?;
    modulus.check(alpha)?;
    let width = modulus.width();
    let mut out = vec![0u64; word_count(width)];
    let carry_in = match modulus.kind() {
        ModulusKind::Pow2 => false,
        ModulusKind::Pow2Minus1 => end_around_carry(&s.words, &alpha.words, width, &mut out),
    };
    let carry_out = add_words(&s.words, &alpha.words, carry_in, width, &mut out);
    let sum = BitString { width, words: out };
    // sum = s ^ alpha ^ carries, bitwise
    let carry_words: Vec<u64> = s
        .words
        .iter()
        .zip(&alpha.words)
        .zip(&sum.words)
        .map(|((x, y), z)| x ^ y ^ z)
        .collect();
    Ok(CarryTrace {
        sum,
        carries_in: BitString::from_words(carry_words, width),
        carry_out,
    })
}

/// The carry that must re-enter at bit 0 so that the sum is the reduced
/// residue in `{0, .., 2^n - 2}`.
///
/// With incoming carry `g` the addition is consistent when the carry out
/// equals `g`. Exactly one choice is consistent unless `s + alpha = 2^n - 1`,
/// where both are; `g = 1` then yields the reduced residue 0.
pub(crate) fn end_around_carry(
    s: &[u64],
    alpha: &[u64],
    width: usize,
    scratch: &mut [u64],
) -> bool {
    let overflow = add_words(s, alpha, false, width, scratch);
    if overflow {
        return true;
    }
    // no overflow: wrap only when the plain sum is all ones
    let rem = width % WORD_BITS;
    let nwords = word_count(width);
    scratch[..nwords].iter().enumerate().all(|(i, &w)| {
        if i + 1 == nwords && rem != 0 {
            w == (1u64 << rem) - 1
        } else {
            w == u64::MAX
        }
    })
}

/// `s + alpha` in `Z_{2^n}` or `Z_{2^n - 1}`.
pub fn add(s: &BitString, alpha: &BitString, modulus: Modulus) -> Result<BitString> {
    modulus.check(s)?;
    modulus.check(alpha)?;
    let width = modulus.width();
    let mut out = vec![0u64; word_count(width)];
    let carry_in = match modulus.kind() {
        ModulusKind::Pow2 => false,
        ModulusKind::Pow2Minus1 => end_around_carry(&s.words, &alpha.words, width, &mut out),
    };
    add_words(&s.words, &alpha.words, carry_in, width, &mut out);
    Ok(BitString { width, words: out })
}

/// One maximal run of equal digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub digit: u8,
    pub length: usize,
}

/// Maximal uniform runs of a string, most-significant run first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDecomposition {
    width: usize,
    blocks: Vec<Block>,
}

impl BlockDecomposition {
    /// Validates a run pattern; lengths must be positive, sum to `width`,
    /// and neighbouring digits must differ.
    pub fn new(blocks: Vec<Block>, width: usize) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::EmptyInput);
        }
        for b in &blocks {
            if b.digit > 1 {
                return Err(Error::OutOfRange(format!(
                    "digit {} is not binary",
                    b.digit
                )));
            }
            if b.length == 0 {
                return Err(Error::InvalidLength(0));
            }
        }
        for (i, pair) in blocks.windows(2).enumerate() {
            if pair[0].digit == pair[1].digit {
                return Err(Error::NonMaximalPattern {
                    index: i,
                    next: i + 1,
                    digit: pair[0].digit,
                });
            }
        }
        let total: usize = blocks.iter().map(|b| b.length).sum();
        if total != width {
            return Err(Error::LengthMismatch {
                expected: width,
                actual: total,
            });
        }
        Ok(BlockDecomposition { width, blocks })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Block count `m`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.length).collect()
    }

    /// Index of the least significant bit of each block, in block order.
    pub fn low_positions(&self) -> Vec<usize> {
        let mut pos = self.width;
        self.blocks
            .iter()
            .map(|b| {
                pos -= b.length;
                pos
            })
            .collect()
    }

    /// Concatenates the runs back into a bit string.
    pub fn to_bitstring(&self) -> BitString {
        let mut s = BitString::zeros(self.width);
        for (block, lo) in self.blocks.iter().zip(self.low_positions()) {
            if block.digit == 1 {
                for i in lo..lo + block.length {
                    s.set_bit(i, true);
                }
            }
        }
        s
    }
}

/// Splits `alpha` into maximal runs, most significant first.
pub fn decompose_blocks(alpha: &BitString) -> BlockDecomposition {
    let mut blocks: Vec<Block> = Vec::new();
    for i in (0..alpha.width()).rev() {
        let digit = alpha.bit(i) as u8;
        match blocks.last_mut() {
            Some(b) if b.digit == digit => b.length += 1,
            _ => blocks.push(Block { digit, length: 1 }),
        }
    }
    BlockDecomposition {
        width: alpha.width(),
        blocks,
    }
}

/// The `n`-bit string of `(a * 2^n + b) / q`.
pub fn alpha_from_rational(a: i64, b: i64, q: i64, width: usize) -> Result<BitString> {
    if q <= 1 || q % 2 == 0 {
        return Err(Error::OutOfRange(format!(
            "q = {q} must be odd and greater than 1"
        )));
    }
    if a == 0 || b == 0 || a.unsigned_abs() >= q as u64 || b.unsigned_abs() >= q as u64 {
        return Err(Error::OutOfRange(format!(
            "need 0 < |a|, |b| < q, got a = {a}, b = {b}, q = {q}"
        )));
    }
    if width == 0 {
        return Err(Error::OutOfRange("width must be positive".into()));
    }
    let numerator = (BigInt::from(a) << width) + BigInt::from(b);
    let (quotient, remainder) = numerator.div_rem(&BigInt::from(q));
    if !remainder.is_zero() {
        return Err(Error::NotDivisible(format!("{a}*2^{width} + {b}")));
    }
    let limit = (BigInt::one() << width) - 1;
    if quotient.is_negative() || quotient >= limit {
        return Err(Error::OutOfRange(format!(
            "{quotient} is outside [0, 2^{width} - 1)"
        )));
    }
    let (sign, magnitude) = quotient.into_parts();
    debug_assert!(sign != Sign::Minus);
    BitString::from_biguint(&magnitude, width)
}

/// Concatenates runs given most-significant first.
pub fn alpha_with_blocks(pattern: &[(u8, usize)], width: usize) -> Result<BitString> {
    let blocks = pattern
        .iter()
        .map(|&(digit, length)| Block { digit, length })
        .collect();
    Ok(BlockDecomposition::new(blocks, width)?.to_bitstring())
}
