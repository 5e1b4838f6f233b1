//! Carry-conditioned laws of a single block and the bookkeeping around them.
//!
//! Blocks are indexed most-significant first. The carry entering a block
//! comes from the block below it (less significant), and the carry leaving
//! it enters the block above.
//!
//! For a block of ones, an incoming carry of 1 makes the addition trivial
//! (`T = S`); for a block of zeros, an incoming carry of 0 does. The other
//! carry is "non-trivial". Because neighbouring blocks have opposite digits,
//! a carry leaving a block is non-trivial for its upper neighbour exactly
//! when it equals the block's own digit. This gives four types:
//!
//! | type | digit 1 `(in, out)` | digit 0 `(in, out)` | law |
//! |------|---------------------|---------------------|-----|
//! | T1   | (1, 1)              | (0, 0)              | diagonal binomial |
//! | T2   | (0, 0)              | (1, 1)              | point mass at `(0, L)` / `(L, 0)` |
//! | T3   | (0, 1), `L = 1`     | (1, 0), `L = 1`     | point mass at `(1, 0)` / `(0, 1)` |
//! | T4   | (0, 1), `L >= 2`    | (1, 0), `L >= 2`    | `C(L-y+x-2, x-1) / (2^L - 1)` |

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::bitstring::{Block, BlockDecomposition, CarryTrace};
use crate::error::{Error, Result};
use crate::numeric::{self, binomial, int, pow2, ratio};

/// The four carry-conditioned block laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BlockType {
    /// trivial -> non-trivial
    T1,
    /// non-trivial -> trivial
    T2,
    /// non-trivial -> non-trivial, `L = 1`
    T3,
    /// non-trivial -> non-trivial, `L >= 2`
    T4,
}

impl BlockType {
    pub fn label(self) -> &'static str {
        match self {
            BlockType::T1 => "T1",
            BlockType::T2 => "T2",
            BlockType::T3 => "T3",
            BlockType::T4 => "T4",
        }
    }

    /// Type of a block from its digit, length and realized carries.
    pub fn classify(digit: u8, length: usize, carry_in: u8, carry_out: u8) -> Result<Self> {
        check_block(digit, length)?;
        if carry_in > 1 || carry_out > 1 {
            return Err(Error::OutOfRange("carries must be 0 or 1".into()));
        }
        let trivial_in = carry_in == digit;
        let nontrivial_out = carry_out == digit;
        match (trivial_in, nontrivial_out) {
            (true, true) => Ok(BlockType::T1),
            (true, false) => Err(Error::InfeasibleCarries {
                digit,
                carry_in,
                carry_out,
            }),
            (false, false) => Ok(BlockType::T2),
            (false, true) if length == 1 => Ok(BlockType::T3),
            (false, true) => Ok(BlockType::T4),
        }
    }

    /// The `(carry_in, carry_out)` pair that produces this type for `digit`.
    pub fn carries(self, digit: u8) -> (u8, u8) {
        let nontrivial = 1 - digit;
        match self {
            BlockType::T1 => (digit, digit),
            BlockType::T2 => (nontrivial, nontrivial),
            BlockType::T3 | BlockType::T4 => (nontrivial, digit),
        }
    }
}

impl fmt::Display for BlockType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn check_block(digit: u8, length: usize) -> Result<()> {
    if digit > 1 {
        return Err(Error::OutOfRange(format!("digit {digit} is not binary")));
    }
    if length == 0 {
        return Err(Error::InvalidLength(0));
    }
    Ok(())
}

fn serialize_support<S: Serializer>(
    support: &BTreeMap<(usize, usize), BigRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Cell {
        x: usize,
        y: usize,
        p: String,
    }
    let cells: Vec<Cell> = support
        .iter()
        .map(|(&(x, y), p)| Cell {
            x,
            y,
            p: numeric::ratio_string(p),
        })
        .collect();
    cells.serialize(s)
}

/// An exact law of `(X_i, Y_i)` for one block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockDistribution {
    pub digit: u8,
    pub length: usize,
    pub carry_in: u8,
    /// `None` when only the incoming carry is conditioned on.
    pub carry_out: Option<u8>,
    pub type_tag: Option<BlockType>,
    #[serde(serialize_with = "serialize_support")]
    pub support: BTreeMap<(usize, usize), BigRational>,
}

/// Exact first and second moments of a block law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Moments {
    pub mean_x: BigRational,
    pub mean_y: BigRational,
    pub second_x: BigRational,
    pub second_y: BigRational,
    pub mixed: BigRational,
}

impl Moments {
    pub fn var_x(&self) -> BigRational {
        &self.second_x - &self.mean_x * &self.mean_x
    }

    pub fn var_y(&self) -> BigRational {
        &self.second_y - &self.mean_y * &self.mean_y
    }

    pub fn cov(&self) -> BigRational {
        &self.mixed - &self.mean_x * &self.mean_y
    }
}

impl BlockDistribution {
    pub fn prob(&self, x: usize, y: usize) -> BigRational {
        self.support
            .get(&(x, y))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn total(&self) -> BigRational {
        self.support.values().sum()
    }

    pub fn moments(&self) -> Moments {
        let zero = BigRational::zero;
        let mut m = Moments {
            mean_x: zero(),
            mean_y: zero(),
            second_x: zero(),
            second_y: zero(),
            mixed: zero(),
        };
        for (&(x, y), p) in &self.support {
            let (x, y) = (int(x as u64), int(y as u64));
            m.mean_x += p * &x;
            m.mean_y += p * &y;
            m.second_x += p * &x * &x;
            m.second_y += p * &y * &y;
            m.mixed += p * &x * &y;
        }
        m
    }

    fn swapped(mut self) -> Self {
        self.support = self
            .support
            .into_iter()
            .map(|((x, y), p)| ((y, x), p))
            .collect();
        self
    }
}

/// `C(L-y+x-2, x-1)` on `L-1 >= y >= x-1 >= 0`, each scaled by `1/denominator`.
fn ripple_law(length: usize, denominator: &BigRational) -> BTreeMap<(usize, usize), BigRational> {
    let mut support = BTreeMap::new();
    for x in 1..=length {
        for y in x - 1..length {
            let c = binomial(length + x - y - 2, x - 1);
            support.insert(
                (x, y),
                BigRational::from_integer(BigInt::from(c)) / denominator,
            );
        }
    }
    support
}

fn diagonal_law(length: usize) -> BTreeMap<(usize, usize), BigRational> {
    let scale = pow2(length);
    (0..=length)
        .map(|x| {
            (
                (x, x),
                BigRational::from_integer(BigInt::from(binomial(length, x))) / &scale,
            )
        })
        .collect()
}

/// Law of `(X_i, Y_i)` given only the incoming carry.
pub fn dist_given_carry_in(digit: u8, length: usize, carry_in: u8) -> Result<BlockDistribution> {
    check_block(digit, length)?;
    if carry_in > 1 {
        return Err(Error::OutOfRange("carry must be 0 or 1".into()));
    }
    let support = if carry_in == digit {
        diagonal_law(length)
    } else {
        // written for a block of ones; a block of zeros is the mirror image
        let mut s = ripple_law(length, &pow2(length));
        s.insert((0, length), BigRational::one() / pow2(length));
        s
    };
    let d = BlockDistribution {
        digit,
        length,
        carry_in,
        carry_out: None,
        type_tag: None,
        support,
    };
    Ok(if digit == 0 && carry_in == 1 {
        d.swapped()
    } else {
        d
    })
}

/// Law of `(X_i, Y_i)` given both carries.
pub fn dist_given_both_carries(
    digit: u8,
    length: usize,
    carry_in: u8,
    carry_out: u8,
) -> Result<BlockDistribution> {
    let tag = BlockType::classify(digit, length, carry_in, carry_out)?;
    let support = match tag {
        BlockType::T1 => diagonal_law(length),
        BlockType::T2 => [((0, length), BigRational::one())].into(),
        BlockType::T3 | BlockType::T4 => ripple_law(length, &(pow2(length) - int(1))),
    };
    let d = BlockDistribution {
        digit,
        length,
        carry_in,
        carry_out: Some(carry_out),
        type_tag: Some(tag),
        support,
    };
    Ok(if digit == 0 && tag != BlockType::T1 {
        d.swapped()
    } else {
        d
    })
}

/// Law of the number of trailing zeros of a uniform `L`-bit block of weight `x`.
pub fn trailing_zero_dist(length: usize, weight: usize) -> Result<BTreeMap<usize, BigRational>> {
    if weight > length {
        return Err(Error::OutOfRange(format!(
            "weight {weight} exceeds length {length}"
        )));
    }
    if weight == 0 {
        return Ok([(length, BigRational::one())].into());
    }
    let total = BigInt::from(binomial(length, weight));
    Ok((0..=length - weight)
        .map(|z| {
            let c = BigInt::from(binomial(length - z - 1, weight - 1));
            (z, BigRational::new(c, total.clone()))
        })
        .collect())
}

/// Closed-form covariance and mean of a block law.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CovarianceSummary {
    pub digit: u8,
    pub length: usize,
    pub type_tag: BlockType,
    #[serde(with = "numeric::ratio_str")]
    pub var_x: BigRational,
    #[serde(with = "numeric::ratio_str")]
    pub var_y: BigRational,
    #[serde(with = "numeric::ratio_str")]
    pub cov: BigRational,
    #[serde(with = "numeric::ratio_str")]
    pub mean_x: BigRational,
    #[serde(with = "numeric::ratio_str")]
    pub mean_y: BigRational,
    /// `mean = (L/2, L/2) + translation_k * (1, -1)`
    #[serde(with = "numeric::ratio_str")]
    pub translation_k: BigRational,
}

/// `c` and `d` of the type 4 covariance matrix `[[c, d], [d, c]]`.
pub fn type4_covariance(length: usize) -> Result<(BigRational, BigRational)> {
    if length < 2 {
        return Err(Error::InfeasibleType { tag: "T4", length });
    }
    let l = int(length as u64);
    let q = BigRational::one() / (pow2(length) - int(1));
    let one_q = BigRational::one() + &q;
    let linear = &l / int(4) * &one_q;
    let quadratic = &l * &l / int(4) * &one_q * &q;
    let c = &linear - &quadratic;
    let d = linear + quadratic - int(1);
    Ok((c, d))
}

/// Closed forms of `E[X]`, `E[X^2]` and `E[XY]` under the type 4 law of a block of ones.
pub fn type4_moment_closed_forms(length: usize) -> Result<(BigRational, BigRational, BigRational)> {
    if length < 2 {
        return Err(Error::InfeasibleType { tag: "T4", length });
    }
    let l = int(length as u64);
    let q = BigRational::one() / (pow2(length) - int(1));
    let one_q = BigRational::one() + &q;
    let mean = &l / int(2) * &one_q;
    let second = &l * (&l + int(1)) / int(4) * pow2(length) / (pow2(length) - int(1));
    let mixed = (&l * &l + &l) / int(4) * &one_q - int(1);
    Ok((mean, second, mixed))
}

/// Covariance matrix entries, mean and translation offset of a block law.
pub fn covariance(digit: u8, length: usize, type_tag: BlockType) -> Result<CovarianceSummary> {
    check_block(digit, length)?;
    let l = int(length as u64);
    let half = &l / int(2);
    let sign = if digit == 1 { int(1) } else { int(-1) };
    let (var, cov, k) = match type_tag {
        BlockType::T1 => {
            let v = &l / int(4);
            (v.clone(), v, BigRational::zero())
        }
        // (0, L) for ones, (L, 0) for zeros
        BlockType::T2 => (BigRational::zero(), BigRational::zero(), -&sign * &half),
        BlockType::T3 => {
            if length != 1 {
                return Err(Error::InfeasibleType { tag: "T3", length });
            }
            (
                BigRational::zero(),
                BigRational::zero(),
                &sign * ratio(1, 2),
            )
        }
        BlockType::T4 => {
            let (c, d) = type4_covariance(length)?;
            let q = BigRational::one() / (pow2(length) - int(1));
            (c, d, &sign * &half * q)
        }
    };
    Ok(CovarianceSummary {
        digit,
        length,
        type_tag,
        var_x: var.clone(),
        var_y: var,
        cov,
        mean_x: &half + &k,
        mean_y: &half - &k,
        translation_k: k,
    })
}

/// Realized `(carry_in, carry_out)` for each block, most significant block first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CarryFixing {
    carries: Vec<(u8, u8)>,
}

impl CarryFixing {
    /// Checks that each block's incoming carry is the outgoing carry of the block below.
    pub fn new(decomposition: &BlockDecomposition, carries: Vec<(u8, u8)>) -> Result<Self> {
        if carries.len() != decomposition.len() {
            return Err(Error::LengthMismatch {
                expected: decomposition.len(),
                actual: carries.len(),
            });
        }
        if carries.iter().any(|&(i, o)| i > 1 || o > 1) {
            return Err(Error::OutOfRange("carries must be 0 or 1".into()));
        }
        for (i, pair) in carries.windows(2).enumerate() {
            if pair[0].0 != pair[1].1 {
                return Err(Error::OutOfRange(format!(
                    "carry into block {i} differs from carry out of block {}",
                    i + 1
                )));
            }
        }
        Ok(CarryFixing { carries })
    }

    /// Reads the carries realized by one addition.
    pub fn realized(decomposition: &BlockDecomposition, trace: &CarryTrace) -> Self {
        let n = decomposition.width();
        let carries = decomposition
            .blocks()
            .iter()
            .zip(decomposition.low_positions())
            .map(|(b, lo)| carries_at(trace, lo, b.length, n))
            .collect();
        CarryFixing { carries }
    }

    pub fn carries(&self) -> &[(u8, u8)] {
        &self.carries
    }
}

/// `(carry_in, carry_out)` of the bit range `[lo, lo + len)` in a traced addition.
pub fn carries_at(trace: &CarryTrace, lo: usize, len: usize, width: usize) -> (u8, u8) {
    let carry_in = trace.carries_in.bit(lo) as u8;
    let carry_out = if lo + len < width {
        trace.carries_in.bit(lo + len)
    } else {
        trace.carry_out
    } as u8;
    (carry_in, carry_out)
}

/// Number of blocks of each type.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TypeCounts {
    pub t1: usize,
    pub t2: usize,
    pub t3: usize,
    pub t4: usize,
}

impl TypeCounts {
    pub fn add(&mut self, t: BlockType) {
        match t {
            BlockType::T1 => self.t1 += 1,
            BlockType::T2 => self.t2 += 1,
            BlockType::T3 => self.t3 += 1,
            BlockType::T4 => self.t4 += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.t1 + self.t2 + self.t3 + self.t4
    }
}

impl FromIterator<BlockType> for TypeCounts {
    fn from_iter<I: IntoIterator<Item = BlockType>>(iter: I) -> Self {
        let mut c = TypeCounts::default();
        iter.into_iter().for_each(|t| c.add(t));
        c
    }
}

/// Types of every block under a carry fixing.
pub fn classify_blocks(
    decomposition: &BlockDecomposition,
    fixing: &CarryFixing,
) -> Result<(Vec<BlockType>, TypeCounts)> {
    if fixing.carries.len() != decomposition.len() {
        return Err(Error::LengthMismatch {
            expected: decomposition.len(),
            actual: fixing.carries.len(),
        });
    }
    let types = decomposition
        .blocks()
        .iter()
        .zip(&fixing.carries)
        .map(|(b, &(i, o))| BlockType::classify(b.digit, b.length, i, o))
        .collect::<Result<Vec<_>>>()?;
    let counts = types.iter().copied().collect();
    Ok((types, counts))
}

/// A length of maximal multiplicity and its multiplicity; ties go to the shorter length.
pub fn most_frequent_length(lengths: &[usize], budget: usize) -> Result<(usize, usize)> {
    if lengths.is_empty() {
        return Err(Error::EmptyInput);
    }
    if lengths.contains(&0) {
        return Err(Error::InvalidLength(0));
    }
    let sum: usize = lengths.iter().sum();
    if sum > budget {
        return Err(Error::OutOfRange(format!(
            "lengths sum to {sum}, more than the budget {budget}"
        )));
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &l in lengths {
        *counts.entry(l).or_default() += 1;
    }
    let mut best = (0, 0);
    for (l, c) in counts {
        if c > best.1 {
            best = (l, c);
        }
    }
    Ok(best)
}

/// Digit pattern of a fused pair of unit blocks, most significant digit first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PairPattern {
    #[serde(rename = "01")]
    ZeroOne,
    #[serde(rename = "10")]
    OneZero,
}

impl PairPattern {
    pub fn as_str(self) -> &'static str {
        match self {
            PairPattern::ZeroOne => "01",
            PairPattern::OneZero => "10",
        }
    }

    /// Digits most significant first.
    pub fn digits(self) -> [u8; 2] {
        match self {
            PairPattern::ZeroOne => [0, 1],
            PairPattern::OneZero => [1, 0],
        }
    }

    /// Whether the pair behaves as a type 4 block of length 2 under these carries.
    ///
    /// `01` plus an incoming 0 adds 1 to the pair, the same as a `00` block
    /// with incoming carry 1; it is type 4 when no carry leaves. `10` plus an
    /// incoming 1 adds 3, the same as `11` with incoming carry 0; it is type 4
    /// when a carry leaves.
    pub fn is_type4(self, carry_in: u8, carry_out: u8) -> bool {
        match self {
            PairPattern::ZeroOne => carry_in == 0 && carry_out == 0,
            PairPattern::OneZero => carry_in == 1 && carry_out == 1,
        }
    }

    /// Digit of the length-2 block whose type 4 law the pair reproduces.
    pub fn equivalent_digit(self) -> u8 {
        match self {
            PairPattern::ZeroOne => 0,
            PairPattern::OneZero => 1,
        }
    }
}

impl fmt::Display for PairPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A piece of a consolidated decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Segment {
    Run(Block),
    Pair(PairPattern),
}

impl Segment {
    pub fn width(&self) -> usize {
        match self {
            Segment::Run(b) => b.length,
            Segment::Pair(_) => 2,
        }
    }
}

/// Plain runs as segments.
pub fn segments_of(decomposition: &BlockDecomposition) -> Vec<Segment> {
    decomposition
        .blocks()
        .iter()
        .copied()
        .map(Segment::Run)
        .collect()
}

/// Least significant bit position of each segment.
pub fn segment_low_positions(segments: &[Segment]) -> Vec<usize> {
    let mut pos: usize = segments.iter().map(Segment::width).sum();
    segments
        .iter()
        .map(|s| {
            pos -= s.width();
            pos
        })
        .collect()
}

/// Outcome of fusing unit-length block pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Consolidation {
    pub pattern: PairPattern,
    /// Matching pairs over all disjoint pairs.
    #[serde(with = "numeric::ratio_str")]
    pub fraction: BigRational,
    pub matched: usize,
    pub pairs: usize,
    pub segments: Vec<Segment>,
}

/// Pairs blocks `(1, 2), (3, 4), ...` and fuses the majority all-unit pattern.
pub fn consolidate_unit_pairs(decomposition: &BlockDecomposition) -> Consolidation {
    let blocks = decomposition.blocks();
    let pairs = blocks.len() / 2;
    let pattern_of = |i: usize| -> Option<PairPattern> {
        let (a, b) = (blocks[2 * i], blocks[2 * i + 1]);
        let pattern = if a.digit == 0 {
            PairPattern::ZeroOne
        } else {
            PairPattern::OneZero
        };
        (a.length == 1 && b.length == 1).then_some(pattern)
    };
    let zero_one = (0..pairs)
        .filter(|&i| pattern_of(i) == Some(PairPattern::ZeroOne))
        .count();
    let one_zero = (0..pairs)
        .filter(|&i| pattern_of(i) == Some(PairPattern::OneZero))
        .count();
    let (pattern, matched) = if zero_one >= one_zero {
        (PairPattern::ZeroOne, zero_one)
    } else {
        (PairPattern::OneZero, one_zero)
    };
    let mut segments = Vec::with_capacity(blocks.len());
    for i in 0..pairs {
        if pattern_of(i) == Some(pattern) {
            segments.push(Segment::Pair(pattern));
        } else {
            segments.push(Segment::Run(blocks[2 * i]));
            segments.push(Segment::Run(blocks[2 * i + 1]));
        }
    }
    if blocks.len() % 2 == 1 {
        segments.push(Segment::Run(blocks[blocks.len() - 1]));
    }
    let fraction = if pairs == 0 {
        BigRational::zero()
    } else {
        ratio(matched as u64, pairs as u64)
    };
    Consolidation {
        pattern,
        fraction,
        matched,
        pairs,
        segments,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitstring::{add_traced, decompose_blocks, BitString, Modulus};

    type Cell = ((usize, usize), (i64, i64));

    fn law(cells: &[Cell]) -> BTreeMap<(usize, usize), BigRational> {
        cells.iter().map(|&(k, (n, d))| (k, ratio(n, d))).collect()
    }

    #[test]
    fn carry_in_law_examples() {
        let d = dist_given_carry_in(1, 1, 1).unwrap();
        assert_eq!(d.support, law(&[((0, 0), (1, 2)), ((1, 1), (1, 2))]));
        let d = dist_given_carry_in(1, 2, 0).unwrap();
        assert_eq!(
            d.support,
            law(&[
                ((0, 2), (1, 4)),
                ((1, 0), (1, 4)),
                ((1, 1), (1, 4)),
                ((2, 1), (1, 4))
            ])
        );
        let d = dist_given_carry_in(0, 3, 0).unwrap();
        assert_eq!(
            d.support,
            law(&[
                ((0, 0), (1, 8)),
                ((1, 1), (3, 8)),
                ((2, 2), (3, 8)),
                ((3, 3), (1, 8))
            ])
        );
        assert_eq!(dist_given_carry_in(1, 0, 0), Err(Error::InvalidLength(0)));
    }

    #[test]
    fn both_carries_law_examples() {
        let d = dist_given_both_carries(1, 2, 0, 1).unwrap();
        assert_eq!(d.type_tag, Some(BlockType::T4));
        assert_eq!(
            d.support,
            law(&[((1, 0), (1, 3)), ((1, 1), (1, 3)), ((2, 1), (1, 3))])
        );
        let d = dist_given_both_carries(1, 5, 0, 0).unwrap();
        assert_eq!(d.support, law(&[((0, 5), (1, 1))]));
        let d = dist_given_both_carries(1, 1, 0, 1).unwrap();
        assert_eq!(d.type_tag, Some(BlockType::T3));
        assert_eq!(d.support, law(&[((1, 0), (1, 1))]));
        assert!(matches!(
            dist_given_both_carries(1, 3, 1, 0),
            Err(Error::InfeasibleCarries { .. })
        ));
        assert!(matches!(
            dist_given_both_carries(0, 3, 0, 1),
            Err(Error::InfeasibleCarries { .. })
        ));
    }

    #[test]
    fn laws_sum_to_one() {
        for digit in 0..2 {
            for length in 1..=10 {
                for c in 0..2 {
                    assert_eq!(
                        dist_given_carry_in(digit, length, c).unwrap().total(),
                        int(1)
                    );
                }
                for t in [BlockType::T1, BlockType::T2, BlockType::T4] {
                    if t == BlockType::T4 && length == 1 {
                        continue;
                    }
                    let (i, o) = t.carries(digit);
                    let d = dist_given_both_carries(digit, length, i, o).unwrap();
                    assert_eq!(d.total(), int(1));
                    assert_eq!(d.type_tag, Some(t));
                }
            }
        }
    }

    #[test]
    fn trailing_zero_examples() {
        assert_eq!(
            trailing_zero_dist(2, 1).unwrap(),
            [(0, ratio(1, 2)), (1, ratio(1, 2))].into()
        );
        assert_eq!(trailing_zero_dist(7, 0).unwrap(), [(7, ratio(1, 1))].into());
        assert_eq!(trailing_zero_dist(3, 3).unwrap(), [(0, ratio(1, 1))].into());
        assert!(trailing_zero_dist(3, 4).is_err());
        for l in 1..=12 {
            for x in 0..=l {
                let total: BigRational = trailing_zero_dist(l, x).unwrap().values().sum();
                assert_eq!(total, int(1));
            }
        }
    }

    #[test]
    fn covariance_examples() {
        let s = covariance(1, 2, BlockType::T1).unwrap();
        assert_eq!(
            (s.var_x.clone(), s.var_y.clone(), s.cov.clone()),
            (ratio(1, 2), ratio(1, 2), ratio(1, 2))
        );
        assert_eq!(s.translation_k, int(0));

        let s = covariance(1, 2, BlockType::T4).unwrap();
        assert_eq!(s.var_x, ratio(2, 9));
        assert_eq!(s.cov, ratio(1, 9));
        assert_eq!(
            (s.mean_x.clone(), s.mean_y.clone()),
            (ratio(4, 3), ratio(2, 3))
        );
        assert_eq!(s.translation_k, ratio(1, 3));

        let s = covariance(1, 1, BlockType::T3).unwrap();
        assert!(s.var_x.is_zero() && s.cov.is_zero());
        assert_eq!(
            (s.mean_x, s.mean_y, s.translation_k),
            (int(1), int(0), ratio(1, 2))
        );

        assert!(matches!(
            covariance(1, 1, BlockType::T4),
            Err(Error::InfeasibleType { .. })
        ));
        assert!(matches!(
            covariance(1, 3, BlockType::T3),
            Err(Error::InfeasibleType { .. })
        ));
    }

    #[test]
    fn covariance_matches_law_moments() {
        for digit in 0..2 {
            for length in 1..=12 {
                for t in [BlockType::T1, BlockType::T2, BlockType::T3, BlockType::T4] {
                    let Ok(s) = covariance(digit, length, t) else {
                        continue;
                    };
                    let (i, o) = t.carries(digit);
                    let m = dist_given_both_carries(digit, length, i, o)
                        .unwrap()
                        .moments();
                    assert_eq!(s.var_x, m.var_x(), "{t} L={length} d={digit}");
                    assert_eq!(s.var_y, m.var_y());
                    assert_eq!(s.cov, m.cov());
                    assert_eq!(s.mean_x, m.mean_x);
                    assert_eq!(s.mean_y, m.mean_y);
                }
            }
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(BlockType::classify(1, 4, 1, 1), Ok(BlockType::T1));
        assert_eq!(BlockType::classify(1, 4, 0, 0), Ok(BlockType::T2));
        assert_eq!(BlockType::classify(1, 3, 0, 1), Ok(BlockType::T4));
        assert_eq!(BlockType::classify(0, 1, 1, 0), Ok(BlockType::T3));
    }

    #[test]
    fn realized_fixing_is_consistent() {
        let alpha = BitString::from_msb_str("1100101110").unwrap();
        let decomposition = decompose_blocks(&alpha);
        let p = Modulus::pow2(10).unwrap();
        for v in 0..1024 {
            let s = BitString::from_u64(v, 10).unwrap();
            let trace = add_traced(&s, &alpha, p).unwrap();
            let fixing = CarryFixing::realized(&decomposition, &trace);
            let again = CarryFixing::new(&decomposition, fixing.carries().to_vec()).unwrap();
            let (types, counts) = classify_blocks(&decomposition, &again).unwrap();
            assert_eq!(types.len(), decomposition.len());
            assert_eq!(counts.total(), decomposition.len());
        }
        assert!(CarryFixing::new(&decomposition, vec![(0, 0); 3]).is_err());
    }

    #[test]
    fn most_frequent_examples() {
        assert_eq!(most_frequent_length(&[2, 2, 3, 2, 5], 14), Ok((2, 3)));
        assert_eq!(most_frequent_length(&[1, 1, 1], 3), Ok((1, 3)));
        assert_eq!(most_frequent_length(&[3, 2, 3, 2], 10), Ok((2, 2)));
        assert_eq!(most_frequent_length(&[], 3), Err(Error::EmptyInput));
        assert!(most_frequent_length(&[4, 4], 7).is_err());
        let m = 32;
        assert_eq!(most_frequent_length(&vec![2; m], 2 * m), Ok((2, m)));
    }

    #[test]
    fn consolidation_examples() {
        let alt = decompose_blocks(&BitString::from_msb_str(&"01".repeat(8)).unwrap());
        let c = consolidate_unit_pairs(&alt);
        assert_eq!(c.pattern, PairPattern::ZeroOne);
        assert_eq!(c.fraction, int(1));
        assert_eq!(c.segments.len(), 8);

        let alt = decompose_blocks(&BitString::from_msb_str(&"10".repeat(8)).unwrap());
        let c = consolidate_unit_pairs(&alt);
        assert_eq!(c.pattern, PairPattern::OneZero);
        assert_eq!(c.fraction, int(1));

        // one length-2 run inside a long alternating string
        let text = format!("{}1{}", "01".repeat(100), "01".repeat(100));
        let d = decompose_blocks(&BitString::from_msb_str(&text).unwrap());
        let c = consolidate_unit_pairs(&d);
        assert!(c.fraction >= ratio(49, 100));
        let width: usize = c.segments.iter().map(Segment::width).sum();
        assert_eq!(width, text.len());
    }

    #[test]
    fn fused_pair_reproduces_type4_law() {
        // enumerate the 2-bit block under both patterns and all carries
        for pattern in [PairPattern::ZeroOne, PairPattern::OneZero] {
            let [hi, lo] = pattern.digits();
            let value = (hi << 1 | lo) as u32;
            for carry_in in 0..2u32 {
                let mut tally: BTreeMap<(usize, usize), u32> = BTreeMap::new();
                let mut kept = 0;
                for s in 0..4u32 {
                    let sum = s + value + carry_in;
                    let carry_out = (sum >> 2) as u8;
                    if !pattern.is_type4(carry_in as u8, carry_out) {
                        continue;
                    }
                    kept += 1;
                    *tally
                        .entry((s.count_ones() as usize, (sum & 3).count_ones() as usize))
                        .or_default() += 1;
                }
                if kept == 0 {
                    continue;
                }
                let empirical: BTreeMap<_, _> = tally
                    .into_iter()
                    .map(|(k, v)| (k, ratio(v, kept)))
                    .collect();
                let digit = pattern.equivalent_digit();
                let (i, o) = BlockType::T4.carries(digit);
                let expect = dist_given_both_carries(digit, 2, i, o).unwrap();
                assert_eq!(empirical, expect.support, "{pattern} carry_in={carry_in}");
            }
        }
    }
}
