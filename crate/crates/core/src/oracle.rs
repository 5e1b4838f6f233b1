//! Brute-force references.
//!
//! Nothing here calls into [`crate::bitstring::add`] or the DP: sums are
//! formed with plain machine integers and explicit bit-by-bit ripple so that
//! agreement with the fast paths is a real cross-check.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::bitstring::{BitString, Modulus, ModulusKind};
use crate::error::{Error, Result};
use crate::exact_dp::JointWeightDistribution;

pub const MAX_BRUTE_FORCE_WIDTH: usize = 24;
pub const MAX_BLOCK_LENGTH: usize = 20;

const SHARD_BITS: u32 = 12;

fn reduce(s: u64, alpha: u64, kind: ModulusKind, width: usize) -> u64 {
    match kind {
        ModulusKind::Pow2 => (s + alpha) & ((1u64 << width) - 1),
        ModulusKind::Pow2Minus1 => (s + alpha) % ((1u64 << width) - 1),
    }
}

fn alpha_value(alpha: &BitString, modulus: Modulus) -> Result<u64> {
    if modulus.width() > MAX_BRUTE_FORCE_WIDTH {
        return Err(Error::TooWide {
            width: modulus.width(),
            max: MAX_BRUTE_FORCE_WIDTH,
        });
    }
    modulus.check(alpha)?;
    Ok(alpha.to_u64().expect("width <= 24 fits a u64"))
}

fn residue_count(modulus: Modulus) -> u64 {
    let full = 1u64 << modulus.width();
    match modulus.kind() {
        ModulusKind::Pow2 => full,
        ModulusKind::Pow2Minus1 => full - 1,
    }
}

/// Enumerates every residue `S` and tallies `(wt(S), wt(S + alpha))`.
pub fn brute_force_joint(alpha: &BitString, modulus: Modulus) -> Result<JointWeightDistribution> {
    let a = alpha_value(alpha, modulus)?;
    let n = modulus.width();
    let side = n + 1;
    let count = residue_count(modulus);
    let shard = 1u64 << SHARD_BITS;
    let shards = count.div_ceil(shard);
    let table = (0..shards)
        .into_par_iter()
        .map(|j| {
            let mut t = vec![0u64; side * side];
            for s in j * shard..((j + 1) * shard).min(count) {
                let x = s.count_ones() as usize;
                let y = reduce(s, a, modulus.kind(), n).count_ones() as usize;
                t[x * side + y] += 1;
            }
            t
        })
        .reduce(
            || vec![0u64; side * side],
            |mut acc, t| {
                acc.iter_mut().zip(t).for_each(|(a, b)| *a += b);
                acc
            },
        );
    Ok(JointWeightDistribution::from_dense(
        modulus,
        table.into_iter().map(BigUint::from).collect(),
    ))
}

/// Tallies of `(x, y, carry_out)` over all `2^L` block values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockTally {
    pub digit: u8,
    pub length: usize,
    pub carry_in: u8,
    pub counts: BTreeMap<(usize, usize, u8), u64>,
}

impl BlockTally {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Tallies restricted to one outgoing carry, keyed by `(x, y)`.
    pub fn with_carry_out(&self, carry_out: u8) -> BTreeMap<(usize, usize), u64> {
        self.counts
            .iter()
            .filter(|((_, _, c), _)| *c == carry_out)
            .map(|(&(x, y, _), &v)| ((x, y), v))
            .collect()
    }
}

/// Ripple-adds every `L`-bit block value to `digit^L` with the given incoming carry.
pub fn brute_force_block(digit: u8, length: usize, carry_in: u8) -> Result<BlockTally> {
    if length > MAX_BLOCK_LENGTH {
        return Err(Error::TooWide {
            width: length,
            max: MAX_BLOCK_LENGTH,
        });
    }
    if length == 0 {
        return Err(Error::InvalidLength(0));
    }
    if digit > 1 || carry_in > 1 {
        return Err(Error::OutOfRange("digit and carry must be 0 or 1".into()));
    }
    let mut counts = BTreeMap::new();
    for v in 0u32..1 << length {
        let mut carry = carry_in;
        let mut y = 0;
        for j in 0..length {
            let s_bit = (v >> j & 1) as u8;
            let sum = s_bit + digit + carry;
            y += (sum & 1) as usize;
            carry = sum >> 1;
        }
        *counts
            .entry((v.count_ones() as usize, y, carry))
            .or_insert(0) += 1;
    }
    Ok(BlockTally {
        digit,
        length,
        carry_in,
        counts,
    })
}

/// Strings whose light-to-heavy status differs between the two moduli.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModulusDiscrepancy {
    pub pow2_light_to_heavy: u64,
    pub pow2m1_light_to_heavy: u64,
    /// Light-to-heavy under `2^n - 1` but not under `2^n`.
    pub gained: u64,
    /// Light-to-heavy under `2^n` but not under `2^n - 1`.
    pub lost: u64,
}

/// Compares light-to-heavy membership under both moduli string by string.
///
/// `alpha` must be a valid residue of `Z_{2^n - 1}`.
pub fn modulus_discrepancy(alpha: &BitString) -> Result<ModulusDiscrepancy> {
    let n = alpha.width();
    let m1 = Modulus::pow2_minus1(n)?;
    let a = alpha_value(alpha, m1)?;
    let light = |v: u64| 2 * v.count_ones() as usize <= n;
    let mut out = ModulusDiscrepancy {
        pow2_light_to_heavy: 0,
        pow2m1_light_to_heavy: 0,
        gained: 0,
        lost: 0,
    };
    for s in 0..1u64 << n {
        if !light(s) {
            continue;
        }
        let p = !light(reduce(s, a, ModulusKind::Pow2, n));
        // the all-ones string is heavy, so every light s is a residue
        let q = !light(reduce(s, a, ModulusKind::Pow2Minus1, n));
        out.pow2_light_to_heavy += p as u64;
        out.pow2m1_light_to_heavy += q as u64;
        out.gained += (q && !p) as u64;
        out.lost += (p && !q) as u64;
    }
    Ok(out)
}
