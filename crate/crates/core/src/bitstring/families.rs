//! Constructors for the alpha families used by scans and tests.

use super::{alpha_with_blocks, BitString};
use crate::error::{Error, Result};

/// `k` one bits spread evenly from bit 0 upward; `sparse(1, n)` is the integer 1.
pub fn sparse(k: usize, width: usize) -> Result<BitString> {
    if k > width {
        return Err(Error::OutOfRange(format!(
            "{k} ones do not fit in {width} bits"
        )));
    }
    let mut s = BitString::zeros(width);
    for i in 0..k {
        s.set_bit(i * width / k, true);
    }
    Ok(s)
}

/// `m` maximal blocks of near-equal length, starting with a run of ones at
/// the most significant end. Longer blocks come first.
pub fn with_block_count(m: usize, width: usize) -> Result<BitString> {
    if m == 0 || m > width {
        return Err(Error::OutOfRange(format!(
            "{m} blocks do not fit in {width} bits"
        )));
    }
    let base = width / m;
    let extra = width % m;
    let pattern: Vec<(u8, usize)> = (0..m)
        .map(|i| (((i + 1) % 2) as u8, base + usize::from(i < extra)))
        .collect();
    alpha_with_blocks(&pattern, width)
}

/// Alternating digits; `start` is the most significant digit.
pub fn alternating(width: usize, start: u8) -> BitString {
    let text: String = (0..width)
        .map(|i| if (i as u8 + start) % 2 == 1 { '1' } else { '0' })
        .collect();
    BitString::from_msb_str(&text).expect("alternating pattern is well formed")
}

/// `period` (most significant digit first) repeated and cut to `width` digits.
pub fn periodic(period: &str, width: usize) -> Result<BitString> {
    if period.is_empty() || width == 0 {
        return Err(Error::parse("period", "empty period or width"));
    }
    let text: String = period.chars().cycle().take(width).collect();
    BitString::from_msb_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitstring::decompose_blocks;

    #[test]
    fn sparse_single_bit_is_one() {
        assert_eq!(sparse(1, 8).unwrap().to_u64(), Some(1));
        assert_eq!(sparse(4, 16).unwrap().weight(), 4);
        assert!(sparse(9, 8).is_err());
    }

    #[test]
    fn block_count_is_exact() {
        for width in 1..=40 {
            for m in 1..=width {
                let s = with_block_count(m, width).unwrap();
                assert_eq!(decompose_blocks(&s).len(), m);
            }
        }
    }

    #[test]
    fn periodic_and_alternating_agree() {
        assert_eq!(periodic("01", 16).unwrap(), alternating(16, 0));
        assert_eq!(periodic("10", 7).unwrap().to_string(), "1010101");
        assert_eq!(periodic("1100", 16).unwrap().to_string(), "1100".repeat(4));
    }
}
