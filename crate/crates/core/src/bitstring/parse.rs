//! Textual alpha formats.
//!
//! * `0b0101`: binary, most significant digit first
//! * `0x5`: hexadecimal, zero-padded to the width
//! * `5`: decimal (width required)
//! * `rat:a,b,q`: the integer `(a * 2^n + b) / q` (width required)
//! * `pat:(01)^8`: a run pattern; a group is a digit or a parenthesised
//!   digit string, optionally followed by `^count`; whitespace separates groups

use num_bigint::BigUint;
use num_traits::Num;

use super::{alpha_from_rational, BitString};
use crate::error::{Error, Result};

/// Parses an alpha in any accepted format. When `width` is `None` it is
/// inferred from binary, hexadecimal and pattern literals.
pub fn parse_alpha(text: &str, width: Option<usize>) -> Result<BitString> {
    let text = text.trim();
    if let Some(body) = text.strip_prefix("0b") {
        let digits: String = body.chars().filter(|&c| c != '_').collect();
        let value = BigUint::from_str_radix(&digits, 2)
            .map_err(|e| Error::parse("alpha", format!("bad binary literal: {e}")))?;
        let width = width.unwrap_or(digits.len());
        fit(&value, width)
    } else if let Some(body) = text.strip_prefix("0x") {
        let digits: String = body.chars().filter(|&c| c != '_').collect();
        let value = BigUint::from_str_radix(&digits, 16)
            .map_err(|e| Error::parse("alpha", format!("bad hex literal: {e}")))?;
        let width = width.unwrap_or(4 * digits.len());
        fit(&value, width)
    } else if let Some(body) = text.strip_prefix("rat:") {
        let width = require_width(width, "rat")?;
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        let [a, b, q] = parts.as_slice() else {
            return Err(Error::parse("alpha", "rat form needs three values a,b,q"));
        };
        let num = |field: &str, s: &str| {
            s.parse::<i64>()
                .map_err(|e| Error::parse(field, format!("{s:?}: {e}")))
        };
        alpha_from_rational(num("a", a)?, num("b", b)?, num("q", q)?, width)
    } else if let Some(body) = text.strip_prefix("pat:") {
        let bits = expand_pattern(body)?;
        if let Some(n) = width {
            if n != bits.len() {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: bits.len(),
                });
            }
        }
        BitString::from_msb_str(&bits)
    } else {
        let width = require_width(width, "decimal")?;
        let value = BigUint::from_str_radix(text, 10)
            .map_err(|e| Error::parse("alpha", format!("{text:?}: {e}")))?;
        fit(&value, width)
    }
}

fn require_width(width: Option<usize>, form: &str) -> Result<usize> {
    match width {
        Some(0) => Err(Error::parse("n", "width must be positive")),
        Some(n) => Ok(n),
        None => Err(Error::parse(
            "n",
            format!("the {form} form requires an explicit width"),
        )),
    }
}

fn fit(value: &BigUint, width: usize) -> Result<BitString> {
    if width == 0 {
        return Err(Error::parse("n", "width must be positive"));
    }
    BitString::from_biguint(value, width).map_err(|e| Error::parse("alpha", e.to_string()))
}

fn expand_pattern(body: &str) -> Result<String> {
    let chars: Vec<char> = body.chars().collect();
    let mut out = String::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let group: String = match chars[i] {
            '0' | '1' => {
                i += 1;
                chars[i - 1].to_string()
            }
            '(' => {
                let close = chars[i..]
                    .iter()
                    .position(|&c| c == ')')
                    .ok_or_else(|| Error::parse("alpha", "unclosed '(' in pattern"))?;
                let inner: String = chars[i + 1..i + close].iter().collect();
                if inner.is_empty() || !inner.chars().all(|c| c == '0' || c == '1') {
                    return Err(Error::parse(
                        "alpha",
                        format!("bad pattern group ({inner})"),
                    ));
                }
                i += close + 1;
                inner
            }
            other => {
                return Err(Error::parse(
                    "alpha",
                    format!("unexpected {other:?} in pattern"),
                ))
            }
        };
        let mut repeat = 1;
        if chars.get(i) == Some(&'^') {
            let start = i + 1;
            let mut end = start;
            while end < chars.len() && chars[end].is_ascii_digit() {
                end += 1;
            }
            let digits: String = chars[start..end].iter().collect();
            repeat = digits
                .parse::<usize>()
                .map_err(|_| Error::parse("alpha", "'^' must be followed by a count"))?;
            i = end;
        }
        out.push_str(&group.repeat(repeat));
    }
    if out.is_empty() {
        return Err(Error::parse("alpha", "empty pattern"));
    }
    Ok(out)
}
