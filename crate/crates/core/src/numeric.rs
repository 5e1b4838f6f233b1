//! Exact arithmetic helpers and string serialization for big numbers.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

pub use num_bigint::BigUint;
pub use num_rational::BigRational;

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Row `n` of Pascal's triangle.
pub fn binomial_row(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(BigUint::one());
        for pair in row.windows(2) {
            next.push(&pair[0] + &pair[1]);
        }
        next.push(BigUint::one());
        row = next;
    }
    row
}

pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn ratio_big(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

pub fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

/// `2^k` as a rational.
pub fn pow2(k: usize) -> BigRational {
    BigRational::from_integer(BigInt::one() << k)
}

/// Lossy conversion; exact for every value that fits a double's range.
pub fn to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // very large numerators and denominators: scale both down first
    let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Natural log of a ratio of big integers without overflowing a double.
pub fn ln_ratio(num: &BigUint, den: &BigUint) -> f64 {
    fn ln_big(v: &BigUint) -> f64 {
        let bits = v.bits();
        if bits <= 1000 {
            return v.to_f64().unwrap().ln();
        }
        let shift = bits - 64;
        (v >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
    ln_big(num) - ln_big(den)
}

/// `num/den` rendering used by every serialized rational.
pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_ratio(text: &str) -> Option<BigRational> {
    let (n, d) = text.split_once('/')?;
    let n: BigInt = n.trim().parse().ok()?;
    let d: BigInt = d.trim().parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// Serde adapter writing a [`BigRational`] as `"num/den"`.
pub mod ratio_str {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::ratio_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_ratio(&text)
            .ok_or_else(|| serde::de::Error::custom(format!("bad rational {text:?}")))
    }
}

/// Serde adapter writing a [`BigUint`] as a decimal string.
pub mod biguint_str {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(3, 4), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
        let row = binomial_row(20);
        for (k, v) in row.iter().enumerate() {
            assert_eq!(*v, binomial(20, k));
        }
    }

    #[test]
    fn ratio_text_roundtrip() {
        let r = ratio(-6, 4);
        assert_eq!(ratio_string(&r), "-3/2");
        assert_eq!(parse_ratio("-3/2"), Some(r));
        assert_eq!(parse_ratio("1/0"), None);
    }

    #[test]
    fn huge_logs_stay_finite() {
        let big = BigUint::one() << 5000u32;
        let v = ln_ratio(&BigUint::one(), &big);
        assert!((v + 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!(
            (to_f64(&BigRational::new(
                BigInt::from(big.clone()),
                BigInt::from(big << 1u32)
            )) - 0.5)
                .abs()
                < 1e-12
        );
    }
}
