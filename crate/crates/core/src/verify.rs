//! Self-check suites comparing the closed forms and the DP against enumeration.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitstring::{BitString, Modulus, ModulusKind};
use crate::block_model::{
    dist_given_both_carries, dist_given_carry_in, trailing_zero_dist, type4_covariance,
    type4_moment_closed_forms, BlockDistribution, BlockType,
};
use crate::clt_approx::gaussian_summary;
use crate::exact_dp::joint_distribution;
use crate::numeric::{int, ratio};
use crate::oracle::{
    brute_force_block, brute_force_joint, MAX_BLOCK_LENGTH, MAX_BRUTE_FORCE_WIDTH,
};

/// Tally of one suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub checks: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
}

impl SuiteOutcome {
    fn new(name: &'static str) -> Self {
        SuiteOutcome {
            name,
            checks: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    fn merge(mut self, other: SuiteOutcome) -> Self {
        self.checks += other.checks;
        self.failures += other.failures;
        self.first_failure = self.first_failure.or(other.first_failure);
        self
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checks > 0
    }
}

/// DP against enumeration for every `alpha` of every width up to `max_n`.
pub fn verify_dp(max_n: usize) -> SuiteOutcome {
    let max_n = max_n.min(MAX_BRUTE_FORCE_WIDTH);
    let mut cases = Vec::new();
    for n in 1..=max_n {
        cases.push((ModulusKind::Pow2, n));
        if n >= 2 {
            cases.push((ModulusKind::Pow2Minus1, n));
        }
    }
    cases
        .into_iter()
        .map(|(kind, n)| {
            let modulus = Modulus::new(kind, n).expect("width checked");
            let count = match kind {
                ModulusKind::Pow2 => 1u64 << n,
                ModulusKind::Pow2Minus1 => (1u64 << n) - 1,
            };
            (0..count)
                .into_par_iter()
                .map(|a| {
                    let mut out = SuiteOutcome::new("dp");
                    let alpha = BitString::from_u64(a, n).expect("fits");
                    let ok =
                        joint_distribution(&alpha, modulus) == brute_force_joint(&alpha, modulus);
                    out.check(ok, || format!("n={n} {kind} alpha={alpha}"));
                    out
                })
                .reduce(|| SuiteOutcome::new("dp"), SuiteOutcome::merge)
        })
        .fold(SuiteOutcome::new("dp"), SuiteOutcome::merge)
}

fn normalized(tally: &BTreeMap<(usize, usize), u64>) -> BTreeMap<(usize, usize), BigRational> {
    let total: u64 = tally.values().sum();
    tally
        .iter()
        .filter(|(_, &v)| v > 0)
        .map(|(&k, &v)| (k, ratio(v, total)))
        .collect()
}

fn describe(d: &BlockDistribution) -> String {
    format!(
        "digit={} L={} in={} out={:?}",
        d.digit, d.length, d.carry_in, d.carry_out
    )
}

/// Block laws given one or both carries, and the trailing-zero law, for `L <= max_length`.
pub fn verify_lemmas(max_length: usize) -> SuiteOutcome {
    let max_length = max_length.min(MAX_BLOCK_LENGTH);
    let mut out = SuiteOutcome::new("lemmas");
    for digit in 0..2u8 {
        for length in 1..=max_length {
            for carry_in in 0..2u8 {
                let tally = brute_force_block(digit, length, carry_in).expect("length bounded");
                let mut marginal: BTreeMap<(usize, usize), u64> = BTreeMap::new();
                for (&(x, y, _), &v) in &tally.counts {
                    *marginal.entry((x, y)).or_default() += v;
                }
                let d = dist_given_carry_in(digit, length, carry_in).expect("valid block");
                out.check(d.support == normalized(&marginal), || describe(&d));

                for carry_out in 0..2u8 {
                    let restricted = tally.with_carry_out(carry_out);
                    match dist_given_both_carries(digit, length, carry_in, carry_out) {
                        Ok(d) => out.check(d.support == normalized(&restricted), || describe(&d)),
                        Err(_) => out.check(restricted.is_empty(), || {
                            format!("digit={digit} L={length} in={carry_in} out={carry_out} should be infeasible")
                        }),
                    }
                }
            }
        }
    }
    for length in 1..=max_length {
        for weight in 0..=length {
            let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
            for v in 0u32..1 << length {
                if v.count_ones() as usize == weight {
                    let tz = if v == 0 {
                        length
                    } else {
                        v.trailing_zeros() as usize
                    };
                    *counts.entry(tz).or_default() += 1;
                }
            }
            let total: u64 = counts.values().sum();
            let enumerated: BTreeMap<_, _> = counts
                .into_iter()
                .map(|(k, v)| (k, ratio(v, total)))
                .collect();
            let mut closed = trailing_zero_dist(length, weight).expect("weight bounded");
            closed.retain(|_, p| *p != int(0));
            out.check(closed == enumerated, || {
                format!("trailing zeros L={length} x={weight}")
            });
        }
    }
    out
}

/// Enumerated type 4 moments against the closed forms, `2 <= L <= max_length`.
pub fn verify_moments(max_length: usize) -> SuiteOutcome {
    let max_length = max_length.min(MAX_BLOCK_LENGTH);
    let mut out = SuiteOutcome::new("moments");
    for digit in 0..2u8 {
        for length in 2..=max_length {
            let (ci, co) = BlockType::T4.carries(digit);
            let tally = brute_force_block(digit, length, ci).expect("length bounded");
            let law = BlockDistribution {
                digit,
                length,
                carry_in: ci,
                carry_out: Some(co),
                type_tag: Some(BlockType::T4),
                support: normalized(&tally.with_carry_out(co)),
            };
            let m = law.moments();
            let (c, d) = type4_covariance(length).expect("length >= 2");
            out.check(m.var_x() == c && m.var_y() == c, || {
                format!("variance L={length} digit={digit}")
            });
            out.check(m.cov() == d, || {
                format!("covariance L={length} digit={digit}")
            });
            if digit == 1 {
                let (mean, second, mixed) = type4_moment_closed_forms(length).expect("length >= 2");
                out.check(m.mean_x == mean, || format!("E[X] L={length}"));
                out.check(m.second_x == second, || format!("E[X^2] L={length}"));
                out.check(m.mixed == mixed, || format!("E[XY] L={length}"));
            }
        }
    }
    out
}

/// `c - d >= 1/9` and `d >= 1/9` with equality at `L = 2`, plus the ellipse axis bounds.
pub fn verify_bounds(max_length: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("bounds");
    let ninth = ratio(1, 9);
    for length in 2..=max_length {
        let (c, d) = type4_covariance(length).expect("length >= 2");
        let gap = &c - &d;
        out.check(gap >= ninth && d >= ninth, || {
            format!("L={length}: c-d={gap}, d={d}")
        });
        if length == 2 {
            out.check(gap == ninth && d == ninth, || "equality at L=2".into());
        }
        for count in [1, 7, 100] {
            let g = gaussian_summary(length, count, length * count).expect("valid sizes");
            out.check(g.axis_bounds_hold(), || {
                format!("axes L={length} l={count}")
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        for s in [
            verify_dp(6),
            verify_lemmas(6),
            verify_moments(8),
            verify_bounds(16),
        ] {
            assert!(s.passed(), "{s:?}");
        }
    }

    #[test]
    fn empty_suite_does_not_pass() {
        assert!(!verify_bounds(1).passed());
    }
}
