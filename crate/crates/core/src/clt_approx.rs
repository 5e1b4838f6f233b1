//! The asymptotic lower-bound argument, evaluated on concrete inputs.
//!
//! A carry fixing splits `(wt(S), wt(S + alpha))` into independent block
//! contributions. Identical type 4 blocks form an approximately Gaussian
//! part with an invertible covariance; type 1 and the remaining type 4
//! blocks form a remainder that stays near its mean; types 2 and 3 are
//! deterministic and only translate the picture along `(1, -1)`.
//!
//! Bounds here are astronomically small, so every one of them is reported as
//! a natural logarithm and never exponentiated.

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::RngCore;
use serde::Serialize;

use crate::bitstring::{add_traced, decompose_blocks, BitString, Block, CarryTrace, Modulus};
use crate::block_model::{
    carries_at, consolidate_unit_pairs, covariance, most_frequent_length, segment_low_positions,
    segments_of, type4_covariance, BlockType, Consolidation, Segment, TypeCounts,
};
use crate::error::{Error, Result};
use crate::exact_dp::{exact_is_default, shift_report};
use crate::numeric::{self, int, ratio, to_f64};
use crate::sampler::{self, map_shards, random_residue, shard_rng, MonteCarloEstimate, Quantity};

/// Realized carries of every segment plus the per-segment type 4 flag.
fn segment_carries(
    segments: &[Segment],
    lows: &[usize],
    trace: &CarryTrace,
    width: usize,
) -> Vec<(u8, u8)> {
    segments
        .iter()
        .zip(lows)
        .map(|(s, &lo)| carries_at(trace, lo, s.width(), width))
        .collect()
}

fn is_type4(segment: &Segment, carry_in: u8, carry_out: u8) -> bool {
    match segment {
        Segment::Run(b) => {
            b.length >= 2
                && BlockType::classify(b.digit, b.length, carry_in, carry_out) == Ok(BlockType::T4)
        }
        Segment::Pair(p) => p.is_type4(carry_in, carry_out),
    }
}

/// Whether the incoming carry is the one that can make the segment type 4.
fn nontrivial_in(segment: &Segment, carry_in: u8) -> bool {
    match segment {
        Segment::Run(b) => carry_in != b.digit,
        // a pair mimics a length-2 block of the equivalent digit with the carry flipped
        Segment::Pair(p) => 1 - carry_in != p.equivalent_digit(),
    }
}

fn is_eligible(segment: &Segment) -> bool {
    segment.width() >= 2
}

fn alpha_of(segments: &[Segment]) -> BitString {
    let mut bits = Vec::new();
    for s in segments.iter().rev() {
        match s {
            Segment::Run(b) => bits.extend(std::iter::repeat_n(b.digit == 1, b.length)),
            Segment::Pair(p) => {
                let [hi, lo] = p.digits();
                bits.push(lo == 1);
                bits.push(hi == 1);
            }
        }
    }
    BitString::from_lsb_bits(bits)
}

/// Sampled evidence that many eligible segments are type 4 at once.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrangementEstimate {
    /// Segments of width at least 2.
    pub eligible: usize,
    /// Frequency of more than `eligible / 4` type 4 segments.
    pub estimate: MonteCarloEstimate,
    pub mean_type4_count: f64,
    /// Over eligible segments and draws.
    pub nontrivial_in_rate: f64,
    pub nontrivial_out_given_in_rate: f64,
}

#[derive(Default)]
struct ArrangementTally {
    hits: u64,
    type4: u64,
    nontrivial_in: u64,
    nontrivial_both: u64,
}

/// Estimates `Pr(#type 4 > eligible / 4)` over uniform `S`.
pub fn type4_arrangement_probability(
    segments: &[Segment],
    modulus: Modulus,
    trials: u64,
    seed: u64,
) -> Result<ArrangementEstimate> {
    let eligible = segments.iter().filter(|s| is_eligible(s)).count();
    if eligible == 0 {
        return Err(Error::NoEligibleBlocks);
    }
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let alpha = alpha_of(segments);
    modulus.check(&alpha)?;
    let n = modulus.width();
    let lows = segment_low_positions(segments);
    let tallies = map_shards(trials, seed, sampler::DEFAULT_SHARD_SIZE, |rng, count| {
        let mut t = ArrangementTally::default();
        for _ in 0..count {
            let s = random_residue(rng, modulus);
            let trace = add_traced(&s, &alpha, modulus).expect("residues checked above");
            let carries = segment_carries(segments, &lows, &trace, n);
            let mut k = 0;
            for (seg, &(ci, co)) in segments
                .iter()
                .zip(&carries)
                .filter(|(s, _)| is_eligible(s))
            {
                let four = is_type4(seg, ci, co);
                k += four as usize;
                if nontrivial_in(seg, ci) {
                    t.nontrivial_in += 1;
                    // a non-trivial carry in followed by a non-trivial carry out is type 4
                    t.nontrivial_both += four as u64;
                }
            }
            t.type4 += k as u64;
            t.hits += (4 * k > eligible) as u64;
        }
        t
    })?;
    let total = tallies
        .into_iter()
        .fold(ArrangementTally::default(), |mut a, t| {
            a.hits += t.hits;
            a.type4 += t.type4;
            a.nontrivial_in += t.nontrivial_in;
            a.nontrivial_both += t.nontrivial_both;
            a
        });
    let seen = (trials * eligible as u64) as f64;
    Ok(ArrangementEstimate {
        eligible,
        estimate: MonteCarloEstimate::from_hits(
            Quantity::ArrangementProbability,
            total.hits,
            trials,
            seed,
            sampler::DEFAULT_SHARD_SIZE,
        ),
        mean_type4_count: total.type4 as f64 / trials as f64,
        nontrivial_in_rate: total.nontrivial_in as f64 / seen,
        nontrivial_out_given_in_rate: if total.nontrivial_in == 0 {
            0.0
        } else {
            total.nontrivial_both as f64 / total.nontrivial_in as f64
        },
    })
}

/// Squared semi-axes of `x^2 - 2axy + y^2 = b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EllipseAxes {
    /// `b / (1 + a)`, along `y = -x`.
    #[serde(with = "numeric::ratio_str")]
    pub along_anti_diagonal: BigRational,
    /// `b / (1 - a)`, along `y = x`.
    #[serde(with = "numeric::ratio_str")]
    pub along_diagonal: BigRational,
}

pub fn rotated_ellipse_axes(a: &BigRational, b: &BigRational) -> Result<EllipseAxes> {
    if a.is_negative() {
        return Err(Error::OutOfRange(
            "ellipse cross term must be non-negative".into(),
        ));
    }
    if *a >= BigRational::one() {
        return Err(Error::DegenerateEllipse);
    }
    if !b.is_positive() {
        return Err(Error::OutOfRange("ellipse level must be positive".into()));
    }
    Ok(EllipseAxes {
        along_anti_diagonal: b / (BigRational::one() + a),
        along_diagonal: b / (BigRational::one() - a),
    })
}

/// Geometry of the sum of `count` identical type 4 blocks of length `length`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianSummary {
    pub length: usize,
    pub count: usize,
    pub width: usize,
    #[serde(with = "numeric::ratio_str")]
    pub cov_c: BigRational,
    #[serde(with = "numeric::ratio_str")]
    pub cov_d: BigRational,
    /// Diagonal entry `c * count` of the summed covariance.
    #[serde(with = "numeric::ratio_str")]
    pub mg_diagonal: BigRational,
    #[serde(with = "numeric::ratio_str")]
    pub mg_off_diagonal: BigRational,
    /// `d / c`
    #[serde(with = "numeric::ratio_str")]
    pub ellipse_a: BigRational,
    /// `2 (c^2 - d^2) count / c`
    #[serde(with = "numeric::ratio_str")]
    pub ellipse_b: BigRational,
    /// `2 (c + d) count`, along `y = x`
    #[serde(with = "numeric::ratio_str")]
    pub axis_sq_major: BigRational,
    /// `2 (c - d) count`, along `y = -x`
    #[serde(with = "numeric::ratio_str")]
    pub axis_sq_minor: BigRational,
    /// `ln(1 / (pi n)) - 144 n / count`
    pub density_floor_log: f64,
}

impl GaussianSummary {
    /// `axis_sq_major >= 2 count / 3` and `axis_sq_minor >= 2 count / 9`.
    pub fn axis_bounds_hold(&self) -> bool {
        let l = int(self.count as u64);
        self.axis_sq_major >= &l * ratio(2, 3) && self.axis_sq_minor >= l * ratio(2, 9)
    }
}

pub fn gaussian_summary(length: usize, count: usize, width: usize) -> Result<GaussianSummary> {
    if length < 2 || count == 0 || count.saturating_mul(length) > width {
        return Err(Error::OutOfRange(format!(
            "need length >= 2, count >= 1 and count * length <= n; got L={length}, l={count}, n={width}"
        )));
    }
    let (c, d) = type4_covariance(length)?;
    let l = int(count as u64);
    let a = &d / &c;
    let b = int(2) * (&c * &c - &d * &d) * &l / &c;
    let axes = rotated_ellipse_axes(&a, &b)?;
    let n = width as f64;
    Ok(GaussianSummary {
        length,
        count,
        width,
        mg_diagonal: &c * &l,
        mg_off_diagonal: &d * &l,
        axis_sq_major: axes.along_diagonal,
        axis_sq_minor: axes.along_anti_diagonal,
        ellipse_a: a,
        ellipse_b: b,
        cov_c: c,
        cov_d: d,
        density_floor_log: -(PI * n).ln() - 144.0 * n / count as f64,
    })
}

/// One block of the remainder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RemainderEntry {
    pub type_tag: BlockType,
    pub digit: u8,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemainderSummary {
    pub width: usize,
    pub entries: usize,
    #[serde(with = "numeric::ratio_str")]
    pub c_sum: BigRational,
    #[serde(with = "numeric::ratio_str")]
    pub d_sum: BigRational,
    /// `sqrt(n / 2)` when every entry is type 1, `sqrt(2 n)` otherwise.
    pub radius: f64,
    pub mass_bound: f64,
    /// `D <= C <= n / 3`
    pub within_stated_bounds: bool,
}

impl RemainderSummary {
    pub fn all_type1(&self) -> bool {
        self.c_sum == self.d_sum
    }
}

fn check_remainder(entries: &[RemainderEntry]) -> Result<()> {
    for e in entries {
        match e.type_tag {
            BlockType::T2 => {
                return Err(Error::WrongTypes("type 2 blocks belong to the translation"))
            }
            BlockType::T3 => {
                return Err(Error::WrongTypes("type 3 blocks belong to the translation"))
            }
            _ => {}
        }
    }
    Ok(())
}

pub fn remainder_summary(entries: &[RemainderEntry], width: usize) -> Result<RemainderSummary> {
    check_remainder(entries)?;
    let mut c_sum = BigRational::zero();
    let mut d_sum = BigRational::zero();
    for e in entries {
        let s = covariance(e.digit, e.length, e.type_tag)?;
        c_sum += s.var_x;
        d_sum += s.cov;
    }
    let n = width as f64;
    let (radius, mass_bound) = if entries.is_empty() {
        (0.0, 1.0)
    } else if c_sum == d_sum {
        ((n / 2.0).sqrt(), 0.5)
    } else {
        ((2.0 * n).sqrt(), 0.5)
    };
    let within_stated_bounds = d_sum <= c_sum && c_sum <= ratio(width as u64, 3);
    Ok(RemainderSummary {
        width,
        entries: entries.len(),
        c_sum,
        d_sum,
        radius,
        mass_bound,
        within_stated_bounds,
    })
}

/// Draws `length` uniform bits; returns `(weight, trailing zeros)`.
fn draw_bits<R: RngCore>(rng: &mut R, length: usize) -> (usize, usize) {
    let mut weight = 0;
    let mut trailing = None;
    let mut done = 0;
    while done < length {
        let take = (length - done).min(64);
        let mut w = rng.next_u64();
        if take < 64 {
            w &= (1u64 << take) - 1;
        }
        weight += w.count_ones() as usize;
        if trailing.is_none() && w != 0 {
            trailing = Some(done + w.trailing_zeros() as usize);
        }
        done += take;
    }
    (weight, trailing.unwrap_or(length))
}

/// One draw of `(X_i, Y_i)` from a type 1 or type 4 block law.
fn draw_entry<R: RngCore>(rng: &mut R, e: &RemainderEntry) -> (usize, usize) {
    match e.type_tag {
        BlockType::T1 => {
            let (x, _) = draw_bits(rng, e.length);
            (x, x)
        }
        _ => loop {
            // a block of ones with no carry in: any nonzero S-block value,
            // and adding 2^L - 1 is subtracting 1 within the block
            let (x, tz) = draw_bits(rng, e.length);
            if x == 0 {
                continue;
            }
            let y = x - 1 + tz;
            break if e.digit == 1 { (x, y) } else { (y, x) };
        },
    }
}

/// Sampled concentration of the remainder around its mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemainderSample {
    pub summary: RemainderSummary,
    /// Mass within `radius` of the mean, by Euclidean distance in the plane.
    pub within_radius: MonteCarloEstimate,
    /// `Pr{Q > 2}` for the quadratic form of the inverse covariance, when it exists.
    pub chebyshev_exceedance: Option<MonteCarloEstimate>,
    /// `2 / t^2` at `t = 2`.
    pub chebyshev_bound: f64,
}

pub fn sample_remainder(
    entries: &[RemainderEntry],
    width: usize,
    samples: u64,
    seed: u64,
) -> Result<RemainderSample> {
    let summary = remainder_summary(entries, width)?;
    let mut mean = (BigRational::zero(), BigRational::zero());
    for e in entries {
        let s = covariance(e.digit, e.length, e.type_tag)?;
        mean.0 += s.mean_x;
        mean.1 += s.mean_y;
    }
    let (mx, my) = (to_f64(&mean.0), to_f64(&mean.1));
    let (c, d) = (to_f64(&summary.c_sum), to_f64(&summary.d_sum));
    let invertible = summary.c_sum > summary.d_sum;
    let radius_sq = summary.radius * summary.radius;
    let shards = map_shards(samples, seed, sampler::DEFAULT_SHARD_SIZE, |rng, count| {
        let (mut inside, mut exceed) = (0u64, 0u64);
        for _ in 0..count {
            let (mut x, mut y) = (0usize, 0usize);
            for e in entries {
                let (a, b) = draw_entry(rng, e);
                x += a;
                y += b;
            }
            let (dx, dy) = (x as f64 - mx, y as f64 - my);
            inside += (dx * dx + dy * dy <= radius_sq) as u64;
            if invertible {
                let q = (c * dx * dx - 2.0 * d * dx * dy + c * dy * dy) / (c * c - d * d);
                exceed += (q > 2.0) as u64;
            }
        }
        (inside, exceed)
    })?;
    let (inside, exceed) = shards
        .into_iter()
        .fold((0, 0), |(a, b), (x, y)| (a + x, b + y));
    let est = |q, hits| {
        MonteCarloEstimate::from_hits(q, hits, samples, seed, sampler::DEFAULT_SHARD_SIZE)
    };
    Ok(RemainderSample {
        summary,
        within_radius: est(Quantity::RemainderMass, inside),
        chebyshev_exceedance: invertible.then(|| est(Quantity::RemainderMass, exceed)),
        chebyshev_bound: 0.5,
    })
}

/// Sampling effort for a walkthrough.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WalkthroughBudget {
    /// Draws of `S` used to study carry fixings.
    pub carry_samples: u64,
    /// Draws used for the measured fraction when the exact DP is not used.
    pub mc_samples: u64,
    pub seed: u64,
    /// Measure by sampling even when the exact DP would be used.
    pub force_sampling: bool,
}

impl Default for WalkthroughBudget {
    fn default() -> Self {
        WalkthroughBudget {
            carry_samples: 10_000,
            mc_samples: 100_000,
            seed: 0,
            force_sampling: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkPath {
    /// Enough blocks of length at least 2 to use directly.
    LongBlocks,
    /// Unit blocks fused into identical pairs first.
    ConsolidatedPairs,
}

/// A block or fused pair under the representative fixing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub type_tag: BlockType,
    /// Digit of the block whose law the piece follows.
    pub digit: u8,
    pub length: usize,
    pub carry_in: u8,
    pub carry_out: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepresentativeFixing {
    /// Draws examined before stopping.
    pub draws: u64,
    /// Whether more than a quarter of the eligible segments are type 4.
    pub meets_quarter: bool,
    pub type4_segments: usize,
    pub pieces: Vec<Piece>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasuredFraction {
    pub method: Method,
    pub fraction: f64,
    pub fraction_log: f64,
    pub exact: Option<String>,
    pub standard_error: Option<f64>,
    pub light_to_heavy_equals_heavy_to_light: Option<bool>,
}

/// Every quantity of the lower-bound argument for one `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub alpha: BitString,
    pub width: usize,
    pub modulus: crate::bitstring::ModulusKind,
    pub budget: WalkthroughBudget,
    pub block_count: usize,
    pub long_block_count: usize,
    pub block_density: f64,
    pub path: WalkPath,
    pub consolidation: Option<Consolidation>,
    pub arrangement: ArrangementEstimate,
    pub fixing: RepresentativeFixing,
    pub type_counts: TypeCounts,
    pub chosen_length: Option<usize>,
    pub chosen_count: Option<usize>,
    pub gaussian: Option<GaussianSummary>,
    pub remainder: RemainderSummary,
    /// Net offset `k (1, -1)` from type 2 and 3 pieces.
    #[serde(with = "numeric::ratio_str")]
    pub translation_k: BigRational,
    /// Offset of the full mean from `(n/2, n/2)` along `(1, -1)`.
    #[serde(with = "numeric::ratio_str")]
    pub mean_offset_k: BigRational,
    pub predicted_quadrant_floor_log: Option<f64>,
    pub theorem_constant_log: f64,
    pub final_bound_log: f64,
    pub measured: MeasuredFraction,
    pub floor_respected: Option<bool>,
    pub bound_respected: bool,
}

/// Pieces of `segments` under one traced addition.
fn pieces_of(
    segments: &[Segment],
    lows: &[usize],
    trace: &CarryTrace,
    width: usize,
) -> Result<Vec<Piece>> {
    let run = |b: Block, lo: usize| -> Result<Piece> {
        let (ci, co) = carries_at(trace, lo, b.length, width);
        Ok(Piece {
            type_tag: BlockType::classify(b.digit, b.length, ci, co)?,
            digit: b.digit,
            length: b.length,
            carry_in: ci,
            carry_out: co,
        })
    };
    let mut out = Vec::with_capacity(segments.len());
    for (seg, &lo) in segments.iter().zip(lows) {
        match *seg {
            Segment::Run(b) => out.push(run(b, lo)?),
            Segment::Pair(p) => {
                let (ci, co) = carries_at(trace, lo, 2, width);
                if p.is_type4(ci, co) {
                    let digit = p.equivalent_digit();
                    let (ei, eo) = BlockType::T4.carries(digit);
                    out.push(Piece {
                        type_tag: BlockType::T4,
                        digit,
                        length: 2,
                        carry_in: ei,
                        carry_out: eo,
                    });
                } else {
                    let [hi, low] = p.digits();
                    out.push(run(
                        Block {
                            digit: hi,
                            length: 1,
                        },
                        lo + 1,
                    )?);
                    out.push(run(
                        Block {
                            digit: low,
                            length: 1,
                        },
                        lo,
                    )?);
                }
            }
        }
    }
    Ok(out)
}

const FIXING_STREAM: u64 = u64::MAX;

/// Runs the lower-bound argument on `alpha` and measures the real fraction.
pub fn theorem_walkthrough(
    alpha: &BitString,
    modulus: Modulus,
    budget: WalkthroughBudget,
) -> Result<TheoremReport> {
    modulus.check(alpha)?;
    let n = modulus.width();
    let decomposition = decompose_blocks(alpha);
    let m = decomposition.len();
    if m < 2 {
        return Err(Error::DegenerateAlpha);
    }
    let long = decomposition
        .blocks()
        .iter()
        .filter(|b| b.length >= 2)
        .count();
    let (path, consolidation, segments) = if 100 * long < m {
        let c = consolidate_unit_pairs(&decomposition);
        let segments = c.segments.clone();
        (WalkPath::ConsolidatedPairs, Some(c), segments)
    } else {
        (WalkPath::LongBlocks, None, segments_of(&decomposition))
    };
    let lows = segment_low_positions(&segments);
    let arrangement =
        type4_arrangement_probability(&segments, modulus, budget.carry_samples, budget.seed)?;
    let eligible = arrangement.eligible;

    // first draw with more than a quarter type 4, or the best one seen
    let mut rng = shard_rng(budget.seed, FIXING_STREAM);
    let mut best: Option<(usize, CarryTrace)> = None;
    let mut draws = 0;
    while draws < budget.carry_samples.max(1) {
        draws += 1;
        let s = random_residue(&mut rng, modulus);
        let trace = add_traced(&s, alpha, modulus)?;
        let k = segments
            .iter()
            .zip(segment_carries(&segments, &lows, &trace, n))
            .filter(|(seg, (ci, co))| is_eligible(seg) && is_type4(seg, *ci, *co))
            .count();
        if best.as_ref().is_none_or(|(b, _)| k > *b) {
            best = Some((k, trace));
        }
        if 4 * k > eligible {
            break;
        }
    }
    let (type4_segments, trace) = best.expect("at least one draw");
    let pieces = pieces_of(&segments, &lows, &trace, n)?;
    let type_counts: TypeCounts = pieces.iter().map(|p| p.type_tag).collect();

    let t4_lengths: Vec<usize> = pieces
        .iter()
        .filter(|p| p.type_tag == BlockType::T4)
        .map(|p| p.length)
        .collect();
    let chosen = if t4_lengths.is_empty() {
        None
    } else {
        Some(most_frequent_length(&t4_lengths, n)?)
    };
    let gaussian = chosen.map(|(l, c)| gaussian_summary(l, c, n)).transpose()?;

    let mut remainder = Vec::new();
    let mut translation_k = BigRational::zero();
    let mut mean_offset_k = BigRational::zero();
    for p in &pieces {
        mean_offset_k += covariance(p.digit, p.length, p.type_tag)?.translation_k;
        match p.type_tag {
            BlockType::T2 | BlockType::T3 => {
                translation_k += covariance(p.digit, p.length, p.type_tag)?.translation_k;
            }
            BlockType::T4 if chosen.map(|(l, _)| l) == Some(p.length) => {}
            _ => remainder.push(RemainderEntry {
                type_tag: p.type_tag,
                digit: p.digit,
                length: p.length,
            }),
        }
    }
    let remainder = remainder_summary(&remainder, n)?;

    let base_log = (2.0 / PI).ln();
    let predicted_quadrant_floor_log = chosen.map(|(_, l)| base_log - 144.0 * n as f64 / l as f64);
    let density = m as f64 / n as f64;
    let theorem_constant_log = base_log - 92_160_000.0 / (density * density);
    let final_bound_log = theorem_constant_log - 12f64.ln();

    let measured = if exact_is_default(modulus) && !budget.force_sampling {
        let r = shift_report(alpha, modulus)?;
        let f = r.light_to_heavy_fraction();
        MeasuredFraction {
            method: Method::Exact,
            fraction: to_f64(&f),
            fraction_log: numeric::ln_ratio(&r.light_to_heavy, &r.total),
            exact: Some(numeric::ratio_string(&f)),
            standard_error: None,
            light_to_heavy_equals_heavy_to_light: Some(r.light_to_heavy == r.heavy_to_light),
        }
    } else {
        let e = sampler::estimate_fraction(alpha, modulus, budget.mc_samples, budget.seed)?;
        MeasuredFraction {
            method: Method::MonteCarlo,
            fraction: e.estimate,
            fraction_log: e.estimate.ln(),
            exact: None,
            standard_error: Some(e.standard_error),
            light_to_heavy_equals_heavy_to_light: None,
        }
    };
    let floor_respected = predicted_quadrant_floor_log.map(|f| f <= measured.fraction_log);
    let bound_respected = final_bound_log <= measured.fraction_log;

    Ok(TheoremReport {
        alpha: alpha.clone(),
        width: n,
        modulus: modulus.kind(),
        budget,
        block_count: m,
        long_block_count: long,
        block_density: density,
        path,
        consolidation,
        arrangement,
        fixing: RepresentativeFixing {
            draws,
            meets_quarter: 4 * type4_segments > eligible,
            type4_segments,
            pieces,
        },
        type_counts,
        chosen_length: chosen.map(|c| c.0),
        chosen_count: chosen.map(|c| c.1),
        gaussian,
        remainder,
        translation_k,
        mean_offset_k,
        predicted_quadrant_floor_log,
        theorem_constant_log,
        final_bound_log,
        measured,
        floor_respected,
        bound_respected,
    })
}
