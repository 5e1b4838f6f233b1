//! Seeded Monte Carlo estimates for widths the exact DP cannot reach.
//!
//! Work is cut into shards of a fixed number of samples. Shard `i` draws
//! from a ChaCha8 stream seeded with the user seed and stream id `i`, so the
//! result depends only on `(seed, samples, shard_size)`, never on how many
//! threads ran the shards. Shard counts are merged by addition.

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitstring::{add_words, end_around_carry, BitString, Modulus, ModulusKind};
use crate::error::{Error, Result};
use crate::exact_dp::{is_light, JointWeightDistribution};
use crate::numeric;

pub const GENERATOR: &str = "chacha8";
pub const DEFAULT_SHARD_SIZE: u64 = 1 << 14;

/// What a Bernoulli estimate counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    LightToHeavy,
    QuadrantMass,
    ArrangementProbability,
    RemainderMass,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub quantity: Quantity,
    pub estimate: f64,
    pub standard_error: f64,
    pub samples: u64,
    pub hits: u64,
    pub seed: u64,
    pub generator: &'static str,
    pub shard_size: u64,
}

impl MonteCarloEstimate {
    pub fn from_hits(
        quantity: Quantity,
        hits: u64,
        samples: u64,
        seed: u64,
        shard_size: u64,
    ) -> Self {
        let p = hits as f64 / samples as f64;
        MonteCarloEstimate {
            quantity,
            estimate: p,
            standard_error: (p * (1.0 - p) / samples as f64).sqrt(),
            samples,
            hits,
            seed,
            generator: GENERATOR,
            shard_size,
        }
    }

    /// Whether `value` lies within `k` standard errors of the estimate.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.estimate - value).abs() <= k * self.standard_error
    }
}

/// Generator for shard `index` under `seed`.
pub fn shard_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn shard_sizes(samples: u64, shard_size: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let shards = samples.div_ceil(shard_size);
    let shards = usize::try_from(shards).expect("shard count fits usize");
    (0..shards).into_par_iter().map(move |i| {
        let i = i as u64;
        (i, shard_size.min(samples - i * shard_size))
    })
}

/// Runs `work(rng, count)` on every shard in parallel and returns the
/// per-shard results in shard order.
pub fn map_shards<T, F>(samples: u64, seed: u64, shard_size: u64, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    if samples == 0 {
        return Err(Error::ZeroTrials);
    }
    if shard_size == 0 {
        return Err(Error::OutOfRange("shard size must be positive".into()));
    }
    Ok(shard_sizes(samples, shard_size)
        .map(|(i, count)| work(&mut shard_rng(seed, i), count))
        .collect())
}

/// Fills `words` with a uniform residue of `modulus`.
pub fn fill_residue<R: RngCore>(rng: &mut R, modulus: Modulus, words: &mut [u64]) {
    let width = modulus.width();
    let rem = width % 64;
    loop {
        rng.fill(words);
        if rem != 0 {
            *words.last_mut().unwrap() &= (1u64 << rem) - 1;
        }
        if modulus.kind() == ModulusKind::Pow2 || !is_all_ones(words, width) {
            return;
        }
    }
}

fn is_all_ones(words: &[u64], width: usize) -> bool {
    let ones: u32 = words.iter().map(|w| w.count_ones()).sum();
    ones as usize == width
}

/// A uniform residue of `modulus`.
pub fn random_residue<R: RngCore>(rng: &mut R, modulus: Modulus) -> BitString {
    let mut words = vec![0u64; modulus.width().div_ceil(64)];
    fill_residue(rng, modulus, &mut words);
    BitString::from_words(words, modulus.width())
}

/// Reusable buffers for drawing `S` and forming `S + alpha` word by word.
struct Adder<'a> {
    alpha: &'a [u64],
    modulus: Modulus,
    s: Vec<u64>,
    t: Vec<u64>,
}

impl<'a> Adder<'a> {
    fn new(alpha: &'a BitString, modulus: Modulus) -> Self {
        let words = alpha.words().len();
        Adder {
            alpha: alpha.words(),
            modulus,
            s: vec![0; words],
            t: vec![0; words],
        }
    }

    /// Draws `S` and returns `(wt(S), wt(S + alpha))`.
    fn draw<R: RngCore>(&mut self, rng: &mut R) -> (usize, usize) {
        let width = self.modulus.width();
        fill_residue(rng, self.modulus, &mut self.s);
        let carry_in = match self.modulus.kind() {
            ModulusKind::Pow2 => false,
            ModulusKind::Pow2Minus1 => end_around_carry(&self.s, self.alpha, width, &mut self.t),
        };
        add_words(&self.s, self.alpha, carry_in, width, &mut self.t);
        let wt = |w: &[u64]| w.iter().map(|v| v.count_ones() as usize).sum();
        (wt(&self.s), wt(&self.t))
    }
}

/// Light-to-heavy hits among `count` draws from one shard's stream.
pub fn shard_hits(
    alpha: &BitString,
    modulus: Modulus,
    seed: u64,
    index: u64,
    count: u64,
) -> Result<u64> {
    modulus.check(alpha)?;
    let mut rng = shard_rng(seed, index);
    Ok(light_to_heavy_hits(alpha, modulus, &mut rng, count))
}

fn light_to_heavy_hits(
    alpha: &BitString,
    modulus: Modulus,
    rng: &mut ChaCha8Rng,
    count: u64,
) -> u64 {
    let n = modulus.width();
    let mut adder = Adder::new(alpha, modulus);
    (0..count)
        .filter(|_| {
            let (x, y) = adder.draw(rng);
            is_light(x, n) && !is_light(y, n)
        })
        .count() as u64
}

/// Sampled light-to-heavy fraction with an explicit shard size.
pub fn estimate_fraction_sharded(
    alpha: &BitString,
    modulus: Modulus,
    samples: u64,
    seed: u64,
    shard_size: u64,
) -> Result<MonteCarloEstimate> {
    modulus.check(alpha)?;
    let hits: u64 = map_shards(samples, seed, shard_size, |rng, count| {
        light_to_heavy_hits(alpha, modulus, rng, count)
    })?
    .into_iter()
    .sum();
    Ok(MonteCarloEstimate::from_hits(
        Quantity::LightToHeavy,
        hits,
        samples,
        seed,
        shard_size,
    ))
}

/// Sampled fraction of residues `S` that are light while `S + alpha` is heavy.
pub fn estimate_fraction(
    alpha: &BitString,
    modulus: Modulus,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    estimate_fraction_sharded(alpha, modulus, samples, seed, DEFAULT_SHARD_SIZE)
}

/// Sparse sampled counts of `(wt(S), wt(S + alpha))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmpiricalJoint {
    pub width: usize,
    pub modulus: ModulusKind,
    pub samples: u64,
    pub seed: u64,
    pub generator: &'static str,
    #[serde(serialize_with = "serialize_cells")]
    pub counts: BTreeMap<(usize, usize), u64>,
}

fn serialize_cells<S: serde::Serializer>(
    counts: &BTreeMap<(usize, usize), u64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<[u64; 3]> = counts
        .iter()
        .map(|(&(x, y), &c)| [x as u64, y as u64, c])
        .collect();
    rows.serialize(s)
}

impl EmpiricalJoint {
    /// Total-variation distance to an exact law.
    pub fn total_variation(&self, exact: &JointWeightDistribution) -> f64 {
        let total = exact.total();
        let mut sum = 0.0;
        let side = self.width + 1;
        for x in 0..side {
            for y in 0..side {
                let p = numeric::to_f64(&numeric::ratio_big(exact.count(x, y), total));
                let q = self.counts.get(&(x, y)).copied().unwrap_or(0) as f64 / self.samples as f64;
                sum += (p - q).abs();
            }
        }
        sum / 2.0
    }
}

pub fn sample_joint(
    alpha: &BitString,
    modulus: Modulus,
    samples: u64,
    seed: u64,
) -> Result<EmpiricalJoint> {
    modulus.check(alpha)?;
    let shards = map_shards(samples, seed, DEFAULT_SHARD_SIZE, |rng, count| {
        let mut adder = Adder::new(alpha, modulus);
        let mut t: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for _ in 0..count {
            *t.entry(adder.draw(rng)).or_default() += 1;
        }
        t
    })?;
    let mut counts = BTreeMap::new();
    for shard in shards {
        for (k, v) in shard {
            *counts.entry(k).or_default() += v;
        }
    }
    Ok(EmpiricalJoint {
        width: modulus.width(),
        modulus: modulus.kind(),
        samples,
        seed,
        generator: GENERATOR,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitstring::{add, alternating};
    use crate::exact_dp::shift_report;

    #[test]
    fn zero_alpha_never_shifts() {
        let n = 40;
        let e =
            estimate_fraction(&BitString::zeros(n), Modulus::pow2(n).unwrap(), 5000, 3).unwrap();
        assert_eq!((e.estimate, e.standard_error, e.hits), (0.0, 0.0, 0));
        let j = sample_joint(&BitString::zeros(n), Modulus::pow2(n).unwrap(), 2000, 3).unwrap();
        assert!(j.counts.keys().all(|(x, y)| x == y));
    }

    #[test]
    fn zero_samples_rejected() {
        let a = BitString::zeros(8);
        assert_eq!(
            estimate_fraction(&a, Modulus::pow2(8).unwrap(), 0, 1),
            Err(Error::ZeroTrials)
        );
    }

    #[test]
    fn single_sample_is_one_count() {
        let a = alternating(16, 0);
        let j = sample_joint(&a, Modulus::pow2(16).unwrap(), 1, 9).unwrap();
        assert_eq!(j.counts.values().sum::<u64>(), 1);
        assert_eq!(j.counts.len(), 1);
    }

    #[test]
    fn adder_matches_bitstring_add() {
        for kind in [ModulusKind::Pow2, ModulusKind::Pow2Minus1] {
            for n in [5, 64, 65, 130] {
                let m = Modulus::new(kind, n).unwrap();
                let mut rng = shard_rng(11, 0);
                let alpha = random_residue(&mut rng, m);
                let mut adder = Adder::new(&alpha, m);
                for _ in 0..200 {
                    let mut probe = rng.clone();
                    let (x, y) = adder.draw(&mut rng);
                    let s = random_residue(&mut probe, m);
                    assert_eq!(x, s.weight());
                    assert_eq!(y, add(&s, &alpha, m).unwrap().weight());
                }
            }
        }
    }

    #[test]
    fn pow2m1_never_draws_all_ones() {
        let m = Modulus::pow2_minus1(2).unwrap();
        let mut rng = shard_rng(5, 0);
        for _ in 0..1000 {
            assert!(!random_residue(&mut rng, m).is_all_ones());
        }
    }

    #[test]
    fn thread_count_does_not_matter() {
        let a = alternating(100, 1);
        let m = Modulus::pow2(100).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_fraction_sharded(&a, m, 50_000, 42, 1000).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn shards_merge_by_addition() {
        let a = alternating(48, 0);
        let m = Modulus::pow2(48).unwrap();
        let e = estimate_fraction_sharded(&a, m, 10_500, 8, 1000).unwrap();
        let by_hand: u64 = (0..11)
            .map(|i| shard_hits(&a, m, 8, i, if i == 10 { 500 } else { 1000 }).unwrap())
            .sum();
        assert_eq!(e.hits, by_hand);
    }

    #[test]
    fn agrees_with_exact_at_small_width() {
        let a = alternating(16, 0);
        for m in [
            Modulus::pow2(16).unwrap(),
            Modulus::pow2_minus1(16).unwrap(),
        ] {
            let exact = numeric::to_f64(&shift_report(&a, m).unwrap().light_to_heavy_fraction());
            let e = estimate_fraction(&a, m, 200_000, 1).unwrap();
            assert!(e.covers(exact, 4.0), "{} vs {}", e.estimate, exact);
        }
    }
}
