//! Scan family and width-grid specifications.

use anyhow::{anyhow, bail, Context, Result};
use hamming_shift_core::bitstring::{periodic, sparse, with_block_count};
use hamming_shift_core::sampler::{random_residue, shard_rng};
use hamming_shift_core::{BitString, Modulus};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockCount {
    Fixed(usize),
    /// `n / d` blocks
    Fraction(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Point {
    Sparse(usize),
    Blocks(BlockCount),
    Periodic(String),
    Random(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    pub name: &'static str,
    pub points: Vec<Point>,
}

impl Point {
    pub fn param(&self) -> String {
        match self {
            Point::Sparse(k) => format!("k={k}"),
            Point::Blocks(BlockCount::Fixed(m)) => format!("m={m}"),
            Point::Blocks(BlockCount::Fraction(1)) => "m=n".into(),
            Point::Blocks(BlockCount::Fraction(d)) => format!("m=n/{d}"),
            Point::Periodic(p) => format!("p={p}"),
            Point::Random(s) => format!("seed={s}"),
        }
    }

    /// The alpha at width `n`, or `None` where the point is undefined.
    pub fn alpha(&self, modulus: Modulus) -> Option<BitString> {
        let n = modulus.width();
        let alpha = match self {
            Point::Sparse(k) => sparse(*k, n).ok()?,
            Point::Blocks(BlockCount::Fixed(m)) => with_block_count(*m, n).ok()?,
            Point::Blocks(BlockCount::Fraction(d)) => with_block_count(n / d, n).ok()?,
            Point::Periodic(p) => periodic(p, n).ok()?,
            Point::Random(seed) => {
                return Some(random_residue(&mut shard_rng(*seed, n as u64), modulus))
            }
        };
        modulus.check(&alpha).ok()?;
        Some(alpha)
    }
}

/// `a`, `a..b` (inclusive) or `a..b:step`.
fn expand_range(item: &str) -> Result<Vec<usize>> {
    let parse = |s: &str| -> Result<usize> {
        s.trim()
            .parse()
            .with_context(|| format!("{s:?} is not a non-negative integer"))
    };
    let (range, step) = match item.split_once(':') {
        Some((r, s)) => (r, parse(s)?),
        None => (item, 1),
    };
    if step == 0 {
        bail!("range step must be positive in {item:?}");
    }
    match range.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (parse(a)?, parse(b)?);
            if a > b {
                bail!("empty range {item:?}");
            }
            Ok((a..=b).step_by(step).collect())
        }
        None => Ok(vec![parse(range)?]),
    }
}

fn items(list: &str) -> impl Iterator<Item = &str> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// Sorted, de-duplicated widths; an empty spec gives an empty grid.
pub fn parse_grid(spec: &str) -> Result<Vec<usize>> {
    let mut grid = Vec::new();
    for item in items(spec) {
        grid.extend(expand_range(item).with_context(|| "bad --n-grid")?);
    }
    if grid.contains(&0) {
        bail!("bad --n-grid: widths must be positive");
    }
    grid.sort_unstable();
    grid.dedup();
    Ok(grid)
}

pub fn parse_family(spec: &str) -> Result<Family> {
    let (kind, body) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("bad --family {spec:?}: expected kind:values"))?;
    let ctx = || format!("bad --family {spec:?}");
    let mut points = Vec::new();
    let name = match kind.trim() {
        "sparse" => {
            for item in items(body) {
                points.extend(
                    expand_range(item)
                        .with_context(ctx)?
                        .into_iter()
                        .map(Point::Sparse),
                );
            }
            "sparse"
        }
        "blocks" => {
            for item in items(body) {
                if item == "n" {
                    points.push(Point::Blocks(BlockCount::Fraction(1)));
                } else if let Some(d) = item.strip_prefix("n/") {
                    let d: usize = d.parse().with_context(ctx)?;
                    if d == 0 {
                        bail!("{}: division by zero", ctx());
                    }
                    points.push(Point::Blocks(BlockCount::Fraction(d)));
                } else {
                    let ms = expand_range(item).with_context(ctx)?;
                    points.extend(ms.into_iter().map(|m| Point::Blocks(BlockCount::Fixed(m))));
                }
            }
            "blocks"
        }
        "periodic" => {
            for item in items(body) {
                if !item.chars().all(|c| c == '0' || c == '1') {
                    bail!("{}: period {item:?} is not binary", ctx());
                }
                points.push(Point::Periodic(item.to_string()));
            }
            "periodic"
        }
        "random" => {
            for item in items(body) {
                points.push(Point::Random(item.parse().with_context(ctx)?));
            }
            "random"
        }
        other => bail!("bad --family {spec:?}: unknown kind {other:?}"),
    };
    if points.is_empty() {
        bail!("{}: no family points", ctx());
    }
    Ok(Family { name, points })
}
