//! Exact joint law of `(wt(S), wt(S + alpha))` for uniform `S`.
//!
//! The dynamic program walks bit positions from least to most significant,
//! keeping one table of `(weight of S so far, weight of T so far)` counts per
//! carry state. For `Z_{2^n - 1}` the end-around carry `g` is guessed up
//! front and fed in at bit 0; a path is kept only when the carry leaving the
//! top bit equals the guess. The single sum with two consistent guesses is
//! `S + alpha = 2^n - 1`, whose reduced value is 0; there the `g = 0` path
//! (which would produce the all-ones string) is dropped. Two flags record
//! whether `S` and `T` have been all ones so far, which excludes `S = 1^n`
//! and detects that case.

use std::io::{self, Write};
use std::ops::AddAssign;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::bitstring::{BitString, Modulus, ModulusKind};
use crate::error::Result;
use crate::numeric::{self, ratio_big};

/// Widest `Z_{2^n}` instance the exact path is expected to handle.
pub const EXACT_LIMIT_POW2: usize = 256;
/// Widest `Z_{2^n - 1}` instance the exact path is expected to handle.
pub const EXACT_LIMIT_POW2M1: usize = 96;

/// Whether the exact DP is the default method for this modulus.
pub fn exact_is_default(modulus: Modulus) -> bool {
    match modulus.kind() {
        ModulusKind::Pow2 => modulus.width() <= EXACT_LIMIT_POW2,
        ModulusKind::Pow2Minus1 => modulus.width() <= EXACT_LIMIT_POW2M1,
    }
}

/// Light strings have `2 * weight <= width`.
pub fn is_light(weight: usize, width: usize) -> bool {
    2 * weight <= width
}

/// Exact counts of strings `S` attaining each weight pair `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointWeightDistribution {
    modulus: Modulus,
    counts: Vec<BigUint>,
    total: BigUint,
}

impl JointWeightDistribution {
    /// Wraps a dense row-major `(width + 1)^2` table.
    pub fn from_dense(modulus: Modulus, counts: Vec<BigUint>) -> Self {
        let side = modulus.width() + 1;
        assert_eq!(counts.len(), side * side, "table must be (n+1)^2");
        let total = counts.iter().sum();
        JointWeightDistribution {
            modulus,
            counts,
            total,
        }
    }

    pub fn width(&self) -> usize {
        self.modulus.width()
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn total(&self) -> &BigUint {
        &self.total
    }

    pub fn count(&self, x: usize, y: usize) -> &BigUint {
        &self.counts[x * (self.width() + 1) + y]
    }

    /// Nonzero cells in row-major order.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (usize, usize, &BigUint)> + '_ {
        let side = self.width() + 1;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (i / side, i % side, c))
    }

    pub fn marginal_x(&self) -> Vec<BigUint> {
        let side = self.width() + 1;
        (0..side)
            .map(|x| self.counts[x * side..(x + 1) * side].iter().sum())
            .collect()
    }

    pub fn marginal_y(&self) -> Vec<BigUint> {
        let side = self.width() + 1;
        (0..side)
            .map(|y| (0..side).map(|x| &self.counts[x * side + y]).sum())
            .collect()
    }

    /// `x,y,count` rows for every nonzero cell.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,y,count")?;
        for (x, y, c) in self.iter_nonzero() {
            writeln!(w, "{x},{y},{c}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv is ascii")
    }
}

impl Serialize for JointWeightDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let side = self.width() + 1;
        let rows: Vec<Vec<String>> = self
            .counts
            .chunks(side)
            .map(|row| row.iter().map(|c| c.to_string()).collect())
            .collect();
        let mut st = serializer.serialize_struct("JointWeightDistribution", 4)?;
        st.serialize_field("width", &self.width())?;
        st.serialize_field("modulus", &self.modulus.kind())?;
        st.serialize_field("total", &self.total.to_string())?;
        st.serialize_field("counts", &rows)?;
        st.end()
    }
}

/// Cell type for the DP tables; `u128` while counts stay below `2^127`.
trait Tally: Clone + Zero + One + for<'a> AddAssign<&'a Self> {
    fn into_big(self) -> BigUint;
}

impl Tally for u128 {
    fn into_big(self) -> BigUint {
        BigUint::from(self)
    }
}

impl Tally for BigUint {
    fn into_big(self) -> BigUint {
        self
    }
}

/// One DP table with the bounding box of its nonzero cells.
#[derive(Clone)]
struct Layer<T> {
    cells: Vec<T>,
    x_range: (usize, usize),
    y_range: (usize, usize),
}

impl<T: Tally> Layer<T> {
    fn new(side: usize) -> Self {
        Layer {
            cells: vec![T::zero(); side * side],
            x_range: (usize::MAX, 0),
            y_range: (usize::MAX, 0),
        }
    }

    fn add_shifted(&mut self, src: &Layer<T>, side: usize, dx: usize, dy: usize) {
        let (x0, x1) = src.x_range;
        let (y0, y1) = src.y_range;
        if x0 > x1 {
            return;
        }
        for x in x0..=x1 {
            let from = &src.cells[x * side..x * side + side];
            let to = &mut self.cells[(x + dx) * side..(x + dx) * side + side];
            for y in y0..=y1 {
                if !from[y].is_zero() {
                    to[y + dy] += &from[y];
                }
            }
        }
        self.x_range = (self.x_range.0.min(x0 + dx), self.x_range.1.max(x1 + dx));
        self.y_range = (self.y_range.0.min(y0 + dy), self.y_range.1.max(y1 + dy));
    }
}

// state bits: carry | t_all_ones << 1 | s_all_ones << 2 | guess << 3
const STATES: usize = 16;

fn state(carry: u8, t_all: u8, s_all: u8, guess: u8) -> usize {
    (carry | t_all << 1 | s_all << 2 | guess << 3) as usize
}

fn run_dp<T: Tally>(alpha: &BitString, modulus: Modulus) -> Vec<BigUint> {
    let n = modulus.width();
    let side = n + 1;
    let track = modulus.kind() == ModulusKind::Pow2Minus1;
    let mut layers: Vec<Option<Layer<T>>> = vec![None; STATES];

    let mut seed = Layer::new(side);
    seed.cells[0] = T::one();
    seed.x_range = (0, 0);
    seed.y_range = (0, 0);
    if track {
        layers[state(0, 1, 1, 0)] = Some(seed.clone());
        layers[state(1, 1, 1, 1)] = Some(seed);
    } else {
        layers[state(0, 0, 0, 0)] = Some(seed);
    }

    for i in 0..n {
        let a = alpha.bit(i) as u8;
        let mut next: Vec<Option<Layer<T>>> = vec![None; STATES];
        for (st, layer) in layers.iter().enumerate() {
            let Some(layer) = layer else { continue };
            let carry = st as u8 & 1;
            let t_all = st as u8 >> 1 & 1;
            let s_all = st as u8 >> 2 & 1;
            let guess = st as u8 >> 3 & 1;
            for s_bit in 0..2u8 {
                let sum = s_bit + a + carry;
                let t_bit = sum & 1;
                let target = if track {
                    state(sum >> 1, t_all & t_bit, s_all & s_bit, guess)
                } else {
                    state(sum >> 1, 0, 0, 0)
                };
                next[target]
                    .get_or_insert_with(|| Layer::new(side))
                    .add_shifted(layer, side, s_bit as usize, t_bit as usize);
            }
        }
        layers = next;
    }

    let mut result: Vec<T> = vec![T::zero(); side * side];
    for (st, layer) in layers.into_iter().enumerate() {
        let Some(layer) = layer else { continue };
        let carry = st as u8 & 1;
        let t_all = st as u8 >> 1 & 1;
        let s_all = st as u8 >> 2 & 1;
        let guess = st as u8 >> 3 & 1;
        if track && (carry != guess || s_all == 1 || (guess == 0 && t_all == 1)) {
            continue;
        }
        for (dst, src) in result.iter_mut().zip(&layer.cells) {
            *dst += src;
        }
    }
    result.into_iter().map(Tally::into_big).collect()
}

/// Exact joint law of `(wt(S), wt(S + alpha))` over every residue `S`.
pub fn joint_distribution(alpha: &BitString, modulus: Modulus) -> Result<JointWeightDistribution> {
    modulus.check(alpha)?;
    // counts never exceed 2^n
    let counts = if modulus.width() <= 126 {
        run_dp::<u128>(alpha, modulus)
    } else {
        run_dp::<BigUint>(alpha, modulus)
    };
    Ok(JointWeightDistribution::from_dense(modulus, counts))
}

/// Light/heavy transition counts and the shifting fraction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftReport {
    pub width: usize,
    pub alpha: BitString,
    pub modulus: ModulusKind,
    #[serde(with = "numeric::biguint_str")]
    pub total: BigUint,
    #[serde(with = "numeric::biguint_str")]
    pub light_count: BigUint,
    #[serde(with = "numeric::biguint_str")]
    pub heavy_count: BigUint,
    #[serde(with = "numeric::biguint_str")]
    pub light_to_heavy: BigUint,
    #[serde(with = "numeric::biguint_str")]
    pub light_to_light: BigUint,
    #[serde(with = "numeric::biguint_str")]
    pub heavy_to_light: BigUint,
    #[serde(with = "numeric::biguint_str")]
    pub heavy_to_heavy: BigUint,
    /// `|M ∪ (alpha + M)|`
    #[serde(with = "numeric::biguint_str")]
    pub union_size: BigUint,
    /// `union_size / total - 1/2`
    #[serde(with = "numeric::ratio_str")]
    pub epsilon: BigRational,
}

impl ShiftReport {
    pub fn from_joint(alpha: &BitString, dist: &JointWeightDistribution) -> Self {
        let n = dist.width();
        let mut t = [
            BigUint::zero(),
            BigUint::zero(),
            BigUint::zero(),
            BigUint::zero(),
        ];
        for (x, y, c) in dist.iter_nonzero() {
            let idx = match (is_light(x, n), is_light(y, n)) {
                (true, false) => 0,
                (true, true) => 1,
                (false, true) => 2,
                (false, false) => 3,
            };
            t[idx] += c;
        }
        let [lth, ltl, htl, hth] = t;
        let light_count = &lth + &ltl;
        let heavy_count = &htl + &hth;
        let union_size = &light_count + &lth;
        let total = dist.total().clone();
        let epsilon = ratio_big(&union_size, &total) - numeric::ratio(1, 2);
        ShiftReport {
            width: n,
            alpha: alpha.clone(),
            modulus: dist.modulus().kind(),
            total,
            light_count,
            heavy_count,
            light_to_heavy: lth,
            light_to_light: ltl,
            heavy_to_light: htl,
            heavy_to_heavy: hth,
            union_size,
            epsilon,
        }
    }

    pub fn light_to_heavy_fraction(&self) -> BigRational {
        ratio_big(&self.light_to_heavy, &self.total)
    }
}

pub fn shift_report(alpha: &BitString, modulus: Modulus) -> Result<ShiftReport> {
    let dist = joint_distribution(alpha, modulus)?;
    Ok(ShiftReport::from_joint(alpha, &dist))
}

/// Probability masses of the four light/heavy transitions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadrantMasses {
    #[serde(with = "numeric::ratio_str")]
    pub light_to_heavy: BigRational,
    #[serde(with = "numeric::ratio_str")]
    pub light_to_light: BigRational,
    #[serde(with = "numeric::ratio_str")]
    pub heavy_to_light: BigRational,
    #[serde(with = "numeric::ratio_str")]
    pub heavy_to_heavy: BigRational,
}

impl QuadrantMasses {
    pub fn sum(&self) -> BigRational {
        &self.light_to_heavy + &self.light_to_light + &self.heavy_to_light + &self.heavy_to_heavy
    }
}

pub fn quadrant_masses(dist: &JointWeightDistribution) -> QuadrantMasses {
    // alpha only labels the report; any string of the right width will do
    let r = ShiftReport::from_joint(&BitString::zeros(dist.width()), dist);
    let f = |c: &BigUint| ratio_big(c, &r.total);
    QuadrantMasses {
        light_to_heavy: f(&r.light_to_heavy),
        light_to_light: f(&r.light_to_light),
        heavy_to_light: f(&r.heavy_to_light),
        heavy_to_heavy: f(&r.heavy_to_heavy),
    }
}
