//! Inputs shared by the benchmarks in `benches/`.

use hamming_shift_core::bitstring::{alternating, periodic};
use hamming_shift_core::{BitString, Modulus, ModulusKind};

/// An alternating alpha of width `n` together with its modulus.
pub fn alternating_case(kind: ModulusKind, n: usize) -> (BitString, Modulus) {
    (
        alternating(n, 0),
        Modulus::new(kind, n).expect("valid width"),
    )
}

/// `(1100)` repeated to width `n`, under `2^n`.
pub fn paired_case(n: usize) -> (BitString, Modulus) {
    (
        periodic("1100", n).expect("valid period"),
        Modulus::pow2(n).expect("valid width"),
    )
}
