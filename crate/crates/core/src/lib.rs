//! Exact and sampled analysis of how adding a fixed constant moves the
//! Hamming weight of a uniformly random `n`-bit string.
//!
//! The central object is the joint law of `(wt(S), wt(S + alpha))` for `S`
//! uniform on `Z_{2^n}` or `Z_{2^n - 1}`. [`exact_dp`] computes it exactly,
//! [`sampler`] estimates it, and [`oracle`] enumerates it for small `n`.
//! [`block_model`] and [`clt_approx`] expose the block-by-block structure
//! used to bound the shifting fraction from below.

pub mod bitstring;
pub mod block_model;
pub mod clt_approx;
mod error;
pub mod exact_dp;
pub mod numeric;
pub mod oracle;
pub mod sampler;
pub mod verify;

pub use bitstring::{
    add, add_traced, decompose_blocks, parse_alpha, BitString, Block, BlockDecomposition,
    CarryTrace, Modulus, ModulusKind,
};
pub use block_model::{BlockDistribution, BlockType, CarryFixing, Consolidation, Segment};
pub use clt_approx::{theorem_walkthrough, TheoremReport, WalkthroughBudget};
pub use error::{Error, Result};
pub use exact_dp::{joint_distribution, shift_report, JointWeightDistribution, ShiftReport};
pub use sampler::{estimate_fraction, MonteCarloEstimate};
