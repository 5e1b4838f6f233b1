use num_bigint::BigUint;
use num_traits::{One, Zero};
use proptest::prelude::*;

use hamming_shift_core::bitstring::{alpha_with_blocks, with_block_count};
use hamming_shift_core::block_model::{
    consolidate_unit_pairs, most_frequent_length, CarryFixing, Segment,
};
use hamming_shift_core::exact_dp::quadrant_masses;
use hamming_shift_core::numeric::binomial;
use hamming_shift_core::oracle::brute_force_joint;
use hamming_shift_core::{
    add, add_traced, decompose_blocks, joint_distribution, shift_report, BitString, Modulus,
    ModulusKind,
};

fn bitstring(max_width: usize) -> impl Strategy<Value = BitString> {
    (1..=max_width).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n).prop_map(BitString::from_lsb_bits)
    })
}

fn residue(kind: ModulusKind, max_width: usize) -> impl Strategy<Value = (BitString, Modulus)> {
    let min = if kind == ModulusKind::Pow2 { 1 } else { 2 };
    bitstring(max_width)
        .prop_filter("width", move |s| s.width() >= min)
        .prop_filter("residue", move |s| {
            kind == ModulusKind::Pow2 || !s.is_all_ones()
        })
        .prop_map(move |s| {
            let m = Modulus::new(kind, s.width()).unwrap();
            (s, m)
        })
}

fn any_residue(max_width: usize) -> impl Strategy<Value = (BitString, Modulus)> {
    prop_oneof![
        residue(ModulusKind::Pow2, max_width),
        residue(ModulusKind::Pow2Minus1, max_width)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dp_matches_enumeration((alpha, m) in any_residue(14)) {
        prop_assert_eq!(joint_distribution(&alpha, m).unwrap(), brute_force_joint(&alpha, m).unwrap());
    }

    #[test]
    fn marginals_are_binomial((alpha, m) in residue(ModulusKind::Pow2, 200)) {
        let d = joint_distribution(&alpha, m).unwrap();
        let n = m.width();
        let row: Vec<BigUint> = (0..=n).map(|k| binomial(n, k)).collect();
        prop_assert_eq!(d.marginal_x(), row.clone());
        prop_assert_eq!(d.marginal_y(), row);
        prop_assert_eq!(d.total().clone(), BigUint::one() << n);
    }

    #[test]
    fn pow2m1_marginals_drop_all_ones((alpha, m) in residue(ModulusKind::Pow2Minus1, 60)) {
        let d = joint_distribution(&alpha, m).unwrap();
        let n = m.width();
        let mut row: Vec<BigUint> = (0..=n).map(|k| binomial(n, k)).collect();
        row[n] = BigUint::zero();
        prop_assert_eq!(d.marginal_x(), row.clone());
        prop_assert_eq!(d.marginal_y(), row);
    }

    #[test]
    fn transitions_balance((alpha, m) in any_residue(80)) {
        let r = shift_report(&alpha, m).unwrap();
        prop_assert_eq!(&r.light_to_heavy, &r.heavy_to_light);
        let masses = quadrant_masses(&joint_distribution(&alpha, m).unwrap());
        prop_assert_eq!(masses.sum(), num_rational::BigRational::one());
    }

    #[test]
    fn addition_matches_big_integers((s, m) in any_residue(300), seed in any::<u64>()) {
        let n = m.width();
        let mut rng = hamming_shift_core::sampler::shard_rng(seed, 0);
        let alpha = hamming_shift_core::sampler::random_residue(&mut rng, m);
        let sum = add(&s, &alpha, m).unwrap().to_biguint();
        let order = match m.kind() {
            ModulusKind::Pow2 => BigUint::one() << n,
            ModulusKind::Pow2Minus1 => (BigUint::one() << n) - 1u32,
        };
        prop_assert_eq!(sum, (s.to_biguint() + alpha.to_biguint()) % order);
    }

    #[test]
    fn end_around_sum_is_plain_sum_or_one_more((s, m) in residue(ModulusKind::Pow2Minus1, 200), seed in any::<u64>()) {
        let n = m.width();
        let mut rng = hamming_shift_core::sampler::shard_rng(seed, 1);
        let alpha = hamming_shift_core::sampler::random_residue(&mut rng, m);
        let p = add(&s, &alpha, Modulus::pow2(n).unwrap()).unwrap().to_biguint();
        let q = add(&s, &alpha, m).unwrap().to_biguint();
        let wrap = BigUint::one() << n;
        prop_assert!(q == p || q == (&p + 1u32) % wrap);
    }

    #[test]
    fn blocks_roundtrip(alpha in bitstring(300)) {
        let d = decompose_blocks(&alpha);
        prop_assert_eq!(d.to_bitstring(), alpha.clone());
        prop_assert_eq!(d.lengths().iter().sum::<usize>(), alpha.width());
        let pattern: Vec<(u8, usize)> = d.blocks().iter().map(|b| (b.digit, b.length)).collect();
        prop_assert_eq!(alpha_with_blocks(&pattern, alpha.width()).unwrap(), alpha);
    }

    #[test]
    fn realized_carries_chain((s, m) in any_residue(150), seed in any::<u64>()) {
        let mut rng = hamming_shift_core::sampler::shard_rng(seed, 2);
        let alpha = hamming_shift_core::sampler::random_residue(&mut rng, m);
        let d = decompose_blocks(&alpha);
        let trace = add_traced(&s, &alpha, m).unwrap();
        let fixing = CarryFixing::realized(&d, &trace);
        prop_assert!(CarryFixing::new(&d, fixing.carries().to_vec()).is_ok());
    }

    #[test]
    fn consolidation_keeps_width(alpha in bitstring(300)) {
        let d = decompose_blocks(&alpha);
        let c = consolidate_unit_pairs(&d);
        prop_assert_eq!(c.segments.iter().map(Segment::width).sum::<usize>(), alpha.width());
        prop_assert!(c.matched <= c.pairs);
        let pairs = c.segments.iter().filter(|s| matches!(s, Segment::Pair(_))).count();
        prop_assert_eq!(pairs, c.matched);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    // m blocks in width n leave some length repeated at least m^2 / (4n) times
    #[test]
    fn frequent_length_pigeonhole(n in 2usize..400, frac in 0.0f64..1.0) {
        let m = 1 + ((n - 1) as f64 * frac) as usize;
        let alpha = with_block_count(m, n).unwrap();
        let lengths = decompose_blocks(&alpha).lengths();
        prop_assert_eq!(lengths.len(), m);
        let (_, count) = most_frequent_length(&lengths, n).unwrap();
        prop_assert!(count * 4 * n >= m * m);
    }

    #[test]
    fn frequent_length_pigeonhole_arbitrary(lengths in proptest::collection::vec(1usize..12, 1..80)) {
        let n: usize = lengths.iter().sum();
        let m = lengths.len();
        let (best, count) = most_frequent_length(&lengths, n).unwrap();
        prop_assert!(count * 4 * n >= m * m);
        prop_assert!(lengths.iter().filter(|&&l| l == best).count() == count);
    }
}
