use hamming_shift_core::bitstring::{alternating, periodic};
use hamming_shift_core::clt_approx::{theorem_walkthrough, WalkPath, WalkthroughBudget};
use hamming_shift_core::exact_dp::joint_distribution;
use hamming_shift_core::numeric::to_f64;
use hamming_shift_core::sampler::{estimate_fraction, sample_joint, Quantity};
use hamming_shift_core::{shift_report, Modulus};

#[test]
fn wide_alternating_alpha_still_shifts() {
    // pilot estimate 0.3058
    let e = estimate_fraction(
        &alternating(4096, 0),
        Modulus::pow2(4096).unwrap(),
        100_000,
        1,
    )
    .unwrap();
    assert_eq!(e.quantity, Quantity::LightToHeavy);
    assert!(e.estimate > 0.02, "{}", e.estimate);
}

#[test]
fn sampled_joint_is_close_in_total_variation() {
    let alpha = alternating(16, 0);
    let m = Modulus::pow2(16).unwrap();
    let exact = joint_distribution(&alpha, m).unwrap();
    let sampled = sample_joint(&alpha, m, 1_000_000, 77).unwrap();
    assert_eq!(sampled.counts.values().sum::<u64>(), 1_000_000);
    let tv = sampled.total_variation(&exact);
    assert!(tv <= 0.01, "{tv}");
}

#[test]
fn pow2m1_sampling_is_calibrated() {
    let alpha = periodic("110", 48).unwrap();
    let m = Modulus::pow2_minus1(48).unwrap();
    let exact = to_f64(&shift_report(&alpha, m).unwrap().light_to_heavy_fraction());
    let e = estimate_fraction(&alpha, m, 400_000, 5).unwrap();
    assert!(e.covers(exact, 4.0), "{} vs {exact}", e.estimate);
}

#[test]
fn walkthrough_beyond_exact_reach_samples() {
    let alpha = periodic("1100", 512).unwrap();
    let budget = WalkthroughBudget {
        carry_samples: 2_000,
        mc_samples: 20_000,
        seed: 3,
        force_sampling: false,
    };
    let r = theorem_walkthrough(&alpha, Modulus::pow2(512).unwrap(), budget).unwrap();
    assert_eq!(r.path, WalkPath::LongBlocks);
    assert!(r.measured.standard_error.is_some());
    assert_eq!(r.floor_respected, Some(true));
    let again = theorem_walkthrough(&alpha, Modulus::pow2(512).unwrap(), budget).unwrap();
    assert_eq!(
        serde_json::to_string(&r).unwrap(),
        serde_json::to_string(&again).unwrap()
    );
}

#[test]
fn walkthrough_under_end_around_carry() {
    let alpha = alternating(40, 1);
    let r = theorem_walkthrough(
        &alpha,
        Modulus::pow2_minus1(40).unwrap(),
        WalkthroughBudget::default(),
    )
    .unwrap();
    assert_eq!(r.path, WalkPath::ConsolidatedPairs);
    assert_eq!(r.measured.light_to_heavy_equals_heavy_to_light, Some(true));
    assert!(r.bound_respected);
}
