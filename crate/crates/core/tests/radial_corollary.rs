use std::f64::consts::PI;

use deltalimit::radial3d::{classify_3d, log_grid, resonance_profile, tail_partial_integrals, Verdict};
use deltalimit::resonance::find_resonances;
use deltalimit::Potential;
use proptest::prelude::*;

#[test]
fn profile_vanishes_times_r_at_origin_and_is_flat_outside() {
    let v = Potential::linear(0.6);
    let theta = find_resonances(&v, (-40.0, -0.1), 1, 1e-12).unwrap()[0].theta;
    let case = classify_3d(&v, theta, 1.0, 1e-8).unwrap();
    assert_eq!(case.verdict, Verdict::Resonant);
    let prof = resonance_profile(&case, &[1e-6, 1e-3, 2.0, 10.0]).unwrap();
    assert!((prof[0].0 * prof[0].1).abs() < 1e-5);
    let c = case.tail_coefficient().unwrap();
    assert_eq!(prof[2].1 * 2.0, c);
    assert_eq!(prof[3].1 * 10.0, c);
}

#[test]
fn tail_integrals_grow_linearly() {
    let case = classify_3d(&Potential::square(), -PI * PI / 4.0, 1.0, 1e-8).unwrap();
    let t = tail_partial_integrals(&case, &[10.0, 100.0, 1000.0]).unwrap();
    assert!(t[2].1 > 9.0 * t[1].1 && t[1].1 > 9.0 * t[0].1);
    assert!(log_grid(1.0, 0.5, 10).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn verdict_matches_membership(xi in -0.5f64..1.2, k in 0usize..3, offset in prop::bool::ANY) {
        let v = Potential::linear(xi);
        let hits = find_resonances(&v, (-600.0, -0.1), 4, 1e-12).unwrap();
        let roots: Vec<f64> = hits.iter().map(|h| h.theta).collect();
        let theta = if offset { 0.5 * (roots[k] + roots[k + 1]) } else { roots[k] };
        let case = classify_3d(&v, theta, 2.0, 1e-8).unwrap();
        prop_assert_eq!(case.verdict == Verdict::Resonant, !offset);
        if !offset {
            prop_assert!((case.alpha.unwrap() - 2.0 * hits[k].alpha_per_omega()).abs() < 1e-8);
        } else {
            prop_assert!(case.alpha.is_none());
        }
    }
}
