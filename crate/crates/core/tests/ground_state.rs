use proptest::prelude::*;

use xxz_core::ground_state::norm_sq;
use xxz_core::sos_bound::ladder_norm_sq;

use xxz_core::{
    assemble_sector, heine_check, kink_vector, lowest_k, residual, spin_half_norm_sq, SpinParams,
};

#[test]
fn kink_vector_matches_lanczos_ground_state() {
    for (two_j, l, delta, m) in [(2u32, 3usize, 4.0, 0i32), (3, 5, 2.0, 1), (4, 4, 1.5, -2), (1, 12, 2.0, 0)] {
        let p = SpinParams::from_delta(two_j, l, delta).unwrap();
        let psi = kink_vector(&p, m).unwrap().coefficients;
        let h = assemble_sector(&p, m).unwrap();
        let r = lowest_k(&h, 2, 1e-11).unwrap();
        assert!(r.eigenvalues[0].abs() < 1e-9);
        let overlap: f64 = psi.iter().zip(&r.eigenvectors[0]).map(|(a, b)| a * b).sum();
        assert!(overlap.abs() >= 1.0 - 1e-9, "overlap {overlap}");
    }
}

#[test]
fn perturbed_vector_is_detected() {
    let p = SpinParams::from_delta(2, 4, 2.0).unwrap();
    let h = assemble_sector(&p, 0).unwrap();
    let mut psi = kink_vector(&p, 0).unwrap().coefficients;
    let clean: f64 = h.matvec(&psi).unwrap().iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!(clean <= 1e-10 * h.norm_one());
    psi[0] += 1e-3;
    let dirty: f64 = h.matvec(&psi).unwrap().iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!(dirty > 1e-5);
}

#[test]
fn residual_small_across_parameters() {
    for two_j in 1..=4u32 {
        for l in [2usize, 5, 7] {
            for delta in [1.5, 2.0, 4.0, 8.0] {
                let p = SpinParams::from_delta(two_j, l, delta).unwrap();
                let h = assemble_sector(&p, 0).unwrap_or_else(|_| assemble_sector(&p, 1).unwrap());
                let m = if (two_j * l as u32) % 2 == 0 { 0 } else { 1 };
                assert!(residual(&p, m).unwrap() <= 1e-10 * h.norm_one());
            }
        }
    }
}

#[test]
fn long_chain_coefficients_do_not_underflow_to_nan() {
    let p = SpinParams::from_delta(1, 60, 1.2).unwrap();
    let g = kink_vector(&p, 56).unwrap();
    assert_eq!(g.coefficients.len(), 1770);
    assert!(g.coefficients.iter().all(|c| c.is_finite() && *c >= 0.0));
    let norm: f64 = g.coefficients.iter().map(|c| c * c).sum();
    assert!((norm - 1.0).abs() < 1e-12);
}

#[test]
fn heine_examples() {
    assert!(heine_check(0.5, 40).unwrap().discrepancy() <= 1e-12);
    assert!(heine_check(0.9, 200).unwrap().discrepancy() <= 1e-10);
    for q in [0.3, 0.7] {
        assert!(heine_check(q, 40).unwrap().discrepancy() <= 1e-10);
    }
}

#[test]
fn norm_routes_agree() {
    for two_j in 1..=3u32 {
        for l in 2..=6usize {
            for q in [0.2, 0.5, 0.8] {
                let p = SpinParams::new(two_j, l, 2.0 * q / (1.0 + q * q)).unwrap();
                for n in 0..=two_j * l as u32 {
                    let two_m = two_j as i32 * l as i32 - 2 * n as i32;
                    let direct = norm_sq(&p, two_m).unwrap();
                    let ladder = ladder_norm_sq(l, two_j, n, q).unwrap();
                    assert!(
                        (direct - ladder).abs() <= 1e-10 * direct,
                        "two_j={two_j} L={l} N={n}: {direct} vs {ladder}"
                    );
                }
            }
        }
    }
}

#[test]
fn spin_half_norm_is_the_kink_norm() {
    // for J = 1/2 the binomials are 1 and N down spins carry q^{2α}
    let q = 0.45;
    let l = 7;
    let p = SpinParams::new(1, l, 2.0 * q / (1.0 + q * q)).unwrap();
    for n in 0..=l {
        let direct = norm_sq(&p, l as i32 - 2 * n as i32).unwrap();
        let half = spin_half_norm_sq(l, n, q).unwrap().finite;
        assert!((direct - half).abs() <= 1e-12 * direct);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coefficients_positive_and_normalized(two_j in 1u32..=4, l in 2usize..=6, raw in 0u32..40, d in 0.01f64..0.99) {
        let max = (two_j * l as u32) as i32;
        let m = -max + 2 * (raw as i32 % (max + 1));
        let p = SpinParams::new(two_j, l, d).unwrap();
        let c = kink_vector(&p, m).unwrap().coefficients;
        prop_assert!(c.iter().all(|&x| x > 0.0));
        let n: f64 = c.iter().map(|x| x * x).sum();
        prop_assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn heine_discrepancy_decreases(q in 0.05f64..0.95) {
        let a = heine_check(q, 3).unwrap().discrepancy();
        let b = heine_check(q, 60).unwrap().discrepancy();
        prop_assert!(b <= a + 1e-15);
    }
}

#[test]
fn oversized_sector_is_rejected_not_allocated() {
    let p = SpinParams::from_delta(1, 60, 2.0).unwrap();
    assert!(matches!(kink_vector(&p, 0), Err(xxz_core::Error::TooLarge { .. })));
}
