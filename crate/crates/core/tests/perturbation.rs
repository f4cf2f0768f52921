use xxz_core::ising_perturb::{centered_two_m, numeric_curvature};
use xxz_core::{curvature_table, ising_excitation_energy, spectral_gap, SpinParams};

const TOL: f64 = 1e-11;

#[test]
fn ising_gap_is_excitation_energy() {
    for two_j in 1..=4u32 {
        for n in 0..=two_j / 2 {
            let m = centered_two_m(two_j, 6, n).unwrap();
            let p = SpinParams::new(two_j, 6, 0.0).unwrap();
            let gap = spectral_gap(&p, m, TOL).unwrap().gap;
            assert!((gap - ising_excitation_energy(n) as f64).abs() < 1e-9, "2J={two_j} n={n}: {gap}");
        }
    }
}

#[test]
fn numeric_curvature_examples() {
    for (two_j, n, expected) in [(3u32, 0u32, 11.0 / 12.0), (2, 0, -1.0 / 3.0)] {
        let m = centered_two_m(two_j, 8, n).unwrap();
        let d2 = numeric_curvature(two_j, 8, m, 0.01, TOL).unwrap();
        assert!(
            (d2 - 2.0 * expected).abs() < 1e-3,
            "2J={two_j} n={n}: {d2} vs {}",
            2.0 * expected
        );
    }
}

#[test]
fn numeric_sign_agrees_with_table() {
    for c in curvature_table(4).iter().filter(|c| !c.infinite && !c.degenerate) {
        let m = centered_two_m(c.two_j, 6, c.n).unwrap();
        let d2 = numeric_curvature(c.two_j, 6, m, 0.02, TOL).unwrap();
        assert_eq!(d2.signum(), c.value.signum(), "2J={} n={}: {d2} vs {}", c.two_j, c.n, c.value);
    }
}

#[test]
fn table_shape() {
    let t = curvature_table(6);
    assert_eq!(t.len(), 1 + 2 + 2 + 3 + 3 + 4);
    let inf: Vec<(u32, u32)> = t.iter().filter(|c| c.infinite).map(|c| (c.two_j, c.n)).collect();
    assert!(inf.contains(&(1, 0)));
    assert!(inf.contains(&(2, 1)));
    for c in t.iter().filter(|c| c.degenerate && !c.infinite) {
        assert!(c.value < 0.0);
    }
}
