//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::Rational64;
use rayon::prelude::*;

use xxz_core::boson::{boson_matrix, boson_vs_exact, optimal_anisotropy_scan};
use xxz_core::hamiltonian::{assemble_on_basis, staggered_conjugate_spectrum_check};
use xxz_core::ising_perturb::{centered_two_m, curvature_table, richardson_check};
use xxz_core::sos_bound::{contingency_count, delta_and_bound, gale_ryser_feasible};
use xxz_core::{heine_check, sector_dimension, spectral_gap, SectorBasis, SpinParams};

const GAP_TOL: f64 = 1e-11;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn sectors(two_j: u32, length: usize) -> Vec<i32> {
    let max = (two_j as usize * length) as i32;
    (-max..=max).step_by(2).collect()
}

fn spin_half_exact_gap() -> Outcome {
    let cases: Vec<(usize, f64, i32)> = (2..=12)
        .flat_map(|l| {
            [1.5, 2.0, 4.0]
                .into_iter()
                .flat_map(move |d| sectors(1, l).into_iter().map(move |m| (l, d, m)))
        })
        .filter(|&(l, _, m)| m.unsigned_abs() < l as u32)
        .collect();
    let errs: Vec<Result<f64, String>> = cases
        .par_iter()
        .map(|&(l, d, m)| {
            let p = SpinParams::from_delta(1, l, d).map_err(|e| e.to_string())?;
            let g = spectral_gap(&p, m, GAP_TOL).map_err(|e| e.to_string())?;
            Ok((g.gap - (1.0 - (PI / l as f64).cos() / d)).abs())
        })
        .collect();
    let mut worst: f64 = 0.0;
    for e in errs {
        match e {
            Ok(v) => worst = worst.max(v),
            Err(msg) => return outcome(false, msg),
        }
    }
    outcome(
        worst <= 1e-8,
        format!("{} sectors, max |gap - (1 - cos(pi/L)/Delta)| = {worst:.2e} (tol 1e-8)", cases.len()),
    )
}

fn frustration_free_residual() -> Outcome {
    let mut cases = Vec::new();
    for two_j in 1..=4u32 {
        for l in 2..=8usize {
            for d in [1.5, 2.0, 4.0, 8.0] {
                for m in sectors(two_j, l) {
                    if sector_dimension(two_j, l, m).unwrap() <= 100_000 {
                        cases.push((two_j, l, d, m));
                    }
                }
            }
        }
    }
    let worst = cases
        .par_iter()
        .map(|&(two_j, l, d, m)| {
            let p = SpinParams::from_delta(two_j, l, d).unwrap();
            let basis = SectorBasis::new(two_j, l, m).unwrap();
            let h = assemble_on_basis(&p, &basis).unwrap();
            let psi = xxz_core::kink_vector(&p, m).unwrap().coefficients;
            let hv = h.matvec(&psi).unwrap();
            let r = hv.iter().map(|x| x * x).sum::<f64>().sqrt();
            r / h.norm_one().max(f64::MIN_POSITIVE)
        })
        .reduce(|| 0.0, f64::max);
    outcome(
        worst <= 1e-10,
        format!("{} sectors, max ||H psi0|| / ||H||_1 = {worst:.2e} (tol 1e-10)", cases.len()),
    )
}

struct SosCase {
    two_j: u32,
    length: usize,
    n: u32,
    delta_inv: f64,
}

fn sos_margin(c: &SosCase) -> Result<(f64, f64), String> {
    let b = delta_and_bound(c.length, c.two_j, c.n, c.delta_inv).map_err(|e| e.to_string())?;
    let two_m = c.two_j as i32 * c.length as i32 - 2 * c.n as i32;
    let p = SpinParams::new(c.two_j, c.length, c.delta_inv).map_err(|e| e.to_string())?;
    let g = spectral_gap(&p, two_m, GAP_TOL).map_err(|e| e.to_string())?;
    Ok((b.bound, g.gap))
}

fn sos_grid(delta_invs: &[f64], ising_only: bool) -> Vec<SosCase> {
    let mut out = Vec::new();
    for two_j in 1..=4u32 {
        for length in 3..=6usize {
            for n in 1..two_j * length as u32 {
                if ising_only && n % two_j != 0 {
                    continue;
                }
                for &delta_inv in delta_invs {
                    out.push(SosCase {
                        two_j,
                        length,
                        n,
                        delta_inv,
                    });
                }
            }
        }
    }
    out
}

fn sos_bound_validity() -> Outcome {
    let cases = sos_grid(&[0.1, 0.25, 0.5, 0.75], false);
    let results: Vec<_> = cases.par_iter().map(sos_margin).collect();
    let mut worst = f64::NEG_INFINITY;
    let mut min_slack = f64::INFINITY;
    for r in results {
        match r {
            Ok((bound, gap)) => {
                worst = worst.max(bound - gap);
                min_slack = min_slack.min(gap - bound);
            }
            Err(msg) => return outcome(false, msg),
        }
    }
    outcome(
        worst <= 1e-9,
        format!(
            "{} sectors (single-state sectors N = 0, 2JL have no gap), max(bound - gap) = {worst:.3e}, min slack {min_slack:.3e}",
            cases.len()
        ),
    )
}

fn ising_tightness() -> Outcome {
    let cases = sos_grid(&[0.0], true);
    let results: Vec<_> = cases.par_iter().map(sos_margin).collect();
    let mut worst: f64 = 0.0;
    for r in results {
        match r {
            Ok((bound, gap)) => worst = worst.max((bound - gap).abs()),
            Err(msg) => return outcome(false, msg),
        }
    }
    outcome(
        worst <= 1e-9,
        format!("{} sectors with N = 0 mod 2J, max |bound - gap| = {worst:.2e} (tol 1e-9)", cases.len()),
    )
}

fn table_reproduction() -> Outcome {
    let expected: [((u32, u32), (i64, i64)); 13] = [
        ((2, 0), (-1, 3)),
        ((3, 0), (11, 12)),
        ((3, 1), (-9, 4)),
        ((4, 0), (7, 3)),
        ((4, 1), (-1, 4)),
        ((4, 2), (-46, 5)),
        ((5, 0), (97, 24)),
        ((5, 1), (4, 3)),
        ((5, 2), (-39, 20)),
        ((6, 0), (91, 15)),
        ((6, 1), (3, 1)),
        ((6, 2), (0, 1)),
        ((6, 3), (-26, 3)),
    ];
    let table = curvature_table(6);
    let finite: Vec<_> = table.iter().filter(|c| !c.infinite).collect();
    let infinite: Vec<_> = table.iter().filter(|c| c.infinite).map(|c| (c.two_j, c.n)).collect();
    let mut mismatches = Vec::new();
    for ((two_j, n), (num, den)) in expected {
        let got = table
            .iter()
            .find(|c| c.two_j == two_j && c.n == n)
            .and_then(|c| c.curvature);
        if got != Some(Rational64::new(num, den)) {
            mismatches.push(format!("({two_j},{n}): {got:?}"));
        }
    }
    let pass = mismatches.is_empty() && finite.len() == 13 && infinite == vec![(1, 0), (2, 1)];
    outcome(
        pass,
        format!(
            "{} finite entries exact, infinite at (two_j, n) = {infinite:?}; mismatches {mismatches:?}",
            finite.len()
        ),
    )
}

fn curvature_cross_check() -> Outcome {
    let cases: Vec<_> = curvature_table(6)
        .into_iter()
        .filter(|c| !c.infinite && !c.degenerate)
        .collect();
    let mut lines = Vec::new();
    let mut pass = true;
    for c in &cases {
        let two_m = centered_two_m(c.two_j, 8, c.n).unwrap();
        let analytic = c.second_derivative();
        let rep = match richardson_check(c.two_j, 8, two_m, analytic, 0.02, GAP_TOL) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("({}, {}): {e}", c.two_j, c.n)),
        };
        let err = (rep.coarse - analytic).abs();
        let within = if analytic == 0.0 {
            err <= 0.05
        } else {
            err <= 0.05 * analytic.abs()
        };
        let fine_err = (rep.fine - analytic).abs();
        let extrap_err = (rep.extrapolated - analytic).abs();
        let order_ok = fine_err <= 1e-7 || (1.5..=2.5).contains(&rep.observed_order);
        let richardson_ok = extrap_err <= fine_err || fine_err <= 1e-7;
        pass &= within && order_ok && richardson_ok;
        lines.push(format!(
            "({},{}) fd={:.5} analytic={:.5} order={:.2}",
            c.two_j, c.n, rep.coarse, analytic, rep.observed_order
        ));
    }
    outcome(
        pass,
        format!(
            "{} nondegenerate cases J <= 3 at L = 8, h = 0.02 (5% rel, 0.05 abs for zero): {}",
            cases.len(),
            lines.join("; ")
        ),
    )
}

fn remark_constant() -> Outcome {
    let a = match optimal_anisotropy_scan(500, 99, 1e-6) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let b = match optimal_anisotropy_scan(1000, 99, 1e-6) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let err = (a.argmax - 0.49585399).abs();
    let moved = (a.argmax - b.argmax).abs();
    outcome(
        err <= 1e-3 && moved < 1e-6 && a.unimodal,
        format!(
            "argmax(500) = {:.10}, |diff| = {err:.2e} (tol 1e-3); argmax(1000) moved {moved:.2e} (tol 1e-6)",
            a.argmax
        ),
    )
}

fn heine_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (q, n) in [(0.3, 40), (0.5, 40), (0.7, 40), (0.9, 200)] {
        let v = heine_check(q, n).unwrap();
        worst = worst.max(v.discrepancy());
        parts.push(format!("q={q}: {:.2e}", v.discrepancy()));
    }
    outcome(worst <= 1e-10, format!("{} (tol 1e-10)", parts.join(", ")))
}

fn contingency_oracle() -> Outcome {
    let mut instances = 0usize;
    let mut mismatches = 0usize;
    for rows in 1..=3usize {
        for cols in 1..=4usize {
            let mut tally: HashMap<(Vec<u32>, Vec<u32>), u64> = HashMap::new();
            for bits in 0u32..(1 << (rows * cols)) {
                let r: Vec<u32> = (0..rows)
                    .map(|i| (0..cols).filter(|&j| bits >> (i * cols + j) & 1 == 1).count() as u32)
                    .collect();
                let c: Vec<u32> = (0..cols)
                    .map(|j| (0..rows).filter(|&i| bits >> (i * cols + j) & 1 == 1).count() as u32)
                    .collect();
                *tally.entry((r, c)).or_default() += 1;
            }
            let all_r = product(rows, cols as u32);
            let all_c = product(cols, rows as u32);
            for r in &all_r {
                for c in &all_c {
                    instances += 1;
                    let brute = tally.get(&(r.clone(), c.clone())).copied().unwrap_or(0);
                    let dp = contingency_count(r, c);
                    let gr = gale_ryser_feasible(r, c);
                    if dp != BigUint::from(brute) || gr != (brute > 0) {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    outcome(
        mismatches == 0,
        format!("{instances} (r, c) instances with 2J <= 3, L <= 4; {mismatches} mismatches"),
    )
}

fn product(len: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=max).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

fn symmetry_suite() -> Outcome {
    let mut cases = Vec::new();
    for two_j in 1..=4u32 {
        for l in 2..=5usize {
            for d in [0.0, 0.25, 0.5, 0.9] {
                for m in sectors(two_j, l) {
                    let dim = sector_dimension(two_j, l, m).unwrap();
                    if dim <= 2000 && m >= 0 {
                        cases.push((two_j, l, d, m, dim));
                    }
                }
            }
        }
    }
    let results: Vec<Result<(bool, f64), String>> = cases
        .par_iter()
        .map(|&(two_j, l, d, m, dim)| {
            let p = SpinParams::new(two_j, l, d).map_err(|e| e.to_string())?;
            let stag = staggered_conjugate_spectrum_check(&p, m).map_err(|e| e.to_string())?;
            let mirror = if dim >= 2 {
                let gp = spectral_gap(&p, m, GAP_TOL).map_err(|e| e.to_string())?.gap;
                let gm = spectral_gap(&p, -m, GAP_TOL).map_err(|e| e.to_string())?.gap;
                (gp - gm).abs()
            } else {
                0.0
            };
            Ok((stag, mirror))
        })
        .collect();
    let mut stag_fail = 0;
    let mut mirror_worst: f64 = 0.0;
    for r in results {
        match r {
            Ok((s, m)) => {
                stag_fail += usize::from(!s);
                mirror_worst = mirror_worst.max(m);
            }
            Err(msg) => return outcome(false, msg),
        }
    }
    let mut zero_worst: f64 = 0.0;
    let mut lambda1_min = f64::INFINITY;
    for l in [2usize, 3, 5, 10, 25, 50, 100, 200] {
        for eta in [0.1, 0.3, 0.7, 1.0, 1.5, 2.0, 3.0] {
            for r in [(l as f64 + 1.0) / 2.0, 1.0 + 0.37 * (l - 1) as f64] {
                let ev = boson_matrix(l, eta, r).unwrap().lowest(2).unwrap();
                zero_worst = zero_worst.max(ev[0].abs());
                lambda1_min = lambda1_min.min(ev[1]);
            }
        }
    }
    outcome(
        stag_fail == 0 && mirror_worst <= 1e-9 && zero_worst <= 1e-10 && lambda1_min > 0.0,
        format!(
            "{} sectors: staggered failures {stag_fail}, max |gap(M) - gap(-M)| = {mirror_worst:.2e}; boson zero mode max |lambda0| = {zero_worst:.2e}, min lambda1 = {lambda1_min:.2e}",
            cases.len()
        ),
    )
}

fn boson_trend() -> Outcome {
    let devs: Vec<Result<f64, String>> = [2u32, 4, 6, 8]
        .par_iter()
        .map(|&two_j| {
            boson_vs_exact(two_j, 4, 0.5, 0, GAP_TOL)
                .map(|c| c.relative_deviation)
                .map_err(|e| e.to_string())
        })
        .collect();
    let mut values = Vec::new();
    for d in devs {
        match d {
            Ok(v) => values.push(v),
            Err(msg) => return outcome(false, msg),
        }
    }
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let last = *values.last().unwrap();
    outcome(
        decreasing && last <= 0.20,
        format!(
            "relative deviation for J = 1..4: {} (strictly decreasing: {decreasing}; J = 4 tol 0.20)",
            values.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("spin-1/2 exact gap", spin_half_exact_gap),
        ("frustration-free residual", frustration_free_residual),
        ("SOS bound validity", sos_bound_validity),
        ("Ising-limit tightness", ising_tightness),
        ("curvature table exact", table_reproduction),
        ("curvature finite differences", curvature_cross_check),
        ("optimal anisotropy constant", remark_constant),
        ("Heine identity", heine_identity),
        ("contingency oracle", contingency_oracle),
        ("symmetry suite", symmetry_suite),
        ("boson trend", boson_trend),
    ];
    let only: Option<usize> = std::env::var("XXZ_ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != i + 1) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        failures += usize::from(!o.pass);
        println!(
            "[{tag}] {:>2} {name}: {} ({:.1}s)",
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
