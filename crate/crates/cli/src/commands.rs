use std::fs::File;
use std::io::BufWriter;

use rayon::prelude::*;
use serde_json::{json, Value};
use xxz_core::eigensolve::{zero_threshold, FULL_SPECTRUM_MAX_DIM};
use xxz_core::ising_perturb::{centered_two_m, numeric_curvature};
use xxz_core::{
    assemble_sector, boson_matrix, boson_vs_exact, curvature_degenerate, curvature_nondegenerate, curvature_table,
    delta_and_bound, dense_spectrum, gamma_infinity, jacobi_operator, lowest_k, optimal_anisotropy_scan,
    sector_dimension, spectral_gap, CurvatureResult, GapReport, SpinParams,
};

use crate::args::{
    AnisotropyArgs, BosonArgs, CurvatureArgs, GapArgs, GapScanArgs, JacobiArgs, OptimalArgs, SosArgs, SpectrumArgs,
};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, Report, Table};

/// Sector dimension above which nothing is assembled without `--force`.
pub const MAX_SECTOR_DIM: u64 = 5_000_000;

pub fn check_sector(two_j: u32, length: usize, two_m: i32, force: bool) -> CliResult<u64> {
    let dim = sector_dimension(two_j, length, two_m)?;
    if dim > MAX_SECTOR_DIM && !force {
        return Err(xxz_core::Error::TooLarge {
            what: "sector",
            size: dim as usize,
            limit: MAX_SECTOR_DIM as usize,
            hint: "pass --force to run anyway",
        }
        .into());
    }
    Ok(dim)
}

fn spin_label(two_j: u32) -> String {
    if two_j % 2 == 0 {
        (two_j / 2).to_string()
    } else {
        format!("{two_j}/2")
    }
}

pub fn gap_json(r: &GapReport) -> Value {
    json!({
        "two_m": r.two_m,
        "dim": r.dim,
        "ground_energy": r.ground_energy,
        "gap": r.gap,
        "gap_multiplicity": r.gap_multiplicity,
        "low_eigenvalues": r.low_eigenvalues,
    })
}

fn gap_diagnostics(r: &GapReport) -> Value {
    json!({
        "two_m": r.two_m,
        "zero_threshold": r.zero_threshold,
        "norm_one": r.norm_one,
        "residual_norms": r.residual_norms,
        "iterations": r.iterations,
    })
}

fn gap_row(r: &GapReport) -> Vec<String> {
    vec![
        r.two_m.to_string(),
        r.dim.to_string(),
        fmt_f64(r.ground_energy),
        fmt_f64(r.gap),
        r.gap_multiplicity.to_string(),
    ]
}

pub fn spectrum(a: &SpectrumArgs, force: bool) -> CliResult<Report> {
    let (two_j, length) = a.chain.resolve()?;
    let delta_inv = a.anisotropy.delta_inv()?;
    let sectors = a.sector.sectors(two_j, length)?;
    if a.dump_matrix.is_some() && sectors.len() != 1 {
        return Err(CliError::usage("--dump-matrix needs a single --two-m"));
    }
    if let Some(k) = a.k {
        if k == 0 {
            return Err(CliError::usage("--k must be positive"));
        }
    }
    let params = SpinParams::new(two_j, length, delta_inv)?;
    for &m in &sectors {
        let dim = check_sector(two_j, length, m, force)?;
        if a.k.is_none() && dim as usize > FULL_SPECTRUM_MAX_DIM && !force {
            return Err(xxz_core::Error::TooLarge {
                what: "dense spectrum",
                size: dim as usize,
                limit: FULL_SPECTRUM_MAX_DIM,
                hint: "pass --k for the lowest eigenvalues or --force",
            }
            .into());
        }
    }
    let mut table = Table::new(&["two_m", "index", "eigenvalue"]);
    let mut payload = Vec::new();
    let mut diagnostics = Vec::new();
    for &m in &sectors {
        let h = assemble_sector(&params, m)?;
        if let Some(path) = &a.dump_matrix {
            h.write_triplets(&mut BufWriter::new(File::create(path)?))?;
        }
        let (values, residuals) = match a.k {
            Some(k) => {
                let r = lowest_k(&h, k.min(h.dim()), a.tol)?;
                (r.eigenvalues, Some(r.residual_norms))
            }
            None => (dense_spectrum(&h), None),
        };
        for (i, v) in values.iter().enumerate() {
            table.push(vec![m.to_string(), i.to_string(), fmt_f64(*v)]);
        }
        payload.push(json!({"two_m": m, "dim": h.dim(), "eigenvalues": values}));
        diagnostics.push(json!({
            "two_m": m,
            "zero_threshold": zero_threshold(h.norm_one()),
            "norm_one": h.norm_one(),
            "residual_norms": residuals,
        }));
    }
    Ok(Report {
        parameters: json!({
            "two_j": two_j,
            "spin": spin_label(two_j),
            "length": length,
            "delta_inv": delta_inv,
            "sectors": sectors,
            "k": a.k,
            "tol": a.tol,
            "method": if a.k.is_some() { "lanczos" } else { "dense" },
        }),
        payload: Value::Array(payload),
        diagnostics: Value::Array(diagnostics),
        table,
    })
}

pub fn gap(a: &GapArgs, force: bool) -> CliResult<Report> {
    let (two_j, length) = a.chain.resolve()?;
    let delta_inv = a.anisotropy.delta_inv()?;
    let sectors = a.sector.sectors(two_j, length)?;
    for &m in &sectors {
        check_sector(two_j, length, m, force)?;
    }
    let params = SpinParams::new(two_j, length, delta_inv)?;
    let reports = sectors
        .iter()
        .map(|&m| spectral_gap(&params, m, a.tol))
        .collect::<xxz_core::Result<Vec<_>>>()?;
    let mut table = Table::new(&["two_m", "dim", "ground_energy", "gap", "gap_multiplicity"]);
    for r in &reports {
        table.push(gap_row(r));
    }
    let payload = if reports.len() == 1 {
        gap_json(&reports[0])
    } else {
        Value::Array(reports.iter().map(gap_json).collect())
    };
    Ok(Report {
        parameters: json!({
            "two_j": two_j,
            "spin": spin_label(two_j),
            "length": length,
            "delta_inv": delta_inv,
            "sectors": sectors,
            "tol": a.tol,
        }),
        payload,
        diagnostics: Value::Array(reports.iter().map(gap_diagnostics).collect()),
        table,
    })
}

pub fn gap_scan(a: &GapScanArgs, force: bool) -> CliResult<Report> {
    let (two_j, length) = a.chain.resolve()?;
    let grid = a.grid.values()?;
    check_sector(two_j, length, a.two_m, force)?;
    let reports = grid
        .iter()
        .map(|&d| spectral_gap(&SpinParams::new(two_j, length, d)?, a.two_m, a.tol))
        .collect::<xxz_core::Result<Vec<_>>>()?;
    let mut table = Table::new(&["delta_inv", "ground_energy", "gap", "gap_multiplicity"]);
    for r in &reports {
        table.push(vec![
            fmt_f64(r.delta_inv),
            fmt_f64(r.ground_energy),
            fmt_f64(r.gap),
            r.gap_multiplicity.to_string(),
        ]);
    }
    Ok(Report {
        parameters: json!({
            "two_j": two_j,
            "spin": spin_label(two_j),
            "length": length,
            "two_m": a.two_m,
            "grid": grid,
            "tol": a.tol,
        }),
        payload: Value::Array(
            reports
                .iter()
                .map(|r| json!({"delta_inv": r.delta_inv, "ground_energy": r.ground_energy, "gap": r.gap}))
                .collect(),
        ),
        diagnostics: Value::Array(
            reports
                .iter()
                .map(|r| json!({"delta_inv": r.delta_inv, "zero_threshold": r.zero_threshold, "residual_norms": r.residual_norms}))
                .collect(),
        ),
        table,
    })
}

pub fn sos_bound(a: &SosArgs, force: bool) -> CliResult<Report> {
    let (two_j, length) = a.chain.resolve()?;
    let max = two_j * length as u32;
    let n = match (a.two_m, a.particles) {
        (Some(m), None) => {
            if m.unsigned_abs() > max || (max as i64 - m as i64) % 2 != 0 {
                return Err(CliError::usage(format!("--two-m {m} is not a sector")));
            }
            ((max as i64 - m as i64) / 2) as u32
        }
        (None, Some(n)) if n <= max => n,
        (None, Some(n)) => return Err(CliError::usage(format!("--particles {n} exceeds 2JL = {max}"))),
        _ => return Err(CliError::usage("give exactly one of --two-m or --particles")),
    };
    let two_m = max as i32 - 2 * n as i32;
    let grid = match (a.delta, a.delta_inv) {
        (None, None) => a.grid.values()?,
        (d, di) => vec![AnisotropyArgs { delta: d, delta_inv: di }.delta_inv()?],
    };
    if a.with_gap {
        check_sector(two_j, length, two_m, force)?;
    }
    let rows: Vec<(xxz_core::SosGapBound, Option<GapReport>)> = grid
        .par_iter()
        .map(|&d| -> CliResult<_> {
            let b = delta_and_bound(length, two_j, n, d)?;
            let g = if a.with_gap {
                Some(spectral_gap(&SpinParams::new(two_j, length, d)?, two_m, a.tol)?)
            } else {
                None
            };
            Ok((b, g))
        })
        .collect::<CliResult<_>>()?;
    let mut table = Table::new(&["delta_inv", "delta", "one_minus_delta", "bound", "gap"]);
    for (b, g) in &rows {
        table.push(vec![
            fmt_f64(b.delta_inv),
            fmt_f64(b.delta),
            fmt_f64(b.one_minus_delta()),
            fmt_f64(b.bound),
            g.as_ref().map(|g| fmt_f64(g.gap)).unwrap_or_default(),
        ]);
    }
    Ok(Report {
        parameters: json!({
            "two_j": two_j,
            "spin": spin_label(two_j),
            "length": length,
            "particles": n,
            "two_m": two_m,
            "grid": grid,
            "with_gap": a.with_gap,
            "tol": a.tol,
        }),
        payload: Value::Array(
            rows.iter()
                .map(|(b, g)| {
                    json!({
                        "delta_inv": b.delta_inv,
                        "q": b.q,
                        "delta": b.delta,
                        "one_minus_delta": b.one_minus_delta(),
                        "bound": b.bound,
                        "gap": g.as_ref().map(|g| g.gap),
                    })
                })
                .collect(),
        ),
        diagnostics: json!({
            "partitions": rows.first().map(|(b, _)| b.partitions),
            "top_eigenvalues": rows.iter().map(|(b, _)| b.top_eigenvalue).collect::<Vec<_>>(),
            "gap_zero_thresholds": rows.iter().map(|(_, g)| g.as_ref().map(|g| g.zero_threshold)).collect::<Vec<_>>(),
        }),
        table,
    })
}

fn rational(c: &CurvatureResult) -> String {
    match c.curvature {
        Some(r) if *r.denom() == 1 => r.numer().to_string(),
        Some(r) => format!("{}/{}", r.numer(), r.denom()),
        None => "-inf".into(),
    }
}

fn curvature_json(c: &CurvatureResult) -> Value {
    json!({
        "two_j": c.two_j,
        "spin": spin_label(c.two_j),
        "n": c.n,
        "curvature": rational(c),
        "value": c.value,
        "second_derivative": c.second_derivative(),
        "degenerate": c.degenerate,
        "infinite": c.infinite,
    })
}

pub fn curvature(a: &CurvatureArgs, force: bool) -> CliResult<Report> {
    if a.table {
        if a.max_two_j == 0 || a.max_two_j > 40 {
            return Err(CliError::usage("--max-two-j must lie in 1..=40"));
        }
        let entries = curvature_table(a.max_two_j);
        let width = a.max_two_j / 2 + 1;
        let mut header = vec!["J".to_string()];
        header.extend((0..width).map(|n| format!("n={n}")));
        let mut table = Table { header, rows: Vec::new() };
        for two_j in 1..=a.max_two_j {
            let mut row = vec![spin_label(two_j)];
            row.extend((0..width).map(|n| {
                entries
                    .iter()
                    .find(|c| c.two_j == two_j && c.n == n)
                    .map(rational)
                    .unwrap_or_default()
            }));
            table.push(row);
        }
        return Ok(Report {
            parameters: json!({"table": true, "max_two_j": a.max_two_j}),
            payload: Value::Array(entries.iter().map(curvature_json).collect()),
            diagnostics: json!({"scale": "coefficient of delta_inv^2; second_derivative is twice it"}),
            table,
        });
    }
    let two_j = match (a.two_j, &a.spin) {
        (Some(t), None) if t > 0 => t,
        (None, Some(s)) => crate::args::parse_spin(s)?,
        _ => return Err(CliError::usage("give --table, or --two-j/--spin with --n")),
    };
    let n = a.n.ok_or_else(|| CliError::usage("--n is required for a single entry"))?;
    if 2 * n > two_j {
        return Err(CliError::usage(format!("--n {n} exceeds J = {}", spin_label(two_j))));
    }
    let entry = if 2 * n == two_j {
        curvature_degenerate(two_j)
    } else {
        curvature_nondegenerate(two_j, n)
    };
    let entry = match entry {
        Ok(c) => c,
        Err(xxz_core::Error::InfiniteDegeneracy { .. }) => curvature_table(two_j)
            .into_iter()
            .find(|c| c.two_j == two_j && c.n == n)
            .ok_or_else(|| CliError::usage("no such table entry"))?,
        Err(e) => return Err(e.into()),
    };
    let mut payload = curvature_json(&entry);
    let mut numeric = None;
    if let Some(length) = a.numeric_length {
        let two_m = centered_two_m(two_j, length, n)?;
        check_sector(two_j, length, two_m, force)?;
        let d2 = numeric_curvature(two_j, length, two_m, a.h, a.tol)?;
        payload["numeric_second_derivative"] = json!(d2);
        payload["numeric_two_m"] = json!(two_m);
        numeric = Some(d2);
    }
    let mut table = Table::new(&["J", "n", "curvature", "value", "second_derivative", "numeric_second_derivative"]);
    table.push(vec![
        spin_label(two_j),
        n.to_string(),
        rational(&entry),
        fmt_f64(entry.value),
        fmt_f64(entry.second_derivative()),
        numeric.map(fmt_f64).unwrap_or_default(),
    ]);
    Ok(Report {
        parameters: json!({
            "two_j": two_j,
            "n": n,
            "numeric_length": a.numeric_length,
            "h": a.h,
            "tol": a.tol,
        }),
        payload,
        diagnostics: json!({"scale": "coefficient of delta_inv^2; second_derivative is twice it"}),
        table,
    })
}

pub fn boson(a: &BosonArgs, force: bool) -> CliResult<Report> {
    let (two_j, length) = a.chain.resolve()?;
    let delta_inv = a.anisotropy.delta_inv()?;
    check_sector(two_j, length, a.two_m, force)?;
    let c = boson_vs_exact(two_j, length, delta_inv, a.two_m, a.tol)?;
    let coupling = boson_matrix(length, c.eta, c.r)?;
    let energies = coupling.lowest(a.k.clamp(1, length))?;
    let mut table = Table::new(&["index", "boson_energy", "multiple_of_lambda1"]);
    for (i, e) in energies.iter().enumerate() {
        table.push(vec![i.to_string(), fmt_f64(*e), fmt_f64(i as f64 * c.lambda1)]);
    }
    Ok(Report {
        parameters: json!({
            "two_j": two_j,
            "spin": spin_label(two_j),
            "length": length,
            "delta_inv": delta_inv,
            "two_m": a.two_m,
            "k": a.k,
            "tol": a.tol,
        }),
        payload: json!({
            "exact_gap": c.exact_gap,
            "exact_gap_over_j": c.exact_gap_over_j,
            "lambda1": c.lambda1,
            "relative_deviation": c.relative_deviation,
            "boson_energies": energies,
        }),
        diagnostics: json!({
            "mu": c.mu,
            "eta": c.eta,
            "r": c.r,
            "zero_mode_eigenvalue": energies[0],
        }),
        table,
    })
}

pub fn jacobi(a: &JacobiArgs) -> CliResult<Report> {
    let delta_inv = a.anisotropy.delta_inv()?;
    if delta_inv == 0.0 {
        return Err(CliError::usage("the Jacobi operator needs Δ⁻¹ > 0"));
    }
    let g = gamma_infinity(a.mu, delta_inv, a.truncation, a.tol)?;
    let op = jacobi_operator(a.truncation, g.eta, g.r)?;
    let low = op.lowest(a.k.clamp(2, a.truncation))?;
    let mut table = Table::new(&["index", "eigenvalue"]);
    for (i, e) in low.iter().enumerate() {
        table.push(vec![i.to_string(), fmt_f64(*e)]);
    }
    Ok(Report {
        parameters: json!({
            "mu": a.mu,
            "delta_inv": delta_inv,
            "truncation": a.truncation,
            "k": a.k,
            "tol": a.tol,
        }),
        payload: json!({
            "gamma_infinity": g.gamma,
            "eigenvalues": low,
            "r": g.r,
            "eta": g.eta,
        }),
        diagnostics: json!({
            "lambda0": g.lambda0,
            "first_site": op.first_site,
            "gamma_doubled_truncation": g.gamma_doubled,
            "doubling_change": g.doubling_change,
            "doubling_converged": g.doubling_converged,
        }),
        table,
    })
}

pub fn optimal_delta(a: &OptimalArgs) -> CliResult<Report> {
    if a.truncation < 3 {
        return Err(CliError::usage("--truncation must be at least 3"));
    }
    let o = optimal_anisotropy_scan(a.truncation, a.grid, a.refine_tol)?;
    let mut table = Table::new(&["kind", "delta_inv", "gamma"]);
    table.push(vec!["argmax".into(), fmt_f64(o.argmax), fmt_f64(o.gamma_max)]);
    for (x, g) in &o.local_maxima {
        table.push(vec!["local_max".into(), fmt_f64(*x), fmt_f64(*g)]);
    }
    for (x, g) in &o.samples {
        table.push(vec!["sample".into(), fmt_f64(*x), fmt_f64(*g)]);
    }
    Ok(Report {
        parameters: json!({
            "truncation": a.truncation,
            "grid": a.grid,
            "refine_tol": a.refine_tol,
        }),
        payload: json!({
            "argmax_delta_inv": o.argmax,
            "argmax_delta": 1.0 / o.argmax,
            "gamma_max": o.gamma_max,
        }),
        diagnostics: json!({
            "local_maxima": o.local_maxima,
            "unimodal": o.unimodal,
            "samples": o.samples,
        }),
        table,
    })
}
