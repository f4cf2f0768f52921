//! Datasets behind the figures. Each writes `figN.csv` and a `figN.json` sidecar.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};
use xxz_core::eigensolve::FULL_SPECTRUM_MAX_DIM;
use xxz_core::spin::eta_from_delta_inv;
use xxz_core::{
    assemble_sector, boson_matrix, boson_vs_exact, delta_and_bound, full_spectrum, jacobi_operator, spectral_gap,
    SpinParams,
};

use crate::args::{grid, FiguresArgs, Which};
use crate::commands::check_sector;
use crate::error::CliResult;
use crate::output::{fmt_f64, write_json, Table};

/// `(2J, L, Δ)` for the four spectra.
pub const FIG1_SETS: [(u32, usize, f64); 4] = [(1, 10, 2.0), (2, 7, 4.0), (3, 6, 4.0), (4, 5, 8.0)];

/// `(2J, n, L)` for the bound panels.
pub const FIG2_SETS: [(u32, u32, usize); 8] = [
    (7, 1, 4),
    (4, 0, 6),
    (8, 1, 4),
    (5, 0, 5),
    (6, 0, 4),
    (7, 0, 4),
    (8, 0, 4),
    (9, 0, 3),
];

pub const FIG3_TWO_J: [u32; 4] = [2, 4, 6, 8];
pub const FIG3_LENGTH: usize = 4;
pub const BOSON_LENGTH: usize = 50;

struct Dataset {
    name: &'static str,
    parameters: Value,
    table: Table,
}

fn interior_grid(points: usize) -> CliResult<Vec<f64>> {
    let step = 1.0 / (points + 1) as f64;
    grid(step, 1.0 - step, points)
}

fn fig1(force: bool) -> CliResult<Dataset> {
    let mut table = Table::new(&["two_j", "length", "delta", "two_m", "index", "eigenvalue"]);
    for &(two_j, length, delta) in &FIG1_SETS {
        let params = SpinParams::from_delta(two_j, length, delta)?;
        let max = (two_j * length as u32) as i32;
        let sectors: Vec<i32> = (0..=max).map(|k| -max + 2 * k).collect();
        for &m in &sectors {
            check_sector(two_j, length, m, force)?;
        }
        let spectra = sectors
            .par_iter()
            .map(|&m| full_spectrum(&assemble_sector(&params, m)?))
            .collect::<xxz_core::Result<Vec<_>>>()?;
        for (&m, values) in sectors.iter().zip(&spectra) {
            for (i, v) in values.iter().enumerate() {
                table.push(vec![
                    two_j.to_string(),
                    length.to_string(),
                    fmt_f64(delta),
                    m.to_string(),
                    i.to_string(),
                    fmt_f64(*v),
                ]);
            }
        }
    }
    Ok(Dataset {
        name: "fig1",
        parameters: json!({
            "sets": FIG1_SETS.iter().map(|&(t, l, d)| json!({"two_j": t, "length": l, "delta": d})).collect::<Vec<_>>(),
            "sectors": "all",
            "method": "dense",
            "dense_limit": FULL_SPECTRUM_MAX_DIM,
        }),
        table,
    })
}

fn fig2(points: usize, tol: f64, force: bool) -> CliResult<Dataset> {
    let xs = interior_grid(points)?;
    let mut table = Table::new(&[
        "two_j",
        "n",
        "length",
        "particles",
        "two_m",
        "delta_inv",
        "one_minus_delta",
        "bound",
        "gap",
    ]);
    for &(two_j, n, length) in &FIG2_SETS {
        let particles = two_j * (length as u32 / 2) + n;
        let two_m = (two_j * length as u32) as i32 - 2 * particles as i32;
        check_sector(two_j, length, two_m, force)?;
        let rows = xs
            .par_iter()
            .map(|&d| -> CliResult<_> {
                let b = delta_and_bound(length, two_j, particles, d)?;
                let g = spectral_gap(&SpinParams::new(two_j, length, d)?, two_m, tol)?;
                Ok((b, g.gap))
            })
            .collect::<CliResult<Vec<_>>>()?;
        for (b, gap) in rows {
            table.push(vec![
                two_j.to_string(),
                n.to_string(),
                length.to_string(),
                particles.to_string(),
                two_m.to_string(),
                fmt_f64(b.delta_inv),
                fmt_f64(b.one_minus_delta()),
                fmt_f64(b.bound),
                fmt_f64(gap),
            ]);
        }
    }
    Ok(Dataset {
        name: "fig2",
        parameters: json!({
            "sets": FIG2_SETS.iter().map(|&(t, n, l)| json!({"two_j": t, "n": n, "length": l})).collect::<Vec<_>>(),
            "particles": "2J*floor(L/2) + n",
            "grid": xs,
            "tol": tol,
        }),
        table,
    })
}

fn fig3(points: usize, tol: f64, force: bool) -> CliResult<Dataset> {
    let xs = interior_grid(points)?;
    let two_m = 0;
    let mut table = Table::new(&["two_j", "length", "two_m", "delta_inv", "exact_gap_over_j", "lambda1", "relative_deviation"]);
    for &two_j in &FIG3_TWO_J {
        check_sector(two_j, FIG3_LENGTH, two_m, force)?;
        let rows = xs
            .par_iter()
            .map(|&d| boson_vs_exact(two_j, FIG3_LENGTH, d, two_m, tol))
            .collect::<xxz_core::Result<Vec<_>>>()?;
        for c in rows {
            table.push(vec![
                two_j.to_string(),
                FIG3_LENGTH.to_string(),
                two_m.to_string(),
                fmt_f64(c.delta_inv),
                fmt_f64(c.exact_gap_over_j),
                fmt_f64(c.lambda1),
                fmt_f64(c.relative_deviation),
            ]);
        }
    }
    Ok(Dataset {
        name: "fig3",
        parameters: json!({"two_j": FIG3_TWO_J, "length": FIG3_LENGTH, "two_m": two_m, "grid": xs, "tol": tol}),
        table,
    })
}

fn fig4(points: usize, truncation: usize) -> CliResult<Dataset> {
    let ds = interior_grid(points)?;
    let rs: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let cells: Vec<(f64, f64)> = rs.iter().flat_map(|&r| ds.iter().map(move |&d| (r, d))).collect();
    let values = cells
        .par_iter()
        .map(|&(r, d)| {
            let low = jacobi_operator(truncation, eta_from_delta_inv(d), r)?.lowest(2)?;
            Ok((low[0], low[1]))
        })
        .collect::<xxz_core::Result<Vec<_>>>()?;
    let mut table = Table::new(&["r", "delta_inv", "gamma_infinity", "lambda0"]);
    for (&(r, d), &(l0, g)) in cells.iter().zip(&values) {
        table.push(vec![fmt_f64(r), fmt_f64(d), fmt_f64(g), fmt_f64(l0)]);
    }
    Ok(Dataset {
        name: "fig4",
        parameters: json!({"r_grid": rs, "delta_inv_grid": ds, "truncation": truncation}),
        table,
    })
}

fn boson_spectra(points: usize) -> CliResult<(Vec<f64>, Vec<Vec<f64>>)> {
    let xs = interior_grid(points)?;
    let r = (BOSON_LENGTH as f64 + 1.0) / 2.0;
    let spectra = xs
        .par_iter()
        .map(|&d| boson_matrix(BOSON_LENGTH, eta_from_delta_inv(d), r)?.eigenvalues())
        .collect::<xxz_core::Result<Vec<_>>>()?;
    Ok((xs, spectra))
}

fn fig5(points: usize) -> CliResult<Dataset> {
    let (xs, spectra) = boson_spectra(points)?;
    let mut table = Table::new(&["delta_inv", "index", "lambda"]);
    for (d, s) in xs.iter().zip(&spectra) {
        for (i, v) in s.iter().enumerate() {
            table.push(vec![fmt_f64(*d), i.to_string(), fmt_f64(*v)]);
        }
    }
    Ok(Dataset {
        name: "fig5",
        parameters: json!({"length": BOSON_LENGTH, "r": "(L+1)/2", "grid": xs}),
        table,
    })
}

fn fig6(points: usize) -> CliResult<Dataset> {
    let (xs, spectra) = boson_spectra(points)?;
    let mut table = Table::new(&["delta_inv", "curve", "value"]);
    for (d, s) in xs.iter().zip(&spectra) {
        for (i, v) in s.iter().enumerate() {
            table.push(vec![fmt_f64(*d), format!("lambda{i}"), fmt_f64(*v)]);
        }
        for k in 2..=4 {
            table.push(vec![fmt_f64(*d), format!("{k}*lambda1"), fmt_f64(k as f64 * s[1])]);
        }
    }
    Ok(Dataset {
        name: "fig6",
        parameters: json!({"length": BOSON_LENGTH, "r": "(L+1)/2", "grid": xs, "multiples": [2, 3, 4]}),
        table,
    })
}

/// Writes the requested datasets into `dir` and returns a summary.
pub fn figures(a: &FiguresArgs, dir: &Path, force: bool) -> CliResult<Value> {
    if a.points == 0 {
        return Err(crate::error::CliError::usage("--points must be positive"));
    }
    let wanted: Vec<Which> = match a.which {
        Which::All => vec![Which::One, Which::Two, Which::Three, Which::Four, Which::Five, Which::Six],
        w => vec![w],
    };
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for w in wanted {
        let set = match w {
            Which::One => fig1(force)?,
            Which::Two => fig2(a.points, a.tol, force)?,
            Which::Three => fig3(a.points, a.tol, force)?,
            Which::Four => fig4(a.points, a.truncation)?,
            Which::Five => fig5(a.points)?,
            Which::Six => fig6(a.points)?,
            Which::All => unreachable!(),
        };
        let csv_path = dir.join(format!("{}.csv", set.name));
        let json_path = dir.join(format!("{}.json", set.name));
        set.table.write(&mut BufWriter::new(File::create(&csv_path)?))?;
        let sidecar = json!({
            "figure": set.name,
            "version": env!("CARGO_PKG_VERSION"),
            "parameters": set.parameters,
            "columns": set.table.header,
            "rows": set.table.rows.len(),
        });
        write_json(&mut BufWriter::new(File::create(&json_path)?), &sidecar)?;
        written.push(json!({
            "figure": set.name,
            "csv": csv_path.display().to_string(),
            "sidecar": json_path.display().to_string(),
            "rows": set.table.rows.len(),
        }));
    }
    Ok(Value::Array(written))
}
