//! Second-order perturbation of the gap around the Ising limit.
//!
//! Curvatures here are the coefficient `c` in `γ(Δ⁻¹) = γ(0) + c·Δ⁻² + O(Δ⁻⁴)`,
//! so `d²γ/d(Δ⁻¹)²` at zero is `2c`. Finite differences are compared on that
//! second-derivative scale.

use num_rational::Rational64;
use num_traits::ToPrimitive;

use crate::eigensolve::spectral_gap;
use crate::error::{domain, Error, Result};
use crate::spin::SpinParams;

/// Ising-limit curvature for one `(J, n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureResult {
    pub two_j: u32,
    pub n: u32,
    /// Exact coefficient of `Δ⁻²`; `None` when infinite.
    pub curvature: Option<Rational64>,
    /// Float form of `curvature` (`−∞` for the infinite cases).
    pub value: f64,
    pub degenerate: bool,
    pub infinite: bool,
}

impl CurvatureResult {
    /// `d²γ/d(Δ⁻¹)²` at `Δ⁻¹ = 0`.
    pub fn second_derivative(&self) -> f64 {
        2.0 * self.value
    }

    fn infinite(two_j: u32, n: u32, degenerate: bool) -> Self {
        Self {
            two_j,
            n,
            curvature: None,
            value: f64::NEG_INFINITY,
            degenerate,
            infinite: true,
        }
    }

    fn finite(two_j: u32, n: u32, c: Rational64, degenerate: bool) -> Self {
        Self {
            two_j,
            n,
            curvature: Some(c),
            value: c.to_f64().unwrap_or(f64::NAN),
            degenerate,
            infinite: false,
        }
    }
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// `J − n/2 + (J+1)(2J−1)/(n+3) − 2J²/(2J−n−1)` for `0 ≤ n < J`.
pub fn curvature_nondegenerate(two_j: u32, n: u32) -> Result<CurvatureResult> {
    if two_j == 0 {
        return domain("two_j must be positive");
    }
    if 2 * n >= two_j {
        return domain(format!(
            "n = {n} is not below J = {}/2; the case n = J is degenerate",
            two_j
        ));
    }
    let (tj, n) = (two_j as i64, n as i64);
    if tj - n - 1 == 0 {
        return Err(Error::InfiniteDegeneracy {
            two_j,
            n: n as u32,
        });
    }
    let j = r(tj, 2);
    let c = j - r(n, 2) + (j + 1) * (r(tj, 1) - 1) / r(n + 3, 1) - r(2, 1) * j * j / r(tj - n - 1, 1);
    Ok(CurvatureResult::finite(two_j, n as u32, c, false))
}

/// Lowest branch `−8 − 3/(J−1) − J/2 + 14/(J+3)` for integer `J ≥ 2`, `n = J`.
pub fn curvature_degenerate(two_j: u32) -> Result<CurvatureResult> {
    if two_j % 2 != 0 || two_j == 0 {
        return domain(format!(
            "degenerate case needs integer J, got two_j = {two_j}"
        ));
    }
    let j = (two_j / 2) as i64;
    if j == 1 {
        return Err(Error::InfiniteDegeneracy { two_j, n: 1 });
    }
    let c = r(-8, 1) - r(3, j - 1) - r(j, 2) + r(14, j + 3);
    Ok(CurvatureResult::finite(two_j, j as u32, c, true))
}

/// Unperturbed energy `n + 1` of the first excitation.
pub fn ising_excitation_energy(n: u32) -> u32 {
    n + 1
}

/// Every `(J, n)` with `two_j ≤ max_two_j`, `0 ≤ n ≤ ⌊J⌋`, infinite entries flagged.
pub fn curvature_table(max_two_j: u32) -> Vec<CurvatureResult> {
    let mut out = Vec::new();
    for two_j in 1..=max_two_j {
        for n in 0..=two_j / 2 {
            let degenerate = two_j % 2 == 0 && 2 * n == two_j;
            let entry = if degenerate {
                curvature_degenerate(two_j)
            } else {
                curvature_nondegenerate(two_j, n)
            };
            out.push(match entry {
                Ok(c) => c,
                Err(_) => CurvatureResult::infinite(two_j, n, degenerate),
            });
        }
    }
    out
}

/// `2·two_m` of the sector whose Ising ground state is
/// `−J, …, −J, −J+n, J, …, J` with the partial site at `⌈L/2⌉`.
pub fn centered_two_m(two_j: u32, length: usize, n: u32) -> Result<i32> {
    if 2 * n > two_j {
        return domain(format!("n = {n} exceeds J = {two_j}/2"));
    }
    if length < 2 {
        return domain("chain length must be at least 2");
    }
    let k = length.div_ceil(2) as i32 - 1;
    Ok(two_j as i32 * (length as i32 - 2 * k - 2) + 2 * n as i32)
}

/// `2(γ(h) − γ(0))/h²`, which estimates `d²γ/d(Δ⁻¹)²` because `γ` is even in `Δ⁻¹`.
pub fn numeric_curvature(two_j: u32, length: usize, two_m: i32, h: f64, tol: f64) -> Result<f64> {
    if !(h > 0.0 && h <= 0.05) {
        return domain(format!("h must lie in (0, 0.05], got {h}"));
    }
    let g0 = spectral_gap(&SpinParams::new(two_j, length, 0.0)?, two_m, tol)?.gap;
    let gh = spectral_gap(&SpinParams::new(two_j, length, h)?, two_m, tol)?.gap;
    Ok(2.0 * (gh - g0) / (h * h))
}

/// Finite differences at `h` and `h/2` against the analytic second derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RichardsonReport {
    pub h: f64,
    pub coarse: f64,
    pub fine: f64,
    /// `(4·fine − coarse)/3`.
    pub extrapolated: f64,
    pub analytic: f64,
    /// `log₂(|coarse − analytic| / |fine − analytic|)`.
    pub observed_order: f64,
}

pub fn richardson_check(
    two_j: u32,
    length: usize,
    two_m: i32,
    analytic: f64,
    h: f64,
    tol: f64,
) -> Result<RichardsonReport> {
    let coarse = numeric_curvature(two_j, length, two_m, h, tol)?;
    let fine = numeric_curvature(two_j, length, two_m, h / 2.0, tol)?;
    Ok(RichardsonReport {
        h,
        coarse,
        fine,
        extrapolated: (4.0 * fine - coarse) / 3.0,
        analytic,
        observed_order: ((coarse - analytic).abs() / (fine - analytic).abs()).log2(),
    })
}
