//! Large-J asymptotics: interface phase, boson coupling matrix and the
//! Jacobi operator whose gap is the conjectured `J → ∞` limit.

use rayon::prelude::*;

use crate::eigensolve::spectral_gap;
use crate::error::{domain, Error, Result};
use crate::ground_state::NeumaierSum;
use crate::spin::{eta_from_delta_inv, SpinParams};
use crate::tridiag;

/// `cosh(a)/cosh(b)` without overflow.
fn cosh_ratio(a: f64, b: f64) -> f64 {
    let (a, b) = (a.abs(), b.abs());
    (a - b).exp() * (1.0 + (-2.0 * a).exp()) / (1.0 + (-2.0 * b).exp())
}

fn sech(x: f64) -> f64 {
    let x = x.abs();
    2.0 * (-x).exp() / (1.0 + (-2.0 * x).exp())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta.is_finite()) {
        return domain(format!("eta must be positive and finite, got {eta}"));
    }
    Ok(())
}

/// Domain-wall position `r` solving `Σ_{k=−w+1}^{w} tanh(η(k−r)) = μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfacePhase {
    pub mu: f64,
    pub r: f64,
    pub eta: f64,
    pub window: usize,
    /// `|Σ tanh − μ|` at the returned `r`.
    pub residual: f64,
    /// Geometric bound on the contribution of sites beyond the window.
    pub tail_bound: f64,
}

fn bisect_decreasing(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (flo, fhi) = (f(lo), f(hi));
    if (flo - target).abs() <= (fhi - target).abs() {
        lo
    } else {
        hi
    }
}

fn tanh_sum(eta: f64, r: f64, sites: impl Iterator<Item = i64>) -> f64 {
    let mut s = NeumaierSum::default();
    for k in sites {
        s.add((eta * (k as f64 - r)).tanh());
    }
    s.value()
}

/// Solves for `r` on the symmetric window `[−w+1, w]` by monotone bisection.
pub fn solve_interface_phase(mu: f64, eta: f64, window: usize, tol: f64) -> Result<InterfacePhase> {
    check_eta(eta)?;
    if window == 0 {
        return domain("window must be positive");
    }
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let w = window as i64;
    if !(mu.abs() < 2.0 * window as f64) {
        return Err(Error::EnlargeWindow { mu, window });
    }
    let f = |r: f64| tanh_sum(eta, r, -w + 1..=w);
    let mut span = 1.0;
    let (mut lo, mut hi) = (-(w as f64), w as f64 + 1.0);
    while !(f(lo) >= mu && f(hi) <= mu) {
        span *= 2.0;
        if span > 1e6 {
            return Err(Error::EnlargeWindow { mu, window });
        }
        lo = -(w as f64) - span;
        hi = w as f64 + 1.0 + span;
    }
    let r = bisect_decreasing(f, mu, lo, hi);
    let residual = (f(r) - mu).abs();
    let (left, right) = (w as f64 + r, w as f64 + 1.0 - r);
    if left <= 0.0 || right <= 0.0 {
        return Err(Error::EnlargeWindow { mu, window });
    }
    let tail_bound =
        2.0 * ((-2.0 * eta * left).exp() + (-2.0 * eta * right).exp()) / -(-2.0 * eta).exp_m1();
    if tail_bound >= tol || residual > tol {
        return Err(Error::EnlargeWindow { mu, window });
    }
    Ok(InterfacePhase {
        mu,
        r,
        eta,
        window,
        residual,
        tail_bound,
    })
}

/// `r` with `Σ_{α=1}^{L} tanh(η(α−r)) = μ` on a finite chain.
pub fn solve_chain_phase(mu: f64, eta: f64, length: usize) -> Result<f64> {
    check_eta(eta)?;
    if !(mu.abs() < length as f64) {
        return domain(format!("|mu| = {} must be below L = {length}", mu.abs()));
    }
    let f = |r: f64| tanh_sum(eta, r, 1..=length as i64);
    let (mut lo, mut hi) = (0.0, length as f64 + 1.0);
    let mut span = 1.0;
    while !(f(lo) >= mu && f(hi) <= mu) {
        span *= 2.0;
        if span > 1e6 {
            return domain(format!("mu = {mu} is numerically saturated for L = {length}"));
        }
        lo = -span;
        hi = length as f64 + 1.0 + span;
    }
    Ok(bisect_decreasing(f, mu, lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// The coupling matrix `𝒥` on sites `1..=L`.
    BosonJ,
    /// The truncated Jacobi operator `A`.
    JacobiA,
}

/// Real symmetric tridiagonal operator on consecutive sites.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    pub kind: OperatorKind,
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
    pub eta: f64,
    pub r: f64,
    /// Lattice label of the first row.
    pub first_site: i64,
}

impl TridiagonalOperator {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.dim() as i64).map(move |i| self.first_site + i)
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        tridiag::eigenvalues(&self.diag, &self.offdiag)
    }

    /// The `count` smallest eigenvalues, ascending.
    pub fn lowest(&self, count: usize) -> Result<Vec<f64>> {
        tridiag::lowest_eigenvalues(&self.diag, &self.offdiag, count)
    }

    pub fn norm_one(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: x.len(),
            });
        }
        Ok((0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.offdiag[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.offdiag[i] * x[i + 1];
                }
                y
            })
            .collect())
    }
}

/// Coupling matrix `𝒥` on sites `1..=L`; `Δ⁻¹ = sech η`.
pub fn boson_matrix(length: usize, eta: f64, r: f64) -> Result<TridiagonalOperator> {
    check_eta(eta)?;
    if length < 2 {
        return domain("the boson matrix needs L ≥ 2");
    }
    let s = sech(eta);
    let diag = (1..=length)
        .map(|a| {
            let x = eta * (a as f64 - r);
            let mut d = 0.0;
            if a < length {
                d += cosh_ratio(x, x + eta);
            }
            if a > 1 {
                d += cosh_ratio(x, x - eta);
            }
            s * d
        })
        .collect();
    Ok(TridiagonalOperator {
        kind: OperatorKind::BosonJ,
        diag,
        offdiag: vec![-s; length - 1],
        eta,
        r,
        first_site: 1,
    })
}

/// The zero mode `v_α = sech(η(α−r))` of `𝒥` (unnormalized).
pub fn boson_zero_mode(length: usize, eta: f64, r: f64) -> Vec<f64> {
    (1..=length).map(|a| sech(eta * (a as f64 - r))).collect()
}

/// `2 − 4sinh²η / (cosh(2η(n−r)) + cosh 2η)`.
pub fn jacobi_diagonal(n: f64, eta: f64, r: f64) -> f64 {
    // divide through by cosh 2η so nothing overflows
    let ratio = cosh_ratio(2.0 * eta * (n - r), 2.0 * eta);
    2.0 - 2.0 * (1.0 - sech(2.0 * eta)) / (ratio + 1.0)
}

/// Jacobi operator `A` truncated to `N` consecutive sites centred on `r`, open ends.
pub fn jacobi_operator(truncation: usize, eta: f64, r: f64) -> Result<TridiagonalOperator> {
    check_eta(eta)?;
    if truncation < 3 {
        return domain("the Jacobi truncation needs N ≥ 3");
    }
    let first_site = (r - (truncation as f64 - 1.0) / 2.0 + 0.5).floor() as i64;
    let diag = (0..truncation as i64)
        .map(|i| jacobi_diagonal((first_site + i) as f64, eta, r))
        .collect();
    Ok(TridiagonalOperator {
        kind: OperatorKind::JacobiA,
        diag,
        offdiag: vec![-sech(eta); truncation - 1],
        eta,
        r,
        first_site,
    })
}

/// `γ∞(μ, Δ)` from a truncated Jacobi operator, with a doubling check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaInfinity {
    pub mu: f64,
    pub delta_inv: f64,
    pub eta: f64,
    pub r: f64,
    pub truncation: usize,
    /// Lowest eigenvalue of the truncated operator (approximate zero mode).
    pub lambda0: f64,
    pub gamma: f64,
    /// Same quantity at twice the truncation.
    pub gamma_doubled: f64,
    pub doubling_change: f64,
    /// Whether doubling the truncation moved `gamma` by less than the tolerance.
    pub doubling_converged: bool,
}

pub fn gamma_infinity(mu: f64, delta_inv: f64, truncation: usize, tol: f64) -> Result<GammaInfinity> {
    if !(delta_inv > 0.0 && delta_inv < 1.0) {
        return domain(format!("delta_inv must lie in (0, 1), got {delta_inv}"));
    }
    let eta = eta_from_delta_inv(delta_inv);
    let phase = solve_interface_phase(mu, eta, truncation.max(8), tol)?;
    let low = jacobi_operator(truncation, eta, phase.r)?.lowest(2)?;
    if low[0].abs() > tol {
        return Err(Error::Consistency(format!(
            "truncated Jacobi operator has lowest eigenvalue {:e} > {tol:e}; enlarge the truncation",
            low[0]
        )));
    }
    let doubled = jacobi_operator(2 * truncation, eta, phase.r)?.lowest(2)?;
    let change = (doubled[1] - low[1]).abs();
    Ok(GammaInfinity {
        mu,
        delta_inv,
        eta,
        r: phase.r,
        truncation,
        lambda0: low[0],
        gamma: low[1],
        gamma_doubled: doubled[1],
        doubling_change: change,
        doubling_converged: change < tol,
    })
}

/// Gap of the truncated Jacobi operator at `μ = 0` (`r = 1/2`).
pub fn symmetric_gamma(delta_inv: f64, truncation: usize) -> Result<f64> {
    let eta = eta_from_delta_inv(delta_inv);
    Ok(jacobi_operator(truncation, eta, 0.5)?.lowest(2)?[1])
}

/// Result of maximizing `γ∞(0, Δ⁻¹)` over `Δ⁻¹ ∈ (0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalAnisotropy {
    pub truncation: usize,
    pub argmax: f64,
    pub gamma_max: f64,
    /// Every refined local maximum `(Δ⁻¹, γ)`, in increasing `Δ⁻¹`.
    pub local_maxima: Vec<(f64, f64)>,
    pub unimodal: bool,
    /// Coarse grid samples `(Δ⁻¹, γ)`.
    pub samples: Vec<(f64, f64)>,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn golden_max(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Grid scan plus golden-section refinement of every local maximum.
pub fn optimal_anisotropy_scan(truncation: usize, grid: usize, refine_tol: f64) -> Result<OptimalAnisotropy> {
    if grid < 3 {
        return domain("the grid needs at least 3 points");
    }
    if !(refine_tol > 0.0 && refine_tol < 0.1) {
        return domain(format!("refine_tol must lie in (0, 0.1), got {refine_tol}"));
    }
    let xs: Vec<f64> = (1..=grid).map(|i| i as f64 / (grid + 1) as f64).collect();
    let samples: Vec<(f64, f64)> = xs
        .par_iter()
        .map(|&x| symmetric_gamma(x, truncation).map(|g| (x, g)))
        .collect::<Result<_>>()?;
    let step = 1.0 / (grid + 1) as f64;
    let mut peaks = Vec::new();
    for i in 0..grid {
        let g = samples[i].1;
        let left = if i > 0 { samples[i - 1].1 } else { f64::NEG_INFINITY };
        let right = if i + 1 < grid { samples[i + 1].1 } else { f64::NEG_INFINITY };
        if g > left && g >= right {
            peaks.push(i);
        }
    }
    let f = |x: f64| symmetric_gamma(x, truncation);
    let inner_tol = (refine_tol * 1e-2).max(1e-12);
    let mut local_maxima = Vec::with_capacity(peaks.len());
    for &i in &peaks {
        let a = (xs[i] - step).max(inner_tol);
        let b = (xs[i] + step).min(1.0 - inner_tol);
        local_maxima.push(golden_max(&f, a, b, inner_tol)?);
    }
    let &(argmax, gamma_max) = local_maxima
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Consistency("no local maximum found on the grid".into()))?;
    Ok(OptimalAnisotropy {
        truncation,
        argmax,
        gamma_max,
        unimodal: local_maxima.len() == 1,
        local_maxima,
        samples,
    })
}

/// Exact gap per unit spin against the lowest nonzero boson energy.
#[derive(Debug, Clone, PartialEq)]
pub struct BosonComparison {
    pub two_j: u32,
    pub length: usize,
    pub delta_inv: f64,
    pub two_m: i32,
    pub exact_gap: f64,
    pub exact_gap_over_j: f64,
    pub mu: f64,
    pub eta: f64,
    pub r: f64,
    pub lambda1: f64,
    /// `|γ/J − λ₁| / λ₁`.
    pub relative_deviation: f64,
}

pub fn boson_vs_exact(two_j: u32, length: usize, delta_inv: f64, two_m: i32, tol: f64) -> Result<BosonComparison> {
    if !(delta_inv > 0.0) {
        return domain("the boson model needs delta_inv > 0");
    }
    let params = SpinParams::new(two_j, length, delta_inv)?;
    let report = spectral_gap(&params, two_m, tol)?;
    let eta = params.eta();
    let mu = two_m as f64 / two_j as f64;
    let r = solve_chain_phase(mu, eta, length)?;
    let lambda1 = boson_matrix(length, eta, r)?.lowest(2)?[1];
    let over_j = report.gap / params.spin();
    Ok(BosonComparison {
        two_j,
        length,
        delta_inv,
        two_m,
        exact_gap: report.gap,
        exact_gap_over_j: over_j,
        mu,
        eta,
        r,
        lambda1,
        relative_deviation: (over_j - lambda1).abs() / lambda1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_two_site() {
        let eta = 1.3f64;
        let m = boson_matrix(2, eta, 1.5).unwrap();
        let d = 1.0 / eta.cosh();
        assert!((m.diag[0] - d).abs() < 1e-15 && (m.diag[1] - d).abs() < 1e-15);
        let ev = m.eigenvalues().unwrap();
        assert!(ev[0].abs() < 1e-14);
        assert!((ev[1] - 2.0 * d).abs() < 1e-14);
    }

    #[test]
    fn zero_mode_is_annihilated() {
        let m = boson_matrix(40, 0.7, 13.3).unwrap();
        let v = boson_zero_mode(40, 0.7, 13.3);
        let hv = m.matvec(&v).unwrap();
        assert!(hv.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn phase_at_zero_is_half() {
        let p = solve_interface_phase(0.0, 0.8, 40, 1e-12).unwrap();
        assert!((p.r - 0.5).abs() < 1e-14);
        assert!(solve_interface_phase(100.0, 0.8, 40, 1e-12).is_err());
        assert!(solve_interface_phase(1.0, 0.001, 10, 1e-12).is_err());
    }

    #[test]
    fn jacobi_window_and_tail() {
        let a = jacobi_operator(10, 0.9, 0.5).unwrap();
        assert_eq!(a.first_site, -4);
        assert_eq!(a.sites().last(), Some(5));
        let far = jacobi_diagonal(40.0, 0.9, 0.5);
        assert!((far - 2.0).abs() < 4.0 * 0.9f64.sinh().powi(2) * (-2.0 * 0.9 * 39.5f64).exp() * 2.0);
    }

    #[test]
    fn golden_finds_parabola_vertex() {
        let f = |x: f64| Ok(-(x - 0.3).powi(2));
        let (x, _) = golden_max(&f, 0.0, 1.0, 1e-9).unwrap();
        assert!((x - 0.3).abs() < 1e-8);
    }
}
