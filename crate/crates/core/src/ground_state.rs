//! Closed-form kink ground states and their q-series norms.

use crate::basis::SectorBasis;
use crate::error::{domain, Result};
use crate::hamiltonian::assemble_on_basis;
use crate::spin::SpinParams;

/// Unit-norm kink ground state of one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct KinkGroundState {
    pub params: SpinParams,
    pub two_m: i32,
    /// Positive coefficients in the sector's lexicographic basis order.
    pub coefficients: Vec<f64>,
}

/// `ln C(n, k)` for every `k ∈ 0..=n`.
pub(crate) fn ln_binomials(n: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0f64;
    out.push(0.0);
    for k in 1..=n {
        acc += ((n - k + 1) as f64).ln() - (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Kink ground state with entries `∏_α C(2J, J+m_α)^{1/2} q^{−α m_α}`, normalized.
///
/// In the Ising limit the weights collapse onto the single right-packed
/// configuration, which is returned with coefficient 1.
pub fn kink_vector(params: &SpinParams, two_m: i32) -> Result<KinkGroundState> {
    let basis = SectorBasis::new(params.two_j(), params.length(), two_m)?;
    let coefficients = kink_coefficients(params, &basis);
    Ok(KinkGroundState {
        params: *params,
        two_m,
        coefficients,
    })
}

pub(crate) fn kink_coefficients(params: &SpinParams, basis: &SectorBasis) -> Vec<f64> {
    let tj = params.two_j() as i64;
    // Σ α·2m_α, the exponent of e^{η/2}
    let moment = |steps: &[u8]| -> i64 {
        steps
            .iter()
            .enumerate()
            .map(|(a, &k)| (a as i64 + 1) * (2 * k as i64 - tj))
            .sum()
    };
    let dim = basis.dim();
    if params.is_ising() {
        let best = (0..dim)
            .max_by_key(|&i| (moment(basis.steps(i)), std::cmp::Reverse(i)))
            .expect("non-empty sector");
        let mut v = vec![0.0; dim];
        v[best] = 1.0;
        return v;
    }
    let eta = params.eta();
    let lnb = ln_binomials(params.two_j());
    let logs: Vec<f64> = (0..dim)
        .map(|i| {
            let steps = basis.steps(i);
            let lb: f64 = steps.iter().map(|&k| lnb[k as usize]).sum();
            0.5 * lb + 0.5 * eta * moment(steps) as f64
        })
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut v: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    v
}

/// `‖H Ψ₀‖₂` for the normalized kink state.
pub fn residual(params: &SpinParams, two_m: i32) -> Result<f64> {
    let basis = SectorBasis::new(params.two_j(), params.length(), two_m)?;
    let h = assemble_on_basis(params, &basis)?;
    let psi = kink_coefficients(params, &basis);
    let hv = h.matvec(&psi)?;
    Ok(hv.iter().map(|x| x * x).sum::<f64>().sqrt())
}

/// Unnormalized squared norm `Σ_c ∏_x C(2J, c_x) q^{2x·c}` with `c_x = J − m_x`.
pub fn norm_sq(params: &SpinParams, two_m: i32) -> Result<f64> {
    let basis = SectorBasis::new(params.two_j(), params.length(), two_m)?;
    let q = params.q();
    let tj = params.two_j();
    let lnb = ln_binomials(tj);
    let mut sum = NeumaierSum::default();
    for i in 0..basis.dim() {
        let mut exponent = 0u64;
        let mut lb = 0.0;
        for (x, &k) in basis.steps(i).iter().enumerate() {
            let c = (tj - k as u32) as u64;
            exponent += 2 * (x as u64 + 1) * c;
            lb += lnb[k as usize];
        }
        let weight = if exponent == 0 {
            1.0
        } else if q == 0.0 {
            0.0
        } else {
            (exponent as f64 * q.ln()).exp()
        };
        sum.add(lb.exp() * weight);
    }
    Ok(sum.value())
}

/// Compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Both sides of `Σ_n q^{2n²}/∏_{j≤n}(1−q^{2j})² = 1/∏_j(1−q^{2j})`, truncated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QSeriesValue {
    pub q: f64,
    pub partial_sum: f64,
    pub product_form: f64,
    pub terms_used: usize,
}

impl QSeriesValue {
    pub fn discrepancy(&self) -> f64 {
        (self.partial_sum - self.product_form).abs()
    }
}

pub fn heine_check(q: f64, n_terms: usize) -> Result<QSeriesValue> {
    if !(q > 0.0 && q < 1.0) {
        return domain(format!("q must lie in (0, 1), got {q}"));
    }
    if n_terms == 0 {
        return domain("n_terms must be at least 1");
    }
    let ln_q2 = 2.0 * q.ln();
    // ln(1 − q^{2j})
    let ln_factor = |j: usize| (-(j as f64 * ln_q2).exp()).ln_1p();

    let mut sum = NeumaierSum::default();
    sum.add(1.0);
    let mut ln_den = 0.0;
    for n in 1..=n_terms {
        ln_den += ln_factor(n);
        let ln_term = (n * n) as f64 * ln_q2 - 2.0 * ln_den;
        sum.add(ln_term.exp());
    }

    let mut ln_prod = 0.0;
    for j in 1..=n_terms {
        ln_prod += ln_factor(j);
    }
    Ok(QSeriesValue {
        q,
        partial_sum: sum.value(),
        product_form: (-ln_prod).exp(),
        terms_used: n_terms,
    })
}

/// Spin-1/2 kink norm with `N` down spins, finite and `L → ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinHalfNorm {
    /// `Σ_{1≤α₁<…<α_N≤L} q^{2(α₁+…+α_N)}`.
    pub finite: f64,
    /// `q^{N(N+1)}/∏_{j=1}^N (1 − q^{2j})`.
    pub closed_form: f64,
}

pub fn spin_half_norm_sq(length: usize, n: usize, q: f64) -> Result<SpinHalfNorm> {
    if n > length {
        return domain(format!("N = {n} exceeds L = {length}"));
    }
    if !(0.0..1.0).contains(&q) {
        return domain(format!("q must lie in [0, 1), got {q}"));
    }
    let q2 = q * q;
    // elementary symmetric polynomial e_N(q², q⁴, …, q^{2L})
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    let mut x = 1.0;
    for site in 1..=length {
        x *= q2;
        for j in (1..=n.min(site)).rev() {
            e[j] += x * e[j - 1];
        }
    }
    let mut closed = q.powi((n * (n + 1)) as i32);
    let mut p = 1.0;
    for _ in 1..=n {
        p *= q2;
        closed /= 1.0 - p;
    }
    Ok(SpinHalfNorm {
        finite: e[n],
        closed_form: closed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_site_vector() {
        let p = SpinParams::from_delta(1, 2, 2.0).unwrap();
        let g = kink_vector(&p, 0).unwrap();
        let q = 2.0 - 3f64.sqrt();
        let n = (1.0 + q * q).sqrt();
        // lex order: |−+⟩ then |+−⟩
        assert!((g.coefficients[0] - 1.0 / n).abs() < 1e-15);
        assert!((g.coefficients[1] - q / n).abs() < 1e-15);
    }

    #[test]
    fn saturated_and_ising() {
        let p = SpinParams::new(3, 4, 0.5).unwrap();
        assert_eq!(kink_vector(&p, 12).unwrap().coefficients, vec![1.0]);
        let ising = SpinParams::new(2, 4, 0.0).unwrap();
        let g = kink_vector(&ising, 0).unwrap();
        assert_eq!(g.coefficients.iter().filter(|&&c| c != 0.0).count(), 1);
        let basis = SectorBasis::new(2, 4, 0).unwrap();
        let i = g.coefficients.iter().position(|&c| c == 1.0).unwrap();
        assert_eq!(basis.config(i).values(), &[-2, -2, 2, 2]);
        assert_eq!(residual(&ising, 0).unwrap(), 0.0);
    }

    #[test]
    fn ln_binomials_match_exact() {
        for n in 0..=20u32 {
            let lb = ln_binomials(n);
            let mut c = 1u64;
            for k in 0..=n {
                assert!((lb[k as usize] - (c as f64).ln()).abs() < 1e-12);
                c = c * (n - k) as u64 / (k + 1) as u64;
            }
        }
    }

    #[test]
    fn heine_small_q_and_domain() {
        let v = heine_check(1e-6, 5).unwrap();
        assert!((v.partial_sum - 1.0).abs() < 1e-11);
        assert!((v.product_form - 1.0).abs() < 1e-11);
        assert!(heine_check(0.0, 5).is_err());
        assert!(heine_check(1.0, 5).is_err());
        assert!(heine_check(0.5, 0).is_err());
    }

    #[test]
    fn heine_discrepancy_shrinks() {
        let a = heine_check(0.8, 5).unwrap().discrepancy();
        let b = heine_check(0.8, 10).unwrap().discrepancy();
        let c = heine_check(0.8, 20).unwrap().discrepancy();
        assert!(a > b && b > c);
    }

    #[test]
    fn spin_half_norms() {
        assert_eq!(spin_half_norm_sq(5, 0, 0.3).unwrap().finite, 1.0);
        assert!((spin_half_norm_sq(2, 1, 0.5).unwrap().finite - 0.3125).abs() < 1e-15);
        let q: f64 = 0.4;
        for length in [10usize, 30] {
            let v = spin_half_norm_sq(length, 2, q).unwrap();
            let rel = (v.finite - v.closed_form).abs() / v.closed_form;
            assert!(rel <= q.powi(2 * (length as i32 - 2)) + 4.0 * f64::EPSILON);
        }
        assert!(spin_half_norm_sq(3, 4, 0.5).is_err());
    }
}
