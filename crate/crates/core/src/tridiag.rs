//! Eigenvalues of real symmetric tridiagonal matrices by Sturm-sequence bisection.

use crate::error::{domain, Result};

fn check(diag: &[f64], off: &[f64]) -> Result<()> {
    if diag.is_empty() {
        return domain("empty tridiagonal matrix");
    }
    if off.len() + 1 != diag.len() {
        return domain(format!(
            "off-diagonal length {} does not match diagonal length {}",
            off.len(),
            diag.len()
        ));
    }
    Ok(())
}

/// Number of eigenvalues strictly below `x`.
pub fn count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..diag.len() {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = diag[i] - x - coupling / d;
        if d == 0.0 {
            d = -f64::EPSILON * (diag[i].abs() + x.abs() + f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval containing the spectrum.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..diag.len() {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i < off.len() { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// The `k`-th smallest eigenvalue (0-based), bisected to machine resolution.
pub fn kth_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> Result<f64> {
    check(diag, off)?;
    if k >= diag.len() {
        return domain(format!("index {k} out of range for dimension {}", diag.len()));
    }
    let (mut lo, mut hi) = gershgorin(diag, off);
    let pad = f64::EPSILON * (lo.abs().max(hi.abs()) + 1.0);
    lo -= pad;
    hi += pad;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if count_below(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// All eigenvalues in ascending order.
pub fn eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    check(diag, off)?;
    (0..diag.len()).map(|k| kth_eigenvalue(diag, off, k)).collect()
}

/// The `count` smallest eigenvalues in ascending order.
pub fn lowest_eigenvalues(diag: &[f64], off: &[f64], count: usize) -> Result<Vec<f64>> {
    check(diag, off)?;
    (0..count.min(diag.len()))
        .map(|k| kth_eigenvalue(diag, off, k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    #[test]
    fn free_chain_spectrum() {
        // 2 − 2cos(πk/(n+1))
        let n = 30;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        let ev = eigenvalues(&diag, &off).unwrap();
        for (k, v) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(eigenvalues(&[], &[]).is_err());
        assert!(eigenvalues(&[1.0, 2.0], &[]).is_err());
        assert!(kth_eigenvalue(&[1.0], &[], 1).is_err());
    }

    proptest! {
        #[test]
        fn matches_dense(diag in prop::collection::vec(-3.0f64..3.0, 1..12), seed in prop::collection::vec(-2.0f64..2.0, 11)) {
            let n = diag.len();
            let off: Vec<f64> = seed[..n - 1].to_vec();
            let mut m = DMatrix::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = diag[i];
                if i + 1 < n {
                    m[(i, i + 1)] = off[i];
                    m[(i + 1, i)] = off[i];
                }
            }
            let mut dense: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
            dense.sort_by(f64::total_cmp);
            let ours = eigenvalues(&diag, &off).unwrap();
            for (a, b) in ours.iter().zip(&dense) {
                prop_assert!((a - b).abs() < 1e-11);
            }
        }
    }
}
