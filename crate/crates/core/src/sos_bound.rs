//! Spin-ladder overlap matrix and the resulting lower bound on the gap.
//!
//! The spin-J chain embeds in a ladder of 2J spin-1/2 chains. Ladder ground
//! states are labelled by restricted partitions `μ` (particle numbers per leg,
//! up to leg permutations). The rung symmetrizer compressed onto those states
//! is the overlap matrix `𝒫`; its second eigenvalue `δ` yields
//! `γ ≥ 2J(1−Δ⁻¹)(1−δ)`.

use std::collections::HashMap;
use std::sync::Mutex;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::basis::SectorBasis;
use crate::error::{domain, Error, Result};
use crate::ground_state::{ln_binomials, NeumaierSum};
use crate::spin::{check_delta_inv, q_from_delta_inv};

/// Non-increasing tuple of `2J` parts in `[0, L]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RestrictedPartition {
    parts: Vec<u32>,
}

impl RestrictedPartition {
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self { parts }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn total(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// `n_k` = number of parts equal to `k`, for `k ∈ 0..=max_part`.
    pub fn multiplicities(&self, max_part: u32) -> Vec<u32> {
        let mut n = vec![0; max_part as usize + 1];
        for &p in &self.parts {
            n[p as usize] += 1;
        }
        n
    }

    /// Number of distinct orderings, `(2J)! / ∏_k n_k!`.
    pub fn orbit_size(&self) -> BigUint {
        let mut result = BigUint::one();
        let mut placed = 0u32;
        let mut run = 0u32;
        for (i, &p) in self.parts.iter().enumerate() {
            run = if i > 0 && self.parts[i - 1] == p { run + 1 } else { 1 };
            placed += 1;
            // multiply by placed / run, keeping the running value an integer
            result = result * BigUint::from(placed) / BigUint::from(run);
        }
        result
    }

    /// Conjugate partition with `width` entries: `μ'_x = #{j : μ_j ≥ x}`.
    pub fn conjugate(&self, width: u32) -> Vec<u32> {
        (1..=width)
            .map(|x| self.parts.iter().filter(|&&p| p >= x).count() as u32)
            .collect()
    }

    /// Dominance order: every partial sum of `self` is at most that of `other`.
    pub fn dominated_by(&self, other: &RestrictedPartition) -> bool {
        if self.total() != other.total() {
            return false;
        }
        let (mut a, mut b) = (0u32, 0u32);
        for i in 0..self.parts.len().max(other.parts.len()) {
            a += self.parts.get(i).copied().unwrap_or(0);
            b += other.parts.get(i).copied().unwrap_or(0);
            if a > b {
                return false;
            }
        }
        true
    }
}

/// All of `𝕡₀(L, 2J, N)` in reverse-lexicographic order.
pub fn restricted_partitions(length: usize, two_j: u32, n: u32) -> Result<Vec<RestrictedPartition>> {
    if two_j == 0 {
        return domain("two_j must be positive");
    }
    if n as u64 > two_j as u64 * length as u64 {
        return domain(format!("N = {n} exceeds 2J·L = {}", two_j as u64 * length as u64));
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(two_j as usize);
    partitions_into(n, two_j, length as u32, &mut current, &mut out);
    Ok(out)
}

fn partitions_into(
    remaining: u32,
    slots: u32,
    cap: u32,
    current: &mut Vec<u32>,
    out: &mut Vec<RestrictedPartition>,
) {
    if slots == 0 {
        if remaining == 0 {
            out.push(RestrictedPartition {
                parts: current.clone(),
            });
        }
        return;
    }
    let hi = cap.min(remaining);
    let lo = remaining.div_ceil(slots);
    for p in (lo..=hi).rev() {
        current.push(p);
        partitions_into(remaining - p, slots - 1, p, current, out);
        current.pop();
    }
}

/// Gale–Ryser test: a 0-1 matrix with row sums `r` and column sums `c` exists.
pub fn gale_ryser_feasible(r: &[u32], c: &[u32]) -> bool {
    let sr: u64 = r.iter().map(|&x| x as u64).sum();
    let sc: u64 = c.iter().map(|&x| x as u64).sum();
    if sr != sc {
        return false;
    }
    let mut cs = c.to_vec();
    cs.sort_unstable_by(|a, b| b.cmp(a));
    let mut lhs = 0u64;
    for (k, &ck) in cs.iter().enumerate() {
        lhs += ck as u64;
        let rhs: u64 = r.iter().map(|&x| x.min(k as u32 + 1) as u64).sum();
        if lhs > rhs {
            return false;
        }
    }
    true
}

type CountKey = (Vec<u32>, Vec<u32>);

/// Memoized counter for `M_{r,c}`, shareable across threads.
#[derive(Debug, Default)]
pub struct ContingencyCounter {
    memo: Mutex<HashMap<CountKey, BigUint>>,
}

impl ContingencyCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of 0-1 matrices with row sums `r` and column sums `c`.
    pub fn count(&self, r: &[u32], c: &[u32]) -> BigUint {
        let mut rows: Vec<u32> = r.iter().copied().filter(|&x| x > 0).collect();
        rows.sort_unstable_by(|a, b| b.cmp(a));
        let mut cols: Vec<u32> = c.iter().copied().filter(|&x| x > 0).collect();
        cols.sort_unstable_by(|a, b| b.cmp(a));
        self.count_sorted(rows, &cols)
    }

    fn count_sorted(&self, rows: Vec<u32>, cols: &[u32]) -> BigUint {
        if cols.is_empty() {
            return if rows.is_empty() {
                BigUint::one()
            } else {
                BigUint::zero()
            };
        }
        if !gale_ryser_feasible(&rows, cols) {
            return BigUint::zero();
        }
        let key = (rows, cols.to_vec());
        if let Some(v) = self.memo.lock().expect("memo lock").get(&key) {
            return v.clone();
        }
        let (rows, _) = &key;
        let mut groups: Vec<(u32, u32)> = Vec::new();
        for &v in rows {
            match groups.last_mut() {
                Some((value, mult)) if *value == v => *mult += 1,
                _ => groups.push((v, 1)),
            }
        }
        let mut total = BigUint::zero();
        let mut take = vec![0u32; groups.len()];
        self.distribute(&groups, 0, cols[0], &mut take, &cols[1..], &mut total);
        self.memo
            .lock()
            .expect("memo lock")
            .insert(key.clone(), total.clone());
        total
    }

    fn distribute(
        &self,
        groups: &[(u32, u32)],
        g: usize,
        left: u32,
        take: &mut [u32],
        rest: &[u32],
        total: &mut BigUint,
    ) {
        if g == groups.len() {
            if left != 0 {
                return;
            }
            let mut weight = BigUint::one();
            let mut next = Vec::new();
            for (i, &(value, mult)) in groups.iter().enumerate() {
                weight *= binomial(mult, take[i]);
                next.extend(std::iter::repeat_n(value - 1, take[i] as usize));
                next.extend(std::iter::repeat_n(value, (mult - take[i]) as usize));
            }
            next.retain(|&x| x > 0);
            next.sort_unstable_by(|a, b| b.cmp(a));
            let sub = self.count_sorted(next, rest);
            if !sub.is_zero() {
                *total += weight * sub;
            }
            return;
        }
        let capacity: u32 = groups[g..].iter().map(|gr| gr.1).sum();
        if capacity < left {
            return;
        }
        for t in 0..=groups[g].1.min(left) {
            take[g] = t;
            self.distribute(groups, g + 1, left - t, take, rest, total);
        }
        take[g] = 0;
    }
}

fn binomial(n: u32, k: u32) -> BigUint {
    let mut r = BigUint::one();
    for i in 0..k {
        r = r * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    r
}

/// `M_{r,c}`: number of 0-1 matrices with row sums `r` and column sums `c`.
pub fn contingency_count(r: &[u32], c: &[u32]) -> BigUint {
    ContingencyCounter::new().count(r, c)
}

/// Dense symmetric matrix `𝒫` indexed by `𝕡₀(L, 2J, N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    pub length: usize,
    pub two_j: u32,
    pub n: u32,
    pub q: f64,
    pub partitions: Vec<RestrictedPartition>,
    pub matrix: DMatrix<f64>,
}

impl OverlapMatrix {
    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }
}

/// Per-configuration data shared by the overlap matrix and the norm route.
struct ColumnData {
    /// `Σ_x x·c_x`, the exponent of `q²`.
    exponent: u64,
    /// `ln ∏_x C(2J, c_x)`.
    ln_binom: f64,
    /// `M_{μ,c}` per partition.
    counts: Vec<f64>,
}

fn column_data(
    length: usize,
    two_j: u32,
    n: u32,
    partitions: &[RestrictedPartition],
) -> Result<Vec<ColumnData>> {
    let two_m = 2 * n as i32 - (two_j as i32 * length as i32);
    let basis = SectorBasis::new(two_j, length, two_m)?;
    let counter = ContingencyCounter::new();
    let lnb = ln_binomials(two_j);
    Ok((0..basis.dim())
        .into_par_iter()
        .map(|i| {
            let c: Vec<u32> = basis.steps(i).iter().map(|&k| k as u32).collect();
            let exponent = c
                .iter()
                .enumerate()
                .map(|(x, &cx)| (x as u64 + 1) * cx as u64)
                .sum();
            let ln_binom = c.iter().map(|&cx| lnb[cx as usize]).sum();
            let counts = partitions
                .iter()
                .map(|mu| {
                    counter
                        .count(mu.parts(), &c)
                        .to_f64()
                        .unwrap_or(f64::INFINITY)
                })
                .collect();
            ColumnData {
                exponent,
                ln_binom,
                counts,
            }
        })
        .collect())
}

/// `t^e` with the convention `0^0 = 1`.
fn power(ln_t: f64, t_is_zero: bool, e: u64) -> f64 {
    if e == 0 {
        1.0
    } else if t_is_zero {
        0.0
    } else {
        (e as f64 * ln_t).exp()
    }
}

/// Builds `𝒫` for `0 ≤ q < 1`; `q = 0` keeps only the minimal-exponent terms.
///
/// `𝒫(μ,ν) = √(orb_μ orb_ν) · S(μ,ν) / √(Z_μ Z_ν)` with
/// `S(μ,ν) = Σ_c M_{μ,c} M_{ν,c} q^{2x·c} / ∏_x C(2J, c_x)` and
/// `Z_μ = Σ_c M_{μ,c} q^{2x·c}`, the geometric-mean normalization that makes `𝒫`
/// the compression of the rung symmetrizer onto normalized ladder ground states.
pub fn build_overlap_matrix(length: usize, two_j: u32, n: u32, q: f64) -> Result<OverlapMatrix> {
    if !(0.0..1.0).contains(&q) {
        return domain(format!("q must lie in [0, 1), got {q}"));
    }
    let partitions = restricted_partitions(length, two_j, n)?;
    if partitions.is_empty() {
        return domain("no restricted partitions for this N");
    }
    let columns = column_data(length, two_j, n, &partitions)?;
    let p = partitions.len();
    let t = q * q;
    let (ln_t, t_zero) = (t.ln(), t == 0.0);

    // minimal exponents and shifted norm sums
    let mut e_min = vec![u64::MAX; p];
    for col in &columns {
        for (mu, &m) in col.counts.iter().enumerate() {
            if m > 0.0 {
                e_min[mu] = e_min[mu].min(col.exponent);
            }
        }
    }
    if e_min.contains(&u64::MAX) {
        return Err(Error::Consistency(
            "a partition has no compatible configuration".into(),
        ));
    }
    let z: Vec<f64> = (0..p)
        .map(|mu| {
            let mut s = NeumaierSum::default();
            for col in &columns {
                let m = col.counts[mu];
                if m > 0.0 {
                    s.add(m * power(ln_t, t_zero, col.exponent - e_min[mu]));
                }
            }
            s.value()
        })
        .collect();
    let orbit: Vec<f64> = partitions
        .iter()
        .map(|mu| mu.orbit_size().to_f64().unwrap_or(f64::INFINITY))
        .collect();

    let pairs: Vec<(usize, usize)> = (0..p).flat_map(|a| (a..p).map(move |b| (a, b))).collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let shared = columns
                .iter()
                .filter(|col| col.counts[a] > 0.0 && col.counts[b] > 0.0);
            let e_ab = shared.clone().map(|col| col.exponent).min();
            let Some(e_ab) = e_ab else {
                return 0.0;
            };
            let mut s = NeumaierSum::default();
            for col in shared {
                let w = (-col.ln_binom).exp();
                s.add(col.counts[a] * col.counts[b] * w * power(ln_t, t_zero, col.exponent - e_ab));
            }
            // e_ab ≥ max(e_a, e_b), so the prefactor exponent is non-negative
            let shift2 = 2 * e_ab - e_min[a] - e_min[b];
            let prefactor = if shift2 == 0 {
                1.0
            } else if t_zero {
                0.0
            } else {
                (0.5 * shift2 as f64 * ln_t).exp()
            };
            prefactor * (orbit[a] * orbit[b]).sqrt() * s.value() / (z[a] * z[b]).sqrt()
        })
        .collect();
    let mut matrix = DMatrix::zeros(p, p);
    for (&(a, b), &v) in pairs.iter().zip(&values) {
        matrix[(a, b)] = v;
        matrix[(b, a)] = v;
    }
    Ok(OverlapMatrix {
        length,
        two_j,
        n,
        q,
        partitions,
        matrix,
    })
}

/// `Σ_μ orb_μ Σ_c M_{μ,c} q^{2x·c}`: the unnormalized kink norm via the ladder.
pub fn ladder_norm_sq(length: usize, two_j: u32, n: u32, q: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return domain(format!("q must lie in [0, 1), got {q}"));
    }
    let partitions = restricted_partitions(length, two_j, n)?;
    let columns = column_data(length, two_j, n, &partitions)?;
    let t = q * q;
    let mut s = NeumaierSum::default();
    for (mu, part) in partitions.iter().enumerate() {
        let orb = part.orbit_size().to_f64().unwrap_or(f64::INFINITY);
        for col in &columns {
            let m = col.counts[mu];
            if m > 0.0 {
                s.add(orb * m * power(t.ln(), t == 0.0, col.exponent));
            }
        }
    }
    Ok(s.value())
}

/// `δ` and the lower bound `2J(1−Δ⁻¹)(1−δ)` for one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SosGapBound {
    pub length: usize,
    pub two_j: u32,
    pub n: u32,
    pub two_m: i32,
    pub delta_inv: f64,
    pub q: f64,
    pub top_eigenvalue: f64,
    pub delta: f64,
    pub bound: f64,
    pub partitions: usize,
}

impl SosGapBound {
    pub fn one_minus_delta(&self) -> f64 {
        1.0 - self.delta
    }
}

/// `δ` is the second eigenvalue of `𝒫` (zero when `𝒫` is 1×1).
pub fn delta_and_bound(length: usize, two_j: u32, n: u32, delta_inv: f64) -> Result<SosGapBound> {
    check_delta_inv(delta_inv)?;
    let q = q_from_delta_inv(delta_inv);
    let overlap = build_overlap_matrix(length, two_j, n, q)?;
    let ev = overlap.eigenvalues();
    let top = ev[0];
    if (top - 1.0).abs() > 1e-6 {
        return Err(Error::Consistency(format!(
            "largest eigenvalue of the overlap matrix is {top}, expected 1"
        )));
    }
    let delta = ev.get(1).copied().unwrap_or(0.0).max(0.0);
    let bound = two_j as f64 * (1.0 - delta_inv) * (1.0 - delta);
    Ok(SosGapBound {
        length,
        two_j,
        n,
        two_m: two_j as i32 * length as i32 - 2 * n as i32,
        delta_inv,
        q,
        top_eigenvalue: top,
        delta,
        bound,
        partitions: overlap.partitions.len(),
    })
}

/// Bounds along a list of anisotropies, in input order.
pub fn bound_scan(length: usize, two_j: u32, n: u32, delta_invs: &[f64]) -> Result<Vec<SosGapBound>> {
    delta_invs
        .par_iter()
        .map(|&d| delta_and_bound(length, two_j, n, d))
        .collect()
}

/// `x/(1−x)` with `x = 4J²·R·q^{2R}`; fails when `x ≥ 1`.
pub fn crude_tail_bound(r: u32, two_j: u32, q: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return domain(format!("q must lie in [0, 1), got {q}"));
    }
    if q == 0.0 {
        return Ok(0.0);
    }
    let x = (two_j as f64).powi(2) * r as f64 * q.powf(2.0 * r as f64);
    if x >= 1.0 {
        return Err(Error::TailBoundInvalid { value: x });
    }
    Ok(x / (1.0 - x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts(v: &[RestrictedPartition]) -> Vec<Vec<u32>> {
        v.iter().map(|p| p.parts().to_vec()).collect()
    }

    #[test]
    fn small_partition_lists() {
        assert_eq!(
            parts(&restricted_partitions(2, 2, 2).unwrap()),
            vec![vec![2, 0], vec![1, 1]]
        );
        assert_eq!(
            parts(&restricted_partitions(3, 2, 3).unwrap()),
            vec![vec![3, 0], vec![2, 1]]
        );
        assert!(restricted_partitions(2, 2, 5).is_err());
    }

    #[test]
    fn small_counts() {
        assert_eq!(contingency_count(&[1, 1], &[1, 1]), BigUint::from(2u32));
        assert_eq!(contingency_count(&[2, 0], &[1, 1]), BigUint::from(1u32));
        assert_eq!(contingency_count(&[2, 0], &[2, 0]), BigUint::zero());
        assert!(!gale_ryser_feasible(&[2, 0], &[2, 0]));
        // all 2x3 0-1 matrices with every row summing to 1 and columns (1,1,0)
        assert_eq!(contingency_count(&[1, 1], &[1, 1, 0]), BigUint::from(2u32));
    }

    #[test]
    fn orbit_sizes() {
        assert_eq!(RestrictedPartition::new(vec![2, 1, 1, 0]).orbit_size(), BigUint::from(12u32));
        assert_eq!(RestrictedPartition::new(vec![3, 3, 3]).orbit_size(), BigUint::from(1u32));
        assert_eq!(RestrictedPartition::new(vec![0, 1, 2]).orbit_size(), BigUint::from(6u32));
    }

    #[test]
    fn overlap_top_eigenvalue_is_one() {
        let m = build_overlap_matrix(4, 2, 4, 0.5).unwrap();
        let ev = m.eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-8);
        assert!(ev.iter().all(|&x| x > -1e-9 && x < 1.0 + 1e-9));
    }

    #[test]
    fn tail_bound_values() {
        let v = crude_tail_bound(20, 1, 0.5).unwrap();
        let x = 20.0 * 0.5f64.powi(40);
        assert!((v - x / (1.0 - x)).abs() < 1e-25);
        assert!((v - 1.8189894035e-11).abs() < 1e-20);
        assert_eq!(crude_tail_bound(3, 2, 0.0).unwrap(), 0.0);
        assert!(matches!(
            crude_tail_bound(1, 4, 0.9),
            Err(Error::TailBoundInvalid { .. })
        ));
    }
}
