//! Sector-restricted kink Hamiltonian.
//!
//! Each bond contributes
//! `J² − S³S³ − Δ⁻¹(S¹S¹ + S²S²) + J√(1−Δ⁻²)(S³_α − S³_{α+1})`,
//! so the field terms telescope to opposite fields on the two endpoints.

use std::io::{self, Write};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::basis::SectorBasis;
use crate::eigensolve::full_spectrum;
use crate::error::{domain, Error, Result};
use crate::spin::{boundary_amplitude, SpinParams};

const DROP_TOLERANCE: f64 = 1e-15;
const ROW_CHUNK: usize = 2048;

/// Matrix elements of a single bond term, in doubled magnetic quantum numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BondAmplitudes {
    two_j: u32,
    amplitude: f64,
    hop_scale: f64,
}

impl BondAmplitudes {
    pub fn new(two_j: u32, delta_inv: f64) -> Self {
        Self {
            two_j,
            amplitude: boundary_amplitude(delta_inv),
            hop_scale: -0.5 * delta_inv,
        }
    }

    /// `J² − m₁m₂ + J·A(Δ)(m₁ − m₂)`.
    pub fn diag(&self, two_m1: i32, two_m2: i32) -> f64 {
        let tj = self.two_j as f64;
        let (a, b) = (two_m1 as f64, two_m2 as f64);
        (tj * tj - a * b) / 4.0 + 0.5 * tj * self.amplitude * (a - b) / 2.0
    }

    /// Amplitude of `⟨m₁+1, m₂−1| h |m₁, m₂⟩` (`raise_first`) or of
    /// `⟨m₁−1, m₂+1| h |m₁, m₂⟩`; zero when a spin would leave `[−J, J]`.
    pub fn hop(&self, two_m1: i32, two_m2: i32, raise_first: bool) -> f64 {
        let tj = self.two_j as i32;
        let (k1, k2) = ((two_m1 + tj) / 2, (two_m2 + tj) / 2);
        let (up, down) = if raise_first { (k1, k2) } else { (k2, k1) };
        self.hop_steps(up as u32, down as u32)
    }

    /// Hop amplitude in step counts: site with `up` steps is raised, site with
    /// `down` steps is lowered.
    fn hop_steps(&self, up: u32, down: u32) -> f64 {
        if up >= self.two_j || down == 0 {
            return 0.0;
        }
        let raise = ((self.two_j - up) as f64 * (up + 1) as f64).sqrt();
        let lower = (down as f64 * (self.two_j - down + 1) as f64).sqrt();
        self.hop_scale * raise * lower
    }

    fn diag_steps(&self, k1: u8, k2: u8) -> f64 {
        let tj = self.two_j as i32;
        self.diag(2 * k1 as i32 - tj, 2 * k2 as i32 - tj)
    }
}

/// Real symmetric sparse matrix held in full row-compressed form.
///
/// Both triangles are stored so `matvec` is a plain row sweep; [`entries`](Self::entries)
/// reports the upper triangle only.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetricMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSymmetricMatrix {
    /// Builds from upper-triangle triplets; duplicates are summed.
    pub fn from_upper_triplets(dim: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        for &(r, c, v) in triplets {
            if r > c {
                return domain(format!("triplet ({r}, {c}) lies below the diagonal"));
            }
            if c >= dim {
                return domain(format!("triplet ({r}, {c}) outside dimension {dim}"));
            }
            if !v.is_finite() {
                return domain(format!("non-finite value at ({r}, {c})"));
            }
            rows[r].push((c, v));
            if r != c {
                rows[c].push((r, v));
            }
        }
        Ok(Self::from_rows(dim, rows))
    }

    fn from_rows(dim: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut iter = row.into_iter().peekable();
            while let Some((c, mut v)) = iter.next() {
                while let Some(&(c2, v2)) = iter.peek() {
                    if c2 != c {
                        break;
                    }
                    v += v2;
                    iter.next();
                }
                if v.abs() > DROP_TOLERANCE {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored upper-triangle entries, diagonal included.
    pub fn nnz(&self) -> usize {
        self.entries().count()
    }

    /// Upper-triangle entries `(row, col, value)` with `row ≤ col`, row-major.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            self.row(r)
                .filter(move |&(c, _)| c >= r)
                .map(move |(c, v)| (r, c, v))
        })
    }

    /// Stored entries of row `r`, ordered by column.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|r| self.row(r).find(|&(c, _)| c == r).map_or(0.0, |e| e.1))
            .collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|r| self.row(r).all(|(c, _)| c == r))
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    /// Induced 1-norm (equal to the ∞-norm by symmetry).
    pub fn norm_one(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.row(r).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y)?;
        Ok(y)
    }

    /// `y = Hx`; each row is summed in column order regardless of thread count.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if y.len() != self.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                got: y.len(),
            });
        }
        y.par_chunks_mut(ROW_CHUNK)
            .enumerate()
            .for_each(|(chunk, out)| {
                let start = chunk * ROW_CHUNK;
                for (offset, yi) in out.iter_mut().enumerate() {
                    let r = start + offset;
                    let span = self.row_ptr[r]..self.row_ptr[r + 1];
                    let mut acc = 0.0;
                    for (c, v) in self.cols[span.clone()].iter().zip(&self.vals[span]) {
                        acc += v * x[*c];
                    }
                    *yi = acc;
                }
            });
        Ok(())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// Writes `dim nnz` then one `row col value` line per upper-triangle entry.
    pub fn write_triplets<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{} {}", self.dim, self.nnz())?;
        for (r, c, v) in self.entries() {
            writeln!(out, "{r} {c} {v:.16e}")?;
        }
        Ok(())
    }
}

/// Assembles `H` on the sector `Σ 2m_α = two_m`.
pub fn assemble_sector(params: &SpinParams, two_m: i32) -> Result<SparseSymmetricMatrix> {
    let basis = SectorBasis::new(params.two_j(), params.length(), two_m)?;
    assemble_on_basis(params, &basis)
}

/// Assembles `H` on an already enumerated basis.
pub fn assemble_on_basis(params: &SpinParams, basis: &SectorBasis) -> Result<SparseSymmetricMatrix> {
    assemble_with_hop_sign(params, basis, 1.0)
}

/// `hop_sign = −1` gives the matrix at `−Δ⁻¹` (every hop flipped, fields untouched).
pub(crate) fn assemble_with_hop_sign(
    params: &SpinParams,
    basis: &SectorBasis,
    hop_sign: f64,
) -> Result<SparseSymmetricMatrix> {
    if basis.two_j() != params.two_j() || basis.length() != params.length() {
        return domain("basis does not match the spin parameters");
    }
    let dim = basis.dim();
    if dim == 0 {
        return domain("empty sector");
    }
    let bond = BondAmplitudes::new(params.two_j(), params.delta_inv());
    let length = params.length();
    let two_j = params.two_j();

    let chunks: Vec<(Vec<usize>, Vec<usize>, Vec<f64>)> = (0..dim.div_ceil(ROW_CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * ROW_CHUNK;
            let end = (start + ROW_CHUNK).min(dim);
            let mut counts = Vec::with_capacity(end - start);
            let mut cols = Vec::new();
            let mut vals = Vec::new();
            let mut work = vec![0u8; length];
            let mut row: Vec<(usize, f64)> = Vec::with_capacity(2 * length);
            for i in start..end {
                let steps = basis.steps(i);
                row.clear();
                let mut diag = 0.0;
                for a in 0..length - 1 {
                    diag += bond.diag_steps(steps[a], steps[a + 1]);
                }
                if diag.abs() > DROP_TOLERANCE {
                    row.push((i, diag));
                }
                if hop_sign != 0.0 && bond.hop_scale != 0.0 {
                    for a in 0..length - 1 {
                        let (k1, k2) = (steps[a] as u32, steps[a + 1] as u32);
                        for (raise_first, d1, d2) in [(true, 1i32, -1i32), (false, -1, 1)] {
                            let amp = if raise_first {
                                bond.hop_steps(k1, k2)
                            } else {
                                bond.hop_steps(k2, k1)
                            };
                            if amp == 0.0 {
                                continue;
                            }
                            work.copy_from_slice(steps);
                            work[a] = (k1 as i32 + d1) as u8;
                            work[a + 1] = (k2 as i32 + d2) as u8;
                            debug_assert!(work.iter().all(|&k| k as u32 <= two_j));
                            let j = basis.rank_steps(&work);
                            row.push((j, hop_sign * amp));
                        }
                    }
                }
                row.sort_by_key(|e| e.0);
                counts.push(row.len());
                for &(c, v) in &row {
                    cols.push(c);
                    vals.push(v);
                }
            }
            (counts, cols, vals)
        })
        .collect();

    let mut row_ptr = Vec::with_capacity(dim + 1);
    row_ptr.push(0);
    let total: usize = chunks.iter().map(|c| c.1.len()).sum();
    let mut cols = Vec::with_capacity(total);
    let mut vals = Vec::with_capacity(total);
    for (counts, c, v) in chunks {
        for n in counts {
            row_ptr.push(row_ptr.last().unwrap() + n);
        }
        cols.extend(c);
        vals.extend(v);
    }
    Ok(SparseSymmetricMatrix {
        dim,
        row_ptr,
        cols,
        vals,
    })
}

/// Largest sector accepted by the dense spectrum comparison.
pub const STAGGERED_CHECK_MAX_DIM: usize = 2000;

/// Compares the sorted spectra at `Δ⁻¹` and `−Δ⁻¹` (all hops negated) to 1e−9.
pub fn staggered_conjugate_spectrum_check(params: &SpinParams, two_m: i32) -> Result<bool> {
    let basis = SectorBasis::new(params.two_j(), params.length(), two_m)?;
    if basis.dim() > STAGGERED_CHECK_MAX_DIM {
        return Err(Error::TooLarge {
            what: "sector",
            size: basis.dim(),
            limit: STAGGERED_CHECK_MAX_DIM,
            hint: "the dense spectrum comparison only runs on small sectors",
        });
    }
    let plus = full_spectrum(&assemble_with_hop_sign(params, &basis, 1.0)?)?;
    let minus = full_spectrum(&assemble_with_hop_sign(params, &basis, -1.0)?)?;
    Ok(plus
        .iter()
        .zip(&minus)
        .all(|(a, b)| (a - b).abs() <= 1e-9))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_site_spin_half() {
        let p = SpinParams::from_delta(1, 2, 2.0).unwrap();
        let h = assemble_sector(&p, 0).unwrap().to_dense();
        // lex order puts |−+⟩ first
        assert_abs_diff_eq!(h[(0, 0)], 0.066987298107780646, epsilon = 1e-12);
        assert_abs_diff_eq!(h[(1, 1)], 0.93301270189221941, epsilon = 1e-12);
        assert_abs_diff_eq!(h[(0, 1)], -0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(h[(1, 0)], -0.25, epsilon = 1e-15);

        let sat = assemble_sector(&p, 2).unwrap();
        assert_eq!(sat.dim(), 1);
        assert_eq!(sat.to_dense()[(0, 0)], 0.0);
    }

    #[test]
    fn bond_diag_nonnegative_and_hops_vanish_at_edges() {
        for two_j in 1..=6u32 {
            for &d in &[0.0, 0.3, 0.9, 0.999] {
                let b = BondAmplitudes::new(two_j, d);
                let tj = two_j as i32;
                for m1 in (-tj..=tj).step_by(2) {
                    for m2 in (-tj..=tj).step_by(2) {
                        assert!(b.diag(m1, m2) >= -1e-14);
                    }
                    assert_eq!(b.hop(tj, m1, true), 0.0);
                    assert_eq!(b.hop(m1, -tj, true), 0.0);
                    assert_eq!(b.hop(-tj, m1, false), 0.0);
                }
            }
        }
    }

    #[test]
    fn sparsity_and_norm_bound() {
        let p = SpinParams::new(3, 5, 0.6).unwrap();
        let tj = 3.0f64;
        for two_m in [-5, -1, 3] {
            let h = assemble_sector(&p, two_m).unwrap();
            for r in 0..h.dim() {
                let off = h.row(r).filter(|&(c, _)| c != r).count();
                assert!(off <= 2 * (p.length() - 1));
                let sum: f64 = h.row(r).map(|(_, v)| v.abs()).sum();
                let bound = 2.0 * (tj / 2.0).powi(2)
                    * p.length() as f64
                    * (1.0 + p.boundary_amplitude() + p.delta_inv());
                assert!(sum <= bound);
            }
        }
    }

    #[test]
    fn triplet_dump_format() {
        let p = SpinParams::from_delta(1, 2, 2.0).unwrap();
        let h = assemble_sector(&p, 0).unwrap();
        let mut buf = Vec::new();
        h.write_triplets(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "2 3");
        assert_eq!(lines[2], "0 1 -2.5000000000000000e-1");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn triplets_reject_lower_triangle() {
        assert!(SparseSymmetricMatrix::from_upper_triplets(2, &[(1, 0, 1.0)]).is_err());
        let m = SparseSymmetricMatrix::from_upper_triplets(2, &[(0, 1, 1.0), (0, 1, 2.0)]).unwrap();
        assert_eq!(m.to_dense()[(1, 0)], 3.0);
    }

    #[test]
    fn matvec_length_checked() {
        let p = SpinParams::new(2, 3, 0.5).unwrap();
        let h = assemble_sector(&p, 0).unwrap();
        assert!(matches!(
            h.matvec(&[1.0]),
            Err(Error::LengthMismatch { .. })
        ));
        let zero = h.matvec(&vec![0.0; h.dim()]).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
    }
}
