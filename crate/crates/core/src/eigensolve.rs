//! Lowest eigenpairs of sector Hamiltonians and the spectral gap.
//!
//! Small or diagonal matrices are solved directly. Everything else goes
//! through Lanczos with full reorthogonalization and thick restarts.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::hamiltonian::{assemble_sector, SparseSymmetricMatrix};
use crate::spin::SpinParams;

/// Largest dimension handled by [`full_spectrum`].
pub const FULL_SPECTRUM_MAX_DIM: usize = 4000;
/// `lowest_k` switches to the dense solver at or below this dimension.
pub const DENSE_CUTOFF: usize = 200;
/// Eigenvalues within this distance of the gap count towards its multiplicity.
pub const CLUSTER_TOLERANCE: f64 = 1e-8;

const MAX_BASIS: usize = 500;
const BASIS_MEMORY_BUDGET: usize = 25_000_000;
const CHUNK: usize = 8192;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Lowest eigenpairs of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    /// `‖Hv − λv‖₂` per pair.
    pub residual_norms: Vec<f64>,
    /// Matrix-vector products spent (0 on the direct paths).
    pub iterations: usize,
    pub converged: bool,
}

/// Ground energy and gap of one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub two_j: u32,
    pub length: usize,
    pub two_m: i32,
    pub delta_inv: f64,
    pub dim: usize,
    pub ground_energy: f64,
    pub gap: f64,
    /// How many computed eigenvalues sit within [`CLUSTER_TOLERANCE`] of the gap.
    pub gap_multiplicity: usize,
    pub zero_threshold: f64,
    pub norm_one: f64,
    /// The computed low cluster, ascending.
    pub low_eigenvalues: Vec<f64>,
    pub residual_norms: Vec<f64>,
    pub iterations: usize,
}

/// Tuning knobs for [`lanczos`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Upper limit on stored basis vectors; `None` derives it from the dimension.
    pub max_basis: Option<usize>,
    pub max_matvecs: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_basis: None,
            max_matvecs: 50_000,
        }
    }
}

/// `max(1e−8, 1e−12·‖H‖₁)`.
pub fn zero_threshold(norm_one: f64) -> f64 {
    (1e-12 * norm_one).max(1e-8)
}

fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

/// All eigenvalues of a matrix of dimension at most [`FULL_SPECTRUM_MAX_DIM`], ascending.
pub fn full_spectrum(matrix: &SparseSymmetricMatrix) -> Result<Vec<f64>> {
    if matrix.dim() > FULL_SPECTRUM_MAX_DIM {
        return Err(Error::TooLarge {
            what: "dense spectrum",
            size: matrix.dim(),
            limit: FULL_SPECTRUM_MAX_DIM,
            hint: "use lowest_k for the low-lying part of the spectrum",
        });
    }
    Ok(dense_spectrum(matrix))
}

/// All eigenvalues, ascending, with no size guard.
pub fn dense_spectrum(matrix: &SparseSymmetricMatrix) -> Vec<f64> {
    if matrix.is_diagonal() {
        let mut d = matrix.diagonal();
        d.sort_by(f64::total_cmp);
        return d;
    }
    sorted_eigen(matrix.to_dense()).0
}

fn residual_norm(matrix: &SparseSymmetricMatrix, v: &[f64], lambda: f64) -> Result<f64> {
    let hv = matrix.matvec(v)?;
    Ok(hv
        .iter()
        .zip(v)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt())
}

fn finish_direct(
    matrix: &SparseSymmetricMatrix,
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
) -> Result<EigenResult> {
    let residual_norms = values
        .iter()
        .zip(&vectors)
        .map(|(&l, v)| residual_norm(matrix, v, l))
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenResult {
        eigenvalues: values,
        eigenvectors: vectors,
        residual_norms,
        iterations: 0,
        converged: true,
    })
}

/// Dense path: the `k` lowest pairs from a full diagonalization.
pub fn dense_lowest(matrix: &SparseSymmetricMatrix, k: usize) -> Result<EigenResult> {
    if matrix.dim() > FULL_SPECTRUM_MAX_DIM {
        return Err(Error::TooLarge {
            what: "dense eigenproblem",
            size: matrix.dim(),
            limit: FULL_SPECTRUM_MAX_DIM,
            hint: "use the Lanczos path",
        });
    }
    let k = k.min(matrix.dim());
    let (values, vecs) = sorted_eigen(matrix.to_dense());
    let vectors = (0..k).map(|i| vecs.column(i).iter().copied().collect()).collect();
    finish_direct(matrix, values[..k].to_vec(), vectors)
}

fn diagonal_lowest(matrix: &SparseSymmetricMatrix, k: usize) -> Result<EigenResult> {
    let d = matrix.diagonal();
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    let k = k.min(d.len());
    let values = order[..k].iter().map(|&i| d[i]).collect();
    let vectors = order[..k]
        .iter()
        .map(|&i| {
            let mut v = vec![0.0; d.len()];
            v[i] = 1.0;
            v
        })
        .collect();
    finish_direct(matrix, values, vectors)
}

/// The `k` lowest eigenpairs with residuals at most `tol·‖H‖₁`.
///
/// Uses the dense solver when `k ≥ dim` or the dimension is at most
/// [`DENSE_CUTOFF`], the exact diagonal when the matrix is diagonal, and
/// [`lanczos`] otherwise.
pub fn lowest_k(matrix: &SparseSymmetricMatrix, k: usize, tol: f64) -> Result<EigenResult> {
    check_request(matrix, k, tol)?;
    if matrix.is_diagonal() {
        return diagonal_lowest(matrix, k);
    }
    if k >= matrix.dim() || matrix.dim() <= DENSE_CUTOFF {
        return dense_lowest(matrix, k);
    }
    lanczos(matrix, k, tol, LanczosOptions::default())
}

fn check_request(matrix: &SparseSymmetricMatrix, k: usize, tol: f64) -> Result<()> {
    if k == 0 {
        return domain("k must be positive");
    }
    if matrix.dim() == 0 {
        return domain("empty matrix");
    }
    if !(tol > 0.0 && tol <= 1e-4) {
        return domain(format!("tolerance must lie in (0, 1e-4], got {tol}"));
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect::<Vec<_>>()
        .into_iter()
        .sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: &mut [f64], s: f64) {
    a.par_iter_mut().for_each(|x| *x *= s);
}

/// Two passes of classical Gram–Schmidt against `basis`; returns the summed coefficients.
fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) -> Vec<f64> {
    let mut total = vec![0.0; basis.len()];
    for _ in 0..2 {
        let h: Vec<f64> = basis.par_iter().map(|v| v.iter().zip(w.iter()).map(|(a, b)| a * b).sum()).collect();
        w.par_chunks_mut(CHUNK).enumerate().for_each(|(c, out)| {
            let start = c * CHUNK;
            for (i, v) in basis.iter().enumerate() {
                let coeff = h[i];
                let len = out.len();
                for (o, x) in out.iter_mut().zip(&v[start..start + len]) {
                    *o -= coeff * x;
                }
            }
        });
        for (t, x) in total.iter_mut().zip(h) {
            *t += x;
        }
    }
    total
}

/// Deterministic start vector with no reflection or spin-flip symmetry.
fn start_vector(dim: usize, salt: usize) -> Vec<f64> {
    let step = GOLDEN * (salt as f64 + 1.0);
    (0..dim)
        .map(|i| {
            let x = ((i + 1) as f64 * step).fract();
            if salt == 0 {
                0.5 + x
            } else {
                x - 0.5
            }
        })
        .collect()
}

/// Linear combinations `Σ_j basis[j]·coeffs[(j, col)]` for the requested columns.
fn combine(basis: &[Vec<f64>], coeffs: &DMatrix<f64>, columns: usize) -> Vec<Vec<f64>> {
    let dim = basis[0].len();
    let m = basis.len();
    (0..columns)
        .map(|c| {
            let mut out = vec![0.0; dim];
            out.par_chunks_mut(CHUNK).enumerate().for_each(|(chunk, o)| {
                let start = chunk * CHUNK;
                for j in 0..m {
                    let s = coeffs[(j, c)];
                    let len = o.len();
                    for (x, v) in o.iter_mut().zip(&basis[j][start..start + len]) {
                        *x += s * v;
                    }
                }
            });
            out
        })
        .collect()
}

/// Basis-size cap derived from the dimension and a fixed memory budget.
pub fn default_max_basis(dim: usize, k: usize) -> usize {
    (BASIS_MEMORY_BUDGET / dim.max(1))
        .clamp(k + 20, MAX_BASIS.max(k + 20))
        .min(dim)
}

/// Thick-restart Lanczos with full reorthogonalization.
pub fn lanczos(
    matrix: &SparseSymmetricMatrix,
    k: usize,
    tol: f64,
    options: LanczosOptions,
) -> Result<EigenResult> {
    check_request(matrix, k, tol)?;
    let dim = matrix.dim();
    if k >= dim {
        return dense_lowest(matrix, k);
    }
    let h_norm = matrix.norm_one();
    let target = tol * h_norm.max(f64::MIN_POSITIVE);
    let max_basis = options
        .max_basis
        .unwrap_or_else(|| default_max_basis(dim, k))
        .clamp(k + 2, dim.max(k + 2))
        .min(dim);
    let breakdown = 1e-14 * h_norm.max(1.0);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_basis + 1);
    // projected matrix; rows/columns beyond basis.len() are unused
    let mut t = DMatrix::<f64>::zeros(max_basis, max_basis);
    let mut v = start_vector(dim, 0);
    let n0 = norm(&v);
    scale(&mut v, 1.0 / n0);
    let mut matvecs = 0usize;
    let mut salt = 1usize;
    let mut next: Option<Vec<f64>> = Some(v);
    let mut last_beta;
    let mut best = (Vec::new(), Vec::new());
    let mut w = vec![0.0; dim];
    let check_every = (max_basis / 8).max(5);
    let mut since_check = 0usize;

    loop {
        let j = basis.len();
        let v = next.take().expect("pending Lanczos vector");
        matrix.matvec_into(&v, &mut w)?;
        matvecs += 1;
        basis.push(v);
        let h = orthogonalize(&basis, &mut w);
        for (i, &hi) in h.iter().enumerate() {
            t[(i, j)] = hi;
            t[(j, i)] = hi;
        }
        let mut beta = norm(&w);
        if beta <= breakdown {
            // invariant subspace reached; continue from a fresh orthogonal direction
            beta = 0.0;
            if basis.len() < dim {
                let mut fresh = start_vector(dim, salt);
                salt += 1;
                orthogonalize(&basis, &mut fresh);
                let nf = norm(&fresh);
                scale(&mut fresh, 1.0 / nf);
                next = Some(fresh);
            }
        } else {
            let mut nv = w.clone();
            scale(&mut nv, 1.0 / beta);
            next = Some(nv);
        }
        last_beta = beta;
        since_check += 1;

        let m = basis.len();
        let full = m == max_basis || next.is_none();
        if m > k && (full || since_check >= check_every) {
            since_check = 0;
            let (theta, s) = sorted_eigen(t.view((0, 0), (m, m)).into_owned());
            let estimates: Vec<f64> = (0..k).map(|i| (last_beta * s[(m - 1, i)]).abs()).collect();
            best = (theta[..k].to_vec(), estimates.clone());
            let estimated_ok = estimates.iter().all(|&r| r <= target);
            if estimated_ok || next.is_none() {
                let vectors = combine(&basis, &s, k);
                let residual_norms = theta[..k]
                    .iter()
                    .zip(&vectors)
                    .map(|(&l, x)| residual_norm(matrix, x, l))
                    .collect::<Result<Vec<_>>>()?;
                matvecs += k;
                if residual_norms.iter().all(|&r| r <= target) || next.is_none() {
                    let converged = residual_norms.iter().all(|&r| r <= target);
                    return Ok(EigenResult {
                        eigenvalues: theta[..k].to_vec(),
                        eigenvectors: vectors,
                        residual_norms,
                        iterations: matvecs,
                        converged,
                    });
                }
                best.1 = residual_norms;
            }
            if matvecs >= options.max_matvecs {
                return Err(Error::NotConverged {
                    iterations: matvecs,
                    best: best.0,
                    residuals: best.1,
                });
            }
            if full {
                let keep = (k + (m - k) / 2).min(m - 1).max(k);
                let kept = combine(&basis, &s, keep);
                basis = kept;
                t.fill(0.0);
                for (i, &th) in theta[..keep].iter().enumerate() {
                    t[(i, i)] = th;
                }
                if last_beta == 0.0 {
                    // the pending vector is already orthogonal to the whole old basis
                    if let Some(ref mut nv) = next {
                        orthogonalize(&basis, nv);
                        let nn = norm(nv);
                        scale(nv, 1.0 / nn);
                    }
                }
            }
        } else if matvecs >= options.max_matvecs {
            return Err(Error::NotConverged {
                iterations: matvecs,
                best: best.0,
                residuals: best.1,
            });
        }
    }
}

/// Gap of an assembled sector matrix.
pub fn gap_from_matrix(
    matrix: &SparseSymmetricMatrix,
    params: &SpinParams,
    two_m: i32,
    tol: f64,
) -> Result<GapReport> {
    if matrix.dim() < 2 {
        return domain("the sector is one-dimensional and has no gap");
    }
    let norm_one = matrix.norm_one();
    let threshold = zero_threshold(norm_one);
    let k = matrix.dim().min(4);
    let res = lowest_k(matrix, k, tol)?;
    let ground = res.eigenvalues[0];
    if ground.abs() > threshold {
        return Err(Error::GroundStateNotAnnihilated {
            lowest: ground,
            threshold,
        });
    }
    let gap = res.eigenvalues[1];
    if gap <= threshold {
        return Err(Error::Consistency(format!(
            "second eigenvalue {gap:e} is within the zero threshold; ground state is degenerate"
        )));
    }
    let gap_multiplicity = res.eigenvalues[1..]
        .iter()
        .filter(|&&l| (l - gap).abs() <= CLUSTER_TOLERANCE)
        .count();
    Ok(GapReport {
        two_j: params.two_j(),
        length: params.length(),
        two_m,
        delta_inv: params.delta_inv(),
        dim: matrix.dim(),
        ground_energy: ground,
        gap,
        gap_multiplicity,
        zero_threshold: threshold,
        norm_one,
        low_eigenvalues: res.eigenvalues,
        residual_norms: res.residual_norms,
        iterations: res.iterations,
    })
}

/// Spectral gap `γ([1,L], J, M)` of one sector.
pub fn spectral_gap(params: &SpinParams, two_m: i32, tol: f64) -> Result<GapReport> {
    let matrix = assemble_sector(params, two_m)?;
    gap_from_matrix(&matrix, params, two_m, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::assemble_sector;

    #[test]
    fn one_by_one() {
        let m = SparseSymmetricMatrix::from_upper_triplets(1, &[]).unwrap();
        let r = lowest_k(&m, 1, 1e-10).unwrap();
        assert_eq!(r.eigenvalues, vec![0.0]);
    }

    #[test]
    fn rejects_bad_requests() {
        let p = SpinParams::new(2, 3, 0.5).unwrap();
        let h = assemble_sector(&p, 0).unwrap();
        assert!(lowest_k(&h, 0, 1e-8).is_err());
        assert!(lowest_k(&h, 2, 1e-2).is_err());
        assert!(spectral_gap(&SpinParams::new(1, 2, 0.5).unwrap(), 2, 1e-10).is_err());
    }

    #[test]
    fn lanczos_matches_dense_forced() {
        let p = SpinParams::from_delta(2, 5, 4.0).unwrap();
        let h = assemble_sector(&p, 0).unwrap();
        let dense = dense_lowest(&h, 4).unwrap();
        let lan = lanczos(
            &h,
            4,
            1e-10,
            LanczosOptions {
                max_basis: Some(12),
                max_matvecs: 20_000,
            },
        )
        .unwrap();
        assert!(lan.converged);
        for (a, b) in lan.eigenvalues.iter().zip(&dense.eigenvalues) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn ising_gap_is_one() {
        let p = SpinParams::new(4, 6, 0.0).unwrap();
        let g = spectral_gap(&p, 0, 1e-10).unwrap();
        assert!((g.gap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_spectrum_trace() {
        let p = SpinParams::new(2, 4, 0.7).unwrap();
        let h = assemble_sector(&p, 2).unwrap();
        let spec = full_spectrum(&h).unwrap();
        let sum: f64 = spec.iter().sum();
        assert!((sum - h.trace()).abs() <= 1e-8 * h.trace().abs());
        assert!(spec.windows(2).all(|w| w[0] <= w[1]));
    }
}
