//! Python module `xxz_gap`.

use num_bigint::BigUint;
use pyo3::exceptions::{PyMemoryError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use xxz_core as core;

fn to_py(e: core::Error) -> PyErr {
    use core::Error as E;
    let msg = e.to_string();
    match e {
        E::Domain(_) | E::LengthMismatch { .. } | E::InfiniteDegeneracy { .. } | E::EnlargeWindow { .. } => {
            PyValueError::new_err(msg)
        }
        E::TooLarge { .. } | E::Overflow => PyMemoryError::new_err(msg),
        _ => PyRuntimeError::new_err(msg),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

/// Spin, chain length and inverse anisotropy.
#[pyclass(frozen, name = "SpinParams", module = "xxz_gap")]
struct PySpinParams(core::SpinParams);

#[pymethods]
impl PySpinParams {
    #[new]
    fn new(two_j: u32, length: usize, delta_inv: f64) -> PyResult<Self> {
        core::SpinParams::new(two_j, length, delta_inv).py().map(Self)
    }

    #[staticmethod]
    fn from_delta(two_j: u32, length: usize, delta: f64) -> PyResult<Self> {
        core::SpinParams::from_delta(two_j, length, delta).py().map(Self)
    }

    #[getter]
    fn two_j(&self) -> u32 {
        self.0.two_j()
    }

    #[getter]
    fn length(&self) -> usize {
        self.0.length()
    }

    #[getter]
    fn delta_inv(&self) -> f64 {
        self.0.delta_inv()
    }

    #[getter]
    fn q(&self) -> f64 {
        self.0.q()
    }

    fn __repr__(&self) -> String {
        format!(
            "SpinParams(two_j={}, length={}, delta_inv={})",
            self.0.two_j(),
            self.0.length(),
            self.0.delta_inv()
        )
    }
}

/// Gap of one magnetization sector.
#[pyclass(frozen, get_all, name = "GapReport", module = "xxz_gap")]
struct PyGapReport {
    two_m: i32,
    dim: usize,
    ground_energy: f64,
    gap: f64,
    gap_multiplicity: usize,
    zero_threshold: f64,
    low_eigenvalues: Vec<f64>,
    residual_norms: Vec<f64>,
}

impl From<core::GapReport> for PyGapReport {
    fn from(r: core::GapReport) -> Self {
        Self {
            two_m: r.two_m,
            dim: r.dim,
            ground_energy: r.ground_energy,
            gap: r.gap,
            gap_multiplicity: r.gap_multiplicity,
            zero_threshold: r.zero_threshold,
            low_eigenvalues: r.low_eigenvalues,
            residual_norms: r.residual_norms,
        }
    }
}

#[pymethods]
impl PyGapReport {
    fn __repr__(&self) -> String {
        format!("GapReport(two_m={}, dim={}, gap={})", self.two_m, self.dim, self.gap)
    }
}

/// Lower bound from the overlap matrix.
#[pyclass(frozen, get_all, name = "SosGapBound", module = "xxz_gap")]
struct PySosGapBound {
    delta_inv: f64,
    q: f64,
    delta: f64,
    bound: f64,
    partitions: usize,
}

#[pyfunction]
fn sector_dimension(two_j: u32, length: usize, two_m: i32) -> PyResult<u64> {
    core::sector_dimension(two_j, length, two_m).py()
}

/// Configurations as lists of `2m` values, in basis order.
#[pyfunction]
fn sector_basis(two_j: u32, length: usize, two_m: i32) -> PyResult<Vec<Vec<i32>>> {
    Ok(core::enumerate_sector(two_j, length, two_m)
        .py()?
        .into_iter()
        .map(|c| c.values().to_vec())
        .collect())
}

type Triplets = (usize, Vec<usize>, Vec<usize>, Vec<f64>);

/// Upper-triangle triplets `(dim, rows, cols, values)` of the sector Hamiltonian.
#[pyfunction]
fn hamiltonian(params: &PySpinParams, two_m: i32) -> PyResult<Triplets> {
    let h = core::assemble_sector(&params.0, two_m).py()?;
    let (mut rows, mut cols, mut vals) = (Vec::new(), Vec::new(), Vec::new());
    for (r, c, v) in h.entries() {
        rows.push(r);
        cols.push(c);
        vals.push(v);
    }
    Ok((h.dim(), rows, cols, vals))
}

#[pyfunction]
fn full_spectrum(py: Python<'_>, params: &PySpinParams, two_m: i32) -> PyResult<Vec<f64>> {
    let p = params.0;
    py.detach(move || core::full_spectrum(&core::assemble_sector(&p, two_m)?)).py()
}

#[pyfunction]
#[pyo3(signature = (params, two_m, k, tol = 1e-10))]
fn lowest_eigenvalues(py: Python<'_>, params: &PySpinParams, two_m: i32, k: usize, tol: f64) -> PyResult<Vec<f64>> {
    let p = params.0;
    py.detach(move || core::lowest_k(&core::assemble_sector(&p, two_m)?, k, tol))
        .py()
        .map(|r| r.eigenvalues)
}

#[pyfunction]
#[pyo3(signature = (params, two_m, tol = 1e-10))]
fn spectral_gap(py: Python<'_>, params: &PySpinParams, two_m: i32, tol: f64) -> PyResult<PyGapReport> {
    let p = params.0;
    py.detach(move || core::spectral_gap(&p, two_m, tol)).py().map(Into::into)
}

/// Normalized kink ground state in basis order.
#[pyfunction]
fn kink_ground_state(params: &PySpinParams, two_m: i32) -> PyResult<Vec<f64>> {
    core::kink_vector(&params.0, two_m).py().map(|g| g.coefficients)
}

#[pyfunction]
fn ground_state_residual(params: &PySpinParams, two_m: i32) -> PyResult<f64> {
    core::residual(&params.0, two_m).py()
}

#[pyfunction]
fn staggered_check(params: &PySpinParams, two_m: i32) -> PyResult<bool> {
    core::staggered_conjugate_spectrum_check(&params.0, two_m).py()
}

/// Number of 0-1 matrices with row sums `r` and column sums `c`.
#[pyfunction]
fn contingency_count(r: Vec<u32>, c: Vec<u32>) -> BigUint {
    core::contingency_count(&r, &c)
}

#[pyfunction]
fn restricted_partitions(length: usize, two_j: u32, n: u32) -> PyResult<Vec<Vec<u32>>> {
    Ok(core::restricted_partitions(length, two_j, n)
        .py()?
        .into_iter()
        .map(|p| p.parts().to_vec())
        .collect())
}

/// Overlap matrix rows, indexed like `restricted_partitions`.
#[pyfunction]
fn overlap_matrix(length: usize, two_j: u32, n: u32, q: f64) -> PyResult<Vec<Vec<f64>>> {
    let m = core::build_overlap_matrix(length, two_j, n, q).py()?.matrix;
    Ok(m.row_iter().map(|r| r.iter().copied().collect()).collect())
}

#[pyfunction]
fn sos_bound(length: usize, two_j: u32, n: u32, delta_inv: f64) -> PyResult<PySosGapBound> {
    let b = core::delta_and_bound(length, two_j, n, delta_inv).py()?;
    Ok(PySosGapBound {
        delta_inv: b.delta_inv,
        q: b.q,
        delta: b.delta,
        bound: b.bound,
        partitions: b.partitions,
    })
}

/// `(two_j, n, curvature)` with the curvature as a rational string or `"-inf"`.
#[pyfunction]
fn curvature_table(max_two_j: u32) -> Vec<(u32, u32, String)> {
    core::curvature_table(max_two_j)
        .into_iter()
        .map(|c| {
            let s = match c.curvature {
                Some(r) if *r.denom() == 1 => r.numer().to_string(),
                Some(r) => format!("{}/{}", r.numer(), r.denom()),
                None => "-inf".into(),
            };
            (c.two_j, c.n, s)
        })
        .collect()
}

/// Lowest eigenvalues of the boson coupling matrix on `1..=length`.
#[pyfunction]
fn boson_spectrum(length: usize, eta: f64, r: f64) -> PyResult<Vec<f64>> {
    core::boson_matrix(length, eta, r).py()?.eigenvalues().py()
}

/// `(gamma, r, doubling_converged)` for the truncated Jacobi operator.
#[pyfunction]
#[pyo3(signature = (mu, delta_inv, truncation = 50, tol = 1e-8))]
fn gamma_infinity(mu: f64, delta_inv: f64, truncation: usize, tol: f64) -> PyResult<(f64, f64, bool)> {
    let g = core::gamma_infinity(mu, delta_inv, truncation, tol).py()?;
    Ok((g.gamma, g.r, g.doubling_converged))
}

/// `(argmax Δ⁻¹, max γ)` of the symmetric large-J gap.
#[pyfunction]
#[pyo3(signature = (truncation = 500, grid = 99, refine_tol = 1e-6))]
fn optimal_anisotropy(py: Python<'_>, truncation: usize, grid: usize, refine_tol: f64) -> PyResult<(f64, f64)> {
    let o = py.detach(move || core::optimal_anisotropy_scan(truncation, grid, refine_tol)).py()?;
    Ok((o.argmax, o.gamma_max))
}

/// `(exact gap / J, λ₁, relative deviation)`.
#[pyfunction]
#[pyo3(signature = (two_j, length, delta_inv, two_m, tol = 1e-10))]
fn boson_vs_exact(two_j: u32, length: usize, delta_inv: f64, two_m: i32, tol: f64) -> PyResult<(f64, f64, f64)> {
    let c = core::boson_vs_exact(two_j, length, delta_inv, two_m, tol).py()?;
    Ok((c.exact_gap_over_j, c.lambda1, c.relative_deviation))
}

#[pymodule]
fn xxz_gap(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpinParams>()?;
    m.add_class::<PyGapReport>()?;
    m.add_class::<PySosGapBound>()?;
    m.add_function(wrap_pyfunction!(sector_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(sector_basis, m)?)?;
    m.add_function(wrap_pyfunction!(hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(full_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(lowest_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_gap, m)?)?;
    m.add_function(wrap_pyfunction!(kink_ground_state, m)?)?;
    m.add_function(wrap_pyfunction!(ground_state_residual, m)?)?;
    m.add_function(wrap_pyfunction!(staggered_check, m)?)?;
    m.add_function(wrap_pyfunction!(contingency_count, m)?)?;
    m.add_function(wrap_pyfunction!(restricted_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(overlap_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(sos_bound, m)?)?;
    m.add_function(wrap_pyfunction!(curvature_table, m)?)?;
    m.add_function(wrap_pyfunction!(boson_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_infinity, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_anisotropy, m)?)?;
    m.add_function(wrap_pyfunction!(boson_vs_exact, m)?)?;
    Ok(())
}
