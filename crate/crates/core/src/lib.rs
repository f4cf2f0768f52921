//! Spectral gap of the ferromagnetic spin-J XXZ chain with kink boundary fields.
//!
//! Three independent routes to the gap live side by side: exact diagonalization
//! of fixed-magnetization sectors ([`eigensolve`]), the spin-ladder overlap
//! bound ([`sos_bound`]) and the large-J boson asymptotics ([`boson`]). The
//! second-order Ising perturbation formulas are in [`ising_perturb`].

pub mod basis;
pub mod boson;
pub mod eigensolve;
pub mod error;
pub mod ground_state;
pub mod hamiltonian;
pub mod ising_perturb;
pub mod sos_bound;
pub mod spin;
pub mod tridiag;

pub use basis::{enumerate_sector, sector_dimension, SectorBasis, SectorConfig};
pub use boson::{
    boson_matrix, boson_vs_exact, gamma_infinity, jacobi_operator, optimal_anisotropy_scan,
    solve_interface_phase, BosonComparison, GammaInfinity, InterfacePhase, OperatorKind,
    OptimalAnisotropy, TridiagonalOperator,
};
pub use eigensolve::{dense_spectrum, full_spectrum, lowest_k, spectral_gap, EigenResult, GapReport};
pub use error::{Error, Result};
pub use ground_state::{
    heine_check, kink_vector, residual, spin_half_norm_sq, KinkGroundState, QSeriesValue,
    SpinHalfNorm,
};
pub use hamiltonian::{
    assemble_sector, staggered_conjugate_spectrum_check, BondAmplitudes, SparseSymmetricMatrix,
};
pub use ising_perturb::{
    curvature_degenerate, curvature_nondegenerate, curvature_table, ising_excitation_energy,
    numeric_curvature, CurvatureResult,
};
pub use sos_bound::{
    build_overlap_matrix, contingency_count, crude_tail_bound, delta_and_bound,
    restricted_partitions, OverlapMatrix, RestrictedPartition, SosGapBound,
};
pub use spin::SpinParams;
