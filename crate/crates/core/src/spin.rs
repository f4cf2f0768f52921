//! Model parameters: spin, chain length and anisotropy.

use crate::error::{domain, Result};

/// Parameters of a spin-J chain on `[1, L]`.
///
/// The spin is stored doubled (`two_j = 2J`) so half-integer spins are exact.
/// The anisotropy is stored as `delta_inv = 1/Δ ∈ [0, 1)`; `delta_inv = 0` is
/// the Ising limit where `q = 0` and `η = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinParams {
    two_j: u32,
    length: usize,
    delta_inv: f64,
}

impl SpinParams {
    pub fn new(two_j: u32, length: usize, delta_inv: f64) -> Result<Self> {
        if two_j == 0 {
            return domain("two_j must be positive");
        }
        if length < 2 {
            return domain(format!("chain length must be at least 2, got {length}"));
        }
        check_delta_inv(delta_inv)?;
        Ok(Self {
            two_j,
            length,
            delta_inv,
        })
    }

    /// Builds parameters from Δ > 1 instead of its inverse.
    pub fn from_delta(two_j: u32, length: usize, delta: f64) -> Result<Self> {
        if !(delta > 1.0) || !delta.is_finite() {
            return domain(format!("anisotropy must satisfy Δ > 1, got {delta}"));
        }
        Self::new(two_j, length, 1.0 / delta)
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn spin(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn delta_inv(&self) -> f64 {
        self.delta_inv
    }

    /// Δ, infinite in the Ising limit.
    pub fn delta(&self) -> f64 {
        if self.delta_inv == 0.0 {
            f64::INFINITY
        } else {
            1.0 / self.delta_inv
        }
    }

    pub fn is_ising(&self) -> bool {
        self.delta_inv == 0.0
    }

    /// `q = Δ − √(Δ²−1)`.
    pub fn q(&self) -> f64 {
        q_from_delta_inv(self.delta_inv)
    }

    /// `η = −ln q`.
    pub fn eta(&self) -> f64 {
        eta_from_delta_inv(self.delta_inv)
    }

    /// Boundary-field amplitude `A(Δ) = √(1 − Δ⁻²)`.
    pub fn boundary_amplitude(&self) -> f64 {
        boundary_amplitude(self.delta_inv)
    }

    pub fn with_delta_inv(&self, delta_inv: f64) -> Result<Self> {
        Self::new(self.two_j, self.length, delta_inv)
    }
}

pub(crate) fn check_delta_inv(delta_inv: f64) -> Result<()> {
    if !(0.0..1.0).contains(&delta_inv) {
        return domain(format!("delta_inv must lie in [0, 1), got {delta_inv}"));
    }
    Ok(())
}

/// `q = Δ − √(Δ²−1)` written as `Δ⁻¹ / (1 + √(1−Δ⁻²))`, which has no cancellation.
pub fn q_from_delta_inv(delta_inv: f64) -> f64 {
    delta_inv / (1.0 + (1.0 - delta_inv * delta_inv).sqrt())
}

pub fn eta_from_delta_inv(delta_inv: f64) -> f64 {
    if delta_inv == 0.0 {
        f64::INFINITY
    } else {
        // acosh(1/Δ⁻¹) loses accuracy as Δ⁻¹ → 1; −ln q does not.
        -q_from_delta_inv(delta_inv).ln()
    }
}

pub fn delta_inv_from_eta(eta: f64) -> f64 {
    1.0 / eta.cosh()
}

pub fn boundary_amplitude(delta_inv: f64) -> f64 {
    (1.0 - delta_inv * delta_inv).sqrt()
}
