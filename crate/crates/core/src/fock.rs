//! Truncated Fock-space expansion, used as a brute-force oracle against the
//! closed-form Gram-matrix algebra.

use num_complex::Complex64 as C64;

use crate::coherent::SingleModeState;
use crate::error::{Error, Result};

/// Relative tail mass |c_{n_max}|²/‖·‖² above which a truncation is rejected.
pub const FOCK_TAIL_TOL: f64 = 1e-10;

/// Photon-number cutoff for a state with largest amplitude modulus
/// `max_abs_amp`: with m = max|α|², n_max = ⌈m + 10√m + 20⌉. The Poisson tail
/// beyond this point carries less than 1e−10 of the population.
pub fn truncation_cutoff(max_abs_amp: f64) -> usize {
    let m = max_abs_amp * max_abs_amp;
    (m + 10.0 * m.sqrt() + 20.0).ceil() as usize
}

/// A state expanded over photon-number states |0⟩ … |n_max⟩.
#[derive(Clone, Debug)]
pub struct FockVector {
    coeffs: Vec<C64>,
}

impl FockVector {
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Fidelity |⟨self|other⟩|²/(‖self‖²‖other‖²); insensitive to a global phase.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr() / (self.norm_sqr() * other.norm_sqr())
    }

    /// Multiply the coefficient of |n⟩ by exp(i·phase(n)).
    pub fn apply_diagonal_phase<F: Fn(usize) -> f64>(&mut self, phase: F) {
        for (n, c) in self.coeffs.iter_mut().enumerate() {
            *c *= C64::from_polar(1.0, phase(n));
        }
    }
}

/// Expand a coherent superposition over the Fock basis up to `n_max`.
///
/// The coefficient of |n⟩ is Σ_terms c · e^{−|α|²/2} αⁿ/√(n!), accumulated in
/// log space so that large amplitudes neither overflow nor lose precision.
pub fn fock_expansion(s: &SingleModeState, n_max: usize) -> Result<FockVector> {
    let mut coeffs = vec![C64::new(0.0, 0.0); n_max + 1];
    for &(c, a) in s.terms() {
        let r = a.modulus();
        if r == 0.0 {
            coeffs[0] += c;
            continue;
        }
        let log_r = r.ln();
        let theta = a.as_complex().arg();
        let mut log_fact = 0.0; // ln(n!)
        for (n, slot) in coeffs.iter_mut().enumerate() {
            if n > 0 {
                log_fact += (n as f64).ln();
            }
            let log_mag = -r * r / 2.0 + n as f64 * log_r - log_fact / 2.0;
            *slot += c * C64::from_polar(log_mag.exp(), n as f64 * theta);
        }
    }
    let total = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let tail = coeffs[n_max].norm_sqr();
    if tail > FOCK_TAIL_TOL * total {
        return Err(Error::Truncation {
            n_max,
            tail: tail / total,
            tol: FOCK_TAIL_TOL,
        });
    }
    Ok(FockVector { coeffs })
}
