//! Exact closed-form algebra of finite coherent-state superpositions.
//!
//! States are stored as lists of `(coefficient, amplitude)` terms over the
//! (non-orthogonal) coherent basis. Overlaps, norms and fidelities are
//! evaluated through the Gram matrix of pairwise coherent overlaps, which is
//! exact for any amplitude, with no Fock truncation involved.
//!
//! Quadrature convention, used consistently across the crate: the measured
//! quadrature is x = (a + a†)/√2, so a coherent state of amplitude `b` has a
//! Gaussian quadrature distribution of variance 1/2 centered at √2·Re b.

use num_complex::Complex64 as C64;
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};

/// Amplitudes closer than this (Euclidean distance in the complex plane) are
/// treated as the same coherent state and merged by summing coefficients.
pub const MERGE_TOL: f64 = 1e-12;

/// Relative imaginary residue allowed when a Gram quadratic form is reduced
/// to a real number.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

/// A point in phase space labelling a coherent state.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ComplexAmplitude {
    pub re: f64,
    pub im: f64,
}

impl ComplexAmplitude {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        C64::from_polar(r, theta).into()
    }

    pub fn zero() -> Self {
        Self { re: 0.0, im: 0.0 }
    }

    pub fn as_complex(self) -> C64 {
        C64::new(self.re, self.im)
    }

    pub fn modulus(self) -> f64 {
        self.as_complex().norm()
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Euclidean distance to another amplitude.
    pub fn distance(self, other: Self) -> f64 {
        (self.as_complex() - other.as_complex()).norm()
    }

    /// The point-reflected amplitude −α.
    pub fn reflected(self) -> Self {
        Self { re: -self.re, im: -self.im }
    }

    /// Center of the quadrature distribution of this coherent state, √2·Re α.
    pub fn quadrature_mean(self) -> f64 {
        SQRT_2 * self.re
    }
}

impl From<C64> for ComplexAmplitude {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexAmplitude> for C64 {
    fn from(a: ComplexAmplitude) -> Self {
        C64::new(a.re, a.im)
    }
}

/// A finite superposition of coherent states of a single mode.
///
/// Terms are merged on construction: amplitudes within [`MERGE_TOL`] collapse
/// into one term with summed coefficients, and terms whose coefficient sums
/// to exactly zero are dropped.
#[derive(Clone, Debug)]
pub struct SingleModeState {
    terms: Vec<(C64, ComplexAmplitude)>,
}

impl SingleModeState {
    pub fn new(terms: Vec<(C64, ComplexAmplitude)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Domain("state must have at least one term".into()));
        }
        for (c, a) in &terms {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Domain(format!("non-finite coefficient {c}")));
            }
            if !a.is_finite() {
                return Err(Error::Domain(format!(
                    "non-finite amplitude ({}, {})",
                    a.re, a.im
                )));
            }
        }
        let mut merged: Vec<(C64, ComplexAmplitude)> = Vec::with_capacity(terms.len());
        for (c, a) in terms {
            match merged.iter_mut().find(|(_, b)| b.distance(a) <= MERGE_TOL) {
                Some((cm, _)) => *cm += c,
                None => merged.push((c, a)),
            }
        }
        merged.retain(|(c, _)| c.re != 0.0 || c.im != 0.0);
        if merged.is_empty() {
            return Err(Error::Domain(
                "all terms cancelled: state has no support".into(),
            ));
        }
        Ok(Self { terms: merged })
    }

    /// The coherent state |amp⟩ as a one-term superposition.
    pub fn coherent(amp: ComplexAmplitude) -> Self {
        Self { terms: vec![(C64::new(1.0, 0.0), amp)] }
    }

    pub fn vacuum() -> Self {
        Self::coherent(ComplexAmplitude::zero())
    }

    pub fn terms(&self) -> &[(C64, ComplexAmplitude)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest amplitude modulus over the terms.
    pub fn max_abs_amplitude(&self) -> f64 {
        self.terms.iter().map(|(_, a)| a.modulus()).fold(0.0, f64::max)
    }

    /// The state with every coefficient multiplied by `s`.
    pub fn scaled(&self, s: C64) -> Self {
        Self {
            terms: self.terms.iter().map(|&(c, a)| (s * c, a)).collect(),
        }
    }

    /// The same superposition with every amplitude point-reflected, α → −α.
    pub fn point_reflected(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|&(c, a)| (c, a.reflected()))
                .collect(),
        }
    }

    /// The unit-norm copy of this state.
    pub fn normalized(&self) -> Result<Self> {
        let n = state_norm(self)?;
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }
}

/// A finite superposition of coherent-state pairs over two modes.
#[derive(Clone, Debug)]
pub struct TwoModeState {
    terms: Vec<(C64, ComplexAmplitude, ComplexAmplitude)>,
}

impl TwoModeState {
    pub fn new(terms: Vec<(C64, ComplexAmplitude, ComplexAmplitude)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Domain("state must have at least one term".into()));
        }
        for (c, a3, a4) in &terms {
            if !(c.re.is_finite() && c.im.is_finite() && a3.is_finite() && a4.is_finite()) {
                return Err(Error::Domain("non-finite two-mode term".into()));
            }
        }
        let mut merged: Vec<(C64, ComplexAmplitude, ComplexAmplitude)> =
            Vec::with_capacity(terms.len());
        for (c, a3, a4) in terms {
            let near = merged.iter_mut().find(|(_, b3, b4)| {
                let d3 = b3.distance(a3);
                let d4 = b4.distance(a4);
                (d3 * d3 + d4 * d4).sqrt() <= MERGE_TOL
            });
            match near {
                Some((cm, _, _)) => *cm += c,
                None => merged.push((c, a3, a4)),
            }
        }
        merged.retain(|(c, _, _)| c.re != 0.0 || c.im != 0.0);
        if merged.is_empty() {
            return Err(Error::Domain(
                "all terms cancelled: state has no support".into(),
            ));
        }
        Ok(Self { terms: merged })
    }

    /// The product state |a⟩ ⊗ |b⟩.
    pub fn product(a: ComplexAmplitude, b: ComplexAmplitude) -> Self {
        Self { terms: vec![(C64::new(1.0, 0.0), a, b)] }
    }

    pub fn terms(&self) -> &[(C64, ComplexAmplitude, ComplexAmplitude)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest |Re| over the mode-3 amplitudes; sets homodyne grid bounds.
    pub fn max_abs_re3(&self) -> f64 {
        self.terms.iter().map(|(_, a3, _)| a3.re.abs()).fold(0.0, f64::max)
    }
}

/// Overlap ⟨a|b⟩ = exp(−|a|²/2 − |b|²/2 + a̅·b) of two coherent states.
pub fn coherent_overlap(a: ComplexAmplitude, b: ComplexAmplitude) -> C64 {
    let za = a.as_complex();
    let zb = b.as_complex();
    ((-za.norm_sqr() - zb.norm_sqr()) / 2.0 + za.conj() * zb).exp()
}

/// Quadrature wavefunction ⟨x|b⟩ of the coherent state |b⟩:
///
/// π^{−1/4} exp(−(x − √2·Re b)²/2 + i√2·x·Im b − i·Re b·Im b)
///
/// Its squared modulus is a Gaussian of variance 1/2 centered at √2·Re b.
pub fn quadrature_wavefunction(x: f64, b: ComplexAmplitude) -> C64 {
    let dx = x - SQRT_2 * b.re;
    let phase = SQRT_2 * x * b.im - b.re * b.im;
    std::f64::consts::PI.powf(-0.25) * C64::new(-dx * dx / 2.0, phase).exp()
}

/// Quadrature wavefunction ⟨x|s⟩ of a superposition.
pub fn quadrature_amplitude(s: &SingleModeState, x: f64) -> C64 {
    s.terms
        .iter()
        .map(|&(c, a)| c * quadrature_wavefunction(x, a))
        .sum()
}

/// Inner product ⟨s1|s2⟩ through the cross Gram matrix.
pub fn state_inner(s1: &SingleModeState, s2: &SingleModeState) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &(c1, a1) in &s1.terms {
        for &(c2, a2) in &s2.terms {
            acc += c1.conj() * c2 * coherent_overlap(a1, a2);
        }
    }
    acc
}

/// Inner product ⟨t1|t2⟩ of two-mode states.
pub fn two_mode_inner(t1: &TwoModeState, t2: &TwoModeState) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &(c1, a3, a4) in &t1.terms {
        for &(c2, b3, b4) in &t2.terms {
            acc += c1.conj() * c2 * coherent_overlap(a3, b3) * coherent_overlap(a4, b4);
        }
    }
    acc
}

fn gram_form_to_real(z: C64, what: &str) -> Result<f64> {
    if z.im.abs() > IMAG_RESIDUE_TOL * z.re.abs() {
        return Err(Error::Numerical(format!(
            "{what} has imaginary residue {} relative to {}",
            z.im, z.re
        )));
    }
    if z.re <= 0.0 {
        return Err(Error::Numerical(format!(
            "{what} evaluated non-positive ({}); reduce the amplitude scale or merge terms",
            z.re
        )));
    }
    Ok(z.re)
}

/// Norm √⟨s|s⟩ of a superposition, evaluated through the Gram matrix.
pub fn state_norm(s: &SingleModeState) -> Result<f64> {
    Ok(gram_form_to_real(state_inner(s, s), "norm²")?.sqrt())
}

/// Norm of a two-mode state.
pub fn two_mode_norm(t: &TwoModeState) -> Result<f64> {
    Ok(gram_form_to_real(two_mode_inner(t, t), "two-mode norm²")?.sqrt())
}

/// Fidelity |⟨s1|s2⟩|² / (‖s1‖²‖s2‖²) ∈ [0, 1].
pub fn state_fidelity(s1: &SingleModeState, s2: &SingleModeState) -> Result<f64> {
    let n1 = gram_form_to_real(state_inner(s1, s1), "norm²")?;
    let n2 = gram_form_to_real(state_inner(s2, s2), "norm²")?;
    let ip = state_inner(s1, s2);
    Ok((ip.norm_sqr() / (n1 * n2)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn amp(re: f64, im: f64) -> ComplexAmplitude {
        ComplexAmplitude::new(re, im)
    }

    /// Brute-force overlap through the Fock series
    /// e^{−(|a|²+|b|²)/2} Σ_n (a̅·b)^n/n!, independent of the closed form.
    fn overlap_series(a: ComplexAmplitude, b: ComplexAmplitude, n_max: usize) -> C64 {
        let z = a.as_complex().conj() * b.as_complex();
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        for n in 1..=n_max {
            term *= z / n as f64;
            sum += term;
        }
        sum * (-(a.modulus().powi(2) + b.modulus().powi(2)) / 2.0).exp()
    }

    #[test]
    fn overlap_identity_cases() {
        assert_eq!(coherent_overlap(amp(0.0, 0.0), amp(0.0, 0.0)), c(1.0, 0.0));
        let a = amp(2.0, 3.0);
        let s = coherent_overlap(a, a);
        assert!((s - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn overlap_vacuum_unit_matches_series() {
        let got = coherent_overlap(amp(0.0, 0.0), amp(1.0, 0.0));
        let expect = overlap_series(amp(0.0, 0.0), amp(1.0, 0.0), 40);
        assert!((got - expect).norm() < 1e-14);
        assert!((got.re - (-0.5f64).exp()).abs() < 1e-12);
        assert!((got.re - 0.606_530_659_7).abs() < 1e-9);
    }

    #[test]
    fn overlap_complex_matches_series() {
        let a = amp(1.1, -0.4);
        let b = amp(-0.7, 2.2);
        let got = coherent_overlap(a, b);
        let expect = overlap_series(a, b, 60);
        assert!((got - expect).norm() < 1e-13);
    }

    #[test]
    fn quadrature_vacuum_at_origin() {
        let v = quadrature_wavefunction(0.0, amp(0.0, 0.0));
        assert!((v.re - std::f64::consts::PI.powf(-0.25)).abs() < 1e-15);
        assert!((v.re - 0.751_125_544_5).abs() < 1e-9);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn quadrature_is_normalized() {
        // ∫ |⟨x|b⟩|² dx = 1 by trapezoid over [√2 Re b − 10, √2 Re b + 10].
        let b = amp(1.3, -0.7);
        let center = SQRT_2 * b.re;
        let n = 40_001;
        let (lo, hi) = (center - 10.0, center + 10.0);
        let h = (hi - lo) / (n - 1) as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let x = lo + i as f64 * h;
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += w * quadrature_wavefunction(x, b).norm_sqr();
        }
        assert!((acc * h - 1.0).abs() < 1e-10);
    }

    #[test]
    fn quadrature_peaks_at_sqrt2_re() {
        // dense grid search, step 1e-4
        let b = amp(2.0, 1.0);
        let mut best = (f64::MIN, 0.0);
        let mut x = 2.7;
        while x <= 3.0 {
            let v = quadrature_wavefunction(x, b).norm();
            if v > best.0 {
                best = (v, x);
            }
            x += 1e-4;
        }
        assert!((best.1 - 2.0 * SQRT_2).abs() < 1e-4);
    }

    #[test]
    fn merge_collapses_duplicates() {
        let s = SingleModeState::new(vec![
            (c(1.0, 0.0), amp(1.0, 2.0)),
            (c(0.5, -1.0), amp(1.0, 2.0 + 1e-13)),
            (c(2.0, 0.0), amp(-1.0, 0.0)),
        ])
        .unwrap();
        assert_eq!(s.num_terms(), 2);
        let merged = s.terms().iter().find(|(_, a)| a.re == 1.0).unwrap();
        assert!((merged.0 - c(1.5, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn cancelled_state_is_rejected() {
        let r = SingleModeState::new(vec![
            (c(1.0, 0.0), amp(0.3, 0.0)),
            (c(-1.0, 0.0), amp(0.3, 0.0)),
        ]);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn non_finite_inputs_are_rejected() {
        assert!(SingleModeState::new(vec![(c(f64::NAN, 0.0), amp(0.0, 0.0))]).is_err());
        assert!(SingleModeState::new(vec![(c(1.0, 0.0), amp(f64::INFINITY, 0.0))]).is_err());
        assert!(SingleModeState::new(vec![]).is_err());
    }

    #[test]
    fn norm_of_single_term_is_one() {
        let s = SingleModeState::coherent(amp(3.7, -1.2));
        assert!((state_norm(&s).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn norm_of_symmetric_pair_matches_closed_form() {
        // ‖|β⟩+|−β⟩‖ = √(2 + 2e^{−|α_k−α_l|²}) with β = (α_k−α_l)/√2
        let ak = amp(1.4, 0.3);
        let al = amp(-0.2, 1.1);
        let d = ak.as_complex() - al.as_complex();
        let beta: ComplexAmplitude = (d / SQRT_2).into();
        let s = SingleModeState::new(vec![
            (c(1.0, 0.0), beta),
            (c(1.0, 0.0), beta.reflected()),
        ])
        .unwrap();
        let expect = (2.0 + 2.0 * (-d.norm_sqr()).exp()).sqrt();
        assert!((state_norm(&s).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn fidelity_self_is_one() {
        let s = SingleModeState::new(vec![
            (c(0.8, 0.1), amp(1.0, -1.0)),
            (c(-0.3, 0.4), amp(0.2, 0.9)),
        ])
        .unwrap();
        assert!((state_fidelity(&s, &s).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fidelity_vacuum_vs_displaced() {
        // |⟨0|β⟩|² = e^{−|β|²} for β = 2
        let f = state_fidelity(
            &SingleModeState::vacuum(),
            &SingleModeState::coherent(amp(2.0, 0.0)),
        )
        .unwrap();
        assert!((f - (-4.0f64).exp()).abs() < 1e-12);
        assert!((f - 0.018_315_638_9).abs() < 1e-9);
    }

    #[test]
    fn two_mode_merge_and_norm() {
        let t = TwoModeState::new(vec![
            (c(0.5, 0.0), amp(1.0, 0.0), amp(0.0, 1.0)),
            (c(0.5, 0.0), amp(1.0, 0.0), amp(0.0, 1.0)),
        ])
        .unwrap();
        assert_eq!(t.num_terms(), 1);
        assert!((two_mode_norm(&t).unwrap() - 1.0).abs() < 1e-14);
    }
}
