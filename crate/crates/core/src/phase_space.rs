//! Phase-space output: amplitude constellations for scatter plots and Wigner
//! function grids, computed from the analytic pairwise coherent-term formula
//! (exact at any amplitude, no Fock-space numerics involved).
//!
//! Axes follow the crate-wide quadrature convention, so a coherent state of
//! amplitude b peaks at (√2·Re b, √2·Im b).

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::{PI, SQRT_2};

use crate::coherent::{state_inner, ComplexAmplitude, SingleModeState};
use crate::error::{Error, Result};

/// Allowed deviation of the raw grid integral from the state norm before the
/// grid is rejected as not covering the state.
pub const GRID_COVERAGE_BOUND: f64 = 1e-2;

/// Largest imaginary residue tolerated in a summed Wigner value before the
/// imaginary part is discarded.
pub const WIGNER_IMAG_RESIDUE: f64 = 1e-10;

/// One constellation entry: a coherent amplitude with its coefficient.
#[derive(Copy, Clone, Debug)]
pub struct ConstellationPoint {
    pub amp: ComplexAmplitude,
    pub coeff: C64,
    /// |coeff|², the bare term weight (ignores cross overlaps).
    pub weight: f64,
}

/// The raw amplitude/coefficient table of a state, in term order.
pub fn constellation(state: &SingleModeState) -> Vec<ConstellationPoint> {
    state
        .terms()
        .iter()
        .map(|&(coeff, amp)| ConstellationPoint {
            amp,
            coeff,
            weight: coeff.norm_sqr(),
        })
        .collect()
}

/// A rectangular phase-space grid.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, p_min: f64, p_max: f64, nx: usize, np: usize) -> Result<Self> {
        let finite = [x_min, x_max, p_min, p_max].iter().all(|v| v.is_finite());
        if !finite || x_min >= x_max || p_min >= p_max {
            return Err(Error::Domain(format!(
                "grid bounds must be finite with x_min < x_max and p_min < p_max, \
                 got x ∈ [{x_min}, {x_max}], p ∈ [{p_min}, {p_max}]"
            )));
        }
        if nx < 2 || np < 2 {
            return Err(Error::Domain(format!(
                "grid needs at least 2 points per axis, got {nx}×{np}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            p_min,
            p_max,
            nx,
            np,
        })
    }

    /// Symmetric grid covering the constellation of `state` with the given
    /// margin on every side.
    pub fn covering(state: &SingleModeState, margin: f64, resolution: usize) -> Result<Self> {
        let mut extent: f64 = 0.0;
        for &(_, a) in state.terms() {
            extent = extent.max((SQRT_2 * a.re).abs()).max((SQRT_2 * a.im).abs());
        }
        let half = extent + margin;
        Self::new(-half, half, -half, half, resolution, resolution)
    }

    /// Smallest distance from any constellation point of `state` to the grid
    /// boundary (negative if a point lies outside).
    pub fn margin_around(&self, state: &SingleModeState) -> f64 {
        let mut m = f64::INFINITY;
        for &(_, a) in state.terms() {
            let (x, p) = (SQRT_2 * a.re, SQRT_2 * a.im);
            m = m
                .min(x - self.x_min)
                .min(self.x_max - x)
                .min(p - self.p_min)
                .min(self.p_max - p);
        }
        m
    }

    pub fn x_at(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.step_x()
    }

    pub fn p_at(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.step_p()
    }

    pub fn step_x(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn step_p(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }
}

/// Wigner function sampled on a grid, normalized to unit grid integral.
#[derive(Clone, Debug)]
pub struct WignerGrid {
    spec: GridSpec,
    values: Vec<f64>,
}

impl WignerGrid {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Row-major values, row index = x index.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, ix: usize, ip: usize) -> f64 {
        self.values[ix * self.spec.np + ip]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Trapezoid integral over the grid.
    pub fn integral(&self) -> f64 {
        let (nx, np) = (self.spec.nx, self.spec.np);
        let mut acc = 0.0;
        for ix in 0..nx {
            let wx = if ix == 0 || ix == nx - 1 { 0.5 } else { 1.0 };
            for ip in 0..np {
                let wp = if ip == 0 || ip == np - 1 { 0.5 } else { 1.0 };
                acc += wx * wp * self.value(ix, ip);
            }
        }
        acc * self.spec.step_x() * self.spec.step_p()
    }
}

// Per-pair constants of the closed-form Wigner sum. For the operator
// |a_j⟩⟨a_k| the contribution at (x, p) is
//   w · exp(−(x−x̄)² − (p−p̄)²) · exp(i[Δx(p̄−p) + Δp·x])
// with x̄, p̄ the midpoint and Δx, Δp the difference of the two phase-space
// points, and w absorbing the coefficients, the 1/π prefactor and the fixed
// phase −(x_j p_j − x_k p_k)/2.
struct PairTerm {
    w: C64,
    x_mid: f64,
    p_mid: f64,
    dx: f64,
    dp: f64,
}

/// Wigner function of a normalized state on the given grid.
///
/// The grid integral must land within [`GRID_COVERAGE_BOUND`] of 1, after
/// which values are rescaled so the trapezoid integral is exactly 1.
pub fn wigner(state: &SingleModeState, spec: &GridSpec) -> Result<WignerGrid> {
    let ip = state_inner(state, state);
    if (ip.re - 1.0).abs() > 1e-8 {
        return Err(Error::Domain(format!(
            "wigner expects a normalized state, got norm² = {}",
            ip.re
        )));
    }
    let mut pairs = Vec::with_capacity(state.num_terms() * state.num_terms());
    for &(cj, aj) in state.terms() {
        for &(ck, ak) in state.terms() {
            let (xj, pj) = (SQRT_2 * aj.re, SQRT_2 * aj.im);
            let (xk, pk) = (SQRT_2 * ak.re, SQRT_2 * ak.im);
            let fixed_phase = -(xj * pj - xk * pk) / 2.0;
            pairs.push(PairTerm {
                w: cj * ck.conj() * C64::from_polar(1.0 / PI, fixed_phase),
                x_mid: (xj + xk) / 2.0,
                p_mid: (pj + pk) / 2.0,
                dx: xj - xk,
                dp: pj - pk,
            });
        }
    }
    let rows: Vec<(Vec<f64>, f64)> = (0..spec.nx)
        .into_par_iter()
        .map(|ix| {
            let x = spec.x_at(ix);
            let mut row = Vec::with_capacity(spec.np);
            let mut residue: f64 = 0.0;
            for jp in 0..spec.np {
                let p = spec.p_at(jp);
                let mut acc = C64::new(0.0, 0.0);
                for t in &pairs {
                    let gx = x - t.x_mid;
                    let gp = p - t.p_mid;
                    let phase = t.dx * (t.p_mid - p) + t.dp * x;
                    acc += t.w * C64::new(-gx * gx - gp * gp, phase).exp();
                }
                residue = residue.max(acc.im.abs());
                row.push(acc.re);
            }
            (row, residue)
        })
        .collect();
    let residue = rows.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    if residue > WIGNER_IMAG_RESIDUE {
        return Err(Error::Numerical(format!(
            "Wigner values have imaginary residue {residue}"
        )));
    }
    let mut grid = WignerGrid {
        spec: *spec,
        values: rows.into_iter().flat_map(|(row, _)| row).collect(),
    };
    let integral = grid.integral();
    if (integral - 1.0).abs() > GRID_COVERAGE_BOUND {
        return Err(Error::GridCoverage {
            integral,
            bound: GRID_COVERAGE_BOUND,
        });
    }
    for v in &mut grid.values {
        *v /= integral;
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kerr::kerr_state;
    use crate::scheme::{css_state, run_conditional, SchemeConfig, XmSelection};

    fn amp(re: f64, im: f64) -> ComplexAmplitude {
        ComplexAmplitude::new(re, im)
    }

    #[test]
    fn constellation_of_five_component_state() {
        let s = kerr_state(1.0, 5).unwrap();
        let points = constellation(&s);
        assert_eq!(points.len(), 5);
        for p in &points {
            assert!((p.amp.modulus() - 1.0).abs() < 1e-14);
            assert!((p.weight - 0.2).abs() < 1e-12);
        }
        let expected = [0.9 * PI, -0.7 * PI, -0.3 * PI, 0.1 * PI, 0.5 * PI];
        for (p, &phase) in points.iter().zip(&expected) {
            assert!(p.amp.distance(ComplexAmplitude::from_polar(1.0, phase)) < 1e-12);
        }
    }

    #[test]
    fn constellation_of_vacuum() {
        let points = constellation(&SingleModeState::vacuum());
        assert_eq!(points.len(), 1);
        assert!(points[0].amp.modulus() == 0.0);
    }

    #[test]
    fn conditioned_constellation_sits_on_two_circles() {
        let config = SchemeConfig::new(4.0, 5, 3, 4).unwrap();
        let res = run_conditional(&config, XmSelection::TrackPeak).unwrap();
        let mut radii: Vec<f64> = constellation(&res.state4)
            .iter()
            .map(|p| p.amp.modulus())
            .collect();
        radii.sort_by(f64::total_cmp);
        assert!(radii[0] < 1e-12); // the origin
        let mut distinct = vec![];
        for r in radii.into_iter().filter(|r| *r > 1e-9) {
            if distinct.last().is_none_or(|d: &f64| (r - d).abs() > 1e-9) {
                distinct.push(r);
            }
        }
        assert_eq!(distinct.len(), 2); // (N−1)/2 circles for N = 5
    }

    #[test]
    fn vacuum_wigner_peak() {
        let spec = GridSpec::new(-5.0, 5.0, -5.0, 5.0, 201, 201).unwrap();
        let grid = wigner(&SingleModeState::vacuum(), &spec).unwrap();
        // (0, 0) is a grid node for this spec
        assert!((grid.value(100, 100) - 1.0 / PI).abs() < 1e-9);
        assert!((grid.integral() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_wigner_peaks_at_scaled_amplitude() {
        let b = amp(1.2, -0.8);
        let s = SingleModeState::coherent(b);
        let spec = GridSpec::covering(&s, 5.0, 257).unwrap();
        let grid = wigner(&s, &spec).unwrap();
        let mut best = (f64::MIN, 0.0, 0.0);
        for ix in 0..spec.nx {
            for ip in 0..spec.np {
                let v = grid.value(ix, ip);
                if v > best.0 {
                    best = (v, spec.x_at(ix), spec.p_at(ip));
                }
            }
        }
        let h = spec.step_x().max(spec.step_p());
        assert!((best.1 - SQRT_2 * b.re).abs() <= h);
        assert!((best.2 - SQRT_2 * b.im).abs() <= h);
        assert!((best.0 - 1.0 / PI).abs() < 1e-3);
    }

    #[test]
    fn cat_interference_is_negative_at_midpoint() {
        let s = css_state(amp(2.2, 0.0), amp(-2.2, 0.0)).unwrap();
        let spec = GridSpec::covering(&s, 5.0, 301).unwrap();
        let grid = wigner(&s, &spec).unwrap();
        // fringes live on the line x = 0 between the two branches
        let min_on_axis = (0..spec.np)
            .map(|ip| grid.value(spec.nx / 2, ip))
            .fold(f64::INFINITY, f64::min);
        assert!(min_on_axis < -0.2, "fringe minimum {min_on_axis}");
        assert!(min_on_axis >= -1.0 / PI - 1e-9);
    }

    #[test]
    fn cat_fringe_depth_approaches_wigner_bound() {
        // widely separated branches push the fringe minimum towards −1/π
        let s = css_state(amp(6.0, 0.0), amp(-6.0, 0.0)).unwrap();
        let spec = GridSpec {
            x_min: -15.0,
            x_max: 15.0,
            p_min: -15.0,
            p_max: 15.0,
            nx: 301,
            np: 2001,
        };
        let grid = wigner(&s, &spec).unwrap();
        let min = grid.min_value();
        assert!(min < -0.29, "fringe minimum {min}");
        assert!(min >= -1.0 / PI - 1e-9);
    }

    #[test]
    fn wigner_bound_and_integral_for_conditioned_state() {
        let config = SchemeConfig::new(7.23, 5, 3, 4).unwrap();
        let res = run_conditional(&config, XmSelection::TrackPeak).unwrap();
        let spec = GridSpec::covering(&res.state4, 5.0, 257).unwrap();
        let grid = wigner(&res.state4, &spec).unwrap();
        assert!(grid.max_value() <= 1.0 / PI + 1e-9);
        assert!(grid.min_value() >= -1.0 / PI - 1e-9);
        assert!((grid.integral() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn conditioned_wigner_has_point_reflection_symmetry() {
        let config = SchemeConfig::new(4.0, 5, 3, 4).unwrap();
        let res = run_conditional(&config, XmSelection::TrackPeak).unwrap();
        let spec = GridSpec::covering(&res.state4, 5.0, 129).unwrap();
        let grid = wigner(&res.state4, &spec).unwrap();
        for ix in 0..spec.nx {
            for ip in 0..spec.np {
                let mirrored = grid.value(spec.nx - 1 - ix, spec.np - 1 - ip);
                assert!((grid.value(ix, ip) - mirrored).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn undersized_grid_is_rejected() {
        let s = SingleModeState::coherent(amp(3.0, 0.0));
        let spec = GridSpec::new(-1.0, 1.0, -1.0, 1.0, 64, 64).unwrap();
        assert!(matches!(
            wigner(&s, &spec),
            Err(Error::GridCoverage { .. })
        ));
    }

    #[test]
    fn non_normalized_state_is_rejected() {
        let s = SingleModeState::coherent(amp(0.5, 0.0)).scaled(C64::new(2.0, 0.0));
        let spec = GridSpec::new(-5.0, 5.0, -5.0, 5.0, 64, 64).unwrap();
        assert!(wigner(&s, &spec).is_err());
    }

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::new(1.0, -1.0, -1.0, 1.0, 8, 8).is_err());
        assert!(GridSpec::new(-1.0, 1.0, -1.0, 1.0, 1, 8).is_err());
        assert!(GridSpec::new(f64::NAN, 1.0, -1.0, 1.0, 8, 8).is_err());
    }
}
