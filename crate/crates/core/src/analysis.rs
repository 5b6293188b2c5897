//! Parameter studies over the input amplitude α: vacuum-amplitude
//! oscillation and zero refinement, cat-component circle radii, mode-3 peak
//! separability, and the decay of the strongest non-target component.

use rayon::prelude::*;

use crate::coherent::{state_fidelity, ComplexAmplitude};
use crate::error::{Error, Result};
use crate::scheme::{run_conditional, SchemeConfig, XmSelection};

/// Refined vacuum-ratio minima below this threshold count as interference
/// zeros. |d0| is the modulus of an oscillatory complex sum, so machine-exact
/// zeros are unattainable; this operationalizes "the vacuum term vanishes".
pub const VACUUM_ZERO_THRESHOLD: f64 = 1e-3;

/// Golden-section refinement stops once the α bracket is narrower than this
/// (comfortably below the 1e−6 resolution the zeros are reported at).
pub const ZERO_REFINE_WIDTH: f64 = 1e-7;

/// Window width in α over which the decay envelope takes its running maxima.
pub const DECAY_ENVELOPE_WINDOW: f64 = 0.5;

/// One pipeline evaluation in a parameter scan.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ScanPoint {
    pub alpha: f64,
    pub x_m: f64,
    /// |d0 / d_target|
    pub vacuum_ratio: f64,
    /// largest |d_kl / d_target| over the non-target labels
    pub secondary_ratio: f64,
    /// fidelity of the conditioned state with the target cat state
    pub fidelity: f64,
    /// Born density of the homodyne outcome
    pub density: f64,
}

/// A scan point that could not be evaluated, kept with its diagnostic.
#[derive(Clone, Debug)]
pub struct ScanFailure {
    pub alpha: f64,
    pub message: String,
}

/// Scan output: evaluated points in α order plus any recorded failures.
#[derive(Clone, Debug, Default)]
pub struct ScanResult {
    pub points: Vec<ScanPoint>,
    pub failures: Vec<ScanFailure>,
}

/// A refined interference zero of the vacuum ratio.
#[derive(Copy, Clone, Debug)]
pub struct VacuumZero {
    pub alpha: f64,
    pub vacuum_ratio: f64,
    /// The scan bracket the minimum was refined inside.
    pub bracket: (f64, f64),
}

/// Evaluate the pipeline at one α and reduce it to a [`ScanPoint`].
pub fn scan_point(config: &SchemeConfig, alpha: f64, xm: XmSelection) -> Result<ScanPoint> {
    let cfg = config.with_alpha(alpha)?;
    let res = run_conditional(&cfg, xm)?;
    let d_target = res
        .d_target(&cfg)
        .ok_or_else(|| Error::Numerical("target amplitude missing from decomposition".into()))?
        .norm();
    if d_target == 0.0 {
        return Err(Error::Numerical(
            "target amplitude underflowed to zero".into(),
        ));
    }
    let vacuum_ratio = res.d0.norm() / d_target;
    let secondary_ratio = res
        .d
        .iter()
        .filter(|(label, _)| **label != cfg.target())
        .map(|(_, v)| v.norm() / d_target)
        .fold(0.0, f64::max);
    let fidelity = state_fidelity(&res.state4, &cfg.target_css_state())?;
    let point = ScanPoint {
        alpha,
        x_m: res.x_m,
        vacuum_ratio,
        secondary_ratio,
        fidelity,
        density: res.density,
    };
    let finite = point.vacuum_ratio.is_finite()
        && point.secondary_ratio.is_finite()
        && point.fidelity.is_finite()
        && point.density.is_finite();
    if !finite {
        return Err(Error::Numerical(format!(
            "non-finite scan fields at α = {alpha}"
        )));
    }
    Ok(point)
}

/// Run the pipeline over `steps` equally spaced amplitudes in
/// `[alpha_min, alpha_max]`. Points are evaluated independently (in parallel)
/// and returned in α order; a failed point is recorded with its diagnostic
/// rather than dropped.
pub fn scan_vacuum(
    config: &SchemeConfig,
    alpha_min: f64,
    alpha_max: f64,
    steps: usize,
    xm: XmSelection,
) -> Result<ScanResult> {
    if !(alpha_min > 0.0 && alpha_min.is_finite() && alpha_max.is_finite()) {
        return Err(Error::Domain(format!(
            "scan range must be positive and finite, got [{alpha_min}, {alpha_max}]"
        )));
    }
    if steps == 0 {
        return Err(Error::Domain("scan needs at least one step".into()));
    }
    if steps == 1 {
        if alpha_min != alpha_max {
            return Err(Error::Domain(
                "a single-step scan requires alpha_min = alpha_max".into(),
            ));
        }
    } else if alpha_min >= alpha_max {
        return Err(Error::Domain(format!(
            "scan range must satisfy alpha_min < alpha_max, got [{alpha_min}, {alpha_max}]"
        )));
    }
    let alphas: Vec<f64> = if steps == 1 {
        vec![alpha_min]
    } else {
        let h = (alpha_max - alpha_min) / (steps - 1) as f64;
        (0..steps).map(|i| alpha_min + i as f64 * h).collect()
    };
    let evaluated: Vec<(f64, Result<ScanPoint>)> = alphas
        .into_par_iter()
        .map(|alpha| (alpha, scan_point(config, alpha, xm)))
        .collect();
    let mut out = ScanResult::default();
    for (alpha, r) in evaluated {
        match r {
            Ok(p) => out.points.push(p),
            Err(e) => out.failures.push(ScanFailure {
                alpha,
                message: e.to_string(),
            }),
        }
    }
    Ok(out)
}

fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut iterations = 0;
    while b - a > ZERO_REFINE_WIDTH && iterations < 200 {
        let c = b - inv_phi * (b - a);
        let d = a + inv_phi * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        iterations += 1;
    }
    let mid = 0.5 * (a + b);
    (mid, f(mid))
}

/// Refine every bracketed local minimum of the scanned vacuum ratio by
/// golden-section search and keep those below [`VACUUM_ZERO_THRESHOLD`].
pub fn find_vacuum_zeros(
    config: &SchemeConfig,
    xm: XmSelection,
    points: &[ScanPoint],
) -> Vec<VacuumZero> {
    let objective = |alpha: f64| match scan_point(config, alpha, xm) {
        Ok(p) => p.vacuum_ratio,
        Err(_) => f64::INFINITY,
    };
    let mut zeros = Vec::new();
    for i in 1..points.len().saturating_sub(1) {
        let (prev, here, next) = (points[i - 1], points[i], points[i + 1]);
        if here.vacuum_ratio < prev.vacuum_ratio && here.vacuum_ratio < next.vacuum_ratio {
            let bracket = (prev.alpha, next.alpha);
            let (alpha, value) = golden_section_min(objective, bracket.0, bracket.1);
            if value < VACUUM_ZERO_THRESHOLD {
                zeros.push(VacuumZero {
                    alpha,
                    vacuum_ratio: value,
                    bracket,
                });
            }
        }
    }
    zeros
}

/// Secondary-component weight per amplitude, each evaluated at its tracked
/// peak. The amplitudes must be strictly increasing.
pub fn decay_profile(config: &SchemeConfig, alphas: &[f64]) -> Result<Vec<(f64, f64)>> {
    if alphas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(
            "decay profile amplitudes must be strictly increasing".into(),
        ));
    }
    alphas
        .iter()
        .map(|&alpha| {
            let p = scan_point(config, alpha, XmSelection::TrackPeak)?;
            Ok((alpha, p.secondary_ratio))
        })
        .collect()
}

/// Windowed maxima of a profile: the maximum of each consecutive window of
/// width [`DECAY_ENVELOPE_WINDOW`] in α, in window order.
pub fn decay_envelope(profile: &[(f64, f64)]) -> Vec<f64> {
    if profile.is_empty() {
        return Vec::new();
    }
    let start = profile[0].0;
    let mut maxima: Vec<f64> = Vec::new();
    for &(alpha, value) in profile {
        let idx = ((alpha - start) / DECAY_ENVELOPE_WINDOW).floor() as usize;
        if idx >= maxima.len() {
            maxima.resize(idx + 1, f64::NEG_INFINITY);
        }
        maxima[idx] = maxima[idx].max(value);
    }
    maxima.retain(|m| m.is_finite());
    maxima
}

/// Whether the windowed envelope never increases from one window to the next.
pub fn envelope_non_increasing(profile: &[(f64, f64)]) -> bool {
    decay_envelope(profile).windows(2).all(|w| w[1] <= w[0])
}

/// One distinct cat-component circle radius with the component separations
/// that produce it.
#[derive(Clone, Debug)]
pub struct RadiusClass {
    pub radius: f64,
    /// The |k−l| separations mapping to this radius ({m, N−m}).
    pub separations: Vec<usize>,
    /// Number of ordered-free (k < l) pairs on this circle.
    pub multiplicity: usize,
}

/// The (N−1)/2 distinct circle radii of the mode-4 cat components.
#[derive(Clone, Debug)]
pub struct RadiiReport {
    pub alpha: f64,
    pub n_components: usize,
    pub radii: Vec<RadiusClass>,
}

/// Radii of the circles the cat components live on:
/// |α_k − α_l|/√2 = α·√(1 − cos(2(k−l)π/N)) for N = 2n + 1.
///
/// The separations m and N−m give the same radius, leaving n distinct
/// circles, all strictly inside radius √2·α.
pub fn circle_radii(alpha: f64, n_components: usize) -> Result<RadiiReport> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!(
            "input amplitude must be positive and finite, got {alpha}"
        )));
    }
    if n_components.is_multiple_of(2) || n_components < 3 {
        return Err(Error::Domain(format!(
            "distinct circles require an odd component count of at least 3, got {n_components}"
        )));
    }
    let n = n_components;
    let radii = (1..=(n - 1) / 2)
        .map(|m| {
            let radius =
                alpha * (1.0 - (2.0 * m as f64 * std::f64::consts::PI / n as f64).cos()).sqrt();
            RadiusClass {
                radius,
                separations: vec![m, n - m],
                // pairs k < l with l − k = m or N − m: (N − m) + m of them
                multiplicity: n,
            }
        })
        .collect();
    Ok(RadiiReport {
        alpha,
        n_components,
        radii,
    })
}

/// One distinct mode-3 amplitude with every (k, l) pair that lands on it.
/// Diagonal pairs (k, k) feed the vacuum channel of mode 4.
#[derive(Clone, Debug)]
pub struct Mode3Peak {
    pub amp: ComplexAmplitude,
    /// Center of the quadrature Gaussian, √2·Re(amp).
    pub x_center: f64,
    /// Unordered (k, l) pairs with k ≤ l sharing this amplitude.
    pub labels: Vec<(usize, usize)>,
}

impl Mode3Peak {
    /// Whether any label is off-diagonal, i.e. the peak heralds a cat state.
    pub fn is_css_peak(&self) -> bool {
        self.labels.iter().any(|&(k, l)| k != l)
    }
}

/// Pairwise quadrature separation of two mode-3 peaks.
#[derive(Copy, Clone, Debug)]
pub struct PeakPairOverlap {
    pub a: usize,
    pub b: usize,
    /// |Δ(√2·Re)| between the two Gaussian centers.
    pub separation: f64,
    /// Overlap of the two unit-norm variance-1/2 Gaussians, exp(−Δ²/4).
    pub gaussian_overlap: f64,
}

/// Mode-3 peak structure for one configuration.
#[derive(Clone, Debug)]
pub struct SeparabilityReport {
    pub peaks: Vec<Mode3Peak>,
    pub pairs: Vec<PeakPairOverlap>,
    /// Index into `peaks` of the targeted pair's peak.
    pub target_peak: usize,
    /// Smallest separation from the target peak to any other cat peak.
    pub min_css_separation_to_target: f64,
    /// Smallest separation from the target peak to any other peak, including
    /// the diagonal vacuum-channel peaks.
    pub min_separation_to_target: f64,
}

/// Gaussian overlap of two quadrature peaks separated by `separation`.
pub fn peak_overlap(separation: f64) -> f64 {
    (-separation * separation / 4.0).exp()
}

/// Group the mode-3 amplitudes (α_k + α_l)/√2 over all unordered pairs
/// (including the diagonal) into distinct peaks and report their pairwise
/// quadrature separations and Gaussian overlaps.
pub fn mode3_separability(config: &SchemeConfig) -> SeparabilityReport {
    let amps = config.amplitudes();
    let n = config.n_components();
    let tol = LABEL_GROUP_TOL * config.alpha();
    let mut peaks: Vec<Mode3Peak> = Vec::new();
    for k in 1..=n {
        for l in k..=n {
            let amp = ComplexAmplitude::from(
                (amps[k - 1].as_complex() + amps[l - 1].as_complex()) / std::f64::consts::SQRT_2,
            );
            match peaks.iter_mut().find(|p| p.amp.distance(amp) <= tol) {
                Some(p) => p.labels.push((k, l)),
                None => peaks.push(Mode3Peak {
                    amp,
                    x_center: amp.quadrature_mean(),
                    labels: vec![(k, l)],
                }),
            }
        }
    }
    let mut pairs = Vec::with_capacity(peaks.len() * (peaks.len() - 1) / 2);
    for i in 0..peaks.len() {
        for j in (i + 1)..peaks.len() {
            let separation = (peaks[i].x_center - peaks[j].x_center).abs();
            pairs.push(PeakPairOverlap {
                a: i,
                b: j,
                separation,
                gaussian_overlap: peak_overlap(separation),
            });
        }
    }
    let t = config.target();
    let target_peak = peaks
        .iter()
        .position(|p| p.labels.contains(&(t.k(), t.l())))
        .expect("target pair is one of the enumerated pairs");
    let mut min_css = f64::INFINITY;
    let mut min_all = f64::INFINITY;
    for (i, p) in peaks.iter().enumerate() {
        if i == target_peak {
            continue;
        }
        let sep = (p.x_center - peaks[target_peak].x_center).abs();
        min_all = min_all.min(sep);
        if p.is_css_peak() {
            min_css = min_css.min(sep);
        }
    }
    SeparabilityReport {
        peaks,
        pairs,
        target_peak,
        min_css_separation_to_target: min_css,
        min_separation_to_target: min_all,
    }
}

/// Amplitude-grouping tolerance for peak identification, relative to α.
const LABEL_GROUP_TOL: f64 = 1e-9;

/// Convenience: the scan restricted to labels needed by callers that only
/// want the zero list.
pub fn scan_and_refine(
    config: &SchemeConfig,
    alpha_min: f64,
    alpha_max: f64,
    steps: usize,
    xm: XmSelection,
) -> Result<(ScanResult, Vec<VacuumZero>)> {
    let scan = scan_vacuum(config, alpha_min, alpha_max, steps, xm)?;
    let zeros = find_vacuum_zeros(config, xm, &scan.points);
    Ok((scan, zeros))
}
