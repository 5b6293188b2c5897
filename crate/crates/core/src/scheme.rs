//! The conditional preparation pipeline: two identical N-component states
//! interfere on a balanced beam splitter, mode 3 is measured by homodyne
//! detection of the x quadrature, and the conditioned mode-4 state is
//! decomposed into a vacuum amplitude d0 plus one amplitude d_{kl} per
//! symmetric cat component.
//!
//! All reported d values refer to the normalized conditioned state; only
//! ratios such as |d0/d_target| and the normalized state itself carry
//! physical meaning.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use crate::coherent::{
    coherent_overlap, quadrature_wavefunction, state_inner, ComplexAmplitude, SingleModeState,
    TwoModeState, IMAG_RESIDUE_TOL, MERGE_TOL,
};
use crate::error::{Error, Result};
use crate::kerr::{kerr_amplitudes, kerr_state};

/// Conditional norms below this are treated as conditioning on an impossible
/// outcome (the underflow boundary of f64).
pub const DEGENERATE_NORM_FLOOR: f64 = 1e-300;

/// Amplitude-to-label matching tolerance in `css_decompose`, as a fraction of
/// the input amplitude α. Mode-4 amplitudes come from exact trigonometry, so
/// a mismatch beyond this signals an inconsistent configuration, not noise.
pub const LABEL_MATCH_TOL: f64 = 1e-9;

/// Unordered pair (k, l) identifying one cat component; stored with k < l.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CssLabel {
    k: usize,
    l: usize,
}

impl CssLabel {
    pub fn new(k: usize, l: usize) -> Result<Self> {
        if k == 0 || l == 0 {
            return Err(Error::Domain("component indices are 1-based".into()));
        }
        if k == l {
            return Err(Error::Domain(format!(
                "labels require two distinct components, got ({k}, {l})"
            )));
        }
        Ok(if k < l { Self { k, l } } else { Self { k: l, l: k } })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }
}

impl std::fmt::Display for CssLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.k, self.l)
    }
}

/// Validated parameters of one pipeline run: input amplitude α, odd component
/// count N = 2n + 1, and the targeted component pair.
#[derive(Copy, Clone, Debug)]
pub struct SchemeConfig {
    alpha: f64,
    n_components: usize,
    target: CssLabel,
}

impl SchemeConfig {
    pub fn new(alpha: f64, n_components: usize, target_k: usize, target_l: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!(
                "input amplitude must be positive and finite, got {alpha}"
            )));
        }
        if n_components.is_multiple_of(2) || n_components < 3 {
            return Err(Error::Domain(format!(
                "component count must be odd and at least 3 so that the cat components \
                 are distinguishable, got {n_components}"
            )));
        }
        if target_k >= target_l {
            return Err(Error::Domain(format!(
                "target pair must satisfy k < l, got ({target_k}, {target_l})"
            )));
        }
        let target = CssLabel::new(target_k, target_l)?;
        if target.l > n_components {
            return Err(Error::Domain(format!(
                "target pair ({target_k}, {target_l}) out of range for N = {n_components}"
            )));
        }
        Ok(Self {
            alpha,
            n_components,
            target,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_components(&self) -> usize {
        self.n_components
    }

    pub fn target(&self) -> CssLabel {
        self.target
    }

    /// The same configuration at a different input amplitude.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.n_components, self.target.k, self.target.l)
    }

    /// The N component amplitudes α_k.
    pub fn amplitudes(&self) -> Vec<ComplexAmplitude> {
        kerr_amplitudes(self.alpha, self.n_components).expect("validated at construction")
    }

    /// The N-component input state fed into both beam splitter ports.
    pub fn input_state(&self) -> SingleModeState {
        kerr_state(self.alpha, self.n_components).expect("validated at construction")
    }

    /// The normalized target cat state for the configured pair.
    pub fn target_css_state(&self) -> SingleModeState {
        let amps = self.amplitudes();
        css_state(amps[self.target.k - 1], amps[self.target.l - 1])
            .expect("distinct components have distinct amplitudes")
    }
}

/// How the homodyne outcome is chosen when running the pipeline.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum XmSelection {
    /// Condition at the center of the target pair's quadrature peak,
    /// re-derived at every α.
    TrackPeak,
    /// Condition at a fixed quadrature value.
    Fixed(f64),
}

impl XmSelection {
    pub fn resolve(&self, config: &SchemeConfig) -> f64 {
        match *self {
            XmSelection::TrackPeak => target_peak_quadrature(config),
            XmSelection::Fixed(x) => x,
        }
    }
}

/// Balanced beam splitter acting term by term:
/// |α⟩|β⟩ → |(α+β)/√2⟩ |(α−β)/√2⟩.
pub fn beam_splitter(state_a: &SingleModeState, state_b: &SingleModeState) -> TwoModeState {
    let mut terms = Vec::with_capacity(state_a.num_terms() * state_b.num_terms());
    for &(ca, aa) in state_a.terms() {
        for &(cb, ab) in state_b.terms() {
            let za = aa.as_complex();
            let zb = ab.as_complex();
            terms.push((
                ca * cb,
                ComplexAmplitude::from((za + zb) / SQRT_2),
                ComplexAmplitude::from((za - zb) / SQRT_2),
            ));
        }
    }
    // (α+β, α−β) determines (α, β) uniquely, so distinct input term pairs map
    // to distinct output pairs and the construction cannot collapse to zero.
    TwoModeState::new(terms).expect("beam splitter output of valid states is a valid state")
}

/// Center of the target pair's mode-3 quadrature peak:
/// x_m = √2·Re((α_k + α_l)/√2) = Re(α_k + α_l).
pub fn target_peak_quadrature(config: &SchemeConfig) -> f64 {
    let amps = config.amplitudes();
    let t = config.target();
    amps[t.k() - 1].re + amps[t.l() - 1].re
}

/// Normalization constant of the symmetric cat built from components a and b:
/// (2 + 2·exp(−|a − b|²))^{−1/2}.
pub fn css_normalization(a: ComplexAmplitude, b: ComplexAmplitude) -> f64 {
    let d2 = (a.as_complex() - b.as_complex()).norm_sqr();
    1.0 / (2.0 + 2.0 * (-d2).exp()).sqrt()
}

/// The normalized symmetric superposition of |±(a−b)/√2⟩.
///
/// Fails if a and b coincide: the construction degenerates to the vacuum,
/// which belongs to the d0 channel of the decomposition instead.
pub fn css_state(a: ComplexAmplitude, b: ComplexAmplitude) -> Result<SingleModeState> {
    if a.distance(b) <= MERGE_TOL {
        return Err(Error::Domain(
            "cat components must be distinct; coincident amplitudes belong to the vacuum channel"
                .into(),
        ));
    }
    let n = C64::new(css_normalization(a, b), 0.0);
    let branch = ComplexAmplitude::from((a.as_complex() - b.as_complex()) / SQRT_2);
    SingleModeState::new(vec![(n, branch), (n, branch.reflected())])
}

/// Project mode 3 of a two-mode state onto the quadrature outcome `x_m`.
///
/// Returns the normalized mode-4 state together with the Born probability
/// density of the outcome (the squared pre-normalization norm).
pub fn project_quadrature(
    two_mode: &TwoModeState,
    x_m: f64,
) -> Result<(SingleModeState, f64)> {
    let terms: Vec<(C64, ComplexAmplitude)> = two_mode
        .terms()
        .iter()
        .map(|&(q, a3, a4)| (q * quadrature_wavefunction(x_m, a3), a4))
        .collect();
    let state = SingleModeState::new(terms).map_err(|_| Error::DegenerateOutcome {
        x_m,
        norm: 0.0,
        floor: DEGENERATE_NORM_FLOOR,
    })?;
    let ip = state_inner(&state, &state);
    let norm = ip.re.max(0.0).sqrt();
    if norm < DEGENERATE_NORM_FLOOR {
        return Err(Error::DegenerateOutcome {
            x_m,
            norm,
            floor: DEGENERATE_NORM_FLOOR,
        });
    }
    if ip.im.abs() > IMAG_RESIDUE_TOL * ip.re {
        return Err(Error::Numerical(format!(
            "conditional norm² has imaginary residue {} relative to {}",
            ip.im, ip.re
        )));
    }
    Ok((state.scaled(C64::new(1.0 / norm, 0.0)), ip.re))
}

/// Split a conditioned mode-4 state into its vacuum amplitude d0 and one
/// amplitude d_{kl} per component pair.
///
/// Every amplitude of `state4` must be of the form ±(α_k − α_l)/√2 (or 0) for
/// the configured components; anything else is reported as unrecognized.
pub fn css_decompose(
    state4: &SingleModeState,
    config: &SchemeConfig,
) -> Result<(C64, BTreeMap<CssLabel, C64>)> {
    let amps = config.amplitudes();
    let n = config.n_components();
    let tol = LABEL_MATCH_TOL * config.alpha();

    struct Branch {
        label: CssLabel,
        plus: ComplexAmplitude,
        n_css: f64,
    }
    let mut branches = Vec::with_capacity(n * (n - 1) / 2);
    for k in 1..=n {
        for l in (k + 1)..=n {
            let diff = (amps[k - 1].as_complex() - amps[l - 1].as_complex()) / SQRT_2;
            branches.push(Branch {
                label: CssLabel::new(k, l).expect("k < l"),
                plus: diff.into(),
                n_css: css_normalization(amps[k - 1], amps[l - 1]),
            });
        }
    }

    let mut d0 = C64::new(0.0, 0.0);
    let mut d = BTreeMap::new();
    'terms: for &(w, amp) in state4.terms() {
        if amp.modulus() <= tol {
            d0 += w;
            continue;
        }
        for b in &branches {
            if amp.distance(b.plus) <= tol {
                // the −branch partner carries the identical coefficient, so
                // the pair w(|β⟩ + |−β⟩) equals (w/N_css)·|CSS⟩
                d.insert(b.label, w / b.n_css);
                continue 'terms;
            }
            if amp.distance(b.plus.reflected()) <= tol {
                continue 'terms;
            }
        }
        return Err(Error::UnrecognizedAmplitude {
            re: amp.re,
            im: amp.im,
            n_components: n,
            tol,
        });
    }
    Ok((d0, d))
}

/// Outcome of conditioning: the measured quadrature, its probability density,
/// the normalized mode-4 state and its vacuum/cat decomposition.
#[derive(Clone, Debug)]
pub struct ConditionalResult {
    pub x_m: f64,
    pub density: f64,
    pub state4: SingleModeState,
    pub d0: C64,
    pub d: BTreeMap<CssLabel, C64>,
}

impl ConditionalResult {
    /// The cat amplitude of the configured target pair.
    pub fn d_target(&self, config: &SchemeConfig) -> Option<C64> {
        self.d.get(&config.target()).copied()
    }
}

/// Condition mode 4 on the homodyne outcome `x_m` and decompose the result.
pub fn condition_on_quadrature(
    two_mode: &TwoModeState,
    x_m: f64,
    config: &SchemeConfig,
) -> Result<ConditionalResult> {
    let (state4, density) = project_quadrature(two_mode, x_m)?;
    let (d0, d) = css_decompose(&state4, config)?;
    Ok(ConditionalResult {
        x_m,
        density,
        state4,
        d0,
        d,
    })
}

/// The two-mode state at the beam splitter outputs for this configuration.
pub fn scheme_two_mode(config: &SchemeConfig) -> TwoModeState {
    let input = config.input_state();
    beam_splitter(&input, &input)
}

/// Run the full pipeline: build the inputs, interfere, condition at the
/// selected quadrature and decompose.
pub fn run_conditional(config: &SchemeConfig, xm: XmSelection) -> Result<ConditionalResult> {
    let two_mode = scheme_two_mode(config);
    condition_on_quadrature(&two_mode, xm.resolve(config), config)
}

/// Precomputed mode-3 quadrature density ρ(x) of a two-mode state, with the
/// mode-4 Gram matrix factored out so repeated evaluations are cheap.
pub struct Mode3Density {
    coeffs: Vec<C64>,
    amps3: Vec<ComplexAmplitude>,
    gram4: Vec<C64>,
}

impl Mode3Density {
    pub fn new(two_mode: &TwoModeState) -> Self {
        let t = two_mode.terms();
        let n = t.len();
        let mut gram4 = Vec::with_capacity(n * n);
        for &(_, _, a4i) in t {
            for &(_, _, a4j) in t {
                gram4.push(coherent_overlap(a4i, a4j));
            }
        }
        Self {
            coeffs: t.iter().map(|&(q, _, _)| q).collect(),
            amps3: t.iter().map(|&(_, a3, _)| a3).collect(),
            gram4,
        }
    }

    /// ρ(x) = Σ_ij w̅_i w_j ⟨a4_i|a4_j⟩ with w_i = q_i ⟨x|a3_i⟩.
    pub fn at(&self, x: f64) -> f64 {
        let n = self.coeffs.len();
        let w: Vec<C64> = (0..n)
            .map(|i| self.coeffs[i] * quadrature_wavefunction(x, self.amps3[i]))
            .collect();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += w[i].conj() * w[j] * self.gram4[i * n + j];
            }
        }
        acc.re
    }

    /// Grid bounds covering every mode-3 peak with an 8-unit margin.
    pub fn bounds(&self) -> (f64, f64) {
        let max_re = self.amps3.iter().map(|a| a.re.abs()).fold(0.0, f64::max);
        (-(SQRT_2 * max_re + 8.0), SQRT_2 * max_re + 8.0)
    }

    /// Trapezoid integral of the density over `[lo, hi]` at `n` grid points.
    pub fn integral(&self, lo: f64, hi: f64, n: usize) -> f64 {
        let h = (hi - lo) / (n - 1) as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += w * self.at(lo + i as f64 * h);
        }
        acc * h
    }
}

/// Mode-3 quadrature density of a two-mode state at a single point.
pub fn mode3_density(two_mode: &TwoModeState, x: f64) -> f64 {
    Mode3Density::new(two_mode).at(x)
}

/// Draw `count` quadrature samples from the mode-3 density by inverse-CDF
/// lookup on a grid spanning the peak structure. Deterministic for a fixed
/// seed.
pub fn sample_homodyne(two_mode: &TwoModeState, seed: u64, count: usize) -> Vec<f64> {
    let density = Mode3Density::new(two_mode);
    let (lo, hi) = density.bounds();
    let n = (((hi - lo) / 0.01).ceil() as usize + 1).clamp(1001, 200_001);
    let h = (hi - lo) / (n - 1) as f64;
    let pdf: Vec<f64> = (0..n)
        .map(|i| density.at(lo + i as f64 * h).max(0.0))
        .collect();
    let mut cdf = Vec::with_capacity(n);
    cdf.push(0.0);
    for i in 1..n {
        cdf.push(cdf[i - 1] + 0.5 * (pdf[i - 1] + pdf[i]) * h);
    }
    let total = cdf[n - 1];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let u = rng.random::<f64>() * total;
            let idx = cdf.partition_point(|&c| c < u).clamp(1, n - 1);
            let span = cdf[idx] - cdf[idx - 1];
            let frac = if span > 0.0 { (u - cdf[idx - 1]) / span } else { 0.0 };
            lo + (idx as f64 - 1.0 + frac) * h
        })
        .collect()
}
