//! Certificates for the two lower-bound inequalities on changing the wave number
//! between two radii.

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::random::hex;
use crate::energy::{w_r_excess, w_rel};
use crate::error::{range, Error, Result};
use crate::model::{exponents, AngularFamily, DerivedScales, ModelParams, RadialProfile, Trig};

/// Which inequality: the one with `p ⨍B` or the one with `⨍B²` on the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaKind {
    Linear,
    Quadratic,
}

impl LemmaKind {
    /// Exponent of `h` giving the matched radial window.
    pub fn window_exponent(&self, beta: f64) -> f64 {
        match self {
            LemmaKind::Linear => exponents::window_first(beta),
            LemmaKind::Quadratic => exponents::window_second(beta),
        }
    }

    /// Predicted scaling exponent of the right side with the matched window.
    pub fn rhs_exponent(&self, beta: f64) -> f64 {
        match self {
            LemmaKind::Linear => exponents::excess_upper(beta),
            LemmaKind::Quadratic => exponents::FOUR_THIRDS,
        }
    }
}

/// Outcome of one certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheckResult {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`.
    pub margin: f64,
    pub pass: bool,
    pub inputs_digest: String,
}

/// Absolute slack allowed below zero margin, relative to `1 + |rhs|`.
pub const SLACK: f64 = 1e-12;

impl LemmaCheckResult {
    fn new(lhs: f64, rhs: f64, inputs_digest: String) -> Self {
        let margin = lhs - rhs;
        LemmaCheckResult { lhs, rhs, margin, pass: margin >= -SLACK * (1.0 + rhs.abs()), inputs_digest }
    }
}

/// Default margin below the wrinkling threshold, `r0²/(72 R²)/96`.
pub fn default_margin(params: &ModelParams) -> f64 {
    let c0 = params.r0 * params.r0 / (72.0 * params.big_r * params.big_r);
    c0 / 24.0 / 4.0
}

/// Radii for the matched window at thickness `h`: an interval of length `2λ` starting at
/// `2r0/3`, with one radius in the middle of each outer quarter, where `λ = h^e`.
pub fn matched_radii(kind: LemmaKind, params: &ModelParams) -> (f64, f64) {
    let lam = params.h.powf(kind.window_exponent(params.beta));
    let a = 2.0 * params.r0 / 3.0;
    (a + 0.25 * lam, a + 1.75 * lam)
}

/// Right side of the first inequality.
pub fn rhs_linear(rho0: f64, rho1: f64, margin: f64, params: &ModelParams, scales: &DerivedScales) -> f64 {
    let (p, h) = (scales.p, params.h);
    let lam = rho1 - rho0;
    let inner = 6.0 * rho1.powi(4) / (rho0 * rho0 * p * lam * lam) + (rho0 + rho1).powi(2) * lam * lam / (4.0 * rho0 * rho0 * h * h);
    0.5 * margin * (0.5 * margin).min(1.0 / inner)
}

/// Right side of the second inequality.
pub fn rhs_quadratic(rho0: f64, rho1: f64, margin: f64, params: &ModelParams, scales: &DerivedScales) -> f64 {
    if margin == 0.0 {
        return 0.0;
    }
    let (p, h) = (scales.p, params.h);
    let lam = rho1 - rho0;
    let lam2 = lam * lam;
    let inner = 8.0 * rho1.powi(4) / (rho0 * rho0 * p * lam2)
        + params.alpha_s * (rho0 + rho1).powi(4) * lam2 * lam2 / (2.0 * rho0.powi(4) * h.powf(2.0 + params.beta));
    let candidates = [
        0.5 * margin,
        p * lam2 / (2.0 * rho0 * rho0),
        p * lam2 * rho0 * rho0 / (2.0 * margin * rho1 * rho1),
        margin / 8.0 / inner,
    ];
    0.5 * margin * candidates.into_iter().fold(f64::INFINITY, f64::min)
}

/// Validated inputs shared by the checkers.
struct Setup {
    etas: [f64; 2],
    digest: String,
}

fn setup(
    w: &dyn AngularFamily,
    ubar: &RadialProfile,
    rho: (f64, f64),
    margin: f64,
    params: &ModelParams,
    scales: &DerivedScales,
) -> Result<Setup> {
    let (rho0, rho1) = rho;
    if !(0.0 < rho0 && rho0 < rho1 && rho1 <= params.r0) {
        return Err(range(format!("radii must satisfy 0 < rho0 < rho1 <= r0, got {rho0}, {rho1}")));
    }
    if !(margin >= 0.0) {
        return Err(range("margin must be nonnegative"));
    }
    let knots = &ubar.knots;
    if knots[0] > rho0 || *knots.last().expect("profile has knots") < rho1 {
        return Err(range("mean displacement profile does not cover [rho0, rho1]"));
    }
    let threshold = -2.0 * scales.p - margin;
    let mut etas = [0.0; 2];
    for (eta, rho) in etas.iter_mut().zip([rho0, rho1]) {
        *eta = ubar.eval(rho).v / rho;
        if *eta > threshold {
            return Err(Error::Hypothesis(format!("ū(ρ)/ρ = {eta:e} at ρ = {rho} exceeds -2p - δ = {threshold:e}")));
        }
    }
    let mut hasher = Sha256::new();
    for x in [params.h, params.beta, params.alpha_s, params.r0, params.big_r, rho0, rho1, margin] {
        hasher.update(x.to_le_bytes());
    }
    for rho in [rho0, rho1] {
        let s = w.slice(rho);
        for m in &s.modes {
            hasher.update(m.n.to_le_bytes());
            for j in [m.a, m.b] {
                for x in [j.v, j.d1, j.d2] {
                    hasher.update(x.to_le_bytes());
                }
            }
        }
    }
    for x in ubar.values.iter().chain(&ubar.slopes) {
        hasher.update(x.to_le_bytes());
    }
    Ok(Setup { etas, digest: hex(&hasher.finalize()) })
}

const PANELS: usize = 64;

/// `⨍_{ρ0}^{ρ1} f(B(r)) dr` by composite Gauss quadrature.
fn radial_average(rho: (f64, f64), b_at: impl Fn(f64) -> f64) -> f64 {
    let rule = GaussLegendre::new(8).expect("degree >= 2");
    let step = (rho.1 - rho.0) / PANELS as f64;
    let total: f64 = (0..PANELS).map(|i| rule.integrate(rho.0 + i as f64 * step, rho.0 + (i + 1) as f64 * step, &b_at)).sum();
    total / (rho.1 - rho.0)
}

fn spectral_lhs(kind: LemmaKind, w: &dyn AngularFamily, rho: (f64, f64), etas: [f64; 2], params: &ModelParams, scales: &DerivedScales) -> f64 {
    let cost: f64 = [rho.0, rho.1]
        .iter()
        .zip(etas)
        .map(|(&r, eta)| w_r_excess(eta, &w.slice(r).value().fluct(), r, params, scales))
        .sum();
    let b = |r: f64| w.slice(r).radial_fluct_energy();
    cost + match kind {
        LemmaKind::Linear => scales.p * radial_average(rho, b),
        LemmaKind::Quadratic => radial_average(rho, |r| b(r).powi(2)),
    }
}

fn rhs(kind: LemmaKind, rho: (f64, f64), margin: f64, params: &ModelParams, scales: &DerivedScales) -> f64 {
    match kind {
        LemmaKind::Linear => rhs_linear(rho.0, rho.1, margin, params, scales),
        LemmaKind::Quadratic => rhs_quadratic(rho.0, rho.1, margin, params, scales),
    }
}

/// Check either inequality for the field `w` and mean radial displacement `ubar`
/// at radii `rho = (ρ0, ρ1)` with margin `δ` below the wrinkling threshold.
pub fn lemma_check(
    kind: LemmaKind,
    w: &dyn AngularFamily,
    ubar: &RadialProfile,
    rho: (f64, f64),
    margin: f64,
    params: &ModelParams,
    scales: &DerivedScales,
) -> Result<LemmaCheckResult> {
    let s = setup(w, ubar, rho, margin, params, scales)?;
    let lhs = spectral_lhs(kind, w, rho, s.etas, params, scales);
    Ok(LemmaCheckResult::new(lhs, rhs(kind, rho, margin, params, scales), s.digest))
}

/// First inequality: `Σ (W_ρ - W_rel) + p ⨍B ≥ rhs`.
pub fn lemma_ws(
    w: &dyn AngularFamily,
    ubar: &RadialProfile,
    rho0: f64,
    rho1: f64,
    margin: f64,
    params: &ModelParams,
    scales: &DerivedScales,
) -> Result<LemmaCheckResult> {
    lemma_check(LemmaKind::Linear, w, ubar, (rho0, rho1), margin, params, scales)
}

/// Second inequality: `Σ (W_ρ - W_rel) + ⨍B² ≥ rhs`.
pub fn lemma_ws2(
    w: &dyn AngularFamily,
    ubar: &RadialProfile,
    rho0: f64,
    rho1: f64,
    margin: f64,
    params: &ModelParams,
    scales: &DerivedScales,
) -> Result<LemmaCheckResult> {
    lemma_check(LemmaKind::Quadratic, w, ubar, (rho0, rho1), margin, params, scales)
}

/// Angular average of `f(θ)` from equispaced samples.
fn sampled_average(count: usize, f: impl Fn(f64) -> f64) -> f64 {
    let step = std::f64::consts::TAU / count as f64;
    (0..count).map(|j| f(j as f64 * step)).sum::<f64>() / count as f64
}

fn sample_count(t: &Trig) -> usize {
    4 * t.max_freq() as usize + 16
}

/// `W_r(η, w) - W_rel(η)` from point values of `w` and its angular derivatives.
fn sampled_cost(eta: f64, w: &Trig, r: f64, params: &ModelParams, scales: &DerivedScales) -> f64 {
    let f = w.fluct();
    let (wt, wtt) = (f.dtheta(), f.dtheta().dtheta());
    let count = sample_count(&f);
    let wt2 = sampled_average(count, |t| wt.eval(t).powi(2));
    let wtt2 = sampled_average(count, |t| wtt.eval(t).powi(2));
    let w2 = sampled_average(count, |t| f.eval(t).powi(2));
    let h2 = params.h * params.h;
    (eta + wt2 / (2.0 * r * r)).powi(2) + h2 * wtt2 / r.powi(4) + params.substrate() * w2 - w_rel(eta, scales.p)
}

/// Same certificate as [`lemma_check`], evaluated from point samples in `θ` instead of
/// Fourier coefficients.
pub fn lemma_check_sampled(
    kind: LemmaKind,
    w: &dyn AngularFamily,
    ubar: &RadialProfile,
    rho: (f64, f64),
    margin: f64,
    params: &ModelParams,
    scales: &DerivedScales,
) -> Result<LemmaCheckResult> {
    let s = setup(w, ubar, rho, margin, params, scales)?;
    let cost: f64 = [rho.0, rho.1].iter().zip(s.etas).map(|(&r, eta)| sampled_cost(eta, &w.slice(r).value(), r, params, scales)).sum();
    let b = |r: f64| {
        let d = w.slice(r).dr().fluct();
        sampled_average(sample_count(&d), |t| d.eval(t).powi(2))
    };
    let lhs = cost
        + match kind {
            LemmaKind::Linear => scales.p * radial_average(rho, b),
            LemmaKind::Quadratic => radial_average(rho, |r| b(r).powi(2)),
        };
    Ok(LemmaCheckResult::new(lhs, rhs(kind, rho, margin, params, scales), s.digest))
}
