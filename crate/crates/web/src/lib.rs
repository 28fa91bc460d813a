//! Browser bindings: relaxed profiles, wrinkling cost curves and a wrinkle pattern image.
//!
//! Every export has a plain Rust counterpart that the native tests exercise.
//! Sheet radius and sphere radius are fixed at 1.

use wasm_bindgen::prelude::*;

use fvk_core::construction::{build_test_state, default_config};
use fvk_core::energy::{w_r, w_rel};
use fvk_core::model::{validate_and_derive, DerivedScales, ModelParams, Trig, TrigMode};
use fvk_core::relaxed::{sigma0_jet, u0_jet};

fn setup(h: f64, beta: f64, alpha_s: f64) -> fvk_core::Result<(ModelParams, DerivedScales)> {
    let params = ModelParams::new(h, beta, alpha_s, 1.0, 1.0);
    let scales = validate_and_derive(&params)?;
    Ok((params, scales))
}

/// Closed-form relaxed solution on `n` uniform radii.
#[derive(Debug, Clone, PartialEq)]
pub struct Profiles {
    pub r: Vec<f64>,
    pub u0: Vec<f64>,
    pub sigma0: Vec<f64>,
    /// Radius where the hoop strain reaches the wrinkling threshold.
    pub r_h: f64,
}

pub fn profiles(h: f64, beta: f64, alpha_s: f64, n: usize) -> fvk_core::Result<Profiles> {
    let (params, scales) = setup(h, beta, alpha_s)?;
    let n = n.max(2);
    let r: Vec<f64> = (0..n).map(|i| params.r0 * i as f64 / (n - 1) as f64).collect();
    let u0 = r.iter().map(|&x| u0_jet(x, &params, &scales).v).collect();
    let sigma0 = r.iter().map(|&x| sigma0_jet(x, &params, &scales).v).collect();
    Ok(Profiles { r, u0, sigma0, r_h: scales.r_h })
}

/// Relaxed cost and the cost of one fixed wrinkle, as functions of the hoop strain.
#[derive(Debug, Clone, PartialEq)]
pub struct CostCurves {
    pub eta: Vec<f64>,
    pub relaxed: Vec<f64>,
    pub wrinkled: Vec<f64>,
    /// Threshold strain `-2p`.
    pub threshold: f64,
    /// Strain at which the chosen wrinkle is optimal.
    pub target: f64,
}

/// Curves over `η ∈ [-6p, 2p]` at radius `r`. The wrinkle is a single mode near the
/// optimal wavenumber whose excess length absorbs the strain `target_ratio · (-p)`,
/// `target_ratio > 2`.
pub fn cost_curves(h: f64, beta: f64, alpha_s: f64, r: f64, target_ratio: f64, n: usize) -> fvk_core::Result<CostCurves> {
    let (params, scales) = setup(h, beta, alpha_s)?;
    let p = scales.p;
    let target = -target_ratio * p;
    let excess = (-(target + 2.0 * p)).max(0.0);
    let k = scales.k_opt(r).round().max(1.0);
    let amp = r * (2.0 * excess).sqrt() / k;
    let w = Trig::from_modes(0.0, vec![TrigMode { n: k as u64, a: amp, b: 0.0 }]);
    let n = n.max(2);
    let eta: Vec<f64> = (0..n).map(|i| p * (-6.0 + 8.0 * i as f64 / (n - 1) as f64)).collect();
    let relaxed = eta.iter().map(|&e| w_rel(e, p)).collect();
    let wrinkled = eta.iter().map(|&e| w_r(e, &w, r, &params, &scales)).collect();
    Ok(CostCurves { eta, relaxed, wrinkled, threshold: -2.0 * p, target })
}

/// Grayscale image of the wrinkled test state's height fluctuation on the patch
/// `r ∈ [r_lo, 1]`, `θ ∈ [0, span]`, with `span` four optimal wavelengths at the rim.
/// Rows run from the outer rim inward. Values in `[0, 1]`, mid-gray is flat.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
    pub r_lo: f64,
    pub span: f64,
}

pub fn pattern(h: f64, beta: f64, alpha_s: f64, r_lo: f64, width: usize, height: usize) -> fvk_core::Result<Pattern> {
    let (params, scales) = setup(h, beta, alpha_s)?;
    let state = build_test_state(&params, &scales, &default_config(&params, &scales)?)?;
    let (width, height) = (width.max(2), height.max(2));
    let span = 8.0 * std::f64::consts::PI / scales.k_opt(params.r0).max(1.0);
    let mut raw = Vec::with_capacity(width * height);
    for i in 0..height {
        let r = params.r0 - (params.r0 - r_lo) * i as f64 / (height - 1) as f64;
        let w = state.w_slice(r).value();
        raw.extend((0..width).map(|j| w.eval(span * j as f64 / (width - 1) as f64)));
    }
    let peak = raw.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = if peak > 0.0 { 0.5 / peak } else { 0.0 };
    let values = raw.iter().map(|x| 0.5 + scale * x).collect();
    Ok(Pattern { width, height, values, r_lo, span })
}

fn js_err(e: fvk_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `[r…, u0…, sigma0…, r_h]`.
#[wasm_bindgen(js_name = relaxedProfiles)]
pub fn relaxed_profiles_js(h: f64, beta: f64, alpha_s: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let p = profiles(h, beta, alpha_s, n).map_err(js_err)?;
    Ok([p.r, p.u0, p.sigma0, vec![p.r_h]].concat())
}

/// `[η…, W_rel…, W_r…, threshold, target]`.
#[wasm_bindgen(js_name = costCurves)]
pub fn cost_curves_js(h: f64, beta: f64, alpha_s: f64, r: f64, target_ratio: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let c = cost_curves(h, beta, alpha_s, r, target_ratio, n).map_err(js_err)?;
    Ok([c.eta, c.relaxed, c.wrinkled, vec![c.threshold, c.target]].concat())
}

/// RGBA bytes for an `ImageData` of size `width × height`.
#[wasm_bindgen(js_name = wrinklePattern)]
pub fn wrinkle_pattern_js(h: f64, beta: f64, alpha_s: f64, r_lo: f64, width: usize, height: usize) -> Result<Vec<u8>, JsError> {
    let p = pattern(h, beta, alpha_s, r_lo, width, height).map_err(js_err)?;
    Ok(p.values.iter().flat_map(|&v| {
        let g = (255.0 * v).round() as u8;
        [g, g, g, 255]
    }).collect())
}
