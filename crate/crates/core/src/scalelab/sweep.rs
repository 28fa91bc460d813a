//! Evaluate a scaling quantity over a list of thicknesses and fit its exponent.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{decades_spanned, FitModel};
use super::report::ScalingReport;
use crate::construction::{build_test_state, config_with_q, excess_energy, DEFAULT_Q};
use crate::error::{range, Result};
use crate::model::{exponents, validate_and_derive, ModelParams};
use crate::relaxed::{eval_f0, minimize_fh, resolved_grid, u0_jet, NewtonOptions};

/// Quantity measured at each thickness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// Energy of the wrinkled construction above the relaxed energy.
    Construction,
    /// `F_h(u0, 0) - min F_h`.
    RelaxedGap,
    /// Relaxed energy `F0(u0)`.
    F0Scaling,
}

impl SweepMode {
    pub fn name(&self) -> &'static str {
        match self {
            SweepMode::Construction => "construction",
            SweepMode::RelaxedGap => "relaxed-gap",
            SweepMode::F0Scaling => "f0-scaling",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "construction" => Ok(SweepMode::Construction),
            "relaxed-gap" => Ok(SweepMode::RelaxedGap),
            "f0-scaling" => Ok(SweepMode::F0Scaling),
            _ => Err(range(format!("unknown sweep mode {s:?}"))),
        }
    }

    /// Exponent predicted by the theory. For the relaxed gap it is an upper bound on the decay.
    pub fn expected_slope(&self, beta: f64) -> f64 {
        match self {
            SweepMode::Construction => exponents::excess(beta),
            SweepMode::RelaxedGap => 2.0,
            SweepMode::F0Scaling => exponents::relaxed_energy(beta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub mode: SweepMode,
    /// Mode count exponent of the construction.
    pub q: f64,
    /// Background cells of the relaxed grids.
    pub n_radial: usize,
    pub model: FitModel,
}

impl SweepOptions {
    pub fn new(mode: SweepMode) -> Self {
        SweepOptions { mode, q: DEFAULT_Q, n_radial: 256, model: FitModel::PurePower }
    }
}

/// Smallest sweep accepted by [`sweep_excess`].
pub const MIN_POINTS: usize = 6;
pub const MIN_DECADES: f64 = 2.0;

/// The selected quantity at one thickness.
pub fn evaluate(params: &ModelParams, opts: &SweepOptions) -> Result<f64> {
    let scales = validate_and_derive(params)?;
    match opts.mode {
        SweepMode::Construction => {
            let config = config_with_q(params, &scales, opts.q)?;
            let state = build_test_state(params, &scales, &config)?;
            Ok(excess_energy(&state).value)
        }
        SweepMode::RelaxedGap => {
            let grid = resolved_grid(opts.n_radial, params, &scales)?;
            Ok(minimize_fh(&grid, params, &scales, None, NewtonOptions::default())?.gap_to_u0)
        }
        SweepMode::F0Scaling => {
            let grid = resolved_grid(opts.n_radial, params, &scales)?;
            Ok(eval_f0(&|r| u0_jet(r, params, &scales), &grid, params, &scales))
        }
    }
}

/// Values at every thickness, computed concurrently and returned in input order.
pub fn sweep_values(template: &ModelParams, h_list: &[f64], opts: &SweepOptions) -> Result<Vec<(f64, f64)>> {
    h_list.par_iter().map(|&h| evaluate(&template.with_h(h), opts).map(|v| (h, v))).collect()
}

/// Sweep and fit. Needs at least six thicknesses spanning two decades.
pub fn sweep_excess(template: &ModelParams, h_list: &[f64], opts: &SweepOptions) -> Result<ScalingReport> {
    if h_list.len() < MIN_POINTS || decades_spanned(h_list) < MIN_DECADES {
        return Err(range(format!(
            "a sweep needs at least {MIN_POINTS} thicknesses spanning {MIN_DECADES} decades, got {} spanning {:.2}",
            h_list.len(),
            decades_spanned(h_list)
        )));
    }
    let points = sweep_values(template, h_list, opts)?;
    ScalingReport::from_points(opts.mode, *template, points, opts.model)
}
