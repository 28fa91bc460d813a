use crate::error::{range, Result};
use crate::jet::Jet;
use crate::model::{DerivedScales, ModelParams, RadialProfile};

fn check(r: f64, params: &ModelParams) -> Result<()> {
    if !(0.0..=params.r0 * (1.0 + 1e-12)).contains(&r) {
        return Err(range(format!("radius {r} outside [0, r0]")));
    }
    Ok(())
}

/// Minimizer of the relaxed functional, with two radial derivatives.
pub fn u0_jet(r: f64, params: &ModelParams, scales: &DerivedScales) -> Jet {
    let (p, rh, r0) = (scales.p, scales.r_h, params.r0);
    let rr2 = params.big_r * params.big_r;
    if r <= rh {
        let c1 = 2.0 * p * (r0 / rh - 1.0) + rh * rh / (16.0 * rr2);
        Jet::new(-3.0 / 16.0 * r.powi(3) / rr2 + c1 * r, -9.0 / 16.0 * r * r / rr2 + c1, -9.0 / 8.0 * r / rr2)
    } else {
        Jet::new(
            -2.0 * p * r - (r.powi(3) - rh.powi(3)) / (6.0 * rr2) + 2.0 * p * r0 * (r / rh).ln(),
            -2.0 * p - r * r / (2.0 * rr2) + 2.0 * p * r0 / r,
            -r / rr2 - 2.0 * p * r0 / (r * r),
        )
    }
}

/// Closed-form radial displacement of the relaxed problem.
pub fn closed_form_u0(r: f64, params: &ModelParams, scales: &DerivedScales) -> Result<f64> {
    check(r, params)?;
    Ok(u0_jet(r, params, scales).v)
}

/// Radial stress `u0' + r²/(2R²)` with its derivatives.
pub fn sigma0_jet(r: f64, params: &ModelParams, scales: &DerivedScales) -> Jet {
    let (p, rh, r0) = (scales.p, scales.r_h, params.r0);
    let rr2 = params.big_r * params.big_r;
    if r <= rh {
        Jet::new((rh * rh - r * r) / (16.0 * rr2) + 2.0 * p * (r0 / rh - 1.0), -r / (8.0 * rr2), -1.0 / (8.0 * rr2))
    } else {
        Jet::new(2.0 * p * (r0 / r - 1.0), -2.0 * p * r0 / (r * r), 4.0 * p * r0 / r.powi(3))
    }
}

pub fn sigma0(r: f64, params: &ModelParams, scales: &DerivedScales) -> Result<f64> {
    check(r, params)?;
    Ok(sigma0_jet(r, params, scales).v)
}

/// Hoop compression beyond the threshold, `-(u0/r + 2p)`; zero inside the core.
/// Evaluated without the cancellation of the direct formula.
pub fn gamma0_jet(r: f64, params: &ModelParams, scales: &DerivedScales) -> Jet {
    let (p, rh, r0) = (scales.p, scales.r_h, params.r0);
    if r <= rh {
        return Jet::ZERO;
    }
    let rr2 = params.big_r * params.big_r;
    let x = Jet::var(r);
    let cubic = (x * x * x - rh.powi(3)) / (6.0 * rr2);
    let log = (x / rh).ln() * (2.0 * p * r0);
    (cubic - log) / x
}

/// `σ0` sampled on the given knots.
pub fn sigma0_profile(knots: &[f64], params: &ModelParams, scales: &DerivedScales) -> RadialProfile {
    RadialProfile::from_fn(knots, |r| sigma0_jet(r, params, scales))
}

/// `u0` sampled on the given knots.
pub fn u0_profile(knots: &[f64], params: &ModelParams, scales: &DerivedScales) -> RadialProfile {
    RadialProfile::from_fn(knots, |r| u0_jet(r, params, scales))
}
