use serde::{Deserialize, Serialize};

use crate::error::{range, Error, Result};

/// Physical parameters of the sheet on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Thickness.
    pub h: f64,
    /// Substrate stiffness exponent, in (0, 2].
    pub beta: f64,
    /// Substrate stiffness prefactor.
    pub alpha_s: f64,
    /// Sheet radius.
    pub r0: f64,
    /// Sphere radius.
    pub big_r: f64,
}

impl ModelParams {
    pub fn new(h: f64, beta: f64, alpha_s: f64, r0: f64, big_r: f64) -> Self {
        ModelParams { h, beta, alpha_s, r0, big_r }
    }

    pub fn with_h(self, h: f64) -> Self {
        ModelParams { h, ..self }
    }

    /// Substrate stiffness `alpha_s * h^-beta`.
    pub fn substrate(&self) -> f64 {
        self.alpha_s * self.h.powf(-self.beta)
    }

    /// Upper bound on `alpha_s` required when `beta == 2`.
    pub fn alpha_s_bound(r0: f64, big_r: f64) -> f64 {
        (r0 / big_r).powi(4) / (729.0 * 256.0)
    }
}

/// Scales derived from [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedScales {
    /// Compression threshold: wrinkling is free once hoop strain drops below `-2p`.
    pub p: f64,
    /// Radius of the wrinkle-free core.
    pub r_h: f64,
    /// Wrinkle wavelength scale `h^((2+beta)/4)`.
    pub factor: f64,
    /// Optimal angular frequency per unit radius: `k_opt(r) = k_slope * r`.
    pub k_slope: f64,
}

impl DerivedScales {
    /// Optimal angular wave number at radius `r`.
    pub fn k_opt(&self, r: f64) -> f64 {
        self.k_slope * r
    }
}

/// Exponents of the various scaling laws, in one place.
pub mod exponents {
    /// Relaxed energy `F0(u0) ~ h^e`.
    pub fn relaxed_energy(beta: f64) -> f64 {
        (2.0 - beta) / 2.0
    }

    /// Wrinkle length scale `h^e`.
    pub fn wavelength(beta: f64) -> f64 {
        (2.0 + beta) / 4.0
    }

    /// Excess energy of the wrinkled construction when `beta >= 2/3`.
    pub fn excess_upper(beta: f64) -> f64 {
        (6.0 - beta) / 4.0
    }

    /// Excess energy of the wrinkled construction when `beta < 2/3`.
    pub fn excess_soft(beta: f64) -> f64 {
        (2.0 + beta) / 2.0
    }

    /// Excess energy predicted for a given `beta` (the smaller of the two laws).
    pub fn excess(beta: f64) -> f64 {
        if beta >= 2.0 / 3.0 {
            excess_upper(beta)
        } else {
            excess_soft(beta)
        }
    }

    /// Second lower-bound regime.
    pub const FOUR_THIRDS: f64 = 4.0 / 3.0;

    /// Radial window scale used with the first lemma inequality.
    pub fn window_first(beta: f64) -> f64 {
        (2.0 + beta) / 8.0
    }

    /// Radial window scale used with the second lemma inequality.
    pub fn window_second(beta: f64) -> f64 {
        (2.0 + 3.0 * beta) / 12.0
    }
}

fn finite_positive(name: &str, x: f64) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(range(format!("{name} must be finite and positive, got {x}")));
    }
    Ok(())
}

/// Check parameter ranges and model assumptions, and compute the derived scales.
pub fn validate_and_derive(params: &ModelParams) -> Result<DerivedScales> {
    let ModelParams { h, beta, alpha_s, r0, big_r } = *params;
    finite_positive("h", h)?;
    if h >= 1.0 {
        return Err(range(format!("h must lie in (0, 1), got {h}")));
    }
    if !beta.is_finite() || beta <= 0.0 || beta > 2.0 {
        return Err(range(format!("beta must lie in (0, 2], got {beta}")));
    }
    finite_positive("alpha_s", alpha_s)?;
    finite_positive("r0", r0)?;
    finite_positive("R", big_r)?;
    if beta == 2.0 && alpha_s >= ModelParams::alpha_s_bound(r0, big_r) {
        return Err(Error::Assumption(format!(
            "beta = 2 requires alpha_s < 3^-6 2^-8 (r0/R)^4 = {:e}, got {alpha_s:e}",
            ModelParams::alpha_s_bound(r0, big_r)
        )));
    }
    let p = alpha_s.sqrt() * h.powf((2.0 - beta) / 2.0);
    let r_h = (16.0 * p * r0 * big_r * big_r).cbrt();
    if r_h > r0 / 3.0 {
        return Err(Error::Assumption(format!(
            "core radius r_h = {r_h:e} exceeds r0/3 = {:e}",
            r0 / 3.0
        )));
    }
    let factor = h.powf(exponents::wavelength(beta));
    Ok(DerivedScales { p, r_h, factor, k_slope: alpha_s.powf(0.25) / factor })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_for_stiff_substrate_is_h_independent() {
        for h in [1e-2, 1e-5, 1e-9] {
            let s = validate_and_derive(&ModelParams::new(h, 2.0, 1e-6, 1.0, 1.0)).unwrap();
            assert!((s.p - 1e-3).abs() < 1e-18);
        }
    }

    #[test]
    fn p_for_beta_one() {
        let s = validate_and_derive(&ModelParams::new(1e-4, 1.0, 1e-4, 1.0, 1.0)).unwrap();
        assert!((s.p - 1e-4).abs() < 1e-18);
    }

    #[test]
    fn core_radius_from_threshold() {
        // 16 p r0 R^2 = 1e-3 gives r_h = 0.1
        let alpha_s = (1e-3f64 / 16.0).powi(2);
        let s = validate_and_derive(&ModelParams::new(0.5, 2.0, alpha_s, 1.0, 1.0)).unwrap();
        assert!((s.r_h - 0.1).abs() < 1e-14);
    }

    #[test]
    fn stiff_substrate_bound_enforced() {
        let e = validate_and_derive(&ModelParams::new(1e-3, 2.0, 1.0, 1.0, 1.0)).unwrap_err();
        assert!(matches!(e, Error::Assumption(_)));
    }

    #[test]
    fn ranges_rejected() {
        for p in [
            ModelParams::new(0.0, 1.0, 1e-4, 1.0, 1.0),
            ModelParams::new(1.0, 1.0, 1e-4, 1.0, 1.0),
            ModelParams::new(1e-3, 0.0, 1e-4, 1.0, 1.0),
            ModelParams::new(1e-3, 2.5, 1e-4, 1.0, 1.0),
            ModelParams::new(1e-3, 1.0, -1.0, 1.0, 1.0),
            ModelParams::new(1e-3, 1.0, 1e-4, 0.0, 1.0),
            ModelParams::new(1e-3, 1.0, 1e-4, 1.0, f64::NAN),
        ] {
            assert!(matches!(validate_and_derive(&p), Err(Error::Range(_))), "{p:?}");
        }
    }

    #[test]
    fn thin_limit_core_shrinks_below_two() {
        let mk = |h| validate_and_derive(&ModelParams::new(h, 1.0, 1e-4, 1.0, 1.0)).unwrap().r_h;
        assert!(mk(1e-8) < mk(1e-4));
    }
}
