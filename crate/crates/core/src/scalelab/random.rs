//! Seeded random inputs satisfying the hypotheses of the wavenumber lemmas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{range, Result};
use crate::jet::Jet;
use crate::model::{AngularFamily, AngularSlice, DerivedScales, JetMode, ModelParams, RadialProfile};

/// One Fourier mode with coefficients quadratic in `r - center`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WrinkleMode {
    pub n: u64,
    pub cos: [f64; 3],
    pub sin: [f64; 3],
}

/// Smooth out-of-plane field made of a few modes near the optimal wave number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WrinkleField {
    pub seed: u64,
    pub center: f64,
    pub modes: Vec<WrinkleMode>,
}

fn quadratic(c: &[f64; 3], t: f64) -> Jet {
    Jet { v: c[0] + t * (c[1] + t * c[2]), d1: c[1] + 2.0 * c[2] * t, d2: 2.0 * c[2] }
}

impl WrinkleField {
    /// Hex SHA-256 of the serialized field.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("field serializes");
        hex(&Sha256::digest(bytes))
    }

    pub fn max_freq(&self) -> u64 {
        self.modes.iter().map(|m| m.n).max().unwrap_or(0)
    }
}

impl AngularFamily for WrinkleField {
    fn slice(&self, r: f64) -> AngularSlice {
        let t = r - self.center;
        let modes = self.modes.iter().map(|m| JetMode { n: m.n, a: quadratic(&m.cos, t), b: quadratic(&m.sin, t) }).collect();
        AngularSlice { mean: Jet::ZERO, modes }.normalized()
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Random field on `window` with modes in a band around the optimal wave number, and a
/// mean radial displacement `ū` with `ū(r)/r ≤ -2p - margin` throughout the window.
/// The same seed gives the same pair.
pub fn random_wrinkle_field(
    seed: u64,
    params: &ModelParams,
    scales: &DerivedScales,
    window: (f64, f64),
    margin: f64,
) -> Result<(WrinkleField, RadialProfile)> {
    let (a, b) = window;
    let r0 = params.r0;
    if !(0.5 * r0 <= a && a < b && b <= r0) {
        return Err(range(format!("window [{a}, {b}] must be a nonempty subinterval of [r0/2, r0]")));
    }
    if !(margin >= 0.0) {
        return Err(range("margin must be nonnegative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = b - a;
    let center = 0.5 * (a + b);
    let p = scales.p;

    // ū(r) = -r (2p + margin + e0 + e1 (r - center)²) with e0, e1 ≥ 0
    let e0 = margin.max(p) * rng.gen_range(0.0..4.0);
    let e1 = margin.max(p) * rng.gen_range(0.0..4.0) / (len * len);
    let ubar_jet = move |r: f64| {
        let t = r - center;
        let s = Jet { v: 2.0 * p + margin + e0 + e1 * t * t, d1: 2.0 * e1 * t, d2: 2.0 * e1 };
        -(Jet::var(r) * s)
    };
    let knots: Vec<f64> = (0..=8).map(|i| a + len * i as f64 / 8.0).collect();
    let ubar = RadialProfile::from_fn(&knots, ubar_jet);

    // occasionally the flat field
    if rng.gen_bool(0.05) {
        return Ok((WrinkleField { seed, center, modes: Vec::new() }, ubar));
    }

    let k_center = scales.k_opt(center);
    let spread = (scales.k_slope * len).max(1.0) * rng.gen_range(0.5..3.0);
    let band_center = k_center + spread * rng.gen_range(-0.5..0.5);
    let count = rng.gen_range(1..=12);
    let mut modes = Vec::with_capacity(count);
    for _ in 0..count {
        let n = (band_center + spread * rng.gen_range(-1.0..1.0)).round().max(1.0) as u64;
        let coeffs = |rng: &mut ChaCha8Rng| {
            let c0: f64 = rng.gen_range(-1.0..1.0);
            [c0, c0 * rng.gen_range(-1.0..1.0) / len, c0 * rng.gen_range(-1.0..1.0) / (len * len)]
        };
        let cos = coeffs(&mut rng);
        let sin = coeffs(&mut rng);
        modes.push(WrinkleMode { n, cos, sin });
    }
    // scale to a random fraction of the excess length the relaxed problem asks for
    let mut field = WrinkleField { seed, center, modes };
    let slice = field.slice(center).value();
    let length: f64 = slice.modes.iter().map(|m| (m.n as f64).powi(2) * (m.a * m.a + m.b * m.b)).sum::<f64>() / (2.0 * center * center);
    let wanted = -(ubar_jet(center).v / center + 2.0 * p) * rng.gen_range(0.0..2.0);
    if length > 0.0 {
        let s = (wanted / length).sqrt();
        for m in &mut field.modes {
            m.cos.iter_mut().chain(m.sin.iter_mut()).for_each(|c| *c *= s);
        }
    }
    Ok((field, ubar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_and_derive;

    fn setup() -> (ModelParams, DerivedScales) {
        let params = ModelParams::new(1e-4, 1.0, 1e-2, 1.0, 1.0);
        let scales = validate_and_derive(&params).unwrap();
        (params, scales)
    }

    #[test]
    fn same_seed_same_field() {
        let (params, scales) = setup();
        let (f1, u1) = random_wrinkle_field(7, &params, &scales, (0.7, 0.72), 1e-4).unwrap();
        let (f2, u2) = random_wrinkle_field(7, &params, &scales, (0.7, 0.72), 1e-4).unwrap();
        assert_eq!(f1.digest(), f2.digest());
        assert_eq!(u1, u2);
        let (f3, _) = random_wrinkle_field(8, &params, &scales, (0.7, 0.72), 1e-4).unwrap();
        assert_ne!(f1.digest(), f3.digest());
    }

    #[test]
    fn hypothesis_holds_on_window() {
        let (params, scales) = setup();
        for seed in 0..50 {
            let (_, ubar) = random_wrinkle_field(seed, &params, &scales, (0.6, 0.65), 2e-4).unwrap();
            for i in 0..=100 {
                let r = 0.6 + 0.05 * i as f64 / 100.0;
                assert!(ubar.eval(r).v / r <= -2.0 * scales.p - 2e-4 + 1e-15);
            }
        }
    }

    #[test]
    fn rejects_window_outside_outer_half() {
        let (params, scales) = setup();
        assert!(random_wrinkle_field(1, &params, &scales, (0.2, 0.3), 1e-4).is_err());
        assert!(random_wrinkle_field(1, &params, &scales, (0.8, 0.7), 1e-4).is_err());
    }

    #[test]
    fn analytic_radial_derivatives() {
        let (params, scales) = setup();
        let (f, _) = random_wrinkle_field(3, &params, &scales, (0.7, 0.75), 1e-4).unwrap();
        let e = 1e-6;
        let (s, sp, sm) = (f.slice(0.72), f.slice(0.72 + e), f.slice(0.72 - e));
        for ((m, p), q) in s.modes.iter().zip(&sp.modes).zip(&sm.modes) {
            assert!((m.a.d1 - (p.a.v - q.a.v) / (2.0 * e)).abs() < 1e-6 * (1.0 + m.a.d1.abs()));
        }
    }
}
