//! Energy densities of the sheet and their decomposition into a radially
//! symmetric part, the wrinkling cost `W_r`, and five nonnegative remainders.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{AngularField, AngularSlice, DerivedScales, ModelParams, SheetSlice, SheetSource, Trig};

/// Relaxed hoop energy density: `η²` above the threshold `-2p`, linear below it.
pub fn w_rel(eta: f64, p: f64) -> f64 {
    if eta >= -2.0 * p {
        eta * eta
    } else {
        -4.0 * p * (p + eta)
    }
}

pub fn w_rel_prime(eta: f64, p: f64) -> f64 {
    if eta >= -2.0 * p {
        2.0 * eta
    } else {
        -4.0 * p
    }
}

pub fn w_rel_second(eta: f64, p: f64) -> f64 {
    if eta >= -2.0 * p {
        2.0
    } else {
        0.0
    }
}

/// Pieces of the wrinkling cost at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrParts {
    /// Excess arclength `⨍|∂θw|²/(2r²)`.
    pub excess_length: f64,
    /// Mismatch of each mode with the optimal wavelength, summed.
    pub mismatch: f64,
}

/// Wrinkling data of the fluctuating part of `w` at radius `r`.
pub fn wr_parts(w: &Trig, r: f64, params: &ModelParams) -> WrParts {
    let ModelParams { h, beta, alpha_s, .. } = *params;
    let stiff = alpha_s.sqrt() * h.powf(-beta / 2.0);
    let (mut len, mut mis) = (0.0, 0.0);
    for m in &w.modes {
        let n = m.n as f64;
        let c2 = m.a * m.a + m.b * m.b;
        len += c2 * n * n;
        let bracket = h * n / r - stiff * r / n;
        mis += c2 * n * n * bracket * bracket;
    }
    WrParts { excess_length: len / (2.0 * r * r), mismatch: mis / (r * r) }
}

/// `W_r(η, w)` in its completed-square form.
pub fn w_r(eta: f64, w: &Trig, r: f64, params: &ModelParams, scales: &DerivedScales) -> f64 {
    let WrParts { excess_length: a, mismatch } = wr_parts(w, r, params);
    (eta + a).powi(2) + 4.0 * scales.p * a + mismatch
}

/// `W_r(η, w)` straight from its definition via angular averages of derivatives.
pub fn w_r_direct(eta: f64, w: &Trig, r: f64, params: &ModelParams) -> f64 {
    let f = w.fluct();
    let wt = f.dtheta();
    let wtt = wt.dtheta();
    (eta + wt.mean_square() / (2.0 * r * r)).powi(2)
        + params.h * params.h * wtt.mean_square() / r.powi(4)
        + params.substrate() * f.mean_square()
}

/// `W_r(η, w) - W_rel(η)` without cancellation. Nonnegative up to rounding.
pub fn w_r_excess(eta: f64, w: &Trig, r: f64, params: &ModelParams, scales: &DerivedScales) -> f64 {
    let WrParts { excess_length: a, mismatch } = wr_parts(w, r, params);
    let p = scales.p;
    if eta >= -2.0 * p {
        a * (2.0 * (eta + 2.0 * p) + a) + mismatch
    } else {
        (a + eta + 2.0 * p).powi(2) + mismatch
    }
}

/// `B(r) = ⨍|∂r(w - w̄)|²` at every node.
pub fn b_profile(w: &AngularField) -> Vec<f64> {
    w.slices.iter().map(AngularSlice::radial_fluct_energy).collect()
}

/// Energy densities at one radius (angular averages, before the `r dr` weight).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NodeEnergy {
    pub membrane: f64,
    pub bending: f64,
    pub substrate: f64,
    pub mean_part: f64,
    pub wr: f64,
    pub wr_excess: f64,
    pub b: f64,
    pub r: [f64; 5],
}

/// All densities at radius `r`.
pub fn node_energy(s: &SheetSlice, r: f64, params: &ModelParams, scales: &DerivedScales) -> NodeEnergy {
    let h2 = params.h * params.h;
    let inv_big_r = 1.0 / params.big_r;
    let k_sub = params.substrate();

    let ur = s.u_r.value();
    let ur_r = s.u_r.dr();
    let ut = s.u_theta.value();
    let ut_r = s.u_theta.dr();
    let wv = s.w.value();
    let w_r_ = s.w.dr();
    let w_rr = s.w.drr();

    // derivatives of the height ξ = w - r²/(2R)
    let xi_r = w_r_.axpy(1.0, &Trig::constant(-r * inv_big_r));
    let xi_rr = w_rr.axpy(1.0, &Trig::constant(-inv_big_r));
    let xi_t = wv.dtheta();
    let xi_tt = xi_t.dtheta();
    let xi_tr = w_r_.dtheta();

    let xi_r2 = xi_r.square();
    let xi_t2 = xi_t.square();
    let cross = xi_r.mul(&xi_t);

    let e_rr = ur_r.axpy(0.5, &xi_r2);
    let e_tt = ut.dtheta().scale(1.0 / r).axpy(1.0 / r, &ur).axpy(0.5 / (r * r), &xi_t2);
    let shear = ur.dtheta().scale(1.0 / r).axpy(1.0, &ut_r).axpy(-1.0 / r, &ut).axpy(1.0 / r, &cross);

    let membrane = e_rr.mean_square() + e_tt.mean_square() + 0.5 * shear.mean_square();
    let bending = h2 * (xi_rr.mean_square() + xi_tt.mean_square() / r.powi(4) + 2.0 * xi_tr.mean_square() / (r * r));
    let substrate = k_sub * wv.mean_square();

    // decomposed form
    let ubar = s.u_r.mean;
    let wbar = s.w.mean;
    let b = s.w.radial_fluct_energy();
    let sigma_bar = ubar.d1 + 0.5 * (r * inv_big_r - wbar.d1).powi(2);
    let mean_part = (sigma_bar + 0.5 * b).powi(2) + h2 * (wbar.d2 - inv_big_r).powi(2) + k_sub * wbar.v * wbar.v;
    let eta = ubar.v / r;
    let wf = wv.fluct();
    let wr = w_r(eta, &wf, r, params, scales);
    let wr_excess = w_r_excess(eta, &wf, r, params, scales);

    let r1 = ur_r.fluct().axpy(0.5, &xi_r2.fluct()).mean_square();
    let r2 = ut.dtheta().scale(1.0 / r).axpy(1.0 / r, &ur.fluct()).axpy(0.5 / (r * r), &xi_t2.fluct()).mean_square();
    let r3 = 0.5 * shear.mean_square();
    let r4 = h2 * w_rr.fluct().mean_square();
    let r5 = 2.0 * h2 / (r * r) * xi_tr.mean_square();

    NodeEnergy { membrane, bending, substrate, mean_part, wr, wr_excess, b, r: [r1, r2, r3, r4, r5] }
}

/// Integrated energy and its decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub total: f64,
    pub membrane: f64,
    pub bending: f64,
    pub substrate: f64,
    pub mean_part: f64,
    pub wr_integral: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
    pub r5: f64,
}

impl EnergyBreakdown {
    pub fn remainders(&self) -> [f64; 5] {
        [self.r1, self.r2, self.r3, self.r4, self.r5]
    }

    /// Total computed from the decomposition instead of the direct densities.
    pub fn decomposed_total(&self) -> f64 {
        self.mean_part + self.wr_integral + self.remainders().iter().sum::<f64>()
    }

    /// Same energies in the `∫∫ dθ r dr` normalization.
    pub fn full_angle(&self) -> EnergyBreakdown {
        let c = crate::model::ANGULAR_MEASURE;
        EnergyBreakdown {
            total: c * self.total,
            membrane: c * self.membrane,
            bending: c * self.bending,
            substrate: c * self.substrate,
            mean_part: c * self.mean_part,
            wr_integral: c * self.wr_integral,
            r1: c * self.r1,
            r2: c * self.r2,
            r3: c * self.r3,
            r4: c * self.r4,
            r5: c * self.r5,
        }
    }
}

/// Densities at every node, computed in parallel.
pub fn node_energies(state: &dyn SheetSource, params: &ModelParams, scales: &DerivedScales) -> Vec<NodeEnergy> {
    let grid = state.grid();
    grid.nodes()
        .par_iter()
        .enumerate()
        .map(|(i, &r)| node_energy(&state.slice(i), r, params, scales))
        .collect()
}

/// Integrate node densities with the grid weights.
pub fn integrate(nodes: &[NodeEnergy], weights: &[f64]) -> EnergyBreakdown {
    let mut e = EnergyBreakdown::default();
    for (n, &w) in nodes.iter().zip(weights) {
        e.membrane += w * n.membrane;
        e.bending += w * n.bending;
        e.substrate += w * n.substrate;
        e.mean_part += w * n.mean_part;
        e.wr_integral += w * n.wr;
        e.r1 += w * n.r[0];
        e.r2 += w * n.r[1];
        e.r3 += w * n.r[2];
        e.r4 += w * n.r[3];
        e.r5 += w * n.r[4];
    }
    e.total = e.membrane + e.bending + e.substrate;
    e
}

/// Total energy with its decomposition.
pub fn full_energy(state: &dyn SheetSource, params: &ModelParams, scales: &DerivedScales) -> EnergyBreakdown {
    integrate(&node_energies(state, params, scales), state.grid().weights())
}

/// The five remainder integrals.
pub fn remainder(state: &dyn SheetSource, params: &ModelParams, scales: &DerivedScales) -> [f64; 5] {
    full_energy(state, params, scales).remainders()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_grid, validate_and_derive, GridScheme, SheetState, TrigMode};

    #[test]
    fn relaxed_density_branches() {
        let p = 1e-3;
        assert!((w_rel(0.01, p) - 1e-4).abs() < 1e-18);
        assert!((w_rel(-0.01, p) - 3.6e-5).abs() < 1e-18);
        // continuous with matching slope at the threshold
        let t = -2.0 * p;
        assert!((w_rel(t - 1e-9, p) - w_rel(t + 1e-9, p)).abs() < 1e-11);
        assert!((w_rel_prime(t - 1e-12, p) - w_rel_prime(t + 1e-12, p)).abs() < 1e-11);
    }

    #[test]
    fn flat_fluctuation_free_field_reduces_to_square() {
        let params = ModelParams::new(1e-3, 1.0, 1e-4, 1.0, 1.0);
        let scales = validate_and_derive(&params).unwrap();
        assert_eq!(w_r(0.3, &Trig::constant(0.7), 0.5, &params, &scales), 0.09);
    }

    #[test]
    fn optimal_mode_costs_relaxed_energy() {
        // At the optimal frequency and with the amplitude that closes the gap,
        // W_r equals W_rel below the threshold.
        let params = ModelParams::new(1e-4, 2.0, 1e-6, 1.0, 1.0);
        let scales = validate_and_derive(&params).unwrap();
        let r = 0.7;
        let k_opt = scales.k_opt(r);
        let eta = -2.0 * scales.p - 1e-3;
        let n = (k_opt.round()) as u64;
        let len = -(eta + 2.0 * scales.p); // target excess length
        let a = (len * 2.0 * r * r).sqrt() / n as f64;
        let w = Trig::from_modes(0.0, vec![TrigMode { n, a, b: 0.0 }]);
        let detuning = (n as f64 - k_opt).abs();
        let ex = w_r_excess(eta, &w, r, &params, &scales);
        assert!(ex <= 2.0 * len * (params.h / r).powi(2) * (2.0 * detuning).powi(2) * 1.01 + 1e-18, "{ex}");
    }

    #[test]
    fn zero_state_energy() {
        let params = ModelParams::new(1e-3, 1.0, 1e-4, 1.0, 2.0);
        let scales = validate_and_derive(&params).unwrap();
        let grid = build_grid(16, 1.0, GridScheme::CompositeGauss).unwrap();
        let n = grid.len();
        let z = AngularField::zero(n, 0);
        let st = SheetState::new(grid, z.clone(), z.clone(), z).unwrap();
        let e = full_energy(&st, &params, &scales);
        // membrane: ⨍e_rr² = r⁴/(4R⁴); bending h²/R²
        let want = params.r0.powi(6) / (24.0 * params.big_r.powi(4)) + params.h.powi(2) * 0.5 / params.big_r.powi(2);
        assert!((e.total - want).abs() < 1e-14);
        assert!((e.decomposed_total() - e.total).abs() < 1e-15);
    }

    #[test]
    fn flat_plane_costs_substrate_only() {
        // u = 0 and ξ = 0, i.e. w = r²/(2R)
        let params = ModelParams::new(1e-3, 1.0, 1e-4, 1.0, 2.0);
        let scales = validate_and_derive(&params).unwrap();
        let grid = build_grid(16, 1.0, GridScheme::CompositeGauss).unwrap();
        let n = grid.len();
        let w = AngularField::new(
            0,
            grid.nodes()
                .iter()
                .map(|&r| AngularSlice::radial(crate::Jet::new(r * r / 4.0, r / 2.0, 0.5)))
                .collect(),
        )
        .unwrap();
        let z = AngularField::zero(n, 0);
        let st = SheetState::new(grid, z.clone(), z, w).unwrap();
        let e = full_energy(&st, &params, &scales);
        let want = params.substrate() * params.r0.powi(6) / (24.0 * params.big_r.powi(2));
        assert!((e.total - want).abs() < 1e-12 * want);
        assert_eq!(e.membrane, 0.0);
        assert_eq!(e.bending, 0.0);
    }
}
