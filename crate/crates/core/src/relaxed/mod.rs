//! Radially symmetric relaxed problems: the closed-form relaxed minimizer,
//! the relaxed functional `F0`, and the functional `F_h` with a radial
//! out-of-plane profile.

mod band;
pub mod closed_form;
mod fem;

use serde::{Deserialize, Serialize};

pub use closed_form::{closed_form_u0, gamma0_jet, sigma0, sigma0_jet, sigma0_profile, u0_jet, u0_profile};
pub use fem::NewtonOptions;

use crate::energy::{w_rel, w_rel_prime, w_rel_second};
use crate::error::Result;
use crate::jet::Jet;
use crate::model::{build_grid, DerivedScales, GridScheme, ModelParams, RadialGrid, RadialProfile};
use fem::{assemble, newton, Density, Grad, Hess, Layout};

struct F0Density {
    p: f64,
    inv_2r2: f64,
}

impl Density for F0Density {
    fn fields(&self) -> usize {
        1
    }

    fn eval(&self, r: f64, v: Jet, _w: Jet, h: &mut Hess) -> (f64, Grad) {
        let s = v.d1 + r * r * self.inv_2r2;
        let eta = v.v / r;
        let f = s * s + w_rel(eta, self.p);
        h[0][0] = w_rel_second(eta, self.p) / (r * r);
        h[1][1] = 2.0;
        (f, [w_rel_prime(eta, self.p) / r, 2.0 * s, 0.0, 0.0, 0.0])
    }
}

struct FhDensity {
    p: f64,
    inv_big_r: f64,
    h2: f64,
    substrate: f64,
    /// Use the positive part of the radial strain (the convex envelope in `ω'`).
    convex: bool,
}

impl Density for FhDensity {
    fn fields(&self) -> usize {
        2
    }

    fn eval(&self, r: f64, v: Jet, w: Jet, h: &mut Hess) -> (f64, Grad) {
        let tilt = w.d1 - r * self.inv_big_r;
        let s_raw = v.d1 + 0.5 * tilt * tilt;
        let s = if self.convex { s_raw.max(0.0) } else { s_raw };
        let eta = v.v / r;
        let bend = w.d2 - self.inv_big_r;
        let f = s * s + w_rel(eta, self.p) + self.h2 * bend * bend + self.substrate * w.v * w.v;
        // Where the strain is clipped the density is flat in v'; keeping the
        // rank-one curvature there keeps the Newton matrix definite.
        h[1][1] = 2.0;
        h[1][3] = 2.0 * tilt;
        h[3][1] = 2.0 * tilt;
        h[3][3] = 2.0 * tilt * tilt + 2.0 * s;
        h[0][0] = w_rel_second(eta, self.p) / (r * r);
        h[2][2] = 2.0 * self.substrate;
        h[4][4] = 2.0 * self.h2;
        let g = [w_rel_prime(eta, self.p) / r, 2.0 * s, 2.0 * self.substrate * w.v, 2.0 * s * tilt, 2.0 * self.h2 * bend];
        (f, g)
    }
}

fn f0_density(params: &ModelParams, scales: &DerivedScales) -> F0Density {
    F0Density { p: scales.p, inv_2r2: 0.5 / (params.big_r * params.big_r) }
}

fn fh_density(params: &ModelParams, scales: &DerivedScales, convex: bool) -> FhDensity {
    FhDensity {
        p: scales.p,
        inv_big_r: 1.0 / params.big_r,
        h2: params.h * params.h,
        substrate: params.substrate(),
        convex,
    }
}

fn integrate_density(grid: &RadialGrid, d: &dyn Density, v: &dyn Fn(f64) -> Jet, w: &dyn Fn(f64) -> Jet) -> f64 {
    let mut h = [[0.0; fem::NVAR]; fem::NVAR];
    grid.nodes().iter().zip(grid.weights()).map(|(&r, wt)| wt * d.eval(r, v(r), w(r), &mut h).0).sum()
}

/// `F0(v) = ∫ [(v' + r²/(2R²))² + W_rel(v/r)] r dr` by quadrature on the grid.
pub fn eval_f0(v: &dyn Fn(f64) -> Jet, grid: &RadialGrid, params: &ModelParams, scales: &DerivedScales) -> f64 {
    integrate_density(grid, &f0_density(params, scales), v, &|_| Jet::ZERO)
}

/// `F_h(v, ω)` by quadrature on the grid. With `convex` the radial strain is
/// replaced by its positive part.
pub fn eval_fh(
    v: &dyn Fn(f64) -> Jet,
    omega: &dyn Fn(f64) -> Jet,
    grid: &RadialGrid,
    params: &ModelParams,
    scales: &DerivedScales,
    convex: bool,
) -> f64 {
    integrate_density(grid, &fh_density(params, scales, convex), v, omega)
}

/// Minimizer of a discretized relaxed functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxedSolution {
    pub v: RadialProfile,
    /// Out-of-plane profile, absent for `F0`.
    pub omega: Option<RadialProfile>,
    /// Radial stress `v' + (r/R - ω')²/2` at the knots.
    pub sigma: Vec<f64>,
    pub energy: f64,
    /// Energy of the sampled closed-form `u0` (with `ω = 0`) minus `energy`.
    pub gap_to_u0: f64,
    pub iterations: usize,
}

impl RelaxedSolution {
    pub fn knots(&self) -> &[f64] {
        &self.v.knots
    }
}

fn stress(v: &RadialProfile, omega: Option<&RadialProfile>, inv_big_r: f64) -> Vec<f64> {
    v.knots
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let wp = omega.map_or(0.0, |w| w.slopes[k]);
            v.slopes[k] + 0.5 * (r * inv_big_r - wp).powi(2)
        })
        .collect()
}

/// Minimize `F0` over C¹ piecewise cubics with `v(0) = 0`, starting from `init` (or `v = 0`).
pub fn minimize_f0(
    grid: &RadialGrid,
    params: &ModelParams,
    scales: &DerivedScales,
    init: Option<&RadialProfile>,
    opts: NewtonOptions,
) -> Result<RelaxedSolution> {
    grid.check_resolves(scales.r_h)?;
    let knots = grid.knots();
    let layout = Layout { fields: 1, knots: knots.len() };
    let zero = RadialProfile::zeros(knots);
    let mut x = layout.pack(init.unwrap_or(&zero), None);
    x[layout.index(0, 0, false)] = 0.0;
    let density = f0_density(params, scales);
    let res = newton(grid, &density, x, &[layout.index(0, 0, false)], opts)?;
    let v = layout.unpack(knots, &res.x, 0);
    let u0 = u0_profile(knots, params, scales);
    let reference = assemble(grid, &density, &layout.pack(&u0, None), false).0;
    let sigma = stress(&v, None, 1.0 / params.big_r);
    Ok(RelaxedSolution { v, omega: None, sigma, energy: res.energy, gap_to_u0: reference - res.energy, iterations: res.iterations })
}

/// Minimize the convexified `F_h` over pairs `(v, ω)` of C¹ piecewise cubics,
/// `v(0) = 0`, natural conditions otherwise. Starts from `(u0, 0)` unless `init` is given.
pub fn minimize_fh(
    grid: &RadialGrid,
    params: &ModelParams,
    scales: &DerivedScales,
    init: Option<(&RadialProfile, &RadialProfile)>,
    opts: NewtonOptions,
) -> Result<RelaxedSolution> {
    grid.check_resolves(scales.r_h)?;
    let knots = grid.knots();
    let layout = Layout { fields: 2, knots: knots.len() };
    let u0 = u0_profile(knots, params, scales);
    let zero = RadialProfile::zeros(knots);
    let start = init.unwrap_or((&u0, &zero));
    let mut x = layout.pack(start.0, Some(start.1));
    x[layout.index(0, 0, false)] = 0.0;
    let density = fh_density(params, scales, true);
    let res = newton(grid, &density, x, &[layout.index(0, 0, false)], opts)?;
    let v = layout.unpack(knots, &res.x, 0);
    let omega = layout.unpack(knots, &res.x, 1);
    let reference = assemble(grid, &density, &layout.pack(&u0, Some(&zero)), false).0;
    let sigma = stress(&v, Some(&omega), 1.0 / params.big_r);
    Ok(RelaxedSolution {
        v,
        omega: Some(omega),
        sigma,
        energy: res.energy,
        gap_to_u0: reference - res.energy,
        iterations: res.iterations,
    })
}

/// Width of the boundary layers of the out-of-plane profile.
pub fn layer_width(params: &ModelParams) -> f64 {
    params.h.powf(crate::model::exponents::wavelength(params.beta)) / params.alpha_s.powf(0.25)
}

/// Grid for the relaxed problems: `n` background cells, a knot at the core radius,
/// and geometric refinement at `0`, `r_h` and `r0` down to a fraction of the layer width.
pub fn resolved_grid(n: usize, params: &ModelParams, scales: &DerivedScales) -> Result<RadialGrid> {
    let finest = (layer_width(params) / 64.0).min(params.r0 / n as f64);
    build_grid(n, params.r0, GridScheme::Graded { focus: vec![0.0, scales.r_h, params.r0], finest, ratio: 1.05 })
}

/// Closed-form value `F0(0) = r0⁶/(24R⁴)`.
pub fn f0_at_zero(params: &ModelParams) -> f64 {
    params.r0.powi(6) / (24.0 * params.big_r.powi(4))
}
