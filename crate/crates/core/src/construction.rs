//! Explicit wrinkled test states whose energy exceeds the relaxed minimum by a
//! small power of the thickness.
//!
//! The out-of-plane field superposes a window of angular modes around the optimal
//! frequency; in-plane corrections cancel the shear strain exactly.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::energy::{node_energies, NodeEnergy};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::model::{
    build_grid, AngularFamily, AngularSlice, DerivedScales, GridScheme, JetMode, ModelParams, RadialGrid, SheetSlice,
    SheetSource,
};
use crate::relaxed::{eval_f0, gamma0_jet, sigma0_jet, u0_jet};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Smooth bump supported on `[-1/2, 1/2]`: `exp(-1/(1 - 4t²))`.
pub fn bump(t: f64) -> f64 {
    if t.abs() >= 0.5 {
        0.0
    } else {
        (-1.0 / (1.0 - 4.0 * t * t)).exp()
    }
}

fn bump_jet(t: Jet) -> Jet {
    if t.v.abs() >= 0.5 {
        return Jet::ZERO;
    }
    let one = -(t * t * 4.0) + 1.0;
    (-one.recip()).exp()
}

fn psi(x: Jet) -> Jet {
    if x.v <= 0.0 {
        Jet::ZERO
    } else {
        (-x.recip()).exp()
    }
}

fn cutoff_jet(t: Jet) -> Jet {
    if t.v <= 1.0 {
        Jet::ZERO
    } else if t.v >= 2.0 {
        Jet::constant(1.0)
    } else {
        let a = psi(t - 1.0);
        let b = psi(-t + 2.0);
        a / (a + b)
    }
}

/// Smooth step: 0 below 1, 1 above 2.
pub fn cutoff(t: f64) -> f64 {
    cutoff_jet(Jet::constant(t)).v
}

/// `∫ f` over `[a, b]` with 200 Gauss panels of 10 points.
pub fn panel_integral(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let rule = gauss_quad::GaussLegendre::new(10).expect("degree >= 2");
    let panels = 200;
    let hstep = (b - a) / panels as f64;
    (0..panels).map(|i| rule.integrate(a + i as f64 * hstep, a + (i + 1) as f64 * hstep, &f)).sum()
}

/// `∫ m²`.
pub fn bump_square_integral() -> f64 {
    static CELL: OnceLock<f64> = OnceLock::new();
    *CELL.get_or_init(|| panel_integral(|t| bump(t).powi(2), -0.5, 0.5))
}

/// `|t Σ_k f(t k + shift) - ∫ f|` for `f` supported in `support`.
pub fn sum_vs_integral(f: impl Fn(f64) -> f64, support: (f64, f64), t: f64, shift: f64) -> f64 {
    let (a, b) = support;
    let k_lo = ((a - shift) / t).floor() as i64 - 1;
    let k_hi = ((b - shift) / t).ceil() as i64 + 1;
    let sum: f64 = (k_lo..=k_hi).map(|k| f(t * k as f64 + shift)).sum::<f64>() * t;
    (sum - panel_integral(&f, a, b)).abs()
}

/// Tunable parts of the construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionConfig {
    /// Number of modes across the window is `(ln 1/h)^q`.
    pub q: f64,
    /// Window width in units of the mode index, the reciprocal of the mode count.
    pub window: f64,
    /// Target spacing of the envelope in frequency space.
    pub ell: f64,
    /// Cutoff exponent: the amplitude switches on over `[r_h + h^α, r_h + 2h^α]`.
    pub alpha: f64,
    pub cutoff_width: f64,
    /// Frequencies are multiples of this stride.
    pub stride: u64,
    /// Frequency cap for all fields.
    pub kmax: u64,
    /// Background radial cells.
    pub radial_cells: usize,
}

/// Mode count exponent used by [`default_config`].
pub const DEFAULT_Q: f64 = 1.5;

/// Choice of window, envelope spacing and cutoff for the given `beta`.
pub fn default_config(params: &ModelParams, scales: &DerivedScales) -> Result<ConstructionConfig> {
    config_with_q(params, scales, DEFAULT_Q)
}

pub fn config_with_q(params: &ModelParams, scales: &DerivedScales, q: f64) -> Result<ConstructionConfig> {
    let ModelParams { h, beta, r0, .. } = *params;
    if !(q > 0.0) {
        return Err(crate::error::range("q must be positive"));
    }
    let modes = (1.0 / h).ln().powf(q);
    let window = 1.0 / modes;
    let (ell, alpha) = if beta >= 2.0 / 3.0 {
        (h.powf((2.0 + beta) / 8.0), (6.0 - beta) / 8.0)
    } else {
        (h.powf(1.0 / 3.0), (14.0 - beta) / 18.0)
    };
    let cutoff_width = h.powf(alpha);
    if cutoff_width > scales.r_h / 8.0 {
        return Err(Error::Assumption(format!(
            "cutoff width h^alpha = {cutoff_width:e} exceeds r_h/8 = {:e}",
            scales.r_h / 8.0
        )));
    }
    let stride = (window / ell).round().max(1.0) as u64;
    let top_index = (scales.k_opt(r0) / stride as f64 + 0.5 * modes).ceil() as u64 + 1;
    let kmax = 2 * top_index * stride;
    Ok(ConstructionConfig { q, window, ell, alpha, cutoff_width, stride, kmax, radial_cells: 400 })
}

/// The wrinkled test state. Fields are computed on demand at each radius.
#[derive(Debug, Clone)]
pub struct TestState {
    pub params: ModelParams,
    pub scales: DerivedScales,
    pub config: ConstructionConfig,
    pub grid: RadialGrid,
    m2: f64,
}

/// Per-radius ingredients shared by all fields.
struct Local {
    r: Jet,
    /// Window of mode indices and their `A r m_k` profiles.
    k_lo: u64,
    mk: Vec<Jet>,
}

/// Build the test state with its radial grid, refined around the core radius and the cutoff.
pub fn build_test_state(params: &ModelParams, scales: &DerivedScales, config: &ConstructionConfig) -> Result<TestState> {
    let top = scales.k_opt(params.r0) / config.stride as f64 + 0.5 / config.window;
    let needed = 2 * (top.ceil() as u64 + 1) * config.stride;
    if needed > config.kmax {
        return Err(Error::Capacity { needed, kmax: config.kmax });
    }
    if config.stride == 0 {
        return Err(crate::error::range("stride must be at least 1"));
    }
    let w = config.cutoff_width;
    let grid = build_grid(
        config.radial_cells,
        params.r0,
        GridScheme::Graded {
            focus: vec![scales.r_h, scales.r_h + w, scales.r_h + 2.0 * w],
            finest: w / 16.0,
            ratio: 1.15,
        },
    )?;
    Ok(TestState { params: *params, scales: *scales, config: config.clone(), grid, m2: bump_square_integral() })
}

impl TestState {
    fn local(&self, r: f64) -> Local {
        let rj = Jet::var(r);
        let c = &self.config;
        let t = Jet::new((r - self.scales.r_h) / c.cutoff_width, 1.0 / c.cutoff_width, 0.0);
        let eta = cutoff_jet(t);
        if eta.v == 0.0 && eta.d1 == 0.0 && eta.d2 == 0.0 {
            return Local { r: rj, k_lo: 1, mk: Vec::new() };
        }
        let gamma = gamma0_jet(r, &self.params, &self.scales);
        let amp = eta * (gamma * (2.0 / self.m2)).sqrt();
        let modes = 1.0 / c.window;
        let n = c.stride as f64;
        let center = self.scales.k_opt(r) / n;
        let k_lo = ((center - 0.5 * modes).floor().max(0.0) as u64).max(1);
        let k_hi = (center + 0.5 * modes).ceil() as u64;
        let dt = -self.scales.k_slope / (n * modes);
        let mut mk = Vec::with_capacity((k_hi - k_lo + 1) as usize);
        for k in k_lo..=k_hi {
            let t = Jet::new((k as f64 - center) / modes, dt, 0.0);
            mk.push(amp * rj * bump_jet(t));
        }
        Local { r: rj, k_lo, mk }
    }

    /// Out-of-plane displacement `w` at radius `r`.
    pub fn w_slice(&self, r: f64) -> AngularSlice {
        let l = self.local(r);
        self.w_from(&l)
    }

    fn w_from(&self, l: &Local) -> AngularSlice {
        let n = self.config.stride as f64;
        let s = self.config.window.sqrt();
        let modes = l
            .mk
            .iter()
            .enumerate()
            .filter(|(_, m)| **m != Jet::ZERO)
            .map(|(i, m)| {
                let k = l.k_lo + i as u64;
                JetMode { n: k * self.config.stride, a: *m * (s / (k as f64 * n)), b: Jet::ZERO }
            })
            .collect();
        AngularSlice { mean: Jet::ZERO, modes }
    }

    /// All fields at radius `r`.
    pub fn sheet_slice(&self, r: f64) -> SheetSlice {
        let l = self.local(r);
        let u0 = u0_jet(r, &self.params, &self.scales);
        let w = self.w_from(&l);
        let mut u_r = AngularSlice::radial(u0);
        let mut u_t = AngularSlice::zero();
        if l.mk.is_empty() {
            return SheetSlice { u_r, u_theta: u_t, w };
        }
        let stride = self.config.stride;
        let n = stride as f64;
        let hd = self.config.window;
        let cnt = l.mk.len();
        let r2 = l.r * l.r;
        let freq = |index: u64| index * stride;

        // first-order in-plane response to w
        let slope = l.r * (1.0 / self.params.big_r);
        for m in &w.modes {
            u_r.modes.push(JetMode { n: m.n, a: slope * m.a, b: slope * m.b });
        }

        // A m_k, and sums of A² m_k m_j over pairs with fixed k + j and fixed k - j > 0
        let am: Vec<Jet> = l.mk.iter().map(|&m| m / l.r).collect();
        let mut pair_sum = vec![Jet::ZERO; 2 * cnt - 1];
        let mut pair_diff = vec![Jet::ZERO; cnt];
        for i in 0..cnt {
            for j in 0..cnt {
                let p = am[i] * am[j];
                pair_sum[i + j] += p;
                if i > j {
                    pair_diff[i - j] += p;
                }
            }
        }
        // hoop terms: u_θ = (u₊ - u₋)/2, with the radial partner U_r = (U₊ - U₋)/2
        for (idx, y) in pair_sum.iter().enumerate() {
            let s = 2 * l.k_lo + idx as u64;
            let sf = s as f64;
            let ut = *y * l.r * (0.5 * hd / (sf * n * SQRT_2));
            u_t.modes.push(JetMode { n: freq(s), a: Jet::ZERO, b: ut });
            let ur = r2 * y.derivative() * (0.5 * hd / (sf * sf * n * n * SQRT_2));
            u_r.modes.push(JetMode { n: freq(s), a: ur, b: Jet::ZERO });
        }
        for (d, y) in pair_diff.iter().enumerate().skip(1) {
            let df = d as f64;
            let ut = *y * l.r * (-hd / (df * n * SQRT_2));
            u_t.modes.push(JetMode { n: freq(d as u64), a: Jet::ZERO, b: ut });
            let ur = r2 * y.derivative() * (-hd / (df * df * n * n * SQRT_2));
            u_r.modes.push(JetMode { n: freq(d as u64), a: ur, b: Jet::ZERO });
        }
        // V_r: cancels ∂r w ∂θ w in the shear strain
        for i in 0..cnt {
            let k = l.k_lo + i as u64;
            let dm = l.mk[i].derivative();
            for j in 0..cnt {
                let kj = l.k_lo + j as u64;
                let prod = dm * l.mk[j];
                let (kf, sf) = (k as f64, (k + kj) as f64);
                let plus = prod * (-hd / (kf * sf * n * n * SQRT_2));
                u_r.modes.push(JetMode { n: freq(k + kj), a: plus, b: Jet::ZERO });
                if i != j {
                    let d = kf - kj as f64;
                    let minus = prod * (hd / (kf * d * n * n * SQRT_2));
                    u_r.modes.push(JetMode { n: freq(k.abs_diff(kj)), a: minus, b: Jet::ZERO });
                }
            }
        }
        SheetSlice { u_r: u_r.normalized(), u_theta: u_t.normalized(), w }
    }

    /// Excess length `⨍|∂θw|²/(2r²)` of the construction and its target `γ0`.
    pub fn excess_length(&self, r: f64) -> (f64, f64) {
        let l = self.local(r);
        let hd = self.config.window;
        let got = l.mk.iter().map(|m| (m.v / r).powi(2)).sum::<f64>() * hd / 2.0;
        (got, gamma0_jet(r, &self.params, &self.scales).v)
    }
}

impl SheetSource for TestState {
    fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    fn slice(&self, node: usize) -> SheetSlice {
        self.sheet_slice(self.grid.nodes()[node])
    }
}

impl AngularFamily for TestState {
    fn slice(&self, r: f64) -> AngularSlice {
        self.w_slice(r)
    }
}

/// Excess energy of a test state over the relaxed minimum, with its parts.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ExcessEnergy {
    /// Identity-based value (no cancellation).
    pub value: f64,
    /// Plain difference of the total and relaxed energies.
    pub direct: f64,
    pub stress_coupling: f64,
    pub b_squared: f64,
    pub wrinkle_mismatch: f64,
    pub remainders: [f64; 5],
    pub flat_bending: f64,
    pub total: f64,
    pub relaxed: f64,
}

/// Energy of the test state minus `F0(u0)` on the same grid.
pub fn excess_energy(state: &TestState) -> ExcessEnergy {
    let (params, scales) = (&state.params, &state.scales);
    let nodes: Vec<NodeEnergy> = node_energies(state, params, scales);
    let grid = &state.grid;
    let mut e = ExcessEnergy::default();
    for ((ne, &r), &wt) in nodes.iter().zip(grid.nodes()).zip(grid.weights()) {
        let s0 = sigma0_jet(r, params, scales).v;
        e.stress_coupling += wt * s0 * ne.b;
        e.b_squared += wt * 0.25 * ne.b * ne.b;
        e.wrinkle_mismatch += wt * ne.wr_excess;
        for (acc, x) in e.remainders.iter_mut().zip(&ne.r) {
            *acc += wt * x;
        }
        e.total += wt * (ne.membrane + ne.bending + ne.substrate);
    }
    e.flat_bending = params.h.powi(2) * grid.weights().iter().sum::<f64>() / params.big_r.powi(2);
    e.value = e.stress_coupling + e.b_squared + e.wrinkle_mismatch + e.remainders.iter().sum::<f64>() + e.flat_bending;
    e.relaxed = eval_f0(&|r| u0_jet(r, params, scales), grid, params, scales);
    e.direct = e.total - e.relaxed;
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_values() {
        assert!((bump(0.0) - (-1.0f64).exp()).abs() < 1e-16);
        assert_eq!(bump(0.5), 0.0);
        assert_eq!(bump(-0.7), 0.0);
        assert!((bump_square_integral() - 0.066_543_060_422_497_15).abs() < 1e-13);
    }

    #[test]
    fn cutoff_values() {
        assert_eq!(cutoff(0.5), 0.0);
        assert_eq!(cutoff(1.0), 0.0);
        assert_eq!(cutoff(2.5), 1.0);
        assert!((cutoff(1.5) - 0.5).abs() < 1e-15);
        let j = cutoff_jet(Jet::var(1.3));
        let e = 1e-6;
        let fd = (cutoff(1.3 + e) - cutoff(1.3 - e)) / (2.0 * e);
        assert!((j.d1 - fd).abs() < 1e-8);
    }

    #[test]
    fn riemann_sum_of_bump_square() {
        let f = |t: f64| bump(t).powi(2);
        assert!(sum_vs_integral(f, (-0.5, 0.5), 0.01, 0.0) < 1e-8);
        let coarse = sum_vs_integral(f, (-0.5, 0.5), 0.02, 0.0013);
        let fine = sum_vs_integral(f, (-0.5, 0.5), 0.01, 0.0013);
        assert!(coarse / fine.max(1e-300) > 1e3, "{coarse:e} {fine:e}");
    }
}
