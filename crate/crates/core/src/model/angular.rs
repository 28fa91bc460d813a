//! Functions of the angle stored by their Fourier coefficients.
//!
//! The basis is `{1, √2 cos nθ, √2 sin nθ}`, orthonormal for the angular average,
//! so the average of `f²` is the sum of squared coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigMode {
    pub n: u64,
    pub a: f64,
    pub b: f64,
}

/// Real trigonometric polynomial with sparse, strictly increasing positive frequencies.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trig {
    pub mean: f64,
    pub modes: Vec<TrigMode>,
}

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn sort_merge(mut raw: Vec<TrigMode>, mean: f64) -> Trig {
    raw.sort_unstable_by_key(|m| m.n);
    let mut modes: Vec<TrigMode> = Vec::with_capacity(raw.len());
    for m in raw {
        match modes.last_mut() {
            Some(last) if last.n == m.n => {
                last.a += m.a;
                last.b += m.b;
            }
            _ => modes.push(m),
        }
    }
    Trig { mean, modes }
}

impl Trig {
    pub fn constant(c: f64) -> Self {
        Trig { mean: c, modes: Vec::new() }
    }

    /// Build from unsorted modes; repeated frequencies are summed and `n = 0` goes to the mean.
    pub fn from_modes(mean: f64, raw: Vec<TrigMode>) -> Self {
        let mut extra = 0.0;
        let raw: Vec<TrigMode> = raw
            .into_iter()
            .filter(|m| {
                if m.n == 0 {
                    extra += m.a;
                    false
                } else {
                    true
                }
            })
            .collect();
        sort_merge(raw, mean + extra)
    }

    /// Average of `f²`.
    pub fn mean_square(&self) -> f64 {
        self.mean * self.mean + self.fluct_square()
    }

    /// Average of `(f - mean f)²`.
    pub fn fluct_square(&self) -> f64 {
        self.modes.iter().map(|m| m.a * m.a + m.b * m.b).sum()
    }

    /// Angular derivative.
    pub fn dtheta(&self) -> Trig {
        let modes = self
            .modes
            .iter()
            .map(|m| {
                let n = m.n as f64;
                TrigMode { n: m.n, a: n * m.b, b: -n * m.a }
            })
            .collect();
        Trig { mean: 0.0, modes }
    }

    pub fn scale(&self, s: f64) -> Trig {
        let modes = self.modes.iter().map(|m| TrigMode { n: m.n, a: s * m.a, b: s * m.b }).collect();
        Trig { mean: s * self.mean, modes }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Trig) -> Trig {
        let mut out = Vec::with_capacity(self.modes.len() + other.modes.len());
        let (mut i, mut j) = (0, 0);
        while i < self.modes.len() || j < other.modes.len() {
            let take_self = j == other.modes.len() || (i < self.modes.len() && self.modes[i].n < other.modes[j].n);
            let take_other = i == self.modes.len() || (j < other.modes.len() && other.modes[j].n < self.modes[i].n);
            if take_self {
                out.push(self.modes[i]);
                i += 1;
            } else if take_other {
                let m = other.modes[j];
                out.push(TrigMode { n: m.n, a: s * m.a, b: s * m.b });
                j += 1;
            } else {
                let (x, y) = (self.modes[i], other.modes[j]);
                out.push(TrigMode { n: x.n, a: x.a + s * y.a, b: x.b + s * y.b });
                i += 1;
                j += 1;
            }
        }
        Trig { mean: self.mean + s * other.mean, modes: out }
    }

    pub fn add(&self, other: &Trig) -> Trig {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Trig) -> Trig {
        self.axpy(-1.0, other)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Trig) -> Trig {
        let mut mean = self.mean * other.mean;
        let mut raw = Vec::with_capacity(2 * self.modes.len() * other.modes.len() + self.modes.len() + other.modes.len());
        for m in &other.modes {
            raw.push(TrigMode { n: m.n, a: self.mean * m.a, b: self.mean * m.b });
        }
        for m in &self.modes {
            raw.push(TrigMode { n: m.n, a: other.mean * m.a, b: other.mean * m.b });
        }
        for x in &self.modes {
            for y in &other.modes {
                // √2c_n √2c_m = c_{n-m} + c_{n+m}, √2c_n √2s_m = s_{n+m} + s_{m-n}, √2s_n √2s_m = c_{n-m} - c_{n+m}
                let cc = x.a * y.a;
                let cs = x.a * y.b;
                let sc = x.b * y.a;
                let ss = x.b * y.b;
                let sum_a = (cc - ss) * FRAC_1_SQRT_2;
                let sum_b = (cs + sc) * FRAC_1_SQRT_2;
                raw.push(TrigMode { n: x.n + y.n, a: sum_a, b: sum_b });
                let diff_a = cc + ss;
                if x.n == y.n {
                    mean += diff_a;
                } else {
                    // sin((m - n)θ) from the cross terms
                    let (d, sign) = if y.n > x.n { (y.n - x.n, 1.0) } else { (x.n - y.n, -1.0) };
                    let diff_b = sign * (cs - sc);
                    raw.push(TrigMode { n: d, a: diff_a * FRAC_1_SQRT_2, b: diff_b * FRAC_1_SQRT_2 });
                }
            }
        }
        sort_merge(raw, mean)
    }

    pub fn square(&self) -> Trig {
        self.mul(self)
    }

    /// Remove the mean.
    pub fn fluct(&self) -> Trig {
        Trig { mean: 0.0, modes: self.modes.clone() }
    }

    /// Value at angle `theta`.
    pub fn eval(&self, theta: f64) -> f64 {
        let s = std::f64::consts::SQRT_2;
        self.mean
            + self
                .modes
                .iter()
                .map(|m| {
                    let (sn, cs) = (m.n as f64 * theta).sin_cos();
                    s * (m.a * cs + m.b * sn)
                })
                .sum::<f64>()
    }

    pub fn max_freq(&self) -> u64 {
        self.modes.last().map_or(0, |m| m.n)
    }
}

/// A mode whose coefficients carry radial derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JetMode {
    pub n: u64,
    pub a: Jet,
    pub b: Jet,
}

/// A field restricted to one radius: angular Fourier data with radial jets.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AngularSlice {
    pub mean: Jet,
    pub modes: Vec<JetMode>,
}

impl AngularSlice {
    pub fn zero() -> Self {
        AngularSlice::default()
    }

    pub fn radial(mean: Jet) -> Self {
        AngularSlice { mean, modes: Vec::new() }
    }

    fn pick(&self, f: impl Fn(&Jet) -> f64) -> Trig {
        Trig {
            mean: f(&self.mean),
            modes: self.modes.iter().map(|m| TrigMode { n: m.n, a: f(&m.a), b: f(&m.b) }).collect(),
        }
    }

    pub fn value(&self) -> Trig {
        self.pick(|j| j.v)
    }

    /// First radial derivative.
    pub fn dr(&self) -> Trig {
        self.pick(|j| j.d1)
    }

    /// Second radial derivative.
    pub fn drr(&self) -> Trig {
        self.pick(|j| j.d2)
    }

    /// Sort by frequency and merge repeats.
    pub fn normalized(mut self) -> Self {
        self.modes.sort_unstable_by_key(|m| m.n);
        let mut out: Vec<JetMode> = Vec::with_capacity(self.modes.len());
        for m in self.modes {
            if m.n == 0 {
                self.mean += m.a;
                continue;
            }
            match out.last_mut() {
                Some(last) if last.n == m.n => {
                    last.a += m.a;
                    last.b += m.b;
                }
                _ => out.push(m),
            }
        }
        AngularSlice { mean: self.mean, modes: out }
    }

    pub fn max_freq(&self) -> u64 {
        self.modes.iter().map(|m| m.n).max().unwrap_or(0)
    }

    /// `B(r)`: average of `(∂r(w - mean w))²`.
    pub fn radial_fluct_energy(&self) -> f64 {
        self.modes.iter().map(|m| m.a.d1 * m.a.d1 + m.b.d1 * m.b.d1).sum()
    }
}

/// Something that yields an angular slice at any radius.
pub trait AngularFamily: Sync {
    fn slice(&self, r: f64) -> AngularSlice;
}

impl<F: Fn(f64) -> AngularSlice + Sync> AngularFamily for F {
    fn slice(&self, r: f64) -> AngularSlice {
        self(r)
    }
}

/// A field sampled at the nodes of a radial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularField {
    /// Largest admissible angular frequency.
    pub kmax: u64,
    pub slices: Vec<AngularSlice>,
}

impl AngularField {
    pub fn new(kmax: u64, slices: Vec<AngularSlice>) -> Result<Self> {
        if let Some(n) = slices.iter().map(|s| s.max_freq()).max() {
            if n > kmax {
                return Err(Error::Capacity { needed: n, kmax });
            }
        }
        Ok(AngularField { kmax, slices })
    }

    pub fn zero(len: usize, kmax: u64) -> Self {
        AngularField { kmax, slices: vec![AngularSlice::zero(); len] }
    }

    pub fn sample(family: &dyn AngularFamily, nodes: &[f64], kmax: u64) -> Result<Self> {
        Self::new(kmax, nodes.iter().map(|&r| family.slice(r).normalized()).collect())
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    /// Build from values only, filling radial derivatives by second order finite differences
    /// over the nodes. Every slice must use the same frequencies.
    pub fn from_values(nodes: &[f64], kmax: u64, values: &[Trig]) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() < 3 {
            return Err(Error::Grid("need at least three samples, one per node".into()));
        }
        let freqs: Vec<u64> = values[0].modes.iter().map(|m| m.n).collect();
        if values.iter().any(|v| v.modes.iter().map(|m| m.n).ne(freqs.iter().copied())) {
            return Err(Error::Grid("all samples must share the same frequencies".into()));
        }
        let series = |get: &dyn Fn(&Trig) -> f64| -> Vec<f64> { values.iter().map(get).collect() };
        let mut columns: Vec<(Vec<f64>, Vec<Jet>)> = Vec::new();
        let mut push = |ys: Vec<f64>| -> Result<()> {
            check_resolution(nodes, &ys)?;
            let jets = fd_jets(nodes, &ys);
            columns.push((ys, jets));
            Ok(())
        };
        push(series(&|t| t.mean))?;
        for k in 0..freqs.len() {
            push(series(&|t| t.modes[k].a))?;
            push(series(&|t| t.modes[k].b))?;
        }
        let slices = (0..nodes.len())
            .map(|i| AngularSlice {
                mean: columns[0].1[i],
                modes: freqs
                    .iter()
                    .enumerate()
                    .map(|(k, &n)| JetMode { n, a: columns[1 + 2 * k].1[i], b: columns[2 + 2 * k].1[i] })
                    .collect(),
            })
            .collect();
        Self::new(kmax, slices)
    }
}

/// Refuse samples that oscillate on the scale of the node spacing: sign changes of
/// the samples, or of their second differences, closer than four nodes apart.
fn check_resolution(nodes: &[f64], ys: &[f64]) -> Result<()> {
    let scale = ys.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    if scale == 0.0 {
        return Ok(());
    }
    let jets = fd_jets(nodes, ys);
    let curv: Vec<f64> = jets.iter().map(|j| j.d2).collect();
    let cscale = curv.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    for (series, s) in [(ys, scale), (&curv[..], cscale)] {
        let mut last: Option<usize> = None;
        for i in 1..series.len() {
            let tol = 1e-12 * s;
            if series[i - 1] > tol && series[i] < -tol || series[i - 1] < -tol && series[i] > tol {
                if let Some(l) = last {
                    if i - l < 4 {
                        return Err(Error::Grid(format!(
                            "radial oscillation near r = {:.6} is not resolved by the grid",
                            nodes[i]
                        )));
                    }
                }
                last = Some(i);
            }
        }
    }
    Ok(())
}

/// Second order finite difference jets on a non-uniform node set.
fn fd_jets(x: &[f64], y: &[f64]) -> Vec<Jet> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let c = i.clamp(1, n - 2);
            let (x0, x1, x2) = (x[c - 1], x[c], x[c + 1]);
            let (y0, y1, y2) = (y[c - 1], y[c], y[c + 1]);
            // Lagrange quadratic through three points, differentiated at x[i].
            let t = x[i];
            let l0 = 1.0 / ((x0 - x1) * (x0 - x2));
            let l1 = 1.0 / ((x1 - x0) * (x1 - x2));
            let l2 = 1.0 / ((x2 - x0) * (x2 - x1));
            let d1 = y0 * l0 * ((t - x1) + (t - x2)) + y1 * l1 * ((t - x0) + (t - x2)) + y2 * l2 * ((t - x0) + (t - x1));
            let d2 = 2.0 * (y0 * l0 + y1 * l1 + y2 * l2);
            Jet::new(y[i], d1, d2)
        })
        .collect()
}
