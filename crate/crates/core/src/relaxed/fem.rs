//! Cubic Hermite elements for radially symmetric functionals `∫ f r dr`
//! and a damped Newton solver.

use super::band::BandMatrix;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::model::profile::hermite_basis;
use crate::model::{RadialGrid, RadialProfile};

/// Local variables: `v, v', ω, ω', ω''`.
pub const NVAR: usize = 5;

pub type Grad = [f64; NVAR];
pub type Hess = [[f64; NVAR]; NVAR];

/// An energy density of one or two radial fields.
pub trait Density {
    /// 1 for `v` only, 2 for `(v, ω)`.
    fn fields(&self) -> usize;
    /// Value, gradient and Hessian in the local variables at radius `r`.
    fn eval(&self, r: f64, v: Jet, w: Jet, hess: &mut Hess) -> (f64, Grad);
}

/// Degrees of freedom: per knot `(v, v')` and, with two fields, `(ω, ω')`.
pub struct Layout {
    pub fields: usize,
    pub knots: usize,
}

impl Layout {
    pub fn len(&self) -> usize {
        2 * self.fields * self.knots
    }

    pub fn index(&self, knot: usize, field: usize, slope: bool) -> usize {
        knot * 2 * self.fields + 2 * field + slope as usize
    }

    pub fn bandwidth(&self) -> usize {
        4 * self.fields - 1
    }

    pub fn pack(&self, v: &RadialProfile, w: Option<&RadialProfile>) -> Vec<f64> {
        let mut x = vec![0.0; self.len()];
        for k in 0..self.knots {
            x[self.index(k, 0, false)] = v.values[k];
            x[self.index(k, 0, true)] = v.slopes[k];
            if let Some(w) = w {
                x[self.index(k, 1, false)] = w.values[k];
                x[self.index(k, 1, true)] = w.slopes[k];
            }
        }
        x
    }

    pub fn unpack(&self, knots: &[f64], x: &[f64], field: usize) -> RadialProfile {
        let values = (0..self.knots).map(|k| x[self.index(k, field, false)]).collect();
        let slopes = (0..self.knots).map(|k| x[self.index(k, field, true)]).collect();
        RadialProfile { knots: knots.to_vec(), values, slopes }
    }
}

/// Energy, gradient and (optionally) Hessian of `∫ f r dr` over the grid.
pub fn assemble(
    grid: &RadialGrid,
    density: &dyn Density,
    x: &[f64],
    want_hess: bool,
) -> (f64, Vec<f64>, Option<BandMatrix>) {
    let layout = Layout { fields: density.fields(), knots: grid.knots().len() };
    let nf = layout.fields;
    let mut energy = 0.0;
    let mut grad = vec![0.0; layout.len()];
    let mut hmat = want_hess.then(|| BandMatrix::zeros(layout.len(), layout.bandwidth()));
    let (ref_nodes, ref_weights) = grid.reference();
    let mut hloc = [[0.0; NVAR]; NVAR];
    for (c, cell) in grid.cells().iter().enumerate() {
        let len = cell.b - cell.a;
        // global dofs of this cell, per field: (f_a, f'_a, f_b, f'_b)
        let dofs: Vec<[usize; 4]> = (0..nf)
            .map(|f| {
                [
                    layout.index(c, f, false),
                    layout.index(c, f, true),
                    layout.index(c + 1, f, false),
                    layout.index(c + 1, f, true),
                ]
            })
            .collect();
        for (xi, wq) in ref_nodes.iter().zip(ref_weights) {
            let t = 0.5 * (xi + 1.0);
            let r = cell.a + t * len;
            let weight = 0.5 * len * wq * r;
            let basis = hermite_basis(t, len);
            let field_jet = |f: usize| {
                let d = &dofs[f];
                let dot = |b: &[f64; 4]| (0..4).map(|q| b[q] * x[d[q]]).sum::<f64>();
                Jet::new(dot(&basis[0]), dot(&basis[1]), dot(&basis[2]))
            };
            let v = field_jet(0);
            let w = if nf > 1 { field_jet(1) } else { Jet::ZERO };
            for row in hloc.iter_mut() {
                row.fill(0.0);
            }
            let (f, g) = density.eval(r, v, w, &mut hloc);
            energy += weight * f;
            // local variable -> (field, basis derivative order)
            let vars: &[(usize, usize)] = if nf > 1 { &[(0, 0), (0, 1), (1, 0), (1, 1), (1, 2)] } else { &[(0, 0), (0, 1)] };
            for (a, &(fa, oa)) in vars.iter().enumerate() {
                if g[a] != 0.0 {
                    for q in 0..4 {
                        grad[dofs[fa][q]] += weight * g[a] * basis[oa][q];
                    }
                }
            }
            if let Some(hm) = hmat.as_mut() {
                for (a, &(fa, oa)) in vars.iter().enumerate() {
                    for (b, &(fb, ob)) in vars.iter().enumerate() {
                        let hab = hloc[a][b];
                        if hab == 0.0 {
                            continue;
                        }
                        for q in 0..4 {
                            let gi = dofs[fa][q];
                            for s in 0..4 {
                                let gj = dofs[fb][s];
                                if gi >= gj {
                                    hm.add(gi, gj, weight * hab * basis[oa][q] * basis[ob][s]);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    (energy, grad, hmat)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub max_iter: usize,
    /// Stop once the Newton decrement falls below `tol * |F|`.
    pub tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { max_iter: 10_000, tol: 1e-20 }
    }
}

pub struct NewtonResult {
    pub x: Vec<f64>,
    pub energy: f64,
    pub iterations: usize,
}

/// Damped Newton iteration on a convex discretized functional. `pinned` dofs keep their value.
pub fn newton(
    grid: &RadialGrid,
    density: &dyn Density,
    mut x: Vec<f64>,
    pinned: &[usize],
    opts: NewtonOptions,
) -> Result<NewtonResult> {
    let energy_at = |x: &[f64]| assemble(grid, density, x, false).0;
    let mut last_dec = f64::INFINITY;
    for it in 0..opts.max_iter {
        let (f, mut g, h) = assemble(grid, density, &x, true);
        let mut h = h.unwrap();
        for &i in pinned {
            h.pin(i);
            g[i] = 0.0;
        }
        let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut mu = 0.0;
        let d = loop {
            let mut hm = h.clone();
            if mu > 0.0 {
                for i in 0..hm.n {
                    let di = hm.diag(i).abs().max(1e-300);
                    hm.add(i, i, mu * di);
                }
            }
            if let Some(l) = hm.cholesky() {
                break l.cholesky_solve(&neg_g);
            }
            mu = if mu == 0.0 { 1e-12 } else { mu * 10.0 };
            if mu > 1e6 {
                return Err(Error::Convergence { iterations: it, residual: f64::NAN });
            }
        };
        let dec: f64 = -g.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>();
        // Rounding floor: the decrement has stopped shrinking quadratically.
        let stalled = dec <= 1e-12 * f.abs() && dec > 0.25 * last_dec;
        last_dec = dec;
        if dec <= opts.tol * f.abs() || dec == 0.0 || stalled {
            return Ok(NewtonResult { x, energy: f, iterations: it });
        }
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            let ft = energy_at(&trial);
            if ft <= f - 1e-4 * t * dec {
                x = trial;
                break;
            }
            t *= 0.5;
            if t < 1e-10 {
                // No measurable decrease left: accept if the decrement is at rounding level.
                if dec <= 1e-9 * f.abs() {
                    return Ok(NewtonResult { x, energy: f, iterations: it });
                }
                return Err(Error::Convergence { iterations: it, residual: dec });
            }
        }
    }
    Err(Error::Convergence { iterations: opts.max_iter, residual: last_dec })
}
