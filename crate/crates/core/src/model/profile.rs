use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

/// Cubic Hermite basis on a cell of length `len` at local coordinate `t` in [0, 1].
/// Returns, for each of value/first/second derivative in `r`, the weights of
/// `(f_a, f'_a, f_b, f'_b)`.
pub fn hermite_basis(t: f64, len: f64) -> [[f64; 4]; 3] {
    let t2 = t * t;
    let t3 = t2 * t;
    let v = [2.0 * t3 - 3.0 * t2 + 1.0, (t3 - 2.0 * t2 + t) * len, -2.0 * t3 + 3.0 * t2, (t3 - t2) * len];
    let d1 = [
        (6.0 * t2 - 6.0 * t) / len,
        3.0 * t2 - 4.0 * t + 1.0,
        (-6.0 * t2 + 6.0 * t) / len,
        3.0 * t2 - 2.0 * t,
    ];
    let d2 = [
        (12.0 * t - 6.0) / (len * len),
        (6.0 * t - 4.0) / len,
        (-12.0 * t + 6.0) / (len * len),
        (6.0 * t - 2.0) / len,
    ];
    [v, d1, d2]
}

/// Radially symmetric profile: a C1 piecewise cubic given by values and slopes at the knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
}

impl RadialProfile {
    pub fn new(knots: Vec<f64>, values: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || values.len() != knots.len() || slopes.len() != knots.len() {
            return Err(Error::Grid("profile needs matching knots, values and slopes".into()));
        }
        Ok(RadialProfile { knots, values, slopes })
    }

    /// Interpolate a function known with its derivative.
    pub fn from_fn(knots: &[f64], f: impl Fn(f64) -> Jet) -> Self {
        let (values, slopes) = knots.iter().map(|&r| f(r)).map(|j| (j.v, j.d1)).unzip();
        RadialProfile { knots: knots.to_vec(), values, slopes }
    }

    pub fn zeros(knots: &[f64]) -> Self {
        RadialProfile { knots: knots.to_vec(), values: vec![0.0; knots.len()], slopes: vec![0.0; knots.len()] }
    }

    pub fn r0(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    /// Value and two derivatives of the interpolant at `r`.
    pub fn eval(&self, r: f64) -> Jet {
        let i = self.knots.partition_point(|&k| k <= r).clamp(1, self.knots.len() - 1) - 1;
        self.eval_in(i, r)
    }

    /// Same as [`eval`](Self::eval) with the cell index known.
    pub fn eval_in(&self, cell: usize, r: f64) -> Jet {
        let (a, b) = (self.knots[cell], self.knots[cell + 1]);
        let len = b - a;
        let basis = hermite_basis((r - a) / len, len);
        let dofs = [self.values[cell], self.slopes[cell], self.values[cell + 1], self.slopes[cell + 1]];
        let dot = |w: &[f64; 4]| w.iter().zip(&dofs).map(|(x, y)| x * y).sum::<f64>();
        Jet::new(dot(&basis[0]), dot(&basis[1]), dot(&basis[2]))
    }

    pub fn max_abs_diff(&self, other: impl Fn(f64) -> f64) -> f64 {
        self.knots.iter().zip(&self.values).map(|(&r, v)| (v - other(r)).abs()).fold(0.0, f64::max)
    }
}
