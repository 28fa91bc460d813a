//! Least squares power laws in log-log coordinates.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Shape of the fitted law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitModel {
    /// `y = C h^s`.
    PurePower,
    /// `y = C h^s |ln h|^c`.
    PowerTimesLog,
}

impl FitModel {
    pub fn name(&self) -> &'static str {
        match self {
            FitModel::PurePower => "pure-power",
            FitModel::PowerTimesLog => "power-times-log",
        }
    }
}

/// Result of [`fit_powerlaw`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub model: FitModel,
    pub slope: f64,
    /// `ln C`.
    pub intercept: f64,
    /// Exponent of `|ln h|`, zero for the pure law.
    pub log_exponent: f64,
    /// Largest relative deviation `|fit/y - 1|` over the points.
    pub residual: f64,
    /// Half width of the 95% confidence interval of the slope.
    pub slope_ci95: f64,
}

impl PowerFit {
    pub fn predict(&self, h: f64) -> f64 {
        (self.intercept + self.slope * h.ln() + self.log_exponent * h.ln().abs().ln()).exp()
    }
}

/// Fit `ln y` against `ln h` (and `ln|ln h|` for [`FitModel::PowerTimesLog`]).
pub fn fit_powerlaw(points: &[(f64, f64)], model: FitModel) -> Result<PowerFit> {
    if let Some(&(h, y)) = points.iter().find(|&&(h, y)| !(h > 0.0 && h.is_finite() && y > 0.0 && y.is_finite())) {
        return Err(Error::Fit(format!("point (h = {h:e}, value = {y:e}) is not positive and finite")));
    }
    let cols = match model {
        FitModel::PurePower => 2,
        FitModel::PowerTimesLog => 3,
    };
    let n = points.len();
    if n < cols {
        return Err(Error::Fit(format!("{n} points cannot determine {cols} coefficients")));
    }
    if model == FitModel::PowerTimesLog && points.iter().any(|&(h, _)| h >= 1.0) {
        return Err(Error::Fit("the logarithmic model needs h < 1".into()));
    }
    let design = DMatrix::from_fn(n, cols, |i, j| {
        let lh = points[i].0.ln();
        match j {
            0 => 1.0,
            1 => lh,
            _ => lh.abs().ln(),
        }
    });
    let rhs = DVector::from_iterator(n, points.iter().map(|&(_, y)| y.ln()));
    let svd = design.clone().svd(true, true);
    let coef = svd.solve(&rhs, 1e-13).map_err(|e| Error::Fit(e.to_string()))?;
    let fitted = &design * &coef;
    let residual = fitted.iter().zip(rhs.iter()).map(|(f, y)| ((f - y).exp() - 1.0).abs()).fold(0.0, f64::max);

    let dof = n - cols;
    let slope_ci95 = if dof == 0 {
        f64::INFINITY
    } else {
        let rss: f64 = fitted.iter().zip(rhs.iter()).map(|(f, y)| (f - y).powi(2)).sum();
        let s2 = rss / dof as f64;
        let gram = design.transpose() * &design;
        match gram.try_inverse() {
            Some(inv) => {
                let t = StudentsT::new(0.0, 1.0, dof as f64).map_err(|e| Error::Fit(e.to_string()))?.inverse_cdf(0.975);
                t * (s2 * inv[(1, 1)]).max(0.0).sqrt()
            }
            None => f64::INFINITY,
        }
    };
    Ok(PowerFit {
        model,
        slope: coef[1],
        intercept: coef[0],
        log_exponent: if cols == 3 { coef[2] } else { 0.0 },
        residual,
        slope_ci95,
    })
}

/// `count` points spaced evenly in `ln h` from `lo` to `hi`, both included.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

/// Number of decades covered by the `h` values.
pub fn decades_spanned(hs: &[f64]) -> f64 {
    let lo = hs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = hs.iter().copied().fold(0.0, f64::max);
    (hi / lo).log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<_> = log_spaced(1e-6, 1e-2, 9).into_iter().map(|h| (h, 3.0 * h.powf(1.5))).collect();
        let f = fit_powerlaw(&pts, FitModel::PurePower).unwrap();
        assert!((f.slope - 1.5).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-10);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn constant_has_zero_slope() {
        let pts: Vec<_> = log_spaced(1e-6, 1e-2, 7).into_iter().map(|h| (h, 0.25)).collect();
        let f = fit_powerlaw(&pts, FitModel::PurePower).unwrap();
        assert!(f.slope.abs() < 1e-12);
    }

    #[test]
    fn log_factor_is_recovered() {
        let pts: Vec<_> = log_spaced(1e-6, 1e-2, 9).into_iter().map(|h| (h, h * h.ln().abs())).collect();
        let pure = fit_powerlaw(&pts, FitModel::PurePower).unwrap();
        assert!((0.88..=1.0).contains(&pure.slope), "{}", pure.slope);
        let logged = fit_powerlaw(&pts, FitModel::PowerTimesLog).unwrap();
        assert!((logged.slope - 1.0).abs() < 0.01, "{}", logged.slope);
        assert!((logged.log_exponent - 1.0).abs() < 0.01);
        assert!(logged.residual < pure.residual);
    }

    #[test]
    fn rejects_nonpositive_values() {
        assert!(matches!(fit_powerlaw(&[(1e-3, 1.0), (1e-2, 0.0)], FitModel::PurePower), Err(Error::Fit(_))));
        assert!(matches!(fit_powerlaw(&[(1e-3, 1.0)], FitModel::PurePower), Err(Error::Fit(_))));
    }
}
