//! Scaling reports and their CSV, JSON and SVG renderings.

use serde::{Deserialize, Serialize};

use super::fit::{decades_spanned, fit_powerlaw, FitModel, PowerFit};
use super::sweep::SweepMode;
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Version tag of the JSON summary layout.
pub const SCHEMA: &str = "fvk-scaling-report/1";

/// Largest relative fit error accepted for a reported fit.
pub const MAX_RESIDUAL: f64 = 0.2;

/// Measured values over a thickness sweep with their fitted exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub schema: String,
    pub mode: SweepMode,
    pub template: ModelParams,
    /// `(h, value)` in sweep order.
    pub points: Vec<(f64, f64)>,
    pub expected_slope: f64,
    /// The selected model.
    pub model: FitModel,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub slope_ci95: f64,
    /// Both fits, for comparison.
    pub pure: PowerFit,
    pub logged: Option<PowerFit>,
}

impl ScalingReport {
    /// Fit the points. Needs four points over two decades, and a residual of at most 0.2.
    pub fn from_points(mode: SweepMode, template: ModelParams, points: Vec<(f64, f64)>, model: FitModel) -> Result<Self> {
        let hs: Vec<f64> = points.iter().map(|p| p.0).collect();
        if points.len() < 4 || decades_spanned(&hs) < 2.0 {
            return Err(Error::Fit("a fit needs at least 4 points spanning 2 decades".into()));
        }
        let pure = fit_powerlaw(&points, FitModel::PurePower)?;
        let logged = if hs.iter().all(|&h| h < 1.0) { Some(fit_powerlaw(&points, FitModel::PowerTimesLog)?) } else { None };
        let chosen = match model {
            FitModel::PurePower => pure,
            FitModel::PowerTimesLog => logged.ok_or_else(|| Error::Fit("the logarithmic model needs h < 1".into()))?,
        };
        if !(chosen.residual <= MAX_RESIDUAL) {
            return Err(Error::Fit(format!("residual {:.3} exceeds {MAX_RESIDUAL}", chosen.residual)));
        }
        Ok(ScalingReport {
            schema: SCHEMA.into(),
            mode,
            template,
            points,
            expected_slope: mode.expected_slope(template.beta),
            model,
            slope: chosen.slope,
            intercept: chosen.intercept,
            residual: chosen.residual,
            slope_ci95: chosen.slope_ci95,
            pure,
            logged,
        })
    }

    /// `h,value` rows with a header. Values are written with full round-trip precision.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["h", "value"]).expect("in-memory write");
        for &(h, v) in &self.points {
            w.write_record([format!("{h:e}"), format!("{v:e}")]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Self-contained log-log plot with the fitted line and a reference line of the
    /// predicted slope through the middle of the data.
    pub fn to_svg(&self) -> String {
        let title = format!("{} (beta = {})", self.mode.name(), self.template.beta);
        loglog_svg(
            &title,
            &self.points,
            Some((self.slope, self.intercept)),
            Some(self.expected_slope),
            &format!("fit slope {:.3}", self.slope),
            &format!("reference slope {:.3}", self.expected_slope),
        )
    }
}

/// Minimal log-log scatter plot. `fit` is `(slope, ln C)`; `reference` is a slope
/// drawn through the geometric mean of the points.
pub fn loglog_svg(
    title: &str,
    points: &[(f64, f64)],
    fit: Option<(f64, f64)>,
    reference: Option<f64>,
    fit_label: &str,
    ref_label: &str,
) -> String {
    const W: f64 = 640.0;
    const H: f64 = 440.0;
    const L: f64 = 80.0;
    const R: f64 = 20.0;
    const T: f64 = 40.0;
    const B: f64 = 60.0;
    let logs: Vec<(f64, f64)> = points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (p.0.log10(), p.1.log10())).collect();
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        W / 2.0,
        escape(title)
    );
    if logs.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let (mut x0, mut x1, mut y0, mut y1) = bounds(&logs);
    let pad = |a: &mut f64, b: &mut f64| {
        let d = (*b - *a).max(1e-3) * 0.08;
        *a -= d;
        *b += d;
    };
    pad(&mut x0, &mut x1);
    pad(&mut y0, &mut y1);
    let px = |x: f64| L + (x - x0) / (x1 - x0) * (W - L - R);
    let py = |y: f64| H - B - (y - y0) / (y1 - y0) * (H - T - B);

    svg.push_str(&format!(
        "<rect x=\"{L}\" y=\"{T}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        W - L - R,
        H - T - B
    ));
    for d in (x0.ceil() as i64)..=(x1.floor() as i64) {
        let x = px(d as f64);
        svg.push_str(&format!(
            "<line x1=\"{x:.1}\" y1=\"{}\" x2=\"{x:.1}\" y2=\"{}\" stroke=\"#ccc\"/><text x=\"{x:.1}\" y=\"{}\" text-anchor=\"middle\">1e{d}</text>\n",
            T,
            H - B,
            H - B + 16.0
        ));
    }
    let ystep = (((y1 - y0) / 8.0).ceil() as i64).max(1);
    let mut d = (y0.ceil() as i64).div_euclid(ystep) * ystep;
    while (d as f64) <= y1 {
        if d as f64 >= y0 {
            let y = py(d as f64);
            svg.push_str(&format!(
                "<line x1=\"{L}\" y1=\"{y:.1}\" x2=\"{}\" y2=\"{y:.1}\" stroke=\"#ccc\"/><text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">1e{d}</text>\n",
                W - R,
                L - 6.0,
                y + 4.0
            ));
        }
        d += ystep;
    }
    svg.push_str(&format!("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">h</text>\n", (L + W - R) / 2.0, H - 20.0));

    let line = |slope: f64, c10: f64, color: &str, dash: &str| {
        format!(
            "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{color}\" stroke-width=\"1.5\"{dash}/>\n",
            px(x0),
            py(c10 + slope * x0),
            px(x1),
            py(c10 + slope * x1)
        )
    };
    let clip = format!("<clipPath id=\"plot\"><rect x=\"{L}\" y=\"{T}\" width=\"{}\" height=\"{}\"/></clipPath>\n<g clip-path=\"url(#plot)\">\n", W - L - R, H - T - B);
    svg.push_str(&clip);
    if let Some((slope, ln_c)) = fit {
        svg.push_str(&line(slope, ln_c / std::f64::consts::LN_10, "#1f77b4", ""));
    }
    if let Some(slope) = reference {
        let n = logs.len() as f64;
        let (mx, my) = (logs.iter().map(|p| p.0).sum::<f64>() / n, logs.iter().map(|p| p.1).sum::<f64>() / n);
        svg.push_str(&line(slope, my - slope * mx, "#d62728", " stroke-dasharray=\"6 4\""));
    }
    for &(x, y) in &logs {
        svg.push_str(&format!("<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"4\" fill=\"black\"/>\n", px(x), py(y)));
    }
    svg.push_str("</g>\n");
    let mut ly = T + 16.0;
    if fit.is_some() {
        svg.push_str(&format!("<text x=\"{}\" y=\"{ly}\" fill=\"#1f77b4\">{}</text>\n", L + 10.0, escape(fit_label)));
        ly += 16.0;
    }
    if reference.is_some() {
        svg.push_str(&format!("<text x=\"{}\" y=\"{ly}\" fill=\"#d62728\">{}</text>\n", L + 10.0, escape(ref_label)));
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(logs: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    logs.iter().fold((f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY), |(a, b, c, d), &(x, y)| {
        (a.min(x), b.max(x), c.min(y), d.max(y))
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
