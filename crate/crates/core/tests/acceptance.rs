//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero on any failure.
//! Pass criterion numbers as arguments to run a subset.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fvk_core::construction::{
    build_test_state, bump, default_config, excess_energy, sum_vs_integral, TestState,
};
use fvk_core::energy::{full_energy, w_r, w_r_direct, w_r_excess, w_rel};
use fvk_core::model::{
    build_grid, exponents, validate_and_derive, AngularField, AngularSlice, GridScheme, JetMode, ModelParams,
    SheetSource, SheetState, Trig, TrigMode,
};
use fvk_core::relaxed::{eval_f0, minimize_f0, sigma0_jet, u0_jet, NewtonOptions};
use fvk_core::scalelab::lemma::{default_margin, matched_radii, rhs_linear, rhs_quadratic};
use fvk_core::scalelab::{
    fit_powerlaw, lemma_check, lemma_check_sampled, log_spaced, random_wrinkle_field, sweep_excess, sweep_values,
    FitModel, LemmaKind, SweepMode, SweepOptions,
};
use fvk_core::Jet;

// Tolerances, pinned.
const IDENTITY_TOL: f64 = 1e-9;
const WR_AGREEMENT_TOL: f64 = 1e-10;
const WR_EXCESS_FLOOR: f64 = -1e-12;
const F0_ENERGY_TOL: f64 = 1e-6;
const F0_REFINEMENT_RATIO: f64 = 1.8;
const F0_SLOPE_TOL: f64 = 0.02;
const PLATEAU_SPREAD: f64 = 1e-10;
const GAP_MIN_SLOPE: f64 = 1.9;
const SIGMA_FLOOR: f64 = -1e-8;
const SIGMA_REL_TOL: f64 = 1e-4;
const EXCESS_SLOPE_TOL: f64 = 0.15;
const RHS_SLOPE_TOL: f64 = 0.02;
const SAMPLED_LHS_TOL: f64 = 1e-9;
const SHEAR_REL_TOL: f64 = 1e-10;
const EXCESS_ID_TOL: f64 = 1e-8;
const RIEMANN_TOL: f64 = 1e-8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn params(h: f64, beta: f64, alpha_s: f64) -> ModelParams {
    ModelParams::new(h, beta, alpha_s, 1.0, 1.0)
}

fn random_jet(rng: &mut ChaCha8Rng, scale: f64) -> Jet {
    Jet::new(scale * rng.gen_range(-1.0..1.0), scale * rng.gen_range(-1.0..1.0), scale * rng.gen_range(-1.0..1.0))
}

fn random_slice(rng: &mut ChaCha8Rng, scale: f64, kmax: u64) -> AngularSlice {
    let count = rng.gen_range(0..8);
    let modes = (0..count)
        .map(|_| JetMode { n: rng.gen_range(1..=kmax), a: random_jet(rng, scale), b: random_jet(rng, scale) })
        .collect();
    AngularSlice { mean: random_jet(rng, scale), modes }.normalized()
}

fn random_state(rng: &mut ChaCha8Rng, kmax: u64) -> SheetState {
    let grid = build_grid(16, 1.0, GridScheme::CompositeGauss).unwrap();
    let n = grid.len();
    let field = |rng: &mut ChaCha8Rng, scale: f64| {
        AngularField::new(kmax, (0..n).map(|_| random_slice(rng, scale, kmax)).collect()).unwrap()
    };
    let (u_r, u_t, w) = (field(rng, 1e-3), field(rng, 1e-3), field(rng, 1e-2));
    SheetState::new(grid, u_r, u_t, w).unwrap()
}

/// Random admissible parameters.
fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
    loop {
        let h = 10f64.powf(rng.gen_range(-8.0..-2.0));
        let beta = rng.gen_range(0.05..=2.0);
        let alpha_s = 10f64.powf(rng.gen_range(-10.0..-6.0));
        let p = params(h, beta, alpha_s);
        if validate_and_derive(&p).is_ok() {
            return p;
        }
    }
}

fn decomposition_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = random_params(&mut rng);
        let s = validate_and_derive(&p).unwrap();
        let state = random_state(&mut rng, 60);
        let e = full_energy(&state, &p, &s);
        worst = worst.max((e.total - e.decomposed_total()).abs() / e.total.max(1.0));
    }
    outcome(worst < IDENTITY_TOL, format!("100 random states, worst relative gap {worst:.2e} (tol {IDENTITY_TOL:e})"))
}

fn wrinkling_cost_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst, mut lowest): (f64, f64) = (0.0, f64::INFINITY);
    for _ in 0..200 {
        let p = random_params(&mut rng);
        let s = validate_and_derive(&p).unwrap();
        let r = rng.gen_range(0.05..1.0);
        let count = rng.gen_range(1..10);
        let amp = 10f64.powf(rng.gen_range(-4.0..-1.0)) * r / (s.k_opt(r).max(1.0));
        let modes = (0..count)
            .map(|_| {
                let n = (s.k_opt(r) * rng.gen_range(0.5..1.5)).round().max(1.0) as u64;
                TrigMode { n, a: amp * rng.gen_range(-1.0..1.0), b: amp * rng.gen_range(-1.0..1.0) }
            })
            .collect();
        let w = Trig::from_modes(rng.gen_range(-1.0..1.0), modes);
        let eta = s.p * rng.gen_range(-8.0..2.0);
        let spectral = w_r(eta, &w.fluct(), r, &p, &s);
        let direct = w_r_direct(eta, &w, r, &p);
        worst = worst.max((spectral - direct).abs() / spectral.abs().max(f64::MIN_POSITIVE));
        let excess = w_r_excess(eta, &w.fluct(), r, &p, &s);
        lowest = lowest.min(excess).min(spectral - w_rel(eta, s.p));
    }
    outcome(
        worst < WR_AGREEMENT_TOL && lowest >= WR_EXCESS_FLOOR,
        format!("200 slices, worst relative disagreement {worst:.2e}, smallest W_r - W_rel {lowest:.2e}"),
    )
}

fn relaxed_solver_vs_closed_form() -> Outcome {
    let p = params(1e-4, 1.0, 1e-4);
    let s = validate_and_derive(&p).unwrap();
    let solve = |n: usize| {
        let grid = build_grid(n, 1.0, GridScheme::Graded { focus: vec![s.r_h], finest: 1.0 / n as f64, ratio: 1.5 }).unwrap();
        let sol = minimize_f0(&grid, &p, &s, None, NewtonOptions::default()).unwrap();
        let err = sol.v.max_abs_diff(|r| u0_jet(r, &p, &s).v);
        let exact = eval_f0(&|r| u0_jet(r, &p, &s), &grid, &p, &s);
        (err, (sol.energy - exact).abs() / exact)
    };
    let (e512, _) = solve(512);
    let (e1024, rel) = solve(1024);
    let ratio = e512 / e1024;
    outcome(
        ratio >= F0_REFINEMENT_RATIO && rel <= F0_ENERGY_TOL,
        format!("sup error {e512:.2e} -> {e1024:.2e} (ratio {ratio:.2}), energy mismatch {rel:.2e} at n = 1024"),
    )
}

fn relaxed_energy_slopes() -> Outcome {
    let hs = log_spaced(1e-6, 1e-2, 9);
    let opts = SweepOptions::new(SweepMode::F0Scaling);
    let mut pass = true;
    let mut detail = Vec::new();
    for beta in [1.0 / 3.0, 1.0] {
        let pts = sweep_values(&params(1.0, beta, 1e-4), &hs, &opts).unwrap();
        let fit = fit_powerlaw(&pts, FitModel::PurePower).unwrap();
        let target = exponents::relaxed_energy(beta);
        pass &= (fit.slope - target).abs() <= F0_SLOPE_TOL;
        detail.push(format!("beta {beta:.3}: slope {:.4} (target {target:.4})", fit.slope));
    }
    let pts = sweep_values(&params(1.0, 2.0, 1e-6), &hs, &opts).unwrap();
    let (lo, hi) = pts.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &(_, v)| (lo.min(v), hi.max(v)));
    let spread = (hi - lo) / hi;
    pass &= spread < PLATEAU_SPREAD;
    detail.push(format!("beta 2: plateau spread {spread:.1e}"));
    outcome(pass, detail.join("; "))
}

fn relaxed_gap_suite() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    let cases = [(1.0, 1e-4, log_spaced(1e-8, 1e-6, 6)), (2.0, 1e-6, log_spaced(1e-6, 1e-4, 6))];
    for (beta, alpha_s, hs) in cases {
        let template = params(1.0, beta, alpha_s);
        let opts = NewtonOptions::default();
        let mut pts = Vec::new();
        let (mut min_sigma, mut worst_rim) = (f64::INFINITY, 0.0f64);
        for &h in &hs {
            let p = template.with_h(h);
            let s = validate_and_derive(&p).unwrap();
            let grid = fvk_core::relaxed::resolved_grid(256, &p, &s).unwrap();
            let sol = fvk_core::relaxed::minimize_fh(&grid, &p, &s, None, opts).unwrap();
            pass &= sol.gap_to_u0 >= 0.0;
            pts.push((h, sol.gap_to_u0));
            for (&r, &sig) in sol.knots().iter().zip(&sol.sigma) {
                min_sigma = min_sigma.min(sig);
                if r >= 0.5 * p.r0 {
                    let expect = 2.0 * s.p * (p.r0 / r - 1.0);
                    worst_rim = worst_rim.max((sig - expect).abs() / (2.0 * s.p));
                }
            }
        }
        let fit = fit_powerlaw(&pts, FitModel::PurePower).unwrap();
        pass &= fit.slope >= GAP_MIN_SLOPE && min_sigma >= SIGMA_FLOOR && worst_rim <= SIGMA_REL_TOL;
        detail.push(format!(
            "beta {beta}: gap slope {:.3}, min sigma {min_sigma:.1e}, rim stress error {worst_rim:.1e}",
            fit.slope
        ));
    }
    outcome(pass, detail.join("; "))
}

fn construction_slopes() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    let cases = [
        (2.0, 1e-8, (1e-14, 1e-10)),
        (1.0, 1e-4, (1e-14, 1e-10)),
        (2.0 / 3.0, 1e-4, (1e-24, 1e-18)),
        (1.0 / 3.0, 1e-4, (1e-14, 1e-10)),
    ];
    for (beta, alpha_s, (lo, hi)) in cases {
        let t = Instant::now();
        let hs = log_spaced(lo, hi, 6);
        let report = match sweep_excess(&params(1.0, beta, alpha_s), &hs, &SweepOptions::new(SweepMode::Construction)) {
            Ok(r) => r,
            Err(e) => {
                pass = false;
                detail.push(format!("beta {beta:.3}: {e}"));
                continue;
            }
        };
        let logged = report.logged.expect("h < 1");
        let ok = (report.slope - report.expected_slope).abs() <= EXCESS_SLOPE_TOL && logged.residual < report.pure.residual;
        pass &= ok;
        detail.push(format!(
            "beta {beta:.3}: slope {:.3} (target {:.3}), residual {:.2e} -> {:.2e} with log factor, {:.0}s",
            report.slope,
            report.expected_slope,
            report.pure.residual,
            logged.residual,
            t.elapsed().as_secs_f64()
        ));
    }
    outcome(pass, detail.join("; "))
}

fn lemma_certificates() -> Outcome {
    let p = params(1e-4, 1.0, 1e-2);
    let s = validate_and_derive(&p).unwrap();
    let margin = default_margin(&p);
    let mut pass = true;
    let mut detail = Vec::new();
    for kind in [LemmaKind::Linear, LemmaKind::Quadratic] {
        let (mut fails, mut tightest, mut sampled_diff) = (Vec::new(), f64::INFINITY, 0.0f64);
        for seed in 0..1000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
            let lam = p.h.powf(kind.window_exponent(p.beta)) * rng.gen_range(0.2..5.0);
            let a = rng.gen_range(0.5..(1.0 - lam));
            let (w, ubar) = random_wrinkle_field(seed, &p, &s, (a, a + lam), margin).unwrap();
            let res = lemma_check(kind, &w, &ubar, (a, a + lam), margin, &p, &s).unwrap();
            if !res.pass {
                fails.push((seed, res.inputs_digest.clone()));
            }
            tightest = tightest.min(res.lhs / res.rhs);
            if seed < 20 {
                let raw = lemma_check_sampled(kind, &w, &ubar, (a, a + lam), margin, &p, &s).unwrap();
                sampled_diff = sampled_diff.max((raw.lhs - res.lhs).abs());
            }
        }
        pass &= fails.is_empty() && sampled_diff <= SAMPLED_LHS_TOL;
        for (seed, digest) in &fails {
            eprintln!("violation: {kind:?} seed {seed} digest {digest}");
        }
        // right side with the matched window over a thickness sweep
        let pts: Vec<(f64, f64)> = log_spaced(1e-14, 1e-6, 8)
            .into_iter()
            .map(|h| {
                let ph = p.with_h(h);
                let sh = validate_and_derive(&ph).unwrap();
                let (r0, r1) = matched_radii(kind, &ph);
                let d = default_margin(&ph);
                let v = match kind {
                    LemmaKind::Linear => rhs_linear(r0, r1, d, &ph, &sh),
                    LemmaKind::Quadratic => rhs_quadratic(r0, r1, d, &ph, &sh),
                };
                (h, v)
            })
            .collect();
        let fit = fit_powerlaw(&pts, FitModel::PurePower).unwrap();
        let target = kind.rhs_exponent(p.beta);
        pass &= (fit.slope - target).abs() <= RHS_SLOPE_TOL;
        detail.push(format!(
            "{kind:?}: {} violations / 1000, min lhs/rhs {tightest:.2e}, sampled lhs diff {sampled_diff:.1e}, rhs slope {:.4} (target {target:.4})",
            fails.len(),
            fit.slope
        ));
    }
    outcome(pass, detail.join("; "))
}

fn construction_identities() -> Outcome {
    let p = params(1e-6, 1.0, 1e-4);
    let s = validate_and_derive(&p).unwrap();
    let config = default_config(&p, &s).unwrap();
    let st: TestState = build_test_state(&p, &s, &config).unwrap();
    let e = full_energy(&st, &p, &s);
    let shear = e.r3 / e.total;
    let (mut means_ok, mut support_ok, mut sigma_ok) = (true, true, true);
    for (i, &r) in st.grid.nodes().iter().enumerate() {
        let sl = st.slice(i);
        means_ok &= sl.u_r.mean == u0_jet(r, &p, &s) && sl.u_theta.mean == Jet::ZERO && sl.w.mean == Jet::ZERO;
        if r <= s.r_h {
            support_ok &= sl.w.modes.is_empty();
        }
        sigma_ok &= sigma0_jet(r, &p, &s).v >= 0.0;
    }
    let ex = excess_energy(&st);
    let id_gap = (ex.value - ex.direct).abs() / ex.value;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let riemann = (0..10)
        .map(|_| sum_vs_integral(|t| bump(t).powi(2), (-0.5, 0.5), 0.01, rng.gen()))
        .fold(0.0f64, f64::max);
    outcome(
        shear <= SHEAR_REL_TOL && means_ok && support_ok && sigma_ok && id_gap <= EXCESS_ID_TOL && riemann < RIEMANN_TOL,
        format!(
            "shear remainder {shear:.1e}, means {means_ok}, support {support_ok}, tensile {sigma_ok}, excess identity {id_gap:.1e}, Riemann sum {riemann:.1e}"
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("decomposition identity", decomposition_identity),
        ("wrinkling cost spectral vs direct", wrinkling_cost_agreement),
        ("relaxed solver vs closed form", relaxed_solver_vs_closed_form),
        ("relaxed energy slopes", relaxed_energy_slopes),
        ("relaxed two-field problem", relaxed_gap_suite),
        ("construction excess slopes", construction_slopes),
        ("lemma certificates", lemma_certificates),
        ("construction identities", construction_identities),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let number = i + 1;
        if !selected.is_empty() && !selected.contains(&number) {
            continue;
        }
        let t = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {number} [{verdict}] {name}: {} ({:.1}s)", o.detail, t.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
