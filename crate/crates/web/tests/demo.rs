use fvk_web::{cost_curves, pattern, profiles};

#[test]
fn profiles_match_threshold_split() {
    let p = profiles(1e-4, 1.0, 1e-4, 101).unwrap();
    assert_eq!(p.r.len(), 101);
    assert!(p.r_h > 0.0 && p.r_h < 1.0 / 3.0);
    assert!(p.sigma0.iter().all(|&s| s >= -1e-15));
    assert_eq!(p.u0[0], 0.0);
}

#[test]
fn profiles_reject_stiff_substrate() {
    assert!(profiles(1e-4, 2.0, 1.0, 10).is_err());
}

#[test]
fn wrinkle_cost_lies_above_relaxed_cost_and_touches_it() {
    let c = cost_curves(1e-6, 1.0, 1e-4, 0.8, 4.0, 801).unwrap();
    assert_eq!(c.eta.len(), 801);
    let scale = c.relaxed.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut closest = f64::INFINITY;
    for ((&e, &rel), &wr) in c.eta.iter().zip(&c.relaxed).zip(&c.wrinkled) {
        assert!(wr - rel >= -1e-12 * scale, "eta {e}");
        if (e - c.target).abs() < 1e-2 * c.threshold.abs() {
            closest = closest.min(wr - rel);
        }
    }
    assert!(closest <= 1e-2 * scale, "gap near the target strain {closest}");
    assert!(c.target < c.threshold && c.threshold < 0.0);
}

#[test]
fn pattern_is_normalized_and_wrinkled() {
    let img = pattern(1e-6, 1.0, 1e-4, 0.9, 64, 16).unwrap();
    assert_eq!(img.values.len(), 64 * 16);
    assert!(img.values.iter().all(|v| (0.0..=1.0).contains(v)));
    let lo = img.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = img.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(hi - lo > 0.5);
}
