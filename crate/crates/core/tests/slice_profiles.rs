use cxbody::convexity::*;
use cxbody::inequalities::trial_rng;
use cxbody::quadrature::RadialRule;
use cxbody::*;
use rand::Rng;

fn e12() -> StarBody {
    StarBody::ellipsoid(ComplexEllipsoidParams::new(1.0, 2.0, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap()).unwrap()
}

#[test]
fn profile_integral_matches_direct_section() {
    // |K ∩ (S ⊕ Cθ)| = 2π ∫ r h(r) dr
    let cfg = RadonConfig::new(3).unwrap();
    let radial = RadialRule::new(16, 8).unwrap();
    for (k, tol) in [(e12(), 1e-10), (StarBody::lq_ball(3, 2.5).unwrap(), 1e-5), (StarBody::lq_ball(3, 1.0).unwrap(), 1e-4)] {
        for trial in 0..2 {
            let t = draw_curve_trial(&mut trial_rng(9, trial), 3).unwrap();
            let g = SliceGeometry::new(t.subspace.clone(), 16).unwrap();
            let prof = SectionProfile::compute(&k, &g, &t.u[0], &radial).unwrap();
            let direct = section_volume(&k, &t.normals[0], &cfg).unwrap();
            let rel = (prof.complex_section_volume() / direct - 1.0).abs();
            assert!(rel < tol, "{rel:e}");
        }
    }
}

#[test]
fn profiles_mix_log_concavely() {
    let k = StarBody::lq_ball(3, 1.5).unwrap();
    for trial in 0..2 {
        let mut rng = trial_rng(10, trial);
        let t = draw_curve_trial(&mut rng, 3).unwrap();
        let g = SliceGeometry::new(t.subspace.clone(), 16).unwrap();
        let pairs: Vec<(f64, f64)> = (0..10).map(|_| (rng.random_range(0.0..0.9), rng.random_range(0.0..0.9))).collect();
        let r = profile_mixing_check(&k, &g, &t, &pairs, 1e-8).unwrap();
        assert_eq!(r.violations, 0, "{r:?}");
    }
}

#[test]
fn ball_inequality_randomized() {
    for i in 0..200u64 {
        let mut rng = trial_rng(13, i);
        let (a1, b1, a2, b2) = (rng.random_range(0.2..3.0), rng.random_range(0.0..2.0), rng.random_range(0.2..3.0), rng.random_range(0.0..2.0));
        let alpha = rng.random_range(1.0..2.0);
        let h1 = move |r: f64| (-a1 * r - b1 * r * r).exp();
        let h2 = move |r: f64| (-a2 * r - b2 * r * r).exp();
        let r = ball_inequality_check(h1, 200.0 / a1, h2, 200.0 / a2, 2.0, alpha, 1e-8).unwrap();
        assert!(r.holds, "trial {i}: {r:?}");
    }
}

#[test]
fn ball_inequality_for_truncated_profiles() {
    // indicator profiles of radii R1, R2: the mixed profile lives on [0, αR1R2/(R1+R2)]
    let (r1, r2, alpha) = (1.0, 2.0, 1.5);
    let h1 = move |r: f64| if r <= r1 { 1.0 } else { 0.0 };
    let h2 = move |r: f64| if r <= r2 { 1.0 } else { 0.0 };
    let r = ball_inequality_check(h1, r1, h2, r2, 2.0, alpha, 1e-8).unwrap();
    assert!(r.holds, "{r:?}");
}

#[test]
fn intersection_bodies_of_lq_balls_are_convex() {
    let cfg = RadonConfig::with_level(3, 8).unwrap();
    for q in [1.0, 2.0, 3.0] {
        let ic = StarBody::intersection_of(StarBody::lq_ball(3, q).unwrap(), cfg.clone()).unwrap();
        let r = convexity_check(&ic, 1000, 1e-7, 3).unwrap();
        assert_eq!(r.violations, 0, "q={q} {r:?}");
    }
}

#[test]
fn curve_check_separates_convex_and_nonconvex() {
    let cfg = RadonConfig::new(3).unwrap();
    let good = busemann_curve_check(&e12(), 50, 1e-6, 0, &cfg).unwrap();
    assert_eq!(good.violations, 0, "{good:?}");
    // roughly one trial in 170 catches the ℓ_0.5 quasi-ball
    let bad = busemann_curve_check(&StarBody::lq_ball(3, 0.5).unwrap(), 500, 1e-6, 0, &cfg).unwrap();
    assert!(bad.violations >= 1, "{bad:?}");
}

#[test]
fn roundness_of_ellipsoid_and_cube_like_body() {
    let rule = sphere_rule(6, 12, 0).unwrap();
    let r = roundness_estimate(&e12(), &rule).unwrap();
    assert!((r - 1.0).abs() < 1e-3, "{r}");
    let r = roundness_estimate(&StarBody::lq_ball(3, 8.0).unwrap(), &rule).unwrap();
    assert!(r > 1.1, "{r}");
}

