use cxbody::constants::{d_n, hyperplane_bound};
use cxbody::inequalities::*;
use cxbody::membership::CertifiedMember;
use cxbody::*;
use proptest::prelude::*;
use rand::Rng;

/// `∫_0^u r^p g` for a step function, in closed form.
fn step_moment(g: &StepFunction, u: f64, p: i32) -> f64 {
    let mut s = 0.0;
    for (i, v) in g.values.iter().enumerate() {
        let (lo, hi) = (g.breaks[i], g.breaks[i + 1].min(u));
        if hi > lo {
            s += v * (hi.powi(p + 1) - lo.powi(p + 1)) / (p + 1) as f64;
        }
    }
    s
}

fn exact_sides(g: &StepFunction, a: f64, b: f64, n: usize) -> (f64, f64) {
    let p = 2 * n as i32;
    let side = |u: f64| step_moment(g, u, p - 1) - a * a * step_moment(g, u, p - 3);
    (side(a), side(b))
}

#[test]
fn zvavitch_lemma_randomized() {
    let mut worst = f64::INFINITY;
    for i in 0..10_000u64 {
        let mut rng = trial_rng(31, i);
        let n = rng.random_range(2..=6);
        let len = rng.random_range(0.5..3.0);
        let pieces = rng.random_range(1..=6);
        let g = StepFunction::random(&mut rng, pieces, len);
        let a = rng.random_range(0.0..len * 1.2);
        let b = rng.random_range(0.0..len * 1.2);
        let (lhs, rhs) = zvavitch_sides(|r| g.eval(r), &g.breaks, a, b, n).unwrap();
        let (el, er) = exact_sides(&g, a, b, n);
        let scale = 1.0 + el.abs() + er.abs();
        assert!((lhs - el).abs() < 1e-11 * scale && (rhs - er).abs() < 1e-11 * scale, "trial {i}");
        assert!(zvavitch_check(|r| g.eval(r), &g.breaks, a, b, n).unwrap(), "trial {i}: {lhs} > {rhs}");
        worst = worst.min(rhs - lhs);
    }
    assert!(worst >= -1e-10);
}

#[test]
fn zvavitch_worked_example() {
    // g ≡ 1, a = 1, b = 2, n = 2: 1/4 - 1/2 on the left, (4 - 2) on the right
    let (l, r) = zvavitch_sides(|_| 1.0, &[], 1.0, 2.0, 2).unwrap();
    assert!((l + 0.25).abs() < 1e-14);
    assert!((r - 2.0).abs() < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]
    #[test]
    fn zvavitch_holds_for_smooth_densities(n in 2usize..6, a in 0.0f64..3.0, b in 0.0f64..3.0, c in 0.1f64..3.0, k in 0.0f64..4.0) {
        let g = |r: f64| (-c * r).exp() * (1.0 + (k * r).sin().powi(2));
        prop_assert!(zvavitch_check(g, &[], a, b, n).unwrap());
    }
}

#[test]
fn ball_ratio_is_d_n() {
    for n in [2, 3] {
        let cfg = InequalityConfig::new(n).unwrap();
        let r = hyperplane_ratio(&CertifiedMember::ball(n, 1.3).unwrap(), &Measure::Lebesgue, &cfg).unwrap();
        assert!((r - d_n(n)).abs() < 1e-6, "n={n} {r}");
        assert!((ball_ratio(n) - d_n(n)).abs() < 1e-12);
    }
}

#[test]
fn sharpness_sequence_approaches_bound() {
    let cfg = InequalityConfig::new(2).unwrap();
    let ball = CertifiedMember::ball(2, 1.0).unwrap();
    let r: Vec<f64> = [10, 50, 200]
        .iter()
        .map(|j| hyperplane_ratio(&ball, &Measure::Annulus { j: *j }, &cfg).unwrap())
        .collect();
    let bound = hyperplane_bound(2);
    assert!(r[0] < r[1] && r[1] < r[2], "{r:?}");
    assert!(r[2] <= bound && r[2] > 0.98 * bound, "{r:?}");
}

#[test]
fn randomized_trials_small() {
    for n in [2, 3] {
        let cfg = InequalityConfig::new(n).unwrap();
        for i in 0..10u64 {
            let mut rng = trial_rng(5, i);
            let k = random_member(&mut rng, n).unwrap();
            let l = random_lq_body(&mut rng, n).unwrap();
            let gamma = random_measure(&mut rng, n);
            let t = evaluate_trial(&k, &l, &gamma, &cfg).unwrap();
            assert!(t.stability.slack >= -1e-6, "n={n} trial {i}: {:?}", t.stability);
            assert!(t.hyperplane_ratio <= hyperplane_bound(n) + 1e-4);
            if t.busemann_petty.sections_dominated {
                assert!(t.busemann_petty.measures_ordered);
            }
        }
    }
}

#[test]
fn dominated_sections_order_gaussian_measures() {
    // K ⊂ L forces every section and the measure to be ordered
    let n = 2;
    let cfg = InequalityConfig::new(n).unwrap();
    let k = CertifiedMember::ball(n, 0.9).unwrap();
    let l = StarBody::lq_ball(n, 2.0).unwrap();
    let r = busemann_petty_compare(&k, &l, &Measure::Gaussian { sigma: 0.7 }, &cfg).unwrap();
    assert!(r.sections_dominated && r.measures_ordered && r.measure_gap > 0.0);
}

#[test]
fn stability_is_tight_for_equal_bodies() {
    let n = 3;
    let cfg = InequalityConfig::new(n).unwrap();
    let k = CertifiedMember::ball(n, 1.0).unwrap();
    let r = stability_check(&k, k.body(), &Measure::Lebesgue, &cfg).unwrap();
    assert!(r.epsilon_star.abs() < 1e-12 && r.slack.abs() < 1e-9);
}
