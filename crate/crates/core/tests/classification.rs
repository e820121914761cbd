use radial_singular::analysis::sweep::GridSpec;
use radial_singular::classifier::{
    classify, default_slope_bracket, find_separatrix, fit_decay_rate, separatrix_decay_rate,
    stable_manifold_trajectory, Outcome, Thresholds,
};
use radial_singular::ode::{default_t0, integrate_psi, IntegratorConfig};
use radial_singular::params::admissible_alpha;
use radial_singular::{constant_a, Exponents, PsiState};

fn ex(n: u32, a: f64, b: f64) -> Exponents {
    Exponents::new(n, a, b).unwrap()
}

fn standard_grid() -> Vec<Exponents> {
    let g = GridSpec::default();
    let mut out = Vec::new();
    for &n in &g.n {
        let (lo, hi) = admissible_alpha(n).unwrap();
        for &f in &g.alpha_fractions {
            for &b in &g.beta {
                out.push(ex(n, lo + f * (hi - lo), b));
            }
        }
    }
    out
}

#[test]
fn spiral_example() {
    let e = ex(5, 2.0, 0.0);
    let cfg = IntegratorConfig::for_exponents(&e);
    let tr = integrate_psi(PsiState { t: 5.0, psi: 2.5, psi_t: 0.0 }, 60.0, &e, &cfg).unwrap();
    let c = classify(&tr, &e, &Thresholds::for_exponents(&e)).unwrap();
    assert_eq!(c.outcome, Outcome::ConvergesToA);
    assert!((c.terminal_value - 2.0).abs() <= 1e-6);
}

/// Data on the linear stable direction `(1, -2)` decays like `e^{-2t}`
/// until the quadratic term, which has no stable-manifold correction here,
/// pushes it through zero.
#[test]
fn linear_stable_direction_decays_then_crosses_zero() {
    let e = ex(5, 2.0, 0.0);
    let cfg = IntegratorConfig::for_exponents(&e);
    let tr = integrate_psi(PsiState { t: 5.0, psi: 1e-5, psi_t: -2e-5 }, 305.0, &e, &cfg).unwrap();
    let y = |t: f64| tr.interpolate(t).unwrap()[0];
    let slope = (y(8.0) / y(5.0)).ln() / 3.0;
    assert!((slope + 2.0).abs() <= 1e-2, "early slope {slope}");
    let c = classify(&tr, &e, &Thresholds::for_exponents(&e)).unwrap();
    assert_eq!(c.outcome, Outcome::HitsZero);
    let t_hit = tr.event().unwrap().x;
    assert!((9.0..10.5).contains(&t_hit), "{t_hit}");
}

#[test]
fn stable_manifold_decays_at_lambda_minus() {
    let e = ex(5, 2.0, 0.0);
    let mut cfg = IntegratorConfig::for_exponents(&e);
    cfg.abs_tol = 1e-300;
    let tr = stable_manifold_trajectory(&e, 5.0, 0.5, 60.0, &cfg).unwrap();
    let c = classify(&tr, &e, &Thresholds::for_exponents(&e)).unwrap();
    assert_eq!(c.outcome, Outcome::DecaysToZero);
    assert!((c.fitted_rate.unwrap() + 2.0).abs() <= 0.04);
    let points: Vec<(f64, f64)> = tr
        .resample_uniform(15.0, 60.0, 0.5)
        .iter()
        .map(|s| (s.x, s.y))
        .collect();
    let rate = fit_decay_rate(&points).unwrap();
    assert!((rate + 2.0).abs() <= 0.04);
}

#[test]
fn separatrix_example() {
    let e = ex(5, 2.0, 0.0);
    let cfg = IntegratorConfig::for_exponents(&e);
    let th = Thresholds::for_exponents(&e);
    let sep = find_separatrix(&e, 5.0, 0.5, (-5.0, 5.0), &th, &cfg).unwrap();
    assert!(sep.slope > -5.0 && sep.slope < 5.0);
    assert!(sep.above - sep.below <= 1e-11 * 5.0 * 2.0);
    let side = |s: f64| {
        let tr = integrate_psi(PsiState { t: 5.0, psi: 0.5, psi_t: s }, 305.0, &e, &cfg).unwrap();
        classify(&tr, &e, &th).unwrap().outcome
    };
    assert_eq!(side(sep.above), Outcome::ConvergesToA);
    assert_eq!(side(sep.below), Outcome::HitsZero);
    let fit = separatrix_decay_rate(&e, &sep, &cfg).unwrap();
    assert!((fit.rate + 2.0).abs() <= 0.1, "{fit:?}");
}

#[test]
fn separatrix_slope_tends_to_eigenvector() {
    let e = ex(5, 2.0, 0.0);
    let cfg = IntegratorConfig::for_exponents(&e);
    let th = Thresholds::for_exponents(&e);
    let t0 = default_t0(&e);
    let mut previous = f64::INFINITY;
    for psi0 in [1e-2, 1e-3, 1e-4] {
        let s = find_separatrix(&e, t0, psi0, default_slope_bracket(&e, psi0), &th, &cfg).unwrap();
        let ratio = s.slope / psi0;
        let err = (ratio + 2.0).abs();
        assert!(err < previous, "psi0 {psi0}: ratio {ratio}");
        assert!(err <= 0.5 * psi0.sqrt(), "psi0 {psi0}: ratio {ratio}");
        previous = err;
    }
}

/// Starts at `t0 = 20` so that `ψ0 = A/500` still has `u > e` when
/// `β ≠ 0`.
#[test]
fn separatrix_slope_is_monotone_in_psi0() {
    for e in [ex(5, 2.0, 0.0), ex(4, 2.5, 1.0), ex(3, 4.0, -1.0)] {
        let cfg = IntegratorConfig::for_exponents(&e);
        let th = Thresholds::for_exponents(&e);
        let t0 = 20.0;
        let a = constant_a(&e);
        let slopes: Vec<f64> = [0.002, 0.005, 0.01, 0.02, 0.05]
            .iter()
            .map(|f| {
                let psi0 = f * a;
                find_separatrix(&e, t0, psi0, default_slope_bracket(&e, psi0), &th, &cfg)
                    .unwrap()
                    .slope
            })
            .collect();
        assert!(slopes.windows(2).all(|w| w[1] < w[0]), "{e:?}: {slopes:?}");
    }
}

/// Halving `conv_tol` and doubling the horizon never turns convergence to
/// `A` into decay to zero or back.
#[test]
fn classification_is_stable_under_refinement() {
    let starts = [(0.3, 0.2), (1.0, -0.5), (1.7, 0.0), (2.5, 0.5), (0.8, 0.8)];
    for e in standard_grid() {
        let a = constant_a(&e);
        let t0 = default_t0(&e);
        let cfg = IntegratorConfig::for_exponents(&e);
        let th = Thresholds::for_exponents(&e);
        let strict = Thresholds {
            conv_tol: th.conv_tol / 2.0,
            ..th
        };
        for (f, g) in starts {
            let p = PsiState { t: t0, psi: f * a, psi_t: g * a };
            let short = integrate_psi(p, t0 + 300.0, &e, &cfg).unwrap();
            let long = integrate_psi(p, t0 + 600.0, &e, &cfg).unwrap();
            let o1 = classify(&short, &e, &th).unwrap().outcome;
            let o2 = classify(&long, &e, &strict).unwrap().outcome;
            let flipped = matches!(
                (o1, o2),
                (Outcome::ConvergesToA, Outcome::DecaysToZero)
                    | (Outcome::DecaysToZero, Outcome::ConvergesToA)
            );
            assert!(!flipped, "{e:?} from ({f}A, {g}A): {o1:?} -> {o2:?}");
        }
    }
}
