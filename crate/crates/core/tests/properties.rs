use proptest::prelude::*;
use radial_singular::params::{
    admissible_alpha, eta, invert_growth, invert_growth_lambert, lambert_w, phi, r_eta_prime,
};
use radial_singular::transform::{exact_profile, from_psi_state, to_psi_state, zeta};
use radial_singular::{constant_a, limit_coefficients, Exponents, PsiState, RadialState};

fn exponents(n_max: u32) -> impl Strategy<Value = Exponents> {
    (3..=n_max, 0.001f64..0.999, -3.0f64..3.0).prop_map(|(n, f, beta)| {
        let (lo, hi) = admissible_alpha(n).unwrap();
        Exponents::new(n, lo + f * (hi - lo), beta).unwrap()
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn coefficients_have_their_signs(e in exponents(10)) {
        let c = limit_coefficients(&e);
        prop_assert!(c.a0 > 0.0 && c.b0 > 0.0 && c.a > 0.0);
        prop_assert!(c.lambda_minus < 0.0 && 0.0 < c.lambda_plus);
    }

    #[test]
    fn quadratic_root_identities(e in exponents(10)) {
        let c = limit_coefficients(&e);
        let nm2 = e.dim() - 2.0;
        let lm = c.lambda_minus;
        let root = lm * lm + c.a0 * lm - c.b0;
        prop_assert!(root.abs() <= 1e-12 * (lm * lm).max(c.b0));
        prop_assert!((c.a0 * c.a0 + 4.0 * c.b0 - nm2 * nm2).abs() <= 1e-12 * nm2 * nm2);
        prop_assert!(rel(lm, -2.0 / (e.alpha() - 1.0)) <= 1e-12);
    }

    #[test]
    fn a_is_stationary(e in exponents(10)) {
        let c = limit_coefficients(&e);
        let a = constant_a(&e);
        let lhs = c.b0 * a;
        let rhs = c.zeta0.powf(e.beta()) * a.powf(e.alpha());
        prop_assert!(rel(rhs, lhs) <= 1e-12);
    }

    #[test]
    fn lambert_residual_and_sandwich(l in -30.0f64..69.1) {
        let s = l.exp();
        let w = lambert_w(s).unwrap();
        prop_assert!((w * w.exp() - s).abs() <= 1e-13 * s.max(1.0));
        if s >= std::f64::consts::E {
            let ls = s.ln();
            prop_assert!(ls - ls.ln() <= w && w <= ls);
        }
    }

    #[test]
    fn phi_identities(e in exponents(10), lr in (1e-6f64).ln()..(0.5f64).ln()) {
        let r = lr.exp();
        let f = |x: f64| phi(x, &e).unwrap();
        let p = f(r);
        let et = eta(r, &e).unwrap();

        let h1 = 1e-6 * r;
        let d1 = (f(r + h1) - f(r - h1)) / (2.0 * h1);
        prop_assert!((r * d1 - et * p).abs() <= 1e-6 * p);

        // A 1e-6 r step leaves only ~4 digits in a second difference, and for
        // α near 1 (φ ~ r^7) a three-point stencil cannot balance truncation
        // and rounding below 1e-6; the five-point stencil can.
        let h2 = 1e-3 * r;
        let d2 = (-f(r + 2.0 * h2) + 16.0 * f(r + h2) - 30.0 * p + 16.0 * f(r - h2)
            - f(r - 2.0 * h2))
            / (12.0 * h2 * h2);
        let rep = r_eta_prime(r, &e).unwrap();
        prop_assert!((r * r * d2 - (et * et - et + rep) * p).abs() <= 1e-6 * p);
    }

    #[test]
    fn growth_inversion_on_monotone_branch(e in exponents(10), dx in 0.0f64..60.0) {
        let p = e.alpha() - 1.0;
        let x = 1f64.max((1.0 - e.beta()) / p) + dx;
        let u = x.exp();
        let k = u.powf(p) * x.powf(e.beta());
        prop_assert!(rel(invert_growth(k, &e).unwrap(), u) <= 1e-10);
        if e.beta() > 0.0 {
            prop_assert!(rel(invert_growth_lambert(k, &e).unwrap(), u) <= 1e-10);
        }
    }

    #[test]
    fn radial_round_trip(
        e in exponents(6),
        lr in (1e-15f64).ln()..(0.3f64).ln(),
        lu in 1.0f64..(1e12f64).ln(),
        c in -5.0f64..5.0,
    ) {
        let s = RadialState { r: lr.exp(), u: lu.exp(), u_r: -c * lu.exp() / lr.exp() };
        let back = from_psi_state(to_psi_state(s, &e).unwrap(), &e).unwrap();
        prop_assert!(rel(back.r, s.r) <= 1e-12);
        prop_assert!(rel(back.u, s.u) <= 1e-12);
        prop_assert!((back.u_r - s.u_r).abs() <= 1e-12 * (s.u_r.abs() + s.u / s.r));
    }

    #[test]
    fn psi_round_trip(
        e in exponents(6),
        t in 1.3f64..34.0,
        f in 0.05f64..20.0,
        v in -3.0f64..3.0,
    ) {
        let a = constant_a(&e);
        let p = PsiState { t, psi: f * a, psi_t: v * a };
        let back = to_psi_state(from_psi_state(p, &e).unwrap(), &e).unwrap();
        prop_assert!(rel(back.t, p.t) <= 1e-12);
        prop_assert!(rel(back.psi, p.psi) <= 1e-12);
        prop_assert!((back.psi_t - p.psi_t).abs() <= 1e-12 * (p.psi_t.abs() + p.psi * t.max(1.0)));
    }

    #[test]
    fn profile_is_stationary(e in exponents(6), lr in (1e-15f64).ln()..(0.3f64).ln()) {
        let r = lr.exp();
        let u = exact_profile(r, &e).unwrap();
        let ur = radial_singular::transform::exact_profile_derivative(r, &e).unwrap();
        let p = to_psi_state(RadialState { r, u, u_r: ur }, &e).unwrap();
        prop_assert!(p.psi_t.abs() <= 1e-12 * p.psi);
        prop_assert!(rel(p.psi, constant_a(&e)) <= 1e-12);
    }

    #[test]
    fn zeta_matches_log_u(e in exponents(6), t in 1.5f64..300.0, f in 0.05f64..20.0) {
        let psi = f * constant_a(&e);
        let ph = phi((-t).exp(), &e).unwrap();
        prop_assume!(ph > 1e-300);
        let log_u = psi.ln() - ph.ln();
        // Working regime u > e.
        prop_assume!(log_u > 1.0);
        prop_assert!(rel(zeta(t, psi, &e) * t, log_u) <= 1e-10);
    }
}
