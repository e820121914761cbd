//! Right-hand sides of the radial equation in both frames.

use std::f64::consts::E;

use crate::error::{Error, Result};
use crate::params::{coeff_a_unchecked, coeff_b_unchecked, Exponents};
use crate::transform::{zeta, PsiState, RadialState};

use super::IntegratorConfig;

/// `u_rr = -(n-1)/r u_r - u^α (log u)^β` for `u > e`.
pub fn rhs_radial_u(s: RadialState, e: &Exponents) -> Result<f64> {
    if !(s.u > E) {
        return Err(Error::RegimeExit { u: s.u });
    }
    Ok(radial_extended(s.r, s.u, s.u_r, e))
}

/// `ψ_tt = -a(t) ψ_t + b(t) ψ - ζ^β ψ^α`, guarded by `ζ ≥ zeta_min`
/// whenever `β ≠ 0`.
pub fn rhs_psi(p: PsiState, e: &Exponents, cfg: &IntegratorConfig) -> Result<f64> {
    if !(p.t > 0.0) {
        return Err(Error::NonpositiveTime(p.t));
    }
    if !(p.psi > 0.0) {
        return Err(Error::DomainError {
            what: "psi",
            value: p.psi,
            domain: "(0, inf)",
        });
    }
    if e.beta() != 0.0 {
        let z = zeta(p.t, p.psi, e);
        if !(z >= cfg.zeta_min) {
            return Err(Error::ZetaGuard {
                zeta: z,
                zeta_min: cfg.zeta_min,
            });
        }
    }
    Ok(psi_extended(p.t, p.psi, p.psi_t, e, cfg.zeta_min))
}

/// The nonlinearity `ζ^β ψ^α`, continued by zero for `ψ ≤ 0` and with ζ
/// clamped away from zero so that trial stages past an event stay finite.
#[inline]
pub(crate) fn psi_source(t: f64, psi: f64, e: &Exponents, zeta_floor: f64) -> f64 {
    if psi <= 0.0 {
        return 0.0;
    }
    let lp = psi.ln();
    if e.beta() == 0.0 {
        (e.alpha() * lp).exp()
    } else {
        let z = (e.zeta0() + (lp - e.log_power() * t.ln()) / t).max(zeta_floor);
        (e.alpha() * lp + e.beta() * z.ln()).exp()
    }
}

#[inline]
pub(crate) fn psi_extended(t: f64, psi: f64, psi_t: f64, e: &Exponents, zeta_min: f64) -> f64 {
    -coeff_a_unchecked(t, e) * psi_t + coeff_b_unchecked(t, e) * psi
        - psi_source(t, psi, e, 0.5 * zeta_min)
}

/// `u^α (log u)^β`, with `log u` clamped at 1 below `u = e`.
#[inline]
pub(crate) fn radial_source(u: f64, e: &Exponents) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    let lu = u.ln();
    if e.beta() == 0.0 {
        (e.alpha() * lu).exp()
    } else {
        (e.alpha() * lu + e.beta() * lu.max(1.0).ln()).exp()
    }
}

#[inline]
pub(crate) fn radial_extended(r: f64, u: f64, u_r: f64, e: &Exponents) -> f64 {
    -(e.dim() - 1.0) / r * u_r - radial_source(u, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{exact_profile, exact_profile_derivative, exact_profile_second_derivative};

    fn ex(n: u32, a: f64, b: f64) -> Exponents {
        Exponents::new(n, a, b).unwrap()
    }

    #[test]
    fn radial_examples() {
        for beta in [-2.0, 0.0, 0.5, 3.0] {
            let e = ex(5, 2.0, beta);
            let s = RadialState {
                r: 0.5,
                u: E * (1.0 + 1e-15),
                u_r: 0.0,
            };
            assert!((rhs_radial_u(s, &e).unwrap() + E * E).abs() < 1e-13);
        }
        let e = ex(5, 2.0, 0.0);
        let s = RadialState {
            r: 0.5,
            u: E * (1.0 + 1e-15),
            u_r: 1.0,
        };
        assert!((rhs_radial_u(s, &e).unwrap() + 8.0 + E * E).abs() < 1e-12);
        let s = RadialState {
            r: 0.5,
            u: 2.0,
            u_r: 0.0,
        };
        assert!(matches!(rhs_radial_u(s, &e), Err(Error::RegimeExit { .. })));
    }

    #[test]
    fn exact_profile_solves_radial_equation() {
        // Exact only for β = 0; the residual is relative to u^α.
        let e = ex(5, 2.0, 0.0);
        for r in [0.3, 0.01, 1e-5] {
            let u = exact_profile(r, &e).unwrap();
            let s = RadialState {
                r,
                u,
                u_r: exact_profile_derivative(r, &e).unwrap(),
            };
            let upp = exact_profile_second_derivative(r, &e).unwrap();
            let res = upp - rhs_radial_u(s, &e).unwrap();
            assert!(res.abs() <= 1e-13 * u * u, "r={r} res={res}");
        }
    }

    #[test]
    fn psi_examples() {
        let e = ex(5, 2.0, 0.0);
        let cfg = IntegratorConfig::for_exponents(&e);
        let p = |psi| PsiState {
            t: 11.0,
            psi,
            psi_t: 0.0,
        };
        assert_eq!(rhs_psi(p(2.0), &e, &cfg).unwrap(), 0.0);
        assert!((rhs_psi(p(1.0), &e, &cfg).unwrap() - 1.0).abs() < 1e-15);

        let e1 = ex(5, 2.0, 1.0);
        let cfg1 = IntegratorConfig::for_exponents(&e1);
        let t = 1e9;
        let v = rhs_psi(
            PsiState {
                t,
                psi: 1.0,
                psi_t: 0.0,
            },
            &e1,
            &cfg1,
        )
        .unwrap();
        assert!(v.abs() < 1e-7);
    }

    #[test]
    fn zeta_guard() {
        let e = ex(5, 2.0, 1.0);
        let cfg = IntegratorConfig::for_exponents(&e);
        let p = PsiState {
            t: 2.0,
            psi: (-3f64).exp(),
            psi_t: 0.0,
        };
        assert!(matches!(rhs_psi(p, &e, &cfg), Err(Error::ZetaGuard { .. })));
    }
}
