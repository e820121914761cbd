//! Change of variables between the physical radial frame `(r, u, u_r)` and
//! the Emden–Fowler frame `(t, ψ, ψ_t)`, with `t = -log r` and `ψ = φ(r) u`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{constant_a, eta_at_time, phi_at_time, upper_envelope, Exponents};

/// A point `(r, u, u_r)` of a radial solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialState {
    pub r: f64,
    pub u: f64,
    pub u_r: f64,
}

/// A point `(t, ψ, ψ_t)` in Emden–Fowler coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiState {
    pub t: f64,
    pub psi: f64,
    pub psi_t: f64,
}

pub fn to_psi_state(s: RadialState, e: &Exponents) -> Result<PsiState> {
    if !(s.r > 0.0 && s.r < 1.0) {
        return Err(Error::DomainError {
            what: "r",
            value: s.r,
            domain: "(0, 1)",
        });
    }
    if !(s.u > 0.0) {
        return Err(Error::DomainError {
            what: "u",
            value: s.u,
            domain: "(0, inf)",
        });
    }
    let t = -s.r.ln();
    let phi = phi_at_time(t, e);
    let psi = phi * s.u;
    // ψ_t = -r φ' u - r φ u_r = -η ψ - r φ u_r
    let psi_t = -eta_at_time(t, e) * psi - s.r * phi * s.u_r;
    Ok(PsiState { t, psi, psi_t })
}

pub fn from_psi_state(p: PsiState, e: &Exponents) -> Result<RadialState> {
    if !(p.t > 0.0) || !p.t.is_finite() {
        return Err(Error::NonpositiveTime(p.t));
    }
    if !(p.psi > 0.0) {
        return Err(Error::DomainError {
            what: "psi",
            value: p.psi,
            domain: "(0, inf)",
        });
    }
    let r = (-p.t).exp();
    let phi = phi_at_time(p.t, e);
    let u = p.psi / phi;
    let u_r = -(p.psi_t + eta_at_time(p.t, e) * p.psi) / (r * phi);
    Ok(RadialState { r, u, u_r })
}

/// `ζ(t, ψ) = 2/(α-1) - (β/(α-1)) log t / t + log ψ / t`, which equals
/// `log u / log(1/r)`.
pub fn zeta(t: f64, psi: f64, e: &Exponents) -> f64 {
    e.zeta0() + (psi.ln() - e.log_power() * t.ln()) / t
}

/// Leading singular profile `A r^{-2/(α-1)} (log 1/r)^{-β/(α-1)}`.
pub fn exact_profile(r: f64, e: &Exponents) -> Result<f64> {
    Ok(constant_a(e) * upper_envelope(r, e)?)
}

/// `d/dr` of [`exact_profile`], equal to `-η(r) profile(r) / r`.
pub fn exact_profile_derivative(r: f64, e: &Exponents) -> Result<f64> {
    let u = exact_profile(r, e)?;
    Ok(-eta_at_time(-r.ln(), e) * u / r)
}

/// Second derivative of [`exact_profile`]: `u (η² + η - r η') / r²`.
pub fn exact_profile_second_derivative(r: f64, e: &Exponents) -> Result<f64> {
    let u = exact_profile(r, e)?;
    let t = -r.ln();
    let eta = eta_at_time(t, e);
    let r_eta_prime = -e.log_power() / (t * t);
    Ok(u * (eta * eta + eta - r_eta_prime) / (r * r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn ex(n: u32, a: f64, b: f64) -> Exponents {
        Exponents::new(n, a, b).unwrap()
    }

    #[test]
    fn exact_profile_maps_to_constant_a() {
        let e = ex(5, 2.0, 0.0);
        for r in [0.5, 0.1, 1e-3, 1e-9] {
            let s = RadialState {
                r,
                u: exact_profile(r, &e).unwrap(),
                u_r: exact_profile_derivative(r, &e).unwrap(),
            };
            let p = to_psi_state(s, &e).unwrap();
            assert!((p.psi - 2.0).abs() < 1e-13, "{p:?}");
            assert!(p.psi_t.abs() < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn hand_example_both_directions() {
        let e = ex(5, 2.0, 1.0);
        let s = RadialState {
            r: (-1f64).exp(),
            u: E * E,
            u_r: 0.0,
        };
        let p = to_psi_state(s, &e).unwrap();
        assert!((p.t - 1.0).abs() < 1e-15);
        assert!((p.psi - 1.0).abs() < 1e-15);
        assert!((p.psi_t + 1.0).abs() < 1e-15);

        let back = from_psi_state(
            PsiState {
                t: 1.0,
                psi: 1.0,
                psi_t: -1.0,
            },
            &e,
        )
        .unwrap();
        assert!((back.r - (-1f64).exp()).abs() < 1e-16);
        assert!((back.u - E * E).abs() < 1e-14);
        assert!(back.u_r.abs() < 1e-14);
    }

    #[test]
    fn constant_psi_reproduces_profile() {
        let e = ex(5, 2.0, 0.0);
        for t in [1.0, 5.0, 30.0] {
            let s = from_psi_state(
                PsiState {
                    t,
                    psi: 2.0,
                    psi_t: 0.0,
                },
                &e,
            )
            .unwrap();
            let want = exact_profile(s.r, &e).unwrap();
            assert!((s.u - want).abs() <= 1e-13 * want);
        }
    }

    #[test]
    fn zeta_examples() {
        assert_eq!(zeta(3.7, 1.0, &ex(5, 2.0, 0.0)), 2.0);
        assert!((zeta(E, 1.0, &ex(5, 2.0, 1.0)) - (2.0 - 1.0 / E)).abs() < 1e-15);
        let e = ex(4, 2.5, -1.5);
        let z = zeta(1e9, constant_a(&e), &e);
        assert!((z - e.zeta0()).abs() < 1e-7);
    }

    #[test]
    fn profile_examples() {
        let r = (-1f64).exp();
        assert!((exact_profile(r, &ex(5, 2.0, 1.0)).unwrap() - E * E).abs() < 1e-14);
        assert!((exact_profile(r, &ex(5, 2.0, 0.0)).unwrap() - 2.0 * E * E).abs() < 1e-13);
        assert!(exact_profile(1.0, &ex(5, 2.0, 0.0)).is_err());
    }

    #[test]
    fn domain_errors() {
        let e = ex(5, 2.0, 0.0);
        let bad = RadialState {
            r: 1.2,
            u: 3.0,
            u_r: 0.0,
        };
        assert!(to_psi_state(bad, &e).is_err());
        let bad = PsiState {
            t: -1.0,
            psi: 1.0,
            psi_t: 0.0,
        };
        assert!(from_psi_state(bad, &e).is_err());
    }
}
