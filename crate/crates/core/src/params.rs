//! Problem parameters and the closed-form scalars attached to them.
//!
//! Everything here is a pure function of an [`Exponents`] triple: the
//! singular constant `A`, the non-autonomous coefficients `a(t)`, `b(t)` of
//! the Emden–Fowler equation, their limits and characteristic roots, the
//! scaling factor `φ(r)`, the Lambert W function and the inversion of the
//! growth law `U^{α-1} (log U)^β = K`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Validated `(n, α, β)` with `n ≥ 3` and `n/(n-2) < α < (n+2)/(n-2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exponents {
    n: u32,
    alpha: f64,
    beta: f64,
}

/// Open interval of admissible `α` for dimension `n`.
pub fn admissible_alpha(n: u32) -> Option<(f64, f64)> {
    if n < 3 {
        return None;
    }
    let m = f64::from(n);
    Some((m / (m - 2.0), (m + 2.0) / (m - 2.0)))
}

impl Exponents {
    pub fn new(n: u32, alpha: f64, beta: f64) -> Result<Self> {
        validate_exponents(n, alpha, beta)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `n` as a float.
    pub fn dim(&self) -> f64 {
        f64::from(self.n)
    }

    /// `2/(α-1)`, the limit of ζ and the power of `r` in the profile.
    pub fn zeta0(&self) -> f64 {
        2.0 / (self.alpha - 1.0)
    }

    /// `β/(α-1)`, the power of `log(1/r)` in the profile.
    pub fn log_power(&self) -> f64 {
        self.beta / (self.alpha - 1.0)
    }
}

impl<'de> Deserialize<'de> for Exponents {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: u32,
            alpha: f64,
            beta: f64,
        }
        let raw = Raw::deserialize(de)?;
        validate_exponents(raw.n, raw.alpha, raw.beta).map_err(serde::de::Error::custom)
    }
}

pub fn validate_exponents(n: u32, alpha: f64, beta: f64) -> Result<Exponents> {
    let Some((lo, hi)) = admissible_alpha(n) else {
        return Err(Error::OutOfRange {
            reason: format!("dimension n = {n} must be at least 3"),
        });
    };
    if !alpha.is_finite() || alpha <= lo || alpha >= hi {
        return Err(Error::OutOfRange {
            reason: format!(
                "alpha = {alpha} must lie in the open interval ({lo}, {hi}) for n = {n}"
            ),
        });
    }
    if !beta.is_finite() {
        return Err(Error::OutOfRange {
            reason: format!("beta = {beta} must be finite"),
        });
    }
    Ok(Exponents { n, alpha, beta })
}

/// The constant `A = [(2/(α-1))^{1-β} (n-2-2/(α-1))]^{1/(α-1)}`.
pub fn constant_a(e: &Exponents) -> f64 {
    let z = e.zeta0();
    (z.powf(1.0 - e.beta) * (e.dim() - 2.0 - z)).powf(1.0 / (e.alpha - 1.0))
}

/// Limits of the Emden–Fowler coefficients and the roots of
/// `λ² + a0 λ - b0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitCoefficients {
    pub a0: f64,
    pub b0: f64,
    pub zeta0: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    #[serde(rename = "A")]
    pub a: f64,
}

pub fn limit_coefficients(e: &Exponents) -> LimitCoefficients {
    let zeta0 = e.zeta0();
    let a0 = 2.0 * zeta0 - e.dim() + 2.0;
    let b0 = zeta0 * (e.dim() - 2.0 - zeta0);
    // a0 > 0, so -(a0 + sqrt(disc))/2 has no cancellation; the other root
    // comes from the product of the roots.
    let disc = (a0 * a0 + 4.0 * b0).sqrt();
    let lambda_minus = -0.5 * (a0 + disc);
    let lambda_plus = -b0 / lambda_minus;
    LimitCoefficients {
        a0,
        b0,
        zeta0,
        lambda_minus,
        lambda_plus,
        a: constant_a(e),
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonpositiveTime(t))
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::DomainError {
            what: "r",
            value: r,
            domain: "(0, 1)",
        })
    }
}

/// Damping coefficient `a(t) = 4/(α-1) - n + 2 - 2β/((α-1)t)`.
pub fn coeff_a(t: f64, e: &Exponents) -> Result<f64> {
    check_time(t)?;
    Ok(coeff_a_unchecked(t, e))
}

pub(crate) fn coeff_a_unchecked(t: f64, e: &Exponents) -> f64 {
    2.0 * e.zeta0() - e.dim() + 2.0 - 2.0 * e.log_power() / t
}

/// Linear coefficient
/// `b(t) = ((n-2) - 2/(α-1) + β/((α-1)t)) (2/(α-1) - β/((α-1)t)) - β/((α-1)t²)`.
pub fn coeff_b(t: f64, e: &Exponents) -> Result<f64> {
    check_time(t)?;
    Ok(coeff_b_unchecked(t, e))
}

pub(crate) fn coeff_b_unchecked(t: f64, e: &Exponents) -> f64 {
    let k = e.log_power();
    let z = e.zeta0();
    (e.dim() - 2.0 - z + k / t) * (z - k / t) - k / (t * t)
}

/// `η(r) = 2/(α-1) + β/((α-1) log r)`, so that `r φ'(r) = η(r) φ(r)`.
pub fn eta(r: f64, e: &Exponents) -> Result<f64> {
    check_radius(r)?;
    Ok(e.zeta0() + e.log_power() / r.ln())
}

/// `η` written in the log-radius `t = -log r`.
pub(crate) fn eta_at_time(t: f64, e: &Exponents) -> f64 {
    e.zeta0() - e.log_power() / t
}

/// `r η'(r) = -β / ((α-1) (log r)²)`.
pub fn r_eta_prime(r: f64, e: &Exponents) -> Result<f64> {
    check_radius(r)?;
    let l = r.ln();
    Ok(-e.log_power() / (l * l))
}

/// Scaling factor `φ(r) = r^{2/(α-1)} (log 1/r)^{β/(α-1)}`.
pub fn phi(r: f64, e: &Exponents) -> Result<f64> {
    check_radius(r)?;
    Ok(phi_at_time(-r.ln(), e))
}

/// `φ(e^{-t}) = exp(-2t/(α-1)) t^{β/(α-1)}`, evaluated in log space.
pub(crate) fn phi_at_time(t: f64, e: &Exponents) -> f64 {
    (-e.zeta0() * t + e.log_power() * t.ln()).exp()
}

/// Envelope `r^{-2/(α-1)} (log 1/r)^{-β/(α-1)} = 1/φ(r)`.
pub fn upper_envelope(r: f64, e: &Exponents) -> Result<f64> {
    check_radius(r)?;
    let t = -r.ln();
    Ok((e.zeta0() * t - e.log_power() * t.ln()).exp())
}

/// Principal branch of the Lambert W function on `[0, ∞)`.
pub fn lambert_w(s: f64) -> Result<f64> {
    if !(s >= 0.0) || s.is_infinite() {
        return Err(Error::DomainError {
            what: "s",
            value: s,
            domain: "[0, inf)",
        });
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    if s >= std::f64::consts::E {
        return Ok(lambert_w_of_log(s.ln()));
    }

    // Halley on w e^w - s, seeded with s itself; w ∈ (0, 1) here.
    let mut w = s;
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - s;
        let fp = ew * (w + 1.0);
        let step = f / (fp - (w + 2.0) * f / (2.0 * w + 2.0));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs() {
            break;
        }
    }
    Ok(w)
}

/// `W(e^l)` for `l ≥ 1`, solving `w + log w = l` so that huge arguments
/// never need to be formed.
pub(crate) fn lambert_w_of_log(l: f64) -> f64 {
    // log s - log log s is a lower bound and already close for large s.
    let mut w = if l > 1.0 { l - l.ln() } else { 1.0 };
    for _ in 0..64 {
        let g = w + w.ln() - l;
        let gp = 1.0 + 1.0 / w;
        let gpp = -1.0 / (w * w);
        let step = 2.0 * g * gp / (2.0 * gp * gp - g * gpp);
        w -= step;
        if step.abs() <= 2.0 * f64::EPSILON * w.abs() {
            break;
        }
    }
    w
}

/// `log(U^{α-1} (log U)^β)` for `U = e^x`.
fn log_growth(x: f64, alpha: f64, beta: f64) -> f64 {
    (alpha - 1.0) * x + beta * x.ln()
}

/// Solve `U^{α-1} (log U)^β = K` for `U` on the branch where the left side
/// is increasing, `U ≥ max(e, e^{(1-β)/(α-1)})`.
pub fn invert_growth(k: f64, e: &Exponents) -> Result<f64> {
    invert_growth_raw(k, e.alpha, e.beta)
}

/// [`invert_growth`] for bare exponents; only `α > 1` is required.
pub fn invert_growth_raw(k: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 1.0 && beta.is_finite()) {
        return Err(Error::OutOfRange {
            reason: format!("invert_growth needs alpha > 1 and finite beta, got ({alpha}, {beta})"),
        });
    }
    let p = alpha - 1.0;
    let x_lo = 1f64.max((1.0 - beta) / p);
    let threshold = log_growth(x_lo, alpha, beta);
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::NoMonotoneRoot {
            k,
            threshold: threshold.exp(),
        });
    }
    let target = k.ln();
    let slack = 8.0 * f64::EPSILON * target.abs().max(1.0);
    if threshold > target + slack {
        return Err(Error::NoMonotoneRoot {
            k,
            threshold: threshold.exp(),
        });
    }
    if threshold >= target - slack {
        return Ok(x_lo.exp());
    }

    let mut lo = x_lo;
    let mut hi = x_lo.max(2.0 * target / p);
    while log_growth(hi, alpha, beta) < target {
        lo = hi;
        hi *= 2.0;
    }
    // Bisection in x = log U; the bracket shrinks to adjacent floats.
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if log_growth(mid, alpha, beta) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = if (log_growth(hi, alpha, beta) - target).abs() < (log_growth(lo, alpha, beta) - target).abs() {
        hi
    } else {
        lo
    };
    Ok(x.exp())
}

/// Closed-form inverse of the growth law through Lambert W, valid for
/// `β > 0`: `log U = (β/(α-1)) W((α-1)/β · K^{1/β})`.
pub fn invert_growth_lambert(k: f64, e: &Exponents) -> Option<f64> {
    invert_growth_lambert_raw(k, e.alpha, e.beta)
}

pub fn invert_growth_lambert_raw(k: f64, alpha: f64, beta: f64) -> Option<f64> {
    if beta <= 0.0 || !(alpha > 1.0) || !(k > 0.0) {
        return None;
    }
    let p = alpha - 1.0;
    let ln_arg = (p / beta).ln() + k.ln() / beta;
    let w = if ln_arg >= 1.0 {
        lambert_w_of_log(ln_arg)
    } else {
        lambert_w(ln_arg.exp()).ok()?
    };
    Some((beta / p * w).exp())
}
