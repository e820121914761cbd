//! Verification of computed trajectories against the equations they solve:
//! the ψ-equation residual, the radial flux identity, the boundedness
//! monitors and the derivative limits, plus parameter sweeps
//! ([`sweep`]) and the desk-scale invariant suite ([`suite`]).

pub mod suite;
pub mod sweep;

use serde::{Deserialize, Serialize};

use crate::classifier::{window_values, Classification, Outcome};
use crate::error::{Error, Result};
use crate::ode::{psi_source, radial_source, Frame, IntegratorConfig, Sample, Trajectory};
use crate::params::{coeff_a_unchecked, coeff_b_unchecked, eta_at_time, limit_coefficients, Exponents};

pub use sweep::{run_sweep, CellReport, SweepConfig, SweepReport};

/// Spacing of the uniform grid on which the finite-difference residual is
/// evaluated.
pub const RESIDUAL_SPACING: f64 = 1e-2;

/// Finite-difference steps: the stencil starts at `FD_STEP` and is halved
/// until two successive second differences agree to `FD_AGREE` (relative to
/// the equation's term scale) or the step reaches `FD_MIN_STEP`, below which
/// rounding dominates.
const FD_STEP: f64 = 1e-3;
const FD_MIN_STEP: f64 = 1e-4;
const FD_AGREE: f64 = 1e-7;

/// Largest Simpson sub-interval, in `t` (or in `log r` for the physical
/// frame).
const SIMPSON_WIDTH: f64 = 1e-2;

/// ζ floor used when evaluating the nonlinearity; matches the default
/// integrator guard.
fn zeta_floor(e: &Exponents) -> f64 {
    0.05 * e.zeta0()
}

fn require_ef(traj: &Trajectory) -> Result<()> {
    if traj.frame == Frame::EmdenFowler {
        Ok(())
    } else {
        Err(Error::WrongFrame {
            expected: "emden_fowler",
        })
    }
}

/// Residual of the ψ-equation at one point and the scale it is divided by,
/// `max(1, |ψ''|, |aψ'|, |bψ|, |ζ^β ψ^α|)`.
#[inline]
fn psi_equation(t: f64, y: f64, dy: f64, ddy: f64, e: &Exponents, floor: f64) -> (f64, f64) {
    let a = coeff_a_unchecked(t, e);
    let b = coeff_b_unchecked(t, e);
    let src = psi_source(t, y, e, floor);
    let terms = [ddy, a * dy, b * y, src];
    let scale = terms.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    ((ddy + a * dy - b * y + src).abs(), scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    /// With `ψ''` as stored at the accepted steps.
    pub internal: f64,
    /// With `ψ'` and `ψ''` from central differences of the dense output.
    pub discretization: f64,
}

impl Residual {
    pub fn max(&self) -> f64 {
        self.internal.max(self.discretization)
    }
}

/// Both parts of the normalized ψ-equation residual. The finite-difference
/// part is evaluated on a uniform grid of spacing `grid` with a three-point
/// central stencil around each grid point.
pub fn psi_residual_parts(traj: &Trajectory, e: &Exponents, grid: f64) -> Result<Residual> {
    require_ef(traj)?;
    let floor = zeta_floor(e);
    let (lo, hi) = traj.range().unwrap_or((0.0, 0.0));
    if traj.samples.len() < 2 || hi - lo < 2.0 * FD_STEP {
        return Err(Error::InsufficientSamples {
            needed: 3,
            found: traj.samples.len(),
        });
    }
    let internal = traj
        .samples
        .iter()
        .map(|s| {
            let (r, scale) = psi_equation(s.x, s.y, s.dy, s.ddy, e, floor);
            r / scale
        })
        .fold(0.0, f64::max);

    let stencil = |x: f64, y: f64, h: f64| -> Option<(f64, f64)> {
        let m = traj.interpolate(x - h)?[0];
        let p = traj.interpolate(x + h)?[0];
        Some(((p - m) / (2.0 * h), (p - 2.0 * y + m) / (h * h)))
    };
    let mut discretization: f64 = 0.0;
    for c in traj.resample_uniform(lo + FD_STEP, hi - FD_STEP, grid) {
        let (_, scale) = psi_equation(c.x, c.y, c.dy, c.ddy, e, floor);
        let Some(mut d) = stencil(c.x, c.y, FD_STEP) else {
            continue;
        };
        let mut h = FD_STEP;
        while h / 2.0 >= FD_MIN_STEP {
            h /= 2.0;
            let Some(d2) = stencil(c.x, c.y, h) else { break };
            let agree = (d2.1 - d.1).abs() <= FD_AGREE * scale;
            d = d2;
            if agree {
                break;
            }
        }
        let (r, scale) = psi_equation(c.x, c.y, d.0, d.1, e, floor);
        discretization = discretization.max(r / scale);
    }
    Ok(Residual {
        internal,
        discretization,
    })
}

/// Normalized residual of `ψ'' + a(t)ψ' - b(t)ψ + ζ^β ψ^α = 0` along an
/// Emden–Fowler trajectory: the larger of the internal and the
/// finite-difference evaluation.
pub fn psi_residual(traj: &Trajectory, e: &Exponents) -> Result<f64> {
    psi_residual_parts(traj, e, RESIDUAL_SPACING).map(|r| r.max())
}

/// Composite Simpson rule for `f` on `[a, b]` with `m` (even) panels.
fn simpson(a: f64, b: f64, m: usize, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    let h = (b - a) / m as f64;
    let (mut sum, mut abs) = (0.0, 0.0);
    for i in 0..=m {
        let w = if i == 0 || i == m {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let v = f(a + i as f64 * h);
        sum += w * v;
        abs += w * v.abs();
    }
    (sum * h / 3.0, abs * h.abs() / 3.0)
}

fn panels(width: f64) -> usize {
    let m = (width.abs() / SIMPSON_WIDTH).ceil().max(2.0) as usize;
    m + m % 2
}

/// Flux data per sample: `F` and the increment of `∫ source` over the
/// segment ending at it, both scaled by a common positive factor that
/// depends only on the sample index.
struct FluxTable {
    flux: Vec<f64>,
    increment: Vec<f64>,
    increment_abs: Vec<f64>,
    /// `log` of the scale factor at each sample.
    log_scale: Vec<f64>,
}

fn flux_table_physical(traj: &Trajectory, e: &Exponents) -> FluxTable {
    let nm1 = e.dim() - 1.0;
    let s = &traj.samples;
    let mut t = FluxTable {
        flux: s.iter().map(|p| p.x.powf(nm1) * p.dy).collect(),
        increment: vec![0.0],
        increment_abs: vec![0.0],
        log_scale: vec![0.0; s.len()],
    };
    for i in 0..s.len() - 1 {
        let q = traj.segment_interpolant(i);
        let (a, b) = (s[i].x, s[i + 1].x);
        let m = panels((b / a).ln());
        let (v, va) = simpson(a, b, m, |r| r.powf(nm1) * radial_source(q.eval(r)[0], e));
        // (r^{n-1} u')' = -r^{n-1} S.
        t.increment.push(-v);
        t.increment_abs.push(va);
    }
    t
}

/// Emden–Fowler form of the flux: with `w(τ) = e^{-λ₊τ} τ^{-k}`,
/// `r^{n-1} u_r = -w (ψ_t + η ψ)` and `d/dτ (r^{n-1} u_r) = w ζ^β ψ^α`.
/// Everything is divided by `w(t_i)` of the segment start so that nothing
/// overflows; `log_scale` carries `log w`.
fn flux_table_ef(traj: &Trajectory, e: &Exponents) -> FluxTable {
    let lp = limit_coefficients(e).lambda_plus;
    let k = e.log_power();
    let floor = zeta_floor(e);
    let log_w = |t: f64| -lp * t - k * t.ln();
    let s = &traj.samples;
    let mut t = FluxTable {
        flux: s
            .iter()
            .map(|p| -(p.dy + eta_at_time(p.x, e) * p.y))
            .collect(),
        increment: vec![0.0],
        increment_abs: vec![0.0],
        log_scale: s.iter().map(|p| log_w(p.x)).collect(),
    };
    for i in 0..s.len() - 1 {
        let q = traj.segment_interpolant(i);
        let (a, b) = (s[i].x, s[i + 1].x);
        let lw_a = log_w(a);
        let (v, va) = simpson(a, b, panels(b - a), |tau| {
            let y = q.eval(tau)[0];
            (log_w(tau) - lw_a).exp() * psi_source(tau, y, e, floor)
        });
        t.increment.push(v);
        t.increment_abs.push(va);
    }
    t
}

/// Largest normalized defect of the flux identity
/// `F(x₂) - F(x₁) = ∫ (d F/dx)` with `F = r^{n-1} u_r`, over consecutive
/// sample pairs and over all pairs `(x₀, x_j)`. Each defect is divided by
/// `max(|F(x₁)|, |F(x₂)|, ∫|dF/dx|)`, since `u_r` may vanish.
pub fn flux_identity_check(traj: &Trajectory, e: &Exponents) -> Result<f64> {
    if traj.samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            found: traj.samples.len(),
        });
    }
    let tab = match traj.frame {
        Frame::Physical => flux_table_physical(traj, e),
        Frame::EmdenFowler => flux_table_ef(traj, e),
    };
    let n = traj.samples.len();
    let defect = |d: f64, scale: f64| if scale > 0.0 { d.abs() / scale } else { d.abs() };
    let mut worst: f64 = 0.0;

    // Consecutive pairs, in units of the scale at the segment start.
    for i in 0..n - 1 {
        let ratio = (tab.log_scale[i + 1] - tab.log_scale[i]).exp();
        let f1 = tab.flux[i];
        let f2 = tab.flux[i + 1] * ratio;
        let d = f2 - f1 - tab.increment[i + 1];
        worst = worst.max(defect(d, f1.abs().max(f2.abs()).max(tab.increment_abs[i + 1])));
    }

    // Cumulative from the first sample, in units of the scale there.
    let (mut acc, mut acc_abs) = (0.0, 0.0);
    let f0 = tab.flux[0];
    for j in 1..n {
        let ratio = (tab.log_scale[j - 1] - tab.log_scale[0]).exp();
        acc += tab.increment[j] * ratio;
        acc_abs += tab.increment_abs[j] * ratio;
        let fj = tab.flux[j] * (tab.log_scale[j] - tab.log_scale[0]).exp();
        let d = fj - f0 - acc;
        worst = worst.max(defect(d, f0.abs().max(fj.abs()).max(acc_abs)));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monitors {
    /// `sup ψ = sup u / envelope`, up to the factor `A`.
    pub sup_envelope_ratio: f64,
    /// `sup r² u^{α-1} (log u)^β = sup ψ^{α-1} ζ^β`.
    pub sup_growth_product: f64,
    /// Relative oscillation `(max - min) / max|·|` of `ψ` and of the growth
    /// product over the tail window.
    pub tail_oscillation: (f64, f64),
}

fn growth_product(t: f64, psi: f64, e: &Exponents) -> f64 {
    let lp = psi.ln();
    let z = e.zeta0() + (lp - e.log_power() * t.ln()) / t;
    ((e.alpha() - 1.0) * lp + e.beta() * z.ln()).exp()
}

fn oscillation(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let (lo, hi, m) = v.fold((f64::INFINITY, f64::NEG_INFINITY, 0.0f64), |(lo, hi, m), x| {
        (lo.min(x), hi.max(x), m.max(x.abs()))
    });
    if m > 0.0 {
        (hi - lo) / m
    } else {
        0.0
    }
}

/// Boundedness monitors on the working-regime samples (`ψ > 0`) of a
/// trajectory in either frame; the tail is the last `tail_fraction` of the
/// range.
pub fn bound_monitors(traj: &Trajectory, e: &Exponents, tail_fraction: f64) -> Result<Monitors> {
    let ef = traj.to_emden_fowler(e, &IntegratorConfig::for_exponents(e))?;
    let pts: Vec<&Sample> = ef.samples.iter().filter(|s| s.y > 0.0).collect();
    if pts.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, found: 0 });
    }
    let sup_psi = pts.iter().map(|s| s.y).fold(f64::NEG_INFINITY, f64::max);
    let sup_growth = pts
        .iter()
        .map(|s| growth_product(s.x, s.y, e))
        .fold(f64::NEG_INFINITY, f64::max);
    let tail_oscillation = match ef.range() {
        Some((lo, hi)) if hi > lo => {
            let from = hi - tail_fraction * (hi - lo);
            let tail: Vec<(f64, f64)> = window_values(&ef, from, hi)
                .into_iter()
                .filter(|p| p.1 > 0.0)
                .collect();
            (
                oscillation(tail.iter().map(|p| p.1)),
                oscillation(tail.iter().map(|p| growth_product(p.0, p.1, e))),
            )
        }
        _ => (0.0, 0.0),
    };
    Ok(Monitors {
        sup_envelope_ratio: sup_psi,
        sup_growth_product: sup_growth,
        tail_oscillation,
    })
}

/// `(max |ψ'|, max |ψ''|)` over the final `window` of an Emden–Fowler
/// trajectory, from the stored samples and a uniform scan.
pub fn derivative_limits(traj: &Trajectory, window: f64) -> Result<(f64, f64)> {
    require_ef(traj)?;
    let Some((lo, hi)) = traj.range() else {
        return Err(Error::InsufficientSamples { needed: 1, found: 0 });
    };
    let from = (hi - window).max(lo);
    let mut d1: f64 = 0.0;
    let mut d2: f64 = 0.0;
    let mut take = |s: &Sample| {
        d1 = d1.max(s.dy.abs());
        d2 = d2.max(s.ddy.abs());
    };
    traj.samples.iter().filter(|s| s.x >= from).for_each(&mut take);
    traj.resample_uniform(from, hi, (hi - from).max(1e-300) / 512.0)
        .iter()
        .for_each(&mut take);
    Ok((d1, d2))
}

/// `∫ ψ_t² dt` over `[from, to]` of an Emden–Fowler trajectory, by Simpson
/// on the dense output of each segment.
pub fn kinetic_integral(traj: &Trajectory, from: f64, to: f64) -> Result<f64> {
    require_ef(traj)?;
    if traj.samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            found: traj.samples.len(),
        });
    }
    let (from, to) = (from.min(to), from.max(to));
    let s = &traj.samples;
    let mut total = 0.0;
    for i in 0..s.len() - 1 {
        let (x0, x1) = (s[i].x.min(s[i + 1].x), s[i].x.max(s[i + 1].x));
        let (a, b) = (x0.max(from), x1.min(to));
        if b <= a {
            continue;
        }
        let q = traj.segment_interpolant(i);
        total += simpson(a, b, panels(b - a), |t| q.eval(t)[1].powi(2)).0;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyTolerances {
    /// Bound on the normalized ψ-equation residual.
    pub residual: f64,
    pub flux: f64,
    /// Bound on `max |ψ'|` and `max |ψ''|` over the final window.
    pub derivative: f64,
    pub oscillation: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        VerifyTolerances {
            residual: 1e-5,
            flux: 1e-6,
            derivative: 1e-4,
            oscillation: 1e-2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checks {
    pub residual: bool,
    pub flux: bool,
    pub envelope: bool,
    /// `None` unless the trajectory converged or decayed.
    pub derivative_tail: Option<bool>,
}

impl Checks {
    pub fn all(&self) -> bool {
        self.residual && self.flux && self.envelope && self.derivative_tail.unwrap_or(true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub max_psi_residual: f64,
    pub max_flux_defect: f64,
    pub sup_envelope_ratio: f64,
    pub sup_growth_product: f64,
    pub tail_oscillation: (f64, f64),
    pub derivative_tail: (f64, f64),
    pub passed: Checks,
}

/// Run every trajectory check on an Emden–Fowler trajectory that has
/// already been classified.
pub fn verify_trajectory(
    traj: &Trajectory,
    e: &Exponents,
    class: &Classification,
    tol: &VerifyTolerances,
) -> Result<VerificationReport> {
    require_ef(traj)?;
    let residual = psi_residual(traj, e)?;
    let flux = flux_identity_check(traj, e)?;
    let mon = bound_monitors(traj, e, class.tolerances.tail_fraction)?;
    let derivative_tail = derivative_limits(traj, class.tolerances.fit_window)?;
    let converged = class.outcome == Outcome::ConvergesToA;
    let envelope = mon.sup_envelope_ratio.is_finite()
        && mon.sup_growth_product.is_finite()
        && (!converged
            || (mon.tail_oscillation.0 <= tol.oscillation
                && mon.tail_oscillation.1 <= tol.oscillation));
    let derivative_check = matches!(class.outcome, Outcome::ConvergesToA | Outcome::DecaysToZero)
        .then(|| {
            derivative_tail.0 <= tol.derivative && derivative_tail.1 <= tol.derivative
        });
    Ok(VerificationReport {
        max_psi_residual: residual,
        max_flux_defect: flux,
        sup_envelope_ratio: mon.sup_envelope_ratio,
        sup_growth_product: mon.sup_growth_product,
        tail_oscillation: mon.tail_oscillation,
        derivative_tail,
        passed: Checks {
            residual: residual <= tol.residual,
            flux: flux <= tol.flux,
            envelope,
            derivative_tail: derivative_check,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{classify, Thresholds};
    use crate::ode::{integrate_psi, integrate_radial};
    use crate::transform::{exact_profile, exact_profile_derivative, PsiState, RadialState};

    fn ex(n: u32, a: f64, b: f64) -> Exponents {
        Exponents::new(n, a, b).unwrap()
    }

    fn spiral(e: &Exponents, t_end: f64) -> Trajectory {
        let cfg = IntegratorConfig::for_exponents(e);
        integrate_psi(
            PsiState {
                t: 5.0,
                psi: 2.5,
                psi_t: 0.0,
            },
            t_end,
            e,
            &cfg,
        )
        .unwrap()
    }

    #[test]
    fn equilibrium_residual_vanishes() {
        let e = ex(5, 2.0, 0.0);
        let cfg = IntegratorConfig::for_exponents(&e);
        let tr = integrate_psi(
            PsiState {
                t: 5.0,
                psi: 2.0,
                psi_t: 0.0,
            },
            40.0,
            &e,
            &cfg,
        )
        .unwrap();
        assert!(psi_residual(&tr, &e).unwrap() <= 1e-10);
        let (d1, d2) = derivative_limits(&tr, 10.0).unwrap();
        assert!(d1 <= 1e-14 && d2 <= 1e-14);
    }

    #[test]
    fn integrated_residual_and_fault_injection() {
        let e = ex(5, 2.0, 0.0);
        let tr = spiral(&e, 60.0);
        let r = psi_residual(&tr, &e).unwrap();
        assert!(r <= 1e-5, "{r}");
        let mut bad = tr.clone();
        let k = bad.samples.len() / 2;
        bad.samples[k].y += 1e-2;
        assert!(psi_residual(&bad, &e).unwrap() > 1e-3);
    }

    #[test]
    fn flux_on_exact_profile() {
        // u = 2/r², r⁴u' = -4r, ∫ r⁴u² = 4Δr; the samples are exact and
        // dense enough that the Hermite error stays below 1e-10.
        let e = ex(5, 2.0, 0.0);
        let samples: Vec<Sample> = (0..300)
            .map(|i| {
                let r = 0.5 * 0.98f64.powi(i);
                let u = exact_profile(r, &e).unwrap();
                let ur = exact_profile_derivative(r, &e).unwrap();
                Sample {
                    x: r,
                    y: u,
                    dy: ur,
                    ddy: radial_extended_for_test(r, u, ur, &e),
                }
            })
            .collect();
        let tr = Trajectory::from_samples(Frame::Physical, samples);
        let d = flux_identity_check(&tr, &e).unwrap();
        assert!(d <= 1e-8, "{d}");
        let ef = tr.to_emden_fowler(&e, &IntegratorConfig::for_exponents(&e)).unwrap();
        assert!(flux_identity_check(&ef, &e).unwrap() <= 1e-8);
    }

    fn radial_extended_for_test(r: f64, u: f64, ur: f64, e: &Exponents) -> f64 {
        crate::ode::rhs_radial_u(RadialState { r, u, u_r: ur }, e).unwrap()
    }

    #[test]
    fn flux_on_integrated_trajectories() {
        let e = ex(5, 2.0, 0.0);
        let tr = spiral(&e, 60.0);
        assert!(flux_identity_check(&tr, &e).unwrap() <= 1e-6);
        assert!(tr.samples.iter().all(|s| s.dy + 2.0 * s.y > 0.0), "u' < 0");

        let e1 = ex(4, 2.5, -1.0);
        let cfg = IntegratorConfig::for_exponents(&e1);
        let r0 = (-5f64).exp();
        let s = crate::transform::from_psi_state(
            PsiState {
                t: 5.0,
                psi: 1.2 * crate::constant_a(&e1),
                psi_t: 0.1,
            },
            &e1,
        )
        .unwrap();
        let tr = integrate_radial(s, r0 * (-10f64).exp(), &e1, &cfg).unwrap();
        assert!(flux_identity_check(&tr, &e1).unwrap() <= 1e-6);
    }

    #[test]
    fn monitors_and_report() {
        let e = ex(5, 2.0, 0.0);
        let tr = spiral(&e, 60.0);
        let th = Thresholds::for_exponents(&e);
        let c = classify(&tr, &e, &th).unwrap();
        let rep = verify_trajectory(&tr, &e, &c, &VerifyTolerances::default()).unwrap();
        assert!(rep.sup_envelope_ratio <= 3.0 * 2.0);
        assert!(rep.passed.all(), "{rep:?}");
        let (d1, d2) = rep.derivative_tail;
        assert!(d1 <= 1e-6 && d2 <= 1e-6, "{d1} {d2}");
    }

    #[test]
    fn short_trajectory_reports_large_derivatives() {
        let e = ex(5, 2.0, 0.0);
        let tr = spiral(&e, 10.0);
        let (d1, _) = derivative_limits(&tr, 10.0).unwrap();
        assert!(d1 > 1e-4);
    }

    #[test]
    fn kinetic_integral_of_exponential() {
        let samples = (0..=100)
            .map(|i| {
                let t = 5.0 + 0.1 * i as f64;
                let v = (-t).exp();
                Sample { x: t, y: v, dy: -v, ddy: v }
            })
            .collect();
        let tr = Trajectory::from_samples(Frame::EmdenFowler, samples);
        let (a, b): (f64, f64) = (6.1, 13.7);
        let exact = 0.5 * ((-2.0 * a).exp() - (-2.0 * b).exp());
        let got = kinetic_integral(&tr, a, b).unwrap();
        assert!((got - exact).abs() <= 1e-9 * exact, "{got} vs {exact}");
    }
}
