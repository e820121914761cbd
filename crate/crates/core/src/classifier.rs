//! Classification of Emden–Fowler trajectories into the two alternatives of
//! the dichotomy: convergence to `A` (singular-type) or decay to zero
//! (removable-type), plus regime exits and an honest `Undetermined`.
//!
//! The zero equilibrium is a saddle with roots `λ₋ = -2/(α-1) < 0 < λ₊`, so
//! removable-type data form a one-dimensional stable manifold. It is found
//! two ways: by bisection on the initial slope between the two outcomes
//! ([`find_separatrix`]) and by integrating backwards in `t` from the linear
//! eigendirection, where the manifold is attracting
//! ([`stable_manifold_trajectory`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{integrate_psi, EventKind, Frame, IntegratorConfig, Sample, Trajectory};
use crate::params::{constant_a, limit_coefficients, Exponents};
use crate::transform::{zeta, PsiState};

/// Number of uniform points used to scan windows.
const WINDOW_POINTS: usize = 512;

/// Horizon used by the separatrix bisection for each trial trajectory.
pub const SEPARATRIX_HORIZON: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    ConvergesToA,
    DecaysToZero,
    HitsZero,
    BlowUp,
    Undetermined,
}

impl Outcome {
    pub const ALL: [Outcome; 5] = [
        Outcome::ConvergesToA,
        Outcome::DecaysToZero,
        Outcome::HitsZero,
        Outcome::BlowUp,
        Outcome::Undetermined,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Outcome::ConvergesToA => "converges_to_a",
            Outcome::DecaysToZero => "decays_to_zero",
            Outcome::HitsZero => "hits_zero",
            Outcome::BlowUp => "blow_up",
            Outcome::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub conv_tol: f64,
    pub zero_tol: f64,
    pub tail_fraction: f64,
    pub fit_window: f64,
}

impl Thresholds {
    pub fn for_exponents(e: &Exponents) -> Self {
        Thresholds {
            conv_tol: if e.beta() == 0.0 { 1e-3 } else { 5e-2 },
            zero_tol: 1e-3,
            tail_fraction: 0.25,
            fit_window: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.conv_tol > 0.0 && self.zero_tol > 0.0 && self.fit_window > 0.0) {
            return Err(Error::InvalidConfig(
                "conv_tol, zero_tol and fit_window must be positive".into(),
            ));
        }
        if !(self.tail_fraction > 0.0 && self.tail_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "tail_fraction must lie in (0, 1), got {}",
                self.tail_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Windows {
    pub tail: (f64, f64),
    pub fit: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Event that terminated the integration, if any.
    pub event: Option<EventKind>,
    /// `max |ψ - A| / A` over the tail window.
    pub tail_max_rel_deviation: Option<f64>,
    /// `(|ψ(mid) - A|, |ψ(T) - A|)` for the trend test.
    pub trend: Option<(f64, f64)>,
    /// RMS residual of the log-linear fit.
    pub fit_rms: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub outcome: Outcome,
    pub terminal_value: f64,
    pub fitted_rate: Option<f64>,
    #[serde(rename = "A")]
    pub a: f64,
    pub lambda_minus: f64,
    pub windows: Windows,
    pub tolerances: Thresholds,
    pub diagnostics: Diagnostics,
}

/// Samples ordered by increasing `t`.
fn ordered(traj: &Trajectory) -> std::borrow::Cow<'_, Trajectory> {
    if traj.is_increasing() {
        std::borrow::Cow::Borrowed(traj)
    } else {
        let mut t = traj.clone();
        t.samples.reverse();
        std::borrow::Cow::Owned(t)
    }
}

/// Stored samples inside `[from, to]` merged with a uniform scan of it.
pub(crate) fn window_values(traj: &Trajectory, from: f64, to: f64) -> Vec<(f64, f64)> {
    let h = (to - from) / WINDOW_POINTS as f64;
    let mut pts: Vec<(f64, f64)> = traj
        .resample_uniform(from, to, h)
        .into_iter()
        .map(|s| (s.x, s.y))
        .collect();
    pts.extend(
        traj.samples
            .iter()
            .filter(|s| s.x >= from && s.x <= to)
            .map(|s| (s.x, s.y)),
    );
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    pts
}

pub fn classify(traj: &Trajectory, e: &Exponents, th: &Thresholds) -> Result<Classification> {
    if traj.frame != Frame::EmdenFowler {
        return Err(Error::WrongFrame {
            expected: "emden_fowler",
        });
    }
    th.validate()?;
    let traj = ordered(traj);
    let lc = limit_coefficients(e);
    let a = lc.a;
    let (Some(first), Some(last)) = (traj.first().copied(), traj.last().copied()) else {
        return Err(Error::InsufficientSamples { needed: 2, found: 0 });
    };
    let mut out = Classification {
        outcome: Outcome::Undetermined,
        terminal_value: last.y,
        fitted_rate: None,
        a,
        lambda_minus: lc.lambda_minus,
        windows: Windows {
            tail: (last.x, last.x),
            fit: None,
        },
        tolerances: *th,
        diagnostics: Diagnostics::default(),
    };

    if let Some(ev) = traj.event() {
        out.diagnostics.event = Some(ev.kind);
        out.outcome = match ev.kind {
            EventKind::BlowUp => Outcome::BlowUp,
            // Falling below the ζ guard happens only as ψ collapses, so it
            // is an exit through the zero side.
            EventKind::HitsZero | EventKind::ZetaGuard => Outcome::HitsZero,
        };
        return Ok(out);
    }

    let length = last.x - first.x;
    let tail_len = th.tail_fraction * length;
    let tail_from = last.x - tail_len;
    out.windows.tail = (tail_from, last.x);
    if tail_len < th.fit_window {
        return Err(Error::TrajectoryTooShort {
            tail: tail_len,
            fit_window: th.fit_window,
        });
    }

    let tail = window_values(&traj, tail_from, last.x);
    let max_dev = tail
        .iter()
        .map(|&(_, y)| (y - a).abs() / a)
        .fold(0.0f64, f64::max);
    out.diagnostics.tail_max_rel_deviation = Some(max_dev);

    if max_dev <= th.conv_tol {
        if e.beta() == 0.0 {
            out.outcome = Outcome::ConvergesToA;
            return Ok(out);
        }
        let mid = 0.5 * (first.x + last.x);
        let psi_mid = traj.interpolate(mid).map(|v| v[0]).unwrap_or(f64::NAN);
        let trend = ((psi_mid - a).abs(), (last.y - a).abs());
        out.diagnostics.trend = Some(trend);
        if trend.1 < trend.0 {
            out.outcome = Outcome::ConvergesToA;
        }
        return Ok(out);
    }

    let small = tail.iter().all(|&(_, y)| y > 0.0 && y < th.zero_tol * a);
    let monotone = tail.windows(2).all(|w| w[1].1 <= w[0].1);
    if small && monotone {
        let fit_from = last.x - th.fit_window;
        let pts: Vec<(f64, f64)> = window_values(&traj, fit_from, last.x);
        let fit = fit_log_linear(&pts)?;
        out.windows.fit = Some((fit_from, last.x));
        out.diagnostics.fit_rms = Some(fit.rms);
        if fit.slope < 0.0 {
            out.outcome = Outcome::DecaysToZero;
            out.fitted_rate = Some(fit.slope);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms: f64,
}

/// Least-squares fit of `log ψ = intercept + slope · t`.
pub fn fit_log_linear(points: &[(f64, f64)]) -> Result<LogLinearFit> {
    let bad = points.iter().filter(|p| !(p.1 > 0.0)).count();
    if bad > 0 {
        return Err(Error::NonpositiveSamples(bad));
    }
    if points.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            found: points.len(),
        });
    }
    let n = points.len() as f64;
    let mt = points.iter().map(|p| p.0).sum::<f64>() / n;
    let ml = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let (mut stt, mut stl) = (0.0, 0.0);
    for &(t, y) in points {
        stt += (t - mt) * (t - mt);
        stl += (t - mt) * (y.ln() - ml);
    }
    let slope = stl / stt;
    let intercept = ml - slope * mt;
    let rms = (points
        .iter()
        .map(|&(t, y)| (y.ln() - intercept - slope * t).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(LogLinearFit {
        slope,
        intercept,
        rms,
    })
}

/// Least-squares slope of `log ψ` against `t`.
pub fn fit_decay_rate(points: &[(f64, f64)]) -> Result<f64> {
    fit_log_linear(points).map(|f| f.slope)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Above,
    Below,
}

fn side_of(c: &Classification, last: &Sample) -> Side {
    match c.outcome {
        Outcome::ConvergesToA | Outcome::BlowUp => Side::Above,
        Outcome::HitsZero => Side::Below,
        Outcome::DecaysToZero | Outcome::Undetermined => {
            if last.dy > 0.0 {
                Side::Above
            } else {
                Side::Below
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Separatrix {
    /// Midpoint of the final bracket.
    pub slope: f64,
    /// Final bracket; `below` hits zero, `above` heads to `A`.
    pub below: f64,
    pub above: f64,
    pub iterations: usize,
    pub t0: f64,
    pub psi0: f64,
}

fn trial(
    e: &Exponents,
    t0: f64,
    psi0: f64,
    slope: f64,
    th: &Thresholds,
    cfg: &IntegratorConfig,
) -> Result<(Classification, Side)> {
    let p = PsiState {
        t: t0,
        psi: psi0,
        psi_t: slope,
    };
    let traj = integrate_psi(p, t0 + SEPARATRIX_HORIZON, e, cfg)?;
    let c = classify(&traj, e, th)?;
    let side = side_of(&c, traj.last().expect("non-empty trajectory"));
    Ok((c, side))
}

/// Bisection on the initial slope `ψ_t(t0)` for the stable manifold of the
/// zero equilibrium through `ψ(t0) = psi0`.
pub fn find_separatrix(
    e: &Exponents,
    t0: f64,
    psi0: f64,
    slope_bracket: (f64, f64),
    th: &Thresholds,
    cfg: &IntegratorConfig,
) -> Result<Separatrix> {
    let (lo, hi) = slope_bracket;
    let (c_lo, s_lo) = trial(e, t0, psi0, lo, th, cfg)?;
    let (c_hi, s_hi) = trial(e, t0, psi0, hi, th, cfg)?;
    let straddles = |a: Outcome, b: Outcome| {
        matches!(
            (a, b),
            (Outcome::HitsZero, Outcome::ConvergesToA) | (Outcome::ConvergesToA, Outcome::HitsZero)
        )
    };
    if !straddles(c_lo.outcome, c_hi.outcome) || s_lo == s_hi {
        return Err(Error::BracketInvalid {
            lo: c_lo.outcome.name().into(),
            hi: c_hi.outcome.name().into(),
        });
    }
    let (mut below, mut above) = if s_lo == Side::Below { (lo, hi) } else { (hi, lo) };
    let tol = 1e-12 * lo.abs().max(hi.abs());
    let mut iterations = 0;
    while (above - below).abs() > tol {
        let mid = 0.5 * (below + above);
        if mid == below || mid == above {
            break;
        }
        let (_, side) = trial(e, t0, psi0, mid, th, cfg)?;
        match side {
            Side::Below => below = mid,
            Side::Above => above = mid,
        }
        iterations += 1;
    }
    Ok(Separatrix {
        slope: 0.5 * (below + above),
        below,
        above,
        iterations,
        t0,
        psi0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifoldFit {
    pub rate: f64,
    /// Window `[from, to]` the fit used.
    pub window: (f64, f64),
    /// Where the two bracketing trajectories separate.
    pub split: f64,
}

/// Decay rate along the separatrix: both bracketing trajectories are
/// integrated, and `log ψ` is fitted where they still agree to `1e-3`
/// relative and the nonlinear term is below one percent of the linear one.
pub fn separatrix_decay_rate(
    e: &Exponents,
    sep: &Separatrix,
    cfg: &IntegratorConfig,
) -> Result<ManifoldFit> {
    let run = |slope: f64| {
        integrate_psi(
            PsiState {
                t: sep.t0,
                psi: sep.psi0,
                psi_t: slope,
            },
            sep.t0 + SEPARATRIX_HORIZON,
            e,
            cfg,
        )
    };
    let lo = run(sep.below)?;
    let hi = run(sep.above)?;
    let end = lo.last().unwrap().x.min(hi.last().unwrap().x);
    let h = 1e-3;
    let grid = hi.resample_uniform(sep.t0, end, h);
    let lc = limit_coefficients(e);
    let mut split = end;
    let mut pts = Vec::new();
    for s in &grid {
        let Some(v) = lo.interpolate(s.x) else { break };
        if !(s.y > 0.0 && v[0] > 0.0) || (s.y - v[0]).abs() > 1e-3 * s.y.abs() {
            split = s.x;
            break;
        }
        let z = if e.beta() == 0.0 { 1.0 } else { zeta(s.x, s.y, e).powf(e.beta()) };
        if z * s.y.powf(e.alpha() - 1.0) <= 1e-2 * lc.b0 {
            pts.push((s.x, s.y));
        }
    }
    if pts.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            found: pts.len(),
        });
    }
    let window = (pts[0].0, pts[pts.len() - 1].0);
    Ok(ManifoldFit {
        rate: fit_decay_rate(&pts)?,
        window,
        split,
    })
}

/// Stable-manifold trajectory on `[t0, t0 + horizon]` reaching `ψ(t0) ≈
/// psi0`, computed by integrating backwards from the eigendirection
/// `(1, λ₋)` at the far end. Samples are returned in increasing `t`.
pub fn stable_manifold_trajectory(
    e: &Exponents,
    t0: f64,
    psi0: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let lm = limit_coefficients(e).lambda_minus;
    let t_end = t0 + horizon;
    let psi_end = psi0 * (lm * horizon).exp();
    if !(psi_end > 1e-290) {
        return Err(Error::DomainError {
            what: "psi at the far end",
            value: psi_end,
            domain: "representable (> 1e-290)",
        });
    }
    let p = PsiState {
        t: t_end,
        psi: psi_end,
        psi_t: lm * psi_end,
    };
    let mut traj = integrate_psi(p, t0, e, cfg)?;
    traj.samples.reverse();
    Ok(traj)
}

/// Default slope bracket for separatrix searches: `[-5 max(A, ψ0), 0]`.
///
/// The set of slopes converging to `A` is an interval; steep positive
/// slopes overshoot, spiral and hit zero. The lower end of the interval is
/// the branch of the stable manifold of 0 approached with `ψ_t ≈ λ₋ψ`.
pub fn default_slope_bracket(e: &Exponents, psi0: f64) -> (f64, f64) {
    (-5.0 * constant_a(e).max(psi0), 0.0)
}
