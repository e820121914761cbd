use crate::error::{Error, Result};
use crate::params::Exponents;
use crate::transform::{PsiState, RadialState};

use super::{
    event_functions, psi_extended, radial_extended, Event, EventKind, Frame, IntegratorConfig,
    Quintic, Sample, Stats, Trajectory,
};

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// Difference between the 5th and embedded 4th order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const MAX_EVENT_BISECTIONS: usize = 200;

type State = [f64; 2];

fn axpy(y: &State, h: f64, coeffs: &[f64], k: &[State]) -> State {
    let mut out = *y;
    for (c, kk) in coeffs.iter().zip(k) {
        out[0] += h * c * kk[0];
        out[1] += h * c * kk[1];
    }
    out
}

struct System<'a> {
    frame: Frame,
    e: &'a Exponents,
    zeta_min: f64,
    evals: usize,
}

impl System<'_> {
    fn second(&self, x: f64, y: &State) -> f64 {
        match self.frame {
            Frame::EmdenFowler => psi_extended(x, y[0], y[1], self.e, self.zeta_min),
            Frame::Physical => radial_extended(x, y[0], y[1], self.e),
        }
    }

    fn f(&mut self, x: f64, y: &State) -> State {
        self.evals += 1;
        [y[1], self.second(x, y)]
    }
}

fn error_norm(err: &State, y0: &State, y1: &State, cfg: &IntegratorConfig) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        let scale = cfg.abs_tol + cfg.rel_tol * y0[i].abs().max(y1[i].abs());
        let v = (err[i] / scale).abs();
        if v.is_nan() {
            return f64::INFINITY;
        }
        m = m.max(v);
    }
    m
}

fn initial_step(
    sys: &mut System,
    x0: f64,
    y0: &State,
    f0: &State,
    dir: f64,
    span: f64,
    cfg: &IntegratorConfig,
) -> f64 {
    let scale = |y: &State, i: usize| cfg.abs_tol + cfg.rel_tol * y[i].abs();
    let norm = |v: &State, y: &State| {
        (0..2)
            .map(|i| (v[i] / scale(y, i)).powi(2))
            .sum::<f64>()
            .sqrt()
            / std::f64::consts::SQRT_2
    };
    let d0 = norm(y0, y0);
    let d1 = norm(f0, y0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span).min(cfg.max_step);
    let y1 = [y0[0] + dir * h0 * f0[0], y0[1] + dir * h0 * f0[1]];
    let f1 = sys.f(x0 + dir * h0, &y1);
    let diff = [f1[0] - f0[0], f1[1] - f0[1]];
    let d2 = norm(&diff, y0) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span).min(cfg.max_step)
}

/// Integrate the second-order radial equation in `frame` from
/// `(x0, y0, dy0)` to `x_end`, stopping early at the first event.
pub fn integrate(
    frame: Frame,
    initial: (f64, f64, f64),
    x_end: f64,
    e: &Exponents,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    let (x0, y0, dy0) = initial;
    if frame == Frame::EmdenFowler && !(x0 > 0.0 && x_end > 0.0) {
        return Err(Error::NonpositiveTime(x0.min(x_end)));
    }
    if frame == Frame::Physical && !(x0 > 0.0 && x0 < 1.0 && x_end > 0.0 && x_end < 1.0) {
        return Err(Error::DomainError {
            what: "r",
            value: if x0 > 0.0 && x0 < 1.0 { x_end } else { x0 },
            domain: "(0, 1)",
        });
    }

    let mut sys = System {
        frame,
        e,
        zeta_min: cfg.zeta_min,
        evals: 0,
    };
    let mut stats = Stats::default();
    let mut y: State = [y0, dy0];
    let mut k1 = sys.f(x0, &y);
    let mut samples = vec![Sample {
        x: x0,
        y: y[0],
        dy: y[1],
        ddy: k1[1],
    }];

    if let Some(kind) = first_triggered(&event_functions(frame, x0, y0, e, cfg)) {
        return Ok(Trajectory {
            frame,
            samples,
            events: vec![Event {
                kind,
                x: x0,
                bracket: (x0, x0),
            }],
            stats: Stats {
                rhs_evals: sys.evals,
                ..stats
            },
        });
    }

    let span = (x_end - x0).abs();
    let dir = if x_end >= x0 { 1.0 } else { -1.0 };
    // Physical-frame runs approach r = 0, where legitimate steps are far
    // below any fraction of the span; the floor follows |x| there.
    let min_step = |x: f64| (1e-14 * span).min(64.0 * f64::EPSILON * x.abs());
    let mut x = x0;
    let mut h = if span > 0.0 {
        initial_step(&mut sys, x0, &y, &k1, dir, span, cfg)
    } else {
        0.0
    };
    let mut events = Vec::new();
    let mut last_rejected = false;

    while dir * (x_end - x) > 0.0 {
        let remaining = (x_end - x).abs();
        let mut hs = h.min(cfg.max_step);
        let mut lands = false;
        if hs >= remaining * (1.0 - 1e-12) {
            hs = remaining;
            lands = true;
        }
        if hs < min_step(x) {
            return Err(Error::StepUnderflow { x, step: hs });
        }
        let step = dir * hs;

        let k2 = sys.f(x + C[1] * step, &axpy(&y, step, &A2, &[k1]));
        let k3 = sys.f(x + C[2] * step, &axpy(&y, step, &A3, &[k1, k2]));
        let k4 = sys.f(x + C[3] * step, &axpy(&y, step, &A4, &[k1, k2, k3]));
        let k5 = sys.f(x + C[4] * step, &axpy(&y, step, &A5, &[k1, k2, k3, k4]));
        let x_new = if lands { x_end } else { x + step };
        let k6 = sys.f(x_new, &axpy(&y, step, &A6, &[k1, k2, k3, k4, k5]));
        let y_new = axpy(&y, step, &B, &[k1, k2, k3, k4, k5, k6]);
        let k7 = sys.f(x_new, &y_new);
        let ks = [k1, k2, k3, k4, k5, k6, k7];
        let mut err = [0.0; 2];
        for (c, k) in E.iter().zip(&ks) {
            err[0] += step * c * k[0];
            err[1] += step * c * k[1];
        }
        let en = error_norm(&err, &y, &y_new, cfg);

        if en > 1.0 {
            stats.rejected += 1;
            let factor = if en.is_finite() {
                (SAFETY * en.powf(-0.2)).max(MIN_FACTOR)
            } else {
                MIN_FACTOR
            };
            h = hs * factor;
            last_rejected = true;
            continue;
        }

        stats.accepted += 1;
        let prev = *samples.last().expect("at least the initial sample");
        let next = Sample {
            x: x_new,
            y: y_new[0],
            dy: y_new[1],
            ddy: k7[1],
        };

        if let Some((kind, lo, hi)) = locate_event(frame, &prev, &next, e, cfg) {
            let q = Quintic::new(prev.x, [prev.y, prev.dy, prev.ddy], next.x, [next.y, next.dy, next.ddy]);
            let [ye, dye, ddye] = q.eval(hi);
            samples.push(Sample {
                x: hi,
                y: ye,
                dy: dye,
                ddy: ddye,
            });
            events.push(Event {
                kind,
                x: hi,
                bracket: (lo, hi),
            });
            break;
        }

        samples.push(next);
        if samples.len() > cfg.max_samples {
            return Err(Error::SampleBudgetExceeded(cfg.max_samples));
        }
        x = x_new;
        y = y_new;
        k1 = k7;

        let mut factor = if en > 0.0 {
            (SAFETY * en.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
        } else {
            MAX_FACTOR
        };
        if last_rejected {
            factor = factor.min(1.0);
        }
        last_rejected = false;
        h = hs * factor;
    }

    stats.rhs_evals = sys.evals;
    Ok(Trajectory {
        frame,
        samples,
        events,
        stats,
    })
}

fn first_triggered(g: &[f64; 3]) -> Option<EventKind> {
    [EventKind::HitsZero, EventKind::BlowUp, EventKind::ZetaGuard]
        .into_iter()
        .zip(g)
        .find(|(_, v)| !(**v > 0.0))
        .map(|(k, _)| k)
}

/// Earliest event crossing inside the step `prev → next`, localized on the
/// dense output to adjacent floating-point values. Near `r = 0` the state
/// can change by more than the event threshold across a `1e-8` bracket, so
/// a fixed width is not enough.
fn locate_event(
    frame: Frame,
    prev: &Sample,
    next: &Sample,
    e: &Exponents,
    cfg: &IntegratorConfig,
) -> Option<(EventKind, f64, f64)> {
    let g_next = event_functions(frame, next.x, next.y, e, cfg);
    first_triggered(&g_next)?;

    let q = Quintic::new(
        prev.x,
        [prev.y, prev.dy, prev.ddy],
        next.x,
        [next.y, next.dy, next.ddy],
    );
    let mut best: Option<(EventKind, f64, f64)> = None;
    let kinds = [EventKind::HitsZero, EventKind::BlowUp, EventKind::ZetaGuard];
    for (idx, kind) in kinds.into_iter().enumerate() {
        if g_next[idx] > 0.0 {
            continue;
        }
        let g = |x: f64| event_functions(frame, x, q.eval(x)[0], e, cfg)[idx];
        let (mut lo, mut hi) = (prev.x, next.x);
        for _ in 0..MAX_EVENT_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let earlier = match best {
            None => true,
            Some((_, _, b)) => (hi - prev.x).abs() < (b - prev.x).abs(),
        };
        if earlier {
            best = Some((kind, lo, hi));
        }
    }
    best
}

/// Emden–Fowler integration from `p` to `t_end` (either direction).
pub fn integrate_psi(
    p: PsiState,
    t_end: f64,
    e: &Exponents,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    integrate(Frame::EmdenFowler, (p.t, p.psi, p.psi_t), t_end, e, cfg)
}

/// Physical-frame integration from `s` to `r_end`.
pub fn integrate_radial(
    s: RadialState,
    r_end: f64,
    e: &Exponents,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    integrate(Frame::Physical, (s.r, s.u, s.u_r), r_end, e, cfg)
}
