//! Adaptive integration of the radial equation in the physical frame
//! `(r, u, u_r)` and the Emden–Fowler frame `(t, ψ, ψ_t)`.
//!
//! The stepper is the Dormand–Prince 5(4) pair with a mixed absolute and
//! relative error norm. Every accepted step stores value, first and second
//! derivative, so a [`Trajectory`] carries a C² quintic Hermite dense output
//! that the classifier and the verification code resample freely.
//! Integration stops at the first regime event (see [`EventKind`]); the
//! crossing is localized on the dense output.

mod dense;
mod dopri;
mod rhs;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{constant_a, Exponents};
use crate::transform::{from_psi_state, to_psi_state, PsiState, RadialState};

pub(crate) use dense::Quintic;
pub use dopri::{integrate, integrate_psi, integrate_radial};
pub use rhs::{rhs_psi, rhs_radial_u};
pub(crate) use rhs::{psi_extended, psi_source, radial_extended, radial_source};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// Independent variable `r`, state `u`.
    Physical,
    /// Independent variable `t = -log r`, state `ψ`.
    EmdenFowler,
}

impl Frame {
    pub fn name(self) -> &'static str {
        match self {
            Frame::Physical => "physical",
            Frame::EmdenFowler => "emden_fowler",
        }
    }

    fn columns(self) -> &'static str {
        match self {
            Frame::Physical => "r,u,u_r,u_rr",
            Frame::EmdenFowler => "t,psi,psi_t,psi_tt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// `ψ ≤ 0` (Emden–Fowler) or `u ≤ e` (physical).
    HitsZero,
    /// `ψ ≥ psi_max`.
    BlowUp,
    /// `ζ < zeta_min`; only armed when `β ≠ 0`.
    ZetaGuard,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    /// Location where the event condition first holds.
    pub x: f64,
    /// Last point where it did not hold, and `x`.
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// One stored point: independent variable, state, and its first two
/// derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: f64,
    pub y: f64,
    pub dy: f64,
    pub ddy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest step in the independent variable.
    pub max_step: f64,
    pub max_samples: usize,
    pub zeta_min: f64,
    pub psi_max: f64,
}

impl IntegratorConfig {
    pub fn for_exponents(e: &Exponents) -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 1.0,
            max_samples: 2_000_000,
            zeta_min: 0.1 * e.zeta0(),
            psi_max: 1e3 * constant_a(e),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_step", self.max_step),
            ("zeta_min", self.zeta_min),
            ("psi_max", self.psi_max),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.rel_tol < 1e-14 {
            return Err(Error::InvalidConfig(format!(
                "rel_tol must be at least 1e-14, got {}",
                self.rel_tol
            )));
        }
        if self.max_samples < 2 {
            return Err(Error::InvalidConfig("max_samples must be at least 2".into()));
        }
        Ok(())
    }
}

/// Default starting time `max(5, 2|β|/(α-1))`.
pub fn default_t0(e: &Exponents) -> f64 {
    5f64.max(2.0 * e.beta().abs() / (e.alpha() - 1.0))
}

/// Sampled solution in one frame, monotone in the independent variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub frame: Frame,
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
    pub stats: Stats,
}

impl Trajectory {
    pub fn from_samples(frame: Frame, samples: Vec<Sample>) -> Self {
        Trajectory {
            frame,
            samples,
            events: Vec::new(),
            stats: Stats::default(),
        }
    }

    pub fn first(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn event(&self) -> Option<&Event> {
        self.events.first()
    }

    /// Whether the independent variable increases along the samples.
    pub fn is_increasing(&self) -> bool {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.x >= a.x,
            _ => true,
        }
    }

    /// Smallest and largest independent variable covered.
    pub fn range(&self) -> Option<(f64, f64)> {
        let a = self.samples.first()?.x;
        let b = self.samples.last()?.x;
        Some((a.min(b), a.max(b)))
    }

    /// Index `i` such that `x` lies in the segment between samples `i` and
    /// `i + 1`.
    fn segment(&self, x: f64) -> Option<usize> {
        let n = self.samples.len();
        if n < 2 {
            return None;
        }
        let (lo, hi) = self.range()?;
        if x < lo || x > hi {
            return None;
        }
        let idx = if self.is_increasing() {
            self.samples.partition_point(|s| s.x <= x)
        } else {
            self.samples.partition_point(|s| s.x >= x)
        };
        Some(idx.clamp(1, n - 1) - 1)
    }

    pub(crate) fn segment_interpolant(&self, i: usize) -> Quintic {
        let a = &self.samples[i];
        let b = &self.samples[i + 1];
        Quintic::new(a.x, [a.y, a.dy, a.ddy], b.x, [b.y, b.dy, b.ddy])
    }

    /// Dense output `(y, y', y'')` at `x`, or `None` outside the range.
    pub fn interpolate(&self, x: f64) -> Option<[f64; 3]> {
        if self.samples.len() == 1 {
            let s = self.samples[0];
            return (s.x == x).then_some([s.y, s.dy, s.ddy]);
        }
        let i = self.segment(x)?;
        Some(self.segment_interpolant(i).eval(x))
    }

    /// Dense output on the grid `from, from + h, …` up to `to`.
    pub fn resample_uniform(&self, from: f64, to: f64, h: f64) -> Vec<Sample> {
        let mut out = Vec::new();
        if !(h > 0.0) || self.samples.len() < 2 {
            return out;
        }
        let steps = ((to - from) / h).floor() as usize;
        let increasing = self.is_increasing();
        let mut seg = 0usize;
        let last = self.samples.len() - 2;
        for k in 0..=steps {
            let x = from + k as f64 * h;
            // Walk forward instead of searching; the grid is monotone.
            if increasing {
                while seg < last && self.samples[seg + 1].x < x {
                    seg += 1;
                }
            } else {
                match self.segment(x) {
                    Some(i) => seg = i,
                    None => continue,
                }
            }
            let (lo, hi) = (self.samples[seg].x, self.samples[seg + 1].x);
            if x < lo.min(hi) || x > lo.max(hi) {
                continue;
            }
            let [y, dy, ddy] = self.segment_interpolant(seg).eval(x);
            out.push(Sample { x, y, dy, ddy });
        }
        out
    }

    /// Copy with extra dense-output samples inserted so that linear
    /// interpolation between consecutive samples errs by at most
    /// `10 (abs_tol + rel_tol |y|)`.
    pub fn densified(&self, rel_tol: f64, abs_tol: f64) -> Trajectory {
        let mut samples = Vec::with_capacity(self.samples.len());
        for (i, w) in self.samples.windows(2).enumerate() {
            samples.push(w[0]);
            let q = self.segment_interpolant(i);
            let h = w[1].x - w[0].x;
            let mut curvature: f64 = 0.0;
            let mut scale = f64::INFINITY;
            for k in 0..=8 {
                let v = q.eval(w[0].x + h * k as f64 / 8.0);
                curvature = curvature.max(v[2].abs());
                scale = scale.min(v[0].abs());
            }
            let tol = 10.0 * (abs_tol + rel_tol * scale);
            // |error| ≤ h_sub² max|y''| / 8, with a factor 2 of margin.
            let h_sub = (4.0 * tol / curvature.max(f64::MIN_POSITIVE)).sqrt();
            let m = (h.abs() / h_sub).ceil().max(1.0) as usize;
            for k in 1..m {
                let x = w[0].x + h * k as f64 / m as f64;
                let [y, dy, ddy] = q.eval(x);
                samples.push(Sample { x, y, dy, ddy });
            }
        }
        if let Some(s) = self.samples.last() {
            samples.push(*s);
        }
        Trajectory {
            frame: self.frame,
            samples,
            events: self.events.clone(),
            stats: self.stats,
        }
    }

    /// Emden–Fowler view of a physical trajectory (samples reordered so that
    /// `t` increases).
    pub fn to_emden_fowler(&self, e: &Exponents, cfg: &IntegratorConfig) -> Result<Trajectory> {
        match self.frame {
            Frame::EmdenFowler => Ok(self.clone()),
            Frame::Physical => {
                let mut samples = Vec::with_capacity(self.samples.len());
                for s in &self.samples {
                    let p = to_psi_state(
                        RadialState {
                            r: s.x,
                            u: s.y,
                            u_r: s.dy,
                        },
                        e,
                    )?;
                    let ddy = psi_extended(p.t, p.psi, p.psi_t, e, cfg.zeta_min);
                    samples.push(Sample {
                        x: p.t,
                        y: p.psi,
                        dy: p.psi_t,
                        ddy,
                    });
                }
                if !samples.is_empty() && samples[0].x > samples[samples.len() - 1].x {
                    samples.reverse();
                }
                let events = self
                    .events
                    .iter()
                    .map(|ev| Event {
                        kind: ev.kind,
                        x: -ev.x.ln(),
                        bracket: (-ev.bracket.0.ln(), -ev.bracket.1.ln()),
                    })
                    .collect();
                Ok(Trajectory {
                    frame: Frame::EmdenFowler,
                    samples,
                    events,
                    stats: self.stats,
                })
            }
        }
    }

    /// Physical view of an Emden–Fowler trajectory (samples ordered by
    /// decreasing `r`). Fails where `ψ ≤ 0` or `u` overflows.
    pub fn to_physical(&self, e: &Exponents) -> Result<Trajectory> {
        match self.frame {
            Frame::Physical => Ok(self.clone()),
            Frame::EmdenFowler => {
                let mut samples = Vec::with_capacity(self.samples.len());
                for s in &self.samples {
                    let p = from_psi_state(
                        PsiState {
                            t: s.x,
                            psi: s.y,
                            psi_t: s.dy,
                        },
                        e,
                    )?;
                    if !p.u.is_finite() || !p.u_r.is_finite() {
                        return Err(Error::DomainError {
                            what: "u",
                            value: p.u,
                            domain: "finite f64",
                        });
                    }
                    samples.push(Sample {
                        x: p.r,
                        y: p.u,
                        dy: p.u_r,
                        ddy: radial_extended(p.r, p.u, p.u_r, e),
                    });
                }
                if !samples.is_empty() && samples[0].x < samples[samples.len() - 1].x {
                    samples.reverse();
                }
                let events = self
                    .events
                    .iter()
                    .map(|ev| Event {
                        kind: ev.kind,
                        x: (-ev.x).exp(),
                        bracket: ((-ev.bracket.0).exp(), (-ev.bracket.1).exp()),
                    })
                    .collect();
                Ok(Trajectory {
                    frame: Frame::Physical,
                    samples,
                    events,
                    stats: self.stats,
                })
            }
        }
    }

    /// CSV with one header row and 17 significant digits per value.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.frame.columns())?;
        for s in &self.samples {
            writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", s.x, s.y, s.dy, s.ddy)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

/// Event check for a single state, returning the first triggered kind in
/// the order `HitsZero`, `BlowUp`, `ZetaGuard`.
pub fn detect_event(
    frame: Frame,
    x: f64,
    y: f64,
    e: &Exponents,
    cfg: &IntegratorConfig,
) -> Option<EventKind> {
    let g = event_functions(frame, x, y, e, cfg);
    [EventKind::HitsZero, EventKind::BlowUp, EventKind::ZetaGuard]
        .into_iter()
        .zip(g)
        .find(|(_, v)| !(*v > 0.0))
        .map(|(k, _)| k)
}

/// Event functions in the order `HitsZero`, `BlowUp`, `ZetaGuard`; an
/// event holds where its function is `≤ 0` (or NaN).
pub(crate) fn event_functions(
    frame: Frame,
    x: f64,
    y: f64,
    e: &Exponents,
    cfg: &IntegratorConfig,
) -> [f64; 3] {
    match frame {
        Frame::EmdenFowler => {
            let zero = y;
            let blow = cfg.psi_max - y;
            let guard = if e.beta() == 0.0 {
                f64::INFINITY
            } else if y > 0.0 {
                crate::transform::zeta(x, y, e) - cfg.zeta_min
            } else {
                f64::NEG_INFINITY
            };
            [zero, blow, guard]
        }
        Frame::Physical => {
            let zero = y - std::f64::consts::E;
            let t = -x.ln();
            let psi = crate::params::phi_at_time(t, e) * y;
            let blow = cfg.psi_max - psi;
            let guard = if e.beta() == 0.0 {
                f64::INFINITY
            } else if y > 0.0 {
                y.ln() / t - cfg.zeta_min
            } else {
                f64::NEG_INFINITY
            };
            [zero, blow, guard]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(n: u32, a: f64, b: f64) -> Exponents {
        Exponents::new(n, a, b).unwrap()
    }

    #[test]
    fn event_examples() {
        let e = ex(5, 2.0, 0.0);
        let cfg = IntegratorConfig::for_exponents(&e);
        assert_eq!(
            detect_event(Frame::EmdenFowler, 6.0, -0.001, &e, &cfg),
            Some(EventKind::HitsZero)
        );
        assert_eq!(
            detect_event(Frame::EmdenFowler, 6.0, 1e4 * 2.0, &e, &cfg),
            Some(EventKind::BlowUp)
        );
        assert_eq!(detect_event(Frame::EmdenFowler, 6.0, 1.0, &e, &cfg), None);

        let e1 = ex(5, 2.0, 1.0);
        let cfg1 = IntegratorConfig::for_exponents(&e1);
        assert_eq!(cfg1.zeta_min, 0.2);
        assert_eq!(
            detect_event(Frame::EmdenFowler, 2.0, (-3f64).exp(), &e1, &cfg1),
            Some(EventKind::ZetaGuard)
        );
        assert_eq!(
            detect_event(Frame::Physical, 0.1, 2.0, &e1, &cfg1),
            Some(EventKind::HitsZero)
        );
    }

    #[test]
    fn default_start_time() {
        assert_eq!(default_t0(&ex(5, 2.0, 0.0)), 5.0);
        assert_eq!(default_t0(&ex(5, 2.0, -4.0)), 8.0);
    }

    #[test]
    fn config_validation() {
        let e = ex(5, 2.0, 0.0);
        let mut cfg = IntegratorConfig::for_exponents(&e);
        assert!(cfg.validate().is_ok());
        cfg.rel_tol = 1e-16;
        assert!(cfg.validate().is_err());
        cfg.rel_tol = 1e-8;
        cfg.abs_tol = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn csv_has_header_and_full_precision() {
        let t = Trajectory::from_samples(
            Frame::EmdenFowler,
            vec![Sample {
                x: 5.0,
                y: 0.1,
                dy: -1.0 / 3.0,
                ddy: 0.0,
            }],
        );
        let csv = t.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,psi,psi_t,psi_tt"));
        let row: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        assert_eq!(row, vec![5.0, 0.1, -1.0 / 3.0, 0.0]);
    }
}
