//! Desk-scale invariant suite behind `radsing verify`: one check per
//! acceptance property, each reporting a measured value against a fixed
//! tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifier::{
    classify, default_slope_bracket, find_separatrix, separatrix_decay_rate,
    stable_manifold_trajectory, Outcome, Thresholds,
};
use crate::error::Result;
use crate::ode::{default_t0, integrate_psi, integrate_radial, IntegratorConfig};
use crate::params::{admissible_alpha, constant_a, lambert_w, limit_coefficients, Exponents};
use crate::transform::{
    exact_profile, exact_profile_derivative, exact_profile_second_derivative, from_psi_state,
    PsiState, RadialState,
};

use super::sweep::{run_sweep, SweepConfig, SweepReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn new(id: &str, name: &str, measured: f64, tolerance: f64, detail: String) -> Self {
        CheckResult {
            id: id.into(),
            name: name.into(),
            passed: measured <= tolerance,
            measured,
            tolerance,
            detail,
        }
    }

    /// One table row: `PASS  4   dichotomy ...`.
    pub fn line(&self) -> String {
        format!(
            "{}  {:<3} {:<26} measured {:<11.4e} tolerance {:<9.2e} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.tolerance,
            self.detail
        )
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn random_exponents(rng: &mut ChaCha8Rng, n_max: u32, beta_max: f64) -> Exponents {
    let n = rng.gen_range(3..=n_max);
    let (lo, hi) = admissible_alpha(n).expect("n >= 3");
    let alpha = lo + (hi - lo) * rng.gen_range(0.02..0.98);
    let beta = rng.gen_range(-beta_max..=beta_max);
    Exponents::new(n, alpha, beta).expect("interior point is admissible")
}

/// Closed-form identities over `count` random exponents: the quadratic
/// relations of the limit coefficients and the stationarity of `A`.
pub fn closed_form(seed: u64, count: usize) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let e = random_exponents(&mut rng, 10, 3.0);
        let c = limit_coefficients(&e);
        let nm2 = e.dim() - 2.0;
        let id1 = (c.a0 * c.a0 + 4.0 * c.b0 - nm2 * nm2).abs() / (nm2 * nm2);
        let id2 = rel(c.lambda_minus, -2.0 / (e.alpha() - 1.0));
        let stat = c.b0 * c.a - c.zeta0.powf(e.beta()) * c.a.powf(e.alpha());
        let id3 = stat.abs() / (c.b0 * c.a);
        worst = worst.max(id1).max(id2).max(id3);
    }
    CheckResult::new(
        "1",
        "closed-form identities",
        worst,
        1e-12,
        format!("{count} random (n, alpha, beta)"),
    )
}

/// Lambert W residual and sandwich bounds on log-spaced `s ∈ [e, 1e30]`.
pub fn lambert(count: usize) -> CheckResult {
    let (l0, l1) = (1.0f64, 30.0 * std::f64::consts::LN_10);
    let mut worst: f64 = 0.0;
    let mut sandwich = 0usize;
    for i in 0..count {
        let s = (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp();
        let w = lambert_w(s).unwrap_or(f64::NAN);
        worst = worst.max((w * w.exp() - s).abs() / s.max(1.0));
        let ls = s.ln();
        if !(ls - ls.ln() <= w && w <= ls) {
            sandwich += 1;
        }
    }
    let mut r = CheckResult::new(
        "2",
        "Lambert W",
        worst,
        1e-13,
        format!("{count} points, {sandwich} sandwich violations"),
    );
    r.passed &= sandwich == 0;
    r
}

/// Exact solution, Emden–Fowler frame: start at `(A, 0)` for `(5, 2, 0)`
/// and stay within `1e-8` for 100 units.
pub fn exact_solution_ef() -> CheckResult {
    let e = Exponents::new(5, 2.0, 0.0).expect("admissible");
    let cfg = IntegratorConfig::for_exponents(&e);
    let p = PsiState {
        t: 5.0,
        psi: 2.0,
        psi_t: 0.0,
    };
    let worst = match integrate_psi(p, 105.0, &e, &cfg) {
        Ok(tr) => tr
            .samples
            .iter()
            .map(|s| (s.y - 2.0).abs())
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    CheckResult::new(
        "3a",
        "exact solution (psi frame)",
        worst,
        1e-8,
        "max |psi - 2| over t in [5, 105]".into(),
    )
}

/// Exact solution, physical frame: the radial residual of the profile
/// relative to `u^α`, and a physical-frame integration started on the
/// profile compared with it.
pub fn exact_solution_radial() -> CheckResult {
    let e = Exponents::new(5, 2.0, 0.0).expect("admissible");
    let mut worst: f64 = 0.0;
    for i in 0..=40 {
        let r = (-(1.0 + 0.5 * i as f64)).exp();
        let u = exact_profile(r, &e).unwrap_or(f64::NAN);
        let up = exact_profile_derivative(r, &e).unwrap_or(f64::NAN);
        let upp = exact_profile_second_derivative(r, &e).unwrap_or(f64::NAN);
        let res = upp + 4.0 / r * up + u * u;
        worst = worst.max(res.abs() / (u * u));
    }
    let cfg = IntegratorConfig::for_exponents(&e);
    let r0 = (-5f64).exp();
    let s = RadialState {
        r: r0,
        u: exact_profile(r0, &e).unwrap_or(f64::NAN),
        u_r: exact_profile_derivative(r0, &e).unwrap_or(f64::NAN),
    };
    match integrate_radial(s, (-25f64).exp(), &e, &cfg) {
        Ok(tr) => {
            for p in &tr.samples {
                let u = exact_profile(p.x, &e).unwrap_or(f64::NAN);
                worst = worst.max(rel(p.y, u));
            }
        }
        Err(_) => worst = f64::INFINITY,
    }
    CheckResult::new(
        "3b",
        "exact solution (radial)",
        worst,
        1e-8,
        "residual / u^alpha and |u/u_exact - 1| for r in [e^-25, e^-1]".into(),
    )
}

/// Dichotomy reproduction over a sweep report: no `Undetermined`, no
/// errors, and every tail within its tolerance.
pub fn dichotomy(report: &SweepReport) -> CheckResult {
    let t = &report.totals;
    let unresolved = t.undetermined + t.errors;
    let mut worst_ratio: f64 = 0.0;
    let mut bad_cells = Vec::new();
    for c in &report.cells {
        if c.error.is_some() {
            bad_cells.push(format!("n={} alpha={:.4} beta={}: error", c.n, c.alpha, c.beta));
            continue;
        }
        let tol = if c.beta == 0.0 { 1e-3 } else { 5e-2 };
        if let Some(d) = c.worst_tail_deviation {
            worst_ratio = worst_ratio.max(d / tol);
        }
        if c.tally.undetermined + c.tally.errors > 0 {
            bad_cells.push(format!(
                "n={} alpha={:.4} beta={}: {} undetermined",
                c.n,
                c.alpha,
                c.beta,
                c.tally.undetermined + c.tally.errors
            ));
        }
    }
    let mut r = CheckResult::new(
        "4",
        "dichotomy reproduction",
        unresolved as f64,
        0.0,
        format!(
            "{} trajectories: {} to A, {} decay, {} hit zero, {} blow up; worst tail/tol {:.3}{}",
            t.total(),
            t.converges_to_a,
            t.decays_to_zero,
            t.hits_zero,
            t.blow_up,
            worst_ratio,
            if bad_cells.is_empty() {
                String::new()
            } else {
                format!("; failing cells: {}", bad_cells.join(", "))
            }
        ),
    );
    r.passed &= worst_ratio <= 1.0;
    r
}

/// Removable-branch decay rate on every `β = 0` cell: the separatrix found
/// by bisection and the backward-integrated stable manifold both decay
/// like `e^{λ₋ t}`.
pub fn removable_rate(cfg: &SweepConfig) -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for c in cfg.cell_list().into_iter().filter(|c| c.beta == 0.0) {
        let Ok(e) = Exponents::new(c.n, c.alpha, c.beta) else {
            continue;
        };
        match removable_rate_cell(&e) {
            Ok((sep, man)) => worst = worst.max(sep).max(man),
            Err(err) => {
                worst = f64::INFINITY;
                notes.push(format!("n={} alpha={:.4}: {err}", c.n, c.alpha));
            }
        }
    }
    CheckResult::new(
        "5",
        "removable-branch rate",
        worst,
        2e-2,
        if notes.is_empty() {
            "relative error of fitted log-slope vs -2/(alpha-1)".into()
        } else {
            notes.join("; ")
        },
    )
}

/// Relative rate errors `(separatrix, stable manifold)` for one cell.
pub fn removable_rate_cell(e: &Exponents) -> Result<(f64, f64)> {
    let lm = limit_coefficients(e).lambda_minus;
    let a = constant_a(e);
    let t0 = default_t0(e);
    let psi0 = 0.25 * a;
    let cfg = IntegratorConfig::for_exponents(e);
    let th = Thresholds::for_exponents(e);
    let sep = find_separatrix(e, t0, psi0, default_slope_bracket(e, psi0), &th, &cfg)?;
    let fit = separatrix_decay_rate(e, &sep, &cfg)?;

    let mut tight = cfg;
    tight.abs_tol = 1e-300;
    let man = stable_manifold_trajectory(e, t0, psi0, 60.0, &tight)?;
    let class = classify(&man, e, &th)?;
    let man_err = match (class.outcome, class.fitted_rate) {
        (Outcome::DecaysToZero, Some(rate)) => rel(rate, lm),
        _ => f64::INFINITY,
    };
    Ok((rel(fit.rate, lm), man_err))
}

/// Physical- and Emden–Fowler-frame integrations of the same data agree to
/// `50 rel_tol` on their common range.
pub fn frame_equivalence(seed: u64, count: usize) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut tol = 0.0;
    for _ in 0..count {
        let e = random_exponents(&mut rng, 6, 2.0);
        let a = constant_a(&e);
        let p = PsiState {
            t: default_t0(&e),
            psi: a * rng.gen_range(0.5..1.5),
            psi_t: a * rng.gen_range(-0.2..0.2),
        };
        let cfg = IntegratorConfig::for_exponents(&e);
        tol = 50.0 * cfg.rel_tol;
        worst = worst.max(frame_gap(&e, p, 10.0, &cfg).unwrap_or(f64::INFINITY));
    }
    CheckResult::new(
        "6",
        "frame equivalence",
        worst,
        tol,
        format!("{count} random cases over 10 t-units, sup |dpsi| / sup |psi|"),
    )
}

/// `sup |ψ_phys - ψ_ef| / sup |ψ_ef|` over the common range of the two
/// integrations of `p` over `length` units of `t`.
pub fn frame_gap(e: &Exponents, p: PsiState, length: f64, cfg: &IntegratorConfig) -> Result<f64> {
    let ef = integrate_psi(p, p.t + length, e, cfg)?;
    let s = from_psi_state(p, e)?;
    let phys = integrate_radial(s, (-(p.t + length)).exp(), e, cfg)?.to_emden_fowler(e, cfg)?;
    let mut gap: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for q in &phys.samples {
        if let Some(v) = ef.interpolate(q.x) {
            gap = gap.max((q.y - v[0]).abs());
            scale = scale.max(v[0].abs());
        }
    }
    Ok(gap / scale)
}

/// Trajectory checks aggregated over a sweep: flux defect, ψ-equation
/// residual and derivative tails.
pub fn trajectory_checks(report: &SweepReport) -> Vec<CheckResult> {
    let mut flux: f64 = 0.0;
    let mut res: f64 = 0.0;
    let mut deriv: f64 = 0.0;
    let mut worst = String::new();
    let mut verified = 0;
    let mut skipped = 0;
    for c in &report.cells {
        let Some(v) = &c.verification else {
            continue;
        };
        verified += v.verified;
        skipped += v.skipped;
        flux = flux.max(v.max_flux_defect);
        res = res.max(v.max_psi_residual);
        let d = v.max_derivative_tail.0.max(v.max_derivative_tail.1);
        if d > deriv {
            deriv = d;
            worst = format!("n={} alpha={:.4} beta={}", c.n, c.alpha, c.beta);
        }
    }
    let detail = format!("{verified} trajectories checked, {skipped} too short");
    vec![
        CheckResult::new("7a", "flux identity", flux, 1e-6, detail.clone()),
        CheckResult::new("7b", "psi-equation residual", res, 1e-5, detail.clone()),
        CheckResult::new(
            "7c",
            "derivative limits",
            deriv,
            1e-4,
            format!("max(|psi'|, |psi''|) over the final window; worst cell {worst}"),
        ),
    ]
}

/// Two runs of the same sweep on different thread counts give identical
/// JSON.
pub fn determinism(cfg: &SweepConfig, jobs: (usize, usize)) -> CheckResult {
    let run = |j| {
        let c = SweepConfig {
            jobs: Some(j),
            ..cfg.clone()
        };
        run_sweep(&c).map(|r| r.to_json())
    };
    let same = match (run(jobs.0), run(jobs.1)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    };
    CheckResult::new(
        "8",
        "determinism",
        if same { 0.0 } else { 1.0 },
        0.0,
        format!(
            "jobs {} vs {}, ensemble {}",
            jobs.0, jobs.1, cfg.ensemble
        ),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteGrid {
    /// Full default grid with 100 states per cell.
    Default,
    /// Default grid with 10 states per cell.
    Quick,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

pub fn run_suite(grid: SuiteGrid, seed: u64, jobs: Option<usize>) -> Result<SuiteReport> {
    let sweep = SweepConfig {
        ensemble: match grid {
            SuiteGrid::Default => 100,
            SuiteGrid::Quick => 10,
        },
        seed,
        jobs,
        ..SweepConfig::default()
    };
    let report = run_sweep(&sweep)?;
    let mut checks = vec![
        closed_form(seed, 1000),
        lambert(1000),
        exact_solution_ef(),
        exact_solution_radial(),
        dichotomy(&report),
        removable_rate(&sweep),
        frame_equivalence(seed, 20),
    ];
    checks.extend(trajectory_checks(&report));
    let small = SweepConfig {
        ensemble: 10,
        ..sweep.clone()
    };
    checks.push(determinism(&small, (1, 4)));
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteReport { checks, passed })
}
