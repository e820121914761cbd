//! Parameter sweeps: random initial states per `(n, α, β)` cell,
//! integrated, classified and verified, aggregated into a deterministic
//! report.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{classify, Outcome, Thresholds};
use crate::error::{Error, Result};
use crate::ode::{default_t0, integrate_psi, IntegratorConfig, Trajectory};
use crate::params::{admissible_alpha, constant_a, validate_exponents, Exponents};
use crate::transform::PsiState;

use super::{verify_trajectory, VerifyTolerances};

/// Product grid; `alpha_fractions` place `α` inside the admissible interval
/// of each `n` (`0` is the lower end, `1` the upper).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: Vec<u32>,
    pub alpha_fractions: Vec<f64>,
    pub beta: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n: vec![3, 4, 5, 6],
            alpha_fractions: vec![0.25, 0.5, 0.75],
            beta: vec![-2.0, -1.0, 0.0, 1.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub n: u32,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Product grid, used unless `cells` is given.
    pub grid: GridSpec,
    /// Explicit cells; replaces `grid` when present.
    pub cells: Option<Vec<CellSpec>>,
    /// Initial states per cell.
    pub ensemble: usize,
    pub seed: u64,
    /// Integration length past `t0`.
    pub horizon: f64,
    /// Starting time; `max(5, 2|β|/(α-1))` per cell when absent.
    pub t0: Option<f64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub conv_tol: Option<f64>,
    pub zero_tol: Option<f64>,
    pub tail_fraction: Option<f64>,
    pub fit_window: Option<f64>,
    /// Run the trajectory checks on every trajectory.
    pub verify: bool,
    /// Write one CSV per trajectory into this directory.
    pub csv_dir: Option<PathBuf>,
    /// Worker threads; does not affect the report.
    pub jobs: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            grid: GridSpec::default(),
            cells: None,
            ensemble: 100,
            seed: 0,
            horizon: 300.0,
            t0: None,
            rel_tol: None,
            abs_tol: None,
            conv_tol: None,
            zero_tol: None,
            tail_fraction: None,
            fit_window: None,
            verify: true,
            csv_dir: None,
            jobs: None,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if let Some(t0) = self.t0 {
            if !(t0 > 0.0) {
                return Err(Error::NonpositiveTime(t0));
            }
        }
        if self.jobs == Some(0) {
            return Err(Error::InvalidConfig("jobs must be at least 1".into()));
        }
        if self.grid.alpha_fractions.iter().any(|f| !(*f > 0.0 && *f < 1.0)) {
            return Err(Error::InvalidConfig("alpha_fractions must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Cells in report order.
    pub fn cell_list(&self) -> Vec<CellSpec> {
        if let Some(c) = &self.cells {
            return c.clone();
        }
        let g = &self.grid;
        let mut out = Vec::new();
        for &n in &g.n {
            for &f in &g.alpha_fractions {
                let alpha = match admissible_alpha(n) {
                    Some((lo, hi)) => lo + f * (hi - lo),
                    None => f64::NAN,
                };
                for &beta in &g.beta {
                    out.push(CellSpec { n, alpha, beta });
                }
            }
        }
        out
    }

    pub fn integrator(&self, e: &Exponents) -> IntegratorConfig {
        let mut c = IntegratorConfig::for_exponents(e);
        if let Some(v) = self.rel_tol {
            c.rel_tol = v;
        }
        if let Some(v) = self.abs_tol {
            c.abs_tol = v;
        }
        c
    }

    pub fn thresholds(&self, e: &Exponents) -> Thresholds {
        let mut t = Thresholds::for_exponents(e);
        if let Some(v) = self.conv_tol {
            t.conv_tol = v;
        }
        if let Some(v) = self.zero_tol {
            t.zero_tol = v;
        }
        if let Some(v) = self.tail_fraction {
            t.tail_fraction = v;
        }
        if let Some(v) = self.fit_window {
            t.fit_window = v;
        }
        t
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub converges_to_a: usize,
    pub decays_to_zero: usize,
    pub hits_zero: usize,
    pub blow_up: usize,
    pub undetermined: usize,
    pub errors: usize,
}

impl Tally {
    fn add_outcome(&mut self, o: Outcome) {
        match o {
            Outcome::ConvergesToA => self.converges_to_a += 1,
            Outcome::DecaysToZero => self.decays_to_zero += 1,
            Outcome::HitsZero => self.hits_zero += 1,
            Outcome::BlowUp => self.blow_up += 1,
            Outcome::Undetermined => self.undetermined += 1,
        }
    }

    fn merge(&mut self, o: &Tally) {
        self.converges_to_a += o.converges_to_a;
        self.decays_to_zero += o.decays_to_zero;
        self.hits_zero += o.hits_zero;
        self.blow_up += o.blow_up;
        self.undetermined += o.undetermined;
        self.errors += o.errors;
    }

    pub fn total(&self) -> usize {
        self.converges_to_a
            + self.decays_to_zero
            + self.hits_zero
            + self.blow_up
            + self.undetermined
            + self.errors
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureCounts {
    pub residual: usize,
    pub flux: usize,
    pub envelope: usize,
    pub derivative_tail: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationAggregate {
    pub verified: usize,
    /// Trajectories too short to check (event at or right after `t0`).
    pub skipped: usize,
    pub max_psi_residual: f64,
    pub max_flux_defect: f64,
    pub sup_envelope_ratio: f64,
    pub sup_growth_product: f64,
    /// Over trajectories that converged or decayed.
    pub max_derivative_tail: (f64, f64),
    pub failed: FailureCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryNote {
    pub index: usize,
    pub psi0: f64,
    pub psi_t0: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub n: u32,
    pub alpha: f64,
    pub beta: f64,
    /// Cell-level failure (inadmissible exponents); nothing else is filled.
    pub error: Option<String>,
    pub t0: Option<f64>,
    #[serde(rename = "A")]
    pub a: Option<f64>,
    pub tally: Tally,
    /// `max |ψ(T) - A| / A` over trajectories that converge to `A`.
    pub worst_terminal_deviation: Option<f64>,
    /// Largest tail-window deviation among the same trajectories.
    pub worst_tail_deviation: Option<f64>,
    pub verification: Option<VerificationAggregate>,
    /// Errors, undetermined outcomes and failed checks (at most 20).
    pub notes: Vec<TrajectoryNote>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub seed: u64,
    pub ensemble: usize,
    pub horizon: f64,
    pub cells: Vec<CellReport>,
    pub totals: Tally,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

const MAX_NOTES: usize = 20;

/// Initial states `ψ0 ∈ (0, 3A]`, `ψ_t0 ∈ [-A, A]` for one cell.
pub fn ensemble_states(seed: u64, cell: usize, count: usize, a: f64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(cell as u64));
    (0..count)
        .map(|_| {
            let u: f64 = rng.gen();
            let v: f64 = rng.gen();
            (3.0 * a * (1.0 - u), a * (2.0 * v - 1.0))
        })
        .collect()
}

fn write_csv(dir: &PathBuf, cell: usize, j: usize, traj: &Trajectory) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("cell{cell:03}_traj{j:04}.csv"));
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    traj.write_csv(f)
}

fn run_cell(cfg: &SweepConfig, index: usize, spec: CellSpec) -> CellReport {
    let mut rep = CellReport {
        n: spec.n,
        alpha: spec.alpha,
        beta: spec.beta,
        error: None,
        t0: None,
        a: None,
        tally: Tally::default(),
        worst_terminal_deviation: None,
        worst_tail_deviation: None,
        verification: None,
        notes: Vec::new(),
    };
    let e = match validate_exponents(spec.n, spec.alpha, spec.beta) {
        Ok(e) => e,
        Err(err) => {
            rep.error = Some(err.to_string());
            return rep;
        }
    };
    let a = constant_a(&e);
    let t0 = cfg.t0.unwrap_or_else(|| default_t0(&e));
    rep.t0 = Some(t0);
    rep.a = Some(a);
    let icfg = cfg.integrator(&e);
    let th = cfg.thresholds(&e);
    let vtol = VerifyTolerances::default();
    let mut agg = VerificationAggregate::default();
    let note = |rep: &mut CellReport, j: usize, s: (f64, f64), msg: String| {
        if rep.notes.len() < MAX_NOTES {
            rep.notes.push(TrajectoryNote {
                index: j,
                psi0: s.0,
                psi_t0: s.1,
                note: msg,
            });
        }
    };

    for (j, s) in ensemble_states(cfg.seed, index, cfg.ensemble, a).into_iter().enumerate() {
        let p = PsiState {
            t: t0,
            psi: s.0,
            psi_t: s.1,
        };
        let traj = match integrate_psi(p, t0 + cfg.horizon, &e, &icfg) {
            Ok(t) => t,
            Err(err) => {
                rep.tally.errors += 1;
                note(&mut rep, j, s, err.to_string());
                continue;
            }
        };
        if let Some(dir) = &cfg.csv_dir {
            if let Err(err) = write_csv(dir, index, j, &traj) {
                note(&mut rep, j, s, format!("csv: {err}"));
            }
        }
        let c = match classify(&traj, &e, &th) {
            Ok(c) => c,
            Err(err) => {
                rep.tally.errors += 1;
                note(&mut rep, j, s, err.to_string());
                continue;
            }
        };
        rep.tally.add_outcome(c.outcome);
        if c.outcome == Outcome::Undetermined {
            note(&mut rep, j, s, format!("undetermined, terminal {}", c.terminal_value));
        }
        if c.outcome == Outcome::ConvergesToA {
            let d = (c.terminal_value - a).abs() / a;
            rep.worst_terminal_deviation = Some(rep.worst_terminal_deviation.unwrap_or(0.0).max(d));
            if let Some(tail) = c.diagnostics.tail_max_rel_deviation {
                rep.worst_tail_deviation = Some(rep.worst_tail_deviation.unwrap_or(0.0).max(tail));
            }
        }
        if !cfg.verify {
            continue;
        }
        match verify_trajectory(&traj, &e, &c, &vtol) {
            Ok(v) => {
                agg.verified += 1;
                agg.max_psi_residual = agg.max_psi_residual.max(v.max_psi_residual);
                agg.max_flux_defect = agg.max_flux_defect.max(v.max_flux_defect);
                agg.sup_envelope_ratio = agg.sup_envelope_ratio.max(v.sup_envelope_ratio);
                agg.sup_growth_product = agg.sup_growth_product.max(v.sup_growth_product);
                if v.passed.derivative_tail.is_some() {
                    agg.max_derivative_tail.0 = agg.max_derivative_tail.0.max(v.derivative_tail.0);
                    agg.max_derivative_tail.1 = agg.max_derivative_tail.1.max(v.derivative_tail.1);
                }
                let f = &mut agg.failed;
                f.residual += usize::from(!v.passed.residual);
                f.flux += usize::from(!v.passed.flux);
                f.envelope += usize::from(!v.passed.envelope);
                f.derivative_tail += usize::from(v.passed.derivative_tail == Some(false));
                if !v.passed.all() {
                    note(&mut rep, j, s, format!("check failed: {:?}", v.passed));
                }
            }
            Err(Error::InsufficientSamples { .. }) => agg.skipped += 1,
            Err(err) => {
                agg.skipped += 1;
                note(&mut rep, j, s, format!("verification: {err}"));
            }
        }
    }
    if cfg.verify {
        rep.verification = Some(agg);
    }
    rep
}

/// Run every cell (in parallel on `jobs` threads) and aggregate in grid
/// order. Cell failures are recorded in the report, never propagated.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let cells = cfg.cell_list();
    let work = || -> Vec<CellReport> {
        cells
            .par_iter()
            .enumerate()
            .map(|(i, c)| run_cell(cfg, i, *c))
            .collect()
    };
    let reports = match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(work),
        None => work(),
    };
    let mut totals = Tally::default();
    for r in &reports {
        totals.merge(&r.tally);
    }
    Ok(SweepReport {
        seed: cfg.seed,
        ensemble: cfg.ensemble,
        horizon: cfg.horizon,
        cells: reports,
        totals,
    })
}
