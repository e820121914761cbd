//! Classification of a handful of initial states: convergence to `A`,
//! decay to zero on the stable manifold, and early zero crossings.

use radial_singular::classifier::{classify, Thresholds};
use radial_singular::ode::{default_t0, integrate_psi, IntegratorConfig};
use radial_singular::{constant_a, Exponents, PsiState};

fn main() -> radial_singular::Result<()> {
    let e = Exponents::new(5, 2.0, 0.0)?;
    let a = constant_a(&e);
    let cfg = IntegratorConfig::for_exponents(&e);
    let th = Thresholds::for_exponents(&e);
    let t0 = default_t0(&e);

    for (psi, psi_t) in [(a, 0.0), (2.5, 0.0), (0.5, 1.0), (0.5, -2.0), (5.0, -20.0)] {
        let traj = integrate_psi(PsiState { t: t0, psi, psi_t }, t0 + 300.0, &e, &cfg)?;
        let c = classify(&traj, &e, &th)?;
        println!(
            "psi0={psi:<4} dpsi0={psi_t:<5} -> {:<16} terminal {:.3e}  event {:?}",
            c.outcome.name(),
            c.terminal_value,
            c.diagnostics.event
        );
    }
    Ok(())
}
