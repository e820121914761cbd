//! Separatrix between removable-type and singular-type data: bisection on
//! the initial slope, the decay rate along it, and the small-ψ0 limit of the
//! critical slope.

use radial_singular::classifier::{
    default_slope_bracket, find_separatrix, separatrix_decay_rate, Thresholds,
};
use radial_singular::ode::{default_t0, IntegratorConfig};
use radial_singular::{limit_coefficients, Exponents};

fn main() -> radial_singular::Result<()> {
    let e = Exponents::new(5, 2.0, 0.0)?;
    let cfg = IntegratorConfig::for_exponents(&e);
    let th = Thresholds::for_exponents(&e);
    let t0 = default_t0(&e);
    let lm = limit_coefficients(&e).lambda_minus;

    let sep = find_separatrix(&e, t0, 0.5, (-5.0, 5.0), &th, &cfg)?;
    println!(
        "psi0 = 0.5: critical slope {:.12} after {} bisections",
        sep.slope, sep.iterations
    );
    let fit = separatrix_decay_rate(&e, &sep, &cfg)?;
    println!(
        "decay rate {:.5} on t in [{:.1}, {:.1}], expected {lm}",
        fit.rate, fit.window.0, fit.window.1
    );

    for psi0 in [1e-2, 1e-3, 1e-4] {
        let s = find_separatrix(&e, t0, psi0, default_slope_bracket(&e, psi0), &th, &cfg)?;
        println!("psi0 = {psi0:e}: slope / psi0 = {:.6}", s.slope / psi0);
    }
    Ok(())
}
