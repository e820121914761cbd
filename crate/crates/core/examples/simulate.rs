//! One trajectory in each frame from the same initial data, with the
//! ψ-equation residual and the flux identity defect.

use radial_singular::analysis::{flux_identity_check, psi_residual};
use radial_singular::ode::{integrate_psi, integrate_radial, IntegratorConfig};
use radial_singular::transform::from_psi_state;
use radial_singular::{constant_a, Exponents, PsiState};

fn main() -> radial_singular::Result<()> {
    let e = Exponents::new(5, 2.0, 1.0)?;
    let cfg = IntegratorConfig::for_exponents(&e);
    let p = PsiState {
        t: 5.0,
        psi: 1.8 * constant_a(&e),
        psi_t: 0.0,
    };

    let ef = integrate_psi(p, 60.0, &e, &cfg)?;
    let last = ef.last().expect("nonempty");
    println!(
        "psi frame: {} samples, psi(60) = {:.8}, A = {:.8}, residual {:.2e}",
        ef.samples.len(),
        last.y,
        constant_a(&e),
        psi_residual(&ef, &e)?
    );

    let phys = integrate_radial(from_psi_state(p, &e)?, (-60f64).exp(), &e, &cfg)?;
    let last = phys.last().expect("nonempty");
    println!(
        "physical frame: {} samples, u(e^-60) = {:.6e}, flux defect {:.2e}",
        phys.samples.len(),
        last.y,
        flux_identity_check(&phys, &e)?
    );

    let back = phys.to_emden_fowler(&e, &cfg)?;
    let gap = back
        .samples
        .iter()
        .filter_map(|s| ef.interpolate(s.x).map(|v| (s.y - v[0]).abs()))
        .fold(0.0, f64::max);
    println!("max |psi_phys - psi_ef| = {gap:.2e}");

    let head: String = ef.to_csv_string().lines().take(4).collect::<Vec<_>>().join("\n");
    println!("\n{head}\n...");
    Ok(())
}
