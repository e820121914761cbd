//! A small classification sweep with trajectory checks, printed as JSON.

use radial_singular::analysis::sweep::GridSpec;
use radial_singular::analysis::{run_sweep, SweepConfig};

fn main() -> radial_singular::Result<()> {
    let cfg = SweepConfig {
        grid: GridSpec {
            n: vec![4, 5],
            alpha_fractions: vec![0.5],
            beta: vec![-1.0, 0.0, 1.0],
        },
        ensemble: 8,
        seed: 7,
        ..SweepConfig::default()
    };
    let report = run_sweep(&cfg)?;
    for c in &report.cells {
        eprintln!(
            "n={} alpha={:.4} beta={:+}: {} to A, {} hit zero, {} undetermined",
            c.n, c.alpha, c.beta, c.tally.converges_to_a, c.tally.hits_zero, c.tally.undetermined
        );
    }
    println!("{}", report.to_json());
    Ok(())
}
