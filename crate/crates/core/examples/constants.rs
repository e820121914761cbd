//! Closed-form quantities for a few exponent triples, and the growth
//! inversion through Lambert W.

use radial_singular::params::{admissible_alpha, invert_growth, lambert_w};
use radial_singular::{constant_a, limit_coefficients, Exponents};

fn main() -> radial_singular::Result<()> {
    for (n, alpha, beta) in [(5, 2.0, 0.0), (5, 2.0, 1.0), (3, 4.0, -1.0), (6, 1.75, 2.0)] {
        let e = Exponents::new(n, alpha, beta)?;
        let c = limit_coefficients(&e);
        let (lo, hi) = admissible_alpha(n).expect("n >= 3");
        println!(
            "n={n} alpha={alpha} beta={beta:+}  alpha in ({lo:.4}, {hi:.4})  A={:.6}  a0={:.4}  b0={:.4}  lambda=({:.4}, {:.4})",
            constant_a(&e),
            c.a0,
            c.b0,
            c.lambda_minus,
            c.lambda_plus
        );
    }

    println!();
    for s in [std::f64::consts::E, 10.0, 1e10, 1e30] {
        let w = lambert_w(s)?;
        println!("W({s:e}) = {w:.15}   (w e^w - s) / s = {:.2e}", (w * w.exp() - s) / s);
    }

    println!();
    let e = Exponents::new(5, 2.0, 1.0)?;
    for k in [10.0, 1e3, 1e6] {
        let u = invert_growth(k, &e)?;
        println!("u^(alpha-1) log(u)^beta = {k:e}  ->  u = {u:.12}");
    }
    Ok(())
}
