//! The fast checks of the invariant suite: closed forms, Lambert W, the
//! exact solution, frame equivalence and the removable-branch rate.

use radial_singular::analysis::suite::{
    closed_form, exact_solution_ef, exact_solution_radial, frame_equivalence, lambert,
    removable_rate,
};
use radial_singular::analysis::SweepConfig;

fn main() {
    let checks = [
        closed_form(0, 1000),
        lambert(1000),
        exact_solution_ef(),
        exact_solution_radial(),
        removable_rate(&SweepConfig::default()),
        frame_equivalence(0, 20),
    ];
    for c in &checks {
        println!("{}", c.line());
    }
}
