//! The reduced equation f'^2 + f^2 = p^2 for a cosine potential, with its
//! contacts and separation constant.
//!
//! cargo run --example separate_reduced

use std::f64::consts::{PI, TAU};

use raychart::hamjac::{solve_f, AngularPotential, InitialData, ProblemSetup, SolveOptions};
use raychart::{BasicCurve, Domain};

fn main() -> raychart::Result<()> {
    let curve = BasicCurve::point(Domain::new(0.0, TAU)?);
    let setup = ProblemSetup::new(1.0, 1.0)?;

    for (name, pot) in [("free", AngularPotential::zero()), ("cosine", AngularPotential::cosine(0.2))] {
        let sol = solve_f(
            &curve,
            &setup,
            &pot,
            InitialData::new(0.0, 0.0, 1),
            (0.0, PI),
            &SolveOptions::default(),
        )?;
        let worst = sol
            .table()
            .iter()
            .map(|r| r.constraint_residual.abs())
            .fold(0.0, f64::max);
        println!(
            "{name}: C = {:.9}, range = {:?}, {} nodes, max residual {worst:.1e}",
            sol.c(),
            sol.range(),
            sol.table().len()
        );
        for c in sol.contacts() {
            println!("  contact at psi = {:.9} ({:?}), f = {:.9}", c.psi, c.kind, c.f);
        }
    }
    Ok(())
}
