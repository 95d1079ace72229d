//! Separation constant read off a trajectory: at crossings of a reference ray, and
//! by carrying states along the reduced equation.
//!
//! cargo run --example invariant_check

use std::f64::consts::{PI, TAU};

use raychart::dynamics::{evaluate_invariant, flow, transported_constant, FlowConfig, PhaseState, RadialRamp};
use raychart::hamjac::{AngularPotential, SolveOptions};
use raychart::{BasicCurve, Chart, Domain};

fn main() -> raychart::Result<()> {
    let chart = Chart::new(BasicCurve::point(Domain::new(0.0, TAU)?));
    let pot = AngularPotential::cosine(0.2);
    let start = PhaseState::chart(2.0, PI - 1.0, 0.1, 1.2, 1.0);

    let traj = flow(&chart, &pot, &start, &FlowConfig { t_max: 200.0, ..FlowConfig::default() })?;
    let rep = evaluate_invariant(&chart, &traj, PI, 1)?;
    for e in &rep.estimates {
        println!("crossing t = {:9.4}: f = {:.6}, f' = {:.6}, C = {:.9}", e.t, e.f, e.f_prime, e.c);
    }
    println!("spread over crossings: {:.3e}", rep.spread);

    // states early along the path, carried to the reference ray
    for r in traj.records().iter().take(40).step_by(8) {
        let c = transported_constant(&chart, &pot, &r.state, PI, &SolveOptions::default())?;
        println!("t = {:6.3}: transported C = {c:.9}", r.t);
    }

    let ramp = RadialRamp { base: pot.clone(), k: 0.1 };
    let traj = flow(&chart, &ramp, &start, &FlowConfig { t_max: 200.0, ..FlowConfig::default() })?;
    let rep = evaluate_invariant(&chart, &traj, PI, 1)?;
    println!("with a radial ramp: {} crossings, spread {:.3e}", rep.estimates.len(), rep.spread);
    Ok(())
}
