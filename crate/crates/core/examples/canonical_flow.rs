//! Hamilton's equations in the chart frame, with the energy drift.
//!
//! cargo run --example canonical_flow

use std::f64::consts::TAU;

use raychart::dynamics::{flow, FlowConfig, PhaseState};
use raychart::hamjac::AngularPotential;
use raychart::{BasicCurve, Chart, Domain};

fn main() -> raychart::Result<()> {
    let chart = Chart::new(BasicCurve::circle_involute(1.0, Domain::new(0.0, TAU)?)?);
    let pot = AngularPotential::cosine(0.2);
    let psi = 2.0;
    let start = PhaseState::chart(chart.curve().l(psi) + 2.0, psi, 0.3, 1.1, 1.0);

    let traj = flow(&chart, &pot, &start, &FlowConfig::default())?;
    let h0 = traj.records()[0].energy;
    let drift = traj
        .records()
        .iter()
        .map(|r| (r.energy - h0).abs())
        .fold(0.0, f64::max);
    println!(
        "{} steps, stopped at t = {:.3} ({}), max |H - H0| = {drift:.2e}",
        traj.records().len(),
        traj.t_end(),
        traj.status().label()
    );
    for r in traj.records().iter().step_by(traj.records().len() / 8 + 1) {
        println!(
            "t = {:7.3}  R = {:8.4}  psi = {:7.4}  f = {:8.5}  f' = {:8.5}",
            r.t, r.state.q[0], r.state.q[1], r.f, r.f_prime
        );
    }
    Ok(())
}
