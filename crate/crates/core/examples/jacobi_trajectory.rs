//! Orbits from the complete integral (dS/dC = beta) against direct integration.
//!
//! cargo run --example jacobi_trajectory

use std::f64::consts::TAU;

use raychart::dynamics::{flow, hamiltonian, FlowConfig, PhaseState};
use raychart::hamjac::{trajectory_from_action, AngularPotential, JacobiFamily, ProblemSetup, SolveOptions};
use raychart::{BasicCurve, Chart, ChartPoint, Domain};

fn main() -> raychart::Result<()> {
    let chart = Chart::new(BasicCurve::circle_involute(1.0, Domain::new(0.0, TAU)?)?);
    let pot = AngularPotential::cosine(0.2);
    let (psi, p_r, p_psi) = (2.0, 0.3, 2.0);
    let start = ChartPoint::new(chart.curve().l(psi) + 2.0, psi);
    let state = PhaseState::chart(start.r, psi, p_r, p_psi, 1.0);

    let setup = ProblemSetup::new(1.0, hamiltonian(&chart, &pot, &state)?)?;
    let family = JacobiFamily::new(&chart, setup, pot.clone(), SolveOptions::default());
    let (k, sol) = family.constants_for_state(start, p_r, p_psi, (psi, psi + 1.0))?;
    println!("C = {:.9}, beta = {:.9}", k.c, k.beta);

    let traj = flow(&chart, &pot, &state, &FlowConfig { t_max: 20.0, ..FlowConfig::default() })?;
    let mut worst: f64 = 0.0;
    for r in traj.records() {
        let psi_t = r.state.q[1];
        if psi_t > psi + 1.0 {
            break;
        }
        let path = trajectory_from_action(&chart, &sol, k.beta, &[psi_t])?;
        if let Some((_, q)) = path.points.first() {
            let q_flow = chart.map_unchecked(ChartPoint::new(r.state.q[0], psi_t));
            worst = worst.max(q.distance(&q_flow));
        }
    }
    println!("largest distance between the two constructions: {worst:.2e}");
    Ok(())
}
