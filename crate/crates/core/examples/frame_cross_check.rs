//! The same initial condition integrated in chart and in Cartesian coordinates.
//!
//! cargo run --example frame_cross_check

use std::f64::consts::TAU;

use raychart::dynamics::{cross_check, FlowConfig, PhaseState};
use raychart::hamjac::AngularPotential;
use raychart::{BasicCurve, Chart, Domain};

fn main() -> raychart::Result<()> {
    let chart = Chart::new(BasicCurve::circle_involute(1.0, Domain::new(0.0, TAU)?)?);
    let psi = 1.5;
    let state = PhaseState::chart(chart.curve().l(psi) + 1.5, psi, -0.2, 0.9, 1.0);
    for (name, pot) in [("free", AngularPotential::zero()), ("cosine", AngularPotential::cosine(0.2))] {
        let rep = cross_check(&chart, &pot, &state, &FlowConfig { t_max: 1.0, ..FlowConfig::default() })?;
        println!(
            "{name}: max divergence {:.2e} over t in [0, {}] ({} / {})",
            rep.max_divergence,
            rep.t_common,
            rep.chart_status.label(),
            rep.cartesian_status.label()
        );
    }
    Ok(())
}
