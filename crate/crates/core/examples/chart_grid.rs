//! Coordinate lattice of the circle-involute chart and its metric.
//!
//! cargo run --example chart_grid

use std::f64::consts::TAU;

use raychart::{BasicCurve, Chart, ChartPoint, Domain};

fn main() -> raychart::Result<()> {
    let curve = BasicCurve::circle_involute(1.0, Domain::new(0.0, TAU)?)?;
    let chart = Chart::new(curve);

    println!("{:>6} {:>6} {:>10} {:>10} {:>10}", "R", "psi", "x1", "x2", "g_psipsi");
    for i in 0..=4 {
        let psi = 0.5 + 1.0 * i as f64;
        let l = chart.curve().l(psi);
        for r in [l + 0.5, l + 2.0] {
            let p = ChartPoint::new(r, psi);
            let q = chart.to_cartesian(p)?;
            let g = chart.geometry_at(p)?;
            println!("{r:6.3} {psi:6.3} {:10.5} {:10.5} {:10.5}", q.x1, q.x2, g.g_psi_psi);
        }
    }

    // the metric is diagonal: tangent and normal directions of each ray
    let g = chart.geometry_at(ChartPoint::new(4.0, 2.0))?;
    let j = g.jacobian;
    let cross = j[0][0] * j[0][1] + j[1][0] * j[1][1];
    println!("dx/dR . dx/dpsi = {cross:.3e}, |dx/dpsi| = {:.6}", j[0][1].hypot(j[1][1]));
    Ok(())
}
