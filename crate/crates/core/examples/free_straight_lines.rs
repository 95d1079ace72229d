//! Level sets of the free-particle action are straight lines in the plane.
//!
//! cargo run --example free_straight_lines

use std::f64::consts::TAU;

use raychart::hamjac::{line_fit_residual, FreeAction, LevelSample};
use raychart::{BasicCurve, Chart, ChartPoint, Domain};

fn main() -> raychart::Result<()> {
    let chart = Chart::new(BasicCurve::circle_involute(1.0, Domain::new(0.0, TAU)?)?);
    let psis: Vec<f64> = (0..50).map(|i| 0.05 + 3.0 * i as f64 / 49.0).collect();

    for psi0 in [0.0, 0.7, 2.0] {
        let fa = FreeAction::new(psi0);
        let v = fa.eval(&chart, ChartPoint::new(5.0, 1.0))?;
        let pts: Vec<_> = fa
            .level_set_points(&chart, 2.0, &psis)?
            .into_iter()
            .filter_map(|s| match s {
                LevelSample::Point { q, .. } => Some(q),
                _ => None,
            })
            .collect();
        println!(
            "psi0 = {psi0}: |dS| = {:.15}, {} points on S = 2, line residual {:.2e}",
            v.ds[0].hypot(v.ds[1]),
            pts.len(),
            line_fit_residual(&pts)
        );
    }
    Ok(())
}
