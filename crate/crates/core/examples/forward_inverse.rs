//! Forward map and its numerical inverse on a sampled curve.
//!
//! cargo run --example forward_inverse

use raychart::{BasicCurve, Chart, ChartPoint};

fn main() -> raychart::Result<()> {
    // l(psi) = psi^2 / 2 sampled on [0, 3]
    let samples: Vec<(f64, f64)> = (0..=30).map(|i| {
        let psi = 0.1 * i as f64;
        (psi, 0.5 * psi * psi)
    }).collect();
    let chart = Chart::new(BasicCurve::sampled(samples)?);

    for (r, psi) in [(1.0, 0.4), (3.0, 1.2), (6.5, 2.7)] {
        let p = ChartPoint::new(r, psi);
        let q = chart.to_cartesian(p)?;
        let back = chart.from_cartesian(q, None)?;
        println!(
            "(R, psi) = ({r}, {psi}) -> ({:.6}, {:.6}) -> ({:.12}, {:.12})",
            q.x1, q.x2, back.r, back.psi
        );
    }

    // points behind every tangency point are not covered by the chart
    match chart.from_cartesian(chart.curve_point(1.5), None) {
        Ok(p) => println!("curve point maps to {p:?}"),
        Err(e) => println!("curve point: {e}"),
    }
    Ok(())
}
