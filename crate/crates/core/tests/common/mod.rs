#![allow(dead_code)]

use std::f64::consts::TAU;

use raychart::{BasicCurve, CartesianPoint, Chart, ChartPoint, Domain};

pub fn point_chart() -> Chart {
    Chart::new(BasicCurve::point(Domain::new(0.0, TAU).unwrap()))
}

pub fn involute_chart() -> Chart {
    Chart::new(BasicCurve::circle_involute(1.0, Domain::new(0.0, TAU).unwrap()).unwrap())
}

pub fn power_chart() -> Chart {
    Chart::new(BasicCurve::power(1.0, 2.0, Domain::new(0.0, 3.0).unwrap()).unwrap())
}

/// `l = psi^2 / 2 + 0.3 sin psi` tabulated on [0, 3].
pub fn sampled_chart() -> Chart {
    let samples = (0..=60)
        .map(|i| {
            let psi = 0.05 * i as f64;
            (psi, 0.5 * psi * psi + 0.3 * psi.sin())
        })
        .collect();
    Chart::new(BasicCurve::sampled(samples).unwrap())
}

pub fn presets() -> Vec<(&'static str, Chart)> {
    vec![
        ("point", point_chart()),
        ("involute", involute_chart()),
        ("power", power_chart()),
        ("sampled", sampled_chart()),
    ]
}

/// Interior chart point from two unit-interval parameters.
pub fn interior_point(chart: &Chart, u: f64, v: f64) -> ChartPoint {
    let dom = chart.domain();
    let margin = 0.02 * dom.width();
    let psi = dom.min + margin + u * (dom.width() - 2.0 * margin);
    ChartPoint::new(chart.curve().l(psi) + 0.05 + 4.0 * v, psi)
}

/// Fourth-order central difference of a vector function.
pub fn d5<F: Fn(f64) -> CartesianPoint>(f: F, x: f64, h: f64) -> [f64; 2] {
    let a = f(x - 2.0 * h);
    let b = f(x - h);
    let c = f(x + h);
    let d = f(x + 2.0 * h);
    [
        (a.x1 - 8.0 * b.x1 + 8.0 * c.x1 - d.x1) / (12.0 * h),
        (a.x2 - 8.0 * b.x2 + 8.0 * c.x2 - d.x2) / (12.0 * h),
    ]
}

pub fn d5_scalar<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Fourth-order one-sided difference, stepping in direction `dir`.
pub fn d5_one_sided<F: Fn(f64) -> CartesianPoint>(f: F, x: f64, h: f64) -> [f64; 2] {
    const W: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
    let mut out = [0.0; 2];
    for (k, w) in W.iter().enumerate() {
        let q = f(x + k as f64 * h);
        out[0] += w * q.x1;
        out[1] += w * q.x2;
    }
    [out[0] / (12.0 * h), out[1] / (12.0 * h)]
}

/// Knot spacing of the tabulated test curve.
pub const SAMPLE_SPACING: f64 = 0.05;

/// Finite-difference Jacobian columns `(dx/dR, dx/dpsi)` of the forward map.
///
/// The angular stencil is one-sided and points away from the nearest knot of the
/// tabulated curve, so it never straddles a seam of the spline.
pub fn fd_jacobian(chart: &Chart, p: ChartPoint) -> ([f64; 2], [f64; 2]) {
    let h = 1e-3;
    let dr = d5(|r| chart.map_unchecked(ChartPoint::new(r, p.psi)), p.r, h);
    let frac = (p.psi / SAMPLE_SPACING).fract();
    let step = if frac < 0.5 { h } else { -h };
    let dpsi = d5_one_sided(|psi| chart.map_unchecked(ChartPoint::new(p.r, psi)), p.psi, step);
    (dr, dpsi)
}

use raychart::dynamics::{flow, hamiltonian, FlowConfig, PhaseState};
use raychart::hamjac::{trajectory_from_action, AngularPotential, JacobiFamily, ProblemSetup, SolveOptions};

/// Chart-frame state at distance `gap` along the ray `psi`, with unit mass and
/// angular momentum profile `(f, f')`.
pub fn state_on_ray(chart: &Chart, gap: f64, psi: f64, f: f64, f_prime: f64) -> PhaseState {
    PhaseState::chart(chart.curve().l(psi) + gap, psi, f, gap * f_prime, 1.0)
}

/// Largest distance between the orbit from `dS/dC = beta` and the canonical flow
/// started from the same state, over one radian of increasing `psi`.
pub fn jacobi_flow_distance(chart: &Chart, pot: &AngularPotential, state: &PhaseState) -> raychart::Result<f64> {
    let (r0, psi0) = (state.q[0], state.q[1]);
    let setup = ProblemSetup::new(state.mass, hamiltonian(chart, pot, state)?)?;
    let family = JacobiFamily::new(chart, setup, pot.clone(), SolveOptions::default());
    let (k, sol) = family.constants_for_state(ChartPoint::new(r0, psi0), state.p[0], state.p[1], (psi0, psi0 + 1.0))?;
    let cfg = FlowConfig {
        t_max: 50.0,
        h_max: 0.02,
        ..FlowConfig::default()
    };
    let traj = flow(chart, pot, state, &cfg)?;
    let mut worst: f64 = 0.0;
    let mut reached = false;
    for rec in traj.records() {
        let psi = rec.state.q[1];
        if psi > psi0 + 1.0 {
            reached = true;
            break;
        }
        let path = trajectory_from_action(chart, &sol, k.beta, &[psi])?;
        let (_, q) = path.points.first().copied().ok_or(raychart::Error::Numerical(format!(
            "orbit from the action left the chart at {psi}"
        )))?;
        worst = worst.max(q.distance(&chart.map_unchecked(ChartPoint::new(rec.state.q[0], psi))));
    }
    if !reached {
        return Err(raychart::Error::Numerical("flow did not sweep one radian".into()));
    }
    Ok(worst)
}

/// The four curve/potential pairings checked against the flow, with states whose
/// angle increases monotonically for at least one radian.
pub fn jacobi_cases() -> Vec<(&'static str, Chart, AngularPotential, PhaseState)> {
    let point = point_chart();
    let inv = involute_chart();
    let s_point = |ch: &Chart, c: f64| {
        let psi: f64 = 1.0;
        state_on_ray(ch, 2.0, psi, (psi - c).sin(), (psi - c).cos())
    };
    let s_cos = |ch: &Chart| {
        // p^2 = 2 (1 - 0.2 cos psi) at psi = 2; theta = 0.2 keeps f' > 0 over a radian
        let psi: f64 = 2.0;
        let p = (2.0 * (1.0 - 0.2 * psi.cos())).sqrt();
        state_on_ray(ch, 2.0, psi, p * 0.2f64.sin(), p * 0.2f64.cos())
    };
    vec![
        ("point/zero", point.clone(), AngularPotential::zero(), s_point(&point, 1.3)),
        ("point/cosine", point.clone(), AngularPotential::cosine(0.2), s_cos(&point)),
        ("involute/zero", inv.clone(), AngularPotential::zero(), s_point(&inv, 1.3)),
        ("involute/cosine", inv.clone(), AngularPotential::cosine(0.2), s_cos(&inv)),
    ]
}
