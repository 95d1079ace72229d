//! The separation constant read off a trajectory.
//!
//! Under `V = V(psi)` the chart momenta on the ray `psi` are `p_R = f(psi; C)` and
//! `p_psi / (R - l) = f'(psi; C)`, so `C = psi - atan2(p_R, p_psi / (R - l))` is the
//! quantity to compare between crossings of a reference ray.

use crate::chart::{CartesianPoint, Chart};
use crate::error::{Error, Result};
use crate::hamjac::{wrap_angle, AngularPotential, JacobiFamily, ProblemSetup, SolveOptions};

use super::flow::TrajectorySamples;
use super::state::{cartesian_to_chart, hamiltonian, Frame, PhaseState};

/// Crossings are refined until `|psi - psi_ref|` is below this.
const CROSSING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingEstimate {
    /// Index of the integration step holding the crossing.
    pub sample: usize,
    pub t: f64,
    pub f: f64,
    pub f_prime: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub psi_ref: f64,
    pub direction: i8,
    pub estimates: Vec<CrossingEstimate>,
    /// Largest pairwise angular difference between the estimates.
    pub spread: f64,
}

impl InvariantReport {
    pub fn mean_c(&self) -> f64 {
        let (s, c) = self
            .estimates
            .iter()
            .fold((0.0, 0.0), |(s, c), e| (s + e.c.sin(), c + e.c.cos()));
        s.atan2(c)
    }
}

pub fn constant_from_momenta(psi_ref: f64, f: f64, f_prime: f64) -> f64 {
    wrap_angle(psi_ref - f.atan2(f_prime))
}

pub fn spread(values: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            worst = worst.max(wrap_angle(a - b).abs());
        }
    }
    worst
}

fn chart_momenta(chart: &Chart, s: &PhaseState) -> Result<(f64, f64, f64)> {
    let cs = match s.frame {
        Frame::Chart => *s,
        Frame::Cartesian => {
            let cp = chart.from_cartesian(CartesianPoint::new(s.q[0], s.q[1]), None)?;
            cartesian_to_chart(chart, cp, s.p, s.mass)
        }
    };
    let gap = chart.gap(crate::chart::ChartPoint::new(cs.q[0], cs.q[1]));
    Ok((cs.q[1], cs.p[0], cs.p[1] / gap))
}

/// Finds the crossings of `psi = psi_ref` with `sign(dpsi/dt) = direction` and the
/// separation constant at each.
pub fn evaluate_invariant(
    chart: &Chart,
    traj: &TrajectorySamples,
    psi_ref: f64,
    direction: i8,
) -> Result<InvariantReport> {
    if direction != 1 && direction != -1 {
        return Err(Error::InvalidInput(format!("crossing direction must be +1 or -1, got {direction}")));
    }
    chart.domain().check(psi_ref)?;
    let up = direction > 0;
    let mut estimates = Vec::new();

    let psi_of = |y: [f64; 4]| -> Result<f64> {
        match traj.frame() {
            Frame::Chart => Ok(y[1]),
            Frame::Cartesian => Ok(chart.from_cartesian(CartesianPoint::new(y[0], y[1]), None)?.psi),
        }
    };
    let state_of = |y: [f64; 4]| PhaseState {
        frame: traj.frame(),
        q: [y[0], y[1]],
        p: [y[2], y[3]],
        mass: traj.mass(),
    };

    let first = traj.records().first().ok_or_else(|| Error::UnreachedReference { psi_ref })?;
    let mut skip_start = false;
    let (psi0, f0, fp0) = chart_momenta(chart, &first.state)?;
    if (psi0 - psi_ref).abs() <= CROSSING_TOL && fp0 != 0.0 && (fp0 > 0.0) == up {
        estimates.push(CrossingEstimate {
            sample: 0,
            t: first.t,
            f: f0,
            f_prime: fp0,
            c: constant_from_momenta(psi_ref, f0, fp0),
        });
        skip_start = true;
    }

    for (i, seg) in traj.segments().iter().enumerate() {
        let (t0, t1) = (seg.t0, seg.t1());
        let mut ga = psi_of(seg.eval(t0))? - psi_ref;
        let gb = psi_of(seg.eval(t1))? - psi_ref;
        if (ga < 0.0) == (gb < 0.0) || (ga < 0.0) != up {
            continue;
        }
        let (mut a, mut b) = (t0, t1);
        let mut t = if ga.abs() < gb.abs() { a } else { b };
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            let gm = psi_of(seg.eval(mid))? - psi_ref;
            t = mid;
            if gm.abs() <= CROSSING_TOL || b - a <= 4.0 * f64::EPSILON * mid.abs().max(1.0) {
                break;
            }
            if (gm < 0.0) == (ga < 0.0) {
                a = mid;
                ga = gm;
            } else {
                b = mid;
            }
        }
        if skip_start && (t - first.t).abs() <= 1e-12 {
            continue;
        }
        let (_, f, fp) = chart_momenta(chart, &state_of(seg.eval(t)))?;
        estimates.push(CrossingEstimate {
            sample: i + 1,
            t,
            f,
            f_prime: fp,
            c: constant_from_momenta(psi_ref, f, fp),
        });
    }

    if estimates.is_empty() {
        return Err(Error::UnreachedReference { psi_ref });
    }
    let cs: Vec<f64> = estimates.iter().map(|e| e.c).collect();
    Ok(InvariantReport {
        psi_ref,
        direction,
        spread: spread(&cs),
        estimates,
    })
}

/// Separation constant of the branch through `state`, obtained by carrying its
/// `(f, f')` along the reduced equation to `psi_ref` instead of waiting for the
/// trajectory to cross there.
pub fn transported_constant(
    chart: &Chart,
    potential: &AngularPotential,
    state: &PhaseState,
    psi_ref: f64,
    options: &SolveOptions,
) -> Result<f64> {
    let cs = state.to_chart(chart)?;
    let energy = hamiltonian(chart, potential, &cs)?;
    let setup = ProblemSetup::new(cs.mass, energy)?;
    let opts = SolveOptions {
        psi_ref: Some(psi_ref),
        ..*options
    };
    let family = JacobiFamily::new(chart, setup, potential.clone(), opts);
    let psi = cs.q[1];
    let range = (psi.min(psi_ref), psi.max(psi_ref));
    let sol = family.solution_through(crate::chart::ChartPoint::new(cs.q[0], psi), cs.p[0], cs.p[1], range)?;
    Ok(sol.c())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{BasicCurve, Domain};
    use crate::dynamics::flow::{flow, FlowConfig};
    use std::f64::consts::{FRAC_PI_4, SQRT_2, TAU};

    #[test]
    fn free_particle_constant_is_zero() {
        let ch = Chart::new(BasicCurve::point(Domain::new(0.0, TAU).unwrap()));
        let s0 = PhaseState::chart(SQRT_2, FRAC_PI_4, SQRT_2 / 2.0, 1.0, 1.0);
        let traj = flow(&ch, &AngularPotential::zero(), &s0, &FlowConfig { t_max: 3.0, ..FlowConfig::default() }).unwrap();
        let rep = evaluate_invariant(&ch, &traj, FRAC_PI_4, 1).unwrap();
        assert_eq!(rep.estimates.len(), 1);
        assert!(rep.estimates[0].c.abs() < 1e-9);
        assert_eq!(rep.estimates[0].t, 0.0);
        assert!(rep.spread <= 1e-9);
    }

    #[test]
    fn unreached_reference() {
        let ch = Chart::new(BasicCurve::point(Domain::new(0.0, TAU).unwrap()));
        let s0 = PhaseState::chart(SQRT_2, FRAC_PI_4, SQRT_2 / 2.0, 1.0, 1.0);
        let traj = flow(&ch, &AngularPotential::zero(), &s0, &FlowConfig { t_max: 1.0, ..FlowConfig::default() }).unwrap();
        assert!(matches!(
            evaluate_invariant(&ch, &traj, 3.0, 1),
            Err(Error::UnreachedReference { .. })
        ));
    }

    #[test]
    fn spread_wraps() {
        assert!((spread(&[3.1, -3.1]) - (TAU - 6.2)).abs() < 1e-12);
    }
}
