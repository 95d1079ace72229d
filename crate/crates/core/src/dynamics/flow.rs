//! Canonical flow in the chart frame and, as an independent check, in Cartesian
//! coordinates with the potential pulled back through the inverse map.

use std::cell::Cell;

use crate::chart::{CartesianPoint, Chart, ChartPoint};
use crate::error::{Error, Result};
use crate::ode::{Dense, StepFailure, Stepper, Tolerances};
use crate::roots::newton_bisect;

use super::state::{cartesian_to_chart, hamiltonian, ForceField, Frame, PhaseState};

/// Distance to the basic curve (`R - l`) at which a trajectory counts as leaving the chart.
pub const EXIT_GAP: f64 = 1e-9;
/// Distance in angle from an end of the curve domain that counts as leaving it.
pub const EXIT_ANGLE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    TimeBudget,
    DomainExit,
    Forbidden,
    /// `dpsi/dt` changed sign; the separated branch through the state ends here.
    CausticContact,
}

impl Termination {
    pub fn label(self) -> &'static str {
        match self {
            Termination::TimeBudget => "time-budget",
            Termination::DomainExit => "domain-exit",
            Termination::Forbidden => "forbidden",
            Termination::CausticContact => "caustic-contact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    pub tol: Tolerances,
    pub t_max: f64,
    pub h_max: f64,
    /// Stop where the angular velocity changes sign.
    pub stop_at_turning: bool,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            t_max: 50.0,
            h_max: 0.1,
            stop_at_turning: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub t: f64,
    pub state: PhaseState,
    pub energy: f64,
    /// `p_R` in the chart frame.
    pub f: f64,
    /// `p_psi / (R - l)` in the chart frame.
    pub f_prime: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySamples {
    records: Vec<Record>,
    segments: Vec<Dense<4>>,
    status: Termination,
    frame: Frame,
    mass: f64,
}

impl TrajectorySamples {
    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn segments(&self) -> &[Dense<4>] {
        &self.segments
    }

    pub fn status(&self) -> Termination {
        self.status
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn t_end(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.t)
    }

    /// Interpolated state vector at `t`, in the trajectory's own frame.
    pub fn state_at(&self, t: f64) -> Option<PhaseState> {
        let first = self.records.first()?;
        if t == first.t {
            return Some(first.state);
        }
        let i = self.segments.partition_point(|d| d.t1() < t);
        let seg = self.segments.get(i)?;
        if t < seg.t0 {
            return None;
        }
        let y = seg.eval(t);
        Some(PhaseState {
            frame: self.frame,
            q: [y[0], y[1]],
            p: [y[2], y[3]],
            mass: self.mass,
        })
    }
}

fn locate(chart: &Chart, q: CartesianPoint, guess: f64) -> Result<ChartPoint> {
    match chart.from_cartesian_near(q, guess) {
        Some(p) => Ok(p),
        None => chart.from_cartesian(q, None),
    }
}

fn chart_rhs(chart: &Chart, field: &dyn ForceField, m: f64, y: &[f64; 4]) -> Result<[f64; 4]> {
    let [r, psi, p_r, p_psi] = *y;
    chart.domain().check(psi)?;
    let geo = chart.curve().geometry(psi);
    let gap = r - geo.l;
    if !(gap > 0.0) {
        return Err(Error::OutsideChart { r, psi, gap });
    }
    let [v_r, v_psi] = field.gradient(r, psi);
    let g2 = gap * gap;
    let g3 = g2 * gap;
    Ok([
        p_r / m,
        p_psi / (m * g2),
        p_psi * p_psi / (m * g3) - v_r,
        -p_psi * p_psi * geo.l_prime / (m * g3) - v_psi,
    ])
}

fn cartesian_force(chart: &Chart, field: &dyn ForceField, cp: ChartPoint) -> Result<[f64; 2]> {
    let gap = chart.gap(cp);
    if !(gap > 0.0) {
        return Err(Error::OutsideChart {
            r: cp.r,
            psi: cp.psi,
            gap,
        });
    }
    let [v_r, v_psi] = field.gradient(cp.r, cp.psi);
    let (s, c) = cp.psi.sin_cos();
    // grad R = T, grad psi = N / (R - l)
    let a = v_psi / gap;
    Ok([-v_r * c + a * s, -v_r * s - a * c])
}

/// Chart position and `(f, f')` of a state vector in the given frame.
fn chart_view(chart: &Chart, frame: Frame, y: &[f64; 4], m: f64, guess: f64) -> Result<(ChartPoint, f64, f64)> {
    match frame {
        Frame::Chart => {
            let cp = ChartPoint::new(y[0], y[1]);
            Ok((cp, y[2], y[3] / chart.gap(cp)))
        }
        Frame::Cartesian => {
            let cp = locate(chart, CartesianPoint::new(y[0], y[1]), guess)?;
            let s = cartesian_to_chart(chart, cp, [y[2], y[3]], m);
            Ok((cp, s.p[0], s.p[1] / chart.gap(cp)))
        }
    }
}

/// Trajectories running into an end of the angle domain approach it in ever smaller
/// steps; this is where they are declared gone.
fn at_domain_edge(chart: &Chart, psi: f64, f_prime: f64) -> bool {
    let dom = chart.domain();
    !dom.contains(psi)
        || (psi >= dom.max - EXIT_ANGLE && f_prime > 0.0)
        || (psi <= dom.min + EXIT_ANGLE && f_prime < 0.0)
}

/// Integrates Hamilton's equations from `state0` until the time budget runs out or
/// the trajectory leaves the chart.
pub fn flow(chart: &Chart, field: &dyn ForceField, state0: &PhaseState, cfg: &FlowConfig) -> Result<TrajectorySamples> {
    flow_from(chart, field, state0, None, cfg)
}

/// `flow` with the chart position of the start supplied, which spares the global
/// inverse map for Cartesian starts hugging the basic curve.
fn flow_from(
    chart: &Chart,
    field: &dyn ForceField,
    state0: &PhaseState,
    known: Option<ChartPoint>,
    cfg: &FlowConfig,
) -> Result<TrajectorySamples> {
    cfg.tol.validate()?;
    if !(cfg.t_max.is_finite() && cfg.t_max > 0.0) {
        return Err(Error::InvalidInput(format!("time budget must be positive, got {}", cfg.t_max)));
    }
    if !(cfg.h_max.is_finite() && cfg.h_max > 0.0) {
        return Err(Error::InvalidInput(format!("maximum step must be positive, got {}", cfg.h_max)));
    }
    let m = state0.mass;
    let frame = state0.frame;
    let y0 = [state0.q[0], state0.q[1], state0.p[0], state0.p[1]];
    let (cp0, f0, fp0, energy0) = match (frame, known) {
        (Frame::Cartesian, Some(cp)) => {
            let cs = cartesian_to_chart(chart, cp, state0.p, m);
            let e = (y0[2] * y0[2] + y0[3] * y0[3]) / (2.0 * m) + field.value(cp.r, cp.psi);
            (cp, cs.p[0], cs.p[1] / chart.gap(cp), e)
        }
        _ => {
            let e = hamiltonian(chart, field, state0)?;
            let (cp, f, fp) = chart_view(chart, frame, &y0, m, 0.0)?;
            (cp, f, fp, e)
        }
    };
    if !energy0.is_finite() {
        return Err(Error::InvalidInput("initial energy is not finite".into()));
    }
    let mut out = TrajectorySamples {
        records: vec![Record {
            t: 0.0,
            state: *state0,
            energy: energy0,
            f: f0,
            f_prime: fp0,
        }],
        segments: Vec::new(),
        status: Termination::TimeBudget,
        frame,
        mass: m,
    };
    if chart.gap(cp0) < EXIT_GAP {
        out.status = Termination::DomainExit;
        return Ok(out);
    }
    if state0.p[0] == 0.0 && state0.p[1] == 0.0 {
        out.status = Termination::Forbidden;
        return Ok(out);
    }

    let guess = Cell::new(cp0.psi);
    let mut rhs = |_t: f64, y: &[f64; 4]| -> Result<[f64; 4]> {
        match frame {
            Frame::Chart => chart_rhs(chart, field, m, y),
            Frame::Cartesian => {
                let cp = locate(chart, CartesianPoint::new(y[0], y[1]), guess.get())?;
                let force = cartesian_force(chart, field, cp)?;
                Ok([y[2] / m, y[3] / m, force[0], force[1]])
            }
        }
    };
    let mut stepper = Stepper::new(&mut rhs, 0.0, y0, cfg.h_max.min(0.01), cfg.h_max, cfg.tol)?;
    let mut prev_fp = fp0;

    while stepper.t < cfg.t_max {
        let dense = match stepper.advance(&mut rhs, cfg.t_max) {
            Ok(d) => d,
            Err(StepFailure::Underflow) | Err(StepFailure::Rhs(_)) => {
                out.status = Termination::DomainExit;
                return Ok(out);
            }
        };
        let y = stepper.y;
        let view = chart_view(chart, frame, &y, m, guess.get());
        let Ok((cp, _, fp)) = view else {
            out.status = Termination::DomainExit;
            return Ok(out);
        };
        guess.set(cp.psi);
        if cfg.stop_at_turning && prev_fp != 0.0 && (fp == 0.0 || (fp < 0.0) != (prev_fp < 0.0)) {
            let fp_at = |t: f64| {
                chart_view(chart, frame, &dense.eval(t), m, guess.get())
                    .map(|v| v.2)
                    .unwrap_or(f64::NAN)
            };
            let mut g = |t: f64| {
                let v = fp_at(t);
                let d = 1e-7 * dense.h.abs();
                (v, (fp_at(t + d) - fp_at(t - d)) / (2.0 * d))
            };
            let t_turn = newton_bisect(&mut g, dense.t0, dense.t1(), 1e-14, 0.0);
            let y_turn = dense.eval(t_turn);
            // the whole step is kept; records end at the turning time
            out.segments.push(dense);
            push_record(&mut out, chart, field, t_turn, y_turn, guess.get())?;
            out.status = Termination::CausticContact;
            return Ok(out);
        }
        prev_fp = fp;
        out.segments.push(dense);
        push_record(&mut out, chart, field, stepper.t, y, guess.get())?;
        if chart.gap(cp) < EXIT_GAP || at_domain_edge(chart, cp.psi, fp) {
            out.status = Termination::DomainExit;
            return Ok(out);
        }
    }
    Ok(out)
}

fn push_record(
    out: &mut TrajectorySamples,
    chart: &Chart,
    field: &dyn ForceField,
    t: f64,
    y: [f64; 4],
    guess: f64,
) -> Result<()> {
    let state = PhaseState {
        frame: out.frame,
        q: [y[0], y[1]],
        p: [y[2], y[3]],
        mass: out.mass,
    };
    let (cp, f, f_prime) = chart_view(chart, out.frame, &y, out.mass, guess)?;
    let energy = match out.frame {
        Frame::Chart => hamiltonian(chart, field, &state).unwrap_or(f64::NAN),
        Frame::Cartesian => {
            (y[2] * y[2] + y[3] * y[3]) / (2.0 * out.mass) + field.value(cp.r, cp.psi)
        }
    };
    out.records.push(Record {
        t,
        state,
        energy,
        f,
        f_prime,
    });
    Ok(())
}

/// Chart position of a trajectory at `t`.
pub fn position_at(chart: &Chart, traj: &TrajectorySamples, t: f64) -> Option<CartesianPoint> {
    let s = traj.state_at(t)?;
    Some(match s.frame {
        Frame::Chart => chart.map_unchecked(ChartPoint::new(s.q[0], s.q[1])),
        Frame::Cartesian => CartesianPoint::new(s.q[0], s.q[1]),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCheckReport {
    pub max_divergence: f64,
    /// Length of the time range both integrations cover.
    pub t_common: f64,
    pub chart_status: Termination,
    pub cartesian_status: Termination,
}

/// Runs the same initial condition in both frames and compares positions.
pub fn cross_check(chart: &Chart, field: &dyn ForceField, state0: &PhaseState, cfg: &FlowConfig) -> Result<CrossCheckReport> {
    let in_chart = state0.to_chart(chart)?;
    let in_cart = state0.to_cartesian(chart)?;
    let a = flow(chart, field, &in_chart, cfg)?;
    let known = ChartPoint::new(in_chart.q[0], in_chart.q[1]);
    let b = flow_from(chart, field, &in_cart, Some(known), cfg)?;
    let t_common = a.t_end().min(b.t_end());
    let mut times: Vec<f64> = (0..=1000).map(|i| t_common * i as f64 / 1000.0).collect();
    times.extend(a.records().iter().map(|r| r.t).filter(|&t| t <= t_common));
    let mut worst: f64 = 0.0;
    for t in times {
        match (position_at(chart, &a, t), position_at(chart, &b, t)) {
            (Some(p), Some(q)) => worst = worst.max(p.distance(&q)),
            _ => {
                return Err(Error::Numerical(format!("trajectory sample missing at t = {t}")));
            }
        }
    }
    Ok(CrossCheckReport {
        max_divergence: worst,
        t_common,
        chart_status: a.status(),
        cartesian_status: b.status(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{BasicCurve, Domain};
    use crate::hamjac::AngularPotential;
    use std::f64::consts::{FRAC_PI_4, SQRT_2, TAU};

    fn point_chart() -> Chart {
        Chart::new(BasicCurve::point(Domain::new(0.0, TAU).unwrap()))
    }

    #[test]
    fn free_flow_is_vertical_line() {
        let ch = point_chart();
        let s0 = PhaseState::chart(SQRT_2, FRAC_PI_4, SQRT_2 / 2.0, 1.0, 1.0);
        let cfg = FlowConfig {
            t_max: 3.0,
            ..FlowConfig::default()
        };
        let traj = flow(&ch, &AngularPotential::zero(), &s0, &cfg).unwrap();
        assert_eq!(traj.status(), Termination::TimeBudget);
        for r in traj.records() {
            let q = ch.map_unchecked(ChartPoint::new(r.state.q[0], r.state.q[1]));
            assert!((q.x1 - 1.0).abs() < 1e-7);
            assert!((q.x2 - 1.0 - r.t).abs() < 1e-7);
        }
    }

    #[test]
    fn zero_kinetic_energy_is_forbidden() {
        let ch = point_chart();
        let s0 = PhaseState::chart(1.0, 0.5, 0.0, 0.0, 1.0);
        let traj = flow(&ch, &AngularPotential::cosine(0.2), &s0, &FlowConfig::default()).unwrap();
        assert_eq!(traj.status(), Termination::Forbidden);
        assert_eq!(traj.records().len(), 1);
    }

    #[test]
    fn degenerate_start_exits_in_both_frames() {
        let ch = Chart::new(BasicCurve::circle_involute(1.0, Domain::new(0.0, TAU).unwrap()).unwrap());
        let psi = 1.0;
        let s0 = PhaseState::chart(ch.curve().l(psi) + 1e-12, psi, 0.1, 0.0, 1.0);
        let pot = AngularPotential::zero();
        let rep = cross_check(&ch, &pot, &s0, &FlowConfig::default()).unwrap();
        assert_eq!(rep.chart_status, Termination::DomainExit);
        assert_eq!(rep.cartesian_status, Termination::DomainExit);
        assert_eq!(rep.t_common, 0.0);
    }

    #[test]
    fn turning_point_stops_flow() {
        let ch = point_chart();
        let s0 = PhaseState::chart(2.0, 3.0, 0.0, 0.3, 1.0);
        let cfg = FlowConfig {
            stop_at_turning: true,
            ..FlowConfig::default()
        };
        let traj = flow(&ch, &AngularPotential::cosine(0.5), &s0, &cfg).unwrap();
        assert_eq!(traj.status(), Termination::CausticContact);
        assert!(traj.records().last().unwrap().f_prime.abs() < 1e-8);
    }
}
