//! The reduced equation `f'^2 + f^2 = p^2(psi)` and the separated action
//! `S = R f(psi) + g(psi)`, `g = -int l f' dpsi`.
//!
//! The solver writes `f = p sin(theta)`, `f' = p cos(theta)`, which turns the
//! constraint into an identity and leaves
//!
//! ```text
//! theta' = 1 - (p'/p) tan(theta)
//! ```
//!
//! The branch tag `sigma = sign(f')` is `sign(cos theta)`. Contacts `|f| = p` sit at
//! `theta = pi/2 + k pi`:
//! * with `p' = 0` there the solution passes smoothly and `sigma` flips (reflective);
//! * with `p' != 0` the solution reaches the contact with a square-root profile and
//!   cannot be continued in the same direction of `psi` (one-sided). The table ends
//!   there and the contact is reported.
//!
//! Alongside `theta` the solver carries the variation `v = d theta / dC`
//! (normalised to `-1` at the reference angle), `g` and `J = int l du/dC`, which
//! the Jacobi construction of trajectories needs.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::chart::{Chart, ChartPoint};
use crate::curve::BasicCurve;
use crate::error::{Error, Result};
use crate::interp::hermite;
use crate::ode::{StepFailure, Stepper, Tolerances};
use crate::roots::newton_bisect;

use super::potential::{AngularPotential, MomentumProfile, ProblemSetup};

/// `|p'/p|` at or below which a contact is treated as reflective.
const REFLECT_TOL: f64 = 1e-9;
/// A smooth contact needs `p' = 0`; one found within this distance of a located
/// contact is taken to be its true position.
const SNAP_WINDOW: f64 = 1e-6;
/// `|cos theta|` below which the local contact model takes over from the integrator.
const NEAR_CONTACT: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialData {
    pub psi_start: f64,
    pub f_start: f64,
    /// Sign of `f'` at the start, `+1` or `-1`.
    pub sigma: i8,
    /// Exact `f'` when known (avoids the cancellation in `sqrt(p^2 - f^2)`).
    pub f_prime: Option<f64>,
}

impl InitialData {
    pub fn new(psi_start: f64, f_start: f64, sigma: i8) -> Self {
        Self {
            psi_start,
            f_start,
            sigma,
            f_prime: None,
        }
    }

    pub fn with_slope(psi_start: f64, f_start: f64, f_prime: f64) -> Self {
        Self {
            psi_start,
            f_start,
            sigma: if f_prime < 0.0 { -1 } else { 1 },
            f_prime: Some(f_prime),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactKind {
    Reflective,
    OneSided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub psi: f64,
    pub f: f64,
    pub kind: ContactKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: Tolerances,
    /// Largest step, which also bounds the spacing of table nodes.
    pub h_max: f64,
    /// Step taken across a reflective contact with the local series.
    pub contact_step: f64,
    /// Angle at which the separation constant is read off.
    pub psi_ref: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            h_max: 0.02,
            contact_step: 1e-4,
            psi_ref: None,
        }
    }
}

/// One row of the solution table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub psi: f64,
    pub f: f64,
    pub f_prime: f64,
    pub sigma: i8,
    pub constraint_residual: f64,
}

/// `u = df/dC`, its derivative in `psi`, and `J = int_{psi_ref}^{psi} l du'/dC`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variation {
    pub u: f64,
    pub u_prime: f64,
    pub j: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparatedAction {
    pub s: f64,
    pub p_r: f64,
    pub p_psi: f64,
}

// state layout: theta, v = dtheta/dC, g, J
const TH: usize = 0;
const V: usize = 1;
const G: usize = 2;
const J: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Node {
    psi: f64,
    y: [f64; 4],
    dy: [f64; 4],
}

impl Node {
    fn singular(&self) -> bool {
        self.dy.iter().any(|d| !d.is_finite())
    }
}

/// A solved branch family member `f(psi; C)` with its action integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatedSolution {
    setup: ProblemSetup,
    potential: AngularPotential,
    psi_ref: f64,
    c: f64,
    nodes: Vec<Node>,
    contacts: Vec<Contact>,
    options: SolveOptions,
}

pub fn wrap_angle(x: f64) -> f64 {
    let w = x - TAU * (x / TAU).round();
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

/// Index of the open branch interval `(pi/2 + (n-1) pi, pi/2 + n pi)` holding `theta`.
fn branch_index(theta: f64) -> i64 {
    ((theta - FRAC_PI_2) / PI).floor() as i64
}

fn nearest_contact_angle(theta: f64) -> f64 {
    FRAC_PI_2 + PI * ((theta - FRAC_PI_2) / PI).round()
}

struct Problem<'a> {
    curve: &'a BasicCurve,
    setup: &'a ProblemSetup,
    pot: &'a AngularPotential,
}

impl Problem<'_> {
    fn profile(&self, psi: f64) -> Result<MomentumProfile> {
        self.setup.momentum_profile(self.pot, psi)
    }

    fn rhs(&self, psi: f64, y: &[f64; 4]) -> Result<[f64; 4]> {
        let mp = self.profile(psi)?;
        let l = self.curve.l(psi);
        let (s, c) = y[TH].sin_cos();
        let ratio = mp.dp / mp.p;
        let (dtheta, dv) = if ratio == 0.0 {
            (1.0, 0.0)
        } else {
            (1.0 - ratio * s / c, -ratio * y[V] / (c * c))
        };
        Ok([dtheta, dv, -l * mp.p * c, -l * mp.p * s * y[V]])
    }

    /// Derivatives at a reflective contact, where `theta' = lambda`.
    fn contact_rates(&self, psi: f64, y: &[f64; 4], lambda: f64) -> Result<[f64; 4]> {
        let mp = self.profile(psi)?;
        let l = self.curve.l(psi);
        let (s, c) = y[TH].sin_cos();
        Ok([lambda, 0.0, -l * mp.p * c, -l * mp.p * s * y[V]])
    }
}

/// Zero of `p'` within `delta` of `psi`, if there is one.
fn stationary_point_near(prob: &Problem, psi: f64, delta: f64) -> Option<f64> {
    let dv = |x: f64| prob.pot.derivative(x);
    if let Ok(mp) = prob.profile(psi) {
        if (mp.dp / mp.p).abs() <= REFLECT_TOL {
            return Some(psi);
        }
    }
    let dom = prob.curve.domain();
    let (mut a, mut b) = (dom.clamp(psi - delta), dom.clamp(psi + delta));
    let (mut fa, fb) = (dv(a), dv(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if (fa < 0.0) == (fb < 0.0) {
        return None;
    }
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        let fm = dv(m);
        if fm == 0.0 {
            return Some(m);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Slope of `theta` through a contact where `p' = 0`: the root of
/// `lambda^2 - lambda - p''/p = 0` continuous with the free case.
fn reflective_slope(mp: &MomentumProfile) -> Option<f64> {
    let kappa = mp.ddp / mp.p;
    let disc = 1.0 + 4.0 * kappa;
    (disc >= 0.0).then(|| 0.5 * (1.0 + disc.sqrt()))
}

/// Remaining distance `h` to a one-sided contact given the gap `w = p - |f|`, from
/// `w = a h + (2/3) sqrt(2 p a) h^(3/2)` with `a = |p'|`.
fn distance_to_contact(w: f64, p: f64, a: f64) -> f64 {
    let b = (2.0 / 3.0) * (2.0 * p * a).sqrt();
    let mut h = w / a;
    for _ in 0..50 {
        let sh = h.max(0.0).sqrt();
        let r = a * h + b * h * sh - w;
        let dr = a + 1.5 * b * sh;
        let step = r / dr;
        h -= step;
        if step.abs() <= 1e-16 * h.abs().max(1e-300) {
            break;
        }
    }
    h.max(0.0)
}

struct Leg {
    nodes: Vec<Node>,
    contacts: Vec<Contact>,
}

fn integrate_leg(
    prob: &Problem,
    psi0: f64,
    y0: [f64; 4],
    psi_end: f64,
    sigma_hint: i8,
    opts: &SolveOptions,
) -> Result<Leg> {
    let dir = if psi_end >= psi0 { 1.0 } else { -1.0 };
    let mut leg = Leg {
        nodes: Vec::new(),
        contacts: Vec::new(),
    };
    if psi_end == psi0 {
        let dy = prob.rhs(psi0, &y0).unwrap_or([f64::NAN; 4]);
        leg.nodes.push(Node { psi: psi0, y: y0, dy });
        return Ok(leg);
    }

    let mut psi = psi0;
    let mut y = y0;

    // leaving a contact needs the local model unless p' vanishes identically
    let mp0 = prob.profile(psi0)?;
    if y0[TH].cos().abs() < NEAR_CONTACT {
        let theta_star = nearest_contact_angle(y0[TH]);
        let s = theta_star.sin().signum();
        let ratio = mp0.dp / mp0.p;
        if ratio.abs() > REFLECT_TOL {
            let a = dir * mp0.dp;
            let contact_f = s * mp0.p;
            leg.nodes.push(Node {
                psi: psi0,
                y: [theta_star, y0[V], y0[G], y0[J]],
                dy: [f64::NAN; 4],
            });
            leg.contacts.push(Contact {
                psi: psi0,
                f: contact_f,
                kind: ContactKind::OneSided,
            });
            if a <= 0.0 {
                return Ok(leg);
            }
            let h = opts.contact_step.min((psi_end - psi0).abs());
            let sigma = if sigma_hint == 0 { 1.0 } else { f64::from(sigma_hint) };
            let b = -(2.0 / 3.0) * dir * s * sigma * (2.0 * mp0.p * a).sqrt();
            let w = (a * h + b * h * h.sqrt()).max(0.0);
            let psi1 = psi0 + dir * h;
            let mp1 = prob.profile(psi1)?;
            let w = w.min(mp1.p);
            let f1 = s * (mp1.p - w);
            let fp1 = sigma * (w * (2.0 * mp1.p - w)).max(0.0).sqrt();
            let theta1 = f1.atan2(fp1);
            let mut y1 = [theta1, y0[V], 0.0, 0.0];
            let d_start = prob.contact_rates(psi0, &y0, 0.0)?;
            let d_end = prob.rhs(psi1, &y1)?;
            y1[G] = y0[G] + 0.5 * dir * h * (d_start[G] + d_end[G]);
            y1[J] = y0[J] + 0.5 * dir * h * (d_start[J] + d_end[J]);
            psi = psi1;
            y = y1;
        } else if mp0.dp != 0.0 || mp0.ddp != 0.0 {
            let Some(lambda) = reflective_slope(&mp0) else {
                leg.nodes.push(Node {
                    psi: psi0,
                    y: y0,
                    dy: [f64::NAN; 4],
                });
                leg.contacts.push(Contact {
                    psi: psi0,
                    f: theta_star.sin() * mp0.p,
                    kind: ContactKind::OneSided,
                });
                return Ok(leg);
            };
            let y_star = [theta_star, y0[V], y0[G], y0[J]];
            let dy = prob.contact_rates(psi0, &y_star, lambda)?;
            leg.nodes.push(Node {
                psi: psi0,
                y: y_star,
                dy,
            });
            let h = opts.contact_step.min((psi_end - psi0).abs());
            psi = psi0 + dir * h;
            y = [
                theta_star + lambda * dir * h,
                y0[V],
                y0[G] + dy[G] * dir * h,
                y0[J] + dy[J] * dir * h,
            ];
        }
    }

    let mut f = |t: f64, s: &[f64; 4]| prob.rhs(t, s);
    if leg.nodes.is_empty() || leg.nodes.last().map(|n| n.psi) != Some(psi) {
        let dy = f(psi, &y)?;
        leg.nodes.push(Node { psi, y, dy });
    }
    let h0 = dir * opts.h_max.min(0.01).min((psi_end - psi).abs().max(1e-12));
    let mut stepper = Stepper::new(&mut f, psi, y, h0, opts.h_max, opts.tol)?;

    while stepper.t != psi_end {
        let prev_psi = stepper.t;
        let prev_theta = stepper.y[TH];
        let dense = match stepper.advance(&mut f, psi_end) {
            Ok(d) => d,
            Err(StepFailure::Rhs(e)) => return Err(e),
            Err(StepFailure::Underflow) => {
                // stalled against the square-root singularity of a one-sided contact
                let theta = stepper.y[TH];
                if theta.cos().abs() < 1e-3 {
                    let mp = prob.profile(stepper.t)?;
                    finish_one_sided(prob, &mut leg, stepper.t, &stepper.y, &mp, dir)?;
                    return Ok(leg);
                }
                return Err(Error::Numerical(format!(
                    "step size underflow in the reduced equation at psi = {}",
                    stepper.t
                )));
            }
        };
        let theta = stepper.y[TH];
        let (n_old, n_new) = (branch_index(prev_theta), branch_index(theta));
        if n_old != n_new {
            let theta_star = FRAC_PI_2 + PI * n_old.max(n_new) as f64;
            let (a, b) = (prev_psi, stepper.t);
            let psi_star = newton_bisect(
                |x| (dense.eval(x)[TH] - theta_star, dense.eval_derivative(x)[TH]),
                a,
                b,
                1e-15,
                1e-15,
            );
            let (lo_step, hi_step) = (a.min(b), a.max(b));
            let snapped = stationary_point_near(prob, psi_star, SNAP_WINDOW).map(|x| x.clamp(lo_step, hi_step));
            let psi_star = snapped.unwrap_or(psi_star);
            let mp = prob.profile(psi_star)?;
            let mut ys = dense.eval(psi_star);
            ys[TH] = theta_star;
            let lambda = snapped.and_then(|_| reflective_slope(&mp));
            match lambda {
                Some(lambda) => {
                    let dy = prob.contact_rates(psi_star, &ys, lambda)?;
                    leg.nodes.push(Node { psi: psi_star, y: ys, dy });
                    leg.contacts.push(Contact {
                        psi: psi_star,
                        f: theta_star.sin() * mp.p,
                        kind: ContactKind::Reflective,
                    });
                }
                None => {
                    leg.nodes.push(Node {
                        psi: psi_star,
                        y: ys,
                        dy: [f64::NAN; 4],
                    });
                    leg.contacts.push(Contact {
                        psi: psi_star,
                        f: theta_star.sin() * mp.p,
                        kind: ContactKind::OneSided,
                    });
                    return Ok(leg);
                }
            }
        }
        leg.nodes.push(Node {
            psi: stepper.t,
            y: stepper.y,
            dy: stepper.k,
        });

        let c = theta.cos();
        if c.abs() < NEAR_CONTACT && stepper.t != psi_end {
            let rate = stepper.k[TH];
            let approaching = -c.signum() * theta.sin() * rate * dir < 0.0;
            if !approaching {
                continue;
            }
            let mp = prob.profile(stepper.t)?;
            let ratio = mp.dp / mp.p;
            if ratio.abs() > REFLECT_TOL {
                if dir * mp.dp < 0.0 {
                    let w = mp.p * (1.0 - theta.sin().abs());
                    let h_star = distance_to_contact(w, mp.p, mp.dp.abs());
                    let ahead = stepper.t + dir * h_star;
                    if stationary_point_near(prob, ahead, h_star + SNAP_WINDOW).is_none() {
                        finish_one_sided(prob, &mut leg, stepper.t, &stepper.y, &mp, dir)?;
                        return Ok(leg);
                    }
                }
                continue;
            }
            if ratio == 0.0 && mp.ddp == 0.0 {
                // constant p: the integrator passes through contacts exactly
                continue;
            }
            let Some(lambda) = reflective_slope(&mp) else {
                finish_one_sided(prob, &mut leg, stepper.t, &stepper.y, &mp, dir)?;
                return Ok(leg);
            };
            let theta_star = nearest_contact_angle(theta);
            let psi_star = stepper.t + (theta_star - theta) / lambda;
            if (psi_star - psi_end) * dir >= 0.0 {
                continue;
            }
            let mut ys = stepper.y;
            let dy_here = stepper.k;
            let dpsi = psi_star - stepper.t;
            ys[TH] = theta_star;
            ys[G] += dy_here[G] * dpsi;
            ys[J] += dy_here[J] * dpsi;
            let dy_star = prob.contact_rates(psi_star, &ys, lambda)?;
            leg.nodes.push(Node {
                psi: psi_star,
                y: ys,
                dy: dy_star,
            });
            leg.contacts.push(Contact {
                psi: psi_star,
                f: theta_star.sin() * mp.p,
                kind: ContactKind::Reflective,
            });
            let h = opts.contact_step.min((psi_end - psi_star).abs());
            let psi_after = psi_star + dir * h;
            let y_after = [
                theta_star + lambda * dir * h,
                ys[V],
                ys[G] + dy_star[G] * dir * h,
                ys[J] + dy_star[J] * dir * h,
            ];
            let dy_after = f(psi_after, &y_after)?;
            leg.nodes.push(Node {
                psi: psi_after,
                y: y_after,
                dy: dy_after,
            });
            let h_next = dir * stepper.h.abs().max(opts.contact_step);
            stepper = Stepper::new(&mut f, psi_after, y_after, h_next, opts.h_max, opts.tol)?;
        }
    }
    Ok(leg)
}

fn finish_one_sided(
    prob: &Problem,
    leg: &mut Leg,
    psi: f64,
    y: &[f64; 4],
    mp: &MomentumProfile,
    dir: f64,
) -> Result<()> {
    let theta_star = nearest_contact_angle(y[TH]);
    let w = mp.p * (1.0 - y[TH].sin().abs());
    let a = mp.dp.abs().max(1e-300);
    let h = distance_to_contact(w, mp.p, a);
    let psi_star = psi + dir * h;
    let dy = prob.rhs(psi, y).unwrap_or([0.0; 4]);
    let mut ys = *y;
    ys[TH] = theta_star;
    ys[G] += dy[G] * dir * h;
    ys[J] += if dy[J].is_finite() { dy[J] * dir * h } else { 0.0 };
    leg.nodes.push(Node {
        psi: psi_star,
        y: ys,
        dy: [f64::NAN; 4],
    });
    leg.contacts.push(Contact {
        psi: psi_star,
        f: theta_star.sin() * mp.p,
        kind: ContactKind::OneSided,
    });
    Ok(())
}

/// Integrates the reduced equation from `init` over `psi_range`.
pub fn solve_f(
    curve: &BasicCurve,
    setup: &ProblemSetup,
    pot: &AngularPotential,
    init: InitialData,
    psi_range: (f64, f64),
    opts: &SolveOptions,
) -> Result<SeparatedSolution> {
    opts.tol.validate()?;
    let (lo, hi) = (psi_range.0.min(psi_range.1), psi_range.0.max(psi_range.1));
    let dom = curve.domain();
    dom.check(lo)?;
    dom.check(hi)?;
    let psi0 = init.psi_start;
    if !(psi0 >= lo && psi0 <= hi) {
        return Err(Error::InvalidInput(format!(
            "start angle {psi0} outside the requested range [{lo}, {hi}]"
        )));
    }
    if !init.f_start.is_finite() {
        return Err(Error::InconsistentInitialData(format!(
            "f_start = {} is not finite",
            init.f_start
        )));
    }

    // forbidden-region scan over the whole requested range
    let samples = 4000;
    for i in 0..=samples {
        let psi = lo + (hi - lo) * i as f64 / samples as f64;
        let p2 = setup.p2(pot, psi);
        if !(p2 > 0.0) {
            return Err(Error::Forbidden {
                psi,
                deficit: setup.energy - pot.value(psi),
            });
        }
    }

    let prob = Problem { curve, setup, pot };
    let mp = prob.profile(psi0)?;
    let theta0 = match init.f_prime {
        Some(fp) => {
            let resid = init.f_start * init.f_start + fp * fp - mp.p * mp.p;
            if resid.abs() > 1e-8 * mp.p * mp.p {
                return Err(Error::InconsistentInitialData(format!(
                    "f^2 + f'^2 - p^2 = {resid} at psi = {psi0}"
                )));
            }
            init.f_start.atan2(fp)
        }
        None => {
            if init.sigma != 1 && init.sigma != -1 {
                return Err(Error::InconsistentInitialData(format!(
                    "branch tag must be +1 or -1, got {}",
                    init.sigma
                )));
            }
            if init.f_start.abs() > mp.p * (1.0 + 1e-12) {
                return Err(Error::InconsistentInitialData(format!(
                    "|f_start| = {} exceeds p = {} at psi = {psi0}",
                    init.f_start.abs(),
                    mp.p
                )));
            }
            let f0 = init.f_start.clamp(-mp.p, mp.p);
            let fp = f64::from(init.sigma) * (mp.p * mp.p - f0 * f0).max(0.0).sqrt();
            f0.atan2(fp)
        }
    };
    let y0 = [theta0, 1.0, 0.0, 0.0];

    let fwd = integrate_leg(&prob, psi0, y0, hi, init.sigma, opts)?;
    let bwd = integrate_leg(&prob, psi0, y0, lo, init.sigma, opts)?;

    let mut nodes: Vec<Node> = bwd.nodes.into_iter().rev().collect();
    if let Some(last) = nodes.last() {
        if fwd.nodes.first().map(|n| n.psi) == Some(last.psi) {
            nodes.pop();
        }
    }
    nodes.extend(fwd.nodes);
    nodes.dedup_by(|b, a| b.psi == a.psi);
    let mut contacts: Vec<Contact> = bwd.contacts.into_iter().rev().collect();
    contacts.extend(fwd.contacts);
    contacts.dedup_by(|b, a| b.psi == a.psi);

    let mut sol = SeparatedSolution {
        setup: *setup,
        potential: pot.clone(),
        psi_ref: psi0,
        c: 0.0,
        nodes,
        contacts,
        options: *opts,
    };
    let (s_lo, s_hi) = sol.range();
    let psi_ref = match opts.psi_ref {
        Some(r) => {
            if !(r >= s_lo && r <= s_hi) {
                return Err(Error::OutOfSolvedRange {
                    psi: r,
                    lo: s_lo,
                    hi: s_hi,
                });
            }
            r
        }
        None => {
            let mid = dom.midpoint();
            if mid >= s_lo && mid <= s_hi {
                mid
            } else {
                psi0
            }
        }
    };
    sol.normalize(psi_ref)?;
    Ok(sol)
}

impl SeparatedSolution {
    fn normalize(&mut self, psi_ref: f64) -> Result<()> {
        let (y_ref, _) = self.interp(psi_ref)?;
        let v_ref = y_ref[V];
        let scale = if v_ref.is_finite() && v_ref != 0.0 { -1.0 / v_ref } else { 1.0 };
        for n in &mut self.nodes {
            n.y[V] *= scale;
            n.dy[V] *= scale;
            n.y[G] -= y_ref[G];
            n.y[J] = (n.y[J] - y_ref[J]) * scale;
            n.dy[J] *= scale;
        }
        self.psi_ref = psi_ref;
        self.c = wrap_angle(psi_ref - y_ref[TH]);
        Ok(())
    }

    fn interp(&self, psi: f64) -> Result<([f64; 4], [f64; 4])> {
        let (lo, hi) = self.range();
        if !(psi >= lo && psi <= hi) {
            return Err(Error::OutOfSolvedRange { psi, lo, hi });
        }
        if self.nodes.len() == 1 {
            return Ok((self.nodes[0].y, self.nodes[0].dy));
        }
        let i = self.nodes.partition_point(|n| n.psi <= psi).clamp(1, self.nodes.len() - 1) - 1;
        let (a, b) = (&self.nodes[i], &self.nodes[i + 1]);
        let mut y = [0.0; 4];
        let mut dy = [0.0; 4];
        if a.singular() || b.singular() {
            let h = b.psi - a.psi;
            let s = if h == 0.0 { 0.0 } else { (psi - a.psi) / h };
            for k in 0..4 {
                y[k] = a.y[k] + s * (b.y[k] - a.y[k]);
                dy[k] = if h == 0.0 { 0.0 } else { (b.y[k] - a.y[k]) / h };
            }
        } else {
            for k in 0..4 {
                let (v, d) = hermite(a.psi, b.psi, a.y[k], b.y[k], a.dy[k], b.dy[k], psi);
                y[k] = v;
                dy[k] = d;
            }
        }
        Ok((y, dy))
    }

    pub fn setup(&self) -> &ProblemSetup {
        &self.setup
    }

    pub fn potential(&self) -> &AngularPotential {
        &self.potential
    }

    /// Separation constant `C = psi_ref - atan2(f, f')` at the reference angle.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn psi_ref(&self) -> f64 {
        self.psi_ref
    }

    pub fn range(&self) -> (f64, f64) {
        (self.nodes[0].psi, self.nodes[self.nodes.len() - 1].psi)
    }

    pub fn contacts(&self) -> &[Contact] {
        &self.contacts
    }

    pub fn options(&self) -> &SolveOptions {
        &self.options
    }

    fn p(&self, psi: f64) -> f64 {
        self.setup.p2(&self.potential, psi).max(0.0).sqrt()
    }

    pub fn theta(&self, psi: f64) -> Result<f64> {
        Ok(self.interp(psi)?.0[TH])
    }

    /// `(f, f')` at `psi`.
    pub fn f(&self, psi: f64) -> Result<(f64, f64)> {
        let theta = self.theta(psi)?;
        let p = self.p(psi);
        let (s, c) = theta.sin_cos();
        Ok((p * s, p * c))
    }

    pub fn branch(&self, psi: f64) -> Result<i8> {
        let (_, fp) = self.f(psi)?;
        Ok(if fp > 0.0 {
            1
        } else if fp < 0.0 {
            -1
        } else {
            0
        })
    }

    /// `g(psi) = -int_{psi_ref}^{psi} l f' dpsi`.
    pub fn g(&self, psi: f64) -> Result<f64> {
        Ok(self.interp(psi)?.0[G])
    }

    pub fn variation(&self, psi: f64) -> Result<Variation> {
        let (y, _) = self.interp(psi)?;
        let p = self.p(psi);
        let (s, c) = y[TH].sin_cos();
        Ok(Variation {
            u: p * c * y[V],
            u_prime: -p * s * y[V],
            j: y[J],
        })
    }

    /// Rows at the table nodes, with the constraint residual `f^2 + f'^2 - p^2`
    /// recomputed from the potential.
    pub fn table(&self) -> Vec<TableRow> {
        self.nodes
            .iter()
            .map(|n| {
                let p2 = self.setup.p2(&self.potential, n.psi);
                let p = p2.max(0.0).sqrt();
                let (s, c) = n.y[TH].sin_cos();
                let (f, fp) = (p * s, p * c);
                let is_contact = self.contacts.iter().any(|k| k.psi == n.psi);
                TableRow {
                    psi: n.psi,
                    f,
                    f_prime: if is_contact { 0.0 } else { fp },
                    sigma: if is_contact {
                        0
                    } else if fp >= 0.0 {
                        1
                    } else {
                        -1
                    },
                    constraint_residual: f * f + fp * fp - p2,
                }
            })
            .collect()
    }

    pub fn node_angles(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.psi).collect()
    }
}

/// `S = R f + g`, `p_R = f`, `p_psi = (R - l) f'` at a chart point.
pub fn separated_action(chart: &Chart, sol: &SeparatedSolution, p: ChartPoint) -> Result<SeparatedAction> {
    chart.domain().check(p.psi)?;
    let gap = chart.gap(p);
    if gap <= 0.0 {
        return Err(Error::OutsideChart {
            r: p.r,
            psi: p.psi,
            gap,
        });
    }
    let (f, fp) = sol.f(p.psi)?;
    let g = sol.g(p.psi)?;
    Ok(SeparatedAction {
        s: p.r * f + g,
        p_r: f,
        p_psi: gap * fp,
    })
}
