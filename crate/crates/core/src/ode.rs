//! Dormand-Prince 5(4) stepping with error control and continuous output.
//!
//! The integrator is deliberately small: callers drive the step loop themselves
//! so that they can inspect every accepted step for events (branch contacts,
//! reference-angle crossings, chart exits).

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            rtol: self.rtol * factor,
            atol: self.atol * factor,
        }
    }

    pub fn validate(self) -> Result<Self> {
        if self.rtol > 0.0 && self.atol > 0.0 && self.rtol.is_finite() && self.atol.is_finite() {
            Ok(self)
        } else {
            Err(Error::InvalidInput(format!(
                "tolerances must be positive and finite (rtol = {}, atol = {})",
                self.rtol, self.atol
            )))
        }
    }
}

/// Continuous extension of one accepted step (fourth order).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dense<const N: usize> {
    pub t0: f64,
    pub h: f64,
    cont: [[f64; N]; 5],
}

impl<const N: usize> Dense<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn eval(&self, t: f64) -> [f64; N] {
        let s = if self.h == 0.0 { 0.0 } else { (t - self.t0) / self.h };
        let s1 = 1.0 - s;
        let c = &self.cont;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * c[4][i])));
        }
        out
    }

    /// Time derivative of the continuous extension.
    pub fn eval_derivative(&self, t: f64) -> [f64; N] {
        let s = if self.h == 0.0 { 0.0 } else { (t - self.t0) / self.h };
        let c = &self.cont;
        let mut out = [0.0; N];
        for i in 0..N {
            // y = c0 + c1 s + c2 s(1-s) + c3 s^2(1-s) + c4 s^2(1-s)^2
            let ds = c[1][i]
                + c[2][i] * (1.0 - 2.0 * s)
                + c[3][i] * (2.0 * s - 3.0 * s * s)
                + c[4][i] * (2.0 * s * (1.0 - s) * (1.0 - 2.0 * s));
            out[i] = ds / self.h;
        }
        out
    }
}

/// Outcome of a single trial step.
#[derive(Debug, Clone, Copy)]
pub struct Trial<const N: usize> {
    pub y1: [f64; N],
    /// Derivative at the step end (first stage of the next step).
    pub k_end: [f64; N],
    /// Scaled error norm; the step is acceptable when `err <= 1`.
    pub err: f64,
    pub dense: Dense<N>,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (coef, k) in terms {
        for i in 0..N {
            out[i] += h * coef * k[i];
        }
    }
    out
}

/// One Dormand-Prince trial step from `(t, y)` with `k1 = f(t, y)`.
pub fn trial_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    tol: Tolerances,
) -> Result<Trial<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, k1)]))?;
    let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]))?;
    let k4 = f(t + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = f(
        t + C5 * h,
        &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    )?;
    let k6 = f(
        t + h,
        &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    )?;
    let y1 = axpy(y, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = f(t + h, &y1)?;

    let mut acc = 0.0;
    for i in 0..N {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let scale = tol.atol + tol.rtol * y[i].abs().max(y1[i].abs());
        acc += (e / scale).powi(2);
    }
    let err = (acc / N as f64).sqrt();

    let mut cont = [[0.0; N]; 5];
    for i in 0..N {
        let ydiff = y1[i] - y[i];
        let bspl = h * k1[i] - ydiff;
        cont[0][i] = y[i];
        cont[1][i] = ydiff;
        cont[2][i] = bspl;
        cont[3][i] = ydiff - h * k7[i] - bspl;
        cont[4][i] =
            h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    let finite = y1.iter().all(|v| v.is_finite()) && err.is_finite();
    Ok(Trial {
        y1,
        k_end: k7,
        err: if finite { err } else { f64::INFINITY },
        dense: Dense { t0: t, h, cont },
    })
}

/// Step-size update factor from a scaled error norm.
pub fn step_factor(err: f64) -> f64 {
    if err == 0.0 {
        return 5.0;
    }
    if !err.is_finite() {
        return 0.2;
    }
    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
}

/// Stateful driver around [`trial_step`]: retries until a step is accepted.
#[derive(Debug, Clone)]
pub struct Stepper<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub k: [f64; N],
    pub h: f64,
    pub h_max: f64,
    pub h_min: f64,
    pub tol: Tolerances,
}

/// Why [`Stepper::advance`] gave up.
#[derive(Debug, Clone, PartialEq)]
pub enum StepFailure {
    /// Step size fell below `h_min` without an acceptable step.
    Underflow,
    /// The right-hand side returned an error at the accepted state's neighbourhood
    /// repeatedly down to `h_min`.
    Rhs(Error),
}

impl<const N: usize> Stepper<N> {
    pub fn new<F>(f: &mut F, t: f64, y: [f64; N], h: f64, h_max: f64, tol: Tolerances) -> Result<Self>
    where
        F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    {
        let k = f(t, &y)?;
        Ok(Self {
            t,
            y,
            k,
            h,
            h_max,
            h_min: 1e-14 * (1.0 + t.abs()),
            tol,
        })
    }

    /// Attempts steps (signed by the sign of `h`) until one is accepted, never
    /// stepping past `t_limit`. Returns the accepted step's continuous output.
    pub fn advance<F>(&mut self, f: &mut F, t_limit: f64) -> std::result::Result<Dense<N>, StepFailure>
    where
        F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    {
        let dir = if self.h >= 0.0 { 1.0 } else { -1.0 };
        let mut last_err = None;
        loop {
            let remaining = (t_limit - self.t) * dir;
            let mut h = self.h.abs().min(self.h_max).min(remaining.max(0.0));
            if h <= 0.0 {
                return Err(StepFailure::Underflow);
            }
            // avoid leaving a sliver at the end of the interval
            if remaining - h < 1e-3 * h {
                h = remaining;
            }
            let h_signed = dir * h;
            match trial_step(f, self.t, &self.y, &self.k, h_signed, self.tol) {
                Ok(trial) if trial.err <= 1.0 => {
                    self.t = if h == remaining { t_limit } else { self.t + h_signed };
                    self.y = trial.y1;
                    self.k = trial.k_end;
                    self.h = dir * h * step_factor(trial.err);
                    return Ok(trial.dense);
                }
                Ok(trial) => {
                    self.h = dir * h * step_factor(trial.err).min(0.9);
                }
                Err(e) => {
                    last_err = Some(e);
                    self.h = dir * h * 0.25;
                }
            }
            if self.h.abs() < self.h_min {
                return Err(match last_err {
                    Some(e) => StepFailure::Rhs(e),
                    None => StepFailure::Underflow,
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_one_period() {
        let mut f = |_t: f64, y: &[f64; 2]| Ok([y[1], -y[0]]);
        let mut s = Stepper::new(&mut f, 0.0, [1.0, 0.0], 0.1, 0.5, Tolerances::default()).unwrap();
        let end = 2.0 * std::f64::consts::PI;
        while s.t < end {
            s.advance(&mut f, end).unwrap();
        }
        assert!((s.y[0] - 1.0).abs() < 1e-9);
        assert!(s.y[1].abs() < 1e-9);
    }

    #[test]
    fn dense_output_tracks_solution() {
        let mut f = |_t: f64, y: &[f64; 1]| Ok([y[0]]);
        let k = f(0.0, &[1.0]).unwrap();
        let trial = trial_step(&mut f, 0.0, &[1.0], &k, 0.1, Tolerances::default()).unwrap();
        for i in 0..=10 {
            let t = 0.01 * i as f64;
            assert!((trial.dense.eval(t)[0] - t.exp()).abs() < 5e-9);
            assert!((trial.dense.eval_derivative(t)[0] - t.exp()).abs() < 2e-7);
        }
    }

    #[test]
    fn backward_integration() {
        let mut f = |_t: f64, y: &[f64; 1]| Ok([y[0]]);
        let mut s = Stepper::new(&mut f, 1.0, [1.0f64.exp()], -0.1, 0.2, Tolerances::default()).unwrap();
        while s.t > 0.0 {
            s.advance(&mut f, 0.0).unwrap();
        }
        assert_eq!(s.t, 0.0);
        assert!((s.y[0] - 1.0).abs() < 1e-9);
    }
}
