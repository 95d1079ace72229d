//! Trajectories from the complete integral.
//!
//! With `S = R f(psi; C) + g(psi; C)`, the orbit through a given state is the level
//! set `dS/dC = beta`, that is `R u(psi) - J(psi) = beta` with `u = df/dC`. Solving
//! for `R` gives the path without integrating in time.

use crate::chart::{CartesianPoint, Chart, ChartPoint};
use crate::error::{Error, Result};

use super::potential::{AngularPotential, ProblemSetup};
use super::separated::{solve_f, InitialData, SeparatedSolution, SolveOptions};

/// `|u|` below which the orbit is taken to touch a caustic of the family.
const CAUSTIC_TOL: f64 = 1e-12;

/// The family of separated solutions sharing one reference angle.
#[derive(Debug, Clone)]
pub struct JacobiFamily<'a> {
    pub chart: &'a Chart,
    pub setup: ProblemSetup,
    pub potential: AngularPotential,
    pub options: SolveOptions,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiConstants {
    pub c: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathEnd {
    Complete,
    /// The path leaves the solved range or the chart at this angle.
    Boundary { psi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobiPath {
    pub points: Vec<(ChartPoint, CartesianPoint)>,
    pub end: PathEnd,
}

impl<'a> JacobiFamily<'a> {
    pub fn new(chart: &'a Chart, setup: ProblemSetup, potential: AngularPotential, options: SolveOptions) -> Self {
        Self {
            chart,
            setup,
            potential,
            options,
        }
    }

    /// Member of the family through the phase-space state `(R, psi, p_R, p_psi)`,
    /// solved over `range`.
    pub fn solution_through(&self, p: ChartPoint, p_r: f64, p_psi: f64, range: (f64, f64)) -> Result<SeparatedSolution> {
        let gap = self.chart.gap(p);
        if gap <= 0.0 {
            return Err(Error::OutsideChart {
                r: p.r,
                psi: p.psi,
                gap,
            });
        }
        let init = InitialData::with_slope(p.psi, p_r, p_psi / gap);
        solve_f(self.chart.curve(), &self.setup, &self.potential, init, range, &self.options)
    }

    /// `C` and `beta = R u - J` for a state, with the member solution.
    pub fn constants_for_state(
        &self,
        p: ChartPoint,
        p_r: f64,
        p_psi: f64,
        range: (f64, f64),
    ) -> Result<(JacobiConstants, SeparatedSolution)> {
        let sol = self.solution_through(p, p_r, p_psi, range)?;
        let var = sol.variation(p.psi)?;
        Ok((
            JacobiConstants {
                c: sol.c(),
                beta: p.r * var.u - var.j,
            },
            sol,
        ))
    }
}

/// Samples `R = (beta + J) / u` on the given angles, stopping at the edge of the
/// solved range or of the chart.
pub fn trajectory_from_action(chart: &Chart, sol: &SeparatedSolution, beta: f64, psis: &[f64]) -> Result<JacobiPath> {
    let (lo, hi) = sol.range();
    let mut points = Vec::with_capacity(psis.len());
    for &psi in psis {
        if psi < lo || psi > hi {
            return Ok(JacobiPath {
                points,
                end: PathEnd::Boundary { psi },
            });
        }
        let var = sol.variation(psi)?;
        if var.u.abs() < CAUSTIC_TOL {
            return Err(Error::Caustic { psi });
        }
        let p = ChartPoint::new((beta + var.j) / var.u, psi);
        if chart.gap(p) <= 0.0 {
            return Ok(JacobiPath {
                points,
                end: PathEnd::Boundary { psi },
            });
        }
        points.push((p, chart.map_unchecked(p)));
    }
    Ok(JacobiPath {
        points,
        end: PathEnd::Complete,
    })
}
