//! Free-particle complete integral.
//!
//! `S = R sin(psi - psi0) - int_{psi_min}^{psi} l(t) cos(t - psi0) dt` solves
//! `<dS, dS> = 1`; its differential in the orthonormal coframe is
//! `(sin(psi - psi0), cos(psi - psi0))`. The level sets of `S` are parallel straight
//! lines with normal direction `psi0 + pi/2`, which is how straight lines get an
//! explicit description in the chart.

use crate::chart::{CartesianPoint, Chart, ChartPoint};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeAction {
    pub psi0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeActionValue {
    pub s: f64,
    /// Components of `dS` on `(nu1, nu2)`.
    pub ds: [f64; 2],
}

/// One sample of a level set `S = S0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevelSample {
    Point { psi: f64, r: f64, q: CartesianPoint },
    /// The ray is parallel to the level line.
    Parallel { psi: f64 },
    /// The level line meets this ray behind the tangency point.
    OutsideChart { psi: f64 },
}

impl FreeAction {
    pub fn new(psi0: f64) -> Self {
        Self { psi0 }
    }

    /// `int_{psi_min}^{psi} l(t) cos(t - psi0) dt` from the cached antiderivatives.
    fn integral(&self, chart: &Chart, psi: f64) -> f64 {
        let ab = chart.cache().eval_clamped(psi);
        let (s0, c0) = self.psi0.sin_cos();
        c0 * ab.a + s0 * ab.b
    }

    pub fn eval(&self, chart: &Chart, p: ChartPoint) -> Result<FreeActionValue> {
        chart.domain().check(p.psi)?;
        let gap = chart.gap(p);
        if gap <= 0.0 {
            return Err(Error::OutsideChart {
                r: p.r,
                psi: p.psi,
                gap,
            });
        }
        let (s, c) = (p.psi - self.psi0).sin_cos();
        Ok(FreeActionValue {
            s: p.r * s - self.integral(chart, p.psi),
            ds: [s, c],
        })
    }

    /// Points of the level set `S = s0` on the given rays.
    pub fn level_set_points(&self, chart: &Chart, s0: f64, psis: &[f64]) -> Result<Vec<LevelSample>> {
        psis.iter()
            .map(|&psi| {
                chart.domain().check(psi)?;
                let sin = (psi - self.psi0).sin();
                if sin.abs() < 1e-12 {
                    return Ok(LevelSample::Parallel { psi });
                }
                let r = (s0 + self.integral(chart, psi)) / sin;
                let p = ChartPoint::new(r, psi);
                if chart.gap(p) <= 0.0 {
                    return Ok(LevelSample::OutsideChart { psi });
                }
                Ok(LevelSample::Point {
                    psi,
                    r,
                    q: chart.map_unchecked(p),
                })
            })
            .collect()
    }
}

pub fn free_action(chart: &Chart, fa: &FreeAction, p: ChartPoint) -> Result<FreeActionValue> {
    fa.eval(chart, p)
}

/// Largest distance from a point to the total-least-squares line through the set.
pub fn line_fit_residual(points: &[CartesianPoint]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let n = points.len() as f64;
    let (mx, my) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), q| (a + q.x1 / n, b + q.x2 / n));
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for q in points {
        let (dx, dy) = (q.x1 - mx, q.x2 - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    // principal direction of the scatter matrix
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let (s, c) = angle.sin_cos();
    points
        .iter()
        .map(|q| ((q.x1 - mx) * -s + (q.x2 - my) * c).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{BasicCurve, Domain};
    use std::f64::consts::TAU;

    #[test]
    fn polar_limit_is_a_cartesian_coordinate() {
        let chart = Chart::new(BasicCurve::point(Domain::new(0.0, TAU).unwrap()));
        let fa = FreeAction::new(0.0);
        let p = ChartPoint::new(2.5, 0.8);
        let v = fa.eval(&chart, p).unwrap();
        assert!((v.s - chart.map_unchecked(p).x2).abs() < 1e-15);
        assert!((v.ds[0].hypot(v.ds[1]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn level_set_of_point_chart_is_horizontal_line() {
        let chart = Chart::new(BasicCurve::point(Domain::new(0.0, TAU).unwrap()));
        let fa = FreeAction::new(0.0);
        let psis: Vec<f64> = (1..30).map(|i| 0.1 * i as f64).collect();
        for sample in fa.level_set_points(&chart, 1.0, &psis).unwrap() {
            match sample {
                LevelSample::Point { q, .. } => assert!((q.x2 - 1.0).abs() < 1e-12),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn parallel_ray_is_skipped() {
        let chart = Chart::new(BasicCurve::point(Domain::new(0.0, TAU).unwrap()));
        let fa = FreeAction::new(0.4);
        let out = fa.level_set_points(&chart, 1.0, &[0.4]).unwrap();
        assert_eq!(out, vec![LevelSample::Parallel { psi: 0.4 }]);
    }

    #[test]
    fn residual_of_collinear_points_vanishes() {
        let pts: Vec<CartesianPoint> = (0..10)
            .map(|i| CartesianPoint::new(i as f64, 2.0 * i as f64 - 1.0))
            .collect();
        assert!(line_fit_residual(&pts) < 1e-13);
        let mut bent = pts.clone();
        bent[5].x2 += 0.1;
        assert!(line_fit_residual(&bent) > 0.01);
    }
}
