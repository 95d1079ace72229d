use crate::chart::{CartesianPoint, Chart, ChartPoint};
use crate::error::{Error, Result};
use crate::hamjac::AngularPotential;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Chart,
    Cartesian,
}

/// Position and momentum in one frame: `(R, psi; p_R, p_psi)` or `(x1, x2; p1, p2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub frame: Frame,
    pub q: [f64; 2],
    pub p: [f64; 2],
    pub mass: f64,
}

impl PhaseState {
    pub fn chart(r: f64, psi: f64, p_r: f64, p_psi: f64, mass: f64) -> Self {
        Self {
            frame: Frame::Chart,
            q: [r, psi],
            p: [p_r, p_psi],
            mass,
        }
    }

    pub fn cartesian(x1: f64, x2: f64, p1: f64, p2: f64, mass: f64) -> Self {
        Self {
            frame: Frame::Cartesian,
            q: [x1, x2],
            p: [p1, p2],
            mass,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::InvalidInput(format!("mass must be positive, got {}", self.mass)));
        }
        if self.q.iter().chain(self.p.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("phase state has non-finite components".into()));
        }
        Ok(())
    }

    pub fn to_chart(&self, chart: &Chart) -> Result<PhaseState> {
        self.check()?;
        match self.frame {
            Frame::Chart => Ok(*self),
            Frame::Cartesian => {
                let q = CartesianPoint::new(self.q[0], self.q[1]);
                let cp = chart.from_cartesian(q, None)?;
                Ok(cartesian_to_chart(chart, cp, self.p, self.mass))
            }
        }
    }

    pub fn to_cartesian(&self, chart: &Chart) -> Result<PhaseState> {
        self.check()?;
        match self.frame {
            Frame::Cartesian => Ok(*self),
            Frame::Chart => {
                let cp = ChartPoint::new(self.q[0], self.q[1]);
                let x = chart.to_cartesian(cp)?;
                let gap = chart.gap(cp);
                if gap <= 0.0 {
                    return Err(Error::MetricDegenerate {
                        r: cp.r,
                        psi: cp.psi,
                        gap,
                    });
                }
                let (s, c) = cp.psi.sin_cos();
                let pn = self.p[1] / gap;
                Ok(PhaseState::cartesian(
                    x.x1,
                    x.x2,
                    self.p[0] * c - pn * s,
                    self.p[0] * s + pn * c,
                    self.mass,
                ))
            }
        }
    }
}

/// Chart momenta of a Cartesian momentum at a known chart point.
pub(crate) fn cartesian_to_chart(chart: &Chart, cp: ChartPoint, p: [f64; 2], mass: f64) -> PhaseState {
    let (s, c) = cp.psi.sin_cos();
    let p_r = p[0] * c + p[1] * s;
    let p_n = -p[0] * s + p[1] * c;
    PhaseState::chart(cp.r, cp.psi, p_r, p_n * chart.gap(cp), mass)
}

/// A potential on the chart, `V(R, psi)`.
pub trait ForceField {
    fn value(&self, r: f64, psi: f64) -> f64;
    /// `(dV/dR, dV/dpsi)`.
    fn gradient(&self, r: f64, psi: f64) -> [f64; 2];
    /// The angular part when the potential depends on `psi` only.
    fn angular(&self) -> Option<&AngularPotential>;
}

impl ForceField for AngularPotential {
    fn value(&self, _r: f64, psi: f64) -> f64 {
        AngularPotential::value(self, psi)
    }

    fn gradient(&self, _r: f64, psi: f64) -> [f64; 2] {
        [0.0, self.derivative(psi)]
    }

    fn angular(&self) -> Option<&AngularPotential> {
        Some(self)
    }
}

/// `V(psi) + k R`: breaks separability, so the invariant check has something to
/// detect. Not meant for physics runs.
#[doc(hidden)]
#[derive(Debug, Clone, PartialEq)]
pub struct RadialRamp {
    pub base: AngularPotential,
    pub k: f64,
}

impl ForceField for RadialRamp {
    fn value(&self, r: f64, psi: f64) -> f64 {
        self.base.value(psi) + self.k * r
    }

    fn gradient(&self, _r: f64, psi: f64) -> [f64; 2] {
        [self.k, self.base.derivative(psi)]
    }

    fn angular(&self) -> Option<&AngularPotential> {
        None
    }
}

/// Total energy of a state in either frame.
pub fn hamiltonian(chart: &Chart, field: &dyn ForceField, state: &PhaseState) -> Result<f64> {
    state.check()?;
    let m = state.mass;
    match state.frame {
        Frame::Chart => {
            let cp = ChartPoint::new(state.q[0], state.q[1]);
            chart.domain().check(cp.psi)?;
            let gap = chart.gap(cp);
            if gap <= 0.0 {
                return Err(Error::MetricDegenerate {
                    r: cp.r,
                    psi: cp.psi,
                    gap,
                });
            }
            let kinetic = (state.p[0].powi(2) + (state.p[1] / gap).powi(2)) / (2.0 * m);
            Ok(kinetic + field.value(cp.r, cp.psi))
        }
        Frame::Cartesian => {
            let cp = chart.from_cartesian(CartesianPoint::new(state.q[0], state.q[1]), None)?;
            let kinetic = (state.p[0].powi(2) + state.p[1].powi(2)) / (2.0 * m);
            Ok(kinetic + field.value(cp.r, cp.psi))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{BasicCurve, Domain};
    use std::f64::consts::TAU;

    fn point_chart() -> Chart {
        Chart::new(BasicCurve::point(Domain::new(0.0, TAU).unwrap()))
    }

    #[test]
    fn chart_energies() {
        let ch = point_chart();
        let zero = AngularPotential::zero();
        let h = hamiltonian(&ch, &zero, &PhaseState::chart(1.0, 0.3, 1.0, 0.0, 1.0)).unwrap();
        assert_eq!(h, 0.5);
        let h = hamiltonian(&ch, &zero, &PhaseState::chart(2.0, 0.0, 0.0, 2.0, 1.0)).unwrap();
        assert_eq!(h, 0.5);
    }

    #[test]
    fn frames_agree_on_energy() {
        let ch = Chart::new(BasicCurve::circle_involute(1.0, Domain::new(0.0, TAU).unwrap()).unwrap());
        let pot = AngularPotential::cosine(0.2);
        let s = PhaseState::chart(2.5, 1.7, 0.3, -0.8, 1.3);
        let x = s.to_cartesian(&ch).unwrap();
        let h1 = hamiltonian(&ch, &pot, &s).unwrap();
        let h2 = hamiltonian(&ch, &pot, &x).unwrap();
        assert!((h1 - h2).abs() < 1e-10);
        let back = x.to_chart(&ch).unwrap();
        for i in 0..2 {
            assert!((back.q[i] - s.q[i]).abs() < 1e-9);
            assert!((back.p[i] - s.p[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_state_rejected() {
        let ch = point_chart();
        let err = hamiltonian(&ch, &AngularPotential::zero(), &PhaseState::chart(0.0, 1.0, 1.0, 0.0, 1.0));
        assert!(matches!(err, Err(Error::MetricDegenerate { .. })));
    }
}
