use crate::error::{Error, Result};
use crate::interp::HermiteSpline;

/// Angular potential presets.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    Zero,
    /// `V = k cos psi`
    Cosine { k: f64 },
    /// `V = (k / 2) (psi - psi_c)^2`
    Quadratic { k: f64, psi_c: f64 },
    /// Tabulated `(psi, V)` pairs, C1 cubic interpolation.
    Sampled(Vec<(f64, f64)>),
}

/// A potential depending on the ray angle only, `V = V(psi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularPotential {
    kind: PotentialKind,
    spline: Option<HermiteSpline>,
}

impl AngularPotential {
    pub fn zero() -> Self {
        Self {
            kind: PotentialKind::Zero,
            spline: None,
        }
    }

    pub fn cosine(k: f64) -> Self {
        Self {
            kind: PotentialKind::Cosine { k },
            spline: None,
        }
    }

    pub fn quadratic(k: f64, psi_c: f64) -> Self {
        Self {
            kind: PotentialKind::Quadratic { k, psi_c },
            spline: None,
        }
    }

    pub fn sampled(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidInput("sampled potential needs at least two samples".into()));
        }
        if samples.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidInput("sampled potential contains non-finite values".into()));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidInput(
                "sampled potential angles must increase strictly".into(),
            ));
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = samples.iter().copied().unzip();
        Ok(Self {
            kind: PotentialKind::Sampled(samples),
            spline: Some(HermiteSpline::parabolic(xs, ys)),
        })
    }

    pub fn from_kind(kind: PotentialKind) -> Result<Self> {
        match kind {
            PotentialKind::Zero => Ok(Self::zero()),
            PotentialKind::Cosine { k } => Ok(Self::cosine(k)),
            PotentialKind::Quadratic { k, psi_c } => Ok(Self::quadratic(k, psi_c)),
            PotentialKind::Sampled(s) => Self::sampled(s),
        }
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, PotentialKind::Zero)
    }

    /// Angle range covered by a sampled potential.
    pub fn sample_range(&self) -> Option<(f64, f64)> {
        self.spline.as_ref().map(|s| {
            let k = s.knots();
            (k[0], k[k.len() - 1])
        })
    }

    fn clamp(&self, psi: f64) -> f64 {
        match self.sample_range() {
            Some((lo, hi)) => psi.clamp(lo, hi),
            None => psi,
        }
    }

    pub fn value(&self, psi: f64) -> f64 {
        match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::Cosine { k } => k * psi.cos(),
            PotentialKind::Quadratic { k, psi_c } => 0.5 * k * (psi - psi_c).powi(2),
            PotentialKind::Sampled(_) => self.spline.as_ref().expect("spline").eval(self.clamp(psi)).0,
        }
    }

    pub fn derivative(&self, psi: f64) -> f64 {
        match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::Cosine { k } => -k * psi.sin(),
            PotentialKind::Quadratic { k, psi_c } => k * (psi - psi_c),
            PotentialKind::Sampled(_) => self.spline.as_ref().expect("spline").eval(self.clamp(psi)).1,
        }
    }

    pub fn second_derivative(&self, psi: f64) -> f64 {
        match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::Cosine { k } => -k * psi.cos(),
            PotentialKind::Quadratic { k, .. } => *k,
            PotentialKind::Sampled(_) => self
                .spline
                .as_ref()
                .expect("spline")
                .second_derivative(self.clamp(psi)),
        }
    }
}

/// Mass and energy of the particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSetup {
    pub mass: f64,
    pub energy: f64,
}

impl ProblemSetup {
    pub fn new(mass: f64, energy: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidInput(format!("mass must be positive, got {mass}")));
        }
        if !energy.is_finite() {
            return Err(Error::InvalidInput(format!("energy must be finite, got {energy}")));
        }
        Ok(Self { mass, energy })
    }

    /// `2 m (E - V(psi))` without the sign check.
    pub fn p2(&self, pot: &AngularPotential, psi: f64) -> f64 {
        2.0 * self.mass * (self.energy - pot.value(psi))
    }

    /// `p`, `p'` and `p''` at `psi`; requires `p2 > 0`.
    pub(crate) fn momentum_profile(&self, pot: &AngularPotential, psi: f64) -> Result<MomentumProfile> {
        let p2 = self.p2(pot, psi);
        if !(p2 > 0.0) {
            return Err(Error::Forbidden {
                psi,
                deficit: self.energy - pot.value(psi),
            });
        }
        let p = p2.sqrt();
        let dp = -self.mass * pot.derivative(psi) / p;
        let ddp = (-self.mass * pot.second_derivative(psi) - dp * dp) / p;
        Ok(MomentumProfile { p, dp, ddp })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct MomentumProfile {
    pub p: f64,
    pub dp: f64,
    pub ddp: f64,
}

/// `p^2(psi) = 2 m (E - V(psi))`, the squared momentum allowed on the ray `psi`.
pub fn momentum_square(setup: &ProblemSetup, pot: &AngularPotential, psi: f64) -> Result<f64> {
    let p2 = setup.p2(pot, psi);
    if p2 <= 0.0 || !p2.is_finite() {
        return Err(Error::Forbidden {
            psi,
            deficit: setup.energy - pot.value(psi),
        });
    }
    Ok(p2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn free_normalization() {
        let s = ProblemSetup::new(0.5, 1.0).unwrap();
        for psi in [0.0, 1.0, 3.0] {
            assert_eq!(momentum_square(&s, &AngularPotential::zero(), psi).unwrap(), 1.0);
        }
    }

    #[test]
    fn cosine_at_quarter_turn() {
        let s = ProblemSetup::new(1.0, 1.0).unwrap();
        let p2 = momentum_square(&s, &AngularPotential::cosine(0.1), FRAC_PI_2).unwrap();
        assert!((p2 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn quadratic_forbidden_region() {
        let s = ProblemSetup::new(1.0, 0.02).unwrap();
        let pot = AngularPotential::quadratic(1.0, 0.0);
        assert!((pot.value(0.3) - 0.045).abs() < 1e-15);
        match momentum_square(&s, &pot, 0.3) {
            Err(Error::Forbidden { psi, .. }) => assert_eq!(psi, 0.3),
            other => panic!("expected forbidden, got {other:?}"),
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let samples: Vec<(f64, f64)> = (0..60).map(|i| (0.1 * i as f64, (0.1 * i as f64).sin())).collect();
        let pots = [
            AngularPotential::cosine(0.3),
            AngularPotential::quadratic(2.0, 0.7),
            AngularPotential::sampled(samples).unwrap(),
        ];
        let h = 1e-6;
        for pot in &pots {
            for i in 1..50 {
                let psi = 0.11 * i as f64;
                let fd = (pot.value(psi + h) - pot.value(psi - h)) / (2.0 * h);
                assert!((fd - pot.derivative(psi)).abs() < 1e-6, "{pot:?} at {psi}");
            }
        }
    }

    #[test]
    fn rejects_bad_setup() {
        assert!(ProblemSetup::new(0.0, 1.0).is_err());
        assert!(ProblemSetup::new(1.0, f64::NAN).is_err());
        assert!(AngularPotential::sampled(vec![(0.0, 1.0)]).is_err());
    }
}
