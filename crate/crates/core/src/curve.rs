//! The basic curve, described by its arc length `l(psi)` as a function of the tangent
//! angle, and the antiderivatives of `l cos` and `l sin` that place it in the plane.
//!
//! Only `l` matters for the chart metric, so curves are never stored parametrically.
//! The curve point with tangent angle `psi` sits at
//! `(l cos psi + B(psi), l sin psi - A(psi))` where
//! `A(psi) = int_{psi_min}^{psi} l(t) cos t dt` and `B(psi) = int l(t) sin t dt`.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::interp::{locate, HermiteSpline};
use crate::quad::gauss_legendre2;

/// Closed angular interval of tangent angles, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub min: f64,
    pub max: f64,
}

impl Domain {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidCurve(format!(
                "domain bounds must be finite, got [{min}, {max}]"
            )));
        }
        if min >= max {
            return Err(Error::InvalidCurve(format!(
                "domain must satisfy psi_min < psi_max, got [{min}, {max}]"
            )));
        }
        if max - min > TAU * (1.0 + 1e-12) {
            return Err(Error::InvalidCurve(format!(
                "domain [{min}, {max}] spans more than one full turn"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn contains(&self, psi: f64) -> bool {
        psi >= self.min && psi <= self.max
    }

    pub fn check(&self, psi: f64) -> Result<()> {
        if self.contains(psi) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                psi,
                min: self.min,
                max: self.max,
            })
        }
    }

    pub fn clamp(&self, psi: f64) -> f64 {
        psi.clamp(self.min, self.max)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.min + self.max)
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }
}

/// What kind of curve generates the chart.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveKind {
    /// Degenerate curve: all rays pass through one point, giving polar coordinates.
    Point,
    /// Circle of radius `a`, `l = a (psi - psi_min)`.
    CircleInvolute { a: f64 },
    /// `l = a (psi - psi_min)^k / k`, curvature radius `a (psi - psi_min)^(k-1)`.
    Power { a: f64, k: f64 },
    /// Tabulated `(psi, l)` pairs interpolated by a monotone cubic.
    Sampled(Vec<(f64, f64)>),
}

/// Input to [`make_curve`]. Sampled curves take their domain from the samples and
/// ignore `domain`; presets require it.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    pub kind: CurveKind,
    pub domain: Option<(f64, f64)>,
}

/// `l` and its derivative (the curvature radius) at one tangent angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveGeometry {
    pub l: f64,
    pub l_prime: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasicCurve {
    kind: CurveKind,
    domain: Domain,
    spline: Option<HermiteSpline>,
}

pub fn make_curve(spec: &CurveSpec) -> Result<BasicCurve> {
    let preset_domain = || -> Result<Domain> {
        let (lo, hi) = spec
            .domain
            .ok_or_else(|| Error::InvalidCurve("preset curves need a domain".into()))?;
        Domain::new(lo, hi)
    };
    match &spec.kind {
        CurveKind::Point => Ok(BasicCurve::point(preset_domain()?)),
        CurveKind::CircleInvolute { a } => BasicCurve::circle_involute(*a, preset_domain()?),
        CurveKind::Power { a, k } => BasicCurve::power(*a, *k, preset_domain()?),
        CurveKind::Sampled(samples) => BasicCurve::sampled(samples.clone()),
    }
}

impl BasicCurve {
    pub fn point(domain: Domain) -> Self {
        Self {
            kind: CurveKind::Point,
            domain,
            spline: None,
        }
    }

    pub fn circle_involute(a: f64, domain: Domain) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidCurve(format!("circle radius must be positive, got {a}")));
        }
        Ok(Self {
            kind: CurveKind::CircleInvolute { a },
            domain,
            spline: None,
        })
    }

    pub fn power(a: f64, k: f64, domain: Domain) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidCurve(format!("power scale must be positive, got {a}")));
        }
        if !(k.is_finite() && k >= 1.0) {
            return Err(Error::InvalidCurve(format!("power exponent must be >= 1, got {k}")));
        }
        Ok(Self {
            kind: CurveKind::Power { a, k },
            domain,
            spline: None,
        })
    }

    pub fn sampled(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidCurve(format!(
                "sampled curve needs at least two samples, got {}",
                samples.len()
            )));
        }
        for (i, &(psi, l)) in samples.iter().enumerate() {
            if !psi.is_finite() || !l.is_finite() {
                return Err(Error::InvalidCurve(format!("sample {i} is not finite: ({psi}, {l})")));
            }
        }
        for (i, w) in samples.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidCurve(format!(
                    "sample angles must increase strictly (samples {i} and {})",
                    i + 1
                )));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::InvalidCurve(format!(
                    "arc length decreases between samples {i} and {} ({} -> {}); the basic curve must be convex",
                    i + 1,
                    w[0].1,
                    w[1].1
                )));
            }
        }
        let domain = Domain::new(samples[0].0, samples[samples.len() - 1].0)?;
        let (xs, ys): (Vec<f64>, Vec<f64>) = samples.iter().copied().unzip();
        let spline = HermiteSpline::monotone(xs, ys);
        Ok(Self {
            kind: CurveKind::Sampled(samples),
            domain,
            spline: Some(spline),
        })
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_point(&self) -> bool {
        matches!(self.kind, CurveKind::Point)
    }

    /// Sample knots of a tabulated curve (empty for presets).
    pub fn knots(&self) -> &[f64] {
        self.spline.as_ref().map_or(&[], |s| s.knots())
    }

    pub fn eval_geometry(&self, psi: f64) -> Result<CurveGeometry> {
        self.domain.check(psi)?;
        Ok(self.geometry(psi))
    }

    /// `l` and `l'` without the domain check; `psi` is clamped to the domain.
    pub fn geometry(&self, psi: f64) -> CurveGeometry {
        let psi = self.domain.clamp(psi);
        let t = psi - self.domain.min;
        match &self.kind {
            CurveKind::Point => CurveGeometry { l: 0.0, l_prime: 0.0 },
            CurveKind::CircleInvolute { a } => CurveGeometry {
                l: a * t,
                l_prime: *a,
            },
            CurveKind::Power { a, k } => CurveGeometry {
                l: a * t.powf(*k) / k,
                l_prime: a * t.powf(k - 1.0),
            },
            CurveKind::Sampled(_) => {
                let (l, d) = self.spline.as_ref().expect("sampled curve has a spline").eval(psi);
                CurveGeometry {
                    l,
                    l_prime: d.max(0.0),
                }
            }
        }
    }

    pub fn l(&self, psi: f64) -> f64 {
        self.geometry(psi).l
    }

    /// Second derivative of `l`.
    pub fn l_second(&self, psi: f64) -> f64 {
        let psi = self.domain.clamp(psi);
        let t = psi - self.domain.min;
        match &self.kind {
            CurveKind::Point | CurveKind::CircleInvolute { .. } => 0.0,
            CurveKind::Power { a, k } => {
                if *k == 1.0 {
                    0.0
                } else {
                    a * (k - 1.0) * t.powf(k - 2.0)
                }
            }
            CurveKind::Sampled(_) => self.spline.as_ref().expect("spline").second_derivative(psi),
        }
    }
}

/// Parses a two-column `psi,l` CSV. A non-numeric first line is taken as a header.
pub fn parse_samples_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 2 {
            return Err(Error::InvalidCurve(format!(
                "line {}: expected two comma-separated columns",
                lineno + 1
            )));
        }
        match (cols[0].parse::<f64>(), cols[1].parse::<f64>()) {
            (Ok(psi), Ok(l)) => out.push((psi, l)),
            _ if out.is_empty() && lineno == 0 => continue,
            _ => {
                return Err(Error::InvalidCurve(format!(
                    "line {}: cannot parse numbers from '{line}'",
                    lineno + 1
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidCurve("no samples found".into()));
    }
    Ok(out)
}

/// `A(psi)` and `B(psi)` at one angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Antiderivatives {
    pub a: f64,
    pub b: f64,
}

/// Tabulated `A = int l cos` and `B = int l sin` from `psi_min`.
///
/// Knots are spaced at most `MAX_SPACING` apart and include every sample knot of a
/// tabulated curve, so the integrand is smooth on each cell. Values between knots are
/// the knot value plus a Gauss-Legendre panel over the partial cell, which keeps `A`
/// and `B` continuous and consistent with `l cos`, `l sin` to rounding level.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiderivativeCache {
    curve: BasicCurve,
    grid: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
    tol: f64,
}

const MAX_SPACING: f64 = 0.01;

impl AntiderivativeCache {
    pub fn new(curve: BasicCurve) -> Self {
        let dom = curve.domain();
        let mut grid = Vec::new();
        let push_uniform = |lo: f64, hi: f64, grid: &mut Vec<f64>| {
            let cells = ((hi - lo) / MAX_SPACING).ceil().max(1.0) as usize;
            for i in 0..cells {
                grid.push(lo + (hi - lo) * i as f64 / cells as f64);
            }
        };
        let knots = curve.knots().to_vec();
        if knots.is_empty() {
            push_uniform(dom.min, dom.max, &mut grid);
        } else {
            for w in knots.windows(2) {
                push_uniform(w[0], w[1], &mut grid);
            }
        }
        grid.push(dom.max);

        let mut a = Vec::with_capacity(grid.len());
        let mut b = Vec::with_capacity(grid.len());
        let (mut acc_a, mut acc_b) = (0.0, 0.0);
        a.push(0.0);
        b.push(0.0);
        for w in grid.windows(2) {
            let (da, db) = cell_integral(&curve, w[0], w[1]);
            acc_a += da;
            acc_b += db;
            a.push(acc_a);
            b.push(acc_b);
        }
        Self {
            curve,
            grid,
            a,
            b,
            tol: 1e-10,
        }
    }

    pub fn curve(&self) -> &BasicCurve {
        &self.curve
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn eval(&self, psi: f64) -> Result<Antiderivatives> {
        self.curve.domain().check(psi)?;
        Ok(self.eval_clamped(psi))
    }

    /// Evaluation with `psi` clamped into the domain.
    pub fn eval_clamped(&self, psi: f64) -> Antiderivatives {
        let psi = self.curve.domain().clamp(psi);
        let i = locate(&self.grid, psi);
        let (da, db) = cell_integral(&self.curve, self.grid[i], psi);
        Antiderivatives {
            a: self.a[i] + da,
            b: self.b[i] + db,
        }
    }
}

fn cell_integral(curve: &BasicCurve, lo: f64, hi: f64) -> (f64, f64) {
    if curve.is_point() {
        return (0.0, 0.0);
    }
    gauss_legendre2(
        |t| {
            let l = curve.geometry(t).l;
            let (s, c) = t.sin_cos();
            (l * c, l * s)
        },
        lo,
        hi,
    )
}
