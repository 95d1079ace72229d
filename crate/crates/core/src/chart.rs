//! The tangent-ray chart `{R, psi}`.
//!
//! A point with chart coordinates `(R, psi)` lies on the ray tangent to the basic curve
//! at the point with tangent angle `psi`, at distance `R - l(psi)` beyond the tangency
//! point, so
//!
//! ```text
//! x1 = R cos psi + B(psi)
//! x2 = R sin psi - A(psi)
//! ```
//!
//! The coordinate lines `R = const` are involutes of the basic curve. The metric is
//! `dR^2 + (R - l)^2 dpsi^2` with orthonormal coframe `nu1 = dR`, `nu2 = (R - l) dpsi`.

use crate::curve::{AntiderivativeCache, BasicCurve, Domain};
use crate::error::{Error, Result};
use crate::roots::{newton_bisect, scan_sign_changes};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub r: f64,
    pub psi: f64,
}

impl ChartPoint {
    pub fn new(r: f64, psi: f64) -> Self {
        Self { r, psi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianPoint {
    pub x1: f64,
    pub x2: f64,
}

impl CartesianPoint {
    pub fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn norm(&self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn distance(&self, other: &CartesianPoint) -> f64 {
        (self.x1 - other.x1).hypot(self.x2 - other.x2)
    }
}

/// Metric, coframe and Jacobian at a chart-interior point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartGeometry {
    pub g_rr: f64,
    pub g_psi_psi: f64,
    /// `nu1` and `nu2` as Cartesian covectors (rows). `nu1 = dR` is the ray direction,
    /// `nu2 = (R - l) dpsi` the unit normal to the ray.
    pub coframe: [[f64; 2]; 2],
    /// `jacobian[i][j] = d x_i / d (R, psi)_j`.
    pub jacobian: [[f64; 2]; 2],
}

/// Interior margin below which `R - l` counts as contact with the basic curve.
pub const DOMAIN_MARGIN: f64 = 1e-9;

/// Sign-change scan resolution of the inverse map.
pub const INVERSE_SCAN_CELLS: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    cache: AntiderivativeCache,
}

impl Chart {
    pub fn new(curve: BasicCurve) -> Self {
        Self {
            cache: AntiderivativeCache::new(curve),
        }
    }

    pub fn curve(&self) -> &BasicCurve {
        self.cache.curve()
    }

    pub fn cache(&self) -> &AntiderivativeCache {
        &self.cache
    }

    pub fn domain(&self) -> Domain {
        self.curve().domain()
    }

    /// `R - l(psi)`, the distance from the tangency point along the ray.
    pub fn gap(&self, p: ChartPoint) -> f64 {
        p.r - self.curve().l(p.psi)
    }

    /// Tangency point of the ray `psi` (the basic-curve point), `psi` clamped to the domain.
    pub fn curve_point(&self, psi: f64) -> CartesianPoint {
        let l = self.curve().l(psi);
        self.map_unchecked(ChartPoint::new(l, psi))
    }

    pub fn to_cartesian(&self, p: ChartPoint) -> Result<CartesianPoint> {
        self.domain().check(p.psi)?;
        let gap = self.gap(p);
        if gap < 0.0 || !p.r.is_finite() {
            return Err(Error::OutsideChart {
                r: p.r,
                psi: p.psi,
                gap,
            });
        }
        Ok(self.map_unchecked(p))
    }

    /// Forward map without domain or side checks (`psi` is clamped to the domain).
    pub fn map_unchecked(&self, p: ChartPoint) -> CartesianPoint {
        let ab = self.cache.eval_clamped(p.psi);
        let (s, c) = p.psi.sin_cos();
        CartesianPoint {
            x1: p.r * c + ab.b,
            x2: p.r * s - ab.a,
        }
    }

    pub fn geometry_at(&self, p: ChartPoint) -> Result<ChartGeometry> {
        self.domain().check(p.psi)?;
        let gap = self.gap(p);
        if gap <= 0.0 || !gap.is_finite() {
            return Err(Error::MetricDegenerate {
                r: p.r,
                psi: p.psi,
                gap,
            });
        }
        let (s, c) = p.psi.sin_cos();
        Ok(ChartGeometry {
            g_rr: 1.0,
            g_psi_psi: gap * gap,
            coframe: [[c, s], [-s, c]],
            jacobian: [[c, -gap * s], [s, gap * c]],
        })
    }

    /// Cross product of `q - c(psi)` with the ray direction, and its derivative in psi
    /// (which equals `(q - c(psi)) . T(psi)`, the signed distance along the ray).
    fn ray_residual(&self, q: CartesianPoint, psi: f64) -> (f64, f64) {
        let c = self.curve_point(psi);
        let (s, co) = psi.sin_cos();
        let (d1, d2) = (q.x1 - c.x1, q.x2 - c.x2);
        (d1 * s - d2 * co, d1 * co + d2 * s)
    }

    fn polish(&self, q: CartesianPoint, lo: f64, hi: f64) -> f64 {
        let ftol = 1e-13 * (1.0 + q.norm());
        if lo == hi {
            return lo;
        }
        newton_bisect(|psi| self.ray_residual(q, psi), lo, hi, 1e-15, ftol)
    }

    fn chart_point_on_ray(&self, q: CartesianPoint, psi: f64) -> (ChartPoint, f64) {
        let (_, along) = self.ray_residual(q, psi);
        let l = self.curve().l(psi);
        (ChartPoint::new(l + along, psi), along)
    }

    /// Numerical inverse of the forward map.
    ///
    /// Scans `bracket` (default: the whole domain) for rays through `q`, keeps those on
    /// which `q` lies beyond the tangency point, and fails if none or several remain.
    pub fn from_cartesian(&self, q: CartesianPoint, bracket: Option<(f64, f64)>) -> Result<ChartPoint> {
        if !q.x1.is_finite() || !q.x2.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite point ({}, {})", q.x1, q.x2)));
        }
        let dom = self.domain();
        let (lo, hi) = match bracket {
            Some((a, b)) => {
                let (a, b) = (dom.clamp(a.min(b)), dom.clamp(a.max(b)));
                if a >= b {
                    return Err(Error::InvalidInput(format!(
                        "bracket [{a}, {b}] has no overlap with the domain"
                    )));
                }
                (a, b)
            }
            None => (dom.min, dom.max),
        };
        let brackets = scan_sign_changes(|psi| self.ray_residual(q, psi).0, lo, hi, INVERSE_SCAN_CELLS);
        if brackets.is_empty() {
            return Err(Error::NotInChart {
                x1: q.x1,
                x2: q.x2,
                reason: "no tangent ray of the basic curve passes through it".into(),
            });
        }
        let scale = 1.0 + q.norm();
        let mut valid: Vec<ChartPoint> = Vec::new();
        let mut behind = false;
        for (a, b) in brackets {
            let psi = self.polish(q, a, b);
            let (p, along) = self.chart_point_on_ray(q, psi);
            if along > 1e-14 * scale {
                if !valid.iter().any(|v| (v.psi - p.psi).abs() < 1e-9) {
                    valid.push(p);
                }
            } else {
                behind = true;
            }
        }
        match valid.len() {
            0 => Err(Error::NotInChart {
                x1: q.x1,
                x2: q.x2,
                reason: if behind {
                    "it lies behind the tangency point of every ray through it".into()
                } else {
                    "no tangent ray of the basic curve passes through it".into()
                },
            }),
            1 => Ok(valid[0]),
            _ => Err(Error::Ambiguous {
                x1: q.x1,
                x2: q.x2,
                candidates: valid.iter().map(|p| p.psi).collect(),
            }),
        }
    }

    /// Newton iteration for the inverse map started from a nearby ray. Returns `None`
    /// when the iteration leaves the domain, lands behind the tangency point, or fails
    /// to converge; callers then fall back to [`Chart::from_cartesian`].
    pub fn from_cartesian_near(&self, q: CartesianPoint, guess: f64) -> Option<ChartPoint> {
        let dom = self.domain();
        let ftol = 1e-13 * (1.0 + q.norm());
        let mut psi = dom.clamp(guess);
        for _ in 0..30 {
            let (h, dh) = self.ray_residual(q, psi);
            if dh <= 0.0 {
                return None;
            }
            let step = h / dh;
            psi -= step;
            if !dom.contains(psi) {
                return None;
            }
            if step.abs() < 1e-15 || h.abs() <= ftol * 1e-2 {
                let (h, _) = self.ray_residual(q, psi);
                if h.abs() > ftol {
                    continue;
                }
                let (p, along) = self.chart_point_on_ray(q, psi);
                return (along > 0.0).then_some(p);
            }
        }
        None
    }
}
