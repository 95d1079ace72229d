//! Tangent-ray coordinate charts on the plane and Hamilton-Jacobi separation for
//! angular potentials.

pub mod chart;
pub mod cli;
pub mod curve;
pub mod dynamics;
pub mod error;
pub mod hamjac;
pub mod interp;
pub mod ode;
pub mod quad;
pub mod roots;

pub use chart::{CartesianPoint, Chart, ChartGeometry, ChartPoint};
pub use curve::{make_curve, AntiderivativeCache, BasicCurve, CurveKind, CurveSpec, Domain};
pub use error::{Error, ErrorClass, Result};
