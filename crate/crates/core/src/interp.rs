//! Piecewise cubic Hermite interpolation.
//!
//! Knot slopes come either from the three-point parabolic formula (exact for
//! quadratics on any knot spacing) or from the same estimate passed through the
//! Fritsch-Carlson limiter, which keeps monotone data monotone.

/// Value and first derivative of the cubic Hermite segment on `[x0, x1]`.
pub fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> (f64, f64) {
    let h = x1 - x0;
    if h == 0.0 {
        return (y0, d0);
    }
    let s = (x - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = 6.0 * s2 - 6.0 * s;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = -6.0 * s2 + 6.0 * s;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let deriv = (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;
    (value, deriv)
}

/// Second derivative of the cubic Hermite segment on `[x0, x1]`.
pub fn hermite_second(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    if h == 0.0 {
        return 0.0;
    }
    let s = (x - x0) / h;
    let a = (12.0 * s - 6.0) * (y0 - y1) / (h * h);
    let b = (6.0 * s - 4.0) * d0 / h;
    let c = (6.0 * s - 2.0) * d1 / h;
    a + b + c
}

/// Index `i` such that `xs[i] <= x <= xs[i + 1]`, clamped to the valid segment range.
pub fn locate(xs: &[f64], x: f64) -> usize {
    debug_assert!(xs.len() >= 2);
    let last = xs.len() - 2;
    if x <= xs[0] {
        return 0;
    }
    if x >= xs[last + 1] {
        return last;
    }
    // partition_point gives the first knot strictly greater than x
    let idx = xs.partition_point(|&k| k <= x);
    (idx - 1).min(last)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermiteSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl HermiteSpline {
    /// Builds a spline from knots, values and slopes. Knots must be strictly increasing
    /// and all three slices the same length (at least two).
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, ds: Vec<f64>) -> Self {
        assert!(xs.len() >= 2 && xs.len() == ys.len() && xs.len() == ds.len());
        Self { xs, ys, ds }
    }

    pub fn parabolic(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let ds = parabolic_slopes(&xs, &ys);
        Self::new(xs, ys, ds)
    }

    pub fn monotone(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let mut ds = parabolic_slopes(&xs, &ys);
        fritsch_carlson(&xs, &ys, &mut ds);
        Self::new(xs, ys, ds)
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    pub fn eval(&self, x: f64) -> (f64, f64) {
        let i = locate(&self.xs, x);
        hermite(
            self.xs[i],
            self.xs[i + 1],
            self.ys[i],
            self.ys[i + 1],
            self.ds[i],
            self.ds[i + 1],
            x,
        )
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let i = locate(&self.xs, x);
        hermite_second(
            self.xs[i],
            self.xs[i + 1],
            self.ys[i],
            self.ys[i + 1],
            self.ds[i],
            self.ds[i + 1],
            x,
        )
    }
}

fn parabolic_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let secant = |i: usize| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    if n == 2 {
        let d = secant(0);
        return vec![d, d];
    }
    let mut ds = vec![0.0; n];
    for k in 1..n - 1 {
        let h0 = xs[k] - xs[k - 1];
        let h1 = xs[k + 1] - xs[k];
        ds[k] = (h1 * secant(k - 1) + h0 * secant(k)) / (h0 + h1);
    }
    let (h0, h1) = (xs[1] - xs[0], xs[2] - xs[1]);
    ds[0] = ((2.0 * h0 + h1) * secant(0) - h0 * secant(1)) / (h0 + h1);
    let (h0, h1) = (xs[n - 1] - xs[n - 2], xs[n - 2] - xs[n - 3]);
    ds[n - 1] = ((2.0 * h0 + h1) * secant(n - 2) - h0 * secant(n - 3)) / (h0 + h1);
    ds
}

fn fritsch_carlson(xs: &[f64], ys: &[f64], ds: &mut [f64]) {
    let n = xs.len();
    let secants: Vec<f64> = (0..n - 1)
        .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
        .collect();
    for k in 1..n - 1 {
        if secants[k - 1] * secants[k] <= 0.0 {
            ds[k] = 0.0;
        }
    }
    if ds[0] * secants[0] < 0.0 || secants[0] == 0.0 {
        ds[0] = 0.0;
    }
    if ds[n - 1] * secants[n - 2] < 0.0 || secants[n - 2] == 0.0 {
        ds[n - 1] = 0.0;
    }
    for (k, &delta) in secants.iter().enumerate() {
        if delta == 0.0 {
            ds[k] = 0.0;
            ds[k + 1] = 0.0;
            continue;
        }
        let alpha = ds[k] / delta;
        let beta = ds[k + 1] / delta;
        let norm2 = alpha * alpha + beta * beta;
        if norm2 > 9.0 {
            let tau = 3.0 / norm2.sqrt();
            ds[k] = tau * alpha * delta;
            ds[k + 1] = tau * beta * delta;
        }
    }
}
