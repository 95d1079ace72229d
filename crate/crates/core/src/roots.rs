//! Bracketed root finding: a sign-change scan plus safeguarded Newton.

/// Refines a root of `f` inside `[a, b]`, where `f(a)` and `f(b)` have opposite signs
/// (or one of them vanishes). `f` returns the value and its derivative.
///
/// Newton steps are taken while they stay inside the shrinking bracket; otherwise the
/// midpoint is used. Stops when `|f| <= ftol` or the bracket is narrower than `xtol`.
pub fn newton_bisect<F: FnMut(f64) -> (f64, f64)>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    xtol: f64,
    ftol: f64,
) -> f64 {
    let (mut fa, _) = f(a);
    if fa == 0.0 {
        return a;
    }
    let (fb, _) = f(b);
    if fb == 0.0 {
        return b;
    }
    debug_assert!(fa * fb < 0.0, "root not bracketed");
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let newton = if dfx != 0.0 { x - fx / dfx } else { f64::NAN };
        let next = if newton.is_finite() && newton >= lo && newton <= hi {
            newton
        } else {
            0.5 * (a + b)
        };
        if fx.abs() <= ftol || (next - x).abs() <= xtol || hi - lo <= xtol {
            return next;
        }
        x = next;
    }
    x
}

/// Subintervals `[x_i, x_{i+1}]` of a uniform `n`-cell partition of `[a, b]` on which
/// `f` changes sign, plus exact zeros found at partition points.
pub fn scan_sign_changes<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let n = n.max(1);
    let xs: Vec<f64> = (0..=n)
        .map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for i in 0..n {
        let (v0, v1) = (vals[i], vals[i + 1]);
        if v0 == 0.0 {
            out.push((xs[i], xs[i]));
        } else if v0 * v1 < 0.0 {
            out.push((xs[i], xs[i + 1]));
        }
    }
    if vals[n] == 0.0 {
        out.push((xs[n], xs[n]));
    }
    out
}
