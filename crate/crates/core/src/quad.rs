//! Fixed-order Gauss-Legendre quadrature.

use std::sync::OnceLock;

const ORDER: usize = 10;

/// Nodes and weights on `[-1, 1]`, computed once by Newton iteration on P_n.
fn rule() -> &'static ([f64; ORDER], [f64; ORDER]) {
    static RULE: OnceLock<([f64; ORDER], [f64; ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Integrates `f` over `[a, b]` with a single Gauss-Legendre panel.
///
/// The result is a smooth function of both endpoints, which matters for callers that
/// finite-difference accumulated integrals.
pub fn gauss_legendre<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (nodes, weights) = rule();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Two-output variant of [`gauss_legendre`] sharing the abscissae.
pub fn gauss_legendre2<F: FnMut(f64) -> (f64, f64)>(mut f: F, a: f64, b: f64) -> (f64, f64) {
    if a == b {
        return (0.0, 0.0);
    }
    let (nodes, weights) = rule();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let (mut s0, mut s1) = (0.0, 0.0);
    for (x, w) in nodes.iter().zip(weights) {
        let (u, v) = f(mid + half * x);
        s0 += w * u;
        s1 += w * v;
    }
    (s0 * half, s1 * half)
}

/// Composite Gauss-Legendre over `panels` equal panels.
pub fn composite<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + i as f64 * h;
            let hi = if i + 1 == panels { b } else { lo + h };
            gauss_legendre(&mut f, lo, hi)
        })
        .sum()
}
