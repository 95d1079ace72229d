//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
//!
//! cargo test --test acceptance

mod common;

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use common::{fd_jacobian, interior_point, involute_chart, jacobi_cases, jacobi_flow_distance, point_chart, presets, state_on_ray};
use rand::{Rng, SeedableRng};
use raychart::dynamics::{
    evaluate_invariant, flow, spread, transported_constant, FlowConfig, PhaseState, RadialRamp, TrajectorySamples,
};
use raychart::hamjac::{
    line_fit_residual, solve_f, AngularPotential, FreeAction, InitialData, LevelSample, ProblemSetup, SolveOptions,
};
use raychart::{CartesianPoint, Chart, ChartPoint};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(seed: u64) -> rand::rngs::StdRng {
    rand::rngs::StdRng::seed_from_u64(seed)
}

fn round_trip() -> Outcome {
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for (_, chart) in presets() {
        for _ in 0..1000 {
            let p = interior_point(&chart, r.gen(), r.gen());
            match chart.to_cartesian(p).and_then(|q| chart.from_cartesian(q, None)) {
                Ok(back) => worst = worst.max((back.r - p.r).abs()).max((back.psi - p.psi).abs()),
                Err(_) => failures += 1,
            }
        }
    }
    outcome(
        worst <= 1e-9 && failures == 0,
        format!("max componentwise error {worst:.2e} over 4x1000 points, {failures} inversion failures (tol 1e-9)"),
    )
}

fn metric_law() -> Outcome {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for (_, chart) in presets() {
        for _ in 0..100 {
            let p = interior_point(&chart, r.gen(), r.gen());
            let (dr, dpsi) = fd_jacobian(&chart, p);
            let gap = chart.gap(p);
            let e = [
                (dr[0] * dr[0] + dr[1] * dr[1] - 1.0).abs(),
                (dr[0] * dpsi[0] + dr[1] * dpsi[1]).abs(),
                (dpsi[0] * dpsi[0] + dpsi[1] * dpsi[1] - gap * gap).abs() / (1.0 + gap * gap),
            ];
            worst = e.iter().fold(worst, |a, &b| a.max(b));
        }
    }
    outcome(worst <= 1e-6, format!("max metric deviation {worst:.2e} over 4x100 points (tol 1e-6)"))
}

fn free_action() -> Outcome {
    let mut r = rng(3);
    let mut grad_err: f64 = 0.0;
    let mut line_err: f64 = 0.0;
    let mut short = 0;
    for chart in [point_chart(), involute_chart()] {
        for _ in 0..5 {
            let psi0 = r.gen_range(0.0..PI);
            let fa = FreeAction::new(psi0);
            for _ in 0..20 {
                let psi = r.gen_range(0.3..6.0);
                let p = ChartPoint::new(chart.curve().l(psi) + r.gen_range(0.5..4.0), psi);
                let q = chart.to_cartesian(p).unwrap();
                let s_at = |x1: f64, x2: f64| {
                    let c = chart.from_cartesian_near(CartesianPoint::new(x1, x2), psi).unwrap();
                    fa.eval(&chart, c).unwrap().s
                };
                let gx = common::d5_scalar(|x| s_at(x, q.x2), q.x1, 1e-4);
                let gy = common::d5_scalar(|y| s_at(q.x1, y), q.x2, 1e-4);
                grad_err = grad_err.max((gx.hypot(gy) - 1.0).abs());
            }
            // level S0 chosen so every sample lands at least one unit off the curve
            let psis: Vec<f64> = (0..50).map(|i| psi0 + 0.15 + (PI - 0.3) * i as f64 / 49.0).collect();
            let s0 = psis
                .iter()
                .map(|&psi| {
                    let on = ChartPoint::new(chart.curve().l(psi) + 1.0, psi);
                    fa.eval(&chart, on).unwrap().s - (psi - psi0).sin() + 1.0
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let pts: Vec<CartesianPoint> = fa
                .level_set_points(&chart, s0, &psis)
                .unwrap()
                .into_iter()
                .filter_map(|s| match s {
                    LevelSample::Point { q, .. } => Some(q),
                    _ => None,
                })
                .collect();
            if pts.len() < 50 {
                short += 1;
            }
            line_err = line_err.max(line_fit_residual(&pts));
        }
    }
    outcome(
        grad_err <= 1e-6 && line_err <= 1e-8 && short == 0,
        format!("| |dS| - 1 | max {grad_err:.2e} (tol 1e-6); level-set line residual max {line_err:.2e} (tol 1e-8), 10 sets of 50 points"),
    )
}

fn cartesian_pair() -> Outcome {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for (_, chart) in presets() {
        for _ in 0..100 {
            let p = interior_point(&chart, r.gen(), r.gen());
            let (dr, dpsi) = fd_jacobian(&chart, p);
            let gap = chart.gap(p);
            let inner = |i: usize, j: usize| dr[i] * dr[j] + dpsi[i] * dpsi[j] / (gap * gap);
            worst = worst.max(inner(0, 1).abs()).max((inner(0, 0) - 1.0).abs()).max((inner(1, 1) - 1.0).abs());
        }
    }
    outcome(worst <= 1e-9, format!("max deviation from orthonormality {worst:.2e} over 4x100 points (tol 1e-9)"))
}

fn reduced_equation() -> Outcome {
    let setup = ProblemSetup::new(1.0, 1.0).unwrap();
    let pots = [
        AngularPotential::zero(),
        AngularPotential::cosine(0.2),
        AngularPotential::quadratic(0.1, 1.5),
    ];
    let mut resid: f64 = 0.0;
    for (_, chart) in presets() {
        for pot in &pots {
            let dom = chart.domain();
            let init = InitialData::new(dom.min + 0.3 * dom.width(), 0.0, 1);
            let range = (dom.min + 0.1 * dom.width(), dom.min + 0.6 * dom.width());
            let sol = solve_f(chart.curve(), &setup, pot, init, range, &SolveOptions::default()).unwrap();
            for row in sol.table() {
                resid = resid.max(row.constraint_residual.abs() / setup.p2(pot, row.psi));
            }
        }
    }
    // free case, p = sqrt(2), through the flip at pi/2
    let chart = point_chart();
    let p = 2f64.sqrt();
    let sol = solve_f(
        chart.curve(),
        &setup,
        &AngularPotential::zero(),
        InitialData::new(0.3, p * 0.3f64.sin(), 1),
        (0.0, PI),
        &SolveOptions::default(),
    )
    .unwrap();
    let flips = sol.contacts().len();
    let mut free_err: f64 = 0.0;
    for i in 0..=1000 {
        let psi = PI * i as f64 / 1000.0;
        free_err = free_err.max((sol.f(psi).unwrap().0 - p * (psi - sol.c()).sin()).abs());
    }
    outcome(
        resid <= 1e-9 && free_err <= 1e-8 && flips == 1 && sol.c().abs() <= 1e-8,
        format!("constraint residual max {resid:.2e} p^2 (tol 1e-9); free sine error {free_err:.2e} (tol 1e-8) across {flips} flip, C = {:.1e}", sol.c()),
    )
}

/// Crossing statistics of the best trajectory found on the circle involute with
/// `V = 0.2 cos psi`, `m = 1`, `E = 1`.
struct Search {
    trajectories: usize,
    best_count: usize,
    best_spread: f64,
    best: Option<(PhaseState, f64, i8)>,
}

fn involute_cosine() -> (Chart, AngularPotential) {
    (involute_chart(), AngularPotential::cosine(0.2))
}

fn count_crossings(chart: &Chart, traj: &TrajectorySamples, psi_ref: f64, dir: i8) -> (usize, f64) {
    match evaluate_invariant(chart, traj, psi_ref, dir) {
        Ok(rep) => (rep.estimates.len(), rep.spread),
        Err(_) => (0, 0.0),
    }
}

fn search_multi_crossings() -> Search {
    let (chart, pot) = involute_cosine();
    let mut r = rng(6);
    let refs = [1.0, 2.0, PI, 4.0, 5.0];
    let mut s = Search {
        trajectories: 0,
        best_count: 0,
        best_spread: f64::NAN,
        best: None,
    };
    for _ in 0..300 {
        let psi: f64 = r.gen_range(0.3..6.0);
        let gap = r.gen_range(0.2..5.0);
        let th = r.gen_range(-PI..PI);
        let p = (2.0 * (1.0 - 0.2 * psi.cos())).sqrt();
        let state = state_on_ray(&chart, gap, psi, p * th.sin(), p * th.cos());
        let Ok(traj) = flow(&chart, &pot, &state, &FlowConfig { t_max: 50.0, ..FlowConfig::default() }) else {
            continue;
        };
        s.trajectories += 1;
        for &psi_ref in &refs {
            for dir in [1, -1] {
                let (n, sp) = count_crossings(&chart, &traj, psi_ref, dir);
                if n > s.best_count || (n == s.best_count && n >= 2 && sp < s.best_spread) {
                    s.best_count = n;
                    s.best_spread = sp;
                    s.best = Some((state, psi_ref, dir));
                }
            }
        }
    }
    s
}

fn invariant_spread(search: &Search) -> Outcome {
    let pass = search.best_count >= 3 && search.best_spread <= 1e-6;
    let detail = if search.best_count >= 2 {
        format!(
            "{} trajectories searched; most same-direction crossings {} with spread {:.3e} (need >= 3 crossings, spread <= 1e-6)",
            search.trajectories, search.best_count, search.best_spread
        )
    } else {
        format!(
            "{} trajectories searched; none crosses a reference ray twice in the same direction (need >= 3 crossings, spread <= 1e-6)",
            search.trajectories
        )
    };
    outcome(pass, detail)
}

fn invariant_convergence(search: &Search) -> Outcome {
    let Some((state, psi_ref, dir)) = search.best.filter(|_| search.best_count >= 2) else {
        return outcome(
            false,
            "no trajectory with two or more same-direction crossings to refine (need spread ratio >= 4 on halving tolerances)".into(),
        );
    };
    let (chart, pot) = involute_cosine();
    let spread_at = |factor: f64| {
        let cfg = FlowConfig {
            tol: FlowConfig::default().tol.scaled(factor),
            t_max: 50.0,
            ..FlowConfig::default()
        };
        let traj = flow(&chart, &pot, &state, &cfg).unwrap();
        count_crossings(&chart, &traj, psi_ref, dir).1
    };
    let (a, b) = (spread_at(1.0), spread_at(0.5));
    outcome(b * 4.0 <= a, format!("spread {a:.3e} -> {b:.3e} on halving tolerances, ratio {:.2} (need >= 4)", a / b))
}

fn invariant_segments() -> Outcome {
    let (chart, pot) = involute_cosine();
    let state = state_on_ray(&chart, 2.0, 2.0, 0.3, 1.0);
    let cfg = FlowConfig {
        t_max: 50.0,
        stop_at_turning: true,
        ..FlowConfig::default()
    };
    let traj = flow(&chart, &pot, &state, &cfg).unwrap();
    let psi_ref = 2.5;
    let recs = traj.records();
    let n = recs.len() - 1;
    let mut cs: Vec<f64> = (0..5)
        .map(|k| transported_constant(&chart, &pot, &recs[k * n / 5 + n / 10].state, psi_ref, &SolveOptions::default()).unwrap())
        .collect();
    let crossing = evaluate_invariant(&chart, &traj, psi_ref, 1).ok().map(|rep| rep.estimates[0].c);
    if let Some(c) = crossing {
        cs.push(c);
    }
    let sp = spread(&cs);
    outcome(
        sp <= 1e-6 && crossing.is_some(),
        format!(
            "C carried from 5 segments of one monotone leg and read at its crossing: spread {sp:.2e} (tol 1e-6), C = {:.9}",
            cs[0]
        ),
    )
}

fn falsifiability() -> Outcome {
    let chart = point_chart();
    let ramp = RadialRamp {
        base: AngularPotential::cosine(0.2),
        k: 0.1,
    };
    let start = PhaseState::chart(2.0, PI, 0.0, 0.5, 1.0);
    let traj = flow(&chart, &ramp, &start, &FlowConfig { t_max: 200.0, ..FlowConfig::default() }).unwrap();
    match evaluate_invariant(&chart, &traj, PI, 1) {
        Ok(rep) => outcome(
            rep.spread > 1e-3,
            format!("V = 0.2 cos psi + 0.1 R: {} crossings, spread {:.3e} (need > 1e-3)", rep.estimates.len(), rep.spread),
        ),
        Err(e) => outcome(false, format!("no crossings: {e}")),
    }
}

fn method_cross_check() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (name, chart, pot, state) in jacobi_cases() {
        match jacobi_flow_distance(&chart, &pot, &state) {
            Ok(d) => {
                worst = worst.max(d);
                parts.push(format!("{name} {d:.1e}"));
            }
            Err(e) => return outcome(false, format!("{name}: {e}")),
        }
    }
    outcome(worst <= 1e-5, format!("{} (tol 1e-5)", parts.join(", ")))
}

fn energy() -> Outcome {
    let pots = [
        AngularPotential::zero(),
        AngularPotential::cosine(0.2),
        AngularPotential::quadratic(0.1, 1.5),
    ];
    let mut worst: f64 = 0.0;
    for (_, chart) in presets() {
        for pot in &pots {
            let dom = chart.domain();
            let state = state_on_ray(&chart, 1.5, dom.min + 0.4 * dom.width(), 0.6, 0.5);
            let traj = flow(&chart, pot, &state, &FlowConfig { t_max: 10.0, ..FlowConfig::default() }).unwrap();
            let h0 = traj.records()[0].energy;
            for rec in traj.records() {
                worst = worst.max((rec.energy - h0).abs() / (1.0 + h0.abs()) / rec.t.max(1.0));
            }
        }
    }
    outcome(worst <= 1e-8, format!("max |dH| / (1 + |H|) per unit time {worst:.2e} (tol 1e-8)"))
}

fn polar_degeneration() -> Outcome {
    let chart = point_chart();
    let mut r = rng(10);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (rr, psi, psi0) = (r.gen_range(0.05..10.0), r.gen_range(0.0..TAU), r.gen_range(-PI..PI));
        let p = ChartPoint::new(rr, psi);
        let q = chart.to_cartesian(p).unwrap();
        let geo = chart.geometry_at(p).unwrap();
        let s = FreeAction::new(psi0).eval(&chart, p).unwrap().s;
        let scale = rr.max(1.0);
        let errs = [
            (q.x1 - rr * psi.cos()).abs() / scale,
            (q.x2 - rr * psi.sin()).abs() / scale,
            (geo.g_psi_psi - rr * rr).abs() / (scale * scale),
            (s - rr * (psi - psi0).sin()).abs() / scale,
            chart.curve().l(psi).abs(),
        ];
        worst = errs.iter().fold(worst, |a, &b| a.max(b));
    }
    outcome(worst <= 1e-9, format!("max deviation from polar closed forms {worst:.2e} (tol 1e-9)"))
}

fn main() {
    let started = Instant::now();
    let search = search_multi_crossings();
    let results: Vec<(&str, Outcome)> = vec![
        ("1  chart round-trip", round_trip()),
        ("2  metric law", metric_law()),
        ("3  free action", free_action()),
        ("4  Cartesian pair", cartesian_pair()),
        ("5  reduced equation", reduced_equation()),
        ("6a invariant spread over crossings", invariant_spread(&search)),
        ("6b spread shrinks with tolerance", invariant_convergence(&search)),
        ("6c C agrees across segments", invariant_segments()),
        ("7  falsifiability control", falsifiability()),
        ("8  Jacobi vs canonical flow", method_cross_check()),
        ("9  energy conservation", energy()),
        ("10 polar degeneration", polar_degeneration()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed in {:.1} s",
        results.len() - failed,
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
