mod common;

use std::f64::consts::PI;

use common::{involute_chart, jacobi_cases, jacobi_flow_distance, point_chart, presets};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use raychart::hamjac::{
    line_fit_residual, separated_action, solve_f, trajectory_from_action, AngularPotential, FreeAction,
    InitialData, JacobiFamily, LevelSample, ProblemSetup, SeparatedSolution, SolveOptions,
};
use raychart::{Chart, ChartPoint, Error};

fn free_setup() -> ProblemSetup {
    // p = 1
    ProblemSetup::new(0.5, 1.0).unwrap()
}

fn unit_setup() -> ProblemSetup {
    ProblemSetup::new(1.0, 1.0).unwrap()
}

fn sampled_potential() -> AngularPotential {
    AngularPotential::sampled((0..=70).map(|i| (0.1 * i as f64, 0.15 * (0.1 * i as f64).sin())).collect()).unwrap()
}

fn max_constraint_residual(sol: &SeparatedSolution) -> f64 {
    sol.table()
        .iter()
        .map(|row| {
            let p2 = sol.setup().p2(sol.potential(), row.psi);
            row.constraint_residual.abs() / p2
        })
        .fold(0.0, f64::max)
}

#[test]
fn free_action_has_unit_gradient() {
    let chart = involute_chart();
    let fa = FreeAction::new(0.3);
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let s_at = |x1: f64, x2: f64, guess: ChartPoint| {
        let p = chart
            .from_cartesian_near(raychart::CartesianPoint::new(x1, x2), guess.psi)
            .expect("inverse near the sample");
        fa.eval(&chart, p).unwrap().s
    };
    for _ in 0..20 {
        let psi = rng.gen_range(0.3..6.0);
        let p = ChartPoint::new(chart.curve().l(psi) + rng.gen_range(0.5..4.0), psi);
        let q = chart.to_cartesian(p).unwrap();
        let h = 1e-4;
        let gx = common::d5_scalar(|x| s_at(x, q.x2, p), q.x1, h);
        let gy = common::d5_scalar(|y| s_at(q.x1, y, p), q.x2, h);
        assert!((gx.hypot(gy) - 1.0).abs() <= 1e-6, "|dS| = {} at {p:?}", gx.hypot(gy));
    }
}

#[test]
fn free_level_set_on_involute_is_straight() {
    let chart = involute_chart();
    let psis: Vec<f64> = (0..50).map(|i| 0.2 + 2.6 * i as f64 / 49.0).collect();
    let samples = FreeAction::new(0.0).level_set_points(&chart, 2.0, &psis).unwrap();
    let pts: Vec<_> = samples
        .iter()
        .filter_map(|s| match s {
            LevelSample::Point { q, .. } => Some(*q),
            _ => None,
        })
        .collect();
    assert!(pts.len() >= 40, "only {} samples landed in the chart", pts.len());
    assert!(line_fit_residual(&pts) <= 1e-8, "residual {}", line_fit_residual(&pts));
}

#[test]
fn free_solution_is_a_shifted_sine_through_the_flip() {
    let chart = point_chart();
    let init = InitialData::new(0.3, 0.3f64.sin(), 1);
    let sol = solve_f(chart.curve(), &free_setup(), &AngularPotential::zero(), init, (0.0, PI), &SolveOptions::default())
        .unwrap();
    assert!(sol.c().abs() <= 1e-8, "C = {}", sol.c());
    assert!(sol.contacts().iter().any(|c| (c.psi - PI / 2.0).abs() < 1e-6));
    for i in 0..=400 {
        let psi = PI * i as f64 / 400.0;
        let (f, fp) = sol.f(psi).unwrap();
        assert!((f - psi.sin()).abs() <= 1e-8, "f({psi}) = {f}");
        assert!((fp - psi.cos()).abs() <= 1e-6, "f'({psi}) = {fp}");
    }
    assert!(max_constraint_residual(&sol) <= 1e-9);
}

#[test]
fn constraint_holds_at_nodes_for_all_presets() {
    let pots = [
        AngularPotential::zero(),
        AngularPotential::cosine(0.2),
        AngularPotential::quadratic(0.1, 1.5),
        sampled_potential(),
    ];
    for (name, chart) in presets() {
        for pot in &pots {
            let dom = chart.domain();
            let start = dom.min + 0.3 * dom.width();
            let range = (dom.min + 0.1 * dom.width(), dom.min + 0.6 * dom.width());
            let init = InitialData::new(start, 0.0, 1);
            let sol = solve_f(chart.curve(), &unit_setup(), pot, init, range, &SolveOptions::default()).unwrap();
            let r = max_constraint_residual(&sol);
            assert!(r <= 1e-9, "{name} {:?}: residual {r}", pot.kind());
        }
    }
}

#[test]
fn cosine_solution_is_converged() {
    let chart = point_chart();
    let pot = AngularPotential::cosine(0.2);
    let init = InitialData::new(0.0, 0.0, 1);
    let coarse = solve_f(chart.curve(), &unit_setup(), &pot, init, (0.0, PI), &SolveOptions::default()).unwrap();
    let base = SolveOptions::default();
    let fine_opts = SolveOptions {
        h_max: base.h_max / 2.0,
        tol: base.tol.scaled(1.0 / 32.0),
        ..base
    };
    let fine = solve_f(chart.curve(), &unit_setup(), &pot, init, (0.0, PI), &fine_opts).unwrap();
    assert_eq!(coarse.range(), (0.0, PI));
    let mut worst: f64 = 0.0;
    for psi in coarse.node_angles() {
        worst = worst.max((coarse.f(psi).unwrap().0 - fine.f(psi).unwrap().0).abs());
    }
    assert!(worst <= 1e-8, "coarse and fine tables differ by {worst}");
    assert!(max_constraint_residual(&coarse) <= 1e-9);
}

#[test]
fn forbidden_and_inconsistent_starts_are_reported() {
    let chart = point_chart();
    let setup = ProblemSetup::new(1.0, 0.02).unwrap();
    let pot = AngularPotential::quadratic(1.0, 0.0);
    let err = solve_f(chart.curve(), &setup, &pot, InitialData::new(0.1, 0.0, 1), (0.0, 1.0), &SolveOptions::default());
    assert!(matches!(err, Err(Error::Forbidden { .. })), "{err:?}");
    let err = solve_f(
        chart.curve(),
        &free_setup(),
        &AngularPotential::zero(),
        InitialData::new(0.5, 1.5, 1),
        (0.0, 1.0),
        &SolveOptions::default(),
    );
    assert!(matches!(err, Err(Error::InconsistentInitialData(_))), "{err:?}");
}

fn cosine_on_involute() -> (Chart, SeparatedSolution) {
    let chart = involute_chart();
    let sol = solve_f(
        chart.curve(),
        &unit_setup(),
        &AngularPotential::cosine(0.2),
        InitialData::new(1.0, 0.0, 1),
        (0.6, 2.0),
        &SolveOptions::default(),
    )
    .unwrap();
    (chart, sol)
}

#[test]
fn separated_action_satisfies_the_eikonal_equation() {
    let (chart, sol) = cosine_on_involute();
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for _ in 0..200 {
        let psi = rng.gen_range(0.6..2.0);
        let p = ChartPoint::new(chart.curve().l(psi) + rng.gen_range(0.05..5.0), psi);
        let a = separated_action(&chart, &sol, p).unwrap();
        let gap = chart.gap(p);
        let p2 = sol.setup().p2(sol.potential(), psi);
        let resid = a.p_r * a.p_r + (a.p_psi / gap).powi(2) - p2;
        assert!(resid.abs() <= 1e-8 * p2, "residual {resid} at {p:?}");
    }
}

#[test]
fn action_difference_matches_path_integral() {
    let (chart, sol) = cosine_on_involute();
    let paths = [((1.2, 0.7), (4.0, 1.9)), ((3.0, 1.5), (1.8, 0.65)), ((2.5, 0.9), (2.6, 1.1))];
    for ((g1, psi1), (g2, psi2)) in paths {
        let p1 = ChartPoint::new(chart.curve().l(psi1) + g1, psi1);
        let p2 = ChartPoint::new(chart.curve().l(psi2) + g2, psi2);
        let n = 20_000;
        let (dr, dpsi) = (p2.r - p1.r, p2.psi - p1.psi);
        let integrand = |s: f64| {
            let p = ChartPoint::new(p1.r + s * dr, p1.psi + s * dpsi);
            let a = separated_action(&chart, &sol, p).unwrap();
            a.p_r * dr + a.p_psi * dpsi
        };
        let mut line = 0.5 * (integrand(0.0) + integrand(1.0));
        for k in 1..n {
            line += integrand(k as f64 / n as f64);
        }
        line /= n as f64;
        let ds = separated_action(&chart, &sol, p2).unwrap().s - separated_action(&chart, &sol, p1).unwrap().s;
        assert!((ds - line).abs() <= 1e-7, "S difference {ds}, path integral {line}");
    }
}

#[test]
fn free_orbit_from_action_is_a_straight_line() {
    for (chart, tol) in [(point_chart(), 1e-7), (involute_chart(), 1e-6)] {
        let psi: f64 = 1.0;
        let c = 1.3;
        let state = common::state_on_ray(&chart, 2.0, psi, (psi - c).sin(), (psi - c).cos());
        let family = JacobiFamily::new(&chart, free_setup(), AngularPotential::zero(), SolveOptions::default());
        let start = ChartPoint::new(state.q[0], psi);
        let (k, sol) = family.constants_for_state(start, state.p[0], state.p[1], (psi, psi + 1.0)).unwrap();
        let psis: Vec<f64> = (0..=100).map(|i| psi + i as f64 / 100.0).collect();
        let path = trajectory_from_action(&chart, &sol, k.beta, &psis).unwrap();
        assert_eq!(path.points.len(), psis.len());
        let pts: Vec<_> = path.points.iter().map(|(_, q)| *q).collect();
        let resid = line_fit_residual(&pts);
        assert!(resid <= tol, "residual {resid}");
        assert!((pts[0].distance(&chart.map_unchecked(start))) <= 1e-9);
    }
}

#[test]
fn action_orbits_agree_with_the_canonical_flow() {
    for (name, chart, pot, state) in jacobi_cases() {
        let d = jacobi_flow_distance(&chart, &pot, &state).unwrap();
        assert!(d <= 1e-5, "{name}: distance {d}");
    }
}

#[test]
fn orbit_through_a_caustic_reports_it() {
    // the orbit touches the ray psi = pi/2 tangentially (f' = 0 there)
    let chart = point_chart();
    let family = JacobiFamily::new(&chart, free_setup(), AngularPotential::zero(), SolveOptions::default());
    let (k, sol) = family
        .constants_for_state(ChartPoint::new(1.0, PI / 2.0), 1.0, 0.0, (1.0, 2.0))
        .unwrap();
    let err = trajectory_from_action(&chart, &sol, k.beta, &[PI / 2.0]);
    assert!(matches!(err, Err(Error::Caustic { .. })), "{err:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn free_solution_matches_closed_form(c in -3.0f64..3.0, start in 0.2f64..2.8) {
        let chart = point_chart();
        let f0 = (start - c).sin();
        let fp0 = (start - c).cos();
        let init = InitialData::with_slope(start, f0, fp0);
        let sol = solve_f(chart.curve(), &free_setup(), &AngularPotential::zero(), init, (0.0, 3.0), &SolveOptions::default())
            .unwrap();
        prop_assert_eq!(sol.range(), (0.0, 3.0));
        for i in 0..=60 {
            let psi = 3.0 * i as f64 / 60.0;
            let f = sol.f(psi).unwrap().0;
            prop_assert!((f - (psi - c).sin()).abs() <= 1e-8, "f({}) = {} vs {}", psi, f, (psi - c).sin());
        }
        prop_assert!(max_constraint_residual(&sol) <= 1e-9);
    }
}
