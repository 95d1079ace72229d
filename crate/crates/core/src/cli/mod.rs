//! Configuration-driven front end.
//!
//! `raychart <command> <config>` reads a flat config file (see [`config`]), runs
//! one command and writes CSV (and optionally SVG) into `run.out_dir`, which
//! defaults to the directory holding the config file.
//!
//! | exit | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | bad command line, config or input file |
//! | 3 | domain error (point outside the chart, forbidden region, ...) |
//! | 4 | numerical failure (caustic, reference angle never reached, ...) |
//! | 5 | a checked quantity exceeded its threshold |

pub mod config;
pub mod format;
mod svg;

use std::f64::consts::TAU;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::chart::{CartesianPoint, Chart, ChartPoint};
use crate::curve::{make_curve, parse_samples_csv, CurveKind, CurveSpec};
use crate::dynamics::{
    cross_check, evaluate_invariant, flow, FlowConfig, ForceField, Frame, PhaseState, RadialRamp, TrajectorySamples,
};
use crate::error::{Error, ErrorClass};
use crate::hamjac::{solve_f, AngularPotential, FreeAction, InitialData, LevelSample, ProblemSetup, SolveOptions};
use crate::hamjac::line_fit_residual;
use crate::ode::Tolerances;

use config::{ConfigError, RunConfig};
use format::{csv_row, fmt_g};
use svg::Figure;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_THRESHOLD: i32 = 5;

pub const COMMANDS: [&str; 8] = [
    "grid",
    "forward",
    "invert",
    "hj-free",
    "separate",
    "trajectory",
    "invariant-check",
    "cross-check",
];

const USAGE: &str = "usage: raychart <command> <config-file>

commands:
  grid             chart lattice -> grid.csv (+ grid.svg with run.svg = true)
  forward          (point.r, point.psi) -> Cartesian row on stdout
  invert           (point.x1, point.x2) -> chart row on stdout
  hj-free          level sets of the free action -> levels.csv, residuals on stdout
  separate         reduced equation table -> f_table.csv
  trajectory       canonical flow -> traj.csv
  invariant-check  separation constant at crossings -> invariant.csv
  cross-check      chart vs Cartesian integration divergence
";

#[derive(Debug)]
enum Failure {
    Usage(String),
    Config(ConfigError),
    Lib(Error),
    Threshold(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Config(_) => EXIT_CONFIG,
            Failure::Lib(e) => match e.class() {
                ErrorClass::Config => EXIT_CONFIG,
                ErrorClass::Domain => EXIT_DOMAIN,
                ErrorClass::Numerical => EXIT_NUMERICAL,
            },
            Failure::Threshold(_) => EXIT_THRESHOLD,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Config(e) => write!(f, "config: {e}"),
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Threshold(m) => write!(f, "{m}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Runs the front end with process stdout/stderr. `args` excludes the program name.
pub fn run<I: IntoIterator<Item = String>>(args: I) -> i32 {
    let args: Vec<String> = args.into_iter().collect();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(&args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if args.iter().any(|a| a == "-h" || a == "--help") {
        let _ = out.write_all(USAGE.as_bytes());
        return EXIT_OK;
    }
    let result = match args {
        [command, path] => dispatch(command, Path::new(path), out),
        _ => Err(Failure::Usage(USAGE.trim_end().to_string())),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            f.exit_code()
        }
    }
}

fn dispatch(command: &str, path: &Path, out: &mut dyn Write) -> Outcome {
    if !COMMANDS.contains(&command) {
        return Err(Failure::Usage(format!("unknown command '{command}'\n{}", USAGE.trim_end())));
    }
    let cfg = RunConfig::load(path)?;
    match command {
        "grid" => cmd_grid(&cfg, out),
        "forward" => cmd_forward(&cfg, out),
        "invert" => cmd_invert(&cfg, out),
        "hj-free" => cmd_hj_free(&cfg, out),
        "separate" => cmd_separate(&cfg, out),
        "trajectory" => cmd_trajectory(&cfg, out),
        "invariant-check" => cmd_invariant(&cfg, out),
        "cross-check" => cmd_cross_check(&cfg, out),
        _ => unreachable!("command list checked above"),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Outcome {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Config(ConfigError::general(format!("cannot write output: {e}"))))
}

fn read_samples(cfg: &RunConfig, key: &str) -> std::result::Result<Vec<(f64, f64)>, Failure> {
    let path = cfg
        .path(key)
        .ok_or_else(|| ConfigError::general(format!("missing required key '{key}'")))?;
    let text = std::fs::read_to_string(&path)
        .map_err(|e| cfg.invalid(key, &format!("cannot be read ({}): {e}", path.display())))?;
    parse_samples_csv(&text).map_err(|e| Failure::Config(cfg.invalid(key, &format!("has bad samples: {e}"))))
}

fn build_chart(cfg: &RunConfig) -> std::result::Result<Chart, Failure> {
    let kind = match cfg.str("curve.kind").unwrap_or("point") {
        "point" => CurveKind::Point,
        "circle_involute" => CurveKind::CircleInvolute {
            a: cfg.require_f64("curve.a")?,
        },
        "power" => CurveKind::Power {
            a: cfg.require_f64("curve.a")?,
            k: cfg.require_f64("curve.k")?,
        },
        "sampled" => CurveKind::Sampled(read_samples(cfg, "curve.file")?),
        _ => return Err(cfg.invalid("curve.kind", "must be point, circle_involute, power or sampled").into()),
    };
    let domain = Some((cfg.f64_or("curve.psi_min", 0.0)?, cfg.f64_or("curve.psi_max", TAU)?));
    let curve = make_curve(&CurveSpec { kind, domain })?;
    Ok(Chart::new(curve))
}

fn build_potential(cfg: &RunConfig) -> std::result::Result<AngularPotential, Failure> {
    Ok(match cfg.str("potential.kind").unwrap_or("zero") {
        "zero" => AngularPotential::zero(),
        "cosine" => AngularPotential::cosine(cfg.require_f64("potential.k")?),
        "quadratic" => AngularPotential::quadratic(cfg.require_f64("potential.k")?, cfg.f64_or("potential.psi_c", 0.0)?),
        "sampled" => AngularPotential::sampled(read_samples(cfg, "potential.file")?)?,
        _ => return Err(cfg.invalid("potential.kind", "must be zero, cosine, quadratic or sampled").into()),
    })
}

fn build_field(cfg: &RunConfig) -> std::result::Result<Box<dyn ForceField>, Failure> {
    let base = build_potential(cfg)?;
    Ok(match cfg.f64("potential.test_ramp_k")? {
        Some(k) => Box::new(RadialRamp { base, k }),
        None => Box::new(base),
    })
}

fn tolerances(cfg: &RunConfig) -> std::result::Result<Tolerances, Failure> {
    let d = Tolerances::default();
    let tol = Tolerances {
        rtol: cfg.positive("integrator.rtol", d.rtol)?,
        atol: cfg.positive("integrator.atol", d.atol)?,
    };
    Ok(tol.validate()?)
}

fn flow_config(cfg: &RunConfig, t_max_default: f64) -> std::result::Result<FlowConfig, Failure> {
    let d = FlowConfig::default();
    Ok(FlowConfig {
        tol: tolerances(cfg)?,
        t_max: cfg.positive("run.t_max", t_max_default)?,
        h_max: cfg.positive("integrator.h_max", d.h_max)?,
        stop_at_turning: false,
    })
}

fn out_dir(cfg: &RunConfig) -> std::result::Result<PathBuf, Failure> {
    let dir = cfg.path("run.out_dir").unwrap_or_else(|| cfg.base_dir().to_path_buf());
    std::fs::create_dir_all(&dir).map_err(|e| cfg.invalid("run.out_dir", &format!("cannot be created: {e}")))?;
    Ok(dir)
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Outcome {
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| Failure::Config(ConfigError::general(format!("cannot write {}: {e}", path.display()))))
}

fn mass(cfg: &RunConfig) -> std::result::Result<f64, Failure> {
    Ok(cfg.positive("problem.m", 1.0)?)
}

fn initial_state(cfg: &RunConfig) -> std::result::Result<PhaseState, Failure> {
    let m = mass(cfg)?;
    match cfg.str("run.frame").unwrap_or("chart") {
        "chart" => Ok(PhaseState::chart(
            cfg.require_f64("state.r")?,
            cfg.require_f64("state.psi")?,
            cfg.require_f64("state.p_r")?,
            cfg.require_f64("state.p_psi")?,
            m,
        )),
        "cartesian" => Ok(PhaseState::cartesian(
            cfg.require_f64("state.x1")?,
            cfg.require_f64("state.x2")?,
            cfg.require_f64("state.p1")?,
            cfg.require_f64("state.p2")?,
            m,
        )),
        _ => Err(cfg.invalid("run.frame", "must be chart or cartesian").into()),
    }
}

fn sign_key(cfg: &RunConfig, key: &str) -> std::result::Result<i8, Failure> {
    match cfg.f64_or(key, 1.0)? {
        v if v == 1.0 => Ok(1),
        v if v == -1.0 => Ok(-1),
        _ => Err(cfg.invalid(key, "must be +1 or -1").into()),
    }
}

fn curve_polyline(chart: &Chart, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    (0..=400)
        .map(|i| {
            let c = chart.curve_point(lo + (hi - lo) * i as f64 / 400.0);
            (c.x1, c.x2)
        })
        .collect()
}

fn cmd_grid(cfg: &RunConfig, _out: &mut dyn Write) -> Outcome {
    let chart = build_chart(cfg)?;
    let dom = chart.domain();
    let psi_min = cfg.f64_or("grid.psi_min", dom.min)?;
    let psi_max = cfg.f64_or("grid.psi_max", dom.max)?;
    dom.check(psi_min)?;
    dom.check(psi_max)?;
    let r_min = cfg.f64_or("grid.r_min", 0.5)?;
    let r_max = cfg.f64_or("grid.r_max", 5.0)?;
    if r_max <= r_min {
        return Err(cfg.invalid("grid.r_max", "must exceed grid.r_min").into());
    }
    let npsi = cfg.count("grid.npsi", 37)?.max(2);
    let nr = cfg.count("grid.nr", 10)?.max(2);
    let psis: Vec<f64> = (0..npsi)
        .map(|i| psi_min + (psi_max - psi_min) * i as f64 / (npsi - 1) as f64)
        .collect();
    let rs: Vec<f64> = (0..nr).map(|j| r_min + (r_max - r_min) * j as f64 / (nr - 1) as f64).collect();

    let mut csv = String::from("R,psi,x1,x2,g_psipsi\n");
    for &psi in &psis {
        for &r in &rs {
            let p = ChartPoint::new(r, psi);
            if chart.gap(p) <= 0.0 {
                continue;
            }
            let q = chart.to_cartesian(p)?;
            let g = chart.geometry_at(p)?;
            csv.push_str(&csv_row(&[r, psi, q.x1, q.x2, g.g_psi_psi]));
            csv.push('\n');
        }
    }
    let dir = out_dir(cfg)?;
    write_output(&dir, "grid.csv", &csv)?;

    if cfg.flag("run.svg")? {
        let mut fig = Figure::new();
        fig.polyline(curve_polyline(&chart, psi_min, psi_max), "red");
        for &psi in &psis {
            let start = r_min.max(chart.curve().l(psi));
            if start < r_max {
                let a = chart.map_unchecked(ChartPoint::new(start, psi));
                let b = chart.map_unchecked(ChartPoint::new(r_max, psi));
                fig.polyline(vec![(a.x1, a.x2), (b.x1, b.x2)], "black");
            }
        }
        let fine = 8 * npsi;
        for &r in &rs {
            let mut piece = Vec::new();
            for i in 0..=fine {
                let psi = psi_min + (psi_max - psi_min) * i as f64 / fine as f64;
                let p = ChartPoint::new(r, psi);
                if chart.gap(p) > 0.0 {
                    let q = chart.map_unchecked(p);
                    piece.push((q.x1, q.x2));
                } else if !piece.is_empty() {
                    fig.polyline(std::mem::take(&mut piece), "steelblue");
                }
            }
            fig.polyline(piece, "steelblue");
        }
        write_output(&dir, "grid.svg", &fig.render())?;
    }
    Ok(())
}

fn cmd_forward(cfg: &RunConfig, out: &mut dyn Write) -> Outcome {
    let chart = build_chart(cfg)?;
    let p = ChartPoint::new(cfg.require_f64("point.r")?, cfg.require_f64("point.psi")?);
    let q = chart.to_cartesian(p)?;
    emit(out, &format!("R,psi,x1,x2\n{}\n", csv_row(&[p.r, p.psi, q.x1, q.x2])))
}

fn cmd_invert(cfg: &RunConfig, out: &mut dyn Write) -> Outcome {
    let chart = build_chart(cfg)?;
    let q = CartesianPoint::new(cfg.require_f64("point.x1")?, cfg.require_f64("point.x2")?);
    let bracket = match (cfg.f64("point.psi_lo")?, cfg.f64("point.psi_hi")?) {
        (Some(a), Some(b)) => Some((a, b)),
        (None, None) => None,
        _ => return Err(ConfigError::general("point.psi_lo and point.psi_hi go together").into()),
    };
    let p = chart.from_cartesian(q, bracket)?;
    emit(out, &format!("x1,x2,R,psi\n{}\n", csv_row(&[q.x1, q.x2, p.r, p.psi])))
}

fn cmd_hj_free(cfg: &RunConfig, out: &mut dyn Write) -> Outcome {
    let chart = build_chart(cfg)?;
    let dom = chart.domain();
    let fa = FreeAction::new(cfg.f64_or("free.psi0", 0.0)?);
    let levels = cfg.list("free.levels")?.unwrap_or_else(|| vec![1.0]);
    let n = cfg.count("free.samples", 50)?.max(2);
    let lo = cfg.f64_or("free.psi_min", dom.min)?;
    let hi = cfg.f64_or("free.psi_max", dom.max)?;
    dom.check(lo)?;
    dom.check(hi)?;
    let psis: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();

    let mut csv = String::from("level,s,psi,R,x1,x2\n");
    let mut summary = String::from("level,s,points,residual\n");
    let mut fig = Figure::new();
    fig.polyline(curve_polyline(&chart, dom.min, dom.max), "red");
    for (k, &s0) in levels.iter().enumerate() {
        let mut pts = Vec::new();
        for sample in fa.level_set_points(&chart, s0, &psis)? {
            if let LevelSample::Point { psi, r, q } = sample {
                csv.push_str(&format!("{k},{}\n", csv_row(&[s0, psi, r, q.x1, q.x2])));
                pts.push(q);
            }
        }
        let resid = line_fit_residual(&pts);
        summary.push_str(&format!("{k},{},{},{}\n", fmt_g(s0), pts.len(), fmt_g(resid)));
        fig.polyline(pts.iter().map(|q| (q.x1, q.x2)).collect(), "black");
    }
    let dir = out_dir(cfg)?;
    write_output(&dir, "levels.csv", &csv)?;
    if cfg.flag("run.svg")? {
        write_output(&dir, "levels.svg", &fig.render())?;
    }
    emit(out, &summary)
}

fn cmd_separate(cfg: &RunConfig, out: &mut dyn Write) -> Outcome {
    let chart = build_chart(cfg)?;
    if cfg.contains("potential.test_ramp_k") {
        return Err(cfg
            .invalid("potential.test_ramp_k", "makes the potential non-separable; separate needs V(psi) only")
            .into());
    }
    let pot = build_potential(cfg)?;
    let setup = ProblemSetup::new(mass(cfg)?, cfg.require_f64("problem.energy")?)?;
    let psi_start = cfg.require_f64("separate.psi_start")?;
    let f_start = cfg.require_f64("separate.f_start")?;
    let init = match cfg.f64("separate.f_prime")? {
        Some(fp) => InitialData::with_slope(psi_start, f_start, fp),
        None => InitialData::new(psi_start, f_start, sign_key(cfg, "separate.sigma")?),
    };
    let dom = chart.domain();
    let range = (
        cfg.f64_or("separate.psi_min", dom.min)?,
        cfg.f64_or("separate.psi_max", dom.max)?,
    );
    let opts = SolveOptions {
        tol: tolerances(cfg)?,
        h_max: cfg.positive("integrator.h_max", SolveOptions::default().h_max)?,
        psi_ref: cfg.f64("run.psi_ref")?,
        ..SolveOptions::default()
    };
    let sol = solve_f(chart.curve(), &setup, &pot, init, range, &opts)?;

    let mut csv = String::from("psi,f,f_prime,sigma,constraint_residual\n");
    for row in sol.table() {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_g(row.psi),
            fmt_g(row.f),
            fmt_g(row.f_prime),
            row.sigma,
            fmt_g(row.constraint_residual)
        ));
    }
    write_output(&out_dir(cfg)?, "f_table.csv", &csv)?;

    let (lo, hi) = sol.range();
    let mut text = format!(
        "C={}\npsi_ref={}\nrange={},{}\n",
        fmt_g(sol.c()),
        fmt_g(sol.psi_ref()),
        fmt_g(lo),
        fmt_g(hi)
    );
    for c in sol.contacts() {
        let kind = match c.kind {
            crate::hamjac::ContactKind::Reflective => "reflective",
            crate::hamjac::ContactKind::OneSided => "one-sided",
        };
        text.push_str(&format!("contact={},{},{kind}\n", fmt_g(c.psi), fmt_g(c.f)));
    }
    emit(out, &text)
}

fn traj_csv(chart: &Chart, traj: &TrajectorySamples) -> std::result::Result<(String, Vec<(f64, f64)>), Failure> {
    let mut csv = String::from("t,R,psi,p_R,p_psi,x1,x2,H,f,f_prime,status\n");
    let mut path = Vec::with_capacity(traj.records().len());
    let last = traj.records().len() - 1;
    for (i, rec) in traj.records().iter().enumerate() {
        let (cs, x) = match rec.state.frame {
            Frame::Chart => (rec.state, chart.map_unchecked(ChartPoint::new(rec.state.q[0], rec.state.q[1]))),
            Frame::Cartesian => (
                rec.state.to_chart(chart)?,
                CartesianPoint::new(rec.state.q[0], rec.state.q[1]),
            ),
        };
        let status = if i == last { traj.status().label() } else { "running" };
        csv.push_str(&csv_row(&[
            rec.t, cs.q[0], cs.q[1], cs.p[0], cs.p[1], x.x1, x.x2, rec.energy, rec.f, rec.f_prime,
        ]));
        csv.push(',');
        csv.push_str(status);
        csv.push('\n');
        path.push((x.x1, x.x2));
    }
    Ok((csv, path))
}

fn cmd_trajectory(cfg: &RunConfig, out: &mut dyn Write) -> Outcome {
    let chart = build_chart(cfg)?;
    let field = build_field(cfg)?;
    let state = initial_state(cfg)?;
    let traj = flow(&chart, field.as_ref(), &state, &flow_config(cfg, FlowConfig::default().t_max)?)?;
    let (csv, path) = traj_csv(&chart, &traj)?;
    let dir = out_dir(cfg)?;
    write_output(&dir, "traj.csv", &csv)?;
    if cfg.flag("run.svg")? {
        let dom = chart.domain();
        let mut fig = Figure::new();
        fig.polyline(curve_polyline(&chart, dom.min, dom.max), "red");
        fig.polyline(path, "black");
        write_output(&dir, "traj.svg", &fig.render())?;
    }
    emit(
        out,
        &format!(
            "status={}\nt_end={}\nsamples={}\n",
            traj.status().label(),
            fmt_g(traj.t_end()),
            traj.records().len()
        ),
    )
}

fn cmd_invariant(cfg: &RunConfig, out: &mut dyn Write) -> Outcome {
    let chart = build_chart(cfg)?;
    let field = build_field(cfg)?;
    let state = initial_state(cfg)?;
    let psi_ref = cfg.f64_or("run.psi_ref", chart.domain().midpoint())?;
    let direction = sign_key(cfg, "run.direction")?;
    let threshold = cfg.positive("run.threshold", 1e-6)?;
    let traj = flow(&chart, field.as_ref(), &state, &flow_config(cfg, FlowConfig::default().t_max)?)?;
    let rep = evaluate_invariant(&chart, &traj, psi_ref, direction)?;

    let mut csv = String::from("crossing_index,t,f,f_prime,C\n");
    for (i, e) in rep.estimates.iter().enumerate() {
        csv.push_str(&format!("{i},{}\n", csv_row(&[e.t, e.f, e.f_prime, e.c])));
    }
    write_output(&out_dir(cfg)?, "invariant.csv", &csv)?;

    let mean = rep.mean_c();
    let shown = format!("{mean:.6}");
    let shown = if shown == "-0.000000" { "0.000000".to_string() } else { shown };
    emit(
        out,
        &format!(
            "C={shown}\nspread={}\ncrossings={}\nstatus={}\n",
            fmt_g(rep.spread),
            rep.estimates.len(),
            traj.status().label()
        ),
    )?;
    if rep.spread > threshold {
        return Err(Failure::Threshold(format!(
            "spread {} exceeds threshold {}",
            fmt_g(rep.spread),
            fmt_g(threshold)
        )));
    }
    Ok(())
}

fn cmd_cross_check(cfg: &RunConfig, out: &mut dyn Write) -> Outcome {
    let chart = build_chart(cfg)?;
    let field = build_field(cfg)?;
    let state = initial_state(cfg)?;
    let threshold = cfg.positive("run.threshold", 1e-5)?;
    let rep = cross_check(&chart, field.as_ref(), &state, &flow_config(cfg, 1.0)?)?;
    emit(
        out,
        &format!(
            "max_divergence={}\nt_common={}\nchart_status={}\ncartesian_status={}\n",
            fmt_g(rep.max_divergence),
            fmt_g(rep.t_common),
            rep.chart_status.label(),
            rep.cartesian_status.label()
        ),
    )?;
    if rep.max_divergence > threshold {
        return Err(Failure::Threshold(format!(
            "divergence {} exceeds threshold {}",
            fmt_g(rep.max_divergence),
            fmt_g(threshold)
        )));
    }
    Ok(())
}
