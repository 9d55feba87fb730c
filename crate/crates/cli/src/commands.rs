//! One function per subcommand.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use nalgebra::DMatrix;
use paramarkov::analytics::{
    caputo_residual_efpp, caputo_residual_matrix, efpp_pmf_table, renewal_residual, tv_distance,
    write_comparison_csv, MatrixMode, PmfTable, ResidualGrid,
};
use paramarkov::chains::{self, efpp_count_histogram, simulate_efpp, ChainSpec, Process, Stop, Trajectory};
use paramarkov::fmt::g17;
use paramarkov::matfun::{
    frac_power_neg_gen, is_irreducible, spectral_check, transition_markov, transition_para, transition_semi,
    write_matrix_csv, Generator, TransitionMatrix,
};
use paramarkov::ml_special::MLParams;
use paramarkov::sampling::RngStream;
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;
use crate::svg::{Plot, Series, Style};
use crate::{Bundled, Format, MatrixArgs, ModeArg, PmfArgs, ReportArgs, SimulateArgs, VerifyArgs};

/// Tolerances of the pmf comparison at 10⁶ replicas.
const MAX_ABS_DIFF_TOL: f64 = 3e-3;
const TV_TOL: f64 = 5e-3;
/// Residual tolerances of the verification suites.
const RESIDUAL_TOL: f64 = 1e-2;
const RESIDUAL_TOL_MARKOV: f64 = 1e-6;
const RENEWAL_TOL: f64 = 1e-3;
/// Orders of the sample trajectories in the report bundle.
const REPORT_TRAJECTORY_NUS: [f64; 3] = [0.5, 0.75, 0.9];

pub fn bundled_spec(which: Bundled, nu: f64) -> Result<ChainSpec, CliError> {
    let spec = match which {
        Bundled::TwoState => ChainSpec::unnamed(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![1.0, 2.0], nu)?,
        Bundled::ThreeState => ChainSpec::unnamed(
            vec![vec![0.0, 0.5, 0.5], vec![0.3, 0.0, 0.7], vec![0.6, 0.4, 0.0]],
            vec![1.0, 2.0, 1.5],
            nu,
        )?,
    };
    Ok(spec)
}

fn bundled_name(which: Bundled) -> &'static str {
    match which {
        Bundled::TwoState => "two-state",
        Bundled::ThreeState => "three-state",
    }
}

/// Chain description with `G = diag(λ)(H − I)`: `λ_i = −g_ii`, `h_ij = g_ij/λ_i`.
fn spec_from_generator(g: &Generator, nu: f64) -> Result<ChainSpec, CliError> {
    let m = g.matrix();
    let n = g.dim();
    let rates: Vec<f64> = (0..n).map(|i| -m[(i, i)]).collect();
    // rows renormalised against rounding in the division
    let h: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let row: Vec<f64> = (0..n).map(|j| if i == j { 0.0 } else { m[(i, j)] / rates[i] }).collect();
            let s: f64 = row.iter().sum();
            row.into_iter().map(|v| v / s).collect()
        })
        .collect();
    Ok(ChainSpec::unnamed(h, rates, nu)?)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// `out.csv` → `out_3.csv` for replica 3.
fn replica_path(base: &Path, i: u64, replicas: u64) -> PathBuf {
    if replicas <= 1 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}_{i}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{i}"),
    };
    base.with_file_name(name)
}

fn trajectory_plot(traj: &Trajectory, title: String, counting: bool) -> Plot {
    Plot {
        title,
        x_label: "t".into(),
        y_label: if counting { "N_t".into() } else { "state".into() },
        series: vec![Series {
            label: "trajectory".into(),
            style: Style::Step,
            color: "steelblue",
            points: traj.times.iter().zip(&traj.states).map(|(&t, &y)| (t, y as f64)).collect(),
        }],
    }
}

fn write_trajectory(traj: &Trajectory, path: &Path, format: Format) -> Result<(), CliError> {
    let mut out = create(path)?;
    match format {
        Format::Csv => traj.write_csv(&mut out)?,
        Format::Json => {
            let v = json!({ "times": traj.times, "states": traj.states, "truncated": traj.truncated });
            serde_json::to_writer_pretty(&mut out, &v)?;
            writeln!(out)?;
        }
        Format::Svg => unreachable!("svg is written by the caller"),
    }
    out.flush()?;
    Ok(())
}

pub fn simulate(args: &SimulateArgs, seed: u64) -> Result<(), CliError> {
    let stop = match (args.events, args.horizon) {
        (Some(n), _) => Stop::Events(n),
        (None, Some(h)) => Stop::Horizon(h),
        (None, None) => return Err(CliError::Usage("one of --events or --horizon is required".into())),
    };
    let mut spec = match &args.spec {
        Some(path) => ChainSpec::from_json(&read_text(path)?)?,
        None => bundled_spec(args.bundled, args.nu.unwrap_or(0.5))?,
    };
    if let Some(nu) = args.nu {
        spec.nu = nu;
        spec.validate()?;
    }
    let process: Process = args.process.into();
    if process == Process::Efpp {
        MLParams::new(spec.nu, args.lambda)?;
    }
    for i in 0..args.replicas {
        let mut rng = RngStream::new(seed, i);
        let traj = match process {
            Process::Efpp => simulate_efpp(spec.nu, args.lambda, stop, &mut rng)?,
            p => chains::simulate(p, &spec, args.y0, stop, &mut rng)?,
        };
        if traj.truncated {
            warn!("replica {i} stopped at the event cap before the horizon");
        }
        let path = replica_path(&args.output, i, args.replicas);
        let title = format!("{:?} trajectory, nu = {}", process, spec.nu);
        let plot = || trajectory_plot(&traj, title.clone(), process == Process::Efpp);
        match args.format {
            Format::Svg => fs::write(&path, plot().render())?,
            f => {
                write_trajectory(&traj, &path, f)?;
                if args.plot {
                    fs::write(path.with_extension("svg"), plot().render())?;
                }
            }
        }
        info!("wrote {} ({} jumps)", path.display(), traj.len() - 1);
    }
    Ok(())
}

struct PmfComparison {
    analytic: PmfTable,
    mc: Option<PmfTable>,
}

impl PmfComparison {
    fn compute(nu: f64, lambda: f64, t: f64, nmax: usize, replicas: u64, seed: u64) -> Result<Self, CliError> {
        let params = MLParams::new(nu, lambda)?;
        let analytic = efpp_pmf_table(&params, t, nmax)?;
        let mc = if replicas > 0 {
            let counts = efpp_count_histogram(nu, lambda, t, nmax, replicas, seed)?;
            Some(PmfTable::from_histogram(&params, t, &counts)?)
        } else {
            None
        };
        Ok(Self { analytic, mc })
    }

    fn tv(&self) -> Result<Option<f64>, CliError> {
        Ok(match &self.mc {
            Some(mc) => Some(tv_distance(&self.analytic, mc)?),
            None => None,
        })
    }

    fn max_abs_diff(&self) -> Option<f64> {
        self.mc.as_ref().map(|mc| {
            self.analytic.clamped().iter().zip(&mc.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        })
    }

    fn write_csv<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        match &self.mc {
            Some(mc) => write_comparison_csv(&self.analytic, mc, out)?,
            None => {
                writeln!(out, "n,p_analytic")?;
                for (n, p) in self.analytic.clamped().iter().enumerate() {
                    writeln!(out, "{n},{}", g17(*p))?;
                }
                writeln!(out, "tail_bound,{}", g17(self.analytic.tail_bound.max(0.0)))?;
            }
        }
        Ok(())
    }

    fn to_json(&self) -> Result<serde_json::Value, CliError> {
        Ok(json!({
            "analytic": self.analytic,
            "monte_carlo": self.mc,
            "max_abs_diff": self.max_abs_diff(),
            "tv_distance": self.tv()?,
        }))
    }

    fn plot(&self) -> Plot {
        let a = &self.analytic;
        let mut series = vec![Series {
            label: "analytic".into(),
            style: Style::Points,
            color: "black",
            points: a.clamped().iter().enumerate().map(|(n, p)| (n as f64, *p)).collect(),
        }];
        if let Some(mc) = &self.mc {
            series.push(Series {
                label: "simulated".into(),
                style: Style::Crosses,
                color: "firebrick",
                points: mc.probs.iter().enumerate().map(|(n, p)| (n as f64, *p)).collect(),
            });
        }
        Plot {
            title: format!("p_n(t), nu = {}, t = {}, lambda = {}", a.nu, a.t, a.lambda),
            x_label: "n".into(),
            y_label: "p_n(t)".into(),
            series,
        }
    }
}

pub fn pmf(args: &PmfArgs, seed: u64) -> Result<(), CliError> {
    let cmp = PmfComparison::compute(args.nu, args.lambda, args.t, args.nmax, args.mc_replicas, seed)?;
    let mut out = create(&args.output)?;
    match args.format {
        Format::Csv => cmp.write_csv(&mut out)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &cmp.to_json()?)?;
            writeln!(out)?;
        }
        Format::Svg => out.write_all(cmp.plot().render().as_bytes())?,
    }
    out.flush()?;
    if let Some(tv) = cmp.tv()? {
        println!("tv_distance {}", g17(tv));
    }
    Ok(())
}

fn load_generator(path: Option<&Path>, bundled: Bundled) -> Result<(String, Generator), CliError> {
    match path {
        Some(p) => {
            let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "generator".into());
            Ok((name, Generator::from_text(&read_text(p)?)?))
        }
        None => {
            let spec = bundled_spec(bundled, 0.5)?;
            let n = spec.len();
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| spec.rates[i] * (spec.h[i][j] - if i == j { 1.0 } else { 0.0 })).collect())
                .collect();
            Ok((bundled_name(bundled).into(), Generator::from_rows(&rows)?))
        }
    }
}

fn mode_name(m: ModeArg) -> &'static str {
    match m {
        ModeArg::Markov => "markov",
        ModeArg::Semi => "semi",
        ModeArg::Para => "para",
    }
}

fn transition(g: &Generator, mode: ModeArg, nu: f64, t: f64) -> paramarkov::Result<TransitionMatrix> {
    match mode {
        ModeArg::Markov => transition_markov(g, t),
        ModeArg::Semi => transition_semi(g, nu, t),
        ModeArg::Para => transition_para(g, nu, t),
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub fn matrix(args: &MatrixArgs) -> Result<(), CliError> {
    if args.format == Format::Svg {
        return Err(CliError::Usage("matrix output supports csv or json".into()));
    }
    let (name, g) = load_generator(args.generator.as_deref(), args.bundled)?;
    let report = spectral_check(&g)?;
    if !report.passed {
        warn!("spectral assertions failed for {name}");
    }
    fs::create_dir_all(&args.output_dir)?;
    let mut sidecar = create(&args.output_dir.join("spectral.json"))?;
    serde_json::to_writer_pretty(&mut sidecar, &report)?;
    writeln!(sidecar)?;
    sidecar.flush()?;

    let mode = mode_name(args.mode);
    let mats = args
        .t
        .iter()
        .map(|&t| transition(&g, args.mode, args.nu, t))
        .collect::<paramarkov::Result<Vec<_>>>()?;
    let frac = if args.frac_generator { Some(frac_power_neg_gen(&g, args.nu)?) } else { None };
    match args.format {
        Format::Csv => {
            for m in &mats {
                let mut out = create(&args.output_dir.join(format!("{mode}_t{}.csv", m.t)))?;
                m.write_csv(&mut out)?;
                out.flush()?;
            }
            if let Some(b) = &frac {
                let mut out = create(&args.output_dir.join("frac_generator.csv"))?;
                write_matrix_csv(b, &mut out)?;
                out.flush()?;
            }
        }
        Format::Json => {
            let v = json!({
                "generator": name,
                "mode": mode,
                "nu": args.nu,
                "matrices": mats.iter().map(|m| json!({ "t": m.t, "entries": rows(&m.entries) })).collect::<Vec<_>>(),
                "frac_generator": frac.as_ref().map(rows),
            });
            let mut out = create(&args.output_dir.join(format!("{mode}.json")))?;
            serde_json::to_writer_pretty(&mut out, &v)?;
            writeln!(out)?;
            out.flush()?;
        }
        Format::Svg => unreachable!(),
    }
    Ok(())
}

/// One line of the verification report.
#[derive(Debug, Serialize)]
struct Check {
    suite: String,
    target: String,
    nu: Option<f64>,
    value: Option<f64>,
    tolerance: Option<f64>,
    passed: bool,
    message: Option<String>,
}

impl Check {
    fn measured(suite: &str, target: &str, nu: f64, r: paramarkov::Result<f64>, tol: f64) -> Self {
        match r {
            Ok(v) => Self {
                suite: suite.into(),
                target: target.into(),
                nu: Some(nu),
                value: Some(v),
                tolerance: Some(tol),
                passed: v <= tol,
                message: None,
            },
            Err(e) => Self {
                suite: suite.into(),
                target: target.into(),
                nu: Some(nu),
                value: None,
                tolerance: Some(tol),
                passed: false,
                message: Some(e.to_string()),
            },
        }
    }

    fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let nu = self.nu.map(|v| format!(" nu={v}")).unwrap_or_default();
        let detail = match (&self.value, &self.tolerance, &self.message) {
            (_, _, Some(m)) => m.clone(),
            (Some(v), Some(t), None) => format!("{v:.3e} (tol {t:.0e})"),
            _ => "ok".into(),
        };
        format!("{status} {:<18} {}{nu}: {detail}", self.suite, self.target)
    }
}

fn residual_tol(nu: f64) -> f64 {
    if nu == 1.0 {
        RESIDUAL_TOL_MARKOV
    } else {
        RESIDUAL_TOL
    }
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let grid = ResidualGrid::new(args.h, args.t_min, args.t_max)?;
    let generators = match &args.generator {
        Some(p) => vec![load_generator(Some(p), Bundled::TwoState)?],
        None => vec![
            load_generator(None, Bundled::TwoState)?,
            load_generator(None, Bundled::ThreeState)?,
        ],
    };
    let mut checks = Vec::new();
    for (name, g) in &generators {
        let r = spectral_check(g)?;
        checks.push(Check {
            suite: "spectral".into(),
            target: name.clone(),
            nu: None,
            value: None,
            tolerance: None,
            passed: r.passed,
            message: (!r.passed).then(|| format!("spectral assertions failed: {r:?}")),
        });
    }
    let renewal_times: Vec<f64> =
        [0.25, 0.5, 1.0, 1.5, 2.0].iter().map(|f| f / 2.0 * args.t_max).collect();
    for &nu in &args.nu {
        let tol = residual_tol(nu);
        let params = MLParams::new(nu, 1.0)?;
        for k in 0..=5 {
            let r = caputo_residual_efpp(&params, k, &grid);
            checks.push(Check::measured("efpp residual", &format!("p_{k}"), nu, r, tol));
        }
        for (name, g) in &generators {
            checks.push(Check::measured(
                "semi residual",
                name,
                nu,
                caputo_residual_matrix(g, nu, &grid, MatrixMode::Semi),
                tol,
            ));
            let para = if is_irreducible(g) {
                caputo_residual_matrix(g, nu, &grid, MatrixMode::Para)
            } else {
                Err(paramarkov::Error::SpectralDomain(
                    "rejected: the para-Markov equation requires an irreducible generator".into(),
                ))
            };
            checks.push(Check::measured("para residual", name, nu, para, tol));
            let renewal = spec_from_generator(g, nu)
                .map_err(|e| paramarkov::Error::Domain(e.to_string()))
                .and_then(|spec| renewal_residual(&spec, &renewal_times));
            checks.push(Check::measured("renewal residual", name, nu, renewal, RENEWAL_TOL));
        }
    }
    for c in &checks {
        println!("{}", c.line());
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if let Some(path) = &args.output {
        let mut out = create(path)?;
        let v = json!({ "checks": checks, "failed": failed, "passed": failed == 0 });
        serde_json::to_writer_pretty(&mut out, &v)?;
        writeln!(out)?;
        out.flush()?;
    }
    if failed > 0 {
        return Err(CliError::Verification(format!("{failed} of {} checks failed", checks.len())));
    }
    println!("all {} checks passed", checks.len());
    Ok(())
}

#[derive(Debug, Serialize)]
struct Cell {
    nu: f64,
    t: f64,
    max_abs_diff: f64,
    tv_distance: f64,
    passed: bool,
    table: String,
}

pub fn report(args: &ReportArgs, seed: u64) -> Result<(), CliError> {
    if args.replicas == 0 {
        return Err(CliError::Usage("the report needs at least one replica".into()));
    }
    let dir = &args.output_dir;
    fs::create_dir_all(dir)?;
    let mut cells = Vec::new();
    for &nu in &args.nu {
        for &t in &args.t {
            let cmp = PmfComparison::compute(nu, args.lambda, t, args.nmax, args.replicas, seed)?;
            let stem = format!("pmf_nu{nu}_t{t}");
            let mut out = create(&dir.join(format!("{stem}.csv")))?;
            cmp.write_csv(&mut out)?;
            out.flush()?;
            fs::write(dir.join(format!("{stem}.svg")), cmp.plot().render())?;
            let tv = cmp.tv()?.expect("replicas > 0");
            let diff = cmp.max_abs_diff().expect("replicas > 0");
            let passed = tv <= TV_TOL && diff <= MAX_ABS_DIFF_TOL;
            println!("{} nu={nu} t={t}: max|diff| {diff:.2e}, tv {tv:.2e}", if passed { "PASS" } else { "FAIL" });
            cells.push(Cell { nu, t, max_abs_diff: diff, tv_distance: tv, passed, table: format!("{stem}.csv") });
        }
    }
    let mut trajectories = Vec::new();
    for (i, &nu) in REPORT_TRAJECTORY_NUS.iter().enumerate() {
        let mut rng = RngStream::new(seed, i as u64);
        let traj = simulate_efpp(nu, args.lambda, Stop::Events(args.events), &mut rng)?;
        let stem = format!("trajectory_nu{nu}");
        let mut out = create(&dir.join(format!("{stem}.csv")))?;
        traj.write_csv(&mut out)?;
        out.flush()?;
        let plot = trajectory_plot(&traj, format!("efPp trajectory, nu = {nu}"), true);
        fs::write(dir.join(format!("{stem}.svg")), plot.render())?;
        trajectories.push(json!({ "nu": nu, "events": args.events, "file": format!("{stem}.csv") }));
    }
    let all_passed = cells.iter().all(|c| c.passed);
    let summary = json!({
        "seed": seed,
        "lambda": args.lambda,
        "replicas": args.replicas,
        "nmax": args.nmax,
        "tolerances": { "max_abs_diff": MAX_ABS_DIFF_TOL, "tv_distance": TV_TOL },
        "cells": cells,
        "trajectories": trajectories,
        "all_passed": all_passed,
    });
    let mut out = create(&dir.join("summary.json"))?;
    serde_json::to_writer_pretty(&mut out, &summary)?;
    writeln!(out)?;
    out.flush()?;
    if !all_passed {
        let n = cells.iter().filter(|c| !c.passed).count();
        return Err(CliError::Verification(format!("{n} pmf cells exceed the tolerances")));
    }
    Ok(())
}
