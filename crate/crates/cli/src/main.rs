//! `lep`: run the boundary empirical process experiments from a config file.

mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lep_core::boundary_measure::{
    collar_probability, measure_derivative_check, mp_measure, neighborhood_mass, q_measure, qn_measure, tv_distance,
    BoundaryDensity, DensityModel,
};
use lep_core::empirical::sample_ambient;
use lep_core::rng::stream_rng;
use lep_core::set_classes::{bracket_cover, shatter_check, BracketFamily, ShatterClass};
use lep_core::verify::{
    changeset_counts, changeset_loglik, excess_mass, min_volume_set, simulate_marks, statement_a_statistic,
    statement_b_test, sup_functional_test, ChangeSetModel, MassSource, StatementAConfig, StatementBConfig,
    SupFunctionalConfig,
};
use lep_core::CylinderPoint;
use serde_json::json;
use thiserror::Error;

use config::{MassMode, RunConfig};
use report::{csv, Line, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] lep_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Parser)]
#[command(name = "lep", version, about = "Local empirical processes near the boundary of a convex body")]
struct Cli {
    /// TOML or JSON config; built-in defaults are used when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    reps: Option<usize>,
    #[arg(long, global = true)]
    n: Option<u64>,
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Directory for the JSON (and CSV) report.
    #[arg(long, global = true, default_value = "lep-out")]
    out: PathBuf,
    /// Raster resolution in theta.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Perimeter, area and collar areas of the body.
    Geometry,
    /// One of the boundary measures.
    Measure {
        #[arg(value_enum)]
        what: MeasureKind,
    },
    /// Differentiation in measure of the configured family.
    Derivative,
    /// Bracketing cover and shattering checks.
    Classes,
    /// Limit theorem checks.
    Clt {
        #[arg(value_enum, default_value = "b")]
        statement: Statement,
    },
    /// Sup functional against the Gaussian limit.
    Supfun,
    /// Change-set counts and log-likelihood on simulated marks.
    Changeset,
    /// Excess-mass disc estimator.
    ExcessMass,
    /// Minimum-volume disc estimator.
    MinVolume,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MeasureKind {
    Tv,
    Qn,
    Q,
    Mp,
    A,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Statement {
    A,
    B,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Geometry => "geometry",
            Command::Measure { .. } => "measure",
            Command::Derivative => "derivative",
            Command::Classes => "classes",
            Command::Clt { .. } => "clt",
            Command::Supfun => "supfun",
            Command::Changeset => "changeset",
            Command::ExcessMass => "excess-mass",
            Command::MinVolume => "min-volume",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render());
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn settings(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => config::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = cli.reps {
        cfg.reps = v;
    }
    if let Some(v) = cli.n {
        cfg.n = v;
    }
    if let Some(v) = cli.eps {
        cfg.eps = v;
    }
    if let Some(v) = cli.grid {
        cfg.grid = v;
    }
    if cfg.grid < 4 {
        return Err(CliError::Config("grid must be at least 4".into()));
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let cfg = settings(cli)?;
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let name = cli.command.name();
    let report = match &cli.command {
        Command::Geometry => geometry(name, &cfg)?,
        Command::Measure { what } => measure(name, &cfg, *what)?,
        Command::Derivative => derivative(name, &cfg)?,
        Command::Classes => classes(name, &cfg)?,
        Command::Clt { statement: Statement::A } => clt_a(name, &cfg)?,
        Command::Clt { statement: Statement::B } => clt_b(name, &cfg)?,
        Command::Supfun => supfun(name, &cfg)?,
        Command::Changeset => changeset(name, &cfg)?,
        Command::ExcessMass => excess(name, &cfg)?,
        Command::MinVolume => min_volume(name, &cfg)?,
    };
    report.write(&cli.out)?;
    Ok(report)
}

fn density(cfg: &RunConfig) -> Result<BoundaryDensity, CliError> {
    Ok(BoundaryDensity::new(cfg.density.clone(), &cfg.body)?)
}

fn raster(cfg: &RunConfig) -> (usize, usize) {
    (cfg.grid, cfg.grid / 4)
}

fn geometry(name: &str, cfg: &RunConfig) -> Result<Report, CliError> {
    let b = &cfg.body;
    b.check_eps(cfg.eps)?;
    let lines = vec![
        Line::value("perimeter", b.perimeter()),
        Line::value("area", b.area()),
        Line::value("inradius", b.inradius()),
        Line::value("neighborhood_area", b.neighborhood_area(cfg.eps)?),
        Line::value("outer_area", b.outer_area(cfg.eps)),
        Line::value("inner_area", b.inner_area(cfg.eps)),
    ];
    Ok(Report::new(name, cfg, lines, json!({ "eps": cfg.eps })))
}

fn measure(name: &str, cfg: &RunConfig, what: MeasureKind) -> Result<Report, CliError> {
    let (body, eps) = (&cfg.body, cfg.eps);
    let dens = density(cfg)?;
    let lines = match what {
        MeasureKind::Tv => vec![Line::value("tv", tv_distance(&dens, body, eps, raster(cfg))?)],
        MeasureKind::A => vec![Line::value("a", neighborhood_mass(body, &dens, eps)?)],
        MeasureKind::Mp => per_region(cfg, "mp", |r| Ok(mp_measure(r, &dens, body)))?,
        MeasureKind::Q => per_region(cfg, "q", |r| Ok(q_measure(r, &dens, body)))?,
        MeasureKind::Qn => per_region(cfg, "qn", |r| Ok(qn_measure(r, &dens, body, eps)?))?,
    };
    let kind = format!("{what:?}").to_lowercase();
    Ok(Report::new(name, cfg, lines, json!({ "measure": kind, "eps": eps })))
}

fn per_region<F>(cfg: &RunConfig, label: &str, f: F) -> Result<Vec<Line>, CliError>
where
    F: Fn(&lep_core::boundary_measure::CylinderRegion) -> Result<f64, CliError>,
{
    cfg.regions.iter().enumerate().map(|(j, r)| Ok(Line::value(format!("{label}[{j}]"), f(r)?))).collect()
}

fn derivative(name: &str, cfg: &RunConfig) -> Result<Report, CliError> {
    let body = &cfg.body;
    let dens = density(cfg)?;
    let b = match &cfg.derivative {
        Some(b) => b.clone(),
        None => cfg.family.derivative(body)?,
    };
    let rows = measure_derivative_check(|e| cfg.family.tau_image(body, e), &b, &dens, body, &cfg.eps_grid)?;
    let mut lines = Vec::new();
    for r in &rows {
        lines.push(Line::value(format!("ratio[eps={}]", r.eps), r.ratio));
        lines.push(Line::value(format!("deficit[eps={}]", r.eps), r.deficit));
    }
    if let Some(r) = rows.first() {
        lines.push(Line::value("mp_b", r.mp_b));
    }
    let decreasing = rows.windows(2).all(|w| w[1].deficit < w[0].deficit);
    if rows.len() > 1 {
        let ratio = rows.last().unwrap().deficit / rows[0].deficit;
        lines.push(Line::check("deficit_last_over_first", ratio, None, decreasing));
    }
    let table = csv(
        &["eps", "ratio", "mp_b", "deficit"].map(String::from),
        rows.iter().map(|r| vec![r.eps, r.ratio, r.mp_b, r.deficit]),
    );
    Ok(Report::new(name, cfg, lines, json!({ "rows": rows })).with_csv(table))
}

fn classes(name: &str, cfg: &RunConfig) -> Result<Report, CliError> {
    let body = &cfg.body;
    let dens = density(cfg)?;
    let set = bracket_cover(&BracketFamily::IntervalBands, cfg.delta, &dens, body, cfg.eps)?;
    let nested = set.check_nested(body, 2000, &mut stream_rng(cfg.seed, 0));
    let max_size = set.brackets.iter().map(|b| b.size).fold(0.0, f64::max);
    let limit = ((2.0 / (cfg.delta * cfg.delta)).ceil() + 1.0).powi(4);
    let pts = |s: &[f64]| -> Vec<CylinderPoint> {
        s.iter().enumerate().map(|(i, &s)| CylinderPoint::new(0.7 * i as f64, s)).collect()
    };
    let four = shatter_check(&ShatterClass::SBand, &pts(&[0.6, -0.7, 0.1, -0.2]))?;
    let five = shatter_check(&ShatterClass::SBand, &pts(&[-0.8, -0.4, 0.0, 0.4, 0.8]))?;
    let lines = vec![
        Line::check("bracket_count", set.count as f64, Some(limit), set.count as f64 <= limit),
        Line::check("max_bracket_size", max_size, Some(cfg.delta), max_size <= cfg.delta),
        Line::check("nested", f64::from(u8::from(nested)), None, nested),
        Line::check("four_points_shattered", f64::from(u8::from(four.shattered)), None, four.shattered),
        Line::check("five_points_not_shattered", f64::from(u8::from(!five.shattered)), None, !five.shattered),
    ];
    let data = json!({
        "delta": cfg.delta,
        "eps": cfg.eps,
        "resolution": set.resolution,
        "quantiles": set.quantiles,
        "four": four,
        "five": five,
    });
    Ok(Report::new(name, cfg, lines, data))
}

fn clt_a(name: &str, cfg: &RunConfig) -> Result<Report, CliError> {
    let a = StatementAConfig {
        body: cfg.body.clone(),
        density: cfg.density.clone(),
        schedule: cfg.schedule.clone(),
        grid: cfg.class_grid.clone(),
        reps: cfg.reps,
        master_seed: cfg.seed,
        gamma: cfg.gamma,
        table_resolution: 2048,
    };
    let r = statement_a_statistic(&a)?;
    let mut lines: Vec<Line> = Vec::new();
    for s in &r.steps {
        lines.push(Line::value(format!("gamma[n={}]", s.n), s.gamma));
        lines.push(Line::value(format!("median[n={}]", s.n), s.median));
    }
    let first = r.steps[0].median;
    let last = r.steps.last().unwrap().median;
    lines.push(Line::check("median_last_over_first", last / first, Some(0.5), r.medians_non_increasing && r.halved));
    let rows = r.steps.iter().flat_map(|s| {
        s.values.iter().enumerate().map(move |(i, &v)| vec![s.n as f64, s.eps, i as f64, v])
    });
    let table = csv(&["n", "eps", "rep", "value"].map(String::from), rows);
    let data = json!({
        "statement": "a",
        "steps": r.steps.iter().map(|s| json!({ "n": s.n, "eps": s.eps, "gamma": s.gamma, "pairs": s.pairs, "median": s.median })).collect::<Vec<_>>(),
        "medians_non_increasing": r.medians_non_increasing,
        "halved": r.halved,
    });
    Ok(Report::new(name, cfg, lines, data).with_csv(table))
}

fn clt_b(name: &str, cfg: &RunConfig) -> Result<Report, CliError> {
    let b = StatementBConfig {
        body: cfg.body.clone(),
        density: cfg.density.clone(),
        n: cfg.n,
        eps: cfg.eps,
        regions: cfg.regions.clone(),
        reps: cfg.reps,
        master_seed: cfg.seed,
        ks_tol: cfg.ks_tol,
        cov_tol: cfg.cov_tol,
    };
    let r = statement_b_test(&b)?;
    let mut lines = Vec::new();
    for j in 0..r.q.len() {
        lines.push(Line::value(format!("mean[{j}]"), r.mean[j]));
        lines.push(Line::value(format!("variance[{j}]"), r.variance[j]));
        lines.push(Line::value(format!("q[{j}]"), r.q[j]));
        lines.push(Line::value(format!("ks[{j}]"), r.ks[j]));
    }
    let cov_err = r
        .covariance
        .iter()
        .zip(&r.covariance_target)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    lines.push(Line::check("max_covariance_error", cov_err, Some(cfg.cov_tol), r.covariance_pass));
    lines.push(Line::check(
        "ks_fail_fraction",
        r.ks_fail_fraction,
        Some(cfg.max_fail_fraction),
        r.ks_fail_fraction <= cfg.max_fail_fraction,
    ));
    let mut header = vec!["rep".to_string()];
    header.extend((0..r.q.len()).map(|j| format!("v_{j}")));
    let rows = r.values.iter().enumerate().map(|(i, v)| {
        let mut row = vec![i as f64];
        row.extend(v);
        row
    });
    let table = csv(&header, rows);
    let data = json!({
        "statement": "b",
        "mean": r.mean,
        "variance": r.variance,
        "q": r.q,
        "ks": r.ks,
        "ks_pass": r.ks_pass,
        "covariance": r.covariance,
        "covariance_target": r.covariance_target,
        "covariance_pass": r.covariance_pass,
        "ks_fail_fraction": r.ks_fail_fraction,
    });
    Ok(Report::new(name, cfg, lines, data).with_csv(table))
}

fn supfun(name: &str, cfg: &RunConfig) -> Result<Report, CliError> {
    let s = SupFunctionalConfig {
        body: cfg.body.clone(),
        density: cfg.density.clone(),
        n: cfg.n,
        eps: cfg.eps,
        regions: cfg.regions.clone(),
        reps: cfg.reps,
        draws: cfg.draws,
        master_seed: cfg.seed,
    };
    let r = sup_functional_test(&s)?;
    let lines = vec![Line::check("ks", r.ks, Some(cfg.sup_ks_tol), r.ks <= cfg.sup_ks_tol)];
    let len = r.sup_vn.len().max(r.sup_w.len());
    let rows = (0..len).map(|i| {
        vec![i as f64, r.sup_vn.get(i).copied().unwrap_or(f64::NAN), r.sup_w.get(i).copied().unwrap_or(f64::NAN)]
    });
    let table = csv(&["index", "sup_vn", "sup_w"].map(String::from), rows);
    let data = json!({ "ks": r.ks, "reps": r.sup_vn.len(), "draws": r.sup_w.len() });
    Ok(Report::new(name, cfg, lines, data).with_csv(table))
}

fn changeset(name: &str, cfg: &RunConfig) -> Result<Report, CliError> {
    let body = &cfg.body;
    let dens = density(cfg)?;
    let model = ChangeSetModel::new(body.clone(), cfg.family.clone(), cfg.p1, cfg.p2)?;
    let k_eps = model.k_eps(cfg.eps)?;
    let points = sample_ambient(body, &dens, sample_size(cfg)?, &mut stream_rng(cfg.seed, 0));
    // marks follow the alternative K(eps)
    let marks = simulate_marks(&points, &k_eps, cfg.p2, cfg.p1, &mut stream_rng(cfg.seed, 1));
    let (added, removed) = changeset_counts(&points, body, &k_eps);
    let loglik = changeset_loglik(&points, &marks, &model, cfg.eps)?;
    let p_sym = collar_probability(&cfg.family.tau_image(body, cfg.eps)?, &dens, body, cfg.eps)?;
    let lines = vec![
        Line::value("added", added as f64),
        Line::value("removed", removed as f64),
        Line::value("loglik", loglik),
        Line::value("p_symmetric_difference", p_sym),
    ];
    let data = json!({ "n": points.len(), "eps": cfg.eps });
    Ok(Report::new(name, cfg, lines, data))
}

fn sample_size(cfg: &RunConfig) -> Result<usize, CliError> {
    usize::try_from(cfg.n).map_err(|_| CliError::Config(format!("n = {} too large", cfg.n)))
}

fn fit_lines(fit: &lep_core::verify::DiscFit) -> Vec<Line> {
    vec![
        Line::value("cx", fit.disc.center.x),
        Line::value("cy", fit.disc.center.y),
        Line::value("r", fit.disc.radius),
        Line::value("objective", fit.objective),
        Line::value("mass", fit.mass),
    ]
}

fn with_source<T>(
    cfg: &RunConfig,
    f: impl FnOnce(&MassSource, &BoundaryDensity) -> Result<T, CliError>,
) -> Result<T, CliError> {
    let dens = density(cfg)?;
    match cfg.mode {
        MassMode::Population => f(&MassSource::population(&cfg.body, &dens)?, &dens),
        MassMode::Sample => {
            let pts = sample_ambient(&cfg.body, &dens, sample_size(cfg)?, &mut stream_rng(cfg.seed, 0));
            f(&MassSource::Sample { points: &pts }, &dens)
        }
    }
}

fn excess(name: &str, cfg: &RunConfig) -> Result<Report, CliError> {
    let fit = with_source(cfg, |src, dens| {
        let lambda = match (cfg.lambda, dens.model()) {
            (Some(l), _) => l,
            (None, DensityModel::TwoLevel { c_in, c_out, .. }) => 0.5 * (c_in + c_out),
            (None, _) => return Err(CliError::Config("lambda is required for this density".into())),
        };
        Ok((lambda, excess_mass(src, lambda, cfg.bounds, cfg.search)?))
    })?;
    let (lambda, fit) = fit;
    let mut lines = vec![Line::value("lambda", lambda)];
    lines.extend(fit_lines(&fit));
    let data = json!({ "fit": fit, "mode": cfg.mode });
    Ok(Report::new(name, cfg, lines, data))
}

fn min_volume(name: &str, cfg: &RunConfig) -> Result<Report, CliError> {
    let fit = with_source(cfg, |src, _| Ok(min_volume_set(src, cfg.alpha, cfg.bounds, cfg.search)?))?;
    let mut lines = vec![Line::value("alpha", cfg.alpha)];
    lines.extend(fit_lines(&fit.fit));
    let data = json!({ "fit": fit, "mode": cfg.mode });
    Ok(Report::new(name, cfg, lines, data))
}
