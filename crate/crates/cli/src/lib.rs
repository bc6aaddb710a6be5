//! Batch front-end of `fraclab`: configuration, commands and report files.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | I/O failure |
//! | 2 | invalid configuration or parameters |
//! | 3 | Picard iteration did not converge |
//! | 4 | blow-up (non-finite state) |
//! | 5 | rate fit impossible: gaps below the noise floor |

pub mod config;
pub mod output;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use fraclab::fit::{fit_log_log, LineFit};
use fraclab::kernels::kernel_rate_check;
use fraclab::lab::{base_data, derived_seed, run_rate_study, RateStudyReport, DEFAULT_SEED};
use fraclab::solver::{
    existence_time_alpha, existence_time_classical, existence_time_floor, etd_march, picard_solve,
    spec_existence_time, uniform_product_bound, PicardReport, SolverMode,
};
use fraclab::spectral::FourierGrid;
use fraclab::system::{build_preset, Model};
use serde::Serialize;

pub use config::{parse_config, parse_config_str, FileConfig};

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Config(String),
    Run(fraclab::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Run(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<fraclab::Error> for CliError {
    fn from(e: fraclab::Error) -> Self {
        CliError::Run(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Run(e) => match e.root() {
                fraclab::Error::Io(_) => 1,
                fraclab::Error::NonConvergence { .. } => 3,
                fraclab::Error::BlowUp { .. } | fraclab::Error::NonFinite(_) => 4,
                fraclab::Error::BelowNoiseFloor { .. } => 5,
                _ => 2,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    KernelVerify,
    ExistenceTime,
    Solve,
    RateStudy,
    Presets,
}

/// Everything a command needs besides the configuration file.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub plots: bool,
    pub timing: bool,
}

/// Files written by a command, relative to the output directory, plus warnings.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub summary: Vec<String>,
}

pub fn run_command(command: Command, cfg: &FileConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    fs::create_dir_all(&opts.out).map_err(|e| CliError::Io(format!("{}: {e}", opts.out.display())))?;
    match command {
        Command::KernelVerify => kernel_verify(cfg, opts),
        Command::ExistenceTime => existence_time(cfg, opts),
        Command::Solve => solve(cfg, opts),
        Command::RateStudy => rate_study(cfg, opts),
        Command::Presets => presets(opts),
    }
}

fn path(opts: &RunOptions, name: &str) -> PathBuf {
    opts.out.join(name)
}

#[derive(Serialize)]
struct KernelRow {
    alpha: f64,
    sup_eta: f64,
    sup_kappa: f64,
    ratio_eta: f64,
    ratio_kappa: f64,
}

#[derive(Serialize)]
struct KernelJson<'a> {
    report: &'a fraclab::kernels::KernelRateReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_s: Option<f64>,
}

fn kernel_verify(cfg: &FileConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let k = &cfg.kernel;
    let start = Instant::now();
    let report = kernel_rate_check(&k.alpha_grid, k.delta, k.horizon, k.n_times)?;
    let runtime = start.elapsed().as_secs_f64();
    let rows: Vec<KernelRow> = (0..report.alphas.len())
        .map(|i| KernelRow {
            alpha: report.alphas[i],
            sup_eta: report.sup_eta[i],
            sup_kappa: report.sup_kappa[i],
            ratio_eta: report.ratio_eta[i],
            ratio_kappa: report.ratio_kappa[i],
        })
        .collect();
    let mut out = Outcome::default();
    let csv = path(opts, "kernel_rate.csv");
    output::write_csv(&csv, &rows)?;
    let json = path(opts, "kernel_rate.json");
    output::write_json(&json, &KernelJson { report: &report, runtime_s: opts.timing.then_some(runtime) })?;
    out.files.extend([csv, json]);
    if opts.plots {
        out.files.extend(output::kernel_plots(&opts.out, &report.profiles)?);
    }
    out.summary.push(format!(
        "kernel rate: slope {:.4} (eta), {:.4} (kappa); ratio spread {:.3}, {:.3}; {}",
        report.fit_eta.slope,
        report.fit_kappa.slope,
        report.spread_eta,
        report.spread_kappa,
        if report.pass { "PASS" } else { "FAIL" }
    ));
    Ok(out)
}

#[derive(Serialize)]
struct ExistenceRow {
    alpha: f64,
    t_alpha: f64,
    t_2: f64,
    t_0: f64,
    floor_holds: bool,
}

#[derive(Serialize)]
struct ExistenceJson<'a> {
    constant: f64,
    norms: &'a [f64],
    delta: f64,
    beta: f64,
    t_2: f64,
    t_0: f64,
    rows: &'a [ExistenceRow],
    /// Log-log fit of `|T_alpha - T_2|` against `|2 - alpha|`.
    gap_fit: Option<LineFit>,
    floor_holds_everywhere: bool,
}

fn existence_time(cfg: &FileConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let e = &cfg.existence;
    let n = e.norms.len();
    let t2 = existence_time_classical(&e.norms, e.constant)?;
    let t0 = existence_time_floor(e.delta, e.beta, &e.norms, e.constant)?;
    let rows = e
        .alpha_grid
        .iter()
        .map(|&a| {
            let ta = existence_time_alpha(&vec![a; n], &e.norms, e.constant)?;
            Ok(ExistenceRow { alpha: a, t_alpha: ta, t_2: t2, t_0: t0, floor_holds: t0 <= ta })
        })
        .collect::<Result<Vec<_>, fraclab::Error>>()?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .map(|r| ((2.0 - r.alpha).abs(), (r.t_alpha - r.t_2).abs()))
        .filter(|p| p.1 > 0.0)
        .unzip();
    let mut out = Outcome::default();
    let gap_fit = if xs.len() >= 2 { fit_log_log(&xs, &ys).ok() } else { None };
    if gap_fit.is_none() {
        out.warnings.push("T_alpha - T_2 vanishes on the grid (the first branch binds); no gap fit".into());
    }
    let floor_ok = rows.iter().all(|r| r.floor_holds);
    let csv = path(opts, "existence_times.csv");
    output::write_csv(&csv, &rows)?;
    let json = path(opts, "existence_times.json");
    output::write_json(
        &json,
        &ExistenceJson {
            constant: e.constant,
            norms: &e.norms,
            delta: e.delta,
            beta: e.beta,
            t_2: t2,
            t_0: t0,
            rows: &rows,
            gap_fit,
            floor_holds_everywhere: floor_ok,
        },
    )?;
    out.files.extend([csv, json]);
    out.summary.push(format!(
        "T_2 = {t2:e}, T_0 = {t0:e} (relative to C = {}); T_0 <= T_alpha on the grid: {floor_ok}{}",
        e.constant,
        gap_fit.map(|f| format!("; |T_alpha - T_2| slope {:.4}", f.slope)).unwrap_or_default()
    ));
    Ok(out)
}

#[derive(Serialize)]
struct SolveJson<'a> {
    preset: &'a str,
    alpha: &'a [f64],
    sobolev_index: f64,
    horizon: f64,
    existence_time: f64,
    constant: f64,
    mode: SolverMode,
    nodes: usize,
    spec_hash: String,
    config_hash: String,
    product_bound: f64,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    picard: Option<&'a PicardReport>,
    dumps: Vec<String>,
}

fn solve(cfg: &FileConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let s = &cfg.solve;
    let grid = FourierGrid::new(s.grid.dim, s.grid.modes, s.grid.length)?;
    let n = s.preset.components(grid.dim());
    let alpha = if s.alpha.len() == 1 { vec![s.alpha[0]; n] } else { s.alpha.clone() };
    let sobolev = s.s.unwrap_or(grid.dim() as f64 / 2.0 + 1.0);
    let seed = opts.seed.or(s.seed).unwrap_or(DEFAULT_SEED);
    let blocks = s.preset.solenoidal_blocks();
    let data = base_data(&grid, n, &blocks, sobolev, s.data.hs_norm, s.data.max_wavenumber, derived_seed(seed, 1))?;
    let spec = build_preset(s.preset, &grid, alpha, data)?.with_sobolev_index(sobolev)?;
    let existence = spec_existence_time(&spec, s.solver.constant)?;
    let horizon = s.horizon.unwrap_or(existence);
    let (traj, picard) = match s.solver.mode {
        SolverMode::GlobalPicard => {
            let (t, r) = picard_solve(&spec, horizon, &s.solver)?;
            (t, Some(r))
        }
        SolverMode::EtdMarching => (etd_march(&spec, horizon, &s.solver)?, None),
    };
    let mut out = Outcome::default();
    let norms = path(opts, "trajectory_norms.csv");
    let file = fs::File::create(&norms).map_err(|e| CliError::Io(format!("{}: {e}", norms.display())))?;
    traj.write_norms_csv(std::io::BufWriter::new(file))?;
    out.files.push(norms);
    let mut nodes: Vec<usize> = s.dump_nodes.clone();
    nodes.push(traj.len() - 1);
    nodes.sort_unstable();
    nodes.dedup();
    let mut dumps = Vec::new();
    for &m in &nodes {
        if m >= traj.len() {
            return Err(CliError::Config(format!("solve.dump_nodes entry {m} exceeds the last node {}", traj.len() - 1)));
        }
        let name = format!("state_{m:06}.bin");
        let p = path(opts, &name);
        let file = fs::File::create(&p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        traj.write_dump(m, std::io::BufWriter::new(file))?;
        out.files.push(p);
        dumps.push(name);
    }
    let product_bound = uniform_product_bound(&traj, sobolev)?;
    let json = path(opts, "solve.json");
    output::write_json(
        &json,
        &SolveJson {
            preset: s.preset.name(),
            alpha: spec.alpha(),
            sobolev_index: sobolev,
            horizon,
            existence_time: existence,
            constant: s.solver.constant,
            mode: s.solver.mode,
            nodes: traj.len(),
            spec_hash: format!("{:016x}", traj.meta().spec_hash),
            config_hash: format!("{:016x}", traj.meta().config_hash),
            product_bound,
            seed,
            picard: picard.as_ref(),
            dumps,
        },
    )?;
    out.files.push(json);
    out.summary.push(format!(
        "{}: {} nodes on [0, {horizon:e}] (T_alpha = {existence:e} relative to C = {}){}",
        s.preset,
        traj.len(),
        s.solver.constant,
        picard.map(|r| format!(", Picard converged in {} iterations", r.iterations)).unwrap_or_default()
    ));
    Ok(out)
}

#[derive(Serialize)]
struct RateCsvRow {
    alpha: f64,
    #[serde(rename = "gap_Hs")]
    gap_hs: f64,
    #[serde(rename = "gap_L2")]
    gap_l2: f64,
    #[serde(rename = "gap_Linf")]
    gap_linf: f64,
    #[serde(rename = "gap_Wsp")]
    gap_wsp: f64,
    eta: f64,
    horizon: f64,
    runtime_s: Option<f64>,
}

fn rate_study(cfg: &FileConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let mut study = cfg.study.clone();
    if let Some(seed) = opts.seed {
        study.seed = seed;
    }
    study.timing = opts.timing;
    let report = run_rate_study(&study)?;
    let mut out = Outcome::default();
    let rows: Vec<RateCsvRow> = report
        .rows
        .iter()
        .map(|r| RateCsvRow {
            alpha: r.alpha,
            gap_hs: r.gap_weighted_hs,
            gap_l2: r.gap_l2,
            gap_linf: r.gap_linf,
            gap_wsp: r.gap_wsp,
            eta: report.eta,
            horizon: r.horizon,
            runtime_s: r.runtime_s,
        })
        .collect();
    let csv = path(opts, "rate_study.csv");
    output::write_csv(&csv, &rows)?;
    let json = path(opts, "rate_study.json");
    output::write_json(&json, &report)?;
    out.files.extend([csv, json]);
    if opts.plots {
        let plots = output::rate_plots(&opts.out, &report)?;
        if plots.is_empty() {
            out.warnings.push("empty report: no plot scripts written".into());
        }
        out.files.extend(plots);
    }
    out.warnings.extend(report.warnings.iter().cloned());
    out.summary.push(rate_summary(&report));
    if report.fits[0].fit.is_none() {
        return Err(CliError::Run(fraclab::Error::BelowNoiseFloor { floor: report.fits[0].noise_floor }));
    }
    Ok(out)
}

fn rate_summary(r: &RateStudyReport) -> String {
    let slopes: Vec<String> = r
        .fits
        .iter()
        .map(|f| format!("{} {}", f.norm, f.slope().map(|s| format!("{s:.4}")).unwrap_or_else(|| "-".into())))
        .collect();
    format!(
        "{}: slopes [{}]; predicted min(beta, 1) = {} +- {}; {}",
        r.preset,
        slopes.join(", "),
        r.predicted_rate,
        r.tolerance,
        if r.pass { "PASS" } else { "FAIL" }
    )
}

#[derive(Serialize)]
struct PresetInfo {
    name: &'static str,
    description: &'static str,
    dimensions: Vec<usize>,
    components: Vec<usize>,
    solenoidal_blocks: Vec<[usize; 2]>,
}

fn presets(opts: &RunOptions) -> Result<Outcome, CliError> {
    let infos: Vec<PresetInfo> = Model::ALL
        .iter()
        .map(|&m| {
            let dims: Vec<usize> = (1..=3).filter(|&d| m.dimension_ok(d)).collect();
            PresetInfo {
                name: m.name(),
                description: m.description(),
                components: dims.iter().map(|&d| m.components(d)).collect(),
                dimensions: dims,
                solenoidal_blocks: m.solenoidal_blocks().iter().map(|b| [b.start, b.end]).collect(),
            }
        })
        .collect();
    let json = path(opts, "presets.json");
    output::write_json(&json, &infos)?;
    let mut out = Outcome::default();
    out.files.push(json);
    for i in &infos {
        out.summary.push(format!("{:<14} {}", i.name, i.description));
    }
    Ok(out)
}

/// Loads the configuration, or the defaults when no file is given.
pub fn load(config: Option<&Path>) -> Result<FileConfig, CliError> {
    match config {
        Some(p) => parse_config(p),
        None => {
            let cfg = FileConfig::default();
            config::validate(&cfg)?;
            Ok(cfg)
        }
    }
}

/// Runs `command`, optionally on a pool of `workers` threads.
pub fn run_with_workers(command: Command, cfg: &FileConfig, opts: &RunOptions, workers: Option<usize>) -> Result<Outcome, CliError> {
    match workers {
        Some(0) => Err(CliError::Config("--workers must be at least 1".into())),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| CliError::Config(format!("cannot start {k} workers: {e}")))?;
            pool.install(|| run_command(command, cfg, opts))
        }
        None => run_command(command, cfg, opts),
    }
}
