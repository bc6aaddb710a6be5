//! Configuration file schema and validation.
//!
//! One TOML file holds a section per command; absent sections take their
//! defaults. Every range violation names the offending key.

use std::fs;
use std::path::Path;

use fraclab::kernels::DeltaParams;
use fraclab::lab::{DataConfig, GridConfig, HorizonPolicy, RateStudyConfig};
use fraclab::solver::SolverConfig;
use fraclab::system::Model;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub kernel: KernelSection,
    pub existence: ExistenceSection,
    pub solve: SolveSection,
    pub study: RateStudyConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSection {
    pub alpha_grid: Vec<f64>,
    pub delta: f64,
    pub horizon: f64,
    /// Nonzero sample times of each weighted profile.
    pub n_times: usize,
}

impl Default for KernelSection {
    fn default() -> Self {
        KernelSection {
            alpha_grid: vec![1.85, 1.90, 1.95, 1.99, 2.01, 2.05, 2.10, 2.15],
            delta: 0.15,
            horizon: 1.0,
            n_times: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExistenceSection {
    pub alpha_grid: Vec<f64>,
    /// `|u_{0,j}|_{H^s}` per component, shared by every alpha (fixed data).
    pub norms: Vec<f64>,
    pub constant: f64,
    pub delta: f64,
    pub beta: f64,
}

impl Default for ExistenceSection {
    fn default() -> Self {
        ExistenceSection {
            alpha_grid: (0..=20).filter(|&k| k != 10).map(|k| (190 + k) as f64 / 100.0).collect(),
            norms: vec![1.0],
            constant: 1.0,
            delta: 0.1,
            beta: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveSection {
    pub preset: Model,
    pub grid: GridConfig,
    /// One exponent per component, or a single value for all.
    pub alpha: Vec<f64>,
    pub s: Option<f64>,
    pub data: DataConfig,
    /// `T_alpha` (relative to the solver constant) when absent.
    pub horizon: Option<f64>,
    pub solver: SolverConfig,
    /// Nodes written as binary dumps besides the final one.
    pub dump_nodes: Vec<usize>,
    pub seed: Option<u64>,
}

impl Default for SolveSection {
    fn default() -> Self {
        SolveSection {
            preset: Model::Burgers1d,
            grid: GridConfig::default(),
            alpha: vec![1.9],
            s: None,
            data: DataConfig::default(),
            horizon: None,
            solver: SolverConfig::default(),
            dump_nodes: Vec::new(),
            seed: None,
        }
    }
}

/// Reads and validates a configuration file.
pub fn parse_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let cfg = parse_config_str(&text)?;
    Ok(cfg)
}

pub fn parse_config_str(text: &str) -> Result<FileConfig, CliError> {
    let cfg: FileConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))?;
    validate(&cfg)?;
    Ok(cfg)
}

fn bad(msg: String) -> CliError {
    CliError::Config(msg)
}

const WINDOW: &str = "0 < delta < 1/6, the admissible window 2 - delta < alpha_i < 2 + delta";

fn check_delta(key: &str, delta: f64) -> Result<DeltaParams, CliError> {
    if !(delta > 0.0 && delta < 1.0 / 6.0) {
        return Err(bad(format!("{key} = {delta} violates {WINDOW}")));
    }
    DeltaParams::new(delta).map_err(|e| bad(format!("{key}: {e}")))
}

/// `closed` admits the endpoints `|alpha - 2| = delta` up to rounding.
fn check_alpha_window(key: &str, grid: &[f64], delta_key: &str, params: &DeltaParams, closed: bool) -> Result<(), CliError> {
    if grid.is_empty() {
        return Err(bad(format!("{key} must not be empty")));
    }
    for (i, &a) in grid.iter().enumerate() {
        if a == 2.0 {
            return Err(bad(format!("{key}[{i}] = 2 is not allowed: the grid must exclude alpha = 2")));
        }
        let inside = if closed { (a - 2.0).abs() <= params.delta * (1.0 + 1e-12) } else { params.admits(a) };
        if !inside {
            let rel = if closed { "<=" } else { "<" };
            return Err(bad(format!(
                "{key}[{i}] = {a} violates 2 - delta {rel} alpha {rel} 2 + delta with {delta_key} = {}",
                params.delta
            )));
        }
    }
    Ok(())
}

fn check_positive(key: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(format!("{key} = {v} must be positive and finite")))
    }
}

fn check_grid(key: &str, g: &GridConfig, model: Model) -> Result<(), CliError> {
    if !(1..=3).contains(&g.dim) {
        return Err(bad(format!("{key}.dim = {} must be 1, 2 or 3", g.dim)));
    }
    if g.modes < 4 || g.modes % 2 != 0 {
        return Err(bad(format!("{key}.modes = {} must be even and at least 4", g.modes)));
    }
    check_positive(&format!("{key}.length"), g.length)?;
    if !model.dimension_ok(g.dim) {
        return Err(bad(format!("{key}.dim = {} is not supported by preset {model}", g.dim)));
    }
    Ok(())
}

fn check_solver(key: &str, s: &SolverConfig) -> Result<(), CliError> {
    if s.substeps == 0 {
        return Err(bad(format!("{key}.substeps must be at least 1")));
    }
    if !(s.picard_tol > 0.0 && s.picard_tol < 1.0) {
        return Err(bad(format!("{key}.picard_tol = {} must lie in (0, 1)", s.picard_tol)));
    }
    if s.picard_max_iters == 0 {
        return Err(bad(format!("{key}.picard_max_iters must be at least 1")));
    }
    check_positive(&format!("{key}.constant"), s.constant)?;
    check_positive(&format!("{key}.dt"), s.dt)
}

fn check_sobolev(key: &str, s: Option<f64>, dim: usize) -> Result<(), CliError> {
    match s {
        Some(s) if !(s > dim as f64 / 2.0 && s.is_finite()) => {
            Err(bad(format!("{key} = {s} must exceed d/2 = {} so that H^s is an algebra", dim as f64 / 2.0)))
        }
        _ => Ok(()),
    }
}

fn check_data(key: &str, d: &DataConfig, modes: usize) -> Result<(), CliError> {
    check_positive(&format!("{key}.hs_norm"), d.hs_norm)?;
    let kmax = (modes as i64 - 1) / 3;
    if d.max_wavenumber < 1 || d.max_wavenumber > kmax {
        return Err(bad(format!(
            "{key}.max_wavenumber = {} must lie in [1, {kmax}] (modes kept by the 2/3 rule)",
            d.max_wavenumber
        )));
    }
    Ok(())
}

/// Range checks with keyed messages; the library re-validates on use.
pub fn validate(cfg: &FileConfig) -> Result<(), CliError> {
    let k = &cfg.kernel;
    let kp = check_delta("kernel.delta", k.delta)?;
    check_alpha_window("kernel.alpha_grid", &k.alpha_grid, "kernel.delta", &kp, false)?;
    if k.alpha_grid.len() < 2 {
        return Err(bad("kernel.alpha_grid needs at least two values for a slope fit".into()));
    }
    check_positive("kernel.horizon", k.horizon)?;
    if k.n_times == 0 {
        return Err(bad("kernel.n_times must be at least 1".into()));
    }

    let e = &cfg.existence;
    let ep = check_delta("existence.delta", e.delta)?;
    check_alpha_window("existence.alpha_grid", &e.alpha_grid, "existence.delta", &ep, true)?;
    if e.norms.is_empty() {
        return Err(bad("existence.norms must hold one Hs norm per component".into()));
    }
    for (j, &u) in e.norms.iter().enumerate() {
        if !(u >= 0.0 && u.is_finite()) {
            return Err(bad(format!("existence.norms[{j}] = {u} must be finite and nonnegative")));
        }
    }
    check_positive("existence.constant", e.constant)?;
    check_positive("existence.beta", e.beta)?;

    let s = &cfg.solve;
    check_grid("solve.grid", &s.grid, s.preset)?;
    let n = s.preset.components(s.grid.dim);
    if s.alpha.len() != 1 && s.alpha.len() != n {
        return Err(bad(format!("solve.alpha has {} entries; preset {} needs 1 or {n}", s.alpha.len(), s.preset)));
    }
    for (i, &a) in s.alpha.iter().enumerate() {
        if !(a > 1.0 && a.is_finite()) {
            return Err(bad(format!("solve.alpha[{i}] = {a} must exceed 1 (local existence needs alpha_i > 1)")));
        }
    }
    check_sobolev("solve.s", s.s, s.grid.dim)?;
    check_data("solve.data", &s.data, s.grid.modes)?;
    if let Some(t) = s.horizon {
        check_positive("solve.horizon", t)?;
    }
    check_solver("solve.solver", &s.solver)?;

    let st = &cfg.study;
    check_grid("study.grid", &st.grid, st.preset)?;
    let sp = check_delta("study.delta", st.delta)?;
    check_alpha_window("study.alpha_grid", &st.alpha_grid, "study.delta", &sp, false)?;
    if st.alpha_grid.len() < 3 {
        return Err(bad(format!("study.alpha_grid has {} values; a rate fit needs at least 3", st.alpha_grid.len())));
    }
    let n = st.preset.components(st.grid.dim);
    if st.beta.len() != 1 && st.beta.len() != n {
        return Err(bad(format!("study.beta has {} entries; preset {} needs 1 or {n}", st.beta.len(), st.preset)));
    }
    for (i, &b) in st.beta.iter().enumerate() {
        check_positive(&format!("study.beta[{i}]"), b)?;
    }
    if !(st.c >= 0.0 && st.c.is_finite()) {
        return Err(bad(format!("study.c = {} must be finite and nonnegative", st.c)));
    }
    check_sobolev("study.s", st.s, st.grid.dim)?;
    let s_eff = st.s.unwrap_or(st.grid.dim as f64 / 2.0 + 1.0);
    if !(st.wsp_sigma > 0.0 && st.wsp_sigma < s_eff) {
        return Err(bad(format!("study.wsp_sigma = {} must lie in (0, s) with s = {s_eff}", st.wsp_sigma)));
    }
    if !(st.wsp_p >= 2.0 && st.wsp_p.is_finite()) {
        return Err(bad(format!("study.wsp_p = {} must satisfy 2 <= p < inf", st.wsp_p)));
    }
    check_data("study.data", &st.data, st.grid.modes)?;
    if let HorizonPolicy::Fixed { t } = st.horizon {
        check_positive("study.horizon.t", t)?;
        if let Some(eps) = st.epsilon {
            if !(eps > 0.0 && eps < t) {
                return Err(bad(format!("study.epsilon = {eps} must lie in (0, horizon.t = {t})")));
            }
        }
    }
    if let Some(eps) = st.epsilon {
        check_positive("study.epsilon", eps)?;
    }
    check_positive("study.tolerance", st.tolerance)?;
    check_positive("study.corollary_tolerance", st.corollary_tolerance)?;
    check_solver("study.solver", &st.solver)?;
    st.validate().map_err(|e| bad(format!("study: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(text: &str) -> String {
        match parse_config_str(text) {
            Err(CliError::Config(m)) => m,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(parse_config_str("").unwrap(), FileConfig::default());
    }

    #[test]
    fn minimal_burgers_study() {
        let cfg = parse_config_str(
            "[study]\npreset = \"burgers1d\"\nalpha_grid = [1.9, 1.95, 1.99]\ndelta = 0.12\nbeta = [0.5]\nc = 0.05\n",
        )
        .unwrap();
        assert_eq!(cfg.study.alpha_grid, vec![1.9, 1.95, 1.99]);
        assert_eq!(cfg.study.delta, 0.12);
    }

    #[test]
    fn delta_out_of_range_names_key_and_interval() {
        let m = err("[study]\ndelta = 0.2\n");
        assert!(m.contains("study.delta = 0.2") && m.contains("0 < delta < 1/6"), "{m}");
    }

    #[test]
    fn existence_window_is_closed() {
        let cfg = parse_config_str("[existence]\nalpha_grid = [1.9, 2.1]\ndelta = 0.1\n").unwrap();
        assert_eq!(cfg.existence.alpha_grid, vec![1.9, 2.1]);
        assert!(err("[existence]\nalpha_grid = [1.89]\ndelta = 0.1\n").contains("existence.alpha_grid[0]"));
        assert!(err("[kernel]\nalpha_grid = [1.95, 1.9]\ndelta = 0.1\n").contains("kernel.alpha_grid[1]"));
    }

    #[test]
    fn default_file_validates() {
        validate(&FileConfig::default()).unwrap();
    }

    #[test]
    fn alpha_two_rejected() {
        let m = err("[kernel]\nalpha_grid = [1.9, 2.0]\n");
        assert!(m.contains("kernel.alpha_grid[1] = 2"), "{m}");
    }

    #[test]
    fn unknown_key_rejected_with_location() {
        let m = err("[study]\nbogus = 1\n");
        assert!(m.contains("bogus") && m.contains("line 2"), "{m}");
    }

    #[test]
    fn other_ranges() {
        assert!(err("[solve]\nalpha = [0.9]\n").contains("solve.alpha[0]"));
        assert!(err("[solve.grid]\ndim = 3\nmodes = 8\nlength = 1.0\n").contains("burgers1d"));
        assert!(err("[study]\nalpha_grid = [1.9, 1.95]\n").contains("at least 3"));
        assert!(err("[study]\nwsp_sigma = 2.0\n").contains("study.wsp_sigma"));
        assert!(err("[study.solver]\ndt = 0.0\n").contains("study.solver.dt"));
        assert!(err("[existence]\nnorms = [-1.0]\n").contains("existence.norms[0]"));
        assert!(err("[study.data]\nmax_wavenumber = 90\n").contains("study.data.max_wavenumber"));
    }
}
