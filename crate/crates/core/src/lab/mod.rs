//! Rate studies: how fast solutions with `alpha != 2` approach the classical one.
//!
//! A study fixes base data `u_{0,2}` and a normalized perturbation `w`, builds
//! `u_{0,alpha} = u_{0,2} + c |2 - alpha|^beta w` for each `alpha` of a grid,
//! solves both systems on a common horizon and fits the log-log slope of the
//! time-weighted distance against `|2 - alpha|`. The expected slope is
//! `min(beta, 1)`: the data rate `beta` saturates at the linear kernel rate.

mod data;
mod distance;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use data::{band_limited_field, base_data, build_data_family, f_rate, hs_norms, normalized_perturbation};
pub use distance::{check_corollary_norm, common_nodes, epsilon_window_distance, weighted_sup_distance};

use crate::error::{Error, Result};
use crate::fit::{fit_log_log, LineFit};
use crate::kernels::DeltaParams;
use crate::solver::{
    existence_time_alpha, existence_time_classical, solve, uniform_product_bound, SolutionTrajectory, SolverConfig,
    SolverMode,
};
use crate::spectral::{FourierGrid, NormKind};
use crate::system::{build_preset, Model, SystemSpec};

/// Periodic grid parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub modes: usize,
    pub length: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { dim: 1, modes: 256, length: 2.0 * std::f64::consts::PI }
    }
}

/// How the base data `u_{0,2}` is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    /// `sum_i |u_{0,2,i}|_{H^s}`.
    pub hs_norm: f64,
    /// Fourier support `max_a |k_a| <= max_wavenumber` of both base data and `w`.
    pub max_wavenumber: i64,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig { hs_norm: 0.025, max_wavenumber: 4 }
    }
}

/// Time horizon of the compared runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum HorizonPolicy {
    /// `min(T_alpha, T_2)` per alpha, relative to the solver constant `C`.
    Existence,
    /// A user horizon; solutions are assumed to exist up to it.
    Fixed { t: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RateStudyConfig {
    pub preset: Model,
    pub grid: GridConfig,
    pub alpha_grid: Vec<f64>,
    pub delta: f64,
    /// One rate per component, or a single value for all.
    pub beta: Vec<f64>,
    pub c: f64,
    /// Sobolev index; the preset default `d/2 + 1` when absent.
    pub s: Option<f64>,
    pub data: DataConfig,
    pub horizon: HorizonPolicy,
    /// Start of the window `[eps, T]` of the unweighted distances; `T/10` when absent.
    pub epsilon: Option<f64>,
    /// Smoothness `sigma` and exponent `p` of the homogeneous W^(sigma,p) distance.
    pub wsp_sigma: f64,
    pub wsp_p: f64,
    pub seed: u64,
    /// Accepted deviation of the fitted slope from `min(beta_min, 1)`.
    pub tolerance: f64,
    /// Accepted deviation of the L^p and W^(sigma,p) slopes from the H^s slope.
    pub corollary_tolerance: f64,
    pub solver: SolverConfig,
    /// Record wall-clock time per alpha (breaks byte-identical output).
    pub timing: bool,
}

impl Default for RateStudyConfig {
    fn default() -> Self {
        RateStudyConfig {
            preset: Model::Burgers1d,
            grid: GridConfig::default(),
            alpha_grid: vec![1.86, 1.92, 1.96, 1.98, 1.99, 1.995],
            delta: 0.15,
            beta: vec![2.0],
            c: 0.005,
            s: None,
            data: DataConfig::default(),
            horizon: HorizonPolicy::Existence,
            epsilon: None,
            wsp_sigma: 1.0,
            wsp_p: 2.0,
            seed: DEFAULT_SEED,
            tolerance: 0.2,
            corollary_tolerance: 0.2,
            solver: SolverConfig { mode: SolverMode::EtdMarching, dt: 1.0 / 12288.0, ..SolverConfig::default() },
            timing: false,
        }
    }
}

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Perturbation seeds are derived from the study seed so that `u_{0,2}` and `w` differ.
pub fn derived_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RateStudyConfig {
    pub fn validate(&self) -> Result<()> {
        let params = DeltaParams::new(self.delta)?;
        if self.alpha_grid.is_empty() {
            return Err(Error::param("alpha_grid must not be empty"));
        }
        for &a in &self.alpha_grid {
            if a == 2.0 {
                return Err(Error::param("alpha_grid must exclude 2 (alpha = 2 is the reference run)"));
            }
            if !params.admits(a) {
                return Err(Error::param(format!(
                    "alpha = {a} violates 2 - delta < alpha < 2 + delta with delta = {}",
                    self.delta
                )));
            }
        }
        if self.beta.is_empty() || self.beta.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
            return Err(Error::param("beta must hold positive values"));
        }
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return Err(Error::param(format!("c = {} must be finite and nonnegative", self.c)));
        }
        if !(self.data.hs_norm > 0.0 && self.data.hs_norm.is_finite()) {
            return Err(Error::param(format!("data.hs_norm = {} must be positive", self.data.hs_norm)));
        }
        if let HorizonPolicy::Fixed { t } = self.horizon {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::param(format!("horizon.t = {t} must be positive")));
            }
        }
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0) {
                return Err(Error::param(format!("epsilon = {eps} must be positive")));
            }
        }
        if !(self.tolerance > 0.0 && self.corollary_tolerance > 0.0) {
            return Err(Error::param("tolerances must be positive"));
        }
        self.solver.validate()
    }

    fn beta_vector(&self, n: usize) -> Result<Vec<f64>> {
        match self.beta.len() {
            1 => Ok(vec![self.beta[0]; n]),
            m if m == n => Ok(self.beta.clone()),
            m => Err(Error::param(format!("beta has {m} entries; expected 1 or {n}"))),
        }
    }

    pub fn beta_min(&self) -> f64 {
        self.beta.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn predicted_rate(&self) -> f64 {
        self.beta_min().min(1.0)
    }
}

/// Distances of one `alpha` against the classical run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub alpha: f64,
    pub distance: f64,
    pub horizon: f64,
    pub existence_time: f64,
    /// `max_t sum_i t^eta |u_alpha - u_2|_{H^s}`.
    pub gap_weighted_hs: f64,
    /// `sup_{[eps, T]}` distances.
    pub gap_hs: f64,
    pub gap_l2: f64,
    pub gap_linf: f64,
    pub gap_wsp: f64,
    /// Uniform product bound of the fractional run.
    pub product_bound: f64,
    pub runtime_s: Option<f64>,
}

/// Log-log fit of one distance column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub norm: String,
    pub fit: Option<LineFit>,
    /// Ten times the self-convergence error of this distance.
    pub noise_floor: f64,
    /// Alphas whose gap fell below the floor.
    pub excluded: Vec<f64>,
    pub error: Option<String>,
}

impl RateFit {
    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateStudyReport {
    pub preset: String,
    pub delta: f64,
    pub eta: f64,
    pub beta: Vec<f64>,
    pub c: f64,
    pub s: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub base_hs_norms: Vec<f64>,
    pub classical_existence_time: f64,
    pub rows: Vec<RateRow>,
    /// Weighted Hs, then window Hs, L^2, L^inf and W^(sigma,p).
    pub fits: Vec<RateFit>,
    pub predicted_rate: f64,
    pub tolerance: f64,
    /// Weighted Hs slope within `predicted_rate +- tolerance`.
    pub pass: bool,
    /// Each window L^p / W^(sigma,p) slope within `corollary_tolerance` of the window Hs slope.
    pub corollary_pass: bool,
    /// Gap at the alpha closest to 2 is the smallest one.
    pub monotone_tail: bool,
    pub warnings: Vec<String>,
}

impl RateStudyReport {
    pub fn fit(&self, norm: &str) -> Option<&RateFit> {
        self.fits.iter().find(|f| f.norm == norm)
    }

    pub fn slope(&self) -> Option<f64> {
        self.fits.first().and_then(|f| f.slope())
    }
}

/// Names of the five fitted distance columns.
pub const FIT_NAMES: [&str; 5] = ["weighted_hs", "hs", "l2", "linf", "wsp"];

/// Least-squares slope of `log D` against `log |2 - alpha|`.
///
/// Gaps at or below `noise_floor` are excluded; at least three points must remain.
pub fn fit_rate(alphas: &[f64], gaps: &[f64], noise_floor: f64) -> Result<(LineFit, Vec<f64>)> {
    if alphas.len() != gaps.len() {
        return Err(Error::ShapeMismatch { expected: alphas.len(), got: gaps.len() });
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut excluded = Vec::new();
    for (&a, &g) in alphas.iter().zip(gaps) {
        if g > noise_floor && g > 0.0 {
            xs.push((2.0 - a).abs());
            ys.push(g);
        } else {
            excluded.push(a);
        }
    }
    if xs.len() < 3 {
        if alphas.len() >= 3 {
            return Err(Error::BelowNoiseFloor { floor: noise_floor });
        }
        return Err(Error::Fit(format!("need at least three alpha values, got {}", alphas.len())));
    }
    Ok((fit_log_log(&xs, &ys)?, excluded))
}

struct Metrics {
    weighted_hs: f64,
    hs: f64,
    l2: f64,
    linf: f64,
    wsp: f64,
}

impl Metrics {
    fn as_array(&self) -> [f64; 5] {
        [self.weighted_hs, self.hs, self.l2, self.linf, self.wsp]
    }
}

fn metrics(a: &SolutionTrajectory, b: &SolutionTrajectory, eta: f64, s: f64, eps: f64, cfg: &RateStudyConfig) -> Result<Metrics> {
    Ok(Metrics {
        weighted_hs: weighted_sup_distance(a, b, eta, s)?,
        hs: epsilon_window_distance(a, b, eps, NormKind::Hs { s })?,
        l2: epsilon_window_distance(a, b, eps, NormKind::Lp { p: 2.0 })?,
        linf: epsilon_window_distance(a, b, eps, NormKind::Lp { p: f64::INFINITY })?,
        wsp: epsilon_window_distance(a, b, eps, NormKind::HomWsp { sigma: cfg.wsp_sigma, p: cfg.wsp_p })?,
    })
}

/// Same config with the time resolution doubled.
/// Twice the steps actually taken on `[0, horizon]`.
fn refined(solver: &SolverConfig, horizon: f64) -> SolverConfig {
    let steps = solver.steps_for(horizon);
    SolverConfig { substeps: solver.substeps * 2, dt: horizon / (2 * steps) as f64, ..solver.clone() }
}

fn solve_at(spec: &SystemSpec, horizon: f64, solver: &SolverConfig) -> Result<SolutionTrajectory> {
    let solver = SolverConfig { enforce_existence: false, ..solver.clone() };
    solve(spec, horizon, &solver)
}

/// Runs a full rate study. Per-alpha runs execute in parallel.
pub fn run_rate_study(config: &RateStudyConfig) -> Result<RateStudyReport> {
    config.validate()?;
    if config.alpha_grid.len() < 3 {
        return Err(Error::Fit(format!("need at least three alpha values, got {}", config.alpha_grid.len())));
    }
    let params = DeltaParams::new(config.delta)?;
    let grid = FourierGrid::new(config.grid.dim, config.grid.modes, config.grid.length)?;
    let model = config.preset;
    if !model.dimension_ok(grid.dim()) {
        return Err(Error::param(format!("preset {model} is not defined in dimension {}", grid.dim())));
    }
    let n = model.components(grid.dim());
    let beta = config.beta_vector(n)?;
    let blocks = model.solenoidal_blocks();
    for b in &blocks {
        if beta[b.clone()].iter().any(|&x| x != beta[b.start]) {
            return Err(Error::param(format!("beta must be constant on the solenoidal block {b:?}")));
        }
    }
    let s = config.s.unwrap_or(grid.dim() as f64 / 2.0 + 1.0);
    check_corollary_norm(NormKind::HomWsp { sigma: config.wsp_sigma, p: config.wsp_p }, s)?;
    let base = base_data(&grid, n, &blocks, s, config.data.hs_norm, config.data.max_wavenumber, derived_seed(config.seed, 1))?;
    let w_raw = band_limited_field(&grid, n, config.data.max_wavenumber, derived_seed(config.seed, 2))?;
    let w = normalized_perturbation(&w_raw, &blocks, s)?;
    let classical = build_preset(model, &grid, vec![2.0; n], base.clone())?.with_sobolev_index(s)?;
    let base_norms = hs_norms(classical.initial(), s)?;
    let c_const = config.solver.constant;
    let t2 = existence_time_classical(&base_norms, c_const)?;

    let mut warnings = Vec::new();
    let mut plans = Vec::with_capacity(config.alpha_grid.len());
    for &alpha in &config.alpha_grid {
        let data = build_data_family(classical.initial(), alpha, &beta, config.c, &w)?;
        let spec = classical.with_alpha(vec![alpha; n])?.with_initial(data)?;
        let t_alpha = existence_time_alpha(spec.alpha(), &hs_norms(spec.initial(), s)?, c_const)?;
        let horizon = match config.horizon {
            HorizonPolicy::Existence => {
                if t_alpha > t2 {
                    warnings.push(format!("alpha = {alpha}: T_alpha = {t_alpha:e} exceeds T_2 = {t2:e}; horizon truncated to T_2"));
                }
                t_alpha.min(t2)
            }
            HorizonPolicy::Fixed { t } => t,
        };
        plans.push((alpha, spec, t_alpha, horizon));
    }
    let horizons: BTreeMap<u64, f64> = plans.iter().map(|p| (p.3.to_bits(), p.3)).collect();
    let eps_for = |h: f64| config.epsilon.unwrap_or(h / 10.0);
    for &h in horizons.values() {
        if eps_for(h) >= h {
            return Err(Error::param(format!("epsilon = {} must be below the horizon {h:e}", eps_for(h))));
        }
    }
    let horizon_list: Vec<f64> = horizons.values().copied().collect();
    let classical_runs: BTreeMap<u64, SolutionTrajectory> = crate::par_map(&horizon_list, |&h| {
        solve_at(&classical, h, &config.solver).map(|t| (h.to_bits(), t))
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let rows = crate::par_map(&plans, |(alpha, spec, t_alpha, horizon)| {
        let start = Instant::now();
        let run = || -> Result<RateRow> {
            let traj = solve_at(spec, *horizon, &config.solver)?;
            let reference = &classical_runs[&horizon.to_bits()];
            let m = metrics(&traj, reference, params.eta, s, eps_for(*horizon), config)?;
            let product_bound = uniform_product_bound(&traj, s)?;
            Ok(RateRow {
                alpha: *alpha,
                distance: (2.0 - alpha).abs(),
                horizon: *horizon,
                existence_time: *t_alpha,
                gap_weighted_hs: m.weighted_hs,
                gap_hs: m.hs,
                gap_l2: m.l2,
                gap_linf: m.linf,
                gap_wsp: m.wsp,
                product_bound,
                runtime_s: None,
            })
        };
        run()
            .map(|mut row| {
                if config.timing {
                    row.runtime_s = Some(start.elapsed().as_secs_f64());
                }
                row
            })
            .map_err(|e| Error::AtAlpha { alpha: *alpha, source: Box::new(e) })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    // self-convergence at the study resolution: the classical run and the alpha
    // farthest from 2, each against a run with half the step
    let far = plans
        .iter()
        .max_by(|a, b| (2.0 - a.0).abs().total_cmp(&(2.0 - b.0).abs()))
        .expect("nonempty grid");
    let checks: Vec<(&SystemSpec, f64)> = vec![(&classical, far.3), (&far.1, far.3)];
    let floors = crate::par_map(&checks, |(spec, h)| -> Result<[f64; 5]> {
        let coarse = solve_at(spec, *h, &config.solver)?;
        let fine = solve_at(spec, *h, &refined(&config.solver, *h))?;
        Ok(metrics(&coarse, &fine, params.eta, s, eps_for(*h), config)?.as_array())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut noise = [0.0f64; 5];
    for f in &floors {
        for (k, v) in f.iter().enumerate() {
            noise[k] = noise[k].max(10.0 * v);
        }
    }

    let alphas: Vec<f64> = rows.iter().map(|r| r.alpha).collect();
    let columns: [Vec<f64>; 5] = [
        rows.iter().map(|r| r.gap_weighted_hs).collect(),
        rows.iter().map(|r| r.gap_hs).collect(),
        rows.iter().map(|r| r.gap_l2).collect(),
        rows.iter().map(|r| r.gap_linf).collect(),
        rows.iter().map(|r| r.gap_wsp).collect(),
    ];
    let mut fits = Vec::with_capacity(5);
    for (k, name) in FIT_NAMES.iter().enumerate() {
        let fit = match fit_rate(&alphas, &columns[k], noise[k]) {
            Ok((fit, excluded)) => {
                if !excluded.is_empty() {
                    warnings.push(format!("{name}: alphas {excluded:?} below the noise floor {:e}, excluded", noise[k]));
                }
                RateFit { norm: name.to_string(), fit: Some(fit), noise_floor: noise[k], excluded, error: None }
            }
            Err(e) => {
                warnings.push(format!("{name}: {e}"));
                RateFit { norm: name.to_string(), fit: None, noise_floor: noise[k], excluded: alphas.clone(), error: Some(e.to_string()) }
            }
        };
        fits.push(fit);
    }
    let predicted_rate = config.predicted_rate();
    let pass = fits[0].slope().is_some_and(|sl| (sl - predicted_rate).abs() <= config.tolerance);
    let corollary_pass = match fits[1].slope() {
        Some(hs) => fits[2..].iter().all(|f| f.slope().is_some_and(|sl| (sl - hs).abs() <= config.corollary_tolerance)),
        None => false,
    };
    let closest = rows
        .iter()
        .min_by(|a, b| a.distance.total_cmp(&b.distance))
        .expect("nonempty grid");
    let monotone_tail = rows.iter().all(|r| r.gap_weighted_hs >= closest.gap_weighted_hs);
    Ok(RateStudyReport {
        preset: model.name().to_string(),
        delta: config.delta,
        eta: params.eta,
        beta,
        c: config.c,
        s,
        epsilon: eps_for(far.3),
        seed: config.seed,
        base_hs_norms: base_norms,
        classical_existence_time: t2,
        rows,
        fits,
        predicted_rate,
        tolerance: config.tolerance,
        pass,
        corollary_pass,
        monotone_tail,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{etd_march, TrajectoryMeta};
    use crate::spectral::{forward_transform, norm, SpectralField};
    use std::f64::consts::PI;

    fn burgers(alpha: f64, amp: f64) -> SystemSpec {
        let g = FourierGrid::new(1, 32, 2.0 * PI).unwrap();
        let xs: Vec<f64> = (0..32).map(|j| amp * (2.0 * PI * j as f64 / 32.0).sin()).collect();
        build_preset(Model::Burgers1d, &g, vec![alpha], forward_transform(&xs, &g).unwrap()).unwrap()
    }

    fn march(spec: &SystemSpec, t: f64, dt: f64) -> SolutionTrajectory {
        etd_march(spec, t, &SolverConfig { mode: SolverMode::EtdMarching, dt, ..Default::default() }).unwrap()
    }

    fn shifted(traj: &SolutionTrajectory, g: &SpectralField) -> SolutionTrajectory {
        let states = traj.states().iter().map(|x| x.add(g).unwrap()).collect();
        SolutionTrajectory::new(traj.times().to_vec(), states, traj.meta().clone()).unwrap()
    }

    #[test]
    fn fit_rate_synthetic() {
        let alphas = [1.9, 1.95, 1.99, 2.05];
        let lin: Vec<f64> = alphas.iter().map(|a: &f64| (2.0 - a).abs()).collect();
        assert!((fit_rate(&alphas, &lin, 0.0).unwrap().0.slope - 1.0).abs() < 1e-12);
        let half: Vec<f64> = lin.iter().map(|d| d.sqrt()).collect();
        assert!((fit_rate(&alphas, &half, 0.0).unwrap().0.slope - 0.5).abs() < 1e-12);
        let (_, excluded) = fit_rate(&alphas, &lin, 0.02).unwrap();
        assert_eq!(excluded, vec![1.99]);
        assert!(matches!(fit_rate(&alphas, &lin, 1.0), Err(Error::BelowNoiseFloor { .. })));
        assert!(matches!(fit_rate(&[1.9], &[0.1], 0.0), Err(Error::Fit(_))));
    }

    #[test]
    fn weighted_distance_properties() {
        let a = march(&burgers(1.9, 0.3), 0.2, 0.01);
        assert_eq!(weighted_sup_distance(&a, &a, 0.4, 1.5).unwrap(), 0.0);
        let mut g = SpectralField::zeros(a.grid(), 1);
        let k = a.grid().index_of(&[3]);
        let km = a.grid().index_of(&[-3]);
        g.component_mut(0)[k] = num_complex::Complex64::new(0.01, 0.0);
        g.component_mut(0)[km] = num_complex::Complex64::new(0.01, 0.0);
        g.set_hermitian(true);
        let b = shifted(&a, &g);
        let d = weighted_sup_distance(&a, &b, 0.4, 1.5).unwrap();
        let expected = 0.2f64.powf(0.4) * norm(&g, NormKind::Hs { s: 1.5 }).unwrap();
        assert!((d - expected).abs() < 1e-13 * expected);
        let c = march(&burgers(2.0, 0.3), 0.2, 0.01);
        let ab = weighted_sup_distance(&a, &b, 0.4, 1.5).unwrap();
        let bc = weighted_sup_distance(&b, &c, 0.4, 1.5).unwrap();
        let ac = weighted_sup_distance(&a, &c, 0.4, 1.5).unwrap();
        assert_eq!(ac, weighted_sup_distance(&c, &a, 0.4, 1.5).unwrap());
        assert!(ac <= ab + bc + 1e-15);
    }

    #[test]
    fn nodes_are_restricted_not_interpolated() {
        let a = march(&burgers(1.9, 0.3), 0.2, 0.01);
        let b = march(&burgers(2.0, 0.3), 0.2, 0.005);
        assert_eq!(common_nodes(&a, &b).len(), 21);
        let c = march(&burgers(2.0, 0.3), 0.3, 0.3 / 7.0);
        assert_eq!(common_nodes(&a, &c).len(), 1);
        assert!(weighted_sup_distance(&a, &c, 0.4, 1.5).is_err());
        let meta = TrajectoryMeta { system: "x".into(), alpha: vec![2.0], sobolev_index: 1.5, spec_hash: 0, config_hash: 0 };
        let lone = SolutionTrajectory::new(vec![0.0, 0.0123], vec![a.states()[0].clone(); 2], meta).unwrap();
        assert!(weighted_sup_distance(&a, &lone, 0.4, 1.5).is_err());
    }

    #[test]
    fn window_distance_ranges_and_embedding() {
        let a = march(&burgers(1.9, 0.3), 0.2, 0.01);
        let b = march(&burgers(2.0, 0.3), 0.2, 0.01);
        let hs = epsilon_window_distance(&a, &b, 0.02, NormKind::Hs { s: 1.5 }).unwrap();
        let l2 = epsilon_window_distance(&a, &b, 0.02, NormKind::Lp { p: 2.0 }).unwrap();
        assert!(l2 > 0.0 && l2 <= hs);
        assert!(epsilon_window_distance(&a, &a, 0.02, NormKind::Lp { p: f64::INFINITY }).unwrap() == 0.0);
        assert!(epsilon_window_distance(&a, &b, 0.02, NormKind::Lp { p: 1.5 }).is_err());
        assert!(epsilon_window_distance(&a, &b, 0.02, NormKind::HomWsp { sigma: 1.5, p: 2.0 }).is_err());
        assert!(epsilon_window_distance(&a, &b, 0.02, NormKind::HomWsp { sigma: 1.0, p: f64::INFINITY }).is_err());
        assert!(epsilon_window_distance(&a, &b, 0.3, NormKind::Hs { s: 1.5 }).is_err());
        assert!(epsilon_window_distance(&a, &b, 0.0, NormKind::Hs { s: 1.5 }).is_err());
    }

    #[test]
    fn config_validation() {
        let ok = RateStudyConfig::default();
        ok.validate().unwrap();
        let bad = |f: &dyn Fn(&mut RateStudyConfig)| {
            let mut c = RateStudyConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(&|c| c.alpha_grid.push(2.0)));
        assert!(bad(&|c| c.alpha_grid = vec![1.8]));
        assert!(bad(&|c| c.alpha_grid.clear()));
        assert!(bad(&|c| c.delta = 0.2));
        assert!(bad(&|c| c.beta = vec![0.0]));
        assert!(bad(&|c| c.horizon = HorizonPolicy::Fixed { t: -1.0 }));
        let mut one = RateStudyConfig { alpha_grid: vec![1.9], ..Default::default() };
        one.grid.modes = 16;
        assert!(matches!(run_rate_study(&one), Err(Error::Fit(_))));
    }

    #[test]
    fn refinement_doubles_the_steps_taken() {
        let coarse = SolverConfig { mode: SolverMode::EtdMarching, dt: 1.0, ..SolverConfig::default() };
        assert_eq!(coarse.steps_for(0.01), 1);
        assert_eq!(refined(&coarse, 0.01).steps_for(0.01), 2);
        let coarse = SolverConfig { dt: 0.3, ..coarse };
        assert_eq!(coarse.steps_for(1.0), 4);
        assert_eq!(refined(&coarse, 1.0).steps_for(1.0), 8);
        let picard = SolverConfig { substeps: 7, ..SolverConfig::default() };
        assert_eq!(refined(&picard, 1.0).steps_for(1.0), 14);
    }

    #[test]
    fn seeds_differ_by_stream() {
        assert_ne!(derived_seed(1, 1), derived_seed(1, 2));
        assert_eq!(derived_seed(7, 3), derived_seed(7, 3));
    }

    #[test]
    fn small_study_runs_and_is_deterministic() {
        let cfg = RateStudyConfig {
            grid: GridConfig { dim: 1, modes: 32, length: 2.0 * PI },
            alpha_grid: vec![1.9, 1.95, 1.98],
            solver: SolverConfig { mode: SolverMode::EtdMarching, dt: 1.0 / 256.0, ..Default::default() },
            ..Default::default()
        };
        let a = run_rate_study(&cfg).unwrap();
        let b = run_rate_study(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 3);
        assert!(a.rows.iter().all(|r| r.gap_weighted_hs > 0.0 && r.runtime_s.is_none()));
        assert!(a.monotone_tail);
        assert!((a.rows[0].horizon - 1.0 / 6.0).abs() < 1e-15);
    }
}
