//! Mild solutions of the system.
//!
//! Both solver modes write the solution as
//! `u(t_m) = e^{-t_m |xi|^alpha} u_0 - S_m`, where `S_m` is the product-integrated
//! Duhamel sum of the nonlinearity. [`picard_solve`] iterates this map on the
//! whole time grid; [`etd_march`] evaluates the nonlinearity at the newest
//! state and steps forward, which is the first-order exponential integrator.
//! On a common grid the Picard fixed point and the ETD trajectory coincide.

mod duhamel;
mod existence;
mod trajectory;

use serde::{Deserialize, Serialize};

pub use duhamel::{duhamel_series, operator_a, operator_b};
pub use existence::{existence_time_alpha, existence_time_classical, existence_time_floor, PicardConditions};
pub use trajectory::{read_dump, uniform_product_bound, DumpHeader, NormRecord, SolutionTrajectory, TrajectoryMeta};

use crate::error::{Error, Result};
use crate::kernels::apply_semigroup_components;
use crate::spectral::{component_norms, norm, NormKind, SpectralField};
use crate::system::{nonlinearity_into, SystemSpec};
use duhamel::StepFactors;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMode {
    GlobalPicard,
    EtdMarching,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Substeps `M` of the Picard time grid on `[0, T]`.
    pub substeps: usize,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    /// Generic constant `C` of the existence times.
    pub constant: f64,
    pub mode: SolverMode,
    /// Target step of the marching mode; the actual step divides `T` evenly.
    pub dt: f64,
    /// Refuse Picard horizons beyond `T_alpha`.
    pub enforce_existence: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            substeps: 512,
            picard_tol: 1e-10,
            picard_max_iters: 50,
            constant: 1.0,
            mode: SolverMode::GlobalPicard,
            dt: 1e-3,
            enforce_existence: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.substeps == 0 {
            return Err(Error::param("substeps must be positive"));
        }
        if !(self.picard_tol > 0.0 && self.picard_tol < 1.0) {
            return Err(Error::param(format!("picard_tol = {} must lie in (0, 1)", self.picard_tol)));
        }
        if self.picard_max_iters == 0 {
            return Err(Error::param("picard_max_iters must be positive"));
        }
        if !(self.constant > 0.0 && self.constant.is_finite()) {
            return Err(Error::param(format!("constant C = {} must be positive", self.constant)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::param(format!("dt = {} must be positive", self.dt)));
        }
        Ok(())
    }

    /// Number of uniform steps covering `[0, horizon]` in the configured mode.
    pub fn steps_for(&self, horizon: f64) -> usize {
        match self.mode {
            SolverMode::GlobalPicard => self.substeps,
            SolverMode::EtdMarching => ((horizon / self.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize,
        }
    }
}

/// Convergence record of a Picard solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    pub iterations: usize,
    /// `sup_t sum_i |e_{k+1} - e_k|_{H^s}` per iteration.
    pub differences: Vec<f64>,
    /// Successive ratios of `differences`.
    pub ratios: Vec<f64>,
    pub conditions: PicardConditions,
    pub existence_time: f64,
}

impl PicardReport {
    /// Largest ratio among differences still above `floor` (rounding noise excluded).
    pub fn max_ratio_above(&self, floor: f64) -> f64 {
        self.differences
            .windows(2)
            .filter(|w| w[1] > floor && w[0] > floor)
            .map(|w| w[1] / w[0])
            .fold(0.0, f64::max)
    }
}

/// FNV-1a, stable across platforms and releases.
pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

pub fn spec_hash(spec: &SystemSpec) -> u64 {
    let g = spec.grid();
    let mut bytes = format!(
        "{}|{:?}|{}|{}|{}|{}|{:?}|{:?}|{:?}",
        spec.name(),
        spec.alpha(),
        spec.sobolev_index(),
        g.dim(),
        g.modes(),
        g.length(),
        spec.q_terms(),
        spec.l_terms(),
        spec.solenoidal_blocks()
    )
    .into_bytes();
    for c in spec.initial().coeffs() {
        bytes.extend_from_slice(&c.re.to_le_bytes());
        bytes.extend_from_slice(&c.im.to_le_bytes());
    }
    fnv1a(&bytes)
}

pub fn config_hash(config: &SolverConfig, horizon: f64) -> u64 {
    fnv1a(format!("{config:?}|{horizon}").as_bytes())
}

fn meta(spec: &SystemSpec, config: &SolverConfig, horizon: f64) -> TrajectoryMeta {
    TrajectoryMeta {
        system: spec.name().to_string(),
        alpha: spec.alpha().to_vec(),
        sobolev_index: spec.sobolev_index(),
        spec_hash: spec_hash(spec),
        config_hash: config_hash(config, horizon),
    }
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon > 0.0 && horizon.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("horizon T = {horizon} must be positive and finite")))
    }
}

fn time_grid(horizon: f64, steps: usize) -> Vec<f64> {
    let h = horizon / steps as f64;
    (0..=steps).map(|m| m as f64 * h).collect()
}

/// `T_alpha` of a spec for the constant `c`.
pub fn spec_existence_time(spec: &SystemSpec, c: f64) -> Result<f64> {
    let norms = component_norms(spec.initial(), NormKind::Hs { s: spec.sobolev_index() })?;
    existence_time_alpha(spec.alpha(), &norms, c)
}

/// Dispatches on `config.mode`; the Picard report is dropped.
pub fn solve(spec: &SystemSpec, horizon: f64, config: &SolverConfig) -> Result<SolutionTrajectory> {
    match config.mode {
        SolverMode::GlobalPicard => picard_solve(spec, horizon, config).map(|(t, _)| t),
        SolverMode::EtdMarching => etd_march(spec, horizon, config),
    }
}

/// Picard iteration `e_{k+1} = e_0 - Duhamel(N(e_k))` on `M + 1` uniform nodes.
pub fn picard_solve(spec: &SystemSpec, horizon: f64, config: &SolverConfig) -> Result<(SolutionTrajectory, PicardReport)> {
    config.validate()?;
    check_horizon(horizon)?;
    let s = spec.sobolev_index();
    let norms = component_norms(spec.initial(), NormKind::Hs { s })?;
    let existence_time = existence_time_alpha(spec.alpha(), &norms, config.constant)?;
    if config.enforce_existence && horizon > existence_time * (1.0 + 1e-12) {
        return Err(Error::param(format!(
            "horizon T = {horizon:e} exceeds the existence time T_alpha = {existence_time:e} (relative to C = {})",
            config.constant
        )));
    }
    let conditions = PicardConditions::new(spec.alpha(), horizon, &norms, config.constant)?;
    let steps = config.substeps;
    let times = time_grid(horizon, steps);
    let free: Vec<SpectralField> = times
        .iter()
        .map(|&t| apply_semigroup_components(spec.initial(), spec.alpha(), t))
        .collect();
    let factors = StepFactors::new(spec.grid(), spec.alpha(), horizon / steps as f64);
    let mut current = free.clone();
    let mut differences = Vec::new();
    let nodes: Vec<usize> = (0..steps).collect();
    for k in 0..config.picard_max_iters {
        let forcing = crate::par_map(&nodes, |&m| {
            let mut out = SpectralField::zeros(spec.grid(), spec.n());
            nonlinearity_into(spec, &current[m], &mut out).map(|_| out)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let mut sum = SpectralField::zeros(spec.grid(), spec.n());
        let mut next = Vec::with_capacity(steps + 1);
        next.push(free[0].clone());
        for m in 1..=steps {
            factors.advance(&mut sum, &forcing[m - 1]);
            let mut state = free[m].sub(&sum)?;
            state.set_hermitian(free[m].is_hermitian() && sum.is_hermitian());
            next.push(state);
        }
        let mut diff = 0.0f64;
        for (a, b) in next.iter().zip(&current) {
            diff = diff.max(norm(&a.sub(b)?, NormKind::Hs { s })?);
        }
        if !diff.is_finite() {
            return Err(Error::NonFinite(format!("Picard iterate {} is not finite", k + 1)));
        }
        differences.push(diff);
        current = next;
        if diff < config.picard_tol {
            let ratios = differences.windows(2).map(|w| w[1] / w[0]).collect();
            let report = PicardReport { iterations: k + 1, differences, ratios, conditions, existence_time };
            let traj = SolutionTrajectory::new(times, current, meta(spec, config, horizon))?;
            return Ok((traj, report));
        }
    }
    let n = differences.len();
    let last_ratio = if n >= 2 { differences[n - 1] / differences[n - 2] } else { f64::NAN };
    Err(Error::NonConvergence { iterations: n, last_ratio })
}

/// First-order exponential time differencing on `[0, T]`.
///
/// `u_m = e^{-t_m lambda} u_0 - S_m`, `S_m = e^{-h lambda} S_{m-1} + phi_1 N(u_{m-1})`,
/// which equals `u_m = e^{-h lambda} u_{m-1} - phi_1 N(u_{m-1})`.
pub fn etd_march(spec: &SystemSpec, horizon: f64, config: &SolverConfig) -> Result<SolutionTrajectory> {
    config.validate()?;
    check_horizon(horizon)?;
    let steps = match config.mode {
        SolverMode::EtdMarching => config.steps_for(horizon),
        SolverMode::GlobalPicard => config.substeps,
    };
    let times = time_grid(horizon, steps);
    let factors = StepFactors::new(spec.grid(), spec.alpha(), horizon / steps as f64);
    let mut states = Vec::with_capacity(steps + 1);
    states.push(spec.initial().clone());
    let mut sum = SpectralField::zeros(spec.grid(), spec.n());
    let mut forcing = SpectralField::zeros(spec.grid(), spec.n());
    for m in 1..=steps {
        nonlinearity_into(spec, &states[m - 1], &mut forcing)?;
        factors.advance(&mut sum, &forcing);
        let free = apply_semigroup_components(spec.initial(), spec.alpha(), times[m]);
        let mut state = free.sub(&sum)?;
        if !state.is_finite() {
            return Err(Error::BlowUp { step: m, time: times[m] });
        }
        state.set_hermitian(free.is_hermitian() && sum.is_hermitian());
        states.push(state);
    }
    SolutionTrajectory::new(times, states, meta(spec, config, horizon))
}
