//! Fractional heat semigroup multipliers and the kernel-gap verifier.
//!
//! The heat kernel of `(-Delta)^{alpha/2}` acts in Fourier space as
//! `exp(-t |xi|^alpha)`. The constant in front of `|xi|^alpha` is fixed to 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_log_log, LineFit};
use crate::par_map;
use crate::spectral::SpectralField;

/// Log-spaced radial grid size for the gap maximization.
pub const RADIAL_POINTS: usize = 10_000;
/// Radial window `[R_MIN, R_MAX]` for `t >= 1`; rescaled by `t^{-1/min(alpha,2)}` below.
pub const R_MIN: f64 = 1e-6;
pub const R_MAX: f64 = 1e3;
/// Golden-section stopping width in `ln r`.
pub const GOLDEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub alpha: f64,
    pub t: f64,
}

impl KernelParams {
    pub fn new(alpha: f64, t: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha.is_finite()) {
            return Err(Error::param(format!("alpha must exceed 1, got {alpha}")));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::param(format!("time must be nonnegative, got {t}")));
        }
        Ok(KernelParams { alpha, t })
    }

    pub fn multiplier(&self, xi_norm: f64) -> f64 {
        heat_multiplier(self.alpha, self.t, xi_norm)
    }
}

/// `delta` together with the weight exponents `eta` and `kappa` it induces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaParams {
    pub delta: f64,
    pub eta: f64,
    pub kappa: f64,
}

impl DeltaParams {
    pub fn new(delta: f64) -> Result<Self> {
        let eta = eta_of_delta(delta)?;
        let kappa = kappa_of_delta(delta)?;
        assert!(0.25 < eta && eta < 0.5, "eta = {eta} outside (1/4, 1/2)");
        assert!(0.75 < kappa && kappa < 1.0, "kappa = {kappa} outside (3/4, 1)");
        // the time-weight step of the rate argument needs eta < kappa
        assert!(eta < kappa);
        Ok(DeltaParams { delta, eta, kappa })
    }

    /// True when `2 - delta < alpha < 2 + delta`.
    pub fn admits(&self, alpha: f64) -> bool {
        (alpha - 2.0).abs() < self.delta
    }
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 / 6.0 {
        Ok(())
    } else {
        Err(Error::param(format!(
            "delta = {delta} must lie in (0, 1/6) (alpha window 2 - delta < alpha < 2 + delta)"
        )))
    }
}

/// `eta = (1 + 4 delta) / (4 - 2 delta)`.
pub fn eta_of_delta(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok((1.0 + 4.0 * delta) / (4.0 - 2.0 * delta))
}

/// `kappa = (3 + 4 delta) / (4 - 2 delta)`.
pub fn kappa_of_delta(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok((3.0 + 4.0 * delta) / (4.0 - 2.0 * delta))
}

/// `exp(-t |xi|^alpha)`.
pub fn heat_multiplier(alpha: f64, t: f64, xi_norm: f64) -> f64 {
    if t == 0.0 || xi_norm == 0.0 {
        return 1.0;
    }
    (-t * xi_norm.powf(alpha)).exp()
}

/// Heat semigroup with the same `alpha` on every component.
pub fn apply_semigroup(field: &SpectralField, alpha: f64, t: f64) -> SpectralField {
    let alphas = vec![alpha; field.components()];
    apply_semigroup_components(field, &alphas, t)
}

/// Heat semigroup with exponent `alphas[i]` on component `i`.
///
/// # Panics
/// If `alphas.len()` differs from the component count.
pub fn apply_semigroup_components(field: &SpectralField, alphas: &[f64], t: f64) -> SpectralField {
    assert_eq!(alphas.len(), field.components(), "one alpha per component");
    let mut out = field.clone();
    if t == 0.0 {
        return out;
    }
    let grid = field.grid().clone();
    for (i, &alpha) in alphas.iter().enumerate() {
        for (c, &r) in out.component_mut(i).iter_mut().zip(grid.xi_norms()) {
            *c *= heat_multiplier(alpha, t, r);
        }
    }
    out
}

/// Which radial quantity the gap verifier maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapWeight {
    /// `|h_alpha - h_2|`.
    Plain,
    /// `|xi| |h_alpha - h_2|`.
    Gradient,
}

impl GapWeight {
    pub fn exponent(self) -> i32 {
        match self {
            GapWeight::Plain => 0,
            GapWeight::Gradient => 1,
        }
    }
}

fn radial_gap(alpha: f64, t: f64, w: i32, r: f64) -> f64 {
    let g = ((-t * r.powf(alpha)).exp() - (-t * r * r).exp()).abs();
    if w == 1 {
        r * g
    } else {
        g
    }
}

/// Radial window used for time `t`: the scaling `r ~ t^{-1/min(alpha,2)}`
/// keeps the maximizer inside the grid as `t -> 0`.
pub fn radial_window(alpha: f64, t: f64) -> (f64, f64) {
    let scale = if t < 1.0 { t.powf(-1.0 / alpha.min(2.0)) } else { 1.0 };
    (R_MIN, R_MAX * scale)
}

/// `sup_r r^w |exp(-t r^alpha) - exp(-t r^2)|`.
///
/// Dense log-spaced scan over [`radial_window`] followed by golden-section
/// refinement (in `ln r`) on the cell pair around the best grid point.
pub fn kernel_gap_sup(alpha: f64, t: f64, weight: GapWeight) -> f64 {
    if t == 0.0 || alpha == 2.0 {
        return 0.0;
    }
    let w = weight.exponent();
    let (lo, hi) = radial_window(alpha, t);
    let (llo, lhi) = (lo.ln(), hi.ln());
    let step = (lhi - llo) / (RADIAL_POINTS - 1) as f64;
    let f = |u: f64| radial_gap(alpha, t, w, u.exp());
    let mut best = 0usize;
    let mut best_val = f64::NEG_INFINITY;
    for i in 0..RADIAL_POINTS {
        let v = f(llo + step * i as f64);
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    let a = llo + step * best.saturating_sub(1) as f64;
    let b = llo + step * (best + 1).min(RADIAL_POINTS - 1) as f64;
    best_val.max(golden_max(f, a, b, GOLDEN_TOL))
}

/// Golden-section search for the maximum of a unimodal function on `[a, b]`.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd).max(f(0.5 * (a + b)))
}

/// Time-weighted kernel gaps on a geometric time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapProfile {
    pub alpha: f64,
    pub params: DeltaParams,
    pub horizon: f64,
    /// Times, starting with 0 and ending at the horizon.
    pub times: Vec<f64>,
    /// `t^eta sup_xi |h_alpha - h_2|`.
    pub weighted_gap: Vec<f64>,
    /// `t^kappa sup_xi |xi| |h_alpha - h_2|`.
    pub weighted_gradient_gap: Vec<f64>,
    pub max_weighted_gap: f64,
    pub max_weighted_gradient_gap: f64,
}

/// Smallest nonzero time of a profile, relative to the horizon.
pub const PROFILE_T_MIN_RATIO: f64 = 1e-9;

/// Geometric time grid `{0} U {T r^k}` from `T * 1e-9` up to `T`.
pub fn profile_times(horizon: f64, n_times: usize) -> Vec<f64> {
    let t0 = horizon * PROFILE_T_MIN_RATIO;
    let mut times = Vec::with_capacity(n_times + 1);
    times.push(0.0);
    if n_times == 1 {
        times.push(horizon);
        return times;
    }
    let ratio = (horizon / t0).ln() / (n_times - 1) as f64;
    for k in 0..n_times {
        times.push(if k + 1 == n_times { horizon } else { t0 * (ratio * k as f64).exp() });
    }
    times
}

pub fn weighted_gap_profile(alpha: f64, delta: f64, horizon: f64, n_times: usize) -> Result<GapProfile> {
    let params = DeltaParams::new(delta)?;
    if !params.admits(alpha) {
        return Err(Error::param(format!(
            "alpha = {alpha} outside the window (2 - delta, 2 + delta) with delta = {delta}"
        )));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::param(format!("horizon must be positive, got {horizon}")));
    }
    if n_times == 0 {
        return Err(Error::param("need at least one time sample"));
    }
    let times = profile_times(horizon, n_times);
    let weighted_gap: Vec<f64> =
        times.iter().map(|&t| t.powf(params.eta) * kernel_gap_sup(alpha, t, GapWeight::Plain)).collect();
    let weighted_gradient_gap: Vec<f64> = times
        .iter()
        .map(|&t| t.powf(params.kappa) * kernel_gap_sup(alpha, t, GapWeight::Gradient))
        .collect();
    let max_weighted_gap = weighted_gap.iter().copied().fold(0.0, f64::max);
    let max_weighted_gradient_gap = weighted_gradient_gap.iter().copied().fold(0.0, f64::max);
    Ok(GapProfile {
        alpha,
        params,
        horizon,
        times,
        weighted_gap,
        weighted_gradient_gap,
        max_weighted_gap,
        max_weighted_gradient_gap,
    })
}

/// Acceptance thresholds of the kernel rate check.
pub const KERNEL_SLOPE_RANGE: (f64, f64) = (0.9, 1.1);
pub const KERNEL_RATIO_SPREAD: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRateReport {
    pub delta: f64,
    pub eta: f64,
    pub kappa: f64,
    pub horizon: f64,
    pub alphas: Vec<f64>,
    pub sup_eta: Vec<f64>,
    pub sup_kappa: Vec<f64>,
    /// `sup / |2 - alpha|`.
    pub ratio_eta: Vec<f64>,
    pub ratio_kappa: Vec<f64>,
    pub fit_eta: LineFit,
    pub fit_kappa: LineFit,
    /// `max ratio / min ratio`.
    pub spread_eta: f64,
    pub spread_kappa: f64,
    /// Smallest `C` with `sup <= C (1 + T^{eta+1}) |2 - alpha|` on the grid.
    pub fitted_constant_eta: f64,
    pub fitted_constant_kappa: f64,
    pub pass: bool,
    #[serde(skip)]
    pub profiles: Vec<GapProfile>,
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

/// Empirical linear-rate check of the weighted kernel gaps over an alpha grid.
pub fn kernel_rate_check(alpha_grid: &[f64], delta: f64, horizon: f64, n_times: usize) -> Result<KernelRateReport> {
    let params = DeltaParams::new(delta)?;
    if alpha_grid.len() < 2 {
        return Err(Error::Fit(format!("alpha grid needs at least two values, got {}", alpha_grid.len())));
    }
    for &a in alpha_grid {
        if a == 2.0 {
            return Err(Error::param("alpha grid must exclude 2"));
        }
        if !params.admits(a) {
            return Err(Error::param(format!("alpha = {a} outside (2 - delta, 2 + delta) with delta = {delta}")));
        }
    }
    let profiles = par_map(alpha_grid, |&a| weighted_gap_profile(a, delta, horizon, n_times))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let dist: Vec<f64> = alpha_grid.iter().map(|a| (2.0 - a).abs()).collect();
    let sup_eta: Vec<f64> = profiles.iter().map(|p| p.max_weighted_gap).collect();
    let sup_kappa: Vec<f64> = profiles.iter().map(|p| p.max_weighted_gradient_gap).collect();
    let ratio_eta: Vec<f64> = sup_eta.iter().zip(&dist).map(|(s, d)| s / d).collect();
    let ratio_kappa: Vec<f64> = sup_kappa.iter().zip(&dist).map(|(s, d)| s / d).collect();
    let fit_eta = fit_log_log(&dist, &sup_eta)?;
    let fit_kappa = fit_log_log(&dist, &sup_kappa)?;
    let spread_eta = spread(&ratio_eta);
    let spread_kappa = spread(&ratio_kappa);
    let max_of = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let fitted_constant_eta = max_of(&ratio_eta) / (1.0 + horizon.powf(params.eta + 1.0));
    let fitted_constant_kappa = max_of(&ratio_kappa) / (1.0 + horizon.powf(params.kappa + 1.0));
    let in_range = |s: f64| s >= KERNEL_SLOPE_RANGE.0 && s <= KERNEL_SLOPE_RANGE.1;
    let pass = in_range(fit_eta.slope)
        && in_range(fit_kappa.slope)
        && spread_eta < KERNEL_RATIO_SPREAD
        && spread_kappa < KERNEL_RATIO_SPREAD;
    Ok(KernelRateReport {
        delta,
        eta: params.eta,
        kappa: params.kappa,
        horizon,
        alphas: alpha_grid.to_vec(),
        sup_eta,
        sup_kappa,
        ratio_eta,
        ratio_kappa,
        fit_eta,
        fit_kappa,
        spread_eta,
        spread_kappa,
        fitted_constant_eta,
        fitted_constant_kappa,
        pass,
        profiles,
    })
}
