//! wasm-bindgen exports behind `www/index.html`.
//!
//! Every function returns a flat `Float64Array`; the layout is documented on
//! each export.

use std::f64::consts::PI;

use fraclab::kernels::weighted_gap_profile;
use fraclab::lab::{base_data, derived_seed};
use fraclab::solver::{etd_march, existence_time_alpha, existence_time_classical, existence_time_floor, SolverConfig, SolverMode};
use fraclab::spectral::{inverse_transform, norm, FourierGrid, NormKind};
use fraclab::system::{build_preset, Model};
use wasm_bindgen::prelude::*;

fn js(e: fraclab::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Weighted kernel gaps at `t = 0` and `n_times` geometric times up to `horizon`.
///
/// Layout: `[t.., plain.., gradient..]`, `3 (n_times + 1)` values.
#[wasm_bindgen]
pub fn kernel_gap_curve(alpha: f64, delta: f64, horizon: f64, n_times: usize) -> Result<Vec<f64>, JsError> {
    let p = weighted_gap_profile(alpha, delta, horizon, n_times).map_err(js)?;
    Ok([p.times, p.weighted_gap, p.weighted_gradient_gap].concat())
}

/// 1-D Burgers from the same data with `alpha` and with `alpha = 2`.
///
/// Runs ETD with `steps` steps on the common horizon `min(T_alpha, T_2)`.
/// Layout: `[horizon, gap_hs, x.., u_alpha.., u_2..]` with `modes` samples each.
#[wasm_bindgen]
pub fn burgers_compare(alpha: f64, hs_norm: f64, modes: usize, steps: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    let grid = FourierGrid::new(1, modes, 2.0 * PI).map_err(js)?;
    let s = 1.5;
    let data = base_data(&grid, 1, &[], s, hs_norm, 4.min(grid.retained_max_wavenumber()), derived_seed(seed, 1)).map_err(js)?;
    let frac = build_preset(Model::Burgers1d, &grid, vec![alpha], data.clone()).map_err(js)?;
    let classical = build_preset(Model::Burgers1d, &grid, vec![2.0], data).map_err(js)?;
    let norms = [hs_norm];
    let t = existence_time_alpha(&[alpha], &norms, 1.0)
        .map_err(js)?
        .min(existence_time_classical(&norms, 1.0).map_err(js)?);
    let cfg = SolverConfig { mode: SolverMode::EtdMarching, dt: t / steps.max(1) as f64, ..SolverConfig::default() };
    let a = etd_march(&frac, t, &cfg).map_err(js)?;
    let b = etd_march(&classical, t, &cfg).map_err(js)?;
    let gap = norm(&a.final_state().sub(b.final_state()).map_err(js)?, NormKind::Hs { s }).map_err(js)?;
    let mut out = vec![t, gap];
    out.extend((0..modes).map(|j| grid.coordinates(j)[0]));
    out.extend(inverse_transform(a.final_state()).map_err(js)?);
    out.extend(inverse_transform(b.final_state()).map_err(js)?);
    Ok(out)
}

/// Existence times for one component with `|u_0|_{H^s} = data_norm`.
///
/// `alpha` runs over `count` evenly spaced points of `[2 - delta, 2 + delta]`
/// (`alpha = 2` included). Layout: `[t_2, t_0, alpha.., t_alpha..]`.
#[wasm_bindgen]
pub fn existence_times(data_norm: f64, constant: f64, delta: f64, beta: f64, count: usize) -> Result<Vec<f64>, JsError> {
    let norms = [data_norm];
    let t2 = existence_time_classical(&norms, constant).map_err(js)?;
    let t0 = existence_time_floor(delta, beta, &norms, constant).map_err(js)?;
    let count = count.max(2);
    let alphas: Vec<f64> = (0..count).map(|k| 2.0 - delta + 2.0 * delta * k as f64 / (count - 1) as f64).collect();
    let times = alphas
        .iter()
        .map(|&a| existence_time_alpha(&[a], &norms, constant))
        .collect::<Result<Vec<_>, _>>()
        .map_err(js)?;
    Ok([vec![t2, t0], alphas, times].concat())
}
