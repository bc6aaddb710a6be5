//! Product integration of Duhamel integrals on a uniform time grid.
//!
//! On `[tau_m, tau_{m+1}]` the forcing is frozen at the left node and the
//! kernel factor is integrated exactly:
//!
//! ```text
//! int_{tau_m}^{tau_{m+1}} e^{-(t - tau) lambda} d tau
//!     = e^{-(t - tau_{m+1}) lambda} (1 - e^{-h lambda}) / lambda
//! ```
//!
//! with the limit `h` at `lambda = 0`. Summing gives the recursion
//! `S_m = e^{-h lambda} S_{m-1} + phi_1 F_{m-1}` used below.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{FourierGrid, SpectralField};
use crate::system::{bilinear_eval, linear_eval, SystemSpec};

/// Per-component, per-mode one-step factors `e^{-h lambda}` and `phi_1`.
#[derive(Debug, Clone)]
pub(crate) struct StepFactors {
    decay: Vec<Vec<f64>>,
    phi1: Vec<Vec<f64>>,
}

impl StepFactors {
    pub(crate) fn new(grid: &FourierGrid, alpha: &[f64], h: f64) -> Self {
        let mut decay = Vec::with_capacity(alpha.len());
        let mut phi1 = Vec::with_capacity(alpha.len());
        for &a in alpha {
            let (d, p): (Vec<f64>, Vec<f64>) = grid
                .xi_norms()
                .iter()
                .map(|&r| {
                    if r == 0.0 {
                        (1.0, h)
                    } else {
                        let lambda = r.powf(a);
                        ((-h * lambda).exp(), -(-h * lambda).exp_m1() / lambda)
                    }
                })
                .unzip();
            decay.push(d);
            phi1.push(p);
        }
        StepFactors { decay, phi1 }
    }

    /// `S <- e^{-h lambda} S + phi_1 F`.
    pub(crate) fn advance(&self, sum: &mut SpectralField, forcing: &SpectralField) {
        for i in 0..sum.components() {
            let f = forcing.component(i);
            for (((s, &d), &p), &x) in sum.component_mut(i).iter_mut().zip(&self.decay[i]).zip(&self.phi1[i]).zip(f) {
                *s = *s * d + x * p;
            }
        }
        sum.set_hermitian(sum.is_hermitian() && forcing.is_hermitian());
    }
}

/// Step of a uniform grid starting at 0, or an error.
pub(crate) fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 2 || times[0] != 0.0 {
        return Err(Error::param("quadrature grid must start at 0 and have at least two nodes"));
    }
    let h = times[times.len() - 1] / (times.len() - 1) as f64;
    for (m, &t) in times.iter().enumerate() {
        if ((m as f64) * h - t).abs() > 1e-12 * times[times.len() - 1] {
            return Err(Error::param("quadrature grid is not uniform"));
        }
    }
    Ok(h)
}

/// `S(t_m) = int_0^{t_m} e^{-(t_m - tau)|xi|^{alpha_i}} F(tau) d tau` at every node.
pub fn duhamel_series(grid: &Arc<FourierGrid>, alpha: &[f64], times: &[f64], forcing: &[SpectralField]) -> Result<Vec<SpectralField>> {
    if forcing.len() != times.len() {
        return Err(Error::ShapeMismatch { expected: times.len(), got: forcing.len() });
    }
    let h = uniform_step(times)?;
    let factors = StepFactors::new(grid, alpha, h);
    let mut sum = SpectralField::zeros(grid, alpha.len());
    let mut out = Vec::with_capacity(times.len());
    out.push(sum.clone());
    for f in &forcing[..forcing.len() - 1] {
        if f.components() != alpha.len() || !f.grid().as_ref().eq(grid.as_ref()) {
            return Err(Error::GridMismatch);
        }
        factors.advance(&mut sum, f);
        out.push(sum.clone());
    }
    Ok(out)
}

/// Linear Duhamel operator `A(u)(t_m) = int_0^{t_m} h_alpha(t_m - tau) * L(u)(tau) d tau`.
pub fn operator_a(spec: &SystemSpec, times: &[f64], u: &[SpectralField]) -> Result<Vec<SpectralField>> {
    if u.len() != times.len() {
        return Err(Error::ShapeMismatch { expected: times.len(), got: u.len() });
    }
    let forcing = u.iter().map(|x| linear_eval(spec, x)).collect::<Result<Vec<_>>>()?;
    duhamel_series(spec.grid(), spec.alpha(), times, &forcing)
}

/// Bilinear Duhamel operator `B(u, v)(t_m) = int_0^{t_m} h_alpha(t_m - tau) * Q(u, v)(tau) d tau`.
pub fn operator_b(spec: &SystemSpec, times: &[f64], u: &[SpectralField], v: &[SpectralField]) -> Result<Vec<SpectralField>> {
    if u.len() != times.len() || v.len() != times.len() {
        return Err(Error::ShapeMismatch { expected: times.len(), got: u.len().min(v.len()) });
    }
    let forcing = u
        .iter()
        .zip(v)
        .map(|(a, b)| bilinear_eval(spec, a, b))
        .collect::<Result<Vec<_>>>()?;
    duhamel_series(spec.grid(), spec.alpha(), times, &forcing)
}
