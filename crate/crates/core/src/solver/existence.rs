//! Explicit local existence times and the contraction conditions.
//!
//! All times are relative to the generic constant `C`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::check_delta;

fn check_inputs(norms: &[f64], c: f64) -> Result<()> {
    if norms.is_empty() {
        return Err(Error::param("at least one data norm is required"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::param(format!("constant C = {c} must be positive")));
    }
    for (j, &u) in norms.iter().enumerate() {
        if !(u >= 0.0 && u.is_finite()) {
            return Err(Error::param(format!("data norm {} = {u} must be finite and nonnegative", j + 1)));
        }
    }
    Ok(())
}

fn check_alpha(alpha: &[f64]) -> Result<()> {
    for (i, &a) in alpha.iter().enumerate() {
        if !(a > 1.0 && a.is_finite()) {
            return Err(Error::param(format!(
                "alpha_{} = {a} must exceed 1 (the existence time degenerates at alpha_i <= 1)",
                i + 1
            )));
        }
    }
    Ok(())
}

/// `x^p` with `x = a / (b * norm)` and the convention `+inf` at zero norm.
fn branch(num: f64, den: f64, p: f64) -> f64 {
    if den == 0.0 {
        f64::INFINITY
    } else {
        (num / den).powf(p)
    }
}

/// `T_alpha = 1/2 min[1/(3nC), min_{i,j} ((1 - 1/alpha_i) / (9 n^2 C |u0_j|))^{alpha_i/(alpha_i - 1)}]`.
///
/// `alpha` and `norms` both have one entry per component.
pub fn existence_time_alpha(alpha: &[f64], norms: &[f64], c: f64) -> Result<f64> {
    check_inputs(norms, c)?;
    check_alpha(alpha)?;
    if alpha.len() != norms.len() {
        return Err(Error::ShapeMismatch { expected: alpha.len(), got: norms.len() });
    }
    let n = alpha.len() as f64;
    let mut t = 1.0 / (3.0 * n * c);
    for &a in alpha {
        for &u in norms {
            t = t.min(branch(1.0 - 1.0 / a, 9.0 * n * n * c * u, a / (a - 1.0)));
        }
    }
    Ok(0.5 * t)
}

/// `T_2 = 1/2 min[1/(3nC), min_j (1 / (18 n^2 C |u0_j|))^2]`.
pub fn existence_time_classical(norms: &[f64], c: f64) -> Result<f64> {
    check_inputs(norms, c)?;
    let n = norms.len() as f64;
    let mut t = 1.0 / (3.0 * n * c);
    for &u in norms {
        t = t.min(branch(1.0, 18.0 * n * n * c * u, 2.0));
    }
    Ok(0.5 * t)
}

/// Uniform lower bound `T_0` on `T_alpha` over the window `|alpha_i - 2| < delta`.
///
/// `Phi_j = (1 - 1/(2 - delta)) / (9 n^2 C |u0_{2,j}| + delta^beta)` and
/// `T_0 = 1/2 min[1/(3nC), min_j min(Phi_j^{(2+delta)/(1-delta)}, Phi_j^{(2-delta)/(1+delta)})]`.
pub fn existence_time_floor(delta: f64, beta_min: f64, classical_norms: &[f64], c: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(beta_min > 0.0 && beta_min.is_finite()) {
        return Err(Error::param(format!("beta = {beta_min} must be positive")));
    }
    check_inputs(classical_norms, c)?;
    let n = classical_norms.len() as f64;
    let mut t = 1.0 / (3.0 * n * c);
    for &u in classical_norms {
        let phi = floor_phi(delta, beta_min, u, n, c);
        let hi = phi.powf((2.0 + delta) / (1.0 - delta));
        let lo = phi.powf((2.0 - delta) / (1.0 + delta));
        t = t.min(hi.min(lo));
    }
    Ok(0.5 * t)
}

fn floor_phi(delta: f64, beta: f64, u: f64, n: f64, c: f64) -> f64 {
    (1.0 - 1.0 / (2.0 - delta)) / (9.0 * n * n * c * u + delta.powf(beta))
}

/// Quantities of the Picard contraction lemma on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardConditions {
    /// `C n T`.
    pub c_a: f64,
    /// `C sum_i T^{1 - 1/alpha_i} / (1 - 1/alpha_i)`.
    pub c_b: f64,
    /// `C sum_j |u0_j|_{H^s}`.
    pub delta0: f64,
    /// `3 C_A < 1`.
    pub linear_small: bool,
    /// `9 C_B delta0 < 1`.
    pub data_small: bool,
    /// `C_A + 6 C_B delta0 < 1`.
    pub contraction: bool,
    /// `C_A + 6 C_B delta0`, the predicted contraction factor.
    pub bound: f64,
}

impl PicardConditions {
    pub fn new(alpha: &[f64], horizon: f64, norms: &[f64], c: f64) -> Result<Self> {
        check_inputs(norms, c)?;
        check_alpha(alpha)?;
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::param(format!("horizon T = {horizon} must be positive")));
        }
        let n = alpha.len() as f64;
        let c_a = c * n * horizon;
        let c_b = c * alpha
            .iter()
            .map(|&a| horizon.powf(1.0 - 1.0 / a) / (1.0 - 1.0 / a))
            .sum::<f64>();
        let delta0 = c * norms.iter().sum::<f64>();
        let bound = c_a + 6.0 * c_b * delta0;
        Ok(PicardConditions {
            c_a,
            c_b,
            delta0,
            linear_small: 3.0 * c_a < 1.0,
            data_small: 9.0 * c_b * delta0 < 1.0,
            contraction: bound < 1.0,
            bound,
        })
    }

    pub fn all_hold(&self) -> bool {
        self.linear_small && self.data_small && self.contraction
    }
}
