use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{component_to_physical, SpectralField};
use crate::error::{Error, Result};

/// The norms appearing in the convergence estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormKind {
    /// Inhomogeneous Sobolev norm with weight `(1 + |xi|^2)^{s/2}`.
    Hs { s: f64 },
    /// Homogeneous `W^{sigma,p}`: L^p norm after the multiplier `|xi|^sigma`.
    HomWsp { sigma: f64, p: f64 },
    /// Lebesgue norm; `p = f64::INFINITY` is the grid maximum.
    Lp { p: f64 },
}

impl NormKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NormKind::Hs { s } if !s.is_finite() => Err(Error::param(format!("Sobolev index must be finite, got {s}"))),
            NormKind::Hs { .. } => Ok(()),
            NormKind::HomWsp { sigma, p } => {
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::param(format!("W^(sigma,p) needs sigma > 0, got {sigma}")));
                }
                if !(p >= 2.0 && p.is_finite()) {
                    return Err(Error::param(format!("W^(sigma,p) needs 2 <= p < inf, got {p}")));
                }
                Ok(())
            }
            NormKind::Lp { p } => {
                if p >= 2.0 {
                    Ok(())
                } else {
                    Err(Error::param(format!("L^p needs 2 <= p <= inf, got {p}")))
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match *self {
            NormKind::Hs { s } => format!("H^{s}"),
            NormKind::HomWsp { sigma, p } => format!("W^({sigma},{p})"),
            NormKind::Lp { p } if p.is_infinite() => "L^inf".to_string(),
            NormKind::Lp { p } => format!("L^{p}"),
        }
    }
}

/// `(sum_xi (1 + |xi|^2)^s |u_hat(xi)|^2 L^d)^{1/2}` for one component.
pub(crate) fn hs_norm_coeffs(field: &SpectralField, coeffs: &[Complex64], s: f64) -> f64 {
    let grid = field.grid();
    let sum: f64 = coeffs
        .iter()
        .zip(grid.xi_norms())
        .map(|(c, &r)| {
            let w = if s == 0.0 { 1.0 } else { (1.0 + r * r).powf(s) };
            w * c.norm_sqr()
        })
        .sum();
    (sum * grid.lattice_measure()).sqrt()
}

fn lp_of_samples(values: &[f64], p: f64, cell: f64) -> f64 {
    if p.is_infinite() {
        values.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if p == 2.0 {
        (values.iter().map(|v| v * v).sum::<f64>() * cell).sqrt()
    } else {
        (values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * cell).powf(1.0 / p)
    }
}

/// Norm of component `i`.
pub fn component_norm(field: &SpectralField, i: usize, kind: NormKind) -> Result<f64> {
    kind.validate()?;
    if i >= field.components() {
        return Err(Error::param(format!("component {i} out of range")));
    }
    let grid = field.grid();
    let coeffs = field.component(i);
    match kind {
        NormKind::Hs { s } => Ok(hs_norm_coeffs(field, coeffs, s)),
        NormKind::Lp { p } => {
            if !field.is_hermitian() {
                return Err(Error::NonHermitian);
            }
            let mut buf = Vec::with_capacity(grid.len());
            let values = component_to_physical(grid, coeffs, &mut buf);
            Ok(lp_of_samples(&values, p, grid.cell_volume()))
        }
        NormKind::HomWsp { sigma, p } => {
            if !field.is_hermitian() {
                return Err(Error::NonHermitian);
            }
            let weighted: Vec<Complex64> = coeffs
                .iter()
                .zip(grid.xi_norms())
                .map(|(c, &r)| if r == 0.0 { Complex64::new(0.0, 0.0) } else { c * r.powf(sigma) })
                .collect();
            let mut buf = Vec::with_capacity(grid.len());
            let values = component_to_physical(grid, &weighted, &mut buf);
            Ok(lp_of_samples(&values, p, grid.cell_volume()))
        }
    }
}

/// Sum of the component norms, the product-space norm `sum_i ||u_i||`.
pub fn norm(field: &SpectralField, kind: NormKind) -> Result<f64> {
    (0..field.components()).map(|i| component_norm(field, i, kind)).sum()
}

/// Per-component norms.
pub fn component_norms(field: &SpectralField, kind: NormKind) -> Result<Vec<f64>> {
    (0..field.components()).map(|i| component_norm(field, i, kind)).collect()
}
