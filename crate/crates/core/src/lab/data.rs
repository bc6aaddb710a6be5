use std::ops::Range;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::{component_norms, norm, FourierGrid, NormKind, SpectralField};
use crate::system::leray_project;

/// `F(z) = max(z, z^beta)`.
pub fn f_rate(z: f64, beta: f64) -> f64 {
    z.max(z.powf(beta))
}

/// Seeded real field with Fourier support in `0 < max_a |k_a| <= max_wavenumber`.
///
/// Coefficients are uniform in the unit square before Hermitian symmetrization.
pub fn band_limited_field(grid: &Arc<FourierGrid>, components: usize, max_wavenumber: i64, seed: u64) -> Result<SpectralField> {
    if max_wavenumber < 1 || max_wavenumber > grid.retained_max_wavenumber() {
        return Err(Error::param(format!(
            "band limit {max_wavenumber} must lie in [1, {}] on this grid",
            grid.retained_max_wavenumber()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.len();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); components * n];
    for comp in 0..components {
        let block = &mut coeffs[comp * n..(comp + 1) * n];
        for (idx, slot) in block.iter_mut().enumerate() {
            let k = grid.wavenumber(idx);
            let top = k[..grid.dim()].iter().map(|v| v.abs()).max().unwrap_or(0);
            if top >= 1 && top <= max_wavenumber {
                *slot = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
        let raw = block.to_vec();
        for (idx, slot) in block.iter_mut().enumerate() {
            *slot = 0.5 * (raw[idx] + raw[grid.mirror_index(idx)].conj());
        }
    }
    let field = SpectralField::from_coeffs(grid, components, coeffs)?;
    Ok(field)
}

/// Projects the blocks and rescales so that `sum_i |w_i|_{H^s} = 1`.
pub fn normalized_perturbation(w: &SpectralField, blocks: &[Range<usize>], s: f64) -> Result<SpectralField> {
    let mut w = w.without_nyquist();
    for b in blocks {
        w = leray_project(&w, b.clone())?;
    }
    let total = norm(&w, NormKind::Hs { s })?;
    if total == 0.0 {
        return Err(Error::param("perturbation vanishes after projection"));
    }
    Ok(w.scaled(1.0 / total))
}

/// `u_{0,alpha,i} = u_{0,2,i} + c |2 - alpha|^{beta_i} w_i`.
///
/// `w` must already be normalized (see [`normalized_perturbation`]); with a
/// single `beta` the Hs distance to `u_{0,2}` is exactly `c |2 - alpha|^beta`.
pub fn build_data_family(base: &SpectralField, alpha: f64, beta: &[f64], c: f64, w: &SpectralField) -> Result<SpectralField> {
    base.check_compatible(w)?;
    if beta.len() != base.components() {
        return Err(Error::ShapeMismatch { expected: base.components(), got: beta.len() });
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::param(format!("data constant c = {c} must be finite and nonnegative")));
    }
    let z = (2.0 - alpha).abs();
    let mut out = base.clone();
    let n = base.grid().len();
    for (i, &b) in beta.iter().enumerate() {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::param(format!("beta_{} = {b} must be positive", i + 1)));
        }
        let scale = c * z.powf(b);
        for (o, x) in out.coeffs_mut()[i * n..(i + 1) * n].iter_mut().zip(w.component(i)) {
            *o += x * scale;
        }
    }
    out.set_hermitian(base.is_hermitian() && w.is_hermitian());
    Ok(out)
}

/// Base data: a band-limited field scaled to `sum_i |u_i|_{H^s} = hs_norm`.
pub fn base_data(grid: &Arc<FourierGrid>, components: usize, blocks: &[Range<usize>], s: f64, hs_norm: f64, max_wavenumber: i64, seed: u64) -> Result<SpectralField> {
    let raw = band_limited_field(grid, components, max_wavenumber, seed)?;
    Ok(normalized_perturbation(&raw, blocks, s)?.scaled(hs_norm))
}

/// Per-component Hs norms, a convenience for the existence-time formulas.
pub fn hs_norms(field: &SpectralField, s: f64) -> Result<Vec<f64>> {
    component_norms(field, NormKind::Hs { s })
}
