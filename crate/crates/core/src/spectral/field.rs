use std::sync::Arc;

use num_complex::Complex64;

use super::grid::{fft_in_place, FourierGrid};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative tolerance used when checking Hermitian symmetry after an operation.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Fourier coefficients of an `n`-component field on a [`FourierGrid`].
///
/// Coefficients are stored component-major: component `i` occupies
/// `coeffs[i * N^d .. (i + 1) * N^d]` in the grid's lattice order.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Arc<FourierGrid>,
    components: usize,
    coeffs: Vec<Complex64>,
    hermitian: bool,
}

impl SpectralField {
    pub fn zeros(grid: &Arc<FourierGrid>, components: usize) -> Self {
        SpectralField {
            grid: Arc::clone(grid),
            components,
            coeffs: vec![ZERO; components * grid.len()],
            hermitian: true,
        }
    }

    /// Wraps raw coefficients. The Hermitian flag is computed, not trusted.
    pub fn from_coeffs(grid: &Arc<FourierGrid>, components: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if components == 0 {
            return Err(Error::param("a field needs at least one component"));
        }
        let expected = components * grid.len();
        if coeffs.len() != expected {
            return Err(Error::ShapeMismatch { expected, got: coeffs.len() });
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("spectral coefficients".into()));
        }
        let mut field = SpectralField { grid: Arc::clone(grid), components, coeffs, hermitian: false };
        field.hermitian = field.hermitian_defect() <= HERMITIAN_TOL;
        Ok(field)
    }

    /// Stacks single- or multi-component fields into one field.
    pub fn stack(parts: &[SpectralField]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::param("nothing to stack"))?;
        let mut coeffs = Vec::new();
        let mut components = 0;
        let mut hermitian = true;
        for p in parts {
            if !p.grid.same_as(&first.grid) {
                return Err(Error::GridMismatch);
            }
            coeffs.extend_from_slice(&p.coeffs);
            components += p.components;
            hermitian &= p.hermitian;
        }
        Ok(SpectralField { grid: Arc::clone(&first.grid), components, coeffs, hermitian })
    }

    pub(crate) fn from_parts_unchecked(
        grid: &Arc<FourierGrid>,
        components: usize,
        coeffs: Vec<Complex64>,
        hermitian: bool,
    ) -> Self {
        debug_assert_eq!(coeffs.len(), components * grid.len());
        SpectralField { grid: Arc::clone(grid), components, coeffs, hermitian }
    }

    pub fn grid(&self) -> &Arc<FourierGrid> {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn component(&self, i: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.coeffs[i * n..(i + 1) * n]
    }

    pub(crate) fn component_mut(&mut self, i: usize) -> &mut [Complex64] {
        let n = self.grid.len();
        &mut self.coeffs[i * n..(i + 1) * n]
    }

    /// Copy of component `i` as a one-component field.
    pub fn extract(&self, i: usize) -> SpectralField {
        SpectralField {
            grid: Arc::clone(&self.grid),
            components: 1,
            coeffs: self.component(i).to_vec(),
            hermitian: self.hermitian,
        }
    }

    /// Coefficient of component `i` at the integer wavevector `k`.
    pub fn coefficient(&self, i: usize, k: &[i64]) -> Complex64 {
        self.component(i)[self.grid.index_of(k)]
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub(crate) fn set_hermitian(&mut self, flag: bool) {
        self.hermitian = flag;
    }

    /// `max |u(k) - conj u(-k)| / max |u|` over all components (0 for the zero field).
    ///
    /// Nyquist-plane modes pair with lattice points whose frequency is not
    /// exactly `-xi`; they are included through the periodic mirror index.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.len();
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for comp in 0..self.components {
            let c = &self.coeffs[comp * n..(comp + 1) * n];
            for idx in 0..n {
                let m = self.grid.mirror_index(idx);
                worst = worst.max((c[idx] - c[m].conj()).norm());
            }
        }
        worst / scale
    }

    /// Recomputes the Hermitian flag from the coefficients.
    pub fn refresh_hermitian(&mut self) -> bool {
        self.hermitian = self.hermitian_defect() <= HERMITIAN_TOL;
        self.hermitian
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub(crate) fn check_compatible(&self, other: &SpectralField) -> Result<()> {
        if !self.grid.same_as(&other.grid) || self.components != other.components {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> SpectralField {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= factor);
        out
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &SpectralField) -> Result<SpectralField> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b * factor).collect();
        Ok(SpectralField {
            grid: Arc::clone(&self.grid),
            components: self.components,
            coeffs,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.axpy(-1.0, other)
    }

    /// Largest coefficient modulus of the difference, relative to the larger field.
    pub fn max_relative_difference(&self, other: &SpectralField) -> Result<f64> {
        self.check_compatible(other)?;
        let scale = self
            .coeffs
            .iter()
            .chain(&other.coeffs)
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            return Ok(0.0);
        }
        let diff = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        Ok(diff / scale)
    }

    /// Zeroes every coefficient on a Nyquist plane.
    ///
    /// Multipliers built from `xi` are not Hermitian-compatible there, since the
    /// mirror of a Nyquist point is not `-xi`; band-limited data avoid the issue.
    pub fn without_nyquist(&self) -> SpectralField {
        let mut out = self.clone();
        let n = self.grid.len();
        for comp in 0..self.components {
            for idx in 0..n {
                if self.grid.is_nyquist(idx) {
                    out.coeffs[comp * n + idx] = ZERO;
                }
            }
        }
        out
    }

    /// Applies the 2/3-rule mask to every component.
    pub fn truncated(&self) -> SpectralField {
        let mut out = self.clone();
        let n = self.grid.len();
        for comp in 0..self.components {
            truncate_in_place(&self.grid, &mut out.coeffs[comp * n..(comp + 1) * n]);
        }
        out
    }
}

pub(crate) fn truncate_in_place(grid: &FourierGrid, coeffs: &mut [Complex64]) {
    for (idx, c) in coeffs.iter_mut().enumerate() {
        if !grid.is_retained(idx) {
            *c = ZERO;
        }
    }
}

/// Fourier coefficients of real physical data.
///
/// `physical` holds `n` components of `N^d` samples each (component-major,
/// row-major within a component, sample `j` at `x = j L / N`). The transform is
/// `u_hat(k) = N^{-d} sum_x u(x) exp(-i xi_k . x)`, so together with the
/// weight [`FourierGrid::lattice_measure`] discrete Parseval reproduces the
/// L2(torus) integral.
pub fn forward_transform(physical: &[f64], grid: &Arc<FourierGrid>) -> Result<SpectralField> {
    let n = grid.len();
    if physical.is_empty() || physical.len() % n != 0 {
        return Err(Error::ShapeMismatch { expected: n, got: physical.len() });
    }
    if physical.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("physical samples".into()));
    }
    let components = physical.len() / n;
    let mut coeffs: Vec<Complex64> = physical.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let scale = 1.0 / n as f64;
    for chunk in coeffs.chunks_exact_mut(n) {
        fft_in_place(grid, chunk, false);
        chunk.iter_mut().for_each(|c| *c *= scale);
    }
    Ok(SpectralField::from_parts_unchecked(grid, components, coeffs, true))
}

/// Physical samples of a Hermitian field; inverse of [`forward_transform`].
pub fn inverse_transform(field: &SpectralField) -> Result<Vec<f64>> {
    if !field.is_hermitian() {
        return Err(Error::NonHermitian);
    }
    let n = field.grid().len();
    let mut out = Vec::with_capacity(field.coeffs.len());
    let mut buf = vec![ZERO; n];
    for comp in 0..field.components {
        buf.copy_from_slice(field.component(comp));
        fft_in_place(field.grid(), &mut buf, true);
        out.extend(buf.iter().map(|c| c.re));
    }
    Ok(out)
}

/// Physical samples of one component given as raw coefficients.
pub(crate) fn component_to_physical(grid: &FourierGrid, coeffs: &[Complex64], buf: &mut Vec<Complex64>) -> Vec<f64> {
    buf.clear();
    buf.extend_from_slice(coeffs);
    fft_in_place(grid, buf, true);
    buf.iter().map(|c| c.re).collect()
}

/// Physical samples of component `coeffs` after the 2/3-rule input truncation.
pub(crate) fn dealiased_physical(grid: &FourierGrid, coeffs: &[Complex64], buf: &mut Vec<Complex64>) -> Vec<f64> {
    buf.clear();
    buf.extend_from_slice(coeffs);
    truncate_in_place(grid, buf);
    fft_in_place(grid, buf, true);
    buf.iter().map(|c| c.re).collect()
}

/// Truncated Fourier coefficients of the pointwise product of two physical arrays.
pub(crate) fn product_coefficients(grid: &FourierGrid, a: &[f64], b: &[f64], out: &mut [Complex64]) {
    for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
        *o = Complex64::new(x * y, 0.0);
    }
    fft_in_place(grid, out, false);
    let scale = 1.0 / grid.len() as f64;
    out.iter_mut().for_each(|c| *c *= scale);
    truncate_in_place(grid, out);
}

/// Component-wise dealiased product `a_i * b_i`.
///
/// Both factors are truncated to `3|k_a| < N`, multiplied on the physical
/// grid and transformed back, and the result is truncated again, which makes
/// the retained modes free of aliasing.
pub fn dealiased_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.check_compatible(b)?;
    if !a.is_hermitian() || !b.is_hermitian() {
        return Err(Error::NonHermitian);
    }
    let grid = a.grid();
    let n = grid.len();
    let mut buf = Vec::with_capacity(n);
    let mut coeffs = vec![ZERO; a.coeffs.len()];
    for comp in 0..a.components {
        let pa = dealiased_physical(grid, a.component(comp), &mut buf);
        let pb = dealiased_physical(grid, b.component(comp), &mut buf);
        product_coefficients(grid, &pa, &pb, &mut coeffs[comp * n..(comp + 1) * n]);
    }
    Ok(SpectralField::from_parts_unchecked(grid, a.components, coeffs, true))
}

/// Applies a scalar Fourier multiplier to every component.
///
/// `m` is evaluated at every `xi != 0`; `at_zero` is used for the zero mode.
/// The Hermitian flag of the result is re-checked.
pub fn multiplier_apply<F>(field: &SpectralField, m: F, at_zero: Complex64) -> SpectralField
where
    F: Fn(&[f64]) -> Complex64,
{
    let grid = field.grid();
    let n = grid.len();
    let table: Vec<Complex64> = (0..n)
        .map(|idx| if grid.xi_norm(idx) == 0.0 { at_zero } else { m(grid.xi(idx)) })
        .collect();
    let mut out = field.clone();
    for comp in 0..field.components {
        for (c, t) in out.component_mut(comp).iter_mut().zip(&table) {
            *c *= t;
        }
    }
    if field.is_hermitian() {
        out.refresh_hermitian();
    } else {
        out.hermitian = false;
    }
    out
}

/// Applies an `n x n` matrix-valued multiplier mixing the components.
///
/// `m(xi)` must return `n * n` entries in row-major order; output component
/// `i` is `sum_j m_ij(xi) u_j(xi)`.
pub fn matrix_multiplier_apply<F>(field: &SpectralField, m: F, at_zero: &[Complex64]) -> Result<SpectralField>
where
    F: Fn(&[f64]) -> Vec<Complex64>,
{
    let nc = field.components;
    if at_zero.len() != nc * nc {
        return Err(Error::ShapeMismatch { expected: nc * nc, got: at_zero.len() });
    }
    let grid = field.grid();
    let n = grid.len();
    let mut out = SpectralField::zeros(grid, nc);
    for idx in 0..n {
        let owned;
        let mat: &[Complex64] = if grid.xi_norm(idx) == 0.0 {
            at_zero
        } else {
            owned = m(grid.xi(idx));
            if owned.len() != nc * nc {
                return Err(Error::ShapeMismatch { expected: nc * nc, got: owned.len() });
            }
            &owned
        };
        for i in 0..nc {
            let mut acc = ZERO;
            for j in 0..nc {
                acc += mat[i * nc + j] * field.coeffs[j * n + idx];
            }
            out.coeffs[i * n + idx] = acc;
        }
    }
    if field.is_hermitian() {
        out.refresh_hermitian();
    } else {
        out.hermitian = false;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid1(n: usize) -> Arc<FourierGrid> {
        FourierGrid::new(1, n, 2.0 * PI).unwrap()
    }

    #[test]
    fn constant_field_has_only_zero_mode() {
        let g = FourierGrid::new(2, 8, 3.0).unwrap();
        let f = forward_transform(&vec![2.5; g.len()], &g).unwrap();
        for (idx, c) in f.component(0).iter().enumerate() {
            if idx == 0 {
                assert!((c.re - 2.5).abs() < 1e-14 && c.im.abs() < 1e-14);
            } else {
                assert!(c.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn single_cosine_gives_hermitian_pair() {
        // cos(2 x) on N = 8, L = 2 pi: u_hat(+-2) = 1/2 by hand.
        let g = grid1(8);
        let values: Vec<f64> = (0..8).map(|j| (2.0 * j as f64 * 2.0 * PI / 8.0).cos()).collect();
        let f = forward_transform(&values, &g).unwrap();
        for k in -4..4i64 {
            let c = f.coefficient(0, &[k]);
            let expected = if k.abs() == 2 { 0.5 } else { 0.0 };
            assert!((c.re - expected).abs() < 1e-15, "k={k}: {c}");
            assert!(c.im.abs() < 1e-15);
        }
        assert!(f.is_hermitian());
    }

    #[test]
    fn sine_mode_hand_dft() {
        // sin(x): u_hat(1) = -i/2, u_hat(-1) = i/2.
        let g = grid1(8);
        let values: Vec<f64> = (0..8).map(|j| (j as f64 * 2.0 * PI / 8.0).sin()).collect();
        let f = forward_transform(&values, &g).unwrap();
        assert!((f.coefficient(0, &[1]) - Complex64::new(0.0, -0.5)).norm() < 1e-15);
        assert!((f.coefficient(0, &[-1]) - Complex64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn zero_field_inverts_to_zero() {
        let g = FourierGrid::new(3, 4, 1.0).unwrap();
        let f = SpectralField::zeros(&g, 2);
        assert!(inverse_transform(&f).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn inverse_rejects_non_hermitian() {
        let g = grid1(8);
        let mut coeffs = vec![ZERO; 8];
        coeffs[1] = Complex64::new(1.0, 0.0);
        let f = SpectralField::from_coeffs(&g, 1, coeffs).unwrap();
        assert!(!f.is_hermitian());
        assert!(matches!(inverse_transform(&f), Err(Error::NonHermitian)));
    }

    #[test]
    fn shape_errors() {
        let g = grid1(8);
        assert!(matches!(forward_transform(&[1.0; 7], &g), Err(Error::ShapeMismatch { .. })));
        assert!(SpectralField::from_coeffs(&g, 1, vec![ZERO; 9]).is_err());
        let a = SpectralField::zeros(&g, 1);
        let b = SpectralField::zeros(&grid1(16), 1);
        assert!(matches!(dealiased_product(&a, &b), Err(Error::GridMismatch)));
    }

    #[test]
    fn product_with_one_is_truncation() {
        let g = grid1(16);
        let values: Vec<f64> = (0..16).map(|j| ((j * j) as f64 * 0.37).sin()).collect();
        let f = forward_transform(&values, &g).unwrap();
        let one = forward_transform(&[1.0; 16], &g).unwrap();
        let p = dealiased_product(&f, &one).unwrap();
        for idx in 0..16 {
            let expected = if g.is_retained(idx) { f.component(0)[idx] } else { ZERO };
            assert!((p.component(0)[idx] - expected).norm() < 1e-15);
        }
        let zero = SpectralField::zeros(&g, 1);
        assert!(dealiased_product(&f, &zero).unwrap().is_zero());
    }

    #[test]
    fn product_of_two_modes_by_hand() {
        // cos(x) * cos(2x) = (cos x + cos 3x) / 2 ; on N = 8 mode 3 is dealiased
        // away, leaving u_hat(+-1) = 1/4.
        let g = grid1(8);
        let a: Vec<f64> = (0..8).map(|j| (j as f64 * PI / 4.0).cos()).collect();
        let b: Vec<f64> = (0..8).map(|j| (2.0 * j as f64 * PI / 4.0).cos()).collect();
        let p = dealiased_product(&forward_transform(&a, &g).unwrap(), &forward_transform(&b, &g).unwrap()).unwrap();
        for k in -4..4i64 {
            let expected = if k.abs() == 1 { 0.25 } else { 0.0 };
            assert!((p.coefficient(0, &[k]) - Complex64::new(expected, 0.0)).norm() < 1e-15, "k={k}");
        }
        // on N = 16 mode 3 survives with weight 1/4
        let g = grid1(16);
        let a: Vec<f64> = (0..16).map(|j| (j as f64 * PI / 8.0).cos()).collect();
        let b: Vec<f64> = (0..16).map(|j| (2.0 * j as f64 * PI / 8.0).cos()).collect();
        let p = dealiased_product(&forward_transform(&a, &g).unwrap(), &forward_transform(&b, &g).unwrap()).unwrap();
        assert!((p.coefficient(0, &[3]).re - 0.25).abs() < 1e-15);
        assert!((p.coefficient(0, &[-1]).re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn multiplier_basics() {
        let g = grid1(8);
        let values: Vec<f64> = (0..8).map(|j| (j as f64 * PI / 4.0).cos() + 0.3).collect();
        let f = forward_transform(&values, &g).unwrap().without_nyquist();
        let same = multiplier_apply(&f, |_| Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        assert_eq!(same.coeffs(), f.coeffs());
        let zero = multiplier_apply(&f, |_| ZERO, ZERO);
        assert!(zero.is_zero());
        let dx = multiplier_apply(&f, |xi| Complex64::new(0.0, xi[0]), ZERO);
        assert!((dx.coefficient(0, &[1]) - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        assert!(dx.is_hermitian());
        // i * identity breaks the real-field symmetry
        let bad = multiplier_apply(&f, |_| Complex64::new(0.0, 1.0), Complex64::new(0.0, 1.0));
        assert!(!bad.is_hermitian());
    }

    #[test]
    fn matrix_multiplier_swaps_components() {
        let g = grid1(8);
        let a: Vec<f64> = (0..8).map(|j| (j as f64 * PI / 4.0).cos()).collect();
        let b: Vec<f64> = (0..8).map(|j| (j as f64 * PI / 2.0).sin()).collect();
        let f = forward_transform(&[a, b].concat(), &g).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let swap = vec![ZERO, one, one, ZERO];
        let s = matrix_multiplier_apply(&f, |_| swap.clone(), &swap).unwrap();
        assert_eq!(s.component(0), f.component(1));
        assert_eq!(s.component(1), f.component(0));
        assert!(matrix_multiplier_apply(&f, |_| vec![one], &swap).is_err());
    }
}
