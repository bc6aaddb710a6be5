use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Periodic box `[0, L)^d` sampled with `N` points per axis.
///
/// Lattice points are stored row-major (axis 0 slowest) in FFT order: the
/// axis index `a` carries the integer wavenumber `a` for `a < N/2` and
/// `a - N` otherwise, so the wavenumbers run over `-N/2 ..= N/2 - 1` and the
/// angular frequency is `xi = (2 pi / L) k`.
pub struct FourierGrid {
    dim: usize,
    modes: usize,
    length: f64,
    wavenumbers: Vec<[i64; 3]>,
    xi: Vec<[f64; 3]>,
    xi_norm: Vec<f64>,
    fft_forward: Arc<dyn Fft<f64>>,
    fft_inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FourierGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierGrid")
            .field("dim", &self.dim)
            .field("modes", &self.modes)
            .field("length", &self.length)
            .finish()
    }
}

impl PartialEq for FourierGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.modes == other.modes && self.length == other.length
    }
}

impl FourierGrid {
    pub fn new(dim: usize, modes: usize, length: f64) -> Result<Arc<Self>> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in {{1, 2, 3}}")));
        }
        if modes < 4 || modes % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "modes per axis must be even and >= 4, got {modes}"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidGrid(format!("domain length must be positive, got {length}")));
        }
        let total = modes.pow(dim as u32);
        let dk = 2.0 * PI / length;
        let mut wavenumbers = Vec::with_capacity(total);
        let mut xi = Vec::with_capacity(total);
        let mut xi_norm = Vec::with_capacity(total);
        for idx in 0..total {
            let axes = axis_indices(idx, dim, modes);
            let mut k = [0i64; 3];
            let mut w = [0.0; 3];
            for a in 0..dim {
                k[a] = signed_wavenumber(axes[a], modes);
                w[a] = dk * k[a] as f64;
            }
            wavenumbers.push(k);
            xi.push(w);
            xi_norm.push((w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt());
        }
        let mut planner = FftPlanner::new();
        Ok(Arc::new(FourierGrid {
            dim,
            modes,
            length,
            wavenumbers,
            xi,
            xi_norm,
            fft_forward: planner.plan_fft_forward(modes),
            fft_inverse: planner.plan_fft_inverse(modes),
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of lattice points, `N^d`.
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// Frequency resolution `2 pi / L`.
    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Physical grid spacing `L / N`.
    pub fn spacing(&self) -> f64 {
        self.length / self.modes as f64
    }

    /// Volume element of one physical grid cell, `(L/N)^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Weight attached to each Fourier coefficient in spectral sums, `L^d`.
    ///
    /// With the coefficient normalization `u_hat(k) = N^{-d} sum_x u(x) e^{-i xi.x}`
    /// this makes `sum_k |u_hat(k)|^2 L^d` equal the L2(torus) integral of `|u|^2`.
    pub fn lattice_measure(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    pub fn wavenumber(&self, idx: usize) -> [i64; 3] {
        self.wavenumbers[idx]
    }

    /// Angular frequency vector at `idx`, as a slice of length `d`.
    pub fn xi(&self, idx: usize) -> &[f64] {
        &self.xi[idx][..self.dim]
    }

    pub fn xi_norm(&self, idx: usize) -> f64 {
        self.xi_norm[idx]
    }

    pub fn xi_norms(&self) -> &[f64] {
        &self.xi_norm
    }

    /// Lattice index of `-k` (modulo the period).
    pub fn mirror_index(&self, idx: usize) -> usize {
        let n = self.modes;
        let axes = axis_indices(idx, self.dim, n);
        let mut out = 0;
        for &a in axes.iter().take(self.dim) {
            out = out * n + (n - a) % n;
        }
        out
    }

    /// True when any axis sits on the unpaired index `-N/2`.
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let half = (self.modes / 2) as i64;
        self.wavenumbers[idx][..self.dim].iter().any(|&k| k == -half)
    }

    /// 2/3-rule mask: kept when `3 |k_a| < N` on every axis.
    pub fn is_retained(&self, idx: usize) -> bool {
        let n = self.modes as i64;
        self.wavenumbers[idx][..self.dim].iter().all(|&k| 3 * k.abs() < n)
    }

    /// Largest retained integer wavenumber per axis under the 2/3 rule.
    pub fn retained_max_wavenumber(&self) -> i64 {
        (self.modes as i64 - 1) / 3
    }

    /// Lattice index of an integer wavevector, wrapping into range.
    pub fn index_of(&self, k: &[i64]) -> usize {
        let n = self.modes as i64;
        let mut out = 0usize;
        for a in 0..self.dim {
            let w = k.get(a).copied().unwrap_or(0).rem_euclid(n);
            out = out * self.modes + w as usize;
        }
        out
    }

    /// Physical coordinates of grid point `idx` (row-major, `x_a = j_a L / N`).
    pub fn coordinates(&self, idx: usize) -> [f64; 3] {
        let axes = axis_indices(idx, self.dim, self.modes);
        let h = self.spacing();
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = axes[a] as f64 * h;
        }
        x
    }

    pub(crate) fn fft_plan(&self, inverse: bool) -> &Arc<dyn Fft<f64>> {
        if inverse {
            &self.fft_inverse
        } else {
            &self.fft_forward
        }
    }

    pub(crate) fn same_as(&self, other: &FourierGrid) -> bool {
        self == other
    }
}

fn signed_wavenumber(a: usize, n: usize) -> i64 {
    if a < n / 2 {
        a as i64
    } else {
        a as i64 - n as i64
    }
}

fn axis_indices(idx: usize, dim: usize, n: usize) -> [usize; 3] {
    let mut axes = [0usize; 3];
    let mut rest = idx;
    for a in (0..dim).rev() {
        axes[a] = rest % n;
        rest /= n;
    }
    axes
}

/// In-place unnormalized multi-dimensional DFT over all axes of one component.
pub(crate) fn fft_in_place(grid: &FourierGrid, data: &mut [Complex64], inverse: bool) {
    let n = grid.modes;
    let plan = grid.fft_plan(inverse);
    if grid.dim == 1 {
        plan.process(data);
        return;
    }
    let total = grid.len();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..grid.dim {
        let stride = n.pow((grid.dim - 1 - axis) as u32);
        if stride == 1 {
            for chunk in data.chunks_exact_mut(n) {
                plan.process(chunk);
            }
            continue;
        }
        let block = stride * n;
        for base in (0..total).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (m, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + m * stride];
                }
                plan.process(&mut line);
                for (m, value) in line.iter().enumerate() {
                    data[start + m * stride] = *value;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(FourierGrid::new(0, 8, 1.0).is_err());
        assert!(FourierGrid::new(4, 8, 1.0).is_err());
        assert!(FourierGrid::new(1, 6 + 1, 1.0).is_err());
        assert!(FourierGrid::new(1, 2, 1.0).is_err());
        assert!(FourierGrid::new(1, 8, 0.0).is_err());
        assert!(FourierGrid::new(1, 8, -1.0).is_err());
    }

    #[test]
    fn lattice_is_symmetric_except_nyquist() {
        let g = FourierGrid::new(2, 8, 2.0 * PI).unwrap();
        let mut nyquist = 0;
        for idx in 0..g.len() {
            let k = g.wavenumber(idx);
            if g.is_nyquist(idx) {
                nyquist += 1;
                continue;
            }
            let m = g.mirror_index(idx);
            assert_eq!(g.wavenumber(m)[0], -k[0]);
            assert_eq!(g.wavenumber(m)[1], -k[1]);
        }
        // one Nyquist line per axis, crossing at the corner
        assert_eq!(nyquist, 8 + 8 - 1);
    }

    #[test]
    fn frequencies_scale_with_length() {
        let g = FourierGrid::new(1, 8, 4.0 * PI).unwrap();
        let idx = g.index_of(&[3]);
        assert!((g.xi(idx)[0] - 1.5).abs() < 1e-15);
        let idx = g.index_of(&[-4]);
        assert!(g.is_nyquist(idx));
        assert!((g.xi_norm(idx) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_thirds_mask() {
        let g = FourierGrid::new(1, 8, 1.0).unwrap();
        let kept: Vec<i64> = (0..8).filter(|&i| g.is_retained(i)).map(|i| g.wavenumber(i)[0]).collect();
        assert_eq!(kept, vec![0, 1, 2, -2, -1]);
        assert_eq!(g.retained_max_wavenumber(), 2);
        let g = FourierGrid::new(1, 256, 1.0).unwrap();
        assert_eq!(g.retained_max_wavenumber(), 85);
    }
}
