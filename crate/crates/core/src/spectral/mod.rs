//! Periodic spectral discretization and the norms used by the estimates.
//!
//! The whole space is replaced by the torus `[0, L)^d`. Fourier coefficients
//! are normalized as `u_hat(k) = N^{-d} sum_x u(x) e^{-i xi_k . x}`, and every
//! spectral sum carries the weight `L^d`, so that
//! `sum_k |u_hat(k)|^2 L^d = int_torus |u|^2` holds exactly on the grid.
//! Homogeneous symbols (`|xi|^sigma`, projectors) take the value 0 at `xi = 0`.

mod field;
mod grid;
mod norm;

pub use field::{
    dealiased_product, forward_transform, inverse_transform, matrix_multiplier_apply, multiplier_apply,
    SpectralField, HERMITIAN_TOL,
};
pub(crate) use field::{dealiased_physical, product_coefficients};
pub use grid::FourierGrid;
pub use norm::{component_norm, component_norms, norm, NormKind};
