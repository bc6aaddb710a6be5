//! Pseudo-spectral laboratory for coupled quadratic parabolic systems
//!
//! ```text
//! d_t u_i + (-Delta)^{alpha_i/2} u_i + sum_{j,k} Q_ijk(u_j u_k) + sum_j L_ij(u_j) = 0
//! ```
//!
//! with fractional diffusion, order-one homogeneous symbols `q_ijk` and
//! order-zero symbols `l_ij`. The crate builds mild solutions by Picard
//! iteration over the Duhamel formula (or by exponential time differencing),
//! evaluates the explicit local existence times, and measures how solutions
//! with `alpha_i != 2` approach the classical `alpha_i = 2` solution.
//!
//! Modules:
//! - [`spectral`]: periodic grid, transforms, norms, dealiased products.
//! - [`kernels`]: heat multipliers and the weighted kernel-gap verifier.
//! - [`system`]: symbol expressions, system specs and model presets.
//! - [`solver`]: existence times, Duhamel operators, Picard and ETD solvers.
//! - [`lab`]: data families, solution distances and rate studies.

pub mod error;
pub mod fit;
pub mod kernels;
pub mod lab;
pub mod solver;
pub mod spectral;
pub mod system;

pub use error::{Error, Result};

/// Order-preserving map, parallel when the `parallel` feature is on.
pub(crate) fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
