use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{leray_projector, LTerm, QTerm, SymbolExpr, SystemSpec};
use crate::error::{Error, Result};
use crate::spectral::{FourierGrid, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    NavierStokes,
    Mhd,
    Boussinesq,
    KellerSegel,
    Burgers1d,
}

impl Model {
    pub const ALL: [Model; 5] = [Model::NavierStokes, Model::Mhd, Model::Boussinesq, Model::KellerSegel, Model::Burgers1d];

    pub fn name(self) -> &'static str {
        match self {
            Model::NavierStokes => "navier-stokes",
            Model::Mhd => "mhd",
            Model::Boussinesq => "boussinesq",
            Model::KellerSegel => "keller-segel",
            Model::Burgers1d => "burgers1d",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Model::NavierStokes => "incompressible Navier-Stokes, u_t + P div(u (x) u) = diffusion; d = 3, n = 3",
            Model::Mhd => "magneto-hydrodynamics (u, b) with P div couplings; d = 3, n = 6",
            Model::Boussinesq => "Boussinesq (u, theta) with buoyancy -P(theta e3); d = 3, n = 4",
            Model::KellerSegel => "parabolic-elliptic Keller-Segel for u = grad phi; d in {1, 2}, n = d",
            Model::Burgers1d => "fractional Burgers u_t + (u^2/2)_x; d = 1, n = 1",
        }
    }

    pub fn dimension_ok(self, dim: usize) -> bool {
        match self {
            Model::NavierStokes | Model::Mhd | Model::Boussinesq => dim == 3,
            Model::KellerSegel => dim == 1 || dim == 2,
            Model::Burgers1d => dim == 1,
        }
    }

    pub fn components(self, dim: usize) -> usize {
        match self {
            Model::NavierStokes => 3,
            Model::Mhd => 6,
            Model::Boussinesq => 4,
            Model::KellerSegel => dim,
            Model::Burgers1d => 1,
        }
    }

    /// Divergence-free component blocks of the model.
    pub fn solenoidal_blocks(self) -> Vec<Range<usize>> {
        match self {
            Model::NavierStokes | Model::Boussinesq => vec![0..3],
            Model::Mhd => vec![0..3, 3..6],
            Model::KellerSegel | Model::Burgers1d => vec![],
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        Model::ALL
            .iter()
            .copied()
            .find(|m| m.name() == key || (key == "burgers" && *m == Model::Burgers1d) || (key == "ns" && *m == Model::NavierStokes))
            .ok_or_else(|| {
                let names: Vec<&str> = Model::ALL.iter().map(|m| m.name()).collect();
                Error::param(format!("unknown preset `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

fn kron(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// `P_im(xi) = delta_im - xi_i xi_m / |xi|^2`.
fn projector_entry(i: usize, m: usize) -> SymbolExpr {
    SymbolExpr::real(kron(i, m)) - SymbolExpr::xi(i) * SymbolExpr::xi(m) / SymbolExpr::norm().pow(2.0)
}

/// `sign * i xi_l P_im(xi)`: contribution of `u_l u_m` to component `i` of `P div(. (x) .)`.
fn transport_symbol(i: usize, l: usize, m: usize, sign: f64) -> SymbolExpr {
    SymbolExpr::Const(Complex64::new(0.0, sign)) * SymbolExpr::xi(l) * projector_entry(i, m)
}

/// `P div(a (x) b)` with `a` in block starting at `a0`, `b` at `b0`, written into block `out0`.
fn push_transport(q: &mut Vec<QTerm>, out0: usize, a0: usize, b0: usize, sign: f64) {
    for i in 0..3 {
        for l in 0..3 {
            for m in 0..3 {
                q.push(QTerm { i: out0 + i, j: a0 + l, k: b0 + m, symbol: transport_symbol(i, l, m, sign) });
            }
        }
    }
}

/// Keller-Segel symbol for component `m` from `u_j u_k`:
/// `-i xi_m xi_j xi_k / |xi|^2 + delta_jk (i/2) xi_m`.
pub(crate) fn keller_segel_symbol(m: usize, j: usize, k: usize) -> SymbolExpr {
    let drift = SymbolExpr::Const(Complex64::new(0.0, -1.0)) * SymbolExpr::xi(m) * SymbolExpr::xi(j) * SymbolExpr::xi(k)
        / SymbolExpr::norm().pow(2.0);
    if j == k {
        drift + SymbolExpr::Const(Complex64::new(0.0, 0.5)) * SymbolExpr::xi(m)
    } else {
        drift
    }
}

/// Applies the Leray projector to a 3- (or d-) component block.
pub fn leray_project(field: &SpectralField, block: Range<usize>) -> Result<SpectralField> {
    let grid = Arc::clone(field.grid());
    let d = grid.dim();
    if block.len() != d || block.end > field.components() {
        return Err(Error::param(format!("projection block {block:?} does not match dimension {d}")));
    }
    let mut out = field.without_nyquist();
    let n = grid.len();
    let src = out.clone();
    for idx in 0..n {
        let p = leray_projector(grid.xi(idx));
        for a in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..d {
                acc += src.component(block.start + b)[idx] * p[(a, b)];
            }
            out.component_mut(block.start + a)[idx] = acc;
        }
    }
    out.set_hermitian(field.is_hermitian());
    Ok(out)
}

/// Builds one of the model systems on `grid` with the given exponents and data.
///
/// The Sobolev index defaults to `d/2 + 1`. Solenoidal blocks of the initial
/// data are Leray-projected.
pub fn build_preset(model: Model, grid: &Arc<FourierGrid>, alpha: Vec<f64>, initial: SpectralField) -> Result<SystemSpec> {
    let d = grid.dim();
    if !model.dimension_ok(d) {
        return Err(Error::param(format!("preset {model} is not defined in dimension {d}")));
    }
    let n = model.components(d);
    if alpha.len() != n || initial.components() != n {
        return Err(Error::param(format!(
            "preset {model} needs {n} components; got {} alpha values and {} data components",
            alpha.len(),
            initial.components()
        )));
    }
    if !initial.grid().as_ref().eq(grid.as_ref()) {
        return Err(Error::GridMismatch);
    }
    let mut q = Vec::new();
    let mut l = Vec::new();
    match model {
        Model::NavierStokes => push_transport(&mut q, 0, 0, 0, 1.0),
        Model::Mhd => {
            push_transport(&mut q, 0, 0, 0, 1.0);
            push_transport(&mut q, 0, 3, 3, -1.0);
            push_transport(&mut q, 3, 3, 0, 1.0);
            push_transport(&mut q, 3, 0, 3, -1.0);
        }
        Model::Boussinesq => {
            push_transport(&mut q, 0, 0, 0, 1.0);
            for i in 0..3 {
                l.push(LTerm { i, j: 3, symbol: -projector_entry(i, 2) });
            }
            for m in 0..3 {
                q.push(QTerm { i: 3, j: 3, k: m, symbol: SymbolExpr::imag_unit() * SymbolExpr::xi(m) });
            }
        }
        Model::KellerSegel => {
            for m in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        q.push(QTerm { i: m, j, k, symbol: keller_segel_symbol(m, j, k) });
                    }
                }
            }
        }
        Model::Burgers1d => {
            q.push(QTerm { i: 0, j: 0, k: 0, symbol: SymbolExpr::Const(Complex64::new(0.0, 0.5)) * SymbolExpr::xi(0) });
        }
    }
    let s = d as f64 / 2.0 + 1.0;
    SystemSpec::new(model.name(), alpha, q, l, initial, s)?.with_solenoidal_blocks(model.solenoidal_blocks())
}
