//! Symbol-level description of the quadratic parabolic system.
//!
//! Evolution convention used throughout the crate:
//!
//! ```text
//! d_t u_i = -|xi|^{alpha_i} u_i - N_i(u),
//! N_i(u)  = sum_{j,k} q_ijk(xi) FT(u_j u_k) + sum_j l_ij(xi) u_j(xi)
//! ```
//!
//! Symbol tables are sparse: any `(i, j, k)` not listed is the zero symbol.
//! Every symbol takes the value 0 at `xi = 0`.

mod presets;
mod symbol;

use std::ops::Range;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use presets::{build_preset, leray_project, Model};
pub use symbol::SymbolExpr;

use crate::error::{Error, Result};
use crate::spectral::{dealiased_physical, product_coefficients, FourierGrid, SpectralField};

/// Entry `q_ijk` of the quadratic symbol table (zero-based indices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTerm {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub symbol: SymbolExpr,
}

/// Entry `l_ij` of the linear symbol table (zero-based indices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LTerm {
    pub i: usize,
    pub j: usize,
    pub symbol: SymbolExpr,
}

/// Result of a sampled homogeneity test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    pub pass: bool,
    /// `max |m(lambda xi) - lambda^order m(xi)| / (1 + |m(xi)|)` over the samples.
    pub max_deviation: f64,
    /// `max |m(xi)|` on the unit-sphere samples.
    pub sphere_bound: f64,
}

/// Scale factors used by [`check_homogeneity`].
pub const HOMOGENEITY_SCALES: [f64; 3] = [0.5, 2.0, 10.0];

/// Checks `m(lambda xi) = lambda^order m(xi)` on seeded unit-sphere samples.
pub fn check_homogeneity(
    symbol: &SymbolExpr,
    dim: usize,
    order: u32,
    sample_count: usize,
    tol: f64,
) -> Result<HomogeneityReport> {
    if order > 1 {
        return Err(Error::param(format!("homogeneity order must be 0 or 1, got {order}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001 + dim as u64);
    let mut max_deviation = 0.0f64;
    let mut sphere_bound = 0.0f64;
    let mut drawn = 0;
    while drawn < sample_count {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(0.1..=1.0).contains(&r) {
            continue;
        }
        drawn += 1;
        let xi: Vec<f64> = v.iter().map(|x| x / r).collect();
        let base = symbol.eval(&xi)?;
        sphere_bound = sphere_bound.max(base.norm());
        for &lambda in &HOMOGENEITY_SCALES {
            let scaled: Vec<f64> = xi.iter().map(|x| x * lambda).collect();
            let value = symbol.eval(&scaled)?;
            let dev = (value - base * lambda.powi(order as i32)).norm() / (1.0 + base.norm());
            max_deviation = max_deviation.max(dev);
        }
    }
    Ok(HomogeneityReport { pass: max_deviation <= tol, max_deviation, sphere_bound })
}

/// `P(xi) = I - xi xi^T / |xi|^2`; the zero matrix at `xi = 0`.
pub fn leray_projector(xi: &[f64]) -> DMatrix<f64> {
    let d = xi.len();
    let r2: f64 = xi.iter().map(|x| x * x).sum();
    if r2 == 0.0 {
        return DMatrix::zeros(d, d);
    }
    DMatrix::from_fn(d, d, |l, m| if l == m { 1.0 } else { 0.0 } - xi[l] * xi[m] / r2)
}

/// Symbol evaluated on every lattice point (0 at `xi = 0`).
fn tabulate(grid: &FourierGrid, symbol: &SymbolExpr) -> Result<Vec<Complex64>> {
    if symbol.required_dim() > grid.dim() {
        return Err(Error::Symbol(format!("`{symbol}` needs dimension {}", symbol.required_dim())));
    }
    (0..grid.len())
        .map(|idx| {
            if grid.xi_norm(idx) == 0.0 {
                Ok(Complex64::new(0.0, 0.0))
            } else {
                symbol.eval(grid.xi(idx))
            }
        })
        .collect()
}

/// A symbol maps real fields to real fields when `m(-xi) = conj m(xi)`.
fn check_real_symbol(grid: &FourierGrid, table: &[Complex64], symbol: &SymbolExpr) -> Result<()> {
    let scale = table.iter().map(|c| c.norm()).fold(1.0, f64::max);
    for idx in 0..grid.len() {
        if grid.is_nyquist(idx) {
            continue;
        }
        let m = grid.mirror_index(idx);
        if (table[m] - table[idx].conj()).norm() > 1e-12 * scale {
            return Err(Error::Symbol(format!(
                "`{symbol}` does not satisfy m(-xi) = conj(m(xi)), so it does not preserve real fields"
            )));
        }
    }
    Ok(())
}

#[derive(Debug)]
struct Tables {
    q: Vec<Vec<Complex64>>,
    l: Vec<Vec<Complex64>>,
    /// Unordered pairs `(j, k)`, `j <= k`, and the q-term indices using each.
    pairs: Vec<((usize, usize), Vec<usize>)>,
}

/// A full instance of the system: component count, diffusion exponents,
/// symbol tables and initial data on a grid.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    name: String,
    alpha: Vec<f64>,
    q: Arc<Vec<QTerm>>,
    l: Arc<Vec<LTerm>>,
    initial: SpectralField,
    sobolev_index: f64,
    solenoidal_blocks: Vec<Range<usize>>,
    tables: Arc<Tables>,
}

impl SystemSpec {
    /// Validates and tabulates a system. Initial data lose their Nyquist planes.
    pub fn new(
        name: impl Into<String>,
        alpha: Vec<f64>,
        q: Vec<QTerm>,
        l: Vec<LTerm>,
        initial: SpectralField,
        sobolev_index: f64,
    ) -> Result<Self> {
        let n = alpha.len();
        if n == 0 {
            return Err(Error::param("a system needs at least one component"));
        }
        if initial.components() != n {
            return Err(Error::param(format!(
                "{} alpha values but initial data with {} components",
                n,
                initial.components()
            )));
        }
        check_alphas(&alpha)?;
        let grid = Arc::clone(initial.grid());
        check_sobolev(sobolev_index, grid.dim())?;
        if !initial.is_hermitian() {
            return Err(Error::NonHermitian);
        }
        for t in q.iter() {
            if t.i >= n || t.j >= n || t.k >= n {
                return Err(Error::param(format!("q term ({}, {}, {}) out of range for n = {n}", t.i, t.j, t.k)));
            }
        }
        for t in l.iter() {
            if t.i >= n || t.j >= n {
                return Err(Error::param(format!("l term ({}, {}) out of range for n = {n}", t.i, t.j)));
            }
        }
        let q_tables = q
            .iter()
            .map(|t| {
                let table = tabulate(&grid, &t.symbol)?;
                check_real_symbol(&grid, &table, &t.symbol)?;
                Ok(table)
            })
            .collect::<Result<Vec<_>>>()?;
        let l_tables = l
            .iter()
            .map(|t| {
                let table = tabulate(&grid, &t.symbol)?;
                check_real_symbol(&grid, &table, &t.symbol)?;
                Ok(table)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut pairs: Vec<((usize, usize), Vec<usize>)> = Vec::new();
        for (idx, t) in q.iter().enumerate() {
            let key = (t.j.min(t.k), t.j.max(t.k));
            match pairs.iter_mut().find(|(k, _)| *k == key) {
                Some((_, list)) => list.push(idx),
                None => pairs.push((key, vec![idx])),
            }
        }
        Ok(SystemSpec {
            name: name.into(),
            alpha,
            q: Arc::new(q),
            l: Arc::new(l),
            initial: initial.without_nyquist(),
            sobolev_index,
            solenoidal_blocks: Vec::new(),
            tables: Arc::new(Tables { q: q_tables, l: l_tables, pairs }),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn grid(&self) -> &Arc<FourierGrid> {
        self.initial.grid()
    }

    pub fn initial(&self) -> &SpectralField {
        &self.initial
    }

    pub fn sobolev_index(&self) -> f64 {
        self.sobolev_index
    }

    pub fn q_terms(&self) -> &[QTerm] {
        &self.q
    }

    pub fn l_terms(&self) -> &[LTerm] {
        &self.l
    }

    /// Component ranges that hold divergence-free vector fields.
    pub fn solenoidal_blocks(&self) -> &[Range<usize>] {
        &self.solenoidal_blocks
    }

    pub fn has_nonlinearity(&self) -> bool {
        !self.q.is_empty() || !self.l.is_empty()
    }

    /// Same symbols and data with new exponents.
    pub fn with_alpha(&self, alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() != self.n() {
            return Err(Error::param(format!("expected {} alpha values, got {}", self.n(), alpha.len())));
        }
        check_alphas(&alpha)?;
        Ok(SystemSpec { alpha, ..self.clone() })
    }

    /// Same symbols with new initial data (Leray-projected on solenoidal blocks).
    pub fn with_initial(&self, initial: SpectralField) -> Result<Self> {
        if initial.components() != self.n() || !initial.grid().as_ref().eq(self.grid().as_ref()) {
            return Err(Error::GridMismatch);
        }
        if !initial.is_hermitian() {
            return Err(Error::NonHermitian);
        }
        let mut data = initial.without_nyquist();
        for block in &self.solenoidal_blocks {
            data = leray_project(&data, block.clone())?;
        }
        Ok(SystemSpec { initial: data, ..self.clone() })
    }

    pub fn with_sobolev_index(&self, s: f64) -> Result<Self> {
        check_sobolev(s, self.grid().dim())?;
        Ok(SystemSpec { sobolev_index: s, ..self.clone() })
    }

    pub(crate) fn with_solenoidal_blocks(mut self, blocks: Vec<Range<usize>>) -> Result<Self> {
        for block in &blocks {
            self.initial = leray_project(&self.initial, block.clone())?;
        }
        self.solenoidal_blocks = blocks;
        Ok(self)
    }

    /// Same equations with every symbol removed (pure fractional heat flow).
    pub fn linear_part(&self) -> Self {
        let mut out = self.clone();
        out.q = Arc::new(Vec::new());
        out.l = Arc::new(Vec::new());
        out.tables = Arc::new(Tables { q: Vec::new(), l: Vec::new(), pairs: Vec::new() });
        out
    }

    /// Largest `|q_ijk|` on the unit sphere, estimated on the lattice as `max |q(xi)| / |xi|`.
    pub fn q_symbol_bound(&self) -> f64 {
        let grid = self.grid();
        self.tables
            .q
            .iter()
            .flat_map(|t| {
                t.iter()
                    .zip(grid.xi_norms())
                    .filter(|(_, &r)| r > 0.0)
                    .map(|(c, &r)| c.norm() / r)
            })
            .fold(0.0, f64::max)
    }
}

fn check_alphas(alpha: &[f64]) -> Result<()> {
    for (i, &a) in alpha.iter().enumerate() {
        if !(a > 1.0 && a.is_finite()) {
            return Err(Error::param(format!(
                "alpha_{} = {a} must exceed 1 (local existence needs alpha_i > 1)",
                i + 1
            )));
        }
    }
    Ok(())
}

fn check_sobolev(s: f64, dim: usize) -> Result<()> {
    if s > dim as f64 / 2.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("Sobolev index s = {s} must exceed d/2 = {}", dim as f64 / 2.0)))
    }
}

/// `N_i(u) = sum_{j,k} q_ijk FT(u_j u_k) + sum_j l_ij u_j` with dealiased products.
pub fn nonlinearity_eval(spec: &SystemSpec, fields: &SpectralField) -> Result<SpectralField> {
    let mut out = SpectralField::zeros(fields.grid(), fields.components());
    nonlinearity_into(spec, fields, &mut out)?;
    Ok(out)
}

pub(crate) fn nonlinearity_into(spec: &SystemSpec, fields: &SpectralField, out: &mut SpectralField) -> Result<()> {
    let grid = spec.grid();
    if fields.components() != spec.n() || !fields.grid().as_ref().eq(grid.as_ref()) {
        return Err(Error::GridMismatch);
    }
    if !fields.is_hermitian() {
        return Err(Error::NonHermitian);
    }
    out.coeffs_mut().iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
    out.set_hermitian(true);
    let n = grid.len();
    let tables = &spec.tables;
    if !tables.pairs.is_empty() {
        let mut buf = Vec::with_capacity(n);
        let mut physical: Vec<Option<Vec<f64>>> = vec![None; spec.n()];
        let mut product = vec![Complex64::new(0.0, 0.0); n];
        for ((j, k), terms) in &tables.pairs {
            for &c in &[*j, *k] {
                if physical[c].is_none() {
                    physical[c] = Some(dealiased_physical(grid, fields.component(c), &mut buf));
                }
            }
            let (pj, pk) = (physical[*j].as_ref().unwrap(), physical[*k].as_ref().unwrap());
            product_coefficients(grid, pj, pk, &mut product);
            for &t in terms {
                let i = spec.q[t].i;
                let table = &tables.q[t];
                for ((o, s), p) in out.component_mut(i).iter_mut().zip(table).zip(&product) {
                    *o += s * p;
                }
            }
        }
    }
    for (t, term) in spec.l.iter().enumerate() {
        let table = &tables.l[t];
        let src = fields.component(term.j).to_vec();
        for ((o, s), u) in out.component_mut(term.i).iter_mut().zip(table).zip(&src) {
            *o += s * u;
        }
    }
    Ok(())
}

/// Bilinear part `B_i(u, v) = sum_{j,k} q_ijk FT(u_j v_k)`, dealiased.
pub fn bilinear_eval(spec: &SystemSpec, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    let grid = spec.grid();
    for f in [u, v] {
        if f.components() != spec.n() || !f.grid().as_ref().eq(grid.as_ref()) {
            return Err(Error::GridMismatch);
        }
        if !f.is_hermitian() {
            return Err(Error::NonHermitian);
        }
    }
    let n = grid.len();
    let mut out = SpectralField::zeros(grid, spec.n());
    let mut buf = Vec::with_capacity(n);
    let mut pu: Vec<Option<Vec<f64>>> = vec![None; spec.n()];
    let mut pv: Vec<Option<Vec<f64>>> = vec![None; spec.n()];
    let mut product = vec![Complex64::new(0.0, 0.0); n];
    for (t, term) in spec.q.iter().enumerate() {
        if pu[term.j].is_none() {
            pu[term.j] = Some(dealiased_physical(grid, u.component(term.j), &mut buf));
        }
        if pv[term.k].is_none() {
            pv[term.k] = Some(dealiased_physical(grid, v.component(term.k), &mut buf));
        }
        product_coefficients(grid, pu[term.j].as_ref().unwrap(), pv[term.k].as_ref().unwrap(), &mut product);
        for ((o, s), p) in out.component_mut(term.i).iter_mut().zip(&spec.tables.q[t]).zip(&product) {
            *o += s * p;
        }
    }
    out.set_hermitian(true);
    Ok(out)
}

/// Linear part `A_i(u) = sum_j l_ij u_j`.
pub fn linear_eval(spec: &SystemSpec, u: &SpectralField) -> Result<SpectralField> {
    if u.components() != spec.n() || !u.grid().as_ref().eq(spec.grid().as_ref()) {
        return Err(Error::GridMismatch);
    }
    let mut out = SpectralField::zeros(spec.grid(), spec.n());
    for (t, term) in spec.l.iter().enumerate() {
        let src = u.component(term.j).to_vec();
        for ((o, s), x) in out.component_mut(term.i).iter_mut().zip(&spec.tables.l[t]).zip(&src) {
            *o += s * x;
        }
    }
    out.set_hermitian(u.is_hermitian());
    Ok(out)
}

/// `max_xi |xi . u_block(xi)| / max_xi |xi| |u_block(xi)|` for a vector block.
pub fn divergence_defect(field: &SpectralField, block: Range<usize>) -> f64 {
    let grid = field.grid();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for idx in 0..grid.len() {
        let xi = grid.xi(idx);
        let mut div = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for (a, c) in block.clone().enumerate() {
            let v = field.component(c)[idx];
            div += v * xi[a];
            mag += v.norm_sqr();
        }
        worst = worst.max(div.norm());
        scale = scale.max(grid.xi_norm(idx) * mag.sqrt());
    }
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}
