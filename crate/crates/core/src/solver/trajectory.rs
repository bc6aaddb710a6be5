use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{component_norms, dealiased_product, norm, FourierGrid, NormKind, SpectralField};

/// Identifies the spec and configuration a trajectory came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub system: String,
    pub alpha: Vec<f64>,
    pub sobolev_index: f64,
    pub spec_hash: u64,
    pub config_hash: u64,
}

/// States of a solution at the nodes of a uniform time grid.
#[derive(Debug, Clone)]
pub struct SolutionTrajectory {
    times: Vec<f64>,
    states: Vec<SpectralField>,
    meta: TrajectoryMeta,
}

/// One row of the per-(time, component) norm export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub time: f64,
    pub component: usize,
    pub hs: f64,
    pub l2: f64,
}

/// Header of a binary coefficient dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DumpHeader {
    pub dim: u64,
    pub modes: u64,
    pub components: u64,
    pub length: f64,
    pub time: f64,
}

impl SolutionTrajectory {
    pub fn new(times: Vec<f64>, states: Vec<SpectralField>, meta: TrajectoryMeta) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() {
            return Err(Error::ShapeMismatch { expected: times.len(), got: states.len() });
        }
        if times[0] != 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("trajectory times must start at 0 and increase strictly"));
        }
        if let Some(m) = states.iter().position(|s| !s.is_finite()) {
            return Err(Error::BlowUp { step: m, time: times[m] });
        }
        Ok(SolutionTrajectory { times, states, meta })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[SpectralField] {
        &self.states
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn grid(&self) -> &Arc<FourierGrid> {
        self.states[0].grid()
    }

    pub fn final_state(&self) -> &SpectralField {
        &self.states[self.states.len() - 1]
    }

    /// `sup_t sum_i |u_i(t)|_{H^s}`.
    pub fn sup_norm(&self, s: f64) -> Result<f64> {
        let mut best = 0.0f64;
        for x in &self.states {
            best = best.max(norm(x, NormKind::Hs { s })?);
        }
        Ok(best)
    }

    /// Every `stride`-th node plus the last one.
    pub fn subsample(&self, stride: usize) -> SolutionTrajectory {
        let stride = stride.max(1);
        let last = self.times.len() - 1;
        let keep: Vec<usize> = (0..=last).filter(|m| m % stride == 0 || *m == last).collect();
        SolutionTrajectory {
            times: keep.iter().map(|&m| self.times[m]).collect(),
            states: keep.iter().map(|&m| self.states[m].clone()).collect(),
            meta: self.meta.clone(),
        }
    }

    /// Hs and L2 norms of every component at every node.
    pub fn norm_records(&self) -> Result<Vec<NormRecord>> {
        let s = self.meta.sobolev_index;
        let mut out = Vec::with_capacity(self.len() * self.states[0].components());
        for (t, x) in self.times.iter().zip(&self.states) {
            let hs = component_norms(x, NormKind::Hs { s })?;
            let l2 = component_norms(x, NormKind::Lp { p: 2.0 })?;
            for (i, (h, l)) in hs.into_iter().zip(l2).enumerate() {
                out.push(NormRecord { time: *t, component: i, hs: h, l2: l });
            }
        }
        Ok(out)
    }

    /// Writes `time,component,hs,l2` rows.
    pub fn write_norms_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "time,component,hs,l2").map_err(io_err)?;
        for r in self.norm_records()? {
            writeln!(w, "{:e},{},{:e},{:e}", r.time, r.component, r.hs, r.l2).map_err(io_err)?;
        }
        Ok(())
    }

    /// Binary dump of the state at node `index`.
    ///
    /// Layout, little-endian: `u64 d, u64 N, u64 n, f64 L, f64 t`, then for each
    /// component the `N^d` coefficients in row-major lattice order (FFT
    /// ordering on every axis) as `(re, im)` `f64` pairs.
    pub fn write_dump<W: Write>(&self, index: usize, mut w: W) -> Result<()> {
        let state = self
            .states
            .get(index)
            .ok_or_else(|| Error::param(format!("node {index} out of range ({} nodes)", self.len())))?;
        let g = state.grid();
        let mut bytes = Vec::with_capacity(40 + 16 * state.coeffs().len());
        bytes.extend_from_slice(&(g.dim() as u64).to_le_bytes());
        bytes.extend_from_slice(&(g.modes() as u64).to_le_bytes());
        bytes.extend_from_slice(&(state.components() as u64).to_le_bytes());
        bytes.extend_from_slice(&g.length().to_le_bytes());
        bytes.extend_from_slice(&self.times[index].to_le_bytes());
        for c in state.coeffs() {
            bytes.extend_from_slice(&c.re.to_le_bytes());
            bytes.extend_from_slice(&c.im.to_le_bytes());
        }
        w.write_all(&bytes).map_err(io_err)
    }
}

/// Reads a dump written by [`SolutionTrajectory::write_dump`].
pub fn read_dump<R: Read>(mut r: R) -> Result<(DumpHeader, SpectralField)> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(io_err)?;
    if bytes.len() < 40 {
        return Err(Error::param("dump shorter than its header"));
    }
    let word = |k: usize| -> [u8; 8] { bytes[8 * k..8 * k + 8].try_into().unwrap() };
    let header = DumpHeader {
        dim: u64::from_le_bytes(word(0)),
        modes: u64::from_le_bytes(word(1)),
        components: u64::from_le_bytes(word(2)),
        length: f64::from_le_bytes(word(3)),
        time: f64::from_le_bytes(word(4)),
    };
    let grid = FourierGrid::new(header.dim as usize, header.modes as usize, header.length)?;
    let count = grid.len() * header.components as usize;
    if bytes.len() != 40 + 16 * count {
        return Err(Error::ShapeMismatch { expected: 40 + 16 * count, got: bytes.len() });
    }
    let coeffs = (0..count)
        .map(|m| Complex64::new(f64::from_le_bytes(word(5 + 2 * m)), f64::from_le_bytes(word(6 + 2 * m))))
        .collect();
    let field = SpectralField::from_coeffs(&grid, header.components as usize, coeffs)?;
    Ok((header, field))
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

/// `max_t max_{j <= k} |u_j u_k (t)|_{H^s}` with dealiased products.
pub fn uniform_product_bound(trajectory: &SolutionTrajectory, s: f64) -> Result<f64> {
    NormKind::Hs { s }.validate()?;
    let mut best = 0.0f64;
    for x in trajectory.states() {
        let n = x.components();
        let parts: Vec<SpectralField> = (0..n).map(|i| x.extract(i)).collect();
        for j in 0..n {
            for k in j..n {
                let p = dealiased_product(&parts[j], &parts[k])?;
                best = best.max(norm(&p, NormKind::Hs { s })?);
            }
        }
    }
    Ok(best)
}
