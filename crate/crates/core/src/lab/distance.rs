use crate::error::{Error, Result};
use crate::solver::SolutionTrajectory;
use crate::spectral::{norm, NormKind};

/// Index pairs of the nodes two trajectories share (times equal to 1e-12 relative).
pub fn common_nodes(a: &SolutionTrajectory, b: &SolutionTrajectory) -> Vec<(usize, usize)> {
    let scale = a.horizon().max(b.horizon());
    let tol = 1e-12 * scale;
    let (ta, tb) = (a.times(), b.times());
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < ta.len() && j < tb.len() {
        if (ta[i] - tb[j]).abs() <= tol {
            out.push((i, j));
            i += 1;
            j += 1;
        } else if ta[i] < tb[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

fn shared(a: &SolutionTrajectory, b: &SolutionTrajectory) -> Result<Vec<(usize, usize)>> {
    if !a.grid().as_ref().eq(b.grid().as_ref()) || a.states()[0].components() != b.states()[0].components() {
        return Err(Error::GridMismatch);
    }
    let nodes = common_nodes(a, b);
    if nodes.len() < 2 {
        return Err(Error::param("trajectories share no time node besides t = 0"));
    }
    Ok(nodes)
}

/// `max_t sum_i t^eta |a_i(t) - b_i(t)|_{H^s}` over shared nodes.
pub fn weighted_sup_distance(a: &SolutionTrajectory, b: &SolutionTrajectory, eta: f64, s: f64) -> Result<f64> {
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::param(format!("weight exponent eta = {eta} must be nonnegative")));
    }
    let mut best = 0.0f64;
    for (i, j) in shared(a, b)? {
        let t = a.times()[i];
        if t == 0.0 && eta > 0.0 {
            continue;
        }
        let d = norm(&a.states()[i].sub(&b.states()[j])?, NormKind::Hs { s })?;
        best = best.max(t.powf(eta) * d);
    }
    Ok(best)
}

/// Checks a norm against the ranges of the corollary estimates for Sobolev index `s`.
pub fn check_corollary_norm(kind: NormKind, s: f64) -> Result<()> {
    kind.validate()?;
    match kind {
        NormKind::Hs { .. } | NormKind::Lp { .. } => Ok(()),
        NormKind::HomWsp { sigma, .. } if sigma < s => Ok(()),
        NormKind::HomWsp { sigma, .. } => {
            Err(Error::param(format!("W^(sigma,p) distance needs 0 < sigma < s = {s}, got sigma = {sigma}")))
        }
    }
}

/// `sup_{t in [eps, T]} sum_i |a_i(t) - b_i(t)|` in the chosen norm over shared nodes.
pub fn epsilon_window_distance(a: &SolutionTrajectory, b: &SolutionTrajectory, eps: f64, kind: NormKind) -> Result<f64> {
    check_corollary_norm(kind, a.meta().sobolev_index)?;
    let horizon = a.horizon().min(b.horizon());
    if !(eps > 0.0 && eps < horizon) {
        return Err(Error::param(format!("window start eps = {eps} must lie in (0, {horizon})")));
    }
    let mut best = 0.0f64;
    let mut any = false;
    for (i, j) in shared(a, b)? {
        if a.times()[i] < eps * (1.0 - 1e-12) {
            continue;
        }
        any = true;
        best = best.max(norm(&a.states()[i].sub(&b.states()[j])?, kind)?);
    }
    if !any {
        return Err(Error::param(format!("no shared node in [{eps}, {horizon}]")));
    }
    Ok(best)
}
