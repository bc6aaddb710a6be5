//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//! Run with `cargo test -p fraclab-cli --test acceptance` (release is faster:
//! add `--release`).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use fraclab::kernels::{apply_semigroup_components, kernel_rate_check};
use fraclab::lab::{base_data, run_rate_study, RateStudyConfig, RateStudyReport};
use fraclab::solver::{
    etd_march, existence_time_alpha, existence_time_classical, existence_time_floor, picard_solve, spec_existence_time,
    SolutionTrajectory, SolverConfig, SolverMode,
};
use fraclab::spectral::{forward_transform, norm, FourierGrid, NormKind, SpectralField};
use fraclab::system::{build_preset, divergence_defect, leray_projector, Model};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

/// Ordinary least squares slope of `ln y` on `ln x`.
fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::MIN, f64::max);
    let min = v.iter().copied().fold(f64::MAX, f64::min);
    max / min
}

fn kernel_rate() -> Verdict {
    let alphas = [1.85, 1.90, 1.95, 1.99, 2.01, 2.05, 2.10, 2.15];
    let start = Instant::now();
    let r = match kernel_rate_check(&alphas, 0.15, 1.0, 200) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("error: {e}")),
    };
    let secs = start.elapsed().as_secs_f64();
    let dist: Vec<f64> = alphas.iter().map(|a| (2.0 - a).abs()).collect();
    let se = log_slope(&dist, &r.sup_eta);
    let sk = log_slope(&dist, &r.sup_kappa);
    let ratio_e: Vec<f64> = r.sup_eta.iter().zip(&dist).map(|(s, d)| s / d).collect();
    let ratio_k: Vec<f64> = r.sup_kappa.iter().zip(&dist).map(|(s, d)| s / d).collect();
    let (pe, pk) = (spread(&ratio_e), spread(&ratio_k));
    let ok = (0.9..=1.1).contains(&se) && (0.9..=1.1).contains(&sk) && pe < 10.0 && pk < 10.0 && secs < 10.0;
    verdict(
        ok,
        format!("slopes eta {se:.4}, kappa {sk:.4} in [0.9, 1.1]; spreads {pe:.3}, {pk:.3} < 10; {secs:.2} s < 10 s"),
    )
}

fn study(beta: f64, c: f64) -> Result<(RateStudyReport, f64), String> {
    let cfg = RateStudyConfig { beta: vec![beta], c, ..RateStudyConfig::default() };
    let start = Instant::now();
    let r = run_rate_study(&cfg).map_err(|e| e.to_string())?;
    Ok((r, start.elapsed().as_secs_f64()))
}

fn primary_slope(r: &RateStudyReport) -> Option<f64> {
    r.fit("weighted_hs").and_then(|f| f.slope())
}

fn rate_saturation(a: &Result<(RateStudyReport, f64), String>, b: &Result<(RateStudyReport, f64), String>) -> Verdict {
    let (ra, ta) = match a {
        Ok(x) => x,
        Err(e) => return verdict(false, format!("study A error: {e}")),
    };
    let (rb, tb) = match b {
        Ok(x) => x,
        Err(e) => return verdict(false, format!("study B error: {e}")),
    };
    let (Some(sa), Some(sb)) = (primary_slope(ra), primary_slope(rb)) else {
        return verdict(false, "a primary fit is missing".into());
    };
    let ok = (sa - 0.5).abs() <= 0.15 && (sb - 1.0).abs() <= 0.2 && *ta < 300.0 && *tb < 300.0;
    verdict(
        ok,
        format!("beta 0.5: slope {sa:.4} (0.5 +- 0.15), {ta:.1} s; beta 2: slope {sb:.4} (1.0 +- 0.2), {tb:.1} s"),
    )
}

fn corollary_norms(b: &Result<(RateStudyReport, f64), String>) -> Verdict {
    let (r, _) = match b {
        Ok(x) => x,
        Err(e) => return verdict(false, format!("study B error: {e}")),
    };
    let Some(hs) = r.fit("hs").and_then(|f| f.slope()) else {
        return verdict(false, "no Hs fit".into());
    };
    let mut ok = true;
    let mut parts = vec![format!("Hs {hs:.4}")];
    for name in ["l2", "linf", "wsp"] {
        match r.fit(name).and_then(|f| f.slope()) {
            Some(s) => {
                ok &= (s - hs).abs() <= 0.2;
                parts.push(format!("{name} {s:.4}"));
            }
            None => {
                ok = false;
                parts.push(format!("{name} missing"));
            }
        }
    }
    verdict(ok, format!("{} (each within 0.2 of Hs)", parts.join(", ")))
}

fn hs_of(f: &SpectralField, s: f64) -> f64 {
    norm(f, NormKind::Hs { s }).unwrap()
}

fn max_relative_gap(a: &SolutionTrajectory, b: &SolutionTrajectory, s: f64) -> f64 {
    let scale = b.states().iter().map(|u| hs_of(u, s)).fold(0.0, f64::max);
    a.states().iter().zip(b.states()).map(|(x, y)| hs_of(&x.sub(y).unwrap(), s)).fold(0.0, f64::max) / scale
}

fn burgers(grid: &Arc<FourierGrid>, alpha: f64, size: f64, seed: u64) -> fraclab::system::SystemSpec {
    let data = base_data(grid, 1, &[], 1.5, size, 4, seed).unwrap();
    build_preset(Model::Burgers1d, grid, vec![alpha], data).unwrap()
}

fn picard_fidelity() -> Verdict {
    let grid = FourierGrid::new(1, 256, 2.0 * PI).unwrap();
    let mut worst_gap = 0.0f64;
    let mut worst_margin = f64::NEG_INFINITY;
    let mut checked = 0;
    for (k, (&alpha, &size)) in [1.9, 1.97, 2.0, 2.05].iter().zip(&[0.025, 0.1, 0.05, 0.2]).enumerate() {
        let spec = burgers(&grid, alpha, size, 100 + k as u64);
        let t = spec_existence_time(&spec, 1.0).unwrap();
        let picard_cfg = SolverConfig { picard_tol: 1e-13, ..SolverConfig::default() };
        let etd_cfg = SolverConfig { mode: SolverMode::EtdMarching, dt: t / 512.0, ..SolverConfig::default() };
        let (p, report) = match picard_solve(&spec, t, &picard_cfg) {
            Ok(x) => x,
            Err(e) => return verdict(false, format!("alpha {alpha}: {e}")),
        };
        let e = etd_march(&spec, t, &etd_cfg).unwrap();
        if e.len() != 513 {
            return verdict(false, format!("ETD used {} nodes instead of 513", e.len()));
        }
        worst_gap = worst_gap.max(max_relative_gap(&p, &e, 1.5));
        let geometric = report.differences.windows(2).all(|w| w[1] < w[0] || w[1] < 1e-15);
        if !geometric {
            return verdict(false, format!("alpha {alpha}: differences not decreasing {:?}", report.differences));
        }
        if report.conditions.all_hold() {
            let floor = 1e-12 * p.sup_norm(1.5).unwrap();
            worst_margin = worst_margin.max(report.max_ratio_above(floor) - (report.conditions.bound + 0.1));
            checked += 1;
        }
    }
    let ok = worst_gap <= 1e-6 && worst_margin <= 0.0 && checked > 0;
    verdict(
        ok,
        format!(
            "max relative Hs gap {worst_gap:.2e} <= 1e-6; worst ratio - (bound + 0.1) = {worst_margin:.3} <= 0 on {checked} cases"
        ),
    )
}

fn linear_exactness() -> Verdict {
    let mut worst = 0.0f64;
    let cases: Vec<(Arc<FourierGrid>, Model, Vec<f64>)> = vec![
        (FourierGrid::new(1, 64, 2.0 * PI).unwrap(), Model::Burgers1d, vec![1.87]),
        (FourierGrid::new(2, 16, 3.0).unwrap(), Model::KellerSegel, vec![1.9, 2.08]),
        (FourierGrid::new(3, 8, 2.0 * PI).unwrap(), Model::Boussinesq, vec![1.95, 2.0, 2.05, 1.99]),
    ];
    for (k, (grid, model, alpha)) in cases.into_iter().enumerate() {
        let n = model.components(grid.dim());
        let s = grid.dim() as f64 / 2.0 + 1.0;
        let data = base_data(&grid, n, &model.solenoidal_blocks(), s, 3.0, 2, 7 + k as u64).unwrap();
        let spec = build_preset(model, &grid, alpha.clone(), data).unwrap().linear_part();
        let t = 0.7;
        let pc = SolverConfig { substeps: 50, enforce_existence: false, ..SolverConfig::default() };
        let ec = SolverConfig { mode: SolverMode::EtdMarching, dt: t / 37.0, ..pc.clone() };
        for traj in [picard_solve(&spec, t, &pc).map(|x| x.0), etd_march(&spec, t, &ec)] {
            let traj = match traj {
                Ok(x) => x,
                Err(e) => return verdict(false, format!("{model}: {e}")),
            };
            for (tm, u) in traj.times().iter().zip(traj.states()) {
                let exact = apply_semigroup_components(spec.initial(), &alpha, *tm);
                let scale = hs_of(&exact, s).max(f64::MIN_POSITIVE);
                worst = worst.max(hs_of(&u.sub(&exact).unwrap(), s) / scale);
            }
        }
    }
    verdict(worst <= 1e-14, format!("max relative Hs error {worst:.2e} <= 1e-14 (Picard and ETD, d = 1, 2, 3)"))
}

fn structure_preservation() -> Verdict {
    let grid = FourierGrid::new(3, 16, 2.0 * PI).unwrap();
    let mut worst = 0.0f64;
    for (model, alpha) in [(Model::NavierStokes, 1.93), (Model::Mhd, 2.04)] {
        let n = model.components(3);
        let blocks = model.solenoidal_blocks();
        let data = base_data(&grid, n, &blocks, 2.5, 0.5, 3, 11).unwrap();
        let spec = build_preset(model, &grid, vec![alpha; n], data).unwrap();
        let t = spec_existence_time(&spec, 1.0).unwrap();
        let cfg = SolverConfig { substeps: 32, ..SolverConfig::default() };
        let traj = match picard_solve(&spec, t, &cfg) {
            Ok((x, _)) => x,
            Err(e) => return verdict(false, format!("{model}: {e}")),
        };
        for u in traj.states() {
            for b in &blocks {
                worst = worst.max(divergence_defect(u, b.clone()));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut proj = 0.0f64;
    for k in 0..1000 {
        let d = 2 + k % 2;
        let mag = 10f64.powf(rng.random_range(-3.0..3.0));
        let xi: Vec<f64> = (0..d).map(|_| mag * rng.random_range(-1.0..1.0)).collect();
        let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let p = leray_projector(&xi);
        let idem = (&p * &p - &p).amax();
        let kill = (0..d).map(|l| (0..d).map(|m| p[(l, m)] * xi[m]).sum::<f64>().abs()).fold(0.0, f64::max) / r;
        proj = proj.max(idem).max(kill);
    }
    verdict(
        worst <= 1e-12 && proj <= 1e-14,
        format!("NS/MHD divergence defect {worst:.2e} <= 1e-12; projector P^2 = P, P xi = 0 defect {proj:.2e} <= 1e-14"),
    )
}

fn existence_times() -> Verdict {
    let alphas: Vec<f64> = (0..=20).filter(|&k| k != 10).map(|k| (190 + k) as f64 / 100.0).collect();
    let mut parts = Vec::new();
    let mut ok = true;
    for norms in [vec![1.0], vec![0.5, 1.0, 2.0]] {
        let n = norms.len();
        let t2 = existence_time_classical(&norms, 1.0).unwrap();
        let ta: Vec<f64> = alphas.iter().map(|&a| existence_time_alpha(&vec![a; n], &norms, 1.0).unwrap()).collect();
        let dist: Vec<f64> = alphas.iter().map(|a| (2.0 - a).abs()).collect();
        let gaps: Vec<f64> = ta.iter().map(|t| (t - t2).abs()).collect();
        let slope = log_slope(&dist, &gaps);
        ok &= (0.8..=1.2).contains(&slope);
        let mut floor_ok = true;
        for beta in [0.5, 1.0, 2.0] {
            let t0 = existence_time_floor(0.1, beta, &norms, 1.0).unwrap();
            floor_ok &= ta.iter().all(|&t| t0 <= t);
        }
        ok &= floor_ok;
        parts.push(format!("n = {n}: slope {slope:.4}, T_0 <= T_alpha {floor_ok}"));
    }
    verdict(ok, format!("{} (slope in [0.8, 1.2], delta = 0.1)", parts.join("; ")))
}

/// Direct O(N^{2d}) transform with wavenumbers `j` for `j < N/2`, else `j - N`.
fn dft(samples: &[f64], d: usize, n: usize) -> Vec<(Vec<i64>, f64, f64)> {
    let total = n.pow(d as u32);
    let axes = |idx: usize| -> Vec<usize> {
        let mut out = vec![0; d];
        let mut r = idx;
        for a in (0..d).rev() {
            out[a] = r % n;
            r /= n;
        }
        out
    };
    (0..total)
        .map(|ki| {
            let k: Vec<i64> = axes(ki).iter().map(|&j| if j < n / 2 { j as i64 } else { j as i64 - n as i64 }).collect();
            let (mut re, mut im) = (0.0, 0.0);
            for (xi, &u) in samples.iter().enumerate() {
                let x = axes(xi);
                let phase: f64 = -2.0 * PI * k.iter().zip(&x).map(|(&kk, &xx)| kk as f64 * xx as f64).sum::<f64>() / n as f64;
                re += u * phase.cos();
                im += u * phase.sin();
            }
            (k, re / total as f64, im / total as f64)
        })
        .collect()
}

fn inverse_weighted(modes: &[(Vec<i64>, f64, f64)], weight: impl Fn(&[i64]) -> f64, d: usize, n: usize) -> Vec<f64> {
    let total = n.pow(d as u32);
    (0..total)
        .map(|xi| {
            let mut x = vec![0usize; d];
            let mut r = xi;
            for a in (0..d).rev() {
                x[a] = r % n;
                r /= n;
            }
            modes
                .iter()
                .map(|(k, re, im)| {
                    let phase: f64 = 2.0 * PI * k.iter().zip(&x).map(|(&kk, &xx)| kk as f64 * xx as f64).sum::<f64>() / n as f64;
                    weight(k) * (re * phase.cos() - im * phase.sin())
                })
                .sum()
        })
        .collect()
}

fn lp(values: &[f64], p: f64, cell: f64) -> f64 {
    if p.is_infinite() {
        values.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else {
        (values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * cell).powf(1.0 / p)
    }
}

fn norm_oracle() -> Verdict {
    let n = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for f in 0..100 {
        let d = 1 + f % 3;
        let length = rng.random_range(0.5..7.0);
        let comps = 1 + f % 2;
        let grid = FourierGrid::new(d, n, length).unwrap();
        let total = n.pow(d as u32);
        let samples: Vec<f64> = (0..comps * total).map(|_| rng.random_range(-1.0..1.0)).collect();
        let field = forward_transform(&samples, &grid).unwrap();
        let cell = (length / n as f64).powi(d as i32);
        let step = 2.0 * PI / length;
        let xi2 = |k: &[i64]| k.iter().map(|&v| (v as f64 * step).powi(2)).sum::<f64>();
        let s = rng.random_range(0.0..3.0);
        let sigma = rng.random_range(0.2..2.0);
        let mut expect: BTreeMap<&str, f64> = BTreeMap::new();
        for c in 0..comps {
            let u = &samples[c * total..(c + 1) * total];
            let modes = dft(u, d, n);
            let hs: f64 = modes.iter().map(|(k, re, im)| (1.0 + xi2(k)).powf(s) * (re * re + im * im)).sum::<f64>();
            *expect.entry("hs").or_default() += (hs * length.powi(d as i32)).sqrt();
            for (name, p) in [("l2", 2.0), ("l3", 3.0), ("l4", 4.0), ("linf", f64::INFINITY)] {
                *expect.entry(name).or_default() += lp(u, p, cell);
            }
            let w = inverse_weighted(&modes, |k| xi2(k).sqrt().powf(sigma), d, n);
            *expect.entry("wsp2").or_default() += lp(&w, 2.0, cell);
            *expect.entry("wsp4").or_default() += lp(&w, 4.0, cell);
        }
        let kinds = [
            ("hs", NormKind::Hs { s }),
            ("l2", NormKind::Lp { p: 2.0 }),
            ("l3", NormKind::Lp { p: 3.0 }),
            ("l4", NormKind::Lp { p: 4.0 }),
            ("linf", NormKind::Lp { p: f64::INFINITY }),
            ("wsp2", NormKind::HomWsp { sigma, p: 2.0 }),
            ("wsp4", NormKind::HomWsp { sigma, p: 4.0 }),
        ];
        for (name, kind) in kinds {
            let got = norm(&field, kind).unwrap();
            worst = worst.max((got - expect[name]).abs() / expect[name]);
        }
    }
    verdict(worst <= 1e-12, format!("max relative error {worst:.2e} <= 1e-12 over 100 fields (Hs, L^p, W^(sigma,p))"))
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        out.insert(p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap());
    }
    out
}

fn determinism() -> Verdict {
    let root = tempfile::tempdir().unwrap();
    let config = root.path().join("run.toml");
    fs::write(&config, "[solve]\ndump_nodes = [0, 128]\n[solve.solver]\nsubsteps = 256\n").unwrap();
    let mut details = Vec::new();
    let mut ok = true;
    for cmd in ["kernel-verify", "existence-time", "solve", "rate-study", "presets"] {
        let mut snaps = Vec::new();
        for run in 0..2 {
            let out = root.path().join(format!("{cmd}-{run}"));
            let status = Command::new(env!("CARGO_BIN_EXE_fraclab"))
                .args([cmd, "--workers", "1", "--plots", "--config"])
                .arg(&config)
                .arg("--out")
                .arg(&out)
                .env_remove("FRACLAB_TIMING")
                .output()
                .unwrap();
            if !status.status.success() {
                return verdict(false, format!("{cmd} exited with {:?}", status.status.code()));
            }
            snaps.push(snapshot(&out));
        }
        let same = snaps[0] == snaps[1];
        ok &= same && !snaps[0].is_empty();
        details.push(format!("{cmd} {} files {}", snaps[0].len(), if same { "identical" } else { "DIFFER" }));
    }
    verdict(ok, details.join("; "))
}

fn main() {
    let study_a = study(0.5, 0.05);
    let study_b = study(2.0, 0.005);
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict + '_>)> = vec![
        ("kernel linear rate", Box::new(kernel_rate)),
        ("rate saturation", Box::new(|| rate_saturation(&study_a, &study_b))),
        ("corollary norms", Box::new(|| corollary_norms(&study_b))),
        ("Picard fidelity", Box::new(picard_fidelity)),
        ("linear exactness", Box::new(linear_exactness)),
        ("structure preservation", Box::new(structure_preservation)),
        ("existence times", Box::new(existence_times)),
        ("norm oracle", Box::new(norm_oracle)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!("{} [{}] {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
