//! CSV, JSON and gnuplot emission.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use fraclab::kernels::GapProfile;
use fraclab::lab::{RateStudyReport, FIT_NAMES};
use serde::Serialize;

use crate::CliError;

fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| io(path, e))?;
    }
    w.flush().map_err(|e| io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io(path, e))
}

fn data_block(name: &str, rows: &[(f64, f64)]) -> String {
    let mut s = format!("${name} << EOD\n");
    for (x, y) in rows {
        let _ = writeln!(s, "{x:e} {y:e}");
    }
    s.push_str("EOD\n");
    s
}

/// One log-log script per fitted distance. Returns the written paths.
pub fn rate_plots(dir: &Path, report: &RateStudyReport) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    if report.rows.is_empty() {
        return Ok(written);
    }
    for (k, name) in FIT_NAMES.iter().enumerate() {
        let points: Vec<(f64, f64)> = report
            .rows
            .iter()
            .map(|r| {
                let y = [r.gap_weighted_hs, r.gap_hs, r.gap_l2, r.gap_linf, r.gap_wsp][k];
                (r.distance, y)
            })
            .filter(|p| p.1 > 0.0)
            .collect();
        if points.is_empty() {
            continue;
        }
        let n = points.len() as f64;
        let x0 = (points.iter().map(|p| p.0.ln()).sum::<f64>() / n).exp();
        let y0 = (points.iter().map(|p| p.1.ln()).sum::<f64>() / n).exp();
        let mut s = String::new();
        let _ = writeln!(s, "# {name} gap against |2 - alpha|, preset {}", report.preset);
        s.push_str("set terminal pngcairo size 800,600\n");
        let _ = writeln!(s, "set output 'rate_{name}.png'");
        s.push_str("set logscale xy\nset key top left\nset xlabel '|2 - alpha|'\n");
        let _ = writeln!(s, "set ylabel '{name} gap'");
        s.push_str(&data_block("gaps", &points));
        let _ = writeln!(s, "ref(x) = {y0:e} * (x / {x0:e})**{}", report.predicted_rate);
        let mut plot = format!(
            "plot $gaps using 1:2 with points pt 7 title 'measured', ref(x) dashtype 2 title 'slope min(beta, 1) = {}'",
            report.predicted_rate
        );
        if let Some(fit) = report.fits[k].fit {
            let _ = writeln!(s, "fit_line(x) = exp({:e}) * x**{:e}", fit.intercept, fit.slope);
            let _ = write!(plot, ", fit_line(x) title 'fit slope {:.3}'", fit.slope);
        }
        s.push_str(&plot);
        s.push('\n');
        let path = dir.join(format!("rate_{name}.gp"));
        fs::write(&path, s).map_err(|e| io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// One profile script per alpha. Returns the written paths.
pub fn kernel_plots(dir: &Path, profiles: &[GapProfile]) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    for p in profiles {
        let pick = |v: &[f64]| -> Vec<(f64, f64)> {
            p.times.iter().zip(v).filter(|(t, g)| **t > 0.0 && **g > 0.0).map(|(t, g)| (*t, *g)).collect()
        };
        let mut s = String::new();
        let _ = writeln!(s, "# weighted kernel gaps for alpha = {}, delta = {}", p.alpha, p.params.delta);
        s.push_str("set terminal pngcairo size 800,600\n");
        let _ = writeln!(s, "set output 'kernel_profile_{}.png'", p.alpha);
        s.push_str("set logscale xy\nset key bottom right\nset xlabel 't'\nset ylabel 'weighted gap'\n");
        s.push_str(&data_block("plain", &pick(&p.weighted_gap)));
        s.push_str(&data_block("gradient", &pick(&p.weighted_gradient_gap)));
        let _ = writeln!(
            s,
            "plot $plain using 1:2 with lines title 't^{{{:.4}}} sup |h_a - h_2|', $gradient using 1:2 with lines title 't^{{{:.4}}} sup |xi| |h_a - h_2|'",
            p.params.eta, p.params.kappa
        );
        let path = dir.join(format!("kernel_profile_{}.gp", p.alpha));
        fs::write(&path, s).map_err(|e| io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
