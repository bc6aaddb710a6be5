use std::f64::consts::PI;

use fraclab::lab::{base_data, fit_rate, run_rate_study, weighted_sup_distance, GridConfig, RateStudyConfig};
use fraclab::solver::{etd_march, SolverConfig, SolverMode};
use fraclab::spectral::FourierGrid;
use fraclab::system::{build_preset, Model};

fn study(beta: f64, c: f64, length: f64) -> RateStudyConfig {
    RateStudyConfig {
        grid: GridConfig { dim: 1, modes: 64, length },
        beta: vec![beta],
        c,
        solver: SolverConfig { mode: SolverMode::EtdMarching, dt: 1.0 / 3072.0, ..SolverConfig::default() },
        ..RateStudyConfig::default()
    }
}

#[test]
fn weighted_distance_is_a_metric_on_runs() {
    let grid = FourierGrid::new(1, 64, 2.0 * PI).unwrap();
    let data = base_data(&grid, 1, &[], 1.5, 0.3, 4, 9).unwrap();
    let cfg = SolverConfig { mode: SolverMode::EtdMarching, dt: 0.01 / 64.0, ..SolverConfig::default() };
    let runs: Vec<_> = [1.9, 1.95, 2.0]
        .iter()
        .map(|&a| etd_march(&build_preset(Model::Burgers1d, &grid, vec![a], data.clone()).unwrap(), 0.01, &cfg).unwrap())
        .collect();
    let eta = 0.43;
    let d = |i: usize, j: usize| weighted_sup_distance(&runs[i], &runs[j], eta, 1.5).unwrap();
    assert_eq!(d(0, 0), 0.0);
    assert_eq!(d(0, 2), d(2, 0));
    assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-15);
    assert!(d(1, 2) < d(0, 2));
}

#[test]
fn saturation_is_visible_for_large_beta() {
    for beta in [1.5, 2.0, 3.0] {
        let r = run_rate_study(&study(beta, 0.005, 2.0 * PI)).unwrap();
        let slope = r.slope().unwrap();
        assert!(slope < beta, "beta {beta}: slope {slope}");
        assert!(r.monotone_tail);
    }
}

#[test]
fn small_beta_is_tracked_with_a_bias_that_vanishes_towards_two() {
    for (beta, c) in [(0.5, 0.05), (0.75, 0.05)] {
        let r = run_rate_study(&study(beta, c, 2.0 * PI)).unwrap();
        let full = r.slope().unwrap();
        let n = r.rows.len();
        let tail = &r.rows[n - 3..];
        let (tail_fit, _) = fit_rate(
            &tail.iter().map(|x| x.alpha).collect::<Vec<_>>(),
            &tail.iter().map(|x| x.gap_weighted_hs).collect::<Vec<_>>(),
            0.0,
        )
        .unwrap();
        println!("beta {beta}: full {full:.4}, closest three {:.4}", tail_fit.slope);
        assert!((full - beta).abs() < 0.05, "beta {beta}: {full}");
        assert!(full > beta && tail_fit.slope > beta - 0.01);
        assert!(tail_fit.slope - beta < full - beta);
    }
}

#[test]
fn slope_is_insensitive_to_the_box_length() {
    let slopes: Vec<f64> = [PI, 2.0 * PI, 4.0 * PI].iter().map(|&l| run_rate_study(&study(2.0, 0.005, l)).unwrap().slope().unwrap()).collect();
    for s in &slopes {
        assert!((s - 1.0).abs() < 0.2, "{slopes:?}");
    }
}
