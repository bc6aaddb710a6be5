use std::f64::consts::PI;

use approx::assert_relative_eq;
use fraclab::lab::{base_data, run_rate_study, GridConfig, RateStudyConfig};
use fraclab::solver::{
    etd_march, existence_time_alpha, existence_time_classical, existence_time_floor, picard_solve, spec_existence_time,
    SolverConfig, SolverMode,
};
use fraclab::spectral::{norm, FourierGrid, NormKind};
use fraclab::system::{build_preset, divergence_defect, Model};
use proptest::prelude::*;

proptest! {
    #[test]
    fn existence_time_shrinks_with_data(alpha in 1.05f64..3.0, u in 0.01f64..10.0, c in 0.1f64..3.0) {
        let small = existence_time_alpha(&[alpha], &[u], c).unwrap();
        let large = existence_time_alpha(&[alpha], &[2.0 * u], c).unwrap();
        prop_assert!(large <= small);
        prop_assert!(small <= 1.0 / (6.0 * c) * (1.0 + 1e-15));
    }

    #[test]
    fn floor_stays_below_every_admissible_alpha(delta in 0.01f64..0.16, frac in -0.999f64..0.999, beta in 0.1f64..3.0, u in 0.01f64..5.0) {
        let alpha = 2.0 + frac * delta;
        let t0 = existence_time_floor(delta, beta, &[u, 0.5 * u], 1.0).unwrap();
        let ta = existence_time_alpha(&[alpha, alpha], &[u, 0.5 * u], 1.0).unwrap();
        prop_assert!(t0 <= ta);
    }
}

#[test]
fn alpha_two_reduces_to_classical() {
    for u in [0.01, 0.3, 1.0, 7.0] {
        let a = existence_time_alpha(&[2.0, 2.0], &[u, 2.0 * u], 1.0).unwrap();
        let b = existence_time_classical(&[u, 2.0 * u], 1.0).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-14);
    }
}

#[test]
fn keller_segel_and_boussinesq_solve_in_both_modes() {
    let cases = [
        (Model::KellerSegel, FourierGrid::new(2, 16, 2.0 * PI).unwrap(), 1.95),
        (Model::Boussinesq, FourierGrid::new(3, 8, 2.0 * PI).unwrap(), 2.05),
    ];
    for (model, grid, alpha) in cases {
        let n = model.components(grid.dim());
        let s = grid.dim() as f64 / 2.0 + 1.0;
        let data = base_data(&grid, n, &model.solenoidal_blocks(), s, 0.3, 2, 3).unwrap();
        let spec = build_preset(model, &grid, vec![alpha; n], data).unwrap();
        let t = spec_existence_time(&spec, 1.0).unwrap();
        let (p, report) = picard_solve(&spec, t, &SolverConfig { substeps: 64, ..SolverConfig::default() }).unwrap();
        assert!(report.conditions.all_hold(), "{model}: {:?}", report.conditions);
        let e = etd_march(&spec, t, &SolverConfig { mode: SolverMode::EtdMarching, dt: t / 64.0, ..SolverConfig::default() }).unwrap();
        let gap = norm(&p.final_state().sub(e.final_state()).unwrap(), NormKind::Hs { s }).unwrap();
        assert!(gap <= 1e-9 * norm(e.final_state(), NormKind::Hs { s }).unwrap(), "{model}: {gap:e}");
        for b in model.solenoidal_blocks() {
            assert!(p.states().iter().all(|u| divergence_defect(u, b.clone()) < 1e-12));
        }
    }
}

#[test]
fn small_study_recovers_saturated_rate() {
    let cfg = RateStudyConfig {
        grid: GridConfig { dim: 1, modes: 64, length: 2.0 * PI },
        solver: SolverConfig { mode: SolverMode::EtdMarching, dt: 1.0 / 3072.0, ..SolverConfig::default() },
        ..RateStudyConfig::default()
    };
    let r = run_rate_study(&cfg).unwrap();
    let slope = r.slope().unwrap();
    assert!((slope - 1.0).abs() < 0.2, "slope {slope}");
    assert_eq!(r.rows.len(), 6);
    assert!(r.rows.windows(2).all(|w| w[1].gap_weighted_hs < w[0].gap_weighted_hs));
}
