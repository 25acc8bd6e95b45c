use piep::config::parse_config;
use piep::{
    run_scenario, sweep_perturbation_length, sweep_period_length, transmission, ScenarioConfig,
};

const GROWTH: &str = include_str!("../../../configs/periodic_growth.conf");
const LENGTH: &str = include_str!("../../../configs/length_sweep.conf");

fn scenario(text: &str) -> ScenarioConfig {
    parse_config(text).unwrap().scenario(false).unwrap()
}

#[test]
fn windows_drain_energy_and_gaps_refill_it() {
    let sc = scenario(GROWTH);
    let run = run_scenario(&sc).unwrap();
    let t = &run.trajectory;
    let at = |z: f64| t.energies[t.index_of(z).unwrap()];
    let windows: Vec<(f64, f64)> = sc.schedule.windows().collect();
    assert_eq!(windows.len(), 9);
    for (a, b) in &windows {
        assert!(at(*a) >= at(*b), "window at {a}");
    }
    for pair in windows.windows(2) {
        assert!(at(pair[1].0) > at(pair[0].1));
    }
    assert!(transmission(t).unwrap() > 1.0);
}

#[test]
fn eigenmodes_decay_at_both_couplings() {
    let run = run_scenario(&scenario(GROWTH)).unwrap();
    for s in &run.eigen {
        assert!((s.im_e1 - 5e-3).abs() < 1e-15 && (s.im_e2 - 5e-3).abs() < 1e-15);
    }
    let inside: Vec<f64> = run.eigen.iter().map(|s| s.re_de).collect();
    let big = 2.0 * (3.0f64 * 2.5e-3).sqrt();
    assert!(inside.iter().any(|&d| (d - big).abs() < 1e-12));
    assert!(inside.iter().any(|&d| (d - 0.01).abs() < 1e-12));
}

#[test]
fn length_sweep_baseline_is_unity() {
    let text = LENGTH.replace("kappa2_in = 4", "kappa2_in = 1.01");
    let cfg = parse_config(&text).unwrap();
    let sc = cfg.scenario(false).unwrap();
    let rows = sweep_perturbation_length(&sc, &cfg.dz_grid(&sc).unwrap()).unwrap();
    assert_eq!(rows.len(), 200);
    for r in rows {
        assert!((r.ratio - 1.0).abs() < 1e-12);
        assert!(r.log10_ratio.abs() < 1e-12);
    }
}

#[test]
fn grid_baseline_is_unity() {
    let text = LENGTH.replace("kappa2_in = 4", "kappa2_in = 1.01");
    let cfg = parse_config(&text).unwrap();
    let sc = cfg.scenario(false).unwrap();
    let rows = sweep_period_length(&sc, &[0.5, 0.9, 1.3], &cfg.dz_grid(&sc).unwrap()).unwrap();
    for r in rows {
        assert!((r.ratio - 1.0).abs() < 1e-12);
    }
}

#[test]
fn smallest_window_is_nearly_neutral() {
    let cfg = parse_config(LENGTH).unwrap();
    let sc = cfg.scenario(false).unwrap();
    let rows = sweep_period_length(&sc, &[0.5, 1.0, 1.5], &[1e-6]).unwrap();
    for r in rows {
        assert!(r.log10_ratio.abs() < 1e-4, "{r:?}");
    }
}

#[test]
fn sweep_cells_are_pure() {
    let cfg = parse_config(LENGTH).unwrap();
    let sc = cfg.scenario(false).unwrap();
    let grid = cfg.dz_grid(&sc).unwrap();
    let a = sweep_perturbation_length(&sc, &grid).unwrap();
    let shuffled: Vec<f64> = grid.iter().rev().step_by(3).copied().collect();
    let b = sweep_perturbation_length(&sc, &shuffled).unwrap();
    for row in b {
        let twin = a.iter().find(|r| r.delta_z == row.delta_z).unwrap();
        assert_eq!(*twin, row);
    }
}

#[test]
fn nonlinear_config_runs_rk4() {
    let text = include_str!("../../../configs/saturation.conf");
    let sc = parse_config(text).unwrap().scenario(false).unwrap();
    assert!(sc.nonlinear.is_some());
}
