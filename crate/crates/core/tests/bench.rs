use std::f64::consts::PI;

use qtunnel::bench::{
    histogram_csv, profile_csv, read_histogram, read_profile, revisit_statistics, run_experiment, write_histogram,
    write_profile, ExperimentConfig, HistogramRecord, Method, ProfileRecord, HS_REVISIT_TOL,
};
use qtunnel::model::{ansatz_chain, tfim_chain, ChainSpec};
use qtunnel::tunnel::{
    CostOracle, FlowStatus, HilbertSchmidt, Phase, StablePoint, Termination, TunnelAttempt, TunnelRun, VqeOracle,
};
use qtunnel::Error;

fn small_chain(method: Method) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::chain(4, 1.0, 1.0, method);
    cfg.learning_rate = 0.05;
    cfg.max_descent_iters = 3000;
    cfg.max_tunnel_iters = 500;
    cfg.max_tunnels = 3;
    cfg.seed = 77;
    cfg
}

#[test]
fn histogram_round_trip() {
    let records: Vec<HistogramRecord> = (0..5)
        .map(|i| HistogramRecord {
            sample_id: i,
            seed: u64::MAX - i as u64,
            final_best_f: -50.45087000012345 / (i as f64 + 1.0),
            n_tunnels_used: i,
            termination: [Termination::TunnelExhausted, Termination::IterationBudget][i % 2],
            wall_iterations: 1000 * i + 7,
        })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("histogram.csv");
    write_histogram(&records, &path).unwrap();
    let back = read_histogram(&path).unwrap();
    assert_eq!(back.len(), records.len());
    for (a, b) in records.iter().zip(&back) {
        assert_eq!((a.sample_id, a.seed, a.n_tunnels_used), (b.sample_id, b.seed, b.n_tunnels_used));
        assert_eq!((a.termination, a.wall_iterations), (b.termination, b.wall_iterations));
        assert!((a.final_best_f - b.final_best_f).abs() < 1e-9);
    }
}

#[test]
fn profile_round_trip_and_row_count() {
    let records = vec![
        ProfileRecord { sample_id: 0, global_iteration: 0, phase: Phase::Descent, f: 1.5, distance_to_stable: None },
        ProfileRecord { sample_id: 0, global_iteration: 1, phase: Phase::Descent, f: 0.25, distance_to_stable: None },
        ProfileRecord {
            sample_id: 0,
            global_iteration: 2,
            phase: Phase::Tunnel,
            f: 0.2500001,
            distance_to_stable: Some(1.0e-3),
        },
    ];
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    write_profile(&records, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert_eq!(text.lines().next().unwrap(), "sample_id,global_iteration,phase,f,distance_to_stable");
    let back = read_profile(&path).unwrap();
    for (a, b) in records.iter().zip(&back) {
        assert_eq!((a.sample_id, a.global_iteration, a.phase), (b.sample_id, b.global_iteration, b.phase));
        assert!((a.f - b.f).abs() < 1e-9);
        match (a.distance_to_stable, b.distance_to_stable) {
            (None, None) => {}
            (Some(x), Some(y)) => assert!((x - y).abs() < 1e-9),
            other => panic!("distance column changed: {other:?}"),
        }
    }
}

#[test]
fn empty_records_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(write_histogram(&[], &dir.path().join("h.csv")), Err(Error::EmptyInput)));
    assert!(matches!(write_profile(&[], &dir.path().join("p.csv")), Err(Error::EmptyInput)));
}

#[test]
fn unwritable_path_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("h.csv");
    let rec = HistogramRecord {
        sample_id: 0,
        seed: 0,
        final_best_f: 0.0,
        n_tunnels_used: 0,
        termination: Termination::TunnelExhausted,
        wall_iterations: 1,
    };
    assert!(matches!(write_histogram(&[rec], &path), Err(Error::Io { .. })));
}

#[test]
fn ensembles_are_deterministic() {
    let cfg = ExperimentConfig { n_samples: 6, ..small_chain(Method::TunnelModified) };
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(histogram_csv(&a.histogram()).unwrap(), histogram_csv(&b.histogram()).unwrap());
    assert_eq!(profile_csv(&a.profile()).unwrap(), profile_csv(&b.profile()).unwrap());
}

#[test]
fn samples_do_not_depend_on_ensemble_size() {
    let cfg = small_chain(Method::TunnelConventional);
    let few = run_experiment(&ExperimentConfig { n_samples: 10, ..cfg.clone() }).unwrap();
    let many = run_experiment(&ExperimentConfig { n_samples: 100, ..cfg }).unwrap();
    assert_eq!(few.histogram()[..], many.histogram()[..10]);
    for (a, b) in few.samples.iter().zip(&many.samples) {
        assert_eq!(a.x0, b.x0);
        assert_eq!(a.run.trace, b.run.trace);
    }
}

#[test]
fn descent_only_ends_on_stationary_points() {
    let cfg = ExperimentConfig { n_samples: 12, max_descent_iters: 20000, ..small_chain(Method::DescentOnly) };
    let exp = run_experiment(&cfg).unwrap();
    let tol = cfg.tunnel_config(0).grad_tol_for(cfg.dimension());
    for s in &exp.samples {
        assert!(s.run.best.converged, "sample {}", s.sample_id);
        assert!(s.run.best.grad_norm < tol);
        assert!(s.run.tunnels.is_empty());
    }
    let stats = revisit_statistics(exp.runs(), &HilbertSchmidt, HS_REVISIT_TOL);
    assert_eq!((stats.n_revisits, stats.n_tunnel_starts), (0, 0));
}

#[test]
fn stable_values_strictly_decrease_in_every_sample() {
    for method in [Method::TunnelConventional, Method::TunnelModified] {
        let exp = run_experiment(&ExperimentConfig { n_samples: 16, ..small_chain(method) }).unwrap();
        for s in &exp.samples {
            let values: Vec<f64> = s.run.stable_points.iter().map(|p| p.value).collect();
            assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
            assert_eq!(s.run.best.value, values.iter().cloned().fold(f64::INFINITY, f64::min));
        }
    }
}

#[test]
fn periodic_shift_counts_as_a_revisit() {
    let h = tfim_chain(ChainSpec { n_sites: 3, j: 1.0, b: 0.7 }).unwrap();
    let oracle = VqeOracle::new(ansatz_chain(3, 2).unwrap(), &h).unwrap();
    let x = vec![0.3, 1.1, -0.4, 2.0, 0.9, -1.3];
    let mut shifted = x.clone();
    shifted[2] += 4.0 * PI;
    let stable = |x: &[f64]| {
        let eval = oracle.evaluate(x).unwrap();
        StablePoint {
            x: x.to_vec(),
            value: eval.value,
            token: eval.token,
            lambda: 0.75,
            descent_iters: 0,
            grad_norm: 0.0,
            converged: true,
        }
    };
    let (a, b) = (stable(&x), stable(&shifted));
    let run = TunnelRun {
        tunnels: vec![TunnelAttempt {
            origin: 0,
            status: FlowStatus::Escaped,
            iterations: 1,
            end: b.token.clone(),
            end_value: b.value,
            end_speed: 0.0,
        }],
        trace: Vec::new(),
        best: a.clone(),
        stable_points: vec![a, b],
        termination: Termination::TunnelExhausted,
    };
    let stats = revisit_statistics([&run], &HilbertSchmidt, 1e-6);
    assert_eq!((stats.n_revisits, stats.n_tunnel_starts), (1, 1));
}

#[test]
fn shipped_presets_load() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(cfg.n_samples >= 50);
        count += 1;
    }
    assert_eq!(count, 9);
}

#[test]
fn fista_preset_runs() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/chain10_b0.5_modified.json");
    let cfg = ExperimentConfig { n_samples: 2, ..ExperimentConfig::load(&path).unwrap() };
    let exp = run_experiment(&cfg).unwrap();
    for s in &exp.samples {
        assert!(s.run.best.value.is_finite());
        assert!(s.run.stable_points.windows(2).all(|w| w[1].value < w[0].value));
    }
}
