use nearness::config::RunConfig;
use nearness::eval::{self, EvalSettings};
use nearness::features::FeatureMatrix;
use nearness::learn::{Algorithm, TrainedModel};
use nearness::pipeline as pl;
use nearness::synth::{default_profiles, SinusoidSpec, SpaceConfig, SensorProfile};
use nearness::Exec;

fn small_config() -> RunConfig {
    let mut cfg = RunConfig { window: 64, ..RunConfig::default() };
    cfg.generate.n_control_windows = 40;
    cfg.generate.n_near_windows = 40;
    cfg.generate.sensors = Some(vec!["accelerometer".into(), "light".into(), "pressure".into()]);
    cfg
}

fn small_matrix(cfg: &RunConfig, exec: Exec) -> FeatureMatrix {
    let ds = pl::generate(cfg, exec).unwrap();
    let (log, labels) = pl::dataset_to_log(ds);
    pl::extract_log(&log, Some(&labels), cfg, exec).unwrap()
}

#[test]
fn sequential_and_parallel_agree() {
    let cfg = small_config();
    let a = small_matrix(&cfg, Exec::Sequential);
    let b = small_matrix(&cfg, Exec::Parallel);
    assert_eq!(a, b);
    let ea = eval::evaluate(&a, &cfg.eval_settings(), Exec::Sequential).unwrap();
    let eb = eval::evaluate(&b, &cfg.eval_settings(), Exec::Parallel).unwrap();
    assert_eq!(ea.model.to_json(), eb.model.to_json());
    assert_eq!(ea.report, eb.report);
}

#[test]
fn files_round_trip_through_csv() {
    let cfg = small_config();
    let dir = tempfile::tempdir().unwrap();
    let ds = pl::generate(&cfg, Exec::default()).unwrap();
    let (log_p, lab_p) = (dir.path().join("raw.csv"), dir.path().join("labels.csv"));
    pl::write_dataset(&ds, &log_p, &lab_p).unwrap();
    let from_files = pl::extract_files(&log_p, Some(&lab_p), &cfg, Exec::default()).unwrap();
    assert_eq!(from_files, small_matrix(&cfg, Exec::default()));

    let feat_p = dir.path().join("features.csv");
    from_files.write_csv(&feat_p).unwrap();
    assert_eq!(FeatureMatrix::read_csv(&feat_p).unwrap(), from_files);

    let unlabeled = pl::extract_files(&log_p, Some(&dir.path().join("missing.csv")), &cfg, Exec::default()).unwrap();
    assert!(unlabeled.labels.iter().all(Option::is_none));
}

#[test]
fn saved_models_predict_bit_identically() {
    let cfg = small_config();
    let m = small_matrix(&cfg, Exec::default());
    let dir = tempfile::tempdir().unwrap();
    for algo in [Algorithm::Smo, Algorithm::Nb, Algorithm::Mlp] {
        let mut s = cfg.eval_settings();
        s.train.algorithm = algo;
        s.train.mlp.epochs = 50;
        let ev = eval::evaluate(&m, &s, Exec::default()).unwrap();
        let p = dir.path().join("m.json");
        ev.model.save(&p).unwrap();
        let back = TrainedModel::load(&p).unwrap();
        let a = ev.model.predict_matrix(&m).unwrap();
        let b = back.predict_matrix(&m).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.label, y.label);
            assert_eq!(x.score.to_bits(), y.score.to_bits());
        }
        // the saved model re-scores exactly its own held-out rows
        assert_eq!(eval::evaluate_model(&back, &m).unwrap().confusion, ev.report.confusion);
    }
}

#[test]
fn ablation_baseline_matches_plain_evaluation() {
    let cfg = small_config();
    let m = small_matrix(&cfg, Exec::default());
    let s = cfg.eval_settings();
    let ab = eval::ablation(&m, &s, Some(&["light".to_string()]), Exec::default()).unwrap();
    let plain = eval::evaluate(&m, &s, Exec::default()).unwrap().report;
    assert_eq!(ab.baseline, plain);
    let names: Vec<&str> = ab.rows.iter().map(|r| r.removed_sensor.as_str()).collect();
    assert_eq!(names, ["accelerometer", "light", "pressure"]);
    for r in &ab.rows {
        assert!((r.baseline_diff - (r.f_measure - plain.metrics.near.f_measure)).abs() < 1e-9);
    }
    assert_eq!(ab.subset.as_ref().unwrap().1.model.features.iter().filter(|f| !f.ends_with("@light")).count(), 0);

    let err = eval::ablation(&m, &s, Some(&["sonar".to_string()]), Exec::default()).unwrap_err();
    assert!(err.to_string().contains("accelerometer"), "{err}");
}

#[test]
fn dropping_a_signal_free_sensor_changes_little() {
    // a flat sensor carries no information, so removing it must not move F
    let flat = SensorProfile {
        sensor_id: "flat".into(),
        baseline: [1.0, 2.0, 3.0],
        axes: std::array::from_fn(|_| SpaceConfig {
            sinusoids: vec![SinusoidSpec::with_period(0.0, 10.0, 0.0)],
            lambda_offset: 0.0,
            sample_rate_hz: 10.0,
            duration_s: 600.0,
            sensor_noise_sigma: 0.0,
        }),
        human: None,
    };
    let mut profiles: Vec<SensorProfile> =
        default_profiles().into_iter().filter(|p| p.sensor_id == "accelerometer" || p.sensor_id == "light").collect();
    profiles.push(flat);
    let mut cfg = small_config();
    cfg.generate.sensors = None;
    cfg.generate.profiles = Some(profiles);
    let m = small_matrix(&cfg, Exec::default());
    let ab = eval::ablation(&m, &EvalSettings { split_seed: 3, ..cfg.eval_settings() }, None, Exec::default()).unwrap();
    let row = ab.rows.iter().find(|r| r.removed_sensor == "flat").unwrap();
    assert!(row.baseline_diff.abs() < 1e-12, "{}", row.baseline_diff);
}

#[test]
fn single_class_test_fold_is_an_error() {
    let mut cfg = small_config();
    cfg.generate.n_near_windows = 1;
    let m = small_matrix(&cfg, Exec::default());
    // one near window lands in either train (test is single-class) or test
    // (train is single-class): both must fail, never silently succeed
    assert!(eval::evaluate(&m, &cfg.eval_settings(), Exec::default()).is_err());
}
