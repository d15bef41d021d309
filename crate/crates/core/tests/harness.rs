use formation_koopman::geodesic::GeodesicState;
use formation_koopman::harness::report::{records_csv, summary_json, CSV_HEADER};
use formation_koopman::harness::{
    practical_modes, run_practical, run_scenario, sensing_range, Preset, ScenarioConfig,
    VelocityMode,
};
use formation_koopman::manifold::SurfaceSpec;
use formation_koopman::observables::DictionaryChoice;
use formation_koopman::Error;

fn flat(x: f64, y: f64, heading: f64) -> ScenarioConfig {
    let mut cfg = Preset::Type1.config();
    cfg.surface = SurfaceSpec::flat();
    cfg.leader_init = GeodesicState::new(x, y, heading.cos(), heading.sin());
    cfg
}

#[test]
fn runs_are_deterministic() {
    for preset in Preset::ALL {
        let a = run_scenario(&preset.config()).unwrap();
        let b = run_scenario(&preset.config()).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.rmse.to_bits(), b.rmse.to_bits());
        assert_eq!(records_csv(&a), records_csv(&b));
        assert_eq!(summary_json(&a), summary_json(&b));
    }
}

#[test]
fn flat_rmse_ignores_translation() {
    let base = run_scenario(&flat(0.0, 0.0, 0.4)).unwrap();
    for (x, y) in [(10.0, -3.0), (-45.0, 22.5), (1e3, 1e3)] {
        let moved = run_scenario(&flat(x, y, 0.4)).unwrap();
        assert!((moved.rmse - base.rmse).abs() <= 1e-9, "{} vs {}", moved.rmse, base.rmse);
        for (a, b) in base.records.iter().zip(&moved.records) {
            assert!((a.ideal.x + x - b.ideal.x).abs() <= 1e-9);
            assert!((a.ideal.y + y - b.ideal.y).abs() <= 1e-9);
        }
    }
}

#[test]
fn record_layout() {
    for choice in DictionaryChoice::ALL {
        let mut cfg = Preset::Type2.config();
        cfg.dictionary = choice;
        let report = run_scenario(&cfg).unwrap();
        assert_eq!(report.records.len(), cfg.steps);
        assert_eq!(report.prediction_records().count(), cfg.steps - cfg.warmup);
        assert!(report.rmse.is_finite());
        for (i, r) in report.records.iter().enumerate() {
            assert_eq!(r.t, i + 1);
            assert_eq!(r.measurement.len(), choice.dim());
            assert_eq!(r.estimated.is_some(), r.t > cfg.warmup);
        }
    }
}

#[test]
fn estimation_shrinks_the_sensing_range() {
    for preset in Preset::ALL {
        let cfg = preset.config();
        let with = sensing_range(&cfg, true).unwrap();
        let without = sensing_range(&cfg, false).unwrap();
        assert!(with < without, "{preset}: {with} vs {without}");
    }
}

#[test]
fn practical_modes_are_finite() {
    for preset in Preset::ALL {
        let table = practical_modes(&preset.config()).unwrap();
        assert_eq!(table.len(), 3);
        for (mode, rmse) in table {
            assert!(rmse.is_finite(), "{preset} {mode}");
        }
    }
}

#[test]
fn practical_runs_accumulate_displacements() {
    let cfg = Preset::Type1.config();
    let report = run_practical(&cfg, VelocityMode::Lag).unwrap();
    assert_eq!(report.config.dictionary, DictionaryChoice::C);
    let records: Vec<_> = report.records.iter().collect();
    for w in records.windows(2) {
        if let Some(e) = w[0].estimated {
            // where the follower ended up is where the next step starts
            assert_eq!(w[1].follower, e);
        }
    }
    let standard = run_scenario(&cfg).unwrap();
    for r in &standard.records[1..] {
        assert!(standard.records.iter().any(|q| q.ideal == r.follower));
    }
}

#[test]
fn stationary_leader_is_degenerate() {
    let mut cfg = flat(0.0, 0.0, 0.0);
    cfg.leader_init = GeodesicState::new(0.0, 0.0, 0.0, 0.0);
    assert!(matches!(run_scenario(&cfg), Err(Error::DegenerateHeading { .. })));
    assert!(matches!(practical_modes(&cfg), Err(Error::DegenerateHeading { .. })));
}

#[test]
fn config_files_round_trip() {
    let text = r#"
[surface]
kind = "type3"

[extension]
side = "right"

[edmd]
dictionary = "c"
warmup = 5
steps = 30
"#;
    let cfg = ScenarioConfig::from_toml_str(text).unwrap();
    assert_eq!(cfg.surface.name(), "type3");
    assert_eq!((cfg.warmup, cfg.steps), (5, 30));
    let back = toml::to_string(&cfg.to_file()).unwrap();
    let again = ScenarioConfig::from_toml_str(&back).unwrap();
    assert_eq!(again.to_file(), cfg.to_file());

    for bad in [
        "[edmd]\nwarmup = 0\n",
        "[edmd]\nwarmup = 36\n",
        "[edmd]\ndictionary = \"z\"\n",
        "[integrator]\nstep = 0.03\n",
        "[surface]\nkind = \"flat\"\n",
        "[surface]\nshape = \"type1\"\n",
        "[edmd]\nvelocity_mode = \"lag\"\n",
    ] {
        let err = ScenarioConfig::from_toml_str(bad).unwrap_err();
        assert!(err.is_config(), "{bad}: {err}");
    }
}

#[test]
fn csv_columns() {
    let report = run_scenario(&Preset::Type1.config()).unwrap();
    let csv = records_csv(&report);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 36);
    assert!(rows.iter().all(|r| r.len() == 11));
    assert!(rows[0][3].is_empty() && rows[0][9].is_empty());
    assert!(!rows[35][3].is_empty() && !rows[35][9].is_empty());
}
