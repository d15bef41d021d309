//! Report serialization. Floats are written with 17 significant digits so
//! that reports round-trip bit-exactly.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{json, Map, Number, Value};

use super::{RunReport, Scene, ScenarioConfig, StepRecord};
use crate::observables::DictionaryChoice;

pub const CSV_HEADER: &str =
    "t,ideal_x,ideal_y,est_x,est_y,follower_x,follower_y,meas_dist,meas_angle_deg,pred_dist,pred_angle_deg";

pub const TRAJECTORY_HEADER: &str = "k,t,leader_x,leader_y,ideal_x,ideal_y,est_x,est_y";

/// `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// JSON number carrying the 17-digit representation verbatim.
pub fn json_f64(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Number::from_str(&fmt_f64(x))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn relative(choice: DictionaryChoice, r: &StepRecord) -> (Option<f64>, Option<f64>, Option<f64>, Option<f64>) {
    let meas = r.measurement.relative(choice);
    let pred = r.prediction.as_ref().and_then(|p| p.relative(choice));
    (
        meas.map(|m| m.0),
        meas.map(|m| m.1.to_degrees()),
        pred.map(|p| p.0),
        pred.map(|p| p.1.to_degrees()),
    )
}

/// Per-step CSV. Columns without a value for this dictionary or step are
/// left empty.
pub fn records_csv(report: &RunReport) -> String {
    let choice = report.config.dictionary;
    let mut out = String::with_capacity(256 * (report.records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &report.records {
        let (md, ma, pd, pa) = relative(choice, r);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.t,
            fmt_f64(r.ideal.x),
            fmt_f64(r.ideal.y),
            opt(r.estimated.map(|e| e.x)),
            opt(r.estimated.map(|e| e.y)),
            fmt_f64(r.follower.x),
            fmt_f64(r.follower.y),
            opt(md),
            opt(ma),
            opt(pd),
            opt(pa),
        );
    }
    out
}

pub fn config_json(cfg: &ScenarioConfig) -> Value {
    let s = &cfg.leader_init;
    json!({
        "surface": { "kind": cfg.surface.name() },
        "leader": { "init": [json_f64(s.x), json_f64(s.y), json_f64(s.vx), json_f64(s.vy)] },
        "extension": {
            "length": json_f64(cfg.extension.length),
            "period": json_f64(cfg.extension.period),
            "side": match cfg.extension.side {
                crate::formation::Side::Left => "left",
                crate::formation::Side::Right => "right",
            },
        },
        "edmd": {
            "dictionary": cfg.dictionary.to_string(),
            "warmup": cfg.warmup,
            "steps": cfg.steps,
            "velocity_mode": cfg.velocity_mode.as_str(),
        },
        "integrator": { "step": json_f64(cfg.step) },
    })
}

/// Summary with `rmse`, `avg_sensing_range` and the echoed config.
pub fn summary_json(report: &RunReport) -> String {
    let mut map = Map::new();
    map.insert("rmse".into(), json_f64(report.rmse));
    map.insert("avg_sensing_range".into(), json_f64(report.avg_sensing_range));
    map.insert("records".into(), Value::from(report.records.len()));
    map.insert(
        "prediction_records".into(),
        Value::from(report.prediction_records().count()),
    );
    map.insert("config".into(), config_json(&report.config));
    let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Leader, ideal and estimated curves at every communication instant.
pub fn trajectories_csv(scene: &Scene, report: &RunReport) -> String {
    let period = report.config.extension.period;
    let mut out = String::new();
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for (k, (leader, ideal)) in scene.leader.iter().zip(&scene.ideal).enumerate() {
        // the record aiming at instant k was taken at step k − 1
        let est = k
            .checked_sub(1)
            .and_then(|t| report.records.iter().find(|r| r.t == t))
            .and_then(|r| r.estimated);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            k,
            fmt_f64(k as f64 * period),
            fmt_f64(leader.x),
            fmt_f64(leader.y),
            fmt_f64(ideal.x),
            fmt_f64(ideal.y),
            opt(est.map(|e| e.x)),
            opt(est.map(|e| e.y)),
        );
    }
    out
}
