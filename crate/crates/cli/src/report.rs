//! JSON rendering with fixed key order and 12-significant-digit floats.

use std::time::Duration;

use ram_grs::pipeline::{Evaluation, PhaseTimings, Verification};
use ram_grs::Tolerances;
use serde_json::{json, Map, Number, Value};

/// Rounds to 12 significant digits, then lets serde_json print the shortest
/// representation that round-trips.
pub fn num(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

fn ms(d: Duration) -> Value {
    num(d.as_secs_f64() * 1e3)
}

pub fn tolerances(tol: &Tolerances<f64>) -> Value {
    json!({
        "feasibility_eps": num(tol.feasibility_eps()),
        "support_eps": num(tol.support_eps()),
        "efficiency_eps": num(tol.efficiency_eps()),
        "objective_eps": num(tol.objective_eps()),
    })
}

fn timings(t: &PhaseTimings) -> Value {
    let mut map = Map::new();
    map.insert("classify".into(), ms(t.classify));
    map.insert("system".into(), ms(t.system));
    map.insert("model".into(), ms(t.model));
    map.insert("recover".into(), ms(t.recover));
    let mut total = t.classify + t.system + t.model + t.recover;
    if let Some(c) = t.cross_check {
        map.insert("cross_check".into(), ms(c));
        total += c;
    }
    map.insert("total".into(), ms(total));
    Value::Object(map)
}

pub fn evaluation(e: &Evaluation<f64>, tol: &Tolerances<f64>, with_timings: bool) -> Value {
    let lambda: Map<String, Value> = e
        .grs
        .lambda_max
        .iter()
        .map(|(id, w)| (id.clone(), num(*w)))
        .collect();
    let mut map = Map::new();
    map.insert("dmu".into(), Value::from(e.grs.evaluated_id.clone()));
    map.insert("rho".into(), num(e.grs.rho));
    map.insert("method".into(), Value::from(e.method.as_str()));
    map.insert("lambda_max".into(), Value::Object(lambda));
    map.insert("grs".into(), Value::from(e.grs.reference_ids.clone()));
    if with_timings {
        map.insert("timings_ms".into(), timings(&e.timings));
    }
    map.insert("tolerances".into(), tolerances(tol));
    Value::Object(map)
}

pub fn verification(v: &Verification<f64>) -> Value {
    let checks: Vec<Value> = v
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
        .collect();
    json!({
        "dmu": v.dmu,
        "passed": v.passed(),
        "efficient_count": v.efficient_count,
        "grs": v.grs,
        "max_objective_gap": num(v.max_objective_gap),
        "max_membership_residual": num(v.max_membership_residual),
        "checks": checks,
    })
}
