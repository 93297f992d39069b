//! Browser bindings. Every export returns a JSON string; failures come back
//! as `{"error": "..."}` so the page never has to catch exceptions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use polya::biquad::polya_report;
use polya::quadratic::{fundamental_unit, quadratic_polya_oracle, zantema_classify};
use polya::verify::{self, PrimeTriple, Theorem};
use polya::{BiquadraticField, Budget};

fn finish(v: polya::Result<Value>) -> String {
    v.unwrap_or_else(|e| json!({ "error": e.to_string() })).to_string()
}

fn quadratic(d: i64) -> polya::Result<Value> {
    let zantema = zantema_classify(d)?;
    let oracle = quadratic_polya_oracle(d, &Budget::default())?;
    let unit = if d > 0 { Some(fundamental_unit(d)?) } else { None };
    Ok(json!({
        "d": d,
        "case_label": zantema.label(),
        "zantema": zantema,
        "oracle": oracle,
        "unit_text": unit.as_ref().map(|u| u.to_string()),
        "unit": unit,
    }))
}

#[wasm_bindgen]
pub fn classify_quadratic(d: i64) -> String {
    finish(quadratic(d))
}

fn biquadratic(m: i64, n: i64) -> polya::Result<Value> {
    let field = BiquadraticField::new(m, n)?;
    let report = polya_report(&field, &Budget::default())?;
    let mut v = serde_json::to_value(&report).expect("serializable");
    v["po_structure_text"] = json!(report.po_structure.to_string());
    v["unit_texts"] = json!(report.units.iter().map(|u| u.to_string()).collect::<Vec<_>>());
    v["h_basis_text"] = json!(report.h_basis.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    Ok(v)
}

#[wasm_bindgen]
pub fn analyze(m: i64, n: i64) -> String {
    finish(biquadratic(m, n))
}

/// `r` is ignored for the two-prime family.
#[wasm_bindgen]
pub fn verify_theorem(theorem: &str, p: u64, q: u64, r: u64) -> String {
    let run = || -> polya::Result<Value> {
        let theorem: Theorem = theorem.parse()?;
        let triple = if theorem.arity() == 2 { PrimeTriple::pair(p, q) } else { PrimeTriple::new(p, q, r) };
        let report = verify::verify_theorem(theorem, triple, &Budget::default());
        Ok(serde_json::to_value(&report).expect("serializable"))
    };
    finish(run())
}
