//! Browser bindings. Each export takes and returns JSON strings; the work is
//! done by the plain functions in [`demo`], which are tested natively.

use wasm_bindgen::prelude::*;

pub mod demo;

fn to_js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

/// Simulates one petition. `params` is a partial `SimulationParams` object.
#[wasm_bindgen]
pub fn simulate_petition(params: &str, seed: u32) -> Result<String, JsValue> {
    to_js(demo::simulate(params, seed as u64))
}

/// Metrics of a comma- or whitespace-separated list of daily counts.
#[wasm_bindgen]
pub fn analyze_series(counts: &str) -> Result<String, JsValue> {
    to_js(demo::analyze(counts))
}

/// Shape regression over a simulated cohort of `n` petitions.
#[wasm_bindgen]
pub fn replicate_cohort(params: &str, n: u32, seed: u32) -> Result<String, JsValue> {
    to_js(demo::replicate(params, n as usize, seed as u64))
}
