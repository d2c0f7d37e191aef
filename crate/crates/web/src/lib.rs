//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Parameter vectors use the order `[a2_plus, a2_minus, a3_plus, a3_minus,
//! tau_plus_ms, tau_minus_ms, tau_x_ms, tau_y_ms]`. Each exported function
//! has a plain Rust twin returning `Result<_, String>`; the exported one
//! turns the error into a JavaScript exception.

use stdp_core::experiments::{bcm_curve, frequency_sweep, stdp_window};
use stdp_core::rules::BcmSpec;
use stdp_core::{Rule, TripletParams};
use wasm_bindgen::prelude::*;

const MS: f64 = 1e-3;

pub fn params_from_slice(p: &[f64]) -> Result<TripletParams, String> {
    let a: [f64; 8] = p
        .try_into()
        .map_err(|_| format!("expected 8 parameters, got {}", p.len()))?;
    let params = TripletParams {
        a2_plus: a[0],
        a2_minus: a[1],
        a3_plus: a[2],
        a3_minus: a[3],
        tau_plus: a[4] * MS,
        tau_minus: a[5] * MS,
        tau_x: a[6] * MS,
        tau_y: a[7] * MS,
    };
    params.validate().map_err(|e| e.to_string())?;
    Ok(params)
}

pub fn params_to_vec(p: &TripletParams) -> Vec<f64> {
    vec![
        p.a2_plus,
        p.a2_minus,
        p.a3_plus,
        p.a3_minus,
        p.tau_plus / MS,
        p.tau_minus / MS,
        p.tau_x / MS,
        p.tau_y / MS,
    ]
}

pub fn preset_params(name: &str) -> Result<Vec<f64>, String> {
    match name {
        "visual-cortex" => Ok(params_to_vec(&TripletParams::visual_cortex_style())),
        "hippocampal" => Ok(params_to_vec(&TripletParams::hippocampal_style())),
        _ => Err(format!("unknown preset {name:?}")),
    }
}

/// Total weight change of a pairing protocol at each `dt_ms`.
pub fn window(params: &[f64], dt_ms: &[f64], rho_hz: f64, n_pairs: usize) -> Result<Vec<f64>, String> {
    let rule = Rule::Triplet(params_from_slice(params)?);
    let dts: Vec<f64> = dt_ms.iter().map(|d| d * MS).collect();
    let r = stdp_window(&rule, &dts, rho_hz, n_pairs, 1).map_err(|e| e.to_string())?;
    Ok(r.means())
}

/// Total weight change of pairings at `dt_ms` for each repetition rate.
pub fn frequency(params: &[f64], dt_ms: f64, rho_hz: &[f64], n_pairs: usize) -> Result<Vec<f64>, String> {
    let rule = Rule::Triplet(params_from_slice(params)?);
    let r = frequency_sweep(&rule, &[dt_ms * MS], rho_hz, n_pairs, 1).map_err(|e| e.to_string())?;
    Ok(r.means())
}

/// Mean Poisson-protocol drift (weight/s) at each postsynaptic rate.
pub fn bcm(
    params: &[f64],
    rho_pre_hz: f64,
    rho_post_hz: &[f64],
    duration_s: f64,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let p = params_from_slice(params)?;
    let r = bcm_curve(&p, rho_pre_hz, rho_post_hz, duration_s, trials, seed).map_err(|e| e.to_string())?;
    Ok(r.means())
}

/// `[theta_hz, k]` of the rate-based approximation.
pub fn bcm_threshold(params: &[f64]) -> Result<Vec<f64>, String> {
    let spec = BcmSpec::from_minimal(&params_from_slice(params)?).map_err(|e| e.to_string())?;
    Ok(vec![spec.theta, spec.k])
}

fn js(r: Result<Vec<f64>, String>) -> Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn preset(name: &str) -> Result<Vec<f64>, JsError> {
    js(preset_params(name))
}

#[wasm_bindgen(js_name = windowCurve)]
pub fn window_curve(params: &[f64], dt_ms: &[f64], rho_hz: f64, n_pairs: usize) -> Result<Vec<f64>, JsError> {
    js(window(params, dt_ms, rho_hz, n_pairs))
}

#[wasm_bindgen(js_name = frequencyCurve)]
pub fn frequency_curve(params: &[f64], dt_ms: f64, rho_hz: &[f64], n_pairs: usize) -> Result<Vec<f64>, JsError> {
    js(frequency(params, dt_ms, rho_hz, n_pairs))
}

#[wasm_bindgen(js_name = bcmCurve)]
pub fn bcm_curve_js(
    params: &[f64],
    rho_pre_hz: f64,
    rho_post_hz: &[f64],
    duration_s: f64,
    trials: usize,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    js(bcm(params, rho_pre_hz, rho_post_hz, duration_s, trials, seed as u64))
}

#[wasm_bindgen(js_name = bcmThreshold)]
pub fn bcm_threshold_js(params: &[f64]) -> Result<Vec<f64>, JsError> {
    js(bcm_threshold(params))
}
