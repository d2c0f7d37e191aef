//! Brute-force reference implementations used by the integration tests.
//!
//! Each spike searches the whole opposite and same-type train for its
//! nearest predecessor, O(n²) overall.

#![allow(dead_code)]

use stdp_core::{PairParams, TripletParams};

fn last_before(times: &[f64], t: f64, inclusive: bool) -> Option<f64> {
    times
        .iter()
        .copied()
        .filter(|&s| if inclusive { s <= t } else { s < t })
        .fold(None, |best: Option<f64>, s| Some(best.map_or(s, |b| b.max(s))))
}

/// Spikes in time order; coincident pre spikes come before post spikes.
fn merged(pre: &[f64], post: &[f64]) -> Vec<(f64, bool)> {
    let mut ev: Vec<(f64, bool)> = pre
        .iter()
        .map(|&t| (t, true))
        .chain(post.iter().map(|&t| (t, false)))
        .collect();
    ev.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
    ev
}

pub fn triplet(p: &TripletParams, pre: &[f64], post: &[f64]) -> f64 {
    let mut dw = 0.0;
    for (t, is_pre) in merged(pre, post) {
        if is_pre {
            let Some(tp) = last_before(post, t, true) else { continue };
            let trip = last_before(pre, t, false).map_or(0.0, |s| (-(t - s) / p.tau_x).exp());
            dw -= ((tp - t) / p.tau_minus).exp() * (p.a2_minus + p.a3_minus * trip);
        } else {
            let Some(tp) = last_before(pre, t, false) else { continue };
            let trip = last_before(post, t, false).map_or(0.0, |s| (-(t - s) / p.tau_y).exp());
            dw += (-(t - tp) / p.tau_plus).exp() * (p.a2_plus + p.a3_plus * trip);
        }
    }
    dw
}

pub fn pair(p: &PairParams, pre: &[f64], post: &[f64]) -> f64 {
    triplet(
        &TripletParams {
            a2_plus: p.a_plus,
            a2_minus: p.a_minus,
            a3_plus: 0.0,
            a3_minus: 0.0,
            tau_plus: p.tau_plus,
            tau_minus: p.tau_minus,
            tau_x: 1.0,
            tau_y: 1.0,
        },
        pre,
        post,
    )
}

/// Expected drift (weight/s) of nearest-spike triplet STDP for independent
/// stationary Poisson trains. The gap to the latest spike of a Poisson
/// train is exponential, so `E[e^(−gap/τ)] = ρτ/(1 + ρτ)`.
pub fn nearest_poisson_drift(p: &TripletParams, rho_pre: f64, rho_post: f64) -> f64 {
    let m = |rho: f64, tau: f64| rho * tau / (1.0 + rho * tau);
    let ltp = rho_post * m(rho_pre, p.tau_plus) * (p.a2_plus + p.a3_plus * m(rho_post, p.tau_y));
    let ltd = rho_pre * m(rho_post, p.tau_minus) * (p.a2_minus + p.a3_minus * m(rho_pre, p.tau_x));
    ltp - ltd
}

/// Sorted, de-duplicated times with at least 1 µs between neighbours.
pub fn clean_times(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(v.len());
    for t in v {
        if out.last().is_none_or(|&l| t - l >= 1e-6) {
            out.push(t);
        }
    }
    out
}
