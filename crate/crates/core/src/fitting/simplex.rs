//! Nelder-Mead downhill simplex for unconstrained minimization.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::par_map;
use crate::seed::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitOptions {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Largest vertex distance from the best vertex (per coordinate).
    pub tol_x: f64,
    /// Largest objective gap between the best vertex and the others.
    pub tol_f: f64,
    pub max_iter: usize,
    /// Edge length of the initial simplex along each coordinate.
    pub initial_step: f64,
    /// Fresh simplices built around the optimum after convergence.
    pub restarts: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            tol_x: 1e-6,
            tol_f: 1e-6,
            max_iter: 2000,
            initial_step: 0.25,
            restarts: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best objective value after each iteration (and before the first).
    pub trace: Vec<f64>,
}

struct Counted<F> {
    f: F,
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

fn lerp(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    // from + t * (to - from)
    from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
}

/// Minimizes `f` starting from `x0`.
///
/// Non-finite objective values count as `+∞`; a non-finite vertex of the
/// initial simplex is pulled towards `x0` by halving its step.
pub fn minimize<F>(f: F, x0: &[f64], opts: &FitOptions) -> Result<SimplexResult>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut obj = Counted { f, evaluations: 0 };
    let f0 = obj.eval(x0);
    if !f0.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    let mut best = (x0.to_vec(), f0);
    let mut trace = vec![f0];
    let mut iterations = 0;
    let mut converged = x0.is_empty();
    if !converged {
        for round in 0..=opts.restarts {
            let before = best.1;
            let (x, fx, ok) = descend(&mut obj, best.clone(), opts, &mut iterations, &mut trace);
            if let Some(last) = trace.last_mut() {
                *last = last.min(fx);
            }
            best = (x, fx);
            converged = ok;
            if !ok || (round > 0 && before - fx <= opts.tol_f) {
                break;
            }
        }
    }
    if !best.1.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    Ok(SimplexResult {
        x: best.0,
        f: best.1,
        iterations,
        evaluations: obj.evaluations,
        converged,
        trace,
    })
}

fn descend<F: FnMut(&[f64]) -> f64>(
    obj: &mut Counted<F>,
    start: (Vec<f64>, f64),
    opts: &FitOptions,
    iterations: &mut usize,
    trace: &mut Vec<f64>,
) -> (Vec<f64>, f64, bool) {
    let n = start.0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut step = opts.initial_step;
        let mut vertex = start.0.clone();
        let mut value = f64::INFINITY;
        for _ in 0..30 {
            vertex[i] = start.0[i] + step;
            value = obj.eval(&vertex);
            if value.is_finite() {
                break;
            }
            step *= 0.5;
        }
        simplex.push((vertex, value));
    }
    simplex.push(start);

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best_f = simplex[0].1;
        let f_spread = simplex[1..].iter().map(|v| (v.1 - best_f).abs()).fold(0.0, f64::max);
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|v| v.0.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if f_spread <= opts.tol_f && x_spread <= opts.tol_x {
            let (x, f) = simplex.swap_remove(0);
            return (x, f, true);
        }
        if *iterations >= opts.max_iter {
            let (x, f) = simplex.swap_remove(0);
            return (x, f, false);
        }
        *iterations += 1;

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(&v.0) {
                *c += x / n as f64;
            }
        }
        let worst = &simplex[n];
        let (worst_x, worst_f) = (worst.0.clone(), worst.1);
        let second_worst_f = simplex[n - 1].1;

        let xr = lerp(&centroid, &worst_x, -opts.reflection);
        let fr = obj.eval(&xr);
        let mut replacement = None;
        if fr < best_f {
            let xe = lerp(&centroid, &xr, opts.expansion);
            let fe = obj.eval(&xe);
            replacement = Some(if fe < fr { (xe, fe) } else { (xr, fr) });
        } else if fr < second_worst_f {
            replacement = Some((xr, fr));
        } else if fr < worst_f {
            let xc = lerp(&centroid, &xr, opts.contraction);
            let fc = obj.eval(&xc);
            if fc <= fr {
                replacement = Some((xc, fc));
            }
        } else {
            let xcc = lerp(&centroid, &worst_x, opts.contraction);
            let fcc = obj.eval(&xcc);
            if fcc < worst_f {
                replacement = Some((xcc, fcc));
            }
        }
        match replacement {
            Some(v) => simplex[n] = v,
            None => {
                let anchor = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let x = lerp(&anchor, &v.0, opts.shrink);
                    let fx = obj.eval(&x);
                    *v = (x, fx);
                }
            }
        }
        let current = simplex.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        let prev = *trace.last().unwrap_or(&f64::INFINITY);
        trace.push(current.min(prev));
    }
}

/// Best of `n_starts` minimizations from points drawn uniformly inside
/// `bounds`; start `k` uses random stream `k` of `seed`. Ties go to the
/// lowest start index. Returns the result and the winning start index.
pub fn multi_start<F>(
    f: F,
    bounds: &[(f64, f64)],
    n_starts: usize,
    seed: u64,
    opts: &FitOptions,
) -> Result<(SimplexResult, usize)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if n_starts == 0 {
        return Err(Error::InvalidParams("n_starts must be at least 1".into()));
    }
    let run = |k: usize| {
        let x0 = uniform_start(bounds, seed, k);
        minimize(&f, &x0, opts)
    };
    let results = par_map((0..n_starts).collect(), run);

    pick_best(results.into_iter().map(|r| r.map(|s| (s.f, s)))).ok_or(Error::AllStartsFailed(n_starts))
}

/// Start point `k` of [`multi_start`].
pub fn uniform_start(bounds: &[(f64, f64)], seed: u64, k: usize) -> Vec<f64> {
    let mut rng = stream_rng(seed, k as u64);
    bounds
        .iter()
        .map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
        .collect()
}

/// Lowest objective among the successful entries; first index wins ties.
pub(crate) fn pick_best<T>(results: impl Iterator<Item = Result<(f64, T)>>) -> Option<(T, usize)> {
    let mut best: Option<(f64, T, usize)> = None;
    for (k, r) in results.enumerate() {
        if let Ok((f, value)) = r {
            if best.as_ref().is_none_or(|b| f < b.0) {
                best = Some((f, value, k));
            }
        }
    }
    best.map(|(_, v, k)| (v, k))
}
