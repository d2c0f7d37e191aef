//! NMSE objective and simplex fitting of triplet-rule parameters.
//!
//! Free parameters are optimized as logarithms, so amplitudes and time
//! constants stay strictly positive. Frozen parameters keep their initial
//! values, which is how the minimal rules pin `a2_plus` and/or `a3_minus`
//! at zero.

pub mod simplex;
pub mod synthetic;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::par_map;
use crate::rules::{tstdp_total, ParamId, TripletParams};
use crate::seed::stream_rng;
use crate::spike::{Protocol, ProtocolTrains};

pub use simplex::FitOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    pub protocol: Protocol,
    /// Mean experimental weight change.
    pub dw_exp: f64,
    /// Standard error of `dw_exp`.
    pub sem: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub points: Vec<DataPoint>,
}

/// Dataset names with a fixed number of points.
pub const RESERVED_NAMES: [(&str, usize); 2] = [("visual-cortex", 10), ("hippocampal", 13)];

impl Dataset {
    pub fn new(name: impl Into<String>, points: Vec<DataPoint>) -> Result<Self> {
        let ds = Self {
            name: name.into(),
            points,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::InvalidParams(format!("dataset {} has no points", self.name)));
        }
        if let Some(&(_, p)) = RESERVED_NAMES.iter().find(|(n, _)| *n == self.name) {
            if self.points.len() != p {
                return Err(Error::LengthMismatch {
                    expected: p,
                    actual: self.points.len(),
                });
            }
        }
        for (index, pt) in self.points.iter().enumerate() {
            if !(pt.sem > 0.0) || !pt.sem.is_finite() {
                return Err(Error::NonPositiveSem { index, sem: pt.sem });
            }
            if pt.protocol.is_stochastic() {
                return Err(Error::InvalidProtocol(format!(
                    "point {index}: fitting uses repetition protocols only"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `(1/p)·Σ((Δw_exp − Δw_model)/σ)²`.
pub fn nmse(dataset: &Dataset, predictions: &[f64]) -> Result<f64> {
    if predictions.len() != dataset.points.len() {
        return Err(Error::LengthMismatch {
            expected: dataset.points.len(),
            actual: predictions.len(),
        });
    }
    let mut sum = 0.0;
    for (index, (pt, model)) in dataset.points.iter().zip(predictions).enumerate() {
        if !(pt.sem > 0.0) {
            return Err(Error::NonPositiveSem { index, sem: pt.sem });
        }
        let z = (pt.dw_exp - model) / pt.sem;
        sum += z * z;
    }
    Ok(sum / predictions.len() as f64)
}

/// Triplet-rule prediction for every point of the dataset.
pub fn predict(params: &TripletParams, dataset: &Dataset) -> Result<Vec<f64>> {
    params.validate()?;
    dataset
        .points
        .iter()
        .map(|pt| Ok(tstdp_total(params, &pt.protocol.generate()?)))
        .collect()
}

/// A dataset with its protocol trains generated once.
#[derive(Debug, Clone)]
pub struct PreparedDataset<'a> {
    dataset: &'a Dataset,
    trains: Vec<ProtocolTrains>,
}

impl<'a> PreparedDataset<'a> {
    pub fn new(dataset: &'a Dataset) -> Result<Self> {
        dataset.validate()?;
        let trains = dataset
            .points
            .iter()
            .map(|pt| pt.protocol.generate())
            .collect::<Result<_>>()?;
        Ok(Self { dataset, trains })
    }

    pub fn dataset(&self) -> &Dataset {
        self.dataset
    }

    pub fn predict(&self, params: &TripletParams) -> Vec<f64> {
        self.trains.iter().map(|tr| tstdp_total(params, tr)).collect()
    }

    pub fn nmse(&self, params: &TripletParams) -> f64 {
        let sum: f64 = self
            .dataset
            .points
            .iter()
            .zip(&self.trains)
            .map(|(pt, tr)| {
                let z = (pt.dw_exp - tstdp_total(params, tr)) / pt.sem;
                z * z
            })
            .sum();
        sum / self.trains.len() as f64
    }
}

/// Which parameters the optimizer may change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamMask {
    free: [bool; 8],
}

impl ParamMask {
    pub fn all_free() -> Self {
        Self { free: [true; 8] }
    }

    pub fn all_frozen() -> Self {
        Self { free: [false; 8] }
    }

    pub fn with_free(ids: &[ParamId]) -> Self {
        let mut m = Self::all_frozen();
        for &id in ids {
            m.free[id.index()] = true;
        }
        m
    }

    /// Minimal rule without pair potentiation or triplet depression.
    pub fn visual_cortex() -> Self {
        Self::with_free(&[
            ParamId::A2Minus,
            ParamId::A3Plus,
            ParamId::TauPlus,
            ParamId::TauMinus,
            ParamId::TauY,
        ])
    }

    /// Minimal rule without triplet depression.
    pub fn hippocampal() -> Self {
        Self::with_free(&[
            ParamId::A2Plus,
            ParamId::A2Minus,
            ParamId::A3Plus,
            ParamId::TauPlus,
            ParamId::TauMinus,
            ParamId::TauY,
        ])
    }

    pub fn is_free(&self, id: ParamId) -> bool {
        self.free[id.index()]
    }

    pub fn free_ids(&self) -> Vec<ParamId> {
        ParamId::ALL.into_iter().filter(|&id| self.is_free(id)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: TripletParams,
    pub nmse: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best-so-far NMSE per iteration.
    pub trace: Vec<f64>,
}

/// Multiplicative distortion applied to candidate parameters before they
/// reach the rule, stored as natural-log factors in [`ParamId`] order.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Distortion {
    pub log_factors: [f64; 8],
}

impl Distortion {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn apply(&self, params: &TripletParams) -> TripletParams {
        let mut a = params.to_array();
        for (v, lf) in a.iter_mut().zip(&self.log_factors) {
            *v *= lf.exp();
        }
        TripletParams::from_array(a)
    }

    pub fn factor(&self, id: ParamId) -> f64 {
        self.log_factors[id.index()].exp()
    }
}

/// Fits free parameters of `initial` to the dataset.
pub fn fit(dataset: &Dataset, initial: &TripletParams, mask: &ParamMask, options: &FitOptions) -> Result<FitResult> {
    fit_distorted(dataset, initial, mask, options, &Distortion::identity())
}

/// Like [`fit`], but every candidate passes through `distortion` before
/// evaluation. The returned parameters are the undistorted candidates.
pub fn fit_distorted(
    dataset: &Dataset,
    initial: &TripletParams,
    mask: &ParamMask,
    options: &FitOptions,
    distortion: &Distortion,
) -> Result<FitResult> {
    initial.validate()?;
    let prepared = PreparedDataset::new(dataset)?;
    let free = mask.free_ids();
    for &id in &free {
        if !(initial.get(id) > 0.0) {
            return Err(Error::InvalidParams(format!(
                "free parameter {} must start > 0 for the log transform",
                id.name()
            )));
        }
    }
    let build = |x: &[f64]| {
        let mut p = *initial;
        for (&id, &v) in free.iter().zip(x) {
            p.set(id, v.exp());
        }
        p
    };
    let objective = |x: &[f64]| {
        let p = distortion.apply(&build(x));
        if p.validate().is_err() {
            return f64::INFINITY;
        }
        prepared.nmse(&p)
    };
    let x0: Vec<f64> = free.iter().map(|&id| initial.get(id).ln()).collect();
    let result = simplex::minimize(objective, &x0, options)?;
    let params = if result.x == x0 { *initial } else { build(&result.x) };
    Ok(FitResult {
        params,
        nmse: result.f,
        iterations: result.iterations,
        evaluations: result.evaluations,
        converged: result.converged,
        trace: result.trace,
    })
}

/// Per-parameter ranges for random initializations; sampled log-uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitBounds {
    pub lower: TripletParams,
    pub upper: TripletParams,
}

impl Default for InitBounds {
    fn default() -> Self {
        let amp = (1e-4, 1e-1);
        let tau = (2e-3, 200e-3);
        let make = |pick: fn((f64, f64)) -> f64| TripletParams {
            a2_plus: pick(amp),
            a2_minus: pick(amp),
            a3_plus: pick(amp),
            a3_minus: pick(amp),
            tau_plus: pick(tau),
            tau_minus: pick(tau),
            tau_x: pick(tau),
            tau_y: pick(tau),
        };
        Self {
            lower: make(|r| r.0),
            upper: make(|r| r.1),
        }
    }
}

/// Initialization `k` of [`multi_start_fit`]: `template` with each free
/// parameter drawn log-uniformly inside `bounds` from stream `k` of `seed`.
pub fn multi_start_init(
    template: &TripletParams,
    mask: &ParamMask,
    bounds: &InitBounds,
    seed: u64,
    k: usize,
) -> TripletParams {
    use rand::Rng;
    let mut rng = stream_rng(seed, k as u64);
    let mut p = *template;
    for id in mask.free_ids() {
        let (lo, hi) = (bounds.lower.get(id).ln(), bounds.upper.get(id).ln());
        p.set(id, (lo + (hi - lo) * rng.random::<f64>()).exp());
    }
    p
}

/// Best of `n_starts` fits from random initializations. Deterministic in
/// `seed`; ties go to the lowest start index.
pub fn multi_start_fit(
    dataset: &Dataset,
    template: &TripletParams,
    mask: &ParamMask,
    bounds: &InitBounds,
    n_starts: usize,
    seed: u64,
    options: &FitOptions,
) -> Result<FitResult> {
    if n_starts == 0 {
        return Err(Error::InvalidParams("n_starts must be at least 1".into()));
    }
    let run = |k: usize| {
        let init = multi_start_init(template, mask, bounds, seed, k);
        fit(dataset, &init, mask, options).map(|r| (r.nmse, r))
    };
    let results = par_map((0..n_starts).collect(), run);
    simplex::pick_best(results.into_iter())
        .map(|(r, _)| r)
        .ok_or(Error::AllStartsFailed(n_starts))
}
