//! Protocol sweeps with per-point trial statistics.
//!
//! Repetition protocols are deterministic, so every trial of a grid point
//! yields the same value and the reported standard deviation is exactly 0.
//! Poisson protocols draw each `(grid point, trial)` item from its own seed
//! stream. Points whose protocol cannot be generated are reported in
//! [`SweepResult::skipped`] instead of aborting the sweep.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rules::{Rule, TripletParams};
use crate::seed::derive_seed;
use crate::spike::{Protocol, SixTripletKind, TripletKind};

pub const DEFAULT_TRIALS: usize = 10;
pub const DEFAULT_DURATION: f64 = 100.0;
pub const DEFAULT_REPETITIONS: usize = 60;

/// `t_post − t_pre` from −100 ms to 100 ms in 5 ms steps, without 0
/// (coincident spikes cannot be generated).
pub fn default_dt_grid() -> Vec<f64> {
    (-20..=20).filter(|&k| k != 0).map(|k| k as f64 * 5e-3).collect()
}

/// Pairing frequencies in Hz.
pub fn default_rho_grid() -> Vec<f64> {
    let mut g = vec![0.1];
    g.extend((1..=10).map(|k| k as f64 * 5.0));
    g
}

/// Postsynaptic rates from 0 to 50 Hz in 2 Hz steps.
pub fn default_rho_post_grid() -> Vec<f64> {
    (0..=25).map(|k| k as f64 * 2.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub label: Option<String>,
    pub coords: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub trials: usize,
}

impl SweepPoint {
    /// Standard error of the mean.
    pub fn sem(&self) -> f64 {
        self.std / (self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub coords: Vec<f64>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Names of the swept variables, one per coordinate.
    pub axes: Vec<String>,
    pub points: Vec<SweepPoint>,
    pub skipped: Vec<SkippedPoint>,
}

impl SweepResult {
    fn new(axes: &[&str]) -> Self {
        Self {
            axes: axes.iter().map(|s| s.to_string()).collect(),
            points: Vec::new(),
            skipped: Vec::new(),
        }
    }

    pub fn means(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.mean).collect()
    }

    /// Points whose coordinate `axis` equals `value`.
    pub fn select(&self, axis: usize, value: f64) -> Vec<&SweepPoint> {
        self.points.iter().filter(|p| p.coords[axis] == value).collect()
    }

    fn push(&mut self, coords: Vec<f64>, label: Option<String>, outcome: Result<Vec<f64>>) {
        match outcome {
            Ok(samples) => {
                let (mean, std) = mean_std(&samples);
                self.points.push(SweepPoint {
                    label,
                    coords,
                    mean,
                    std,
                    trials: samples.len(),
                });
            }
            Err(e) => self.skipped.push(SkippedPoint {
                coords,
                reason: e.to_string(),
            }),
        }
    }
}

/// Mean and sample standard deviation. Identical samples give exactly
/// `(x, 0)`; a single sample has zero spread.
pub fn mean_std(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    if samples.iter().all(|&x| x == samples[0]) {
        return (samples[0], 0.0);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Rates at which a curve changes sign from negative to non-negative,
/// linearly interpolated between neighbouring points on axis 0.
pub fn upward_crossings(points: &[SweepPoint]) -> Vec<f64> {
    points
        .windows(2)
        .filter(|w| w[0].mean < 0.0 && w[1].mean >= 0.0)
        .map(|w| {
            let (x0, x1) = (w[0].coords[0], w[1].coords[0]);
            x0 + (x1 - x0) * (-w[0].mean) / (w[1].mean - w[0].mean)
        })
        .collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidProtocol("trials must be at least 1".into()));
    }
    Ok(())
}

/// Runs a deterministic protocol once and replicates the value per trial.
fn deterministic(rule: &Rule, protocol: &Protocol, trials: usize) -> Result<Vec<f64>> {
    let trains = protocol.generate()?;
    Ok(vec![rule.total(&trains); trials])
}

fn deterministic_sweep(
    rule: &Rule,
    axes: &[&str],
    items: Vec<(Vec<f64>, Option<String>, Result<Protocol>)>,
    trials: usize,
) -> Result<SweepResult> {
    check_trials(trials)?;
    rule.validate()?;
    let outcomes = par_map(items, |(coords, label, protocol)| {
        let outcome = protocol.and_then(|p| deterministic(rule, &p, trials));
        (coords, label, outcome)
    });
    let mut result = SweepResult::new(axes);
    for (coords, label, outcome) in outcomes {
        result.push(coords, label, outcome);
    }
    Ok(result)
}

/// Learning window: pairing protocol at each `dt` (axis `dt`, seconds).
pub fn stdp_window(rule: &Rule, dt_grid: &[f64], rho: f64, n_pairs: usize, trials: usize) -> Result<SweepResult> {
    let items = dt_grid
        .iter()
        .map(|&dt| (vec![dt], None, Ok(Protocol::Pairing { dt, rho, n_pairs })))
        .collect();
    deterministic_sweep(rule, &["dt"], items, trials)
}

/// Pairing response versus repetition rate, one curve per `dt`
/// (axes `dt`, `rho`).
pub fn frequency_sweep(
    rule: &Rule,
    dt_set: &[f64],
    rho_grid: &[f64],
    n_pairs: usize,
    trials: usize,
) -> Result<SweepResult> {
    let items = dt_set
        .iter()
        .flat_map(|&dt| {
            rho_grid
                .iter()
                .map(move |&rho| (vec![dt, rho], None, Ok(Protocol::Pairing { dt, rho, n_pairs })))
        })
        .collect();
    deterministic_sweep(rule, &["dt", "rho"], items, trials)
}

/// Triplet protocol over `(dt1, dt2)` pairs (axes `dt1`, `dt2`).
pub fn triplet_grid(
    rule: &Rule,
    kind: TripletKind,
    timings: &[(f64, f64)],
    rho: f64,
    n: usize,
    trials: usize,
) -> Result<SweepResult> {
    let items = timings
        .iter()
        .map(|&(dt1, dt2)| {
            (
                vec![dt1, dt2],
                Some(kind.name().to_string()),
                Ok(Protocol::Triplet { kind, dt1, dt2, rho, n }),
            )
        })
        .collect();
    deterministic_sweep(rule, &["dt1", "dt2"], items, trials)
}

/// Quadruplet protocol versus the pair-midpoint separation `T` (axis `T`).
pub fn quadruplet_sweep(
    rule: &Rule,
    dt: f64,
    t_grid: &[f64],
    rho: f64,
    n: usize,
    trials: usize,
) -> Result<SweepResult> {
    let items = t_grid
        .iter()
        .map(|&t| (vec![t], None, Ok(Protocol::Quadruplet { dt, t, rho, n })))
        .collect();
    deterministic_sweep(rule, &["T"], items, trials)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SixTripletValue {
    pub kind: SixTripletKind,
    pub dt1: f64,
    pub dt2: f64,
    pub dw: f64,
}

/// All six triplet orderings for spikes separated by `gap1` then `gap2`.
pub fn six_triplet_matrix(rule: &Rule, gap1: f64, gap2: f64, rho: f64, n: usize) -> Result<[SixTripletValue; 6]> {
    rule.validate()?;
    let mut out = [SixTripletValue {
        kind: SixTripletKind::PrePostPost,
        dt1: 0.0,
        dt2: 0.0,
        dw: 0.0,
    }; 6];
    for (slot, kind) in out.iter_mut().zip(SixTripletKind::ALL) {
        let (dt1, dt2) = kind.timings_from_gaps(gap1, gap2);
        let trains = Protocol::SixTriplet { kind, dt1, dt2, rho, n }.generate()?;
        *slot = SixTripletValue {
            kind,
            dt1,
            dt2,
            dw: rule.total(&trains),
        };
    }
    Ok(out)
}

/// Six orderings for every `(gap1, gap2)`; points are labelled with the
/// ordering and carry coordinates `gap1, gap2, dt1, dt2`.
pub fn six_triplet_grid(rule: &Rule, gaps: &[(f64, f64)], rho: f64, n: usize, trials: usize) -> Result<SweepResult> {
    let items = gaps
        .iter()
        .flat_map(|&(g1, g2)| {
            SixTripletKind::ALL.into_iter().map(move |kind| {
                let (dt1, dt2) = kind.timings_from_gaps(g1, g2);
                (
                    vec![g1, g2, dt1, dt2],
                    Some(kind.name().to_string()),
                    Ok(Protocol::SixTriplet { kind, dt1, dt2, rho, n }),
                )
            })
        })
        .collect();
    deterministic_sweep(rule, &["gap1", "gap2", "dt1", "dt2"], items, trials)
}

fn check_minimal(params: &TripletParams) -> Result<()> {
    params.validate()?;
    if params.a3_minus != 0.0 {
        return Err(Error::InvalidParams(
            "Poisson BCM sweeps use the minimal rule (a3_minus = 0)".into(),
        ));
    }
    Ok(())
}

fn poisson_sweep(
    params: &TripletParams,
    axis: &str,
    rates: Vec<(f64, f64)>,
    duration: f64,
    trials: usize,
    seed: u64,
) -> Result<SweepResult> {
    check_minimal(params)?;
    check_trials(trials)?;
    if !(duration > 0.0) {
        return Err(Error::InvalidProtocol(format!("duration must be > 0, got {duration}")));
    }
    let rule = Rule::Triplet(*params);
    let items: Vec<(usize, usize, f64, f64)> = rates
        .iter()
        .enumerate()
        .flat_map(|(g, &(pre, post))| (0..trials).map(move |k| (g, k, pre, post)))
        .collect();
    let drifts = par_map(items, |(g, k, rho_pre, rho_post)| {
        let protocol = Protocol::Poisson {
            rho_pre,
            rho_post,
            duration,
            seed: derive_seed(seed, (g * trials + k) as u64),
            post_from_pre: false,
        };
        protocol.generate().map(|trains| rule.total(&trains) / duration)
    });
    let mut result = SweepResult::new(&[axis]);
    for (g, chunk) in drifts.chunks(trials).enumerate() {
        let x = if axis == "rho_post" { rates[g].1 } else { rates[g].0 };
        let outcome: Result<Vec<f64>> = chunk.iter().cloned().collect();
        result.push(vec![x], None, outcome);
    }
    Ok(result)
}

/// Poisson protocol at fixed `rho_pre`, sweeping `rho_post` (axis
/// `rho_post`). Means are drifts in weight per second.
pub fn bcm_curve(
    params: &TripletParams,
    rho_pre: f64,
    rho_post_grid: &[f64],
    duration: f64,
    trials: usize,
    seed: u64,
) -> Result<SweepResult> {
    let rates = rho_post_grid.iter().map(|&r| (rho_pre, r)).collect();
    poisson_sweep(params, "rho_post", rates, duration, trials, seed)
}

/// Poisson protocol with `rho_post = rho_pre` at every grid rate (axis
/// `rho`).
pub fn bcm_presynaptic_curve(
    params: &TripletParams,
    rho_grid: &[f64],
    duration: f64,
    trials: usize,
    seed: u64,
) -> Result<SweepResult> {
    let rates = rho_grid.iter().map(|&r| (r, r)).collect();
    poisson_sweep(params, "rho", rates, duration, trials, seed)
}

/// Which protocol family a [`SweepSpec`] runs, with its grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SweepFamily {
    Window {
        dt: Vec<f64>,
        rho: f64,
        n_pairs: usize,
    },
    Frequency {
        dt: Vec<f64>,
        rho: Vec<f64>,
        n_pairs: usize,
    },
    Triplet {
        kind: TripletKind,
        timings: Vec<(f64, f64)>,
        rho: f64,
        n: usize,
    },
    Quadruplet {
        dt: f64,
        t: Vec<f64>,
        rho: f64,
        n: usize,
    },
    SixTriplet {
        gaps: Vec<(f64, f64)>,
        rho: f64,
        n: usize,
    },
    Bcm {
        rho_pre: f64,
        rho_post: Vec<f64>,
        duration: f64,
    },
    BcmPresynaptic {
        rho: Vec<f64>,
        duration: f64,
    },
}

/// A complete sweep request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub rule: Rule,
    pub family: SweepFamily,
    pub trials: usize,
    pub seed: u64,
}

impl SweepSpec {
    pub fn run(&self) -> Result<SweepResult> {
        let rule = &self.rule;
        let trials = self.trials;
        let grid_nonempty = |len: usize| {
            if len == 0 {
                Err(Error::InvalidProtocol("sweep grid is empty".into()))
            } else {
                Ok(())
            }
        };
        let triplet = || match rule {
            Rule::Triplet(p) => Ok(p),
            _ => Err(Error::InvalidParams("Poisson sweeps need the triplet rule".into())),
        };
        match &self.family {
            SweepFamily::Window { dt, rho, n_pairs } => {
                grid_nonempty(dt.len())?;
                stdp_window(rule, dt, *rho, *n_pairs, trials)
            }
            SweepFamily::Frequency { dt, rho, n_pairs } => {
                grid_nonempty(dt.len().min(rho.len()))?;
                frequency_sweep(rule, dt, rho, *n_pairs, trials)
            }
            SweepFamily::Triplet { kind, timings, rho, n } => {
                grid_nonempty(timings.len())?;
                triplet_grid(rule, *kind, timings, *rho, *n, trials)
            }
            SweepFamily::Quadruplet { dt, t, rho, n } => {
                grid_nonempty(t.len())?;
                quadruplet_sweep(rule, *dt, t, *rho, *n, trials)
            }
            SweepFamily::SixTriplet { gaps, rho, n } => {
                grid_nonempty(gaps.len())?;
                six_triplet_grid(rule, gaps, *rho, *n, trials)
            }
            SweepFamily::Bcm {
                rho_pre,
                rho_post,
                duration,
            } => {
                grid_nonempty(rho_post.len())?;
                bcm_curve(triplet()?, *rho_pre, rho_post, *duration, trials, self.seed)
            }
            SweepFamily::BcmPresynaptic { rho, duration } => {
                grid_nonempty(rho.len())?;
                bcm_presynaptic_curve(triplet()?, rho, *duration, trials, self.seed)
            }
        }
    }
}
