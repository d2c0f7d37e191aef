//! Monte Carlo perturbation of rule parameters.
//!
//! A threshold-voltage shift `δ` scales a subthreshold current by
//! `exp(δ / v_scale)`. Amplitudes are currents, and time constants are
//! inversely proportional to their bias currents, so amplitudes are scaled
//! by `exp(δ / v_scale)` and time constants by `exp(−δ / v_scale)`. Each
//! parameter gets an independent draw.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::par_map;
use crate::fitting::{fit_distorted, Dataset, Distortion, FitOptions, FitResult, ParamMask, PreparedDataset};
use crate::rules::{ParamId, TripletParams};
use crate::seed::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbationSpec {
    /// One-sigma threshold-voltage deviation, volts.
    pub sigma_v: f64,
    /// Subthreshold exponential scale, volts.
    pub v_scale: f64,
    pub n_runs: usize,
    pub seed: u64,
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        Self {
            sigma_v: 0.030,
            v_scale: 0.032,
            n_runs: 1000,
            seed: 0,
        }
    }
}

impl PerturbationSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_v >= 0.0) || !self.sigma_v.is_finite() {
            return Err(Error::InvalidParams(format!(
                "sigma_v must be >= 0, got {}",
                self.sigma_v
            )));
        }
        if !(self.v_scale > 0.0) || !self.v_scale.is_finite() {
            return Err(Error::InvalidParams(format!(
                "v_scale must be > 0, got {}",
                self.v_scale
            )));
        }
        if self.n_runs == 0 {
            return Err(Error::InvalidParams("n_runs must be at least 1".into()));
        }
        Ok(())
    }

    /// Threshold shifts (volts) for run `run`, one per parameter in
    /// [`ParamId`] order.
    pub fn voltage_shifts(&self, run: usize) -> [f64; 8] {
        let mut out = [0.0; 8];
        if self.sigma_v == 0.0 {
            return out;
        }
        let normal = Normal::new(0.0, self.sigma_v).expect("validated sigma");
        let mut rng = stream_rng(self.seed, run as u64);
        for v in &mut out {
            *v = normal.sample(&mut rng);
        }
        out
    }

    /// The multiplicative distortion of run `run`.
    pub fn distortion(&self, run: usize) -> Distortion {
        let shifts = self.voltage_shifts(run);
        distortion_from_shifts(&shifts, self.v_scale)
    }
}

/// Maps per-parameter threshold shifts to log factors.
pub fn distortion_from_shifts(shifts: &[f64; 8], v_scale: f64) -> Distortion {
    let mut log_factors = [0.0; 8];
    for id in ParamId::ALL {
        let x = shifts[id.index()] / v_scale;
        log_factors[id.index()] = if id.is_time_constant() { -x } else { x };
    }
    Distortion { log_factors }
}

/// `params` as seen through the mismatch of run `run`.
pub fn perturb(params: &TripletParams, spec: &PerturbationSpec, run: usize) -> TripletParams {
    spec.distortion(run).apply(params)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRun {
    pub index: usize,
    pub nmse: f64,
    /// Set when the prediction or its NMSE was not finite.
    pub flagged: bool,
    pub distortion: Distortion,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub n: usize,
    pub flagged: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub q05: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q95: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub spec: PerturbationSpec,
    pub baseline: f64,
    pub runs: Vec<McRun>,
    pub summary: McSummary,
    /// Run with the largest NMSE; lowest index on ties.
    pub worst: usize,
}

impl McReport {
    pub fn worst_run(&self) -> &McRun {
        &self.runs[self.worst]
    }
}

/// Linear-interpolation quantile of sorted data (`q` in `[0, 1]`).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let h = q.clamp(0.0, 1.0) * (n - 1) as f64;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

/// Summary over unflagged runs.
pub fn summarize(runs: &[McRun]) -> McSummary {
    let mut v: Vec<f64> = runs.iter().filter(|r| !r.flagged).map(|r| r.nmse).collect();
    v.sort_by(f64::total_cmp);
    let mean = if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    };
    McSummary {
        n: runs.len(),
        flagged: runs.len() - v.len(),
        min: v.first().copied().unwrap_or(f64::NAN),
        max: v.last().copied().unwrap_or(f64::NAN),
        mean,
        q05: quantile(&v, 0.05),
        q25: quantile(&v, 0.25),
        median: quantile(&v, 0.5),
        q75: quantile(&v, 0.75),
        q95: quantile(&v, 0.95),
    }
}

/// NMSE of the perturbed parameters for every run.
pub fn monte_carlo(dataset: &Dataset, params: &TripletParams, spec: &PerturbationSpec) -> Result<McReport> {
    spec.validate()?;
    params.validate()?;
    let prepared = PreparedDataset::new(dataset)?;
    let baseline = prepared.nmse(params);
    let runs = par_map((0..spec.n_runs).collect(), |index| {
        let distortion = spec.distortion(index);
        let nmse = prepared.nmse(&distortion.apply(params));
        McRun {
            index,
            nmse,
            flagged: !nmse.is_finite(),
            distortion,
        }
    });
    let worst = runs
        .iter()
        .filter(|r| !r.flagged)
        .fold(None::<&McRun>, |best, r| match best {
            Some(b) if r.nmse <= b.nmse => Some(b),
            _ => Some(r),
        })
        .or(runs.first())
        .map(|r| r.index)
        .unwrap_or(0);
    let summary = summarize(&runs);
    Ok(McReport {
        spec: *spec,
        baseline,
        runs,
        summary,
        worst,
    })
}

/// Refits the free parameters with `distortion` held fixed, starting from
/// `initial`. Never worse than the distorted starting point.
pub fn retune(
    dataset: &Dataset,
    distortion: &Distortion,
    initial: &TripletParams,
    mask: &ParamMask,
    options: &FitOptions,
) -> Result<FitResult> {
    fit_distorted(dataset, initial, mask, options, distortion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitting::synthetic;
    use approx::assert_relative_eq;

    fn small_spec(sigma_v: f64) -> PerturbationSpec {
        PerturbationSpec {
            sigma_v,
            n_runs: 40,
            seed: 11,
            ..Default::default()
        }
    }

    #[test]
    fn zero_sigma_is_identity() {
        let p = TripletParams::hippocampal_style();
        assert_eq!(perturb(&p, &small_spec(0.0), 5), p);
    }

    #[test]
    fn replay_is_identical() {
        let p = TripletParams::hippocampal_style();
        let s = small_spec(0.03);
        assert_eq!(perturb(&p, &s, 7), perturb(&p, &s, 7));
        assert_ne!(perturb(&p, &s, 7), perturb(&p, &s, 8));
    }

    #[test]
    fn thirty_millivolt_shift_factor() {
        let mut shifts = [0.0; 8];
        shifts[ParamId::A3Plus.index()] = 0.030;
        shifts[ParamId::TauY.index()] = 0.030;
        let d = distortion_from_shifts(&shifts, 0.032);
        assert_relative_eq!(d.factor(ParamId::A3Plus), 0.9375f64.exp(), max_relative = 1e-15);
        assert_relative_eq!(d.factor(ParamId::A3Plus), 2.5536, max_relative = 1e-4);
        assert_relative_eq!(d.factor(ParamId::TauY), (-0.9375f64).exp(), max_relative = 1e-15);
        assert_eq!(d.factor(ParamId::A2Plus), 1.0);
    }

    #[test]
    fn zero_sigma_campaign_matches_baseline() {
        let p = TripletParams::hippocampal_style();
        let ds = synthetic::synthetic_dataset("h", &p, &synthetic::hippocampal_protocols(), 0.1, Some(1)).unwrap();
        let r = monte_carlo(&ds, &p, &small_spec(0.0)).unwrap();
        assert!(r.runs.iter().all(|run| run.nmse == r.baseline));
        assert_eq!(r.worst, 0);
    }

    #[test]
    fn summary_is_consistent_with_runs() {
        let p = TripletParams::hippocampal_style();
        let ds = synthetic::hippocampal_dataset(&p);
        let r = monte_carlo(&ds, &p, &small_spec(0.03)).unwrap();
        let mut v: Vec<f64> = r.runs.iter().map(|x| x.nmse).collect();
        v.sort_by(f64::total_cmp);
        assert_eq!(r.summary.min, v[0]);
        assert_eq!(r.summary.max, v[v.len() - 1]);
        assert_eq!(r.worst_run().nmse, r.summary.max);
        assert_eq!(r.summary.median, quantile(&v, 0.5));
    }

    #[test]
    fn quantile_hand_values() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&[7.0], 0.3), 7.0);
    }

    #[test]
    fn retune_with_no_distortion_keeps_the_fit() {
        let p = TripletParams::hippocampal_style();
        let ds = synthetic::hippocampal_dataset(&p);
        let r = retune(
            &ds,
            &Distortion::identity(),
            &p,
            &ParamMask::hippocampal(),
            &FitOptions::default(),
        )
        .unwrap();
        assert!(r.nmse < 1e-20);
    }
}
