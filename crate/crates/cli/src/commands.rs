//! Command implementations. Each command writes its files into an
//! [`OutputDir`] and finishes with a manifest.

use std::path::{Path, PathBuf};

use serde::Serialize;
use stdp_core::experiments::{upward_crossings, SweepFamily, SweepResult, SweepSpec};
use stdp_core::fitting::{fit, multi_start_fit, predict, Dataset, FitResult, InitBounds, ParamMask};
use stdp_core::robustness::{monte_carlo, retune, PerturbationSpec};
use stdp_core::rules::BcmSpec;
use stdp_core::spike::{SixTripletKind, TripletKind};
use stdp_core::{ParamId, Rule, TripletParams};

use crate::config::{Preset, RuleConfig, RunConfig};
use crate::dataset::{protocol_fields, read_dataset};
use crate::output::{fmt_f64, sha256_hex, OutputDir, RunManifest, Table};
use crate::CliError;

const MS: f64 = 1e-3;

/// Default output directory when neither `--out`, the config nor the
/// environment names one.
pub const DEFAULT_OUT_DIR: &str = "stdp-out";
/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "STDP_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Window,
    Freq,
    Triplet,
    Quad,
    Six,
    Bcm,
    Fit,
    Mc,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Window => "window",
            Self::Freq => "freq",
            Self::Triplet => "triplet",
            Self::Quad => "quad",
            Self::Six => "six",
            Self::Bcm => "bcm",
            Self::Fit => "fit",
            Self::Mc => "mc",
        }
    }

    /// Parameter preset used when the config has no `[rule]` preset.
    pub fn default_preset(self) -> Preset {
        match self {
            Self::Freq | Self::Bcm => Preset::VisualCortex,
            _ => Preset::Hippocampal,
        }
    }
}

/// Command-line overrides, applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub trials: Option<usize>,
    pub retune: bool,
    pub dataset: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
struct DatasetRef {
    path: String,
    name: String,
    points: usize,
    sha256: String,
}

#[derive(Debug, Clone, Serialize)]
struct ResolvedRun<'a> {
    config: &'a RunConfig,
    dataset: Option<DatasetRef>,
}

/// Applies overrides and picks the output directory:
/// `--out`, then `out_dir` from the config, then the environment, then
/// [`DEFAULT_OUT_DIR`].
pub fn resolve(mut cfg: RunConfig, cmd: Command, ov: &Overrides) -> Result<RunConfig, CliError> {
    if let Some(seed) = ov.seed {
        cfg.seed = Some(seed);
    }
    cfg.seed.get_or_insert(0);
    let out = ov
        .out
        .clone()
        .or(cfg.out_dir.take())
        .or_else(|| {
            std::env::var_os(OUT_DIR_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
        })
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    cfg.out_dir = Some(out);
    if let Some(t) = ov.trials {
        if t == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        match cmd {
            Command::Window => cfg.window.trials = t,
            Command::Freq => cfg.freq.trials = t,
            Command::Triplet => cfg.triplet.trials = t,
            Command::Quad => cfg.quad.trials = t,
            Command::Six => cfg.six.trials = t,
            Command::Bcm => cfg.bcm.trials = t,
            Command::Fit | Command::Mc => {
                return Err(CliError::Usage(format!("--trials does not apply to `{}`", cmd.name())))
            }
        }
    }
    if ov.retune {
        if cmd != Command::Mc {
            return Err(CliError::Usage("--retune only applies to `mc`".into()));
        }
        cfg.mc.retune = true;
    }
    Ok(cfg)
}

/// Runs one command with a resolved config and returns its manifest.
pub fn run(cmd: Command, cfg: &RunConfig, dataset: Option<&Path>) -> Result<RunManifest, CliError> {
    let seed = cfg.seed.unwrap_or(0);
    let out_dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let rule_cfg = cfg.rule.clone().unwrap_or_default();
    let preset = cmd.default_preset();
    let mut out = OutputDir::create(&out_dir)?;
    let mut dataset_ref = None;
    match cmd {
        Command::Window => window(cfg, &rule_cfg.rule(preset)?, &mut out)?,
        Command::Freq => freq(cfg, &rule_cfg.rule(preset)?, &mut out)?,
        Command::Triplet => triplet(cfg, &rule_cfg.rule(preset)?, &mut out)?,
        Command::Quad => quad(cfg, &rule_cfg.rule(preset)?, &mut out)?,
        Command::Six => six(cfg, &rule_cfg.rule(preset)?, &mut out)?,
        Command::Bcm => bcm(cfg, &triplet_only(&rule_cfg, preset, cmd)?, seed, &mut out)?,
        Command::Fit | Command::Mc => {
            let path = dataset.ok_or_else(|| CliError::Usage(format!("`{}` needs --dataset", cmd.name())))?;
            let ds = read_dataset(path)?;
            let bytes = std::fs::read(path).map_err(|e| CliError::Io(e.to_string()))?;
            dataset_ref = Some(DatasetRef {
                path: path.display().to_string(),
                name: ds.name.clone(),
                points: ds.points.len(),
                sha256: sha256_hex(&bytes),
            });
            let initial = triplet_only(&rule_cfg, preset, cmd)?;
            if cmd == Command::Fit {
                fit_cmd(cfg, &ds, &initial, seed, &mut out)?;
            } else {
                mc_cmd(cfg, &ds, &initial, seed, &mut out)?;
            }
        }
    }
    let resolved = ResolvedRun {
        config: cfg,
        dataset: dataset_ref,
    };
    out.finish(cmd.name(), seed, &resolved)
}

fn triplet_only(rule: &RuleConfig, preset: Preset, cmd: Command) -> Result<TripletParams, CliError> {
    match rule.rule(preset)? {
        Rule::Triplet(p) => {
            p.validate()?;
            Ok(p)
        }
        _ => Err(CliError::Usage(format!(
            "config key `rule.kind`: `{}` needs the triplet rule",
            cmd.name()
        ))),
    }
}

fn seconds(ms: &[f64]) -> Vec<f64> {
    ms.iter().map(|v| v * MS).collect()
}

/// The configured millisecond value that produced `s`.
fn back_to_ms(grid_ms: &[f64], s: f64) -> f64 {
    grid_ms.iter().copied().find(|v| v * MS == s).unwrap_or(s / MS)
}

fn stat_cells(p: &stdp_core::experiments::SweepPoint) -> [String; 3] {
    [fmt_f64(p.mean), fmt_f64(p.std), p.trials.to_string()]
}

fn note_skipped(out: &mut OutputDir, what: &str, res: &SweepResult) {
    for s in &res.skipped {
        let coords: Vec<String> = s.coords.iter().map(|c| fmt_f64(*c)).collect();
        let msg = format!(
            "{what}: skipped point ({}) [{}]: {}",
            res.axes.join(", "),
            coords.join(", "),
            s.reason
        );
        eprintln!("warning: {msg}");
        out.note(msg);
    }
}

fn sweep(rule: &Rule, family: SweepFamily, trials: usize, seed: u64) -> Result<SweepResult, CliError> {
    Ok(SweepSpec {
        rule: *rule,
        family,
        trials,
        seed,
    }
    .run()?)
}

fn window(cfg: &RunConfig, rule: &Rule, out: &mut OutputDir) -> Result<(), CliError> {
    let c = &cfg.window;
    let family = SweepFamily::Window {
        dt: seconds(&c.dt_ms),
        rho: c.rho_hz,
        n_pairs: c.n_pairs,
    };
    let res = sweep(rule, family, c.trials, 0)?;
    let mut t = Table::new(&["dt_ms", "mean_dw", "std_dw", "trials"]);
    for p in &res.points {
        let [m, s, n] = stat_cells(p);
        t.push(vec![fmt_f64(back_to_ms(&c.dt_ms, p.coords[0])), m, s, n]);
    }
    note_skipped(out, "window", &res);
    out.write_table("window.csv", &t)
}

fn freq(cfg: &RunConfig, rule: &Rule, out: &mut OutputDir) -> Result<(), CliError> {
    let c = &cfg.freq;
    for &dt_ms in &c.dt_ms {
        let family = SweepFamily::Frequency {
            dt: vec![dt_ms * MS],
            rho: c.rho_hz.clone(),
            n_pairs: c.n_pairs,
        };
        let res = sweep(rule, family, c.trials, 0)?;
        let mut t = Table::new(&["rho_hz", "mean_dw", "std_dw", "trials"]);
        for p in &res.points {
            let [m, s, n] = stat_cells(p);
            t.push(vec![fmt_f64(p.coords[1]), m, s, n]);
        }
        note_skipped(out, "freq", &res);
        out.write_table(&format!("freq_dt_{}ms.csv", fmt_f64(dt_ms)), &t)?;
    }
    Ok(())
}

fn triplet(cfg: &RunConfig, rule: &Rule, out: &mut OutputDir) -> Result<(), CliError> {
    let c = &cfg.triplet;
    for (kind, grid) in [
        (TripletKind::PrePostPre, &c.pre_post_pre_ms),
        (TripletKind::PostPrePost, &c.post_pre_post_ms),
    ] {
        if grid.is_empty() {
            continue;
        }
        let a: Vec<f64> = grid.iter().map(|g| g.0).collect();
        let b: Vec<f64> = grid.iter().map(|g| g.1).collect();
        let family = SweepFamily::Triplet {
            kind,
            timings: grid.iter().map(|&(x, y)| (x * MS, y * MS)).collect(),
            rho: c.rho_hz,
            n: c.n,
        };
        let res = sweep(rule, family, c.trials, 0)?;
        let mut t = Table::new(&["dt1_ms", "dt2_ms", "mean_dw", "std_dw", "trials"]);
        for p in &res.points {
            let [m, s, n] = stat_cells(p);
            t.push(vec![
                fmt_f64(back_to_ms(&a, p.coords[0])),
                fmt_f64(back_to_ms(&b, p.coords[1])),
                m,
                s,
                n,
            ]);
        }
        note_skipped(out, "triplet", &res);
        out.write_table(&format!("triplet_{}.csv", kind.name()), &t)?;
    }
    Ok(())
}

fn quad(cfg: &RunConfig, rule: &Rule, out: &mut OutputDir) -> Result<(), CliError> {
    let c = &cfg.quad;
    let family = SweepFamily::Quadruplet {
        dt: c.dt_ms * MS,
        t: seconds(&c.t_ms),
        rho: c.rho_hz,
        n: c.n,
    };
    let res = sweep(rule, family, c.trials, 0)?;
    let mut t = Table::new(&["t_ms", "mean_dw", "std_dw", "trials"]);
    for p in &res.points {
        let [m, s, n] = stat_cells(p);
        t.push(vec![fmt_f64(back_to_ms(&c.t_ms, p.coords[0])), m, s, n]);
    }
    note_skipped(out, "quad", &res);
    out.write_table("quad.csv", &t)
}

fn six(cfg: &RunConfig, rule: &Rule, out: &mut OutputDir) -> Result<(), CliError> {
    let c = &cfg.six;
    let g1: Vec<f64> = c.gaps_ms.iter().map(|g| g.0).collect();
    let g2: Vec<f64> = c.gaps_ms.iter().map(|g| g.1).collect();
    let family = SweepFamily::SixTriplet {
        gaps: c.gaps_ms.iter().map(|&(x, y)| (x * MS, y * MS)).collect(),
        rho: c.rho_hz,
        n: c.n,
    };
    let res = sweep(rule, family, c.trials, 0)?;
    note_skipped(out, "six", &res);
    for kind in SixTripletKind::ALL {
        let mut t = Table::new(&["gap1_ms", "gap2_ms", "dt1_ms", "dt2_ms", "mean_dw", "std_dw", "trials"]);
        for p in res.points.iter().filter(|p| p.label.as_deref() == Some(kind.name())) {
            let [m, s, n] = stat_cells(p);
            t.push(vec![
                fmt_f64(back_to_ms(&g1, p.coords[0])),
                fmt_f64(back_to_ms(&g2, p.coords[1])),
                fmt_f64(p.coords[2] / MS),
                fmt_f64(p.coords[3] / MS),
                m,
                s,
                n,
            ]);
        }
        out.write_table(&format!("six_{}.csv", kind.name()), &t)?;
    }
    Ok(())
}

fn bcm(cfg: &RunConfig, params: &TripletParams, seed: u64, out: &mut OutputDir) -> Result<(), CliError> {
    let c = &cfg.bcm;
    if params.a3_minus != 0.0 {
        return Err(CliError::Usage(
            "config key `rule.a3_minus`: the BCM sweep uses the minimal rule, set it to 0".into(),
        ));
    }
    let values = if c.a3_plus.is_empty() {
        vec![0.8 * params.a3_plus, params.a3_plus, 1.25 * params.a3_plus]
    } else {
        c.a3_plus.clone()
    };
    let mut summary = Table::new(&["curve", "a3_plus", "theta_hz", "crossing_hz"]);
    for (i, &a3) in values.iter().enumerate() {
        if a3 <= 0.0 || !a3.is_finite() {
            return Err(CliError::Usage(format!(
                "config key `bcm.a3_plus`: values must be > 0, got {a3}"
            )));
        }
        let p = TripletParams { a3_plus: a3, ..*params };
        let family = SweepFamily::Bcm {
            rho_pre: c.rho_pre_hz,
            rho_post: c.rho_post_hz.clone(),
            duration: c.duration_s,
        };
        // every curve reuses the same spike trains
        let res = sweep(&Rule::Triplet(p), family, c.trials, seed)?;
        let mut t = Table::new(&["rho_post_hz", "mean_drift_per_s", "std_drift_per_s", "trials"]);
        for pt in &res.points {
            let [m, s, n] = stat_cells(pt);
            t.push(vec![fmt_f64(pt.coords[0]), m, s, n]);
        }
        note_skipped(out, "bcm", &res);
        let name = format!("bcm_curve_{i}.csv");
        out.write_table(&name, &t)?;
        let theta = BcmSpec::from_minimal(&p)?.theta;
        let crossing = upward_crossings(&res.points)
            .first()
            .map(|x| fmt_f64(*x))
            .unwrap_or_default();
        summary.push(vec![name, fmt_f64(a3), fmt_f64(theta), crossing]);
    }
    out.write_table("bcm_thresholds.csv", &summary)?;
    if c.presynaptic {
        let family = SweepFamily::BcmPresynaptic {
            rho: c.rho_post_hz.clone(),
            duration: c.duration_s,
        };
        let res = sweep(&Rule::Triplet(*params), family, c.trials, seed)?;
        let mut t = Table::new(&["rho_hz", "mean_drift_per_s", "std_drift_per_s", "trials"]);
        for pt in &res.points {
            let [m, s, n] = stat_cells(pt);
            t.push(vec![fmt_f64(pt.coords[0]), m, s, n]);
        }
        note_skipped(out, "bcm presynaptic", &res);
        out.write_table("bcm_presynaptic.csv", &t)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct ParamEntry {
    name: &'static str,
    bias_alias: &'static str,
    /// Model units: dimensionless amplitude or seconds.
    value: f64,
    /// Amplitude, or time constant in milliseconds.
    display_value: f64,
    unit: &'static str,
    free: bool,
}

fn param_entries(p: &TripletParams, mask: &ParamMask) -> Vec<ParamEntry> {
    ParamId::ALL
        .iter()
        .map(|&id| {
            let v = p.get(id);
            ParamEntry {
                name: id.name(),
                bias_alias: id.bias_alias(),
                value: v,
                display_value: if id.is_time_constant() { v / MS } else { v },
                unit: if id.is_time_constant() { "ms" } else { "1" },
                free: mask.is_free(id),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
struct FitReport {
    dataset: String,
    points: usize,
    nmse: f64,
    initial_nmse: f64,
    iterations: usize,
    evaluations: usize,
    converged: bool,
    starts: usize,
    parameters: Vec<ParamEntry>,
    initial: Vec<ParamEntry>,
}

/// Fit from the configured point, plus random starts when `fit.starts > 1`.
fn run_fit(
    cfg: &RunConfig,
    ds: &Dataset,
    initial: &TripletParams,
    seed: u64,
) -> Result<(FitResult, ParamMask, usize), CliError> {
    let mask = cfg.fit.mask.resolve(initial)?;
    let starts = cfg.fit.starts.unwrap_or(1);
    if starts == 0 {
        return Err(CliError::Usage("config key `fit.starts`: must be at least 1".into()));
    }
    let opts = &cfg.fit.options;
    let mut best = fit(ds, initial, &mask, opts)?;
    if starts > 1 {
        let other = multi_start_fit(ds, initial, &mask, &InitBounds::default(), starts - 1, seed, opts)?;
        if other.nmse < best.nmse {
            best = other;
        }
    }
    Ok((best, mask, starts))
}

fn residual_table(ds: &Dataset, params: &TripletParams) -> Result<Table, CliError> {
    let preds = predict(params, ds)?;
    let mut t = Table::new(&[
        "index", "protocol", "a_ms", "b_ms", "rho_hz", "reps", "dw_exp", "sem", "dw_model", "z",
    ]);
    for (i, (pt, m)) in ds.points.iter().zip(&preds).enumerate() {
        let (tag, a, b, rho, n) = protocol_fields(&pt.protocol);
        t.push(vec![
            i.to_string(),
            tag,
            fmt_f64(a),
            b.map(fmt_f64).unwrap_or_default(),
            fmt_f64(rho),
            n.to_string(),
            fmt_f64(pt.dw_exp),
            fmt_f64(pt.sem),
            fmt_f64(*m),
            fmt_f64((pt.dw_exp - m) / pt.sem),
        ]);
    }
    Ok(t)
}

fn fit_cmd(
    cfg: &RunConfig,
    ds: &Dataset,
    initial: &TripletParams,
    seed: u64,
    out: &mut OutputDir,
) -> Result<(), CliError> {
    let (r, mask, starts) = run_fit(cfg, ds, initial, seed)?;
    let initial_nmse = stdp_core::fitting::PreparedDataset::new(ds)?.nmse(initial);
    let report = FitReport {
        dataset: ds.name.clone(),
        points: ds.points.len(),
        nmse: r.nmse,
        initial_nmse,
        iterations: r.iterations,
        evaluations: r.evaluations,
        converged: r.converged,
        starts,
        parameters: param_entries(&r.params, &mask),
        initial: param_entries(initial, &mask),
    };
    out.write_json("fit_report.json", &report)?;
    out.write_table("fit_residuals.csv", &residual_table(ds, &r.params)?)?;
    let mut trace = Table::new(&["iteration", "best_nmse"]);
    for (i, v) in r.trace.iter().enumerate() {
        trace.push(vec![i.to_string(), fmt_f64(*v)]);
    }
    out.write_table("fit_trace.csv", &trace)?;
    crate::say(format_args!(
        "fit {}: NMSE {} after {} iterations (converged: {})",
        ds.name,
        fmt_f64(r.nmse),
        r.iterations,
        r.converged
    ));
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct RetuneReport {
    worst_run: usize,
    baseline_nmse: f64,
    perturbed_nmse: f64,
    retuned_nmse: f64,
    ratio_to_baseline: f64,
    iterations: usize,
    converged: bool,
    /// Bias settings found by the refit, before the mismatch is applied.
    parameters: Vec<ParamEntry>,
}

fn mc_cmd(
    cfg: &RunConfig,
    ds: &Dataset,
    initial: &TripletParams,
    seed: u64,
    out: &mut OutputDir,
) -> Result<(), CliError> {
    let c = &cfg.mc;
    let (baseline_params, mask) = if c.fit_baseline {
        let (r, mask, _) = run_fit(cfg, ds, initial, seed)?;
        (r.params, mask)
    } else {
        (*initial, cfg.fit.mask.resolve(initial)?)
    };
    let spec = PerturbationSpec {
        sigma_v: c.sigma_mv * MS,
        v_scale: c.v_scale_mv * MS,
        n_runs: c.n_runs,
        seed,
    };
    let report = monte_carlo(ds, &baseline_params, &spec)?;
    let mut header = vec!["run".to_string(), "nmse".into(), "flagged".into()];
    header.extend(ParamId::ALL.iter().map(|id| format!("factor_{}", id.name())));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut runs = Table::new(&header);
    for r in &report.runs {
        let mut row = vec![r.index.to_string(), fmt_f64(r.nmse), r.flagged.to_string()];
        row.extend(ParamId::ALL.iter().map(|&id| fmt_f64(r.distortion.factor(id))));
        runs.push(row);
    }
    out.write_table("mc_runs.csv", &runs)?;

    let s = &report.summary;
    let mut summary = Table::new(&["stat", "value"]);
    let mut row = |k: &str, v: String| summary.push(vec![k.to_string(), v]);
    row("baseline_nmse", fmt_f64(report.baseline));
    row("runs", s.n.to_string());
    row("flagged", s.flagged.to_string());
    row("min", fmt_f64(s.min));
    row("q05", fmt_f64(s.q05));
    row("q25", fmt_f64(s.q25));
    row("median", fmt_f64(s.median));
    row("q75", fmt_f64(s.q75));
    row("q95", fmt_f64(s.q95));
    row("max", fmt_f64(s.max));
    row("mean", fmt_f64(s.mean));
    row("worst_run", report.worst.to_string());
    if c.retune {
        let worst = report.worst_run();
        let r = retune(ds, &worst.distortion, &baseline_params, &mask, &cfg.fit.options)?;
        let ratio = r.nmse / report.baseline;
        row("retuned_nmse", fmt_f64(r.nmse));
        row("retuned_ratio", fmt_f64(ratio));
        out.write_json(
            "mc_retune.json",
            &RetuneReport {
                worst_run: worst.index,
                baseline_nmse: report.baseline,
                perturbed_nmse: worst.nmse,
                retuned_nmse: r.nmse,
                ratio_to_baseline: ratio,
                iterations: r.iterations,
                converged: r.converged,
                parameters: param_entries(&r.params, &mask),
            },
        )?;
        crate::say(format_args!(
            "retune run {}: NMSE {} -> {} (baseline {})",
            worst.index,
            fmt_f64(worst.nmse),
            fmt_f64(r.nmse),
            fmt_f64(report.baseline)
        ));
    }
    out.write_table("mc_summary.csv", &summary)?;
    out.write_json("mc_baseline_params.json", &param_entries(&baseline_params, &mask))?;
    crate::say(format_args!(
        "mc {}: {} runs, baseline NMSE {}, median {}, worst {} (run {})",
        ds.name,
        s.n,
        fmt_f64(report.baseline),
        fmt_f64(s.median),
        fmt_f64(s.max),
        report.worst
    ));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use stdp_core::fitting::synthetic;

    fn cfg_in(dir: &Path) -> RunConfig {
        let mut cfg = RunConfig::new();
        cfg.out_dir = Some(dir.to_path_buf());
        cfg
    }

    fn read(dir: &Path, name: &str) -> String {
        std::fs::read_to_string(dir.join(name)).unwrap()
    }

    #[test]
    fn null_rule_window_is_all_zeros() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = cfg_in(dir.path());
        cfg.rule = Some(RuleConfig {
            a2_plus: Some(0.0),
            a2_minus: Some(0.0),
            a3_plus: Some(0.0),
            a3_minus: Some(0.0),
            ..Default::default()
        });
        cfg.window.dt_ms.push(0.0);
        let m = run(Command::Window, &cfg, None).unwrap();
        let text = read(dir.path(), "window.csv");
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("dt_ms,mean_dw,std_dw,trials"));
        let rows: Vec<_> = lines.collect();
        assert_eq!(rows.len(), 40);
        assert!(rows.iter().all(|r| r.split(',').nth(1) == Some("0")));
        assert!(rows.contains(&"-100,0,0,1"));
        // dt = 0 cannot be generated
        assert_eq!(m.notes.len(), 1);
    }

    #[test]
    fn overrides() {
        let ov = Overrides {
            seed: Some(5),
            out: Some("x".into()),
            trials: Some(3),
            ..Default::default()
        };
        let cfg = resolve(RunConfig::new(), Command::Bcm, &ov).unwrap();
        assert_eq!(cfg.seed, Some(5));
        assert_eq!(cfg.bcm.trials, 3);
        assert_eq!(cfg.out_dir, Some(PathBuf::from("x")));
        let bad = Overrides {
            retune: true,
            ..Default::default()
        };
        assert!(resolve(RunConfig::new(), Command::Fit, &bad).is_err());
    }

    #[test]
    fn fit_with_frozen_mask_reports_initial_nmse() {
        let dir = tempfile::tempdir().unwrap();
        let truth = TripletParams::hippocampal_style();
        let ds = synthetic::hippocampal_dataset(&truth);
        let path = dir.path().join("hippocampal.csv");
        std::fs::write(&path, crate::dataset::format_dataset(&ds)).unwrap();
        let mut cfg = cfg_in(dir.path());
        cfg.fit.mask = crate::config::MaskConfig::Named("none".into());
        cfg.rule = Some(RuleConfig {
            a2_plus: Some(truth.a2_plus * 1.5),
            ..Default::default()
        });
        run(Command::Fit, &cfg, Some(&path)).unwrap();
        let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "fit_report.json")).unwrap();
        assert_eq!(report["iterations"], 0);
        assert_eq!(report["nmse"], report["initial_nmse"]);
        assert!(report["nmse"].as_f64().unwrap() > 0.0);
        assert_eq!(report["parameters"][0]["bias_alias"], "I_pot1");
    }

    #[test]
    fn single_unperturbed_mc_run_equals_baseline() {
        let dir = tempfile::tempdir().unwrap();
        let truth = TripletParams::hippocampal_style();
        let ds = synthetic::synthetic_dataset("h", &truth, &synthetic::hippocampal_protocols(), 0.1, Some(2)).unwrap();
        let path = dir.path().join("h.csv");
        std::fs::write(&path, crate::dataset::format_dataset(&ds)).unwrap();
        let mut cfg = cfg_in(dir.path());
        cfg.mc.n_runs = 1;
        cfg.mc.sigma_mv = 0.0;
        cfg.mc.fit_baseline = false;
        run(Command::Mc, &cfg, Some(&path)).unwrap();
        let runs = read(dir.path(), "mc_runs.csv");
        let rows: Vec<&str> = runs.lines().skip(1).collect();
        assert_eq!(rows.len(), 1);
        let nmse = rows[0].split(',').nth(1).unwrap();
        let summary = read(dir.path(), "mc_summary.csv");
        assert!(summary.contains(&format!("baseline_nmse,{nmse}\n")), "{summary}");
    }

    #[test]
    fn fit_needs_a_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let err = run(Command::Fit, &cfg_in(dir.path()), None).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
