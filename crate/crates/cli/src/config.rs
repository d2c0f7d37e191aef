//! Versioned TOML run configuration.
//!
//! Human-facing units: times in milliseconds (`*_ms`), rates in Hz
//! (`*_hz`), durations in seconds (`*_s`), voltages in millivolts (`*_mv`).
//! Rule parameters also accept the circuit bias-current names (`I_pot1`,
//! `I_tp2`, ...) as keys; the values are still model quantities, the names
//! are only labels.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stdp_core::experiments::{default_dt_grid, default_rho_grid, default_rho_post_grid};
use stdp_core::fitting::{FitOptions, ParamMask};
use stdp_core::{PairParams, ParamId, Rule, SuppressionParams, TripletParams};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

const MS: f64 = 1e-3;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub rule: Option<RuleConfig>,
    #[serde(default)]
    pub window: WindowConfig,
    #[serde(default)]
    pub freq: FreqConfig,
    #[serde(default)]
    pub triplet: TripletConfig,
    #[serde(default)]
    pub quad: QuadConfig,
    #[serde(default)]
    pub six: SixConfig,
    #[serde(default)]
    pub bcm: BcmConfig,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub mc: McConfig,
}

impl RunConfig {
    pub fn new() -> Self {
        Self {
            version: SCHEMA_VERSION,
            ..Default::default()
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        if cfg.version != SCHEMA_VERSION {
            return Err(CliError::Usage(format!(
                "config key `version`: unsupported schema version {} (expected {SCHEMA_VERSION})",
                cfg.version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    Pair,
    #[default]
    Triplet,
    Suppressive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    VisualCortex,
    Hippocampal,
}

impl Preset {
    pub fn params(self) -> TripletParams {
        match self {
            Self::VisualCortex => TripletParams::visual_cortex_style(),
            Self::Hippocampal => TripletParams::hippocampal_style(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleConfig {
    #[serde(default)]
    pub kind: RuleKind,
    pub preset: Option<Preset>,
    #[serde(alias = "I_pot1")]
    pub a2_plus: Option<f64>,
    #[serde(alias = "I_dep1")]
    pub a2_minus: Option<f64>,
    #[serde(alias = "I_pot2")]
    pub a3_plus: Option<f64>,
    #[serde(alias = "I_dep2")]
    pub a3_minus: Option<f64>,
    #[serde(alias = "I_tp1")]
    pub tau_plus_ms: Option<f64>,
    #[serde(alias = "I_td1")]
    pub tau_minus_ms: Option<f64>,
    #[serde(alias = "I_td2")]
    pub tau_x_ms: Option<f64>,
    #[serde(alias = "I_tp2")]
    pub tau_y_ms: Option<f64>,
    pub tau_s_ms: Option<f64>,
}

fn config_key(id: ParamId) -> String {
    if id.is_time_constant() {
        format!("{}_ms", id.name())
    } else {
        id.name().to_string()
    }
}

impl RuleConfig {
    /// Triplet parameters: preset (or `fallback`) with explicit overrides.
    pub fn triplet_params(&self, fallback: Preset) -> Result<TripletParams, CliError> {
        let mut p = self.preset.unwrap_or(fallback).params();
        let overrides = [
            (ParamId::A2Plus, self.a2_plus),
            (ParamId::A2Minus, self.a2_minus),
            (ParamId::A3Plus, self.a3_plus),
            (ParamId::A3Minus, self.a3_minus),
            (ParamId::TauPlus, self.tau_plus_ms),
            (ParamId::TauMinus, self.tau_minus_ms),
            (ParamId::TauX, self.tau_x_ms),
            (ParamId::TauY, self.tau_y_ms),
        ];
        for (id, value) in overrides {
            let Some(v) = value else { continue };
            let key = format!("rule.{}", config_key(id));
            if !v.is_finite() {
                return Err(CliError::Usage(format!("config key `{key}`: {v} is not finite")));
            }
            if id.is_time_constant() {
                if v <= 0.0 {
                    return Err(CliError::Usage(format!("config key `{key}`: must be > 0, got {v}")));
                }
                p.set(id, v * MS);
            } else {
                if v < 0.0 {
                    return Err(CliError::Usage(format!("config key `{key}`: must be >= 0, got {v}")));
                }
                p.set(id, v);
            }
        }
        Ok(p)
    }

    pub fn rule(&self, fallback: Preset) -> Result<Rule, CliError> {
        let p = self.triplet_params(fallback)?;
        let pair = PairParams {
            a_plus: p.a2_plus,
            a_minus: p.a2_minus,
            tau_plus: p.tau_plus,
            tau_minus: p.tau_minus,
        };
        if self.kind != RuleKind::Suppressive && self.tau_s_ms.is_some() {
            return Err(CliError::Usage(
                "config key `rule.tau_s_ms`: only valid with kind = \"suppressive\"".into(),
            ));
        }
        match self.kind {
            RuleKind::Triplet => Ok(Rule::Triplet(p)),
            RuleKind::Pair => Ok(Rule::Pair(pair)),
            RuleKind::Suppressive => {
                let tau_s = self.tau_s_ms.ok_or_else(|| {
                    CliError::Usage("config key `rule.tau_s_ms`: required for the suppressive rule".into())
                })?;
                if tau_s <= 0.0 || !tau_s.is_finite() {
                    return Err(CliError::Usage(format!(
                        "config key `rule.tau_s_ms`: must be > 0, got {tau_s}"
                    )));
                }
                Ok(Rule::Suppressive(SuppressionParams {
                    pair,
                    tau_s: tau_s * MS,
                }))
            }
        }
    }
}

fn ms_grid(seconds: Vec<f64>) -> Vec<f64> {
    seconds.into_iter().map(|s| (s / MS).round()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowConfig {
    pub dt_ms: Vec<f64>,
    pub rho_hz: f64,
    pub n_pairs: usize,
    pub trials: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            dt_ms: ms_grid(default_dt_grid()),
            rho_hz: 1.0,
            n_pairs: 60,
            trials: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FreqConfig {
    pub dt_ms: Vec<f64>,
    pub rho_hz: Vec<f64>,
    pub n_pairs: usize,
    pub trials: usize,
}

impl Default for FreqConfig {
    fn default() -> Self {
        Self {
            dt_ms: vec![10.0, -10.0],
            rho_hz: default_rho_grid(),
            n_pairs: 60,
            trials: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TripletConfig {
    /// `(dt1, dt2)` with `dt1 > 0 > dt2`.
    pub pre_post_pre_ms: Vec<(f64, f64)>,
    /// `(dt1, dt2)` with `dt1 < 0 < dt2`.
    pub post_pre_post_ms: Vec<(f64, f64)>,
    pub rho_hz: f64,
    pub n: usize,
    pub trials: usize,
}

impl Default for TripletConfig {
    fn default() -> Self {
        Self {
            pre_post_pre_ms: vec![(5.0, -5.0), (10.0, -10.0), (15.0, -5.0), (5.0, -15.0)],
            post_pre_post_ms: vec![(-5.0, 5.0), (-10.0, 10.0), (-5.0, 15.0), (-15.0, 5.0)],
            rho_hz: 1.0,
            n: 60,
            trials: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadConfig {
    pub dt_ms: f64,
    pub t_ms: Vec<f64>,
    pub rho_hz: f64,
    pub n: usize,
    pub trials: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        let mut t_ms: Vec<f64> = (-10..=10).filter(|&k| k != 0).map(|k| 10.0 * k as f64).collect();
        t_ms.sort_by(f64::total_cmp);
        Self {
            dt_ms: 5.0,
            t_ms,
            rho_hz: 1.0,
            n: 60,
            trials: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SixConfig {
    /// Gaps between consecutive spikes, `(first, second)`.
    pub gaps_ms: Vec<(f64, f64)>,
    pub rho_hz: f64,
    pub n: usize,
    pub trials: usize,
}

impl Default for SixConfig {
    fn default() -> Self {
        let steps = [5.0, 10.0, 20.0, 40.0, 80.0];
        let gaps_ms = steps.iter().flat_map(|&a| steps.iter().map(move |&b| (a, b))).collect();
        Self {
            gaps_ms,
            rho_hz: 1.0,
            n: 60,
            trials: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BcmConfig {
    pub rho_pre_hz: f64,
    pub rho_post_hz: Vec<f64>,
    /// One curve per value; empty means 0.8×, 1× and 1.25× the rule's `a3_plus`.
    pub a3_plus: Vec<f64>,
    pub duration_s: f64,
    pub trials: usize,
    /// Also sweep `rho_post = rho_pre` over `rho_post_hz`.
    pub presynaptic: bool,
}

impl Default for BcmConfig {
    fn default() -> Self {
        Self {
            rho_pre_hz: 10.0,
            rho_post_hz: default_rho_post_grid(),
            a3_plus: Vec::new(),
            duration_s: 100.0,
            trials: 10,
            presynaptic: true,
        }
    }
}

/// Free-parameter selection: a named mask or a list of parameter names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MaskConfig {
    Named(String),
    List(Vec<String>),
}

impl Default for MaskConfig {
    fn default() -> Self {
        Self::Named("auto".into())
    }
}

impl MaskConfig {
    pub fn resolve(&self, initial: &TripletParams) -> Result<ParamMask, CliError> {
        match self {
            Self::Named(name) => match name.as_str() {
                "auto" => Ok(auto_mask(initial)),
                "visual-cortex" => Ok(ParamMask::visual_cortex()),
                "hippocampal" => Ok(ParamMask::hippocampal()),
                "all" => Ok(ParamMask::all_free()),
                "none" => Ok(ParamMask::all_frozen()),
                other => Err(CliError::Usage(format!(
                    "config key `fit.mask`: unknown mask {other:?} (auto, visual-cortex, hippocampal, all, none, or a list of names)"
                ))),
            },
            Self::List(names) => {
                let ids = names
                    .iter()
                    .map(|n| {
                        ParamId::from_name(n).ok_or_else(|| {
                            CliError::Usage(format!("config key `fit.mask`: unknown parameter {n:?}"))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(ParamMask::with_free(&ids))
            }
        }
    }
}

/// Non-zero amplitudes and the time constants they use.
pub fn auto_mask(p: &TripletParams) -> ParamMask {
    let mut ids = Vec::new();
    let on = |v: f64| v > 0.0;
    for (id, used) in [
        (ParamId::A2Plus, on(p.a2_plus)),
        (ParamId::A2Minus, on(p.a2_minus)),
        (ParamId::A3Plus, on(p.a3_plus)),
        (ParamId::A3Minus, on(p.a3_minus)),
        (ParamId::TauPlus, on(p.a2_plus) || on(p.a3_plus)),
        (ParamId::TauMinus, on(p.a2_minus) || on(p.a3_minus)),
        (ParamId::TauX, on(p.a3_minus)),
        (ParamId::TauY, on(p.a3_plus)),
    ] {
        if used {
            ids.push(id);
        }
    }
    ParamMask::with_free(&ids)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub mask: MaskConfig,
    /// Number of starting points, counting the configured parameters; the
    /// rest are drawn log-uniformly from the default ranges.
    pub starts: Option<usize>,
    pub options: FitOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    pub sigma_mv: f64,
    pub v_scale_mv: f64,
    pub n_runs: usize,
    pub retune: bool,
    /// Fit the configured parameters before perturbing them.
    pub fit_baseline: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            sigma_mv: 30.0,
            v_scale_mv: 32.0,
            n_runs: 1000,
            retune: false,
            fit_baseline: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let cfg = RunConfig::from_toml("version = 1").unwrap();
        assert_eq!(cfg, RunConfig::new());
        assert_eq!(cfg.window.dt_ms.first(), Some(&-100.0));
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = RunConfig::from_toml("version = 1\n[rule]\ntau_plus = 3.0\n").unwrap_err();
        assert!(err.to_string().contains("tau_plus"), "{err}");
        let err = RunConfig::from_toml("version = 1\n[bcm]\nrho_pre = 3.0\n").unwrap_err();
        assert!(err.to_string().contains("rho_pre"), "{err}");
    }

    #[test]
    fn version_is_checked() {
        assert!(RunConfig::from_toml("version = 2").is_err());
        assert!(RunConfig::from_toml("seed = 2").is_err());
    }

    #[test]
    fn bias_aliases_map_to_parameters() {
        let cfg = RunConfig::from_toml(
            "version = 1\n[rule]\npreset = \"hippocampal\"\nI_pot2 = 0.01\nI_tp2 = 25.0\nI_td2 = 50.0\n",
        )
        .unwrap();
        let p = cfg.rule.unwrap().triplet_params(Preset::VisualCortex).unwrap();
        assert_eq!(p.a3_plus, 0.01);
        assert_eq!(p.tau_y, 25.0 * MS);
        assert_eq!(p.tau_x, 50.0 * MS);
        assert_eq!(p.a2_plus, TripletParams::hippocampal_style().a2_plus);
    }

    #[test]
    fn invalid_values_name_the_key() {
        let rule = RuleConfig {
            tau_y_ms: Some(-1.0),
            ..Default::default()
        };
        let err = rule.triplet_params(Preset::Hippocampal).unwrap_err();
        assert!(err.to_string().contains("rule.tau_y_ms"), "{err}");
        let rule = RuleConfig {
            kind: RuleKind::Suppressive,
            ..Default::default()
        };
        assert!(rule
            .rule(Preset::Hippocampal)
            .unwrap_err()
            .to_string()
            .contains("tau_s_ms"));
    }

    #[test]
    fn masks() {
        let vc = TripletParams::visual_cortex_style();
        assert_eq!(auto_mask(&vc), ParamMask::visual_cortex());
        assert_eq!(auto_mask(&TripletParams::hippocampal_style()), ParamMask::hippocampal());
        let list = MaskConfig::List(vec!["I_pot2".into(), "tau_y".into()]);
        assert_eq!(
            list.resolve(&vc).unwrap(),
            ParamMask::with_free(&[ParamId::A3Plus, ParamId::TauY])
        );
        assert!(MaskConfig::Named("most".into()).resolve(&vc).is_err());
    }

    #[test]
    fn round_trips_through_toml() {
        let mut cfg = RunConfig::new();
        cfg.seed = Some(3);
        cfg.rule = Some(RuleConfig {
            a3_plus: Some(0.02),
            ..Default::default()
        });
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg);
    }
}
