//! Plasticity rules evaluated event by event under nearest-spike interaction.
//!
//! Each spike interacts only with its immediate predecessors: a post spike
//! pairs with the latest earlier pre spike (and, for the triplet term, with
//! the previous post spike), a pre spike pairs with the latest post spike at
//! or before it. Weights are additive and unbounded.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spike::{Interactions, ProtocolTrains, SpikeKind};

/// Pair-based STDP: `A⁺e^(−Δt/τ₊)` for `Δt > 0`, `−A⁻e^(Δt/τ₋)` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairParams {
    pub a_plus: f64,
    pub a_minus: f64,
    pub tau_plus: f64,
    pub tau_minus: f64,
}

impl PairParams {
    pub fn validate(&self) -> Result<()> {
        check_amplitude("a_plus", self.a_plus)?;
        check_amplitude("a_minus", self.a_minus)?;
        check_tau("tau_plus", self.tau_plus)?;
        check_tau("tau_minus", self.tau_minus)
    }

    /// The pair kernel `F(Δt)` with `Δt = t_post − t_pre`.
    pub fn kernel(&self, dt: f64) -> f64 {
        if dt > 0.0 {
            self.a_plus * (-dt / self.tau_plus).exp()
        } else {
            -(self.a_minus * (dt / self.tau_minus).exp())
        }
    }
}

/// Identifies one of the eight triplet-rule parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamId {
    A2Plus,
    A2Minus,
    A3Plus,
    A3Minus,
    TauPlus,
    TauMinus,
    TauX,
    TauY,
}

impl ParamId {
    pub const ALL: [ParamId; 8] = [
        Self::A2Plus,
        Self::A2Minus,
        Self::A3Plus,
        Self::A3Minus,
        Self::TauPlus,
        Self::TauMinus,
        Self::TauX,
        Self::TauY,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::A2Plus => "a2_plus",
            Self::A2Minus => "a2_minus",
            Self::A3Plus => "a3_plus",
            Self::A3Minus => "a3_minus",
            Self::TauPlus => "tau_plus",
            Self::TauMinus => "tau_minus",
            Self::TauX => "tau_x",
            Self::TauY => "tau_y",
        }
    }

    /// Name of the circuit bias current that sets this parameter. The
    /// mapping is nominal: no current-to-model calibration is implied.
    pub fn bias_alias(self) -> &'static str {
        match self {
            Self::A2Plus => "I_pot1",
            Self::A2Minus => "I_dep1",
            Self::A3Plus => "I_pot2",
            Self::A3Minus => "I_dep2",
            Self::TauPlus => "I_tp1",
            Self::TauMinus => "I_td1",
            Self::TauX => "I_td2",
            Self::TauY => "I_tp2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == name || p.bias_alias() == name)
    }

    pub fn is_time_constant(self) -> bool {
        matches!(self, Self::TauPlus | Self::TauMinus | Self::TauX | Self::TauY)
    }
}

/// Triplet STDP parameters. Amplitudes are dimensionless, time constants in
/// seconds.
///
/// The minimal rule used for visual cortex data has `a2_plus = a3_minus = 0`;
/// the one used for hippocampal data has `a3_minus = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripletParams {
    pub a2_plus: f64,
    pub a2_minus: f64,
    pub a3_plus: f64,
    pub a3_minus: f64,
    pub tau_plus: f64,
    pub tau_minus: f64,
    pub tau_x: f64,
    pub tau_y: f64,
}

impl TripletParams {
    /// Illustrative minimal-rule parameters with a frequency-dependent
    /// pairing response (`a2_plus = 0`).
    pub fn visual_cortex_style() -> Self {
        Self {
            a2_plus: 0.0,
            a2_minus: 7.0e-3,
            a3_plus: 3.5e-2,
            a3_minus: 0.0,
            tau_plus: 16.8e-3,
            tau_minus: 33.7e-3,
            tau_x: 101e-3,
            tau_y: 30e-3,
        }
    }

    /// Illustrative minimal-rule parameters with pair potentiation
    /// (`a3_minus = 0`).
    pub fn hippocampal_style() -> Self {
        Self {
            a2_plus: 4.6e-3,
            a2_minus: 3.0e-3,
            a3_plus: 9.1e-3,
            a3_minus: 0.0,
            tau_plus: 16.8e-3,
            tau_minus: 33.7e-3,
            tau_x: 101e-3,
            tau_y: 48e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for id in ParamId::ALL {
            let v = self.get(id);
            if id.is_time_constant() {
                check_tau(id.name(), v)?;
            } else {
                check_amplitude(id.name(), v)?;
            }
        }
        Ok(())
    }

    pub fn get(&self, id: ParamId) -> f64 {
        self.to_array()[id.index()]
    }

    pub fn set(&mut self, id: ParamId, value: f64) {
        let mut a = self.to_array();
        a[id.index()] = value;
        *self = Self::from_array(a);
    }

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.a2_plus,
            self.a2_minus,
            self.a3_plus,
            self.a3_minus,
            self.tau_plus,
            self.tau_minus,
            self.tau_x,
            self.tau_y,
        ]
    }

    pub fn from_array(a: [f64; 8]) -> Self {
        Self {
            a2_plus: a[0],
            a2_minus: a[1],
            a3_plus: a[2],
            a3_minus: a[3],
            tau_plus: a[4],
            tau_minus: a[5],
            tau_x: a[6],
            tau_y: a[7],
        }
    }

    /// The pair-rule part `(A₂⁺, A₂⁻, τ₊, τ₋)`.
    pub fn pair(&self) -> PairParams {
        PairParams {
            a_plus: self.a2_plus,
            a_minus: self.a2_minus,
            tau_plus: self.tau_plus,
            tau_minus: self.tau_minus,
        }
    }

    /// All four amplitudes multiplied by `c`.
    pub fn scale_amplitudes(&self, c: f64) -> Self {
        Self {
            a2_plus: self.a2_plus * c,
            a2_minus: self.a2_minus * c,
            a3_plus: self.a3_plus * c,
            a3_minus: self.a3_minus * c,
            ..*self
        }
    }
}

/// Suppressive pair model: each pair term is scaled by the efficacies of
/// both spikes, `ε = 1 − e^(−(tᵢ − tᵢ₋₁)/τ_s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuppressionParams {
    pub pair: PairParams,
    pub tau_s: f64,
}

impl SuppressionParams {
    pub fn validate(&self) -> Result<()> {
        self.pair.validate()?;
        check_tau("tau_s", self.tau_s)
    }
}

/// A plasticity rule with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Rule {
    Pair(PairParams),
    Triplet(TripletParams),
    Suppressive(SuppressionParams),
}

impl Rule {
    /// Total weight change over both trains.
    pub fn total(&self, trains: &ProtocolTrains) -> f64 {
        match self {
            Self::Pair(p) => pstdp_total(p, trains),
            Self::Triplet(p) => tstdp_total(p, trains),
            Self::Suppressive(p) => suppressive_total(p, trains),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Pair(p) => p.validate(),
            Self::Triplet(p) => p.validate(),
            Self::Suppressive(p) => p.validate(),
        }
    }
}

fn check_amplitude(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} must be >= 0, got {v}")))
    }
}

fn check_tau(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} must be > 0, got {v}")))
    }
}

pub fn pstdp_total(params: &PairParams, trains: &ProtocolTrains) -> f64 {
    let mut dw = 0.0;
    for ev in Interactions::new(trains) {
        let Some(dt) = ev.delta_opposite else {
            continue;
        };
        dw += match ev.kind {
            SpikeKind::Post => params.a_plus * (-dt / params.tau_plus).exp(),
            SpikeKind::Pre => -(params.a_minus * (dt / params.tau_minus).exp()),
        };
    }
    dw
}

/// Triplet STDP total.
///
/// At a post spike: `e^(−Δt₁/τ₊)(A₂⁺ + A₃⁺e^(−Δt₂/τ_y))`, where `Δt₂` is the
/// gap to the previous post spike. At a pre spike:
/// `−e^(Δt₁/τ₋)(A₂⁻ + A₃⁻e^(−Δt₃/τₓ))` with `Δt₃` the gap to the previous
/// pre spike. The same-type gap always refers to the spike before the
/// current one, which is what the infinitesimal offset in the textbook
/// statement of the rule guarantees.
pub fn tstdp_total(params: &TripletParams, trains: &ProtocolTrains) -> f64 {
    let mut dw = 0.0;
    for ev in Interactions::new(trains) {
        let Some(dt1) = ev.delta_opposite else {
            continue;
        };
        match ev.kind {
            SpikeKind::Post => {
                let trip = ev.delta_same.map_or(0.0, |d| (-d / params.tau_y).exp());
                dw += (-dt1 / params.tau_plus).exp() * (params.a2_plus + params.a3_plus * trip);
            }
            SpikeKind::Pre => {
                let trip = ev.delta_same.map_or(0.0, |d| (-d / params.tau_x).exp());
                dw -= (dt1 / params.tau_minus).exp() * (params.a2_minus + params.a3_minus * trip);
            }
        }
    }
    dw
}

fn efficacies(times: &[f64], tau_s: f64) -> Vec<f64> {
    let mut eff = Vec::with_capacity(times.len());
    for (i, &t) in times.iter().enumerate() {
        eff.push(if i == 0 {
            1.0
        } else {
            1.0 - (-(t - times[i - 1]) / tau_s).exp()
        });
    }
    eff
}

/// Suppressive model total over nearest-neighbour pairs. The first spike
/// of each train has efficacy 1.
pub fn suppressive_total(params: &SuppressionParams, trains: &ProtocolTrains) -> f64 {
    let pre_eff = efficacies(trains.pre.times(), params.tau_s);
    let post_eff = efficacies(trains.post.times(), params.tau_s);
    let mut dw = 0.0;
    for ev in Interactions::new(trains) {
        let (Some(dt), Some(partner)) = (ev.delta_opposite, ev.partner) else {
            continue;
        };
        let (e_pre, e_post) = match ev.kind {
            SpikeKind::Post => (pre_eff[partner], post_eff[ev.index]),
            SpikeKind::Pre => (pre_eff[ev.index], post_eff[partner]),
        };
        dw += e_pre * e_post * params.pair.kernel(dt);
    }
    dw
}

/// Time-averaged drift `⟨dw/dt⟩` for independent Poisson trains (weight/s).
pub fn averaged_drift(params: &TripletParams, rho_pre: f64, rho_post: f64) -> f64 {
    let p = params;
    -p.a2_minus * p.tau_minus * rho_pre * rho_post + p.a2_plus * p.tau_plus * rho_pre * rho_post
        - p.a3_minus * p.tau_minus * p.tau_x * rho_pre * rho_pre * rho_post
        + p.a3_plus * p.tau_plus * p.tau_y * rho_post * rho_post * rho_pre
}

/// BCM form of the minimal-rule drift: `⟨dw/dt⟩ = ρ_pre·φ(ρ_post)` with
/// `φ(ρ) = k·ρ·(ρ − θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcmSpec {
    /// Modification threshold in Hz.
    pub theta: f64,
    /// Curvature `k = A₃⁺τ₊τ_y`.
    pub k: f64,
}

impl BcmSpec {
    /// Requires `a3_minus = 0` and `A₃⁺τ₊τ_y > 0`.
    pub fn from_minimal(params: &TripletParams) -> Result<Self> {
        if params.a3_minus != 0.0 {
            return Err(Error::InvalidParams(
                "the BCM mapping needs the minimal rule (a3_minus = 0)".into(),
            ));
        }
        let k = params.a3_plus * params.tau_plus * params.tau_y;
        if !(k > 0.0) {
            return Err(Error::SingularParameters("a3_plus * tau_plus * tau_y is zero".into()));
        }
        let theta = (params.a2_minus * params.tau_minus - params.a2_plus * params.tau_plus) / k;
        Ok(Self { theta, k })
    }

    pub fn phi(&self, rho_post: f64) -> f64 {
        self.k * rho_post * (rho_post - self.theta)
    }
}

/// Inputs of the sliding modification threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub p_exponent: f64,
    /// `ρ₀ᵖ` in Hzᵖ.
    pub rho0_p: f64,
    /// `⟨ρ_postᵖ⟩` in Hzᵖ.
    pub post_rate_moment: f64,
}

impl ThresholdSpec {
    /// Moment estimated from a sample of postsynaptic rates.
    pub fn from_rates(p_exponent: f64, rho0_p: f64, rates: &[f64]) -> Self {
        let moment = rates.iter().map(|r| r.powf(p_exponent)).sum::<f64>() / rates.len() as f64;
        Self {
            p_exponent,
            rho0_p,
            post_rate_moment: moment,
        }
    }
}

/// Modification threshold for all-to-all interaction,
/// `θ = ⟨ρ_postᵖ⟩(A₂⁻τ₋ − A₂⁺τ₊)/(ρ₀ᵖA₃⁺τ₊τ_y)`.
///
/// Nearest-spike interaction has no closed form; use this as a reference
/// marker next to the empirical crossing from a Poisson sweep.
pub fn bcm_threshold(params: &TripletParams, spec: &ThresholdSpec) -> Result<f64> {
    let denom = spec.rho0_p * params.a3_plus * params.tau_plus * params.tau_y;
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::SingularParameters(format!(
            "rho0^p * a3_plus * tau_plus * tau_y = {denom}"
        )));
    }
    Ok(spec.post_rate_moment * (params.a2_minus * params.tau_minus - params.a2_plus * params.tau_plus) / denom)
}
