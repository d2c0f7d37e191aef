//! Spike trains, stimulation protocols and nearest-spike interaction events.

use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{derive_seed, stream_rng};

/// Minimum separation between consecutive spikes of one train (1 µs).
pub const RESOLUTION: f64 = 1e-6;

// Slack for separations that land a rounding error below the floor.
const RESOLUTION_SLACK: f64 = RESOLUTION * (1.0 - 1e-6);

/// Strictly increasing, non-negative spike times in seconds.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SpikeTrain {
    times: Vec<f64>,
}

impl SpikeTrain {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        for (i, &t) in times.iter().enumerate() {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::InvalidTrain(format!("spike {i} at {t} s")));
            }
            if i > 0 && t - times[i - 1] < RESOLUTION_SLACK {
                return Err(Error::InvalidTrain(format!(
                    "spikes {} and {i} are closer than {RESOLUTION} s ({} s, {t} s)",
                    i - 1,
                    times[i - 1]
                )));
            }
        }
        Ok(Self { times })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The same train moved by `offset` seconds.
    pub fn shifted(&self, offset: f64) -> Result<Self> {
        Self::new(self.times.iter().map(|t| t + offset).collect())
    }
}

impl TryFrom<Vec<f64>> for SpikeTrain {
    type Error = Error;

    fn try_from(times: Vec<f64>) -> Result<Self> {
        Self::new(times)
    }
}

impl From<SpikeTrain> for Vec<f64> {
    fn from(train: SpikeTrain) -> Self {
        train.times
    }
}

/// Pre- and postsynaptic trains of one protocol instance.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTrains {
    pub pre: SpikeTrain,
    pub post: SpikeTrain,
}

impl ProtocolTrains {
    pub fn new(pre: SpikeTrain, post: SpikeTrain) -> Self {
        Self { pre, post }
    }

    pub fn shifted(&self, offset: f64) -> Result<Self> {
        Ok(Self {
            pre: self.pre.shifted(offset)?,
            post: self.post.shifted(offset)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TripletKind {
    /// `Δt1 = t_post − t_pre1 > 0`, `Δt2 = t_post − t_pre2 < 0`.
    PrePostPre,
    /// `Δt1 = t_post1 − t_pre < 0`, `Δt2 = t_post2 − t_pre > 0`.
    PostPrePost,
}

impl TripletKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::PrePostPre => "pre-post-pre",
            Self::PostPrePost => "post-pre-post",
        }
    }
}

/// The six orderings of a triplet made of one pairing plus one extra spike.
///
/// `dt1` is `t_post − t_pre` of the leftmost pre/post combination and `dt2`
/// the same difference for the rightmost one. For one-pre kinds both
/// differences are taken against the single pre spike, for two-pre kinds
/// against the single post spike.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SixTripletKind {
    PrePostPost,
    PostPostPre,
    PostPrePost,
    PrePostPre,
    PrePrePost,
    PostPrePre,
}

impl SixTripletKind {
    pub const ALL: [SixTripletKind; 6] = [
        Self::PrePostPost,
        Self::PostPostPre,
        Self::PostPrePost,
        Self::PrePostPre,
        Self::PrePrePost,
        Self::PostPrePre,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::PrePostPost => "pre-post-post",
            Self::PostPostPre => "post-post-pre",
            Self::PostPrePost => "post-pre-post",
            Self::PrePostPre => "pre-post-pre",
            Self::PrePrePost => "pre-pre-post",
            Self::PostPrePre => "post-pre-pre",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    fn single_pre(self) -> bool {
        matches!(self, Self::PrePostPost | Self::PostPostPre | Self::PostPrePost)
    }

    /// Signed `(dt1, dt2)` for spikes at `0`, `gap1` and `gap1 + gap2`.
    pub fn timings_from_gaps(self, gap1: f64, gap2: f64) -> (f64, f64) {
        let span = gap1 + gap2;
        match self {
            Self::PrePostPost => (gap1, span),
            Self::PostPostPre => (-span, -gap2),
            Self::PostPrePost => (-gap1, gap2),
            Self::PrePostPre => (gap1, -gap2),
            Self::PrePrePost => (span, gap2),
            Self::PostPrePre => (-gap1, -span),
        }
    }

    fn signs_ok(self, dt1: f64, dt2: f64) -> bool {
        match self {
            Self::PrePostPost => 0.0 < dt1 && dt1 < dt2,
            Self::PostPostPre => dt1 < dt2 && dt2 < 0.0,
            Self::PostPrePost => dt1 < 0.0 && 0.0 < dt2,
            Self::PrePostPre => dt2 < 0.0 && 0.0 < dt1,
            Self::PrePrePost => 0.0 < dt2 && dt2 < dt1,
            Self::PostPrePre => dt2 < dt1 && dt1 < 0.0,
        }
    }
}

/// Declarative description of a stimulation experiment. Times in seconds,
/// rates in Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "kebab-case")]
pub enum Protocol {
    Pairing {
        dt: f64,
        rho: f64,
        n_pairs: usize,
    },
    Triplet {
        kind: TripletKind,
        dt1: f64,
        dt2: f64,
        rho: f64,
        n: usize,
    },
    Quadruplet {
        dt: f64,
        t: f64,
        rho: f64,
        n: usize,
    },
    SixTriplet {
        kind: SixTripletKind,
        dt1: f64,
        dt2: f64,
        rho: f64,
        n: usize,
    },
    Poisson {
        rho_pre: f64,
        rho_post: f64,
        duration: f64,
        seed: u64,
        /// Use `rho_pre` for the postsynaptic train as well.
        post_from_pre: bool,
    },
}

impl Protocol {
    pub fn generate(&self) -> Result<ProtocolTrains> {
        match *self {
            Self::Pairing { dt, rho, n_pairs } => generate_pairing(dt, rho, n_pairs),
            Self::Triplet { kind, dt1, dt2, rho, n } => generate_triplet(kind, dt1, dt2, rho, n),
            Self::Quadruplet { dt, t, rho, n } => generate_quadruplet(dt, t, rho, n),
            Self::SixTriplet { kind, dt1, dt2, rho, n } => generate_six_triplet(kind, dt1, dt2, rho, n),
            Self::Poisson {
                rho_pre,
                rho_post,
                duration,
                seed,
                post_from_pre,
            } => {
                let rho_post = if post_from_pre { rho_pre } else { rho_post };
                Ok(ProtocolTrains {
                    pre: generate_poisson(rho_pre, duration, derive_seed(seed, 0))?,
                    post: generate_poisson(rho_post, duration, derive_seed(seed, 1))?,
                })
            }
        }
    }

    /// Whether the generated trains depend on a random seed.
    pub fn is_stochastic(&self) -> bool {
        matches!(self, Self::Poisson { .. })
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidProtocol(msg.into())
}

fn check_timing(name: &str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(invalid(format!("{name} = {value} is not finite")));
    }
    if value.abs() < RESOLUTION {
        return Err(invalid(format!(
            "{name} = {value} s is below the {RESOLUTION} s resolution"
        )));
    }
    Ok(())
}

/// Tiles one repetition (offsets relative to the repetition start) `n` times
/// with period `1/rho`, then shifts so the first spike sits at `t = 0`.
fn repeat_pattern(pre: &[f64], post: &[f64], rho: f64, n: usize) -> Result<ProtocolTrains> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(invalid(format!("rate must be positive, got {rho} Hz")));
    }
    if n == 0 {
        return Err(invalid("repetition count must be at least 1"));
    }
    let all = pre.iter().chain(post);
    let start = all.clone().copied().fold(f64::INFINITY, f64::min);
    let end = all.copied().fold(f64::NEG_INFINITY, f64::max);
    let period = 1.0 / rho;
    if end - start >= period - RESOLUTION_SLACK {
        return Err(invalid(format!(
            "pattern span {} s does not fit the repetition period {period} s",
            end - start
        )));
    }
    let tile = |offsets: &[f64]| -> Result<SpikeTrain> {
        let mut rel: Vec<f64> = offsets.iter().map(|t| t - start).collect();
        rel.sort_by(f64::total_cmp);
        let mut times = Vec::with_capacity(rel.len() * n);
        for k in 0..n {
            let base = k as f64 / rho;
            times.extend(rel.iter().map(|t| base + t));
        }
        SpikeTrain::new(times).map_err(|e| invalid(e.to_string()))
    };
    Ok(ProtocolTrains {
        pre: tile(pre)?,
        post: tile(post)?,
    })
}

/// `n_pairs` pre/post pairs with `t_post − t_pre = dt`, repeated at `rho`.
pub fn generate_pairing(dt: f64, rho: f64, n_pairs: usize) -> Result<ProtocolTrains> {
    check_timing("dt", dt)?;
    repeat_pattern(&[0.0], &[dt], rho, n_pairs)
}

/// Pre-post-pre or post-pre-post triplets, with the signed timing
/// convention documented on [`TripletKind`].
pub fn generate_triplet(kind: TripletKind, dt1: f64, dt2: f64, rho: f64, n: usize) -> Result<ProtocolTrains> {
    check_timing("dt1", dt1)?;
    check_timing("dt2", dt2)?;
    match kind {
        TripletKind::PrePostPre => {
            if !(dt1 > 0.0 && dt2 < 0.0) {
                return Err(invalid(format!(
                    "pre-post-pre needs dt1 > 0 and dt2 < 0, got ({dt1}, {dt2})"
                )));
            }
            // pre1 at 0, post at dt1, pre2 at dt1 - dt2
            repeat_pattern(&[0.0, dt1 - dt2], &[dt1], rho, n)
        }
        TripletKind::PostPrePost => {
            if !(dt1 < 0.0 && dt2 > 0.0) {
                return Err(invalid(format!(
                    "post-pre-post needs dt1 < 0 and dt2 > 0, got ({dt1}, {dt2})"
                )));
            }
            // single pre at 0, post1 at dt1, post2 at dt2
            repeat_pattern(&[0.0], &[dt1, dt2], rho, n)
        }
    }
}

/// One of the six triplet orderings; see [`SixTripletKind`] for timings.
pub fn generate_six_triplet(kind: SixTripletKind, dt1: f64, dt2: f64, rho: f64, n: usize) -> Result<ProtocolTrains> {
    check_timing("dt1", dt1)?;
    check_timing("dt2", dt2)?;
    if !kind.signs_ok(dt1, dt2) {
        return Err(invalid(format!(
            "timings ({dt1}, {dt2}) do not describe a {} triplet",
            kind.name()
        )));
    }
    if (dt1 - dt2).abs() < RESOLUTION {
        return Err(invalid("outer spikes closer than the resolution"));
    }
    if kind.single_pre() {
        repeat_pattern(&[0.0], &[dt1, dt2], rho, n)
    } else {
        repeat_pattern(&[-dt1, -dt2], &[0.0], rho, n)
    }
}

/// A post-pre pair and a pre-post pair (both `dt` wide) whose midpoints are
/// `t` apart; `t > 0` puts the post-pre pair first.
pub fn generate_quadruplet(dt: f64, t: f64, rho: f64, n: usize) -> Result<ProtocolTrains> {
    check_timing("dt", dt)?;
    if dt < 0.0 {
        return Err(invalid(format!("quadruplet dt must be positive, got {dt}")));
    }
    if !t.is_finite() || t.abs() - dt < RESOLUTION {
        return Err(invalid(format!(
            "quadruplet pairs interleave: |T| = {} s must exceed dt = {dt} s",
            t.abs()
        )));
    }
    if t > 0.0 {
        // post1, pre1 | pre2, post2
        repeat_pattern(&[dt, t], &[0.0, t + dt], rho, n)
    } else {
        // pre2, post2 | post1, pre1
        let gap = -t;
        repeat_pattern(&[0.0, gap + dt], &[dt, gap], rho, n)
    }
}

/// Homogeneous Poisson train on `[0, duration)`, deterministic in `seed`.
///
/// A sample closer than [`RESOLUTION`] to its predecessor is moved forward
/// to sit exactly one resolution step after it.
pub fn generate_poisson(rho: f64, duration: f64, seed: u64) -> Result<SpikeTrain> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(invalid(format!("Poisson rate must be >= 0, got {rho} Hz")));
    }
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(invalid(format!("duration must be > 0, got {duration} s")));
    }
    if rho == 0.0 {
        return Ok(SpikeTrain::empty());
    }
    let isi = Exp::new(rho).map_err(|e| invalid(e.to_string()))?;
    let mut rng = stream_rng(seed, 0);
    let mut times = Vec::with_capacity((rho * duration * 1.2) as usize + 8);
    let mut t = 0.0;
    loop {
        t += isi.sample(&mut rng);
        if let Some(&last) = times.last() {
            if t - last < RESOLUTION {
                t = last + RESOLUTION;
            }
        }
        if t >= duration {
            break;
        }
        times.push(t);
    }
    Ok(SpikeTrain { times })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpikeKind {
    Pre,
    Post,
}

/// One spike of the merged pre/post stream with its nearest neighbours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interaction {
    pub time: f64,
    pub kind: SpikeKind,
    /// Position of this spike in its own train.
    pub index: usize,
    /// Position of the most recent opposite-type spike in its train.
    pub partner: Option<usize>,
    /// `t_post − t_pre` against that partner: positive for post events,
    /// non-positive for pre events.
    pub delta_opposite: Option<f64>,
    /// Time since the previous spike of the same type.
    pub delta_same: Option<f64>,
}

/// Iterator over the time-ordered merge of a pre and a post train.
///
/// Coincident spikes are emitted pre first. A post spike pairs only with pre
/// spikes strictly before it, while a pre spike pairs with the latest post
/// spike at or before it, so an exact coincidence counts as `Δt = 0` on the
/// depression side.
#[derive(Debug, Clone)]
pub struct Interactions<'a> {
    pre: &'a [f64],
    post: &'a [f64],
    next_pre: usize,
    next_post: usize,
    // pre[..pre_before] < current post time
    pre_before: usize,
    // post[..post_upto] <= current pre time
    post_upto: usize,
}

impl<'a> Interactions<'a> {
    pub fn new(trains: &'a ProtocolTrains) -> Self {
        Self {
            pre: trains.pre.times(),
            post: trains.post.times(),
            next_pre: 0,
            next_post: 0,
            pre_before: 0,
            post_upto: 0,
        }
    }
}

impl Iterator for Interactions<'_> {
    type Item = Interaction;

    fn next(&mut self) -> Option<Interaction> {
        let pre_next = self.pre.get(self.next_pre).copied();
        let post_next = self.post.get(self.next_post).copied();
        let take_pre = match (pre_next, post_next) {
            (None, None) => return None,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a <= b,
        };
        if take_pre {
            let i = self.next_pre;
            let t = self.pre[i];
            self.next_pre += 1;
            while self.post_upto < self.post.len() && self.post[self.post_upto] <= t {
                self.post_upto += 1;
            }
            let partner = self.post_upto.checked_sub(1);
            Some(Interaction {
                time: t,
                kind: SpikeKind::Pre,
                index: i,
                partner,
                delta_opposite: partner.map(|p| self.post[p] - t),
                delta_same: i.checked_sub(1).map(|p| t - self.pre[p]),
            })
        } else {
            let j = self.next_post;
            let t = self.post[j];
            self.next_post += 1;
            while self.pre_before < self.pre.len() && self.pre[self.pre_before] < t {
                self.pre_before += 1;
            }
            let partner = self.pre_before.checked_sub(1);
            Some(Interaction {
                time: t,
                kind: SpikeKind::Post,
                index: j,
                partner,
                delta_opposite: partner.map(|p| t - self.pre[p]),
                delta_same: j.checked_sub(1).map(|p| t - self.post[p]),
            })
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.pre.len() - self.next_pre + self.post.len() - self.next_post;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Interactions<'_> {}

pub fn nearest_interactions(trains: &ProtocolTrains) -> Vec<Interaction> {
    Interactions::new(trains).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const MS: f64 = 1e-3;

    fn train(times: &[f64]) -> SpikeTrain {
        SpikeTrain::new(times.to_vec()).unwrap()
    }

    #[test]
    fn train_rejects_disorder_and_negative_times() {
        assert!(SpikeTrain::new(vec![0.0, 1.0, 0.5]).is_err());
        assert!(SpikeTrain::new(vec![-1.0]).is_err());
        assert!(SpikeTrain::new(vec![0.0, 0.5e-6]).is_err());
        assert!(SpikeTrain::new(vec![0.0, 1e-6]).is_ok());
        assert!(SpikeTrain::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn pairing_at_one_hertz() {
        let tr = generate_pairing(10.0 * MS, 1.0, 60).unwrap();
        assert_eq!(tr.pre.len(), 60);
        assert_eq!(tr.post.len(), 60);
        for (k, (a, b)) in tr.pre.times().iter().zip(tr.post.times()).enumerate() {
            assert_abs_diff_eq!(*a, k as f64, epsilon = 1e-12);
            assert_abs_diff_eq!(b - a, 10.0 * MS, epsilon = 1e-12);
        }
    }

    #[test]
    fn pairing_negative_dt_starts_at_zero() {
        let tr = generate_pairing(-10.0 * MS, 1.0, 3).unwrap();
        assert_eq!(tr.post.times()[0], 0.0);
        assert_abs_diff_eq!(tr.pre.times()[0], 10.0 * MS);
    }

    #[test]
    fn pairing_rejects_zero_and_oversized_dt() {
        assert!(matches!(generate_pairing(0.0, 1.0, 60), Err(Error::InvalidProtocol(_))));
        assert!(generate_pairing(1.0, 1.0, 60).is_err());
        assert!(generate_pairing(0.01, 0.0, 60).is_err());
        assert!(generate_pairing(0.01, 1.0, 0).is_err());
    }

    #[test]
    fn pairing_at_forty_hertz_fits() {
        // 10 ms pattern inside a 25 ms period
        let tr = generate_pairing(10.0 * MS, 40.0, 60).unwrap();
        assert_abs_diff_eq!(tr.pre.times()[1], 25.0 * MS, epsilon = 1e-12);
        assert!(generate_pairing(25.0 * MS, 40.0, 60).is_err());
    }

    #[test]
    fn pre_post_pre_unfolds() {
        let tr = generate_triplet(TripletKind::PrePostPre, 5.0 * MS, -5.0 * MS, 1.0, 60).unwrap();
        assert_abs_diff_eq!(tr.pre.times()[0], 0.0);
        assert_abs_diff_eq!(tr.post.times()[0], 5.0 * MS, epsilon = 1e-15);
        assert_abs_diff_eq!(tr.pre.times()[1], 10.0 * MS, epsilon = 1e-15);
        assert_abs_diff_eq!(tr.pre.times()[2], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn post_pre_post_unfolds() {
        let tr = generate_triplet(TripletKind::PostPrePost, -5.0 * MS, 5.0 * MS, 1.0, 1).unwrap();
        assert_eq!(tr.post.times(), &[0.0, 10.0 * MS]);
        assert_eq!(tr.pre.times(), &[5.0 * MS]);
    }

    #[test]
    fn triplet_sign_errors() {
        assert!(generate_triplet(TripletKind::PrePostPre, 5.0 * MS, 5.0 * MS, 1.0, 1).is_err());
        assert!(generate_triplet(TripletKind::PostPrePost, 5.0 * MS, 5.0 * MS, 1.0, 1).is_err());
    }

    #[test]
    fn quadruplet_midpoints() {
        let tr = generate_quadruplet(5.0 * MS, 20.0 * MS, 1.0, 1).unwrap();
        assert_eq!(tr.post.times()[0], 0.0);
        assert_abs_diff_eq!(tr.pre.times()[0], 5.0 * MS);
        assert_abs_diff_eq!(tr.pre.times()[1], 20.0 * MS);
        assert_abs_diff_eq!(tr.post.times()[1], 25.0 * MS);

        let mirrored = generate_quadruplet(5.0 * MS, -20.0 * MS, 1.0, 1).unwrap();
        assert_eq!(mirrored.pre.times()[0], 0.0);
        assert_abs_diff_eq!(mirrored.post.times()[0], 5.0 * MS);
        assert_abs_diff_eq!(mirrored.post.times()[1], 20.0 * MS);
        assert_abs_diff_eq!(mirrored.pre.times()[1], 25.0 * MS);

        assert!(generate_quadruplet(5.0 * MS, 5.0 * MS, 1.0, 1).is_err());
        assert!(generate_quadruplet(5.0 * MS, -5.0 * MS, 1.0, 1).is_err());
    }

    #[test]
    fn six_triplet_gap_timings_generate() {
        for kind in SixTripletKind::ALL {
            let (dt1, dt2) = kind.timings_from_gaps(10.0 * MS, 15.0 * MS);
            let tr = generate_six_triplet(kind, dt1, dt2, 0.2, 2).unwrap();
            assert_eq!(tr.pre.len() + tr.post.len(), 6, "{}", kind.name());
            let mut first: Vec<(f64, &str)> = tr.pre.times()[..tr.pre.len() / 2]
                .iter()
                .map(|&t| (t, "pre"))
                .chain(tr.post.times()[..tr.post.len() / 2].iter().map(|&t| (t, "post")))
                .collect();
            first.sort_by(|a, b| a.0.total_cmp(&b.0));
            let order: Vec<&str> = first.iter().map(|x| x.1).collect();
            assert_eq!(order.join("-"), kind.name());
            assert_abs_diff_eq!(first[1].0 - first[0].0, 10.0 * MS, epsilon = 1e-12);
            assert_abs_diff_eq!(first[2].0 - first[1].0, 15.0 * MS, epsilon = 1e-12);
        }
    }

    #[test]
    fn six_triplet_rejects_wrong_signs() {
        assert!(generate_six_triplet(SixTripletKind::PrePrePost, -5.0 * MS, 5.0 * MS, 0.2, 1).is_err());
        assert!(generate_six_triplet(SixTripletKind::PrePostPost, 10.0 * MS, 5.0 * MS, 0.2, 1).is_err());
    }

    #[test]
    fn poisson_zero_rate_is_empty() {
        assert!(generate_poisson(0.0, 10.0, 1).unwrap().is_empty());
        assert!(generate_poisson(-1.0, 10.0, 1).is_err());
        assert!(generate_poisson(1.0, 0.0, 1).is_err());
    }

    #[test]
    fn poisson_is_deterministic_per_seed() {
        let a = generate_poisson(10.0, 100.0, 42).unwrap();
        let b = generate_poisson(10.0, 100.0, 42).unwrap();
        let c = generate_poisson(10.0, 100.0, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.times().iter().all(|&t| t < 100.0));
    }

    #[test]
    fn poisson_jitters_collisions_forward() {
        // at 1 MHz nearly every interval falls below the floor
        let tr = generate_poisson(1e6, 1e-3, 3).unwrap();
        for w in tr.times().windows(2) {
            assert!(w[1] - w[0] >= RESOLUTION_SLACK);
        }
    }

    #[test]
    fn interaction_single_pair() {
        let tr = ProtocolTrains::new(train(&[10.0 * MS]), train(&[20.0 * MS]));
        let ev = nearest_interactions(&tr);
        assert_eq!(ev.len(), 2);
        assert_eq!(ev[0].kind, SpikeKind::Pre);
        assert_eq!(ev[0].delta_opposite, None);
        assert_eq!(ev[1].kind, SpikeKind::Post);
        assert_abs_diff_eq!(ev[1].delta_opposite.unwrap(), 10.0 * MS);
        assert_eq!(ev[1].delta_same, None);
    }

    #[test]
    fn interaction_post_without_pre() {
        let tr = ProtocolTrains::new(SpikeTrain::empty(), train(&[5.0 * MS]));
        let ev = nearest_interactions(&tr);
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].partner, None);
        assert_eq!(ev[0].delta_opposite, None);
    }

    #[test]
    fn interaction_hand_trace() {
        let tr = ProtocolTrains::new(train(&[0.0, 30.0 * MS]), train(&[10.0 * MS]));
        let ev = nearest_interactions(&tr);
        let kinds: Vec<_> = ev.iter().map(|e| e.kind).collect();
        assert_eq!(kinds, [SpikeKind::Pre, SpikeKind::Post, SpikeKind::Pre]);
        assert_abs_diff_eq!(ev[1].delta_opposite.unwrap(), 10.0 * MS);
        assert_abs_diff_eq!(ev[2].delta_opposite.unwrap(), -20.0 * MS);
        assert_abs_diff_eq!(ev[2].delta_same.unwrap(), 30.0 * MS);
    }

    #[test]
    fn coincident_spikes_pair_on_the_depression_side() {
        let tr = ProtocolTrains::new(train(&[5.0 * MS]), train(&[5.0 * MS]));
        let ev = nearest_interactions(&tr);
        assert_eq!(ev[0].kind, SpikeKind::Pre);
        assert_eq!(ev[0].delta_opposite, Some(0.0));
        assert_eq!(ev[1].kind, SpikeKind::Post);
        assert_eq!(ev[1].delta_opposite, None);
    }
}
