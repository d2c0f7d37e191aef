//! Protocol sets shaped like the two reference datasets, and noise-free or
//! noisy synthetic data generated from known parameters.

use rand_distr::{Distribution, Normal};

use super::{DataPoint, Dataset};
use crate::experiments::DEFAULT_REPETITIONS;
use crate::rules::{tstdp_total, TripletParams};
use crate::seed::stream_rng;
use crate::spike::{Protocol, TripletKind};

const MS: f64 = 1e-3;

/// 13 protocols: two pairings, three quadruplets and eight triplets, all at
/// 1 Hz with 60 repetitions.
pub fn hippocampal_protocols() -> Vec<Protocol> {
    let n = DEFAULT_REPETITIONS;
    let rho = 1.0;
    let mut out = vec![
        Protocol::Pairing {
            dt: 5.0 * MS,
            rho,
            n_pairs: n,
        },
        Protocol::Pairing {
            dt: -5.0 * MS,
            rho,
            n_pairs: n,
        },
    ];
    for t in [-50.0, 20.0, 50.0] {
        out.push(Protocol::Quadruplet {
            dt: 5.0 * MS,
            t: t * MS,
            rho,
            n,
        });
    }
    for (a, b) in [(5.0, -5.0), (10.0, -10.0), (15.0, -5.0), (5.0, -15.0)] {
        out.push(Protocol::Triplet {
            kind: TripletKind::PrePostPre,
            dt1: a * MS,
            dt2: b * MS,
            rho,
            n,
        });
    }
    for (a, b) in [(-5.0, 5.0), (-10.0, 10.0), (-5.0, 15.0), (-15.0, 5.0)] {
        out.push(Protocol::Triplet {
            kind: TripletKind::PostPrePost,
            dt1: a * MS,
            dt2: b * MS,
            rho,
            n,
        });
    }
    out
}

/// 10 protocols: pairings at ±10 ms across five repetition rates.
pub fn visual_cortex_protocols() -> Vec<Protocol> {
    let mut out = Vec::with_capacity(10);
    for dt in [10.0 * MS, -10.0 * MS] {
        for rho in [0.1, 10.0, 20.0, 40.0, 50.0] {
            out.push(Protocol::Pairing {
                dt,
                rho,
                n_pairs: DEFAULT_REPETITIONS,
            });
        }
    }
    out
}

/// Dataset whose means are the rule's own predictions. Every point gets the
/// same SEM, `sem_fraction` of the largest |Δw|. With `noise_seed`, each
/// mean is displaced by one Gaussian SEM-scaled draw.
pub fn synthetic_dataset(
    name: &str,
    params: &TripletParams,
    protocols: &[Protocol],
    sem_fraction: f64,
    noise_seed: Option<u64>,
) -> crate::Result<Dataset> {
    params.validate()?;
    let dws = protocols
        .iter()
        .map(|p| Ok(tstdp_total(params, &p.generate()?)))
        .collect::<crate::Result<Vec<f64>>>()?;
    let scale = dws.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let sem = if scale > 0.0 {
        sem_fraction * scale
    } else {
        sem_fraction
    };
    let points = protocols
        .iter()
        .zip(&dws)
        .enumerate()
        .map(|(i, (protocol, &dw))| {
            let dw_exp = match noise_seed {
                Some(seed) => {
                    let z: f64 = Normal::new(0.0, 1.0)
                        .expect("unit normal")
                        .sample(&mut stream_rng(seed, i as u64));
                    dw + sem * z
                }
                None => dw,
            };
            DataPoint {
                protocol: protocol.clone(),
                dw_exp,
                sem,
            }
        })
        .collect();
    Dataset::new(name, points)
}

/// Noise-free 13-point dataset with 10% SEMs.
pub fn hippocampal_dataset(params: &TripletParams) -> Dataset {
    synthetic_dataset("hippocampal", params, &hippocampal_protocols(), 0.1, None).expect("built-in protocols are valid")
}

/// Noise-free 10-point dataset with 10% SEMs.
pub fn visual_cortex_dataset(params: &TripletParams) -> Dataset {
    synthetic_dataset("visual-cortex", params, &visual_cortex_protocols(), 0.1, None)
        .expect("built-in protocols are valid")
}
