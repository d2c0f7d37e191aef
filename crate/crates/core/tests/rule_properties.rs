mod common;

use common::oracle;
use proptest::prelude::*;
use stdp_core::rules::{pstdp_total, suppressive_total, tstdp_total};
use stdp_core::{PairParams, ProtocolTrains, SpikeTrain, SuppressionParams, TripletParams};

fn times() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 0..50).prop_map(oracle::clean_times)
}

fn amplitude() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), 1e-4f64..1e-1]
}

fn tau() -> impl Strategy<Value = f64> {
    2e-3f64..0.2
}

prop_compose! {
    fn params()(
        a2_plus in amplitude(), a2_minus in amplitude(),
        a3_plus in amplitude(), a3_minus in amplitude(),
        tau_plus in tau(), tau_minus in tau(), tau_x in tau(), tau_y in tau(),
    ) -> TripletParams {
        TripletParams { a2_plus, a2_minus, a3_plus, a3_minus, tau_plus, tau_minus, tau_x, tau_y }
    }
}

fn trains(pre: &[f64], post: &[f64]) -> ProtocolTrains {
    ProtocolTrains::new(
        SpikeTrain::new(pre.to_vec()).unwrap(),
        SpikeTrain::new(post.to_vec()).unwrap(),
    )
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn event_driven_matches_brute_force(p in params(), pre in times(), post in times()) {
        let fast = tstdp_total(&p, &trains(&pre, &post));
        let slow = oracle::triplet(&p, &pre, &post);
        prop_assert!(close(fast, slow, 1e-12), "{fast} vs {slow}");
    }

    #[test]
    fn triplet_reduces_to_pair(p in params(), pre in times(), post in times()) {
        let q = TripletParams { a3_plus: 0.0, a3_minus: 0.0, ..p };
        let tr = trains(&pre, &post);
        prop_assert_eq!(tstdp_total(&q, &tr), pstdp_total(&q.pair(), &tr));
    }

    #[test]
    fn vanishing_suppression_is_pair(p in params(), pre in times(), post in times()) {
        let tr = trains(&pre, &post);
        let s = SuppressionParams { pair: p.pair(), tau_s: 1e-9 };
        let a = suppressive_total(&s, &tr);
        let b = pstdp_total(&p.pair(), &tr);
        prop_assert!(close(a, b, 1e-9), "{a} vs {b}");
    }

    #[test]
    fn translation_invariant(p in params(), pre in times(), post in times(), shift in 0.0f64..100.0) {
        let tr = trains(&pre, &post);
        let a = tstdp_total(&p, &tr);
        let b = tstdp_total(&p, &tr.shifted(shift).unwrap());
        let scale: f64 = p.to_array()[..4].iter().sum::<f64>() * (pre.len() + post.len()) as f64;
        prop_assert!((a - b).abs() <= 1e-9 * scale.max(1e-300), "{a} vs {b}");
    }

    #[test]
    fn linear_in_amplitudes(p in params(), pre in times(), post in times(), c in 0.0f64..10.0) {
        let tr = trains(&pre, &post);
        let a = tstdp_total(&p.scale_amplitudes(c), &tr);
        let b = c * tstdp_total(&p, &tr);
        let scale: f64 = c * p.to_array()[..4].iter().sum::<f64>() * (pre.len() + post.len()) as f64;
        prop_assert!((a - b).abs() <= 1e-12 * scale.max(1e-300), "{a} vs {b}");
    }

    #[test]
    fn pair_oracle(p in params(), pre in times(), post in times()) {
        let pp = PairParams { a_plus: p.a2_plus, a_minus: p.a2_minus, tau_plus: p.tau_plus, tau_minus: p.tau_minus };
        let a = pstdp_total(&pp, &trains(&pre, &post));
        let b = oracle::pair(&pp, &pre, &post);
        prop_assert!(close(a, b, 1e-12), "{a} vs {b}");
    }
}

#[test]
fn empty_trains_give_zero() {
    let p = TripletParams::hippocampal_style();
    assert_eq!(tstdp_total(&p, &trains(&[], &[0.1, 0.2])), 0.0);
    assert_eq!(tstdp_total(&p, &trains(&[0.1, 0.2], &[])), 0.0);
}
