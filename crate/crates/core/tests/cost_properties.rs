use proptest::prelude::*;
use rydberg_messenger::arch::{decompose_cz, gate_counts, one_way_case, ArchitectureSpec, GateCounts, Protocol, Variant};
use rydberg_messenger::cost::{
    logical_gate_fidelity, neighbor_chain_asymptotic, neighbor_chain_exact, neighbor_chain_fidelity, protocol_fidelity, CostParams,
};
use rydberg_messenger::ir::Coord;

fn params() -> impl Strategy<Value = CostParams> {
    (0.0..0.1f64, 0.0..0.1f64, 0.0..0.1f64, 0.0..0.1f64, 0.9..=1.0f64).prop_map(|(p1, pcz, pswap, pr, fs)| CostParams {
        f1: 1.0 - p1,
        f2_cz: 1.0 - pcz,
        f2_swap: 1.0 - pswap,
        fr: 1.0 - pr,
        f_shuttle: fs,
        shuttle_kappa: 0.0,
        p2: pcz,
    })
}

fn protocol() -> impl Strategy<Value = Protocol> {
    prop::sample::select(Protocol::ALL.to_vec())
}

fn literal(c: GateCounts, p: &CostParams) -> f64 {
    let mut f = 1.0;
    for _ in 0..c.n2_cz {
        f *= p.f2_cz;
    }
    let mut g = 1.0;
    for _ in 0..c.n2_swap {
        g *= p.f2_swap;
    }
    let mut h = 1.0;
    for _ in 0..c.n1 {
        h *= p.f1;
    }
    let mut r = 1.0;
    for _ in 0..c.nr {
        r *= p.fr;
    }
    f * g * h * r * p.f_shuttle
}

proptest! {
    #[test]
    fn fidelity_is_the_literal_product(p in params(), proto in protocol()) {
        let c = proto.counts();
        prop_assert_eq!(logical_gate_fidelity(c, &p).unwrap().fidelity, literal(c, &p));
    }

    #[test]
    fn fidelity_falls_with_every_error(p in params(), proto in protocol(), bump in 1e-6..0.05f64) {
        let base = protocol_fidelity(proto, &p).unwrap().fidelity;
        let c = proto.counts();
        let worse = [
            (CostParams { f1: p.f1 * (1.0 - bump), ..p }, c.n1),
            (CostParams { f2_cz: p.f2_cz * (1.0 - bump), ..p }, c.n2_cz),
            (CostParams { f2_swap: p.f2_swap * (1.0 - bump), ..p }, c.n2_swap),
            (CostParams { fr: p.fr * (1.0 - bump), ..p }, c.nr),
            (CostParams { f_shuttle: p.f_shuttle * (1.0 - bump), ..p }, 1),
        ];
        for (q, count) in worse {
            let f = protocol_fidelity(proto, &q).unwrap().fidelity;
            prop_assert!(f <= base);
            if count > 0 {
                prop_assert!(f < base);
            }
        }
    }

    #[test]
    fn compiled_and_tabulated_counts_agree(p in params(), v in prop::sample::select(Variant::ALL.to_vec()), l in 2u32..30, r in 0u32..30, c in 0u32..30) {
        let (a, b) = (Coord::new(0, 0), Coord::new(r % l, c % l));
        prop_assume!(a != b);
        let d = decompose_cz(&ArchitectureSpec::new(v, l), a, b).unwrap();
        let (n1, n2, nr) = gate_counts(v, one_way_case(a, b));
        let table = GateCounts { n1, n2_cz: d.counts.n2_cz, n2_swap: n2 - d.counts.n2_cz, nr };
        prop_assert_eq!(logical_gate_fidelity(d.counts, &p).unwrap().fidelity, logical_gate_fidelity(table, &p).unwrap().fidelity);
    }

    #[test]
    fn messenger_fidelity_is_size_independent(p in params(), v in prop::sample::select(Variant::ALL.to_vec()), l in 3u32..60) {
        let arch = ArchitectureSpec::new(v, l);
        let near = decompose_cz(&arch, Coord::new(0, 0), Coord::new(1, 1)).unwrap();
        let far = decompose_cz(&arch, Coord::new(0, 0), Coord::new(l - 1, l - 1)).unwrap();
        let f = |c| logical_gate_fidelity(c, &p).unwrap().fidelity;
        prop_assert_eq!(f(near.counts), f(far.counts));
        let chain_near = neighbor_chain_fidelity(l, Coord::new(0, 0), Coord::new(1, 1), p.p2).unwrap();
        let chain_far = neighbor_chain_fidelity(l, Coord::new(0, 0), Coord::new(l - 1, l - 1), p.p2).unwrap();
        prop_assert!(chain_far.exact <= chain_near.exact);
    }

    #[test]
    fn chain_forms_agree_for_small_total_error(n2 in 1u32..400, total in 0.0..=0.2f64) {
        let p2 = total / n2 as f64;
        let exact = neighbor_chain_exact(p2, n2);
        let asymptotic = neighbor_chain_asymptotic(p2, n2);
        prop_assert!((exact - asymptotic).abs() <= 0.05 * exact);
    }
}

#[test]
fn frozen_values() {
    let p = CostParams { fr: 1.0, ..CostParams::from_errors(5e-4, 1e-3, 0.0) };
    let two_way = protocol_fidelity(Protocol::TwoWayBelt, &p).unwrap();
    assert!((two_way.error - 6.978786461276e-3).abs() < 1e-15);
    assert!((two_way.fidelity - 0.993021213538724).abs() < 1e-14);
    let p = CostParams::from_errors(5e-4, 1e-3, 3e-3);
    let tm = protocol_fidelity(Protocol::ThrowAndMeasure, &p).unwrap();
    assert!((tm.fidelity - 0.994_012_238_754_749_3).abs() < 1e-15);
    assert!((neighbor_chain_asymptotic(1e-3, 100) - 0.9048374180359595).abs() < 1e-15);
    assert!((neighbor_chain_exact(1e-3, 11) - 0.9890548353295384).abs() < 1e-15);
    assert!((neighbor_chain_exact(1e-3, 195) - 0.8227543820685886).abs() < 1e-15);
    assert_eq!(neighbor_chain_fidelity(4, Coord::new(0, 0), Coord::new(3, 3), 1e-3).unwrap().n2, 11);
    assert_eq!(neighbor_chain_exact(0.0, 50), 1.0);
}
