use std::collections::HashSet;

use proptest::prelude::*;
use rydberg_messenger::arch::{decompose_cz, gate_counts, neighbor_chain_decompose, one_way_case, ArchitectureSpec, Compiler, Protocol, Variant};
use rydberg_messenger::ir::Coord;

fn sized_pair() -> impl Strategy<Value = (u32, Coord, Coord)> {
    (2u32..40).prop_flat_map(|l| {
        let coord = (0..l, 0..l).prop_map(|(r, c)| Coord::new(r, c));
        (Just(l), coord.clone(), coord).prop_filter("distinct", |(_, a, b)| a != b)
    })
}

fn variant() -> impl Strategy<Value = Variant> {
    prop::sample::select(Variant::ALL.to_vec())
}

proptest! {
    #[test]
    fn counts_do_not_depend_on_distance((l, a, b) in sized_pair(), v in variant()) {
        let d = decompose_cz(&ArchitectureSpec::new(v, l), a, b).unwrap();
        prop_assert_eq!(d.counts.triple(), gate_counts(v, one_way_case(a, b)));
        prop_assert_eq!(d.counts, Protocol::for_pair(v, a, b).counts());
    }

    #[test]
    fn case_predicate_is_symmetric((_l, a, b) in sized_pair()) {
        prop_assert_eq!(one_way_case(a, b), one_way_case(b, a));
    }

    #[test]
    fn throw_catch_throw_and_shuttle_and_route_share_gates((l, a, b) in sized_pair()) {
        let tct = decompose_cz(&ArchitectureSpec::new(Variant::ThrowCatchThrow, l), a, b).unwrap();
        let sr = decompose_cz(&ArchitectureSpec::new(Variant::ShuttleAndRoute, l), a, b).unwrap();
        prop_assert_eq!(&tct.gates, &sr.gates);
        prop_assert_ne!(&tct.transport_plan, &sr.transport_plan);
    }

    #[test]
    fn messengers_are_never_shared(pairs in prop::collection::vec(sized_pair(), 1..8), v in variant()) {
        let mut compiler = Compiler::new();
        let mut seen = HashSet::new();
        for (l, a, b) in pairs {
            let d = compiler.decompose(&ArchitectureSpec::new(v, l), a, b).unwrap();
            for m in d.messengers {
                prop_assert!(seen.insert(m), "m{} reused", m);
            }
        }
    }

    #[test]
    fn neighbor_chain_grows_with_distance((_l, a, b) in sized_pair()) {
        let d = neighbor_chain_decompose(a, b).unwrap();
        prop_assert_eq!(d.counts.n2(), 2 * (a.manhattan(&b) - 1) + 1);
        prop_assert_eq!(d.counts.n2_cz, 1);
    }
}
