use proptest::prelude::*;
use rydberg_messenger::arch::{ArchitectureSpec, Variant};
use rydberg_messenger::ir::{classical_bits, parse_program, render, Coord, LogicalCircuit, LogicalOp, PhysicalProgram, SingleQubitGate};
use rydberg_messenger::schedule::schedule;

fn circuit() -> impl Strategy<Value = LogicalCircuit> {
    (2u32..12).prop_flat_map(|l| {
        let coord = (0..l, 0..l).prop_map(|(r, c)| Coord::new(r, c));
        let op = prop_oneof![
            3 => (coord.clone(), coord.clone()).prop_filter("distinct", |(a, b)| a != b).prop_map(|(a, b)| LogicalOp::Cz(a, b)),
            1 => (prop_oneof![Just(SingleQubitGate::H), Just(SingleQubitGate::Z), Just(SingleQubitGate::X)], coord)
                .prop_map(|(g, c)| LogicalOp::Single(g, c)),
        ];
        prop::collection::vec(op, 0..12).prop_map(move |ops| LogicalCircuit { lattice_size: l, ops })
    })
}

fn variant() -> impl Strategy<Value = Variant> {
    prop::sample::select(Variant::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn render_then_parse_is_identity(c in circuit()) {
        prop_assert_eq!(parse_program(&render(&c)).unwrap(), c);
    }

    #[test]
    fn compiled_bits_have_one_writer_and_later_readers(c in circuit(), v in variant()) {
        let p = schedule(&c, &ArchitectureSpec::new(v, c.lattice_size)).unwrap();
        let usage = classical_bits(&p.events);
        prop_assert!(usage.is_valid(), "{:?}", usage.violations);
        for record in usage.bits.values() {
            prop_assert!(record.writer.is_some());
            prop_assert!(record.readers.len() <= 2);
        }
    }

    #[test]
    fn sorting_is_idempotent_and_jsonl_round_trips(c in circuit(), v in variant(), seed in any::<u64>()) {
        let p = schedule(&c, &ArchitectureSpec::new(v, c.lattice_size)).unwrap().events;
        let mut shuffled = p.events.clone();
        let n = shuffled.len();
        if n > 1 {
            for i in 0..n {
                shuffled.swap(i, (seed as usize).wrapping_mul(i + 7) % n);
            }
        }
        let once = PhysicalProgram::new(shuffled);
        let mut twice = once.clone();
        twice.sort();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(&once, &p);
        prop_assert_eq!(PhysicalProgram::from_jsonl(&p.to_jsonl()).unwrap().to_jsonl(), p.to_jsonl());
    }
}
