#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rydberg_messenger::ir::{Action, Coord, LogicalCircuit, LogicalOp, PhysicalProgram, SingleQubitGate};

/// Up to `max_ops` logical ops on an `l`×`l` lattice, three quarters of them CZ.
pub fn random_circuit(seed: u64, l: u32, max_ops: usize) -> LogicalCircuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = LogicalCircuit::new(l);
    let n = rng.random_range(1..=max_ops);
    let coord = |rng: &mut ChaCha8Rng| Coord::new(rng.random_range(0..l), rng.random_range(0..l));
    for _ in 0..n {
        if rng.random_bool(0.75) {
            let a = coord(&mut rng);
            let mut b = coord(&mut rng);
            while b == a {
                b = coord(&mut rng);
            }
            c.ops.push(LogicalOp::Cz(a, b));
        } else {
            let g = [SingleQubitGate::H, SingleQubitGate::Z, SingleQubitGate::X][rng.random_range(0..3)];
            c.ops.push(LogicalOp::Single(g, coord(&mut rng)));
        }
    }
    c
}

/// Messengers whose load and dispose events do not pair up one to one.
pub fn unpaired_messengers(program: &PhysicalProgram) -> Vec<u32> {
    let mut tally: BTreeMap<u32, (u32, u32)> = BTreeMap::new();
    for e in &program.events {
        match e.action {
            Action::Load { messenger, .. } => tally.entry(messenger).or_default().0 += 1,
            Action::Dispose { messenger } => tally.entry(messenger).or_default().1 += 1,
            _ => {}
        }
    }
    tally.into_iter().filter(|(_, n)| *n != (1, 1)).map(|(m, _)| m).collect()
}

pub fn all_pairs(l: u32) -> Vec<(Coord, Coord)> {
    let sites: Vec<Coord> = (0..l).flat_map(|r| (0..l).map(move |c| Coord::new(r, c))).collect();
    let mut out = Vec::new();
    for &a in &sites {
        for &b in &sites {
            if a != b {
                out.push((a, b));
            }
        }
    }
    out
}
