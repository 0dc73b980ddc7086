use std::collections::HashMap;

use crate::arch::{ArchitectureSpec, Compiler};
use crate::ir::{validate, Coord, Gate, LogicalCircuit, LogicalOp, QubitRef};

use super::plan::{assemble, plan_decomposition, single_qubit_plan, Plan};
use super::track::{min_distance, Track, TrajectorySegment};
use super::{ScheduleError, ScheduledProgram, COLLISION_RADIUS, EXCLUSION_RADIUS};

/// Placed two-qubit gate, with atoms resolved to static points or messenger serials.
struct Busy2q {
    start: f64,
    end: f64,
    atoms: Vec<QubitRef>,
}

#[derive(Default)]
struct Committed {
    gates: Vec<Busy2q>,
    paths: HashMap<u32, Vec<TrajectorySegment>>,
    qubit_free: HashMap<Coord, f64>,
}

impl Committed {
    fn track(&self, q: &QubitRef) -> Track<'_> {
        match q {
            QubitRef::Computational(c) => Track::Static(c.position()),
            QubitRef::Messenger(s) => Track::Path(self.paths.get(s).map_or(&[], Vec::as_slice)),
        }
    }

    /// Whether `plan` clashes with anything committed.
    fn clash(&self, plan: &Plan, eps: f64) -> bool {
        for g in plan.gates.iter().filter(|g| g.gate.kind.is_two_qubit()) {
            let (s, e) = (g.start, g.end());
            for old in &self.gates {
                if old.start >= e - eps || s >= old.end - eps {
                    continue;
                }
                let (lo, hi) = (s.max(old.start), e.min(old.end));
                for p in &g.gate.operands {
                    for q in &old.atoms {
                        if p == q {
                            return true;
                        }
                        if min_distance(&plan.track(p), &self.track(q), lo, hi).is_some_and(|(d, _)| d < EXCLUSION_RADIUS - 1e-9) {
                            return true;
                        }
                    }
                }
            }
        }
        for m in plan.messengers() {
            let mine = Track::Path(plan.messenger_track(m));
            let (lo, hi) = mine.span();
            for segs in self.paths.values() {
                let other = Track::Path(segs);
                let (olo, ohi) = other.span();
                if olo > hi || lo > ohi {
                    continue;
                }
                if min_distance(&mine, &other, lo.max(olo), hi.min(ohi)).is_some_and(|(d, _)| d < COLLISION_RADIUS - 1e-9) {
                    return true;
                }
            }
        }
        false
    }

    fn commit(&mut self, plan: &Plan) {
        for g in &plan.gates {
            if g.gate.kind.is_two_qubit() {
                self.gates.push(Busy2q { start: g.start, end: g.end(), atoms: g.gate.operands.clone() });
            }
            for c in g.gate.operands.iter().filter_map(QubitRef::coord) {
                let f = self.qubit_free.entry(c).or_insert(0.0);
                *f = f.max(g.end());
            }
        }
        for s in &plan.trajectories {
            self.paths.entry(s.messenger).or_default().push(*s);
        }
    }
}

/// Earliest offset at which `plan` respects per-qubit order and clashes with nothing placed.
fn place(committed: &Committed, plan: &Plan, arch: &ArchitectureSpec) -> f64 {
    let eps = 1e-9 * arch.t2;
    let mut first_use: HashMap<Coord, f64> = HashMap::new();
    for g in &plan.gates {
        for c in g.gate.operands.iter().filter_map(QubitRef::coord) {
            let f = first_use.entry(c).or_insert(f64::INFINITY);
            *f = f.min(g.start);
        }
    }
    let mut lb: f64 = 0.0;
    for (c, first) in &first_use {
        if let Some(free) = committed.qubit_free.get(c) {
            lb = lb.max(free - first);
        }
    }
    let (mut offset, step) = match plan.quantum {
        Some(q) => ((lb / q - 1e-9).ceil().max(0.0) * q, q),
        None => (lb, 0.5 * arch.spacing / arch.speed),
    };
    while committed.clash(&plan.shifted(offset), eps) {
        offset += step;
    }
    offset
}

/// Greedy list scheduling in circuit order. The circuit's lattice size overrides the architecture's.
pub fn schedule(circuit: &LogicalCircuit, arch: &ArchitectureSpec) -> Result<ScheduledProgram, ScheduleError> {
    if let Some(v) = validate(circuit).first() {
        return Err(ScheduleError::InvalidCircuit(format!("op {}: {}", v.op_index, v.message)));
    }
    let arch = ArchitectureSpec { lattice_size: circuit.lattice_size.max(2), ..arch.clone() };
    arch.validate()?;
    let mut compiler = Compiler::new();
    let mut committed = Committed::default();
    let mut placed = Vec::with_capacity(circuit.ops.len());
    for op in &circuit.ops {
        let plan = match op {
            LogicalOp::Cz(a, b) => plan_decomposition(&arch, &compiler.decompose(&arch, *a, *b)?)?,
            LogicalOp::Single(g, c) => single_qubit_plan(&arch, Gate::single(g.kind(), *c), *c),
        };
        let offset = place(&committed, &plan, &arch);
        let plan = plan.shifted(offset);
        committed.commit(&plan);
        placed.push(plan);
    }
    Ok(assemble(placed))
}
