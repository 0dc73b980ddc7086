//! Space-time placement of compiled protocols.
//!
//! Positions are in lattice spacings, times in seconds. Messengers travel on
//! lanes that run half a spacing beside grid rows and columns, inside a box
//! that extends [`MARGIN`] lanes beyond the array on every side.

mod estimate;
mod greedy;
mod plan;
pub mod track;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::arch::{ArchError, ArchitectureSpec};
use crate::ir::{Action, GateKind, PhysicalProgram, QubitRef};

pub use estimate::{makespan_estimate, path_cells};
pub use greedy::schedule;
pub use plan::{plan_trajectories, FiredGate, Plan};
pub use track::{SegmentKind, TrajectorySegment, Zone};

use track::{max_distance, min_distance, Track};

/// Extra lanes on each side of the array.
pub const MARGIN: f64 = 2.0;
/// Concurrent two-qubit gates keep all involved atoms at least this far apart (lattice spacings).
pub const EXCLUSION_RADIUS: f64 = 2.0;
/// Messengers that do not interact keep at least this separation (lattice spacings).
pub const COLLISION_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("infeasible: {constraint}")]
    Infeasible { constraint: String },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error(transparent)]
    Arch(#[from] ArchError),
}

pub(crate) fn infeasible(constraint: impl Into<String>) -> ScheduleError {
    ScheduleError::Infeasible { constraint: constraint.into() }
}

/// Duration of a physical gate under `arch`.
pub fn gate_duration(arch: &ArchitectureSpec, kind: GateKind) -> f64 {
    match kind {
        GateKind::Cz | GateKind::Swap => arch.t2,
        GateKind::MeasureX(_) => arch.tr,
        _ => arch.t1,
    }
}

/// Lowest and highest coordinate of the transport box for lattice size `l`.
pub fn transport_box(lattice_size: u32) -> (f64, f64) {
    (-MARGIN - 1.0, lattice_size as f64 + MARGIN)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScheduledProgram {
    pub events: PhysicalProgram,
    /// Sorted by messenger, then time.
    pub trajectories: Vec<TrajectorySegment>,
    pub makespan: f64,
}

impl ScheduledProgram {
    pub fn messenger_track(&self, serial: u32) -> &[TrajectorySegment] {
        let lo = self.trajectories.partition_point(|s| s.messenger < serial);
        let hi = self.trajectories.partition_point(|s| s.messenger <= serial);
        &self.trajectories[lo..hi]
    }

    pub fn track(&self, q: &QubitRef) -> Track<'_> {
        match q {
            QubitRef::Computational(c) => Track::Static(c.position()),
            QubitRef::Messenger(s) => Track::Path(self.messenger_track(*s)),
        }
    }

    /// Time at which the last transport motion (belt, flight, routing, turnaround) ends.
    pub fn transport_end(&self) -> f64 {
        self.trajectories
            .iter()
            .filter(|s| s.kind.is_transport())
            .map(|s| s.t_end)
            .fold(0.0, f64::max)
    }

    pub fn trajectory_csv(&self) -> String {
        let mut out = String::from("messenger,t_start,t_end,x0,y0,x1,y1,kind\n");
        for s in &self.trajectories {
            let _ = writeln!(
                out,
                "m{},{:e},{:e},{},{},{},{},{}",
                s.messenger,
                s.t_start,
                s.t_end,
                s.start.x,
                s.start.y,
                s.end.x,
                s.end.y,
                s.kind.label()
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    /// Gate partners drift beyond the blockade radius during the gate.
    Blockade { event: usize, distance: f64, t_start: f64, t_end: f64 },
    /// Two overlapping two-qubit gates come closer than the exclusion radius.
    Exclusion { events: (usize, usize), distance: f64, time: f64 },
    /// Two messengers that never interact come too close.
    Collision { messengers: (u32, u32), distance: f64, time: f64 },
    Disposal { messenger: u32, detail: String },
    AfterDispose { messenger: u32, event: usize },
    Discontinuity { messenger: u32, time: f64, gap: f64 },
    Speed { messenger: u32, speed: f64, limit: f64 },
}

/// Lists every invariant violation of a scheduled program; empty means safe.
pub fn check_conflicts(program: &ScheduledProgram, arch: &ArchitectureSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let r = arch.radius_cells();
    let tol = 1e-9;
    let time_eps = 1e-9 * arch.t2;
    let events = &program.events.events;

    // Disposability.
    let mut loads: BTreeMap<u32, Vec<(usize, f64)>> = BTreeMap::new();
    let mut disposes: BTreeMap<u32, Vec<(usize, f64)>> = BTreeMap::new();
    let mut mentioned: BTreeSet<u32> = BTreeSet::new();
    for (i, e) in events.iter().enumerate() {
        match &e.action {
            Action::Load { messenger, .. } => loads.entry(*messenger).or_default().push((i, e.time)),
            Action::Dispose { messenger } => disposes.entry(*messenger).or_default().push((i, e.time)),
            _ => {}
        }
        if let Some(g) = e.action.gate() {
            mentioned.extend(g.messengers());
        } else if let Some(m) = e.action.messenger() {
            mentioned.insert(m);
        }
    }
    mentioned.extend(program.trajectories.iter().map(|s| s.messenger));
    for m in &mentioned {
        let nl = loads.get(m).map_or(0, Vec::len);
        let nd = disposes.get(m).map_or(0, Vec::len);
        if nl != 1 || nd != 1 {
            out.push(Violation::Disposal { messenger: *m, detail: format!("{nl} load(s), {nd} dispose(s)") });
        }
    }
    for (i, e) in events.iter().enumerate() {
        let ms: Vec<u32> = match &e.action {
            Action::Gate(g) => g.messengers().collect(),
            Action::Dispose { .. } => continue,
            other => other.messenger().into_iter().collect(),
        };
        for m in ms {
            if let Some(&(_, td)) = disposes.get(&m).and_then(|v| v.first()) {
                let end = e.time + e.action.gate().map_or(0.0, |g| gate_duration(arch, g.kind));
                if end > td + time_eps {
                    out.push(Violation::AfterDispose { messenger: m, event: i });
                }
            }
            if let Some(&(_, tl)) = loads.get(&m).and_then(|v| v.first()) {
                if e.time < tl - time_eps {
                    out.push(Violation::Disposal { messenger: m, detail: format!("event {i} precedes load") });
                }
            }
        }
    }

    // Trajectory continuity and speed.
    let limit = arch.speed_cells();
    for m in &mentioned {
        let segs = program.messenger_track(*m);
        for w in segs.windows(2) {
            let gap = w[0].end.distance(&w[1].start);
            let dt = (w[1].t_start - w[0].t_end).abs();
            if gap > tol || dt > time_eps {
                out.push(Violation::Discontinuity { messenger: *m, time: w[1].t_start, gap: gap.max(dt * limit) });
            }
        }
        for s in segs {
            if s.speed() > limit * (1.0 + tol) {
                out.push(Violation::Speed { messenger: *m, speed: s.speed() * arch.spacing, limit: arch.speed });
            }
        }
    }

    // Blockade during every two-qubit gate.
    let two_qubit: Vec<(usize, f64, f64, &[QubitRef])> = events
        .iter()
        .enumerate()
        .filter_map(|(i, e)| {
            let g = e.action.gate()?;
            g.kind.is_two_qubit().then(|| (i, e.time, e.time + gate_duration(arch, g.kind), g.operands.as_slice()))
        })
        .collect();
    for &(i, t0, t1, ops) in &two_qubit {
        let d = max_distance(&program.track(&ops[0]), &program.track(&ops[1]), t0, t1).unwrap_or(f64::INFINITY);
        if d > r * (1.0 + tol) {
            out.push(Violation::Blockade { event: i, distance: d * arch.spacing, t_start: t0, t_end: t1 });
        }
    }

    // Exclusion between overlapping two-qubit gates.
    for (k, &(i, s1, e1, ops1)) in two_qubit.iter().enumerate() {
        for &(j, s2, e2, ops2) in &two_qubit[k + 1..] {
            if s2 >= e1 - time_eps {
                break;
            }
            let (lo, hi) = (s1.max(s2), e1.min(e2));
            if hi - lo <= time_eps {
                continue;
            }
            if let Some((d, t)) = closest_atoms(program, ops1, ops2, lo, hi) {
                if d < EXCLUSION_RADIUS - tol {
                    out.push(Violation::Exclusion { events: (i, j), distance: d * arch.spacing, time: t });
                }
            }
        }
    }

    // Collisions between messengers that never share a gate.
    let mut partners: BTreeSet<(u32, u32)> = BTreeSet::new();
    for (_, _, _, ops) in &two_qubit {
        if let (Some(a), Some(b)) = (ops[0].messenger_serial(), ops[1].messenger_serial()) {
            partners.insert((a.min(b), a.max(b)));
        }
    }
    let ms: Vec<u32> = mentioned.into_iter().collect();
    for (k, &a) in ms.iter().enumerate() {
        let ta = Track::Path(program.messenger_track(a));
        let (alo, ahi) = ta.span();
        for &b in &ms[k + 1..] {
            if partners.contains(&(a, b)) {
                continue;
            }
            let tb = Track::Path(program.messenger_track(b));
            let (blo, bhi) = tb.span();
            if blo > ahi || alo > bhi {
                continue;
            }
            if let Some((d, t)) = min_distance(&ta, &tb, alo.max(blo), ahi.min(bhi)) {
                if d < COLLISION_RADIUS - tol {
                    out.push(Violation::Collision { messengers: (a, b), distance: d * arch.spacing, time: t });
                }
            }
        }
    }
    out
}

fn closest_atoms(program: &ScheduledProgram, a: &[QubitRef], b: &[QubitRef], t0: f64, t1: f64) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for qa in a {
        for qb in b {
            let d = if qa == qb {
                Some((0.0, t0))
            } else {
                min_distance(&program.track(qa), &program.track(qb), t0, t1)
            };
            if let Some(d) = d {
                if best.is_none_or(|b| d.0 < b.0) {
                    best = Some(d);
                }
            }
        }
    }
    best
}
