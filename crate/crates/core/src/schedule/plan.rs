use std::collections::HashMap;

use crate::arch::{ArchitectureSpec, Decomposition, Protocol};
use crate::ir::{Action, Belt, BitId, Coord, Gate, GateKind, PhysicalEvent, PhysicalProgram, Point, QubitRef};

use super::track::{min_distance, proximity_intervals, SegmentKind, Track, TrajectorySegment, Zone};
use super::{gate_duration, infeasible, transport_box, ScheduleError, ScheduledProgram, COLLISION_RADIUS, EXCLUSION_RADIUS};

/// A physical gate with its firing time.
#[derive(Debug, Clone, PartialEq)]
pub struct FiredGate {
    pub gate: Gate,
    pub start: f64,
    pub duration: f64,
    pub position: Point,
}

impl FiredGate {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }
}

/// Timed gates and motion for one logical operation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Plan {
    pub gates: Vec<FiredGate>,
    /// Load, Route, Throw, Catch and Dispose events.
    pub transport: Vec<PhysicalEvent>,
    pub trajectories: Vec<TrajectorySegment>,
    /// Offsets between plans must be multiples of this to keep belt sites aligned.
    pub quantum: Option<f64>,
}

impl Plan {
    pub fn shifted(&self, dt: f64) -> Plan {
        Plan {
            gates: self.gates.iter().map(|g| FiredGate { start: g.start + dt, ..g.clone() }).collect(),
            transport: self.transport.iter().map(|e| PhysicalEvent { time: e.time + dt, ..e.clone() }).collect(),
            trajectories: self.trajectories.iter().map(|s| s.shifted(dt)).collect(),
            quantum: self.quantum,
        }
    }

    pub fn start(&self) -> f64 {
        let g = self.gates.iter().map(|g| g.start);
        let t = self.transport.iter().map(|e| e.time);
        let s = self.trajectories.iter().map(|s| s.t_start);
        g.chain(t).chain(s).fold(f64::INFINITY, f64::min)
    }

    pub fn end(&self) -> f64 {
        let g = self.gates.iter().map(FiredGate::end);
        let t = self.transport.iter().map(|e| e.time);
        let s = self.trajectories.iter().map(|s| s.t_end);
        g.chain(t).chain(s).fold(f64::NEG_INFINITY, f64::max)
    }

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

    pub fn messengers(&self) -> Vec<u32> {
        let mut m: Vec<u32> = self.trajectories.iter().map(|s| s.messenger).collect();
        m.dedup();
        m
    }

    pub fn into_program(self) -> ScheduledProgram {
        assemble(vec![self])
    }
}

/// Merges placed plans into one program.
pub(crate) fn assemble(plans: Vec<Plan>) -> ScheduledProgram {
    let mut events = Vec::new();
    let mut trajectories = Vec::new();
    let mut makespan: f64 = 0.0;
    for p in plans {
        makespan = makespan.max(p.end());
        events.extend(p.gates.into_iter().map(|g| PhysicalEvent { time: g.start, position: g.position, action: Action::Gate(g.gate) }));
        events.extend(p.transport);
        trajectories.extend(p.trajectories);
    }
    trajectories.sort_by(|a, b| a.messenger.cmp(&b.messenger).then(a.t_start.total_cmp(&b.t_start)));
    ScheduledProgram { events: PhysicalProgram::new(events), trajectories, makespan }
}

/// Sign used for travel direction; zero counts as positive.
fn sign(d: f64) -> f64 {
    if d < 0.0 { -1.0 } else { 1.0 }
}

fn sgn_i(d: f64) -> i32 {
    if d < 0.0 { -1 } else { 1 }
}

/// One messenger's route, built leg by leg.
#[derive(Debug, Clone)]
struct Course {
    serial: u32,
    t: f64,
    pos: Point,
    segs: Vec<TrajectorySegment>,
    events: Vec<PhysicalEvent>,
    readout: bool,
}

impl Course {
    fn new(serial: u32, pos: Point, t: f64, belt: Option<Belt>) -> Self {
        let load = PhysicalEvent { time: t, position: pos, action: Action::Load { messenger: serial, belt } };
        Self { serial, t, pos, segs: Vec::new(), events: vec![load], readout: false }
    }

    fn push(&mut self, kind: SegmentKind, to: Point, dt: f64) {
        self.segs.push(TrajectorySegment {
            messenger: self.serial,
            kind,
            t_start: self.t,
            t_end: self.t + dt,
            start: self.pos,
            end: to,
        });
        self.t += dt;
        self.pos = to;
    }

    fn ride(&mut self, belt: Belt, to: Point, speed: f64) {
        let dt = self.pos.distance(&to) / speed;
        self.push(SegmentKind::BeltRide(belt), to, dt);
    }

    fn route(&mut self, from: Belt, to: Belt, dwell: f64) {
        self.events.push(PhysicalEvent { time: self.t, position: self.pos, action: Action::Route { messenger: self.serial, from, to } });
        self.push(SegmentKind::Routing { from, to }, self.pos, dwell);
    }

    fn fly(&mut self, to: Point, speed: f64) {
        let dir = to.sub(&self.pos);
        let velocity = dir.scale(speed / dir.norm());
        self.events.push(PhysicalEvent { time: self.t, position: self.pos, action: Action::Throw { messenger: self.serial, velocity } });
        self.push(SegmentKind::FreeFlight(velocity), to, dir.norm() / speed);
    }

    fn catch(&mut self) {
        self.events.push(PhysicalEvent { time: self.t, position: self.pos, action: Action::Catch { messenger: self.serial } });
    }

    fn track(&self) -> Track<'_> {
        Track::Path(&self.segs)
    }
}

type Candidate = Vec<Course>;

/// Quantized routing dwell keeps a rerouted messenger on a belt site.
fn routing_dwell(arch: &ArchitectureSpec, period: f64) -> f64 {
    (arch.t_route / period - 1e-9).ceil().max(0.0) * period
}

struct Frame {
    lo: f64,
    hi: f64,
    speed: f64,
}

impl Frame {
    fn edge(&self, s: f64) -> f64 {
        if s > 0.0 { self.hi } else { self.lo }
    }

    fn lane_ok(&self, v: f64) -> bool {
        v > self.lo && v < self.hi
    }
}

fn two_way(frame: &Frame, d: &Decomposition) -> Vec<Candidate> {
    let (a, b) = (d.slot_a.position(), d.slot_b.position());
    let (sx, sy) = (sign(b.x - a.x), sign(b.y - a.y));
    let v = frame.speed;
    let m = &d.messengers;
    let mut out = Vec::new();
    for y1 in [a.y - sy * 0.5, a.y + sy * 0.5] {
        for x2 in [b.x + sx * 0.5, b.x - sx * 0.5] {
            for k in 0..3 {
                for x4 in [a.x - sx * 0.5, a.x + sx * 0.5] {
                    let y3 = b.y + sy * (0.5 + k as f64);
                    if ![y1, x2, y3, x4].iter().all(|l| frame.lane_ok(*l)) || (y3 - y1) * sy < 0.0 || (x2 - x4) * sx < 0.0 {
                        continue;
                    }
                    let (bx, by) = (Belt::along_x(sgn_i(sx)), Belt::along_y(sgn_i(sy)));
                    let (nbx, nby) = (Belt::along_x(-sgn_i(sx)), Belt::along_y(-sgn_i(sy)));
                    let t_x1 = (x2 - frame.edge(-sx)).abs() / v;
                    let t_x2 = t_x1 + (y3 - y1).abs() / v;
                    let t_x3 = t_x2 + (x2 - x4).abs() / v;

                    let mut c1 = Course::new(m[0], Point::new(frame.edge(-sx), y1), 0.0, Some(bx));
                    c1.ride(bx, Point::new(frame.edge(sx), y1), v);
                    let t = t_x1 - (y1 - frame.edge(-sy)).abs() / v;
                    let mut c2 = Course::new(m[1], Point::new(x2, frame.edge(-sy)), t, Some(by));
                    c2.ride(by, Point::new(x2, frame.edge(sy)), v);
                    let t = t_x2 - (x2 - frame.edge(sx)).abs() / v;
                    let mut c3 = Course::new(m[2], Point::new(frame.edge(sx), y3), t, Some(nbx));
                    c3.ride(nbx, Point::new(frame.edge(-sx), y3), v);
                    let t = t_x3 - (y3 - frame.edge(sy)).abs() / v;
                    let mut c4 = Course::new(m[3], Point::new(x4, frame.edge(sy)), t, Some(nby));
                    c4.ride(nby, Point::new(x4, frame.edge(-sy)), v);
                    out.push(vec![c1, c2, c3, c4]);
                }
            }
        }
    }
    out
}

/// Horizontal messenger on lane `y1` flowing +x meets a vertical one on lane `x2` flowing +y.
fn one_way(frame: &Frame, d: &Decomposition, lanes: [(f64, f64); 4], second_reads: bool, first_reads: bool) -> Vec<Candidate> {
    let v = frame.speed;
    let m = &d.messengers;
    let mut out = Vec::new();
    for (y1, x2) in lanes {
        if !frame.lane_ok(y1) || !frame.lane_ok(x2) {
            continue;
        }
        let mut c1 = Course::new(m[0], Point::new(frame.lo, y1), 0.0, Some(Belt::PlusX));
        c1.ride(Belt::PlusX, Point::new(frame.hi, y1), v);
        c1.readout = first_reads;
        let t = (x2 - frame.lo) / v - (y1 - frame.lo) / v;
        let mut c2 = Course::new(m[1], Point::new(x2, frame.lo), t, Some(Belt::PlusY));
        c2.ride(Belt::PlusY, Point::new(x2, frame.hi), v);
        c2.readout = second_reads;
        out.push(vec![c1, c2]);
    }
    out
}

/// Straight flight through both targets, offset half a spacing sideways and clipped to the box.
fn flight_line(frame: &Frame, a: Point, b: Point, side: f64) -> Option<(Point, Point)> {
    let dir = b.sub(&a);
    let u = dir.scale(1.0 / dir.norm());
    let n = Point::new(-u.y, u.x);
    let p0 = a.add(&n.scale(0.5 * side));
    let (mut s_in, mut s_out) = (f64::NEG_INFINITY, f64::INFINITY);
    for (p, du) in [(p0.x, u.x), (p0.y, u.y)] {
        if du.abs() < 1e-15 {
            if !frame.lane_ok(p) {
                return None;
            }
            continue;
        }
        let (t0, t1) = ((frame.lo - p) / du, (frame.hi - p) / du);
        s_in = s_in.max(t0.min(t1));
        s_out = s_out.min(t0.max(t1));
    }
    (s_in < 0.0 && s_out > dir.norm()).then(|| (p0.add(&u.scale(s_in)), p0.add(&u.scale(s_out))))
}

fn throw_catch_throw(frame: &Frame, d: &Decomposition, arch: &ArchitectureSpec) -> Vec<Candidate> {
    let (a, b) = (d.slot_a.position(), d.slot_b.position());
    [1.0, -1.0]
        .into_iter()
        .filter_map(|side| flight_line(frame, a, b, side))
        .map(|(entry, exit)| {
            let mut c = Course::new(d.messengers[0], entry, 0.0, None);
            c.fly(exit, frame.speed);
            c.catch();
            c.push(SegmentKind::Turnaround, exit, arch.t_turnaround);
            c.fly(entry, frame.speed);
            vec![c]
        })
        .collect()
}

fn throw_and_measure(frame: &Frame, d: &Decomposition) -> Vec<Candidate> {
    let (a, b) = (d.slot_a.position(), d.slot_b.position());
    [1.0, -1.0]
        .into_iter()
        .filter_map(|side| flight_line(frame, a, b, side))
        .map(|(entry, exit)| {
            let mut c = Course::new(d.messengers[0], entry, 0.0, None);
            c.fly(exit, frame.speed);
            c.catch();
            c.readout = true;
            vec![c]
        })
        .collect()
}

/// Rectangular loop through A, B and back to A with five belt transfers.
fn shuttle_and_route(frame: &Frame, d: &Decomposition, arch: &ArchitectureSpec) -> Vec<Candidate> {
    let (a, b) = (d.slot_a.position(), d.slot_b.position());
    let (sx, sy) = (sign(b.x - a.x), sign(b.y - a.y));
    let (bx, by) = (Belt::along_x(sgn_i(sx)), Belt::along_y(sgn_i(sy)));
    let (nbx, nby) = (Belt::along_x(-sgn_i(sx)), Belt::along_y(-sgn_i(sy)));
    let v = frame.speed;
    let dwell = routing_dwell(arch, 1.0 / v);
    let mut out = Vec::new();
    for ex in 0..2 {
        for ey in 0..2 {
            for k5 in 0..3 {
                let y_lo = a.y - sy * 0.5;
                let x_lo = a.x - sx * 0.5;
                let x_hi = b.x + sx * (0.5 + ex as f64);
                let y_hi = b.y + sy * (0.5 + ey as f64);
                let x5 = a.x + sx * (0.5 + k5 as f64);
                if ![y_lo, x_lo, x_hi, y_hi, x5].iter().all(|l| frame.lane_ok(*l)) {
                    continue;
                }
                let mut c = Course::new(d.messengers[0], Point::new(frame.edge(-sx), y_lo), 0.0, Some(bx));
                c.ride(bx, Point::new(x_hi, y_lo), v);
                c.route(bx, by, dwell);
                c.ride(by, Point::new(x_hi, y_hi), v);
                c.route(by, nbx, dwell);
                c.ride(nbx, Point::new(x_lo, y_hi), v);
                c.route(nbx, nby, dwell);
                c.ride(nby, Point::new(x_lo, y_lo), v);
                c.route(nby, bx, dwell);
                c.ride(bx, Point::new(x5, y_lo), v);
                c.route(bx, nby, dwell);
                c.ride(nby, Point::new(x5, frame.edge(-sy)), v);
                out.push(vec![c]);
            }
        }
    }
    out
}

fn candidates(arch: &ArchitectureSpec, d: &Decomposition, protocol: Protocol, frame: &Frame) -> Vec<Candidate> {
    let (p, q) = (d.slot_a.position(), d.slot_b.position());
    match protocol {
        Protocol::TwoWayBelt => two_way(frame, d),
        Protocol::OneWayAligned => {
            let lanes = [(p.y - 0.5, q.x + 0.5), (p.y - 0.5, q.x - 0.5), (p.y + 0.5, q.x + 0.5), (p.y + 0.5, q.x - 0.5)];
            one_way(frame, d, lanes, true, false)
        }
        Protocol::OneWayCrossed => {
            let lanes = [(p.y + 0.5, q.x + 0.5), (p.y + 0.5, q.x - 0.5), (p.y - 0.5, q.x + 0.5), (p.y - 0.5, q.x - 0.5)];
            one_way(frame, d, lanes, true, true)
        }
        Protocol::ThrowCatchThrow => throw_catch_throw(frame, d, arch),
        Protocol::ShuttleAndRoute => shuttle_and_route(frame, d, arch),
        Protocol::ThrowAndMeasure => throw_and_measure(frame, d),
    }
}

/// Fires the gates of `d` on fixed courses, earliest first.
fn fire(arch: &ArchitectureSpec, d: &Decomposition, mut courses: Vec<Course>, quantum: Option<f64>) -> Result<Plan, String> {
    let r = arch.radius_cells();
    let eps = 1e-9 * arch.t2;
    let index: HashMap<u32, usize> = courses.iter().enumerate().map(|(i, c)| (c.serial, i)).collect();
    fn track_of<'c>(courses: &'c [Course], index: &HashMap<u32, usize>, q: &QubitRef) -> Track<'c> {
        match q {
            QubitRef::Computational(c) => Track::Static(c.position()),
            QubitRef::Messenger(s) => courses[index[s]].track(),
        }
    }
    let mut ready: HashMap<QubitRef, f64> = HashMap::new();
    for c in &courses {
        ready.insert(QubitRef::Messenger(c.serial), c.segs[0].t_start);
    }
    let mut bits: HashMap<BitId, f64> = HashMap::new();
    let mut fired: Vec<FiredGate> = Vec::new();
    for g in &d.gates {
        let dur = gate_duration(arch, g.kind);
        let mut t = g.operands.iter().filter_map(|q| ready.get(q)).copied().fold(f64::NEG_INFINITY, f64::max);
        if let GateKind::CondZ(bit) | GateKind::CondX(bit) = g.kind {
            t = t.max(*bits.get(&bit).ok_or_else(|| format!("{g} reads an unwritten bit"))?);
        }
        let start = match g.kind {
            GateKind::Cz | GateKind::Swap => {
                let (ta, tb) = (track_of(&courses, &index, &g.operands[0]), track_of(&courses, &index, &g.operands[1]));
                let windows = proximity_intervals(&ta, &tb, r, t, f64::INFINITY);
                let mut chosen = None;
                'windows: for (w0, w1) in windows {
                    let mut s = t.max(w0);
                    while s + dur <= w1 + eps {
                        let clash = fired.iter().find(|f| {
                            f.gate.kind.is_two_qubit()
                                && f.start < s + dur - eps
                                && s < f.end() - eps
                                && f.gate.operands.iter().any(|p| {
                                    g.operands.iter().any(|q| {
                                        p == q
                                            || min_distance(&track_of(&courses, &index, p), &track_of(&courses, &index, q), s.max(f.start), (s + dur).min(f.end()))
                                                .is_some_and(|(dist, _)| dist < EXCLUSION_RADIUS - 1e-9)
                                    })
                                })
                        });
                        match clash {
                            Some(f) => s = f.end(),
                            None => {
                                chosen = Some(s);
                                break 'windows;
                            }
                        }
                    }
                }
                chosen.ok_or_else(|| format!("blockade window: {g} cannot complete within R after t = {t:e} s"))?
            }
            GateKind::MeasureX(bit) => {
                let s = g.operands[0].messenger_serial().ok_or("measurement of a computational qubit")?;
                let c = &courses[index[&s]];
                if !c.readout {
                    return Err(format!("m{s} has no readout zone"));
                }
                let start = t.max(c.t);
                bits.insert(bit, start + dur);
                start
            }
            _ if t.is_finite() => t,
            _ => 0.0,
        };
        let position = g
            .operands
            .iter()
            .find_map(|q| q.messenger_serial().and_then(|_| track_of(&courses, &index, q).position(start)))
            .unwrap_or_else(|| g.operands[0].coord().map(|c| c.position()).unwrap_or_default());
        for q in &g.operands {
            ready.insert(*q, start + dur);
        }
        fired.push(FiredGate { gate: g.clone(), start, duration: dur, position });
    }

    // Readout dwell and disposal.
    for c in &mut courses {
        let last = ready[&QubitRef::Messenger(c.serial)];
        if c.readout {
            let end = last.max(c.t);
            c.push(SegmentKind::Stationary(Zone::Readout), c.pos, end - c.t);
        } else if last > c.t + eps {
            return Err(format!("m{} leaves the array before its last gate ends", c.serial));
        }
        c.events.push(PhysicalEvent { time: c.t, position: c.pos, action: Action::Dispose { messenger: c.serial } });
    }

    // Messengers that never interact must not meet.
    let mut partners = Vec::new();
    for g in &d.gates {
        if let [QubitRef::Messenger(x), QubitRef::Messenger(y)] = g.operands[..] {
            partners.push((x.min(y), x.max(y)));
        }
    }
    for (i, ci) in courses.iter().enumerate() {
        for cj in &courses[i + 1..] {
            let key = (ci.serial.min(cj.serial), ci.serial.max(cj.serial));
            if partners.contains(&key) {
                continue;
            }
            if let Some((dist, when)) = min_distance(&ci.track(), &cj.track(), f64::NEG_INFINITY, f64::INFINITY) {
                if dist < COLLISION_RADIUS - 1e-9 {
                    return Err(format!("m{} and m{} collide at t = {when:e} s", key.0, key.1));
                }
            }
        }
    }

    let mut plan = Plan { gates: fired, transport: Vec::new(), trajectories: Vec::new(), quantum };
    for c in courses {
        plan.transport.extend(c.events);
        plan.trajectories.extend(c.segs);
    }
    plan.trajectories.sort_by(|a, b| a.messenger.cmp(&b.messenger).then(a.t_start.total_cmp(&b.t_start)));
    let t0 = plan.start();
    Ok(plan.shifted(-t0))
}

/// Plans one decomposition in isolation, starting at time zero.
pub(crate) fn plan_decomposition(arch: &ArchitectureSpec, d: &Decomposition) -> Result<Plan, ScheduleError> {
    if arch.speed > arch.max_speed() * (1.0 + 1e-12) {
        return Err(infeasible(format!(
            "velocity bound: v = {} m/s exceeds a/t2 = {} m/s, so a passing messenger cannot stay within R for t2",
            arch.speed,
            arch.max_speed()
        )));
    }
    arch.validate()?;
    let protocol = d.protocol.ok_or_else(|| infeasible("the neighbor chain has no messenger transport to plan"))?;
    let speed = arch.speed_cells();
    let (lo, hi) = transport_box(arch.lattice_size);
    let frame = Frame { lo, hi, speed };
    let quantum = match protocol {
        Protocol::ThrowCatchThrow | Protocol::ThrowAndMeasure => None,
        _ => Some(1.0 / speed),
    };
    let mut first_error = None;
    for cand in candidates(arch, d, protocol, &frame) {
        match fire(arch, d, cand, quantum) {
            Ok(plan) => return Ok(plan),
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    Err(infeasible(first_error.unwrap_or_else(|| "no lane geometry fits inside the transport box".into())))
}

/// Plans a single logical CZ.
pub fn plan_trajectories(arch: &ArchitectureSpec, d: &Decomposition) -> Result<ScheduledProgram, ScheduleError> {
    Ok(plan_decomposition(arch, d)?.into_program())
}

/// Plan for a logical single-qubit gate: one physical gate at time zero.
pub(crate) fn single_qubit_plan(arch: &ArchitectureSpec, gate: Gate, at: Coord) -> Plan {
    Plan {
        gates: vec![FiredGate { duration: gate_duration(arch, gate.kind), gate, start: 0.0, position: at.position() }],
        ..Plan::default()
    }
}
