//! Architecture variants and their gate-level protocols for a long-range CZ.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::config::{parse_key_values, parse_value, ConfigError};
use crate::ir::{Belt, BitId, Coord, Gate, GateKind, QubitRef};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Variant {
    TwoWayBelt,
    OneWayBelt,
    ThrowCatchThrow,
    ShuttleAndRoute,
    ThrowAndMeasure,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::TwoWayBelt,
        Variant::OneWayBelt,
        Variant::ThrowCatchThrow,
        Variant::ShuttleAndRoute,
        Variant::ThrowAndMeasure,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::TwoWayBelt => "two-way-belt",
            Variant::OneWayBelt => "one-way-belt",
            Variant::ThrowCatchThrow => "throw-catch-throw",
            Variant::ShuttleAndRoute => "shuttle-and-route",
            Variant::ThrowAndMeasure => "throw-and-measure",
        }
    }

    /// Variants whose protocol contains a mid-circuit measurement.
    pub fn measures(&self) -> bool {
        matches!(self, Variant::OneWayBelt | Variant::ThrowAndMeasure)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match key.as_str() {
            "twoway" | "twowaybelt" => Ok(Variant::TwoWayBelt),
            "oneway" | "onewaybelt" => Ok(Variant::OneWayBelt),
            "throwcatchthrow" | "tct" => Ok(Variant::ThrowCatchThrow),
            "shuttleandroute" | "sr" => Ok(Variant::ShuttleAndRoute),
            "throwandmeasure" | "tm" => Ok(Variant::ThrowAndMeasure),
            _ => Err(format!("unknown variant `{s}`")),
        }
    }
}

/// Relative placement of the two targets under one-way belts flowing +x and +y.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum OneWayCase {
    /// One target is reachable from the other by a right-then-up path.
    Aligned,
    Crossed,
}

pub fn one_way_case(a: Coord, b: Coord) -> OneWayCase {
    let dominates = |p: Coord, q: Coord| p.col >= q.col && p.row >= q.row;
    if dominates(a, b) || dominates(b, a) {
        OneWayCase::Aligned
    } else {
        OneWayCase::Crossed
    }
}

/// One row of the protocol table: a variant, with the one-way variant split by case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Protocol {
    TwoWayBelt,
    OneWayAligned,
    OneWayCrossed,
    ThrowCatchThrow,
    ShuttleAndRoute,
    ThrowAndMeasure,
}

impl Protocol {
    pub const ALL: [Protocol; 6] = [
        Protocol::TwoWayBelt,
        Protocol::OneWayAligned,
        Protocol::OneWayCrossed,
        Protocol::ThrowCatchThrow,
        Protocol::ShuttleAndRoute,
        Protocol::ThrowAndMeasure,
    ];

    pub fn new(variant: Variant, case: OneWayCase) -> Self {
        match (variant, case) {
            (Variant::TwoWayBelt, _) => Protocol::TwoWayBelt,
            (Variant::OneWayBelt, OneWayCase::Aligned) => Protocol::OneWayAligned,
            (Variant::OneWayBelt, OneWayCase::Crossed) => Protocol::OneWayCrossed,
            (Variant::ThrowCatchThrow, _) => Protocol::ThrowCatchThrow,
            (Variant::ShuttleAndRoute, _) => Protocol::ShuttleAndRoute,
            (Variant::ThrowAndMeasure, _) => Protocol::ThrowAndMeasure,
        }
    }

    pub fn for_pair(variant: Variant, a: Coord, b: Coord) -> Self {
        Self::new(variant, one_way_case(a, b))
    }

    pub fn variant(&self) -> Variant {
        match self {
            Protocol::TwoWayBelt => Variant::TwoWayBelt,
            Protocol::OneWayAligned | Protocol::OneWayCrossed => Variant::OneWayBelt,
            Protocol::ThrowCatchThrow => Variant::ThrowCatchThrow,
            Protocol::ShuttleAndRoute => Variant::ShuttleAndRoute,
            Protocol::ThrowAndMeasure => Variant::ThrowAndMeasure,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Protocol::OneWayAligned => "one-way-belt(1)",
            Protocol::OneWayCrossed => "one-way-belt(2)",
            other => other.variant().name(),
        }
    }

    pub fn counts(&self) -> GateCounts {
        let c = |n1, n2_cz, n2_swap, nr| GateCounts { n1, n2_cz, n2_swap, nr };
        match self {
            Protocol::TwoWayBelt => c(2, 3, 3, 0),
            Protocol::OneWayAligned => c(2, 2, 1, 1),
            Protocol::OneWayCrossed => c(4, 3, 0, 2),
            Protocol::ThrowCatchThrow | Protocol::ShuttleAndRoute => c(2, 3, 0, 0),
            Protocol::ThrowAndMeasure => c(2, 2, 0, 1),
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Physical operation counts of one logical gate. Messenger initialization is not counted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct GateCounts {
    pub n1: u32,
    pub n2_cz: u32,
    pub n2_swap: u32,
    pub nr: u32,
}

impl GateCounts {
    pub fn n2(&self) -> u32 {
        self.n2_cz + self.n2_swap
    }

    /// `(n1, n2, nr)`.
    pub fn triple(&self) -> (u32, u32, u32) {
        (self.n1, self.n2(), self.nr)
    }

    pub fn from_gates(gates: &[Gate]) -> Self {
        let mut c = GateCounts::default();
        for g in gates {
            match g.kind {
                GateKind::Cz => c.n2_cz += 1,
                GateKind::Swap => c.n2_swap += 1,
                GateKind::MeasureX(_) => c.nr += 1,
                _ => c.n1 += 1,
            }
        }
        c
    }
}

/// `(n1, n2, nr)` for a variant; `case` only matters for the one-way belt.
pub fn gate_counts(variant: Variant, case: OneWayCase) -> (u32, u32, u32) {
    Protocol::new(variant, case).counts().triple()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArchError {
    #[error("operands are identical: {0}")]
    IdenticalOperands(Coord),
    #[error("coordinate {coord} out of range for lattice size {lattice_size}")]
    OutOfRange { coord: Coord, lattice_size: u32 },
    #[error("invalid architecture: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Geometry and timing of one architecture. Lengths in meters, times in seconds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArchitectureSpec {
    pub variant: Variant,
    pub lattice_size: u32,
    pub spacing: f64,
    pub blockade_radius: f64,
    pub speed: f64,
    pub t2: f64,
    pub t1: f64,
    pub tr: f64,
    pub t_route: f64,
    pub t_turnaround: f64,
}

pub const DEFAULT_SPACING: f64 = 4e-6;
pub const DEFAULT_T2: f64 = 1e-6;

impl ArchitectureSpec {
    /// Defaults: a = 4 μm, R = 0.9a, v = a/(2·t2), t2 = 1 μs, t1 = 0.2 μs,
    /// tr = t_route = t_turnaround = 2 μs.
    pub fn new(variant: Variant, lattice_size: u32) -> Self {
        Self {
            variant,
            lattice_size,
            spacing: DEFAULT_SPACING,
            blockade_radius: 0.9 * DEFAULT_SPACING,
            speed: 0.5 * DEFAULT_SPACING / DEFAULT_T2,
            t2: DEFAULT_T2,
            t1: 2e-7,
            tr: 2e-6,
            t_route: 2e-6,
            t_turnaround: 2e-6,
        }
    }

    pub fn with_variant(&self, variant: Variant) -> Self {
        Self { variant, ..self.clone() }
    }

    /// Speed in lattice spacings per second.
    pub fn speed_cells(&self) -> f64 {
        self.speed / self.spacing
    }

    pub fn radius_cells(&self) -> f64 {
        self.blockade_radius / self.spacing
    }

    /// Largest speed at which a passing messenger stays in contact for `t2`.
    pub fn max_speed(&self) -> f64 {
        self.spacing / self.t2
    }

    pub fn validate(&self) -> Result<(), ArchError> {
        let positive = [
            ("a_m", self.spacing),
            ("R_m", self.blockade_radius),
            ("v_mps", self.speed),
            ("t2_s", self.t2),
            ("t1_s", self.t1),
            ("tr_s", self.tr),
            ("t_route_s", self.t_route),
            ("t_turnaround_s", self.t_turnaround),
        ];
        for (k, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ArchError::InvalidSpec(format!("{k} must be positive, got {v}")));
            }
        }
        if self.lattice_size < 2 {
            return Err(ArchError::InvalidSpec(format!("L must be at least 2, got {}", self.lattice_size)));
        }
        if self.blockade_radius > self.spacing {
            return Err(ArchError::InvalidSpec("R_m exceeds a_m".into()));
        }
        if self.speed > self.max_speed() * (1.0 + 1e-12) {
            return Err(ArchError::InvalidSpec(format!("v_mps {} exceeds a/t2 = {}", self.speed, self.max_speed())));
        }
        Ok(())
    }

    /// Reads a `key=value` file. Missing keys keep their defaults; `variant` and `L` are required.
    pub fn from_config(text: &str) -> Result<Self, ArchError> {
        let kv = parse_key_values(text)?;
        let variant = kv
            .get("variant")
            .ok_or_else(|| ArchError::InvalidSpec("missing `variant`".into()))?
            .parse::<Variant>()
            .map_err(ArchError::InvalidSpec)?;
        let l: u32 = parse_value("L", kv.get("L").ok_or_else(|| ArchError::InvalidSpec("missing `L`".into()))?)?;
        let mut spec = Self::new(variant, l);
        let mut speed_set = false;
        for (k, v) in &kv {
            let slot = match k.as_str() {
                "variant" | "L" => continue,
                "a_m" => &mut spec.spacing,
                "R_m" => &mut spec.blockade_radius,
                "v_mps" => {
                    speed_set = true;
                    &mut spec.speed
                }
                "t2_s" => &mut spec.t2,
                "t1_s" => &mut spec.t1,
                "tr_s" => &mut spec.tr,
                "t_route_s" => &mut spec.t_route,
                "t_turnaround_s" => &mut spec.t_turnaround,
                other => return Err(ConfigError::UnknownKey(other.to_string()).into()),
            };
            *slot = parse_value(k, v)?;
        }
        if !kv.contains_key("R_m") {
            spec.blockade_radius = 0.9 * spec.spacing;
        }
        if !speed_set {
            spec.speed = 0.5 * spec.spacing / spec.t2;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_config(&self) -> String {
        format!(
            "variant={}\nL={}\na_m={:e}\nR_m={:e}\nv_mps={:e}\nt2_s={:e}\nt1_s={:e}\ntr_s={:e}\nt_route_s={:e}\nt_turnaround_s={:e}\n",
            self.variant,
            self.lattice_size,
            self.spacing,
            self.blockade_radius,
            self.speed,
            self.t2,
            self.t1,
            self.tr,
            self.t_route,
            self.t_turnaround
        )
    }

    pub fn check_pair(&self, a: Coord, b: Coord) -> Result<(), ArchError> {
        check_pair(a, b, Some(self.lattice_size))
    }
}

fn check_pair(a: Coord, b: Coord, lattice_size: Option<u32>) -> Result<(), ArchError> {
    if a == b {
        return Err(ArchError::IdenticalOperands(a));
    }
    if let Some(l) = lattice_size {
        for c in [a, b] {
            if !c.in_lattice(l) {
                return Err(ArchError::OutOfRange { coord: c, lattice_size: l });
            }
        }
    }
    Ok(())
}

/// Abstract transport step of one messenger.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LegKind {
    Belt(Belt),
    Throw,
    Catch,
    Turnaround,
    Route { from: Belt, to: Belt },
    Readout,
    Dispose,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TransportLeg {
    pub messenger: u32,
    pub kind: LegKind,
}

/// A compiled logical CZ.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub name: String,
    /// `None` for the nearest-neighbor SWAP chain.
    pub protocol: Option<Protocol>,
    /// The requested pair.
    pub a: Coord,
    pub b: Coord,
    /// Qubits in the circuit's first and second target slots; a reordering of (a, b).
    pub slot_a: Coord,
    pub slot_b: Coord,
    pub gates: Vec<Gate>,
    pub counts: GateCounts,
    /// Serials in order of first use.
    pub messengers: Vec<u32>,
    pub transport_plan: Vec<TransportLeg>,
}

impl Decomposition {
    pub fn messengers_used(&self) -> usize {
        self.messengers.len()
    }

    pub fn routing_legs(&self) -> usize {
        self.transport_plan.iter().filter(|l| matches!(l.kind, LegKind::Route { .. })).count()
    }

    /// Index of the last conditional correction, if any.
    pub fn final_correction(&self) -> Option<usize> {
        self.gates.iter().rposition(|g| matches!(g.kind, GateKind::CondZ(_) | GateKind::CondX(_)))
    }

    /// Copy with gate `index` removed; counts are recomputed.
    pub fn without_gate(&self, index: usize) -> Self {
        let mut d = self.clone();
        if index < d.gates.len() {
            d.gates.remove(index);
        }
        d.counts = GateCounts::from_gates(&d.gates);
        d
    }
}

fn sign(d: i64) -> i32 {
    if d < 0 { -1 } else { 1 }
}

/// Protocol for the pair and the order in which its targets fill the circuit's two slots.
///
/// For the one-way belt the first slot is the target whose messenger rides the
/// +x belt: the lower-left one when aligned, the upper-left one when crossed.
pub fn protocol_slots(variant: Variant, a: Coord, b: Coord) -> (Protocol, Coord, Coord) {
    let protocol = Protocol::for_pair(variant, a, b);
    let (first, second) = match protocol {
        Protocol::OneWayAligned if !(b.row >= a.row && b.col >= a.col) => (b, a),
        Protocol::OneWayCrossed if a.col > b.col => (b, a),
        _ => (a, b),
    };
    (protocol, first, second)
}

/// Hands out fresh messenger serials and classical bits across many logical gates.
#[derive(Clone, Debug, Default)]
pub struct Compiler {
    next_messenger: u32,
    next_bit: u32,
}

impl Compiler {
    pub fn new() -> Self {
        Self::default()
    }

    fn messenger(&mut self) -> QubitRef {
        self.next_messenger += 1;
        QubitRef::Messenger(self.next_messenger)
    }

    fn bit(&mut self) -> BitId {
        let b = BitId(self.next_bit);
        self.next_bit += 1;
        b
    }

    pub fn decompose(&mut self, arch: &ArchitectureSpec, a: Coord, b: Coord) -> Result<Decomposition, ArchError> {
        arch.check_pair(a, b)?;
        let (protocol, slot_a, slot_b) = protocol_slots(arch.variant, a, b);
        let slots = (slot_a, slot_b);
        let sx = sign(b.col as i64 - a.col as i64);
        let sy = sign(b.row as i64 - a.row as i64);
        let (qa, qb) = (QubitRef::from(a), QubitRef::from(b));
        let leg = |m: QubitRef, kind| TransportLeg { messenger: m.messenger_serial().expect("messenger"), kind };
        let (gates, plan) = match protocol {
            Protocol::TwoWayBelt => {
                let [m1, m2, m3, m4] = [self.messenger(), self.messenger(), self.messenger(), self.messenger()];
                let gates = vec![
                    Gate::cz(qa, m1),
                    Gate::single(GateKind::H, m1),
                    Gate::swap(m1, m2),
                    Gate::cz(m2, qb),
                    Gate::swap(m2, m3),
                    Gate::swap(m3, m4),
                    Gate::single(GateKind::H, m4),
                    Gate::cz(qa, m4),
                ];
                let plan = vec![
                    leg(m1, LegKind::Belt(Belt::along_x(sx))),
                    leg(m1, LegKind::Dispose),
                    leg(m2, LegKind::Belt(Belt::along_y(sy))),
                    leg(m2, LegKind::Dispose),
                    leg(m3, LegKind::Belt(Belt::along_x(-sx))),
                    leg(m3, LegKind::Dispose),
                    leg(m4, LegKind::Belt(Belt::along_y(-sy))),
                    leg(m4, LegKind::Dispose),
                ];
                (gates, plan)
            }
            Protocol::OneWayAligned => {
                let (qs, qt) = (QubitRef::from(slots.0), QubitRef::from(slots.1));
                let [m1, m2] = [self.messenger(), self.messenger()];
                let s = self.bit();
                let gates = vec![
                    Gate::cz(qs, m1),
                    Gate::single(GateKind::H, m1),
                    Gate::swap(m1, m2),
                    Gate::cz(m2, qt),
                    Gate::single(GateKind::MeasureX(s), m2),
                    Gate::single(GateKind::CondZ(s), qs),
                ];
                let plan = vec![
                    leg(m1, LegKind::Belt(Belt::PlusX)),
                    leg(m1, LegKind::Dispose),
                    leg(m2, LegKind::Belt(Belt::PlusY)),
                    leg(m2, LegKind::Readout),
                    leg(m2, LegKind::Dispose),
                ];
                (gates, plan)
            }
            Protocol::OneWayCrossed => {
                let (ql, qr) = (QubitRef::from(slots.0), QubitRef::from(slots.1));
                let [m1, m2] = [self.messenger(), self.messenger()];
                let [s1, s2] = [self.bit(), self.bit()];
                let gates = vec![
                    Gate::cz(ql, m1),
                    Gate::single(GateKind::H, m1),
                    Gate::cz(qr, m2),
                    Gate::single(GateKind::H, m2),
                    Gate::cz(m1, m2),
                    Gate::single(GateKind::MeasureX(s1), m1),
                    Gate::single(GateKind::MeasureX(s2), m2),
                    Gate::single(GateKind::CondZ(s1), ql),
                    Gate::single(GateKind::CondZ(s2), qr),
                ];
                let plan = vec![
                    leg(m1, LegKind::Belt(Belt::PlusX)),
                    leg(m1, LegKind::Readout),
                    leg(m1, LegKind::Dispose),
                    leg(m2, LegKind::Belt(Belt::PlusY)),
                    leg(m2, LegKind::Readout),
                    leg(m2, LegKind::Dispose),
                ];
                (gates, plan)
            }
            Protocol::ThrowCatchThrow | Protocol::ShuttleAndRoute => {
                let m = self.messenger();
                let gates = vec![
                    Gate::cz(qa, m),
                    Gate::single(GateKind::H, m),
                    Gate::cz(m, qb),
                    Gate::single(GateKind::H, m),
                    Gate::cz(qa, m),
                ];
                let plan = if protocol == Protocol::ThrowCatchThrow {
                    vec![
                        leg(m, LegKind::Throw),
                        leg(m, LegKind::Catch),
                        leg(m, LegKind::Turnaround),
                        leg(m, LegKind::Throw),
                        leg(m, LegKind::Dispose),
                    ]
                } else {
                    let (x, y) = (Belt::along_x(sx), Belt::along_y(sy));
                    let (nx, ny) = (Belt::along_x(-sx), Belt::along_y(-sy));
                    let mut p = Vec::new();
                    for (ride, next) in [(x, y), (y, nx), (nx, ny), (ny, x), (x, ny)] {
                        p.push(leg(m, LegKind::Belt(ride)));
                        p.push(leg(m, LegKind::Route { from: ride, to: next }));
                    }
                    p.push(leg(m, LegKind::Belt(ny)));
                    p.push(leg(m, LegKind::Dispose));
                    p
                };
                (gates, plan)
            }
            Protocol::ThrowAndMeasure => {
                let m = self.messenger();
                let s = self.bit();
                let gates = vec![
                    Gate::cz(qa, m),
                    Gate::single(GateKind::H, m),
                    Gate::cz(m, qb),
                    Gate::single(GateKind::MeasureX(s), m),
                    Gate::single(GateKind::CondZ(s), qa),
                ];
                let plan = vec![leg(m, LegKind::Throw), leg(m, LegKind::Readout), leg(m, LegKind::Dispose)];
                (gates, plan)
            }
        };
        let mut messengers: Vec<u32> = Vec::new();
        for s in gates.iter().flat_map(|g| g.messengers()) {
            if !messengers.contains(&s) {
                messengers.push(s);
            }
        }
        Ok(Decomposition {
            name: protocol.name().to_string(),
            protocol: Some(protocol),
            a,
            b,
            slot_a: slots.0,
            slot_b: slots.1,
            counts: GateCounts::from_gates(&gates),
            gates,
            messengers,
            transport_plan: plan,
        })
    }
}

/// Compiles one logical CZ with fresh messengers starting at serial 1.
pub fn decompose_cz(arch: &ArchitectureSpec, a: Coord, b: Coord) -> Result<Decomposition, ArchError> {
    Compiler::new().decompose(arch, a, b)
}

/// Cells visited from `a` to `b`: along a's row first, then along b's column.
pub fn manhattan_path(a: Coord, b: Coord) -> Vec<Coord> {
    let mut path = vec![a];
    let mut cur = a;
    while cur.col != b.col {
        cur.col = if b.col > cur.col { cur.col + 1 } else { cur.col - 1 };
        path.push(cur);
    }
    while cur.row != b.row {
        cur.row = if b.row > cur.row { cur.row + 1 } else { cur.row - 1 };
        path.push(cur);
    }
    path
}

/// SWAP-chain baseline: walk A's state to B's neighbor, CZ, walk it back.
pub fn neighbor_chain_decompose(a: Coord, b: Coord) -> Result<Decomposition, ArchError> {
    check_pair(a, b, None)?;
    let path = manhattan_path(a, b);
    let d = path.len() - 1;
    let mut gates = Vec::with_capacity(2 * d - 1);
    for w in path[..d].windows(2) {
        gates.push(Gate::swap(w[0], w[1]));
    }
    gates.push(Gate::cz(path[d - 1], b));
    for w in path[..d].windows(2).rev() {
        gates.push(Gate::swap(w[1], w[0]));
    }
    Ok(Decomposition {
        name: "neighbor-chain".to_string(),
        protocol: None,
        a,
        b,
        slot_a: a,
        slot_b: b,
        counts: GateCounts::from_gates(&gates),
        gates,
        messengers: Vec::new(),
        transport_plan: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const C00: Coord = Coord::new(0, 0);
    const C33: Coord = Coord::new(3, 3);

    #[test]
    fn table_rows() {
        let rows: Vec<_> = Protocol::ALL.iter().map(|p| p.counts().triple()).collect();
        assert_eq!(rows, vec![(2, 6, 0), (2, 3, 1), (4, 3, 2), (2, 3, 0), (2, 3, 0), (2, 2, 1)]);
        assert_eq!(gate_counts(Variant::OneWayBelt, OneWayCase::Crossed), (4, 3, 2));
        assert_eq!(gate_counts(Variant::ShuttleAndRoute, OneWayCase::Crossed), (2, 3, 0));
    }

    #[test]
    fn two_way_uses_four_messengers() {
        let d = decompose_cz(&ArchitectureSpec::new(Variant::TwoWayBelt, 4), C00, C33).unwrap();
        assert_eq!(d.counts.triple(), (2, 6, 0));
        assert_eq!(d.messengers, vec![1, 2, 3, 4]);
    }

    #[test]
    fn one_way_cases() {
        assert_eq!(one_way_case(C00, C33), OneWayCase::Aligned);
        assert_eq!(one_way_case(Coord::new(0, 3), Coord::new(3, 0)), OneWayCase::Crossed);
        assert_eq!(one_way_case(Coord::new(2, 0), Coord::new(2, 3)), OneWayCase::Aligned);
        let arch = ArchitectureSpec::new(Variant::OneWayBelt, 4);
        let d = decompose_cz(&arch, Coord::new(0, 3), Coord::new(3, 0)).unwrap();
        assert_eq!(d.protocol, Some(Protocol::OneWayCrossed));
        assert_eq!(d.counts.triple(), (4, 3, 2));
        assert_eq!((d.slot_a, d.slot_b), (Coord::new(3, 0), Coord::new(0, 3)));
        let d = decompose_cz(&arch, C33, C00).unwrap();
        assert_eq!((d.slot_a, d.slot_b), (C00, C33));
    }

    #[test]
    fn shuttle_and_route_has_five_routings() {
        let arch = ArchitectureSpec::new(Variant::ShuttleAndRoute, 4);
        assert_eq!(decompose_cz(&arch, C00, C33).unwrap().routing_legs(), 5);
    }

    #[test]
    fn rejects_bad_pairs() {
        let arch = ArchitectureSpec::new(Variant::ThrowAndMeasure, 4);
        assert_eq!(decompose_cz(&arch, C00, C00), Err(ArchError::IdenticalOperands(C00)));
        assert!(matches!(decompose_cz(&arch, C00, Coord::new(4, 0)), Err(ArchError::OutOfRange { .. })));
    }

    #[test]
    fn neighbor_chain_lengths() {
        for (b, n2) in [(Coord::new(0, 1), 1), (C33, 11), (Coord::new(0, 2), 3)] {
            let d = neighbor_chain_decompose(C00, b).unwrap();
            assert_eq!(d.counts.triple(), (0, n2, 0));
            assert_eq!(d.counts.n2_cz, 1);
        }
    }

    #[test]
    fn compiler_never_reuses_messengers_or_bits() {
        let arch = ArchitectureSpec::new(Variant::ThrowAndMeasure, 4);
        let mut c = Compiler::new();
        let d1 = c.decompose(&arch, C00, C33).unwrap();
        let d2 = c.decompose(&arch, C00, C33).unwrap();
        assert_ne!(d1.messengers, d2.messengers);
        assert_ne!(d1.gates[3], d2.gates[3]);
    }

    #[test]
    fn config_round_trip_and_defaults() {
        let spec = ArchitectureSpec::from_config("variant=throw-and-measure\nL=8\n").unwrap();
        assert_eq!(spec, ArchitectureSpec::new(Variant::ThrowAndMeasure, 8));
        let custom = ArchitectureSpec { speed: 1.5, tr: 5e-6, ..spec };
        assert_eq!(ArchitectureSpec::from_config(&custom.to_config()).unwrap(), custom);
        assert!(ArchitectureSpec::from_config("variant=tm\nL=8\nv_mps=100\n").is_err());
        assert!(ArchitectureSpec::from_config("variant=tm\nL=8\nbogus=1\n").is_err());
        assert!(ArchitectureSpec::from_config("L=8\n").is_err());
    }

    #[test]
    fn variant_names_parse() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert_eq!("TwoWayBelt".parse::<Variant>().unwrap(), Variant::TwoWayBelt);
    }
}
