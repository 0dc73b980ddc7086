//! Logical and physical instruction sets.
//!
//! A [`LogicalCircuit`] is what users write: long-range CZ gates and
//! single-qubit gates on grid coordinates. A [`PhysicalProgram`] is what the
//! compiler emits: timestamped gates, transport and disposal events over
//! computational qubits and disposable messenger qubits.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Grid coordinate of a computational qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Coord {
    pub row: u32,
    pub col: u32,
}

impl Coord {
    pub const fn new(row: u32, col: u32) -> Self {
        Self { row, col }
    }

    pub fn in_lattice(&self, lattice_size: u32) -> bool {
        self.row < lattice_size && self.col < lattice_size
    }

    pub fn manhattan(&self, other: &Coord) -> u32 {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col)
    }

    /// Position in the plane, in units of the lattice spacing (x = column, y = row).
    pub fn position(&self) -> Point {
        Point::new(self.col as f64, self.row as f64)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

impl FromStr for Coord {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| format!("expected `(row,col)`, found `{s}`"))?;
        let (r, c) = inner
            .split_once(',')
            .ok_or_else(|| format!("expected `(row,col)`, found `{s}`"))?;
        let row = r.trim().parse().map_err(|_| format!("bad row index `{}`", r.trim()))?;
        let col = c.trim().parse().map_err(|_| format!("bad column index `{}`", c.trim()))?;
        Ok(Coord { row, col })
    }
}

/// A point in the plane in units of the lattice spacing.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn add(&self, other: &Point) -> Point {
        Point::new(self.x + other.x, self.y + other.y)
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    pub fn scale(&self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Identity of an atom: a static computational qubit or a disposable messenger.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QubitRef {
    Computational(Coord),
    Messenger(u32),
}

impl QubitRef {
    pub fn messenger_serial(&self) -> Option<u32> {
        match self {
            QubitRef::Messenger(s) => Some(*s),
            QubitRef::Computational(_) => None,
        }
    }

    pub fn coord(&self) -> Option<Coord> {
        match self {
            QubitRef::Computational(c) => Some(*c),
            QubitRef::Messenger(_) => None,
        }
    }
}

impl From<Coord> for QubitRef {
    fn from(c: Coord) -> Self {
        QubitRef::Computational(c)
    }
}

impl fmt::Display for QubitRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QubitRef::Computational(c) => write!(f, "{c}"),
            QubitRef::Messenger(s) => write!(f, "m{s}"),
        }
    }
}

impl FromStr for QubitRef {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(serial) = s.strip_prefix('m') {
            serial
                .parse()
                .map(QubitRef::Messenger)
                .map_err(|_| format!("bad messenger serial `{s}`"))
        } else {
            s.parse().map(QubitRef::Computational)
        }
    }
}

/// Program-scoped classical bit written by an X-basis measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BitId(pub u32);

impl fmt::Display for BitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GateKind {
    Cz,
    Swap,
    H,
    Z,
    X,
    /// Measurement in the |+>/|-> basis; outcome 0 is `+`, 1 is `-`.
    MeasureX(BitId),
    CondZ(BitId),
    CondX(BitId),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cz | GateKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.arity() == 2
    }

    pub fn is_single_qubit_gate(&self) -> bool {
        matches!(
            self,
            GateKind::H | GateKind::Z | GateKind::X | GateKind::CondZ(_) | GateKind::CondX(_)
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
            GateKind::H => "h",
            GateKind::Z => "z",
            GateKind::X => "x",
            GateKind::MeasureX(_) => "measure_x",
            GateKind::CondZ(_) => "cond_z",
            GateKind::CondX(_) => "cond_x",
        }
    }

    pub fn bit(&self) -> Option<BitId> {
        match self {
            GateKind::MeasureX(b) | GateKind::CondZ(b) | GateKind::CondX(b) => Some(*b),
            _ => None,
        }
    }

    fn from_name(name: &str, bit: Option<BitId>) -> Option<Self> {
        Some(match (name, bit) {
            ("cz", None) => GateKind::Cz,
            ("swap", None) => GateKind::Swap,
            ("h", None) => GateKind::H,
            ("z", None) => GateKind::Z,
            ("x", None) => GateKind::X,
            ("measure_x", Some(b)) => GateKind::MeasureX(b),
            ("cond_z", Some(b)) => GateKind::CondZ(b),
            ("cond_x", Some(b)) => GateKind::CondX(b),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IrError {
    #[error("{gate} takes {expected} operand(s), got {got}")]
    Arity { gate: &'static str, expected: usize, got: usize },
    #[error("{gate} operands must be distinct, got {operand} twice")]
    DuplicateOperand { gate: &'static str, operand: QubitRef },
    #[error("malformed event record: {0}")]
    Record(String),
}

/// A physical gate with its operands.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub operands: Vec<QubitRef>,
}

impl Gate {
    pub fn new(kind: GateKind, operands: Vec<QubitRef>) -> Result<Self, IrError> {
        if operands.len() != kind.arity() {
            return Err(IrError::Arity { gate: kind.name(), expected: kind.arity(), got: operands.len() });
        }
        if operands.len() == 2 && operands[0] == operands[1] {
            return Err(IrError::DuplicateOperand { gate: kind.name(), operand: operands[0] });
        }
        Ok(Self { kind, operands })
    }

    pub fn cz(a: impl Into<QubitRef>, b: impl Into<QubitRef>) -> Self {
        Self::two(GateKind::Cz, a.into(), b.into())
    }

    pub fn swap(a: impl Into<QubitRef>, b: impl Into<QubitRef>) -> Self {
        Self::two(GateKind::Swap, a.into(), b.into())
    }

    pub fn single(kind: GateKind, q: impl Into<QubitRef>) -> Self {
        debug_assert_eq!(kind.arity(), 1);
        Self { kind, operands: vec![q.into()] }
    }

    fn two(kind: GateKind, a: QubitRef, b: QubitRef) -> Self {
        assert_ne!(a, b, "two-qubit gate on identical operands");
        Self { kind, operands: vec![a, b] }
    }

    pub fn messengers(&self) -> impl Iterator<Item = u32> + '_ {
        self.operands.iter().filter_map(QubitRef::messenger_serial)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        for q in &self.operands {
            write!(f, " {q}")?;
        }
        if let Some(b) = self.kind.bit() {
            write!(f, " [{b}]")?;
        }
        Ok(())
    }
}

/// Conveyor-belt direction of travel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Belt {
    PlusX,
    MinusX,
    PlusY,
    MinusY,
}

impl Belt {
    pub fn along_x(sign: i32) -> Self {
        if sign >= 0 { Belt::PlusX } else { Belt::MinusX }
    }

    pub fn along_y(sign: i32) -> Self {
        if sign >= 0 { Belt::PlusY } else { Belt::MinusY }
    }

    pub fn unit(&self) -> Point {
        match self {
            Belt::PlusX => Point::new(1.0, 0.0),
            Belt::MinusX => Point::new(-1.0, 0.0),
            Belt::PlusY => Point::new(0.0, 1.0),
            Belt::MinusY => Point::new(0.0, -1.0),
        }
    }

    pub fn is_horizontal(&self) -> bool {
        matches!(self, Belt::PlusX | Belt::MinusX)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Belt::PlusX => "+x",
            Belt::MinusX => "-x",
            Belt::PlusY => "+y",
            Belt::MinusY => "-y",
        }
    }
}

impl FromStr for Belt {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+x" => Ok(Belt::PlusX),
            "-x" => Ok(Belt::MinusX),
            "+y" => Ok(Belt::PlusY),
            "-y" => Ok(Belt::MinusY),
            _ => Err(format!("unknown belt `{s}`")),
        }
    }
}

impl fmt::Display for Belt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Action {
    Gate(Gate),
    /// Messenger placed on a belt site, or into throw tweezers when `belt` is `None`.
    Load { messenger: u32, belt: Option<Belt> },
    Route { messenger: u32, from: Belt, to: Belt },
    /// Launch into free flight; velocity in lattice spacings per second.
    Throw { messenger: u32, velocity: Point },
    Catch { messenger: u32 },
    Dispose { messenger: u32 },
}

impl Action {
    /// Rank used to order simultaneous events.
    pub fn class_rank(&self) -> u8 {
        match self {
            Action::Load { .. } => 0,
            Action::Route { .. } => 1,
            Action::Throw { .. } => 2,
            Action::Catch { .. } => 3,
            Action::Gate(_) => 4,
            Action::Dispose { .. } => 5,
        }
    }

    pub fn messenger(&self) -> Option<u32> {
        match self {
            Action::Gate(g) => g.messengers().min(),
            Action::Load { messenger, .. }
            | Action::Route { messenger, .. }
            | Action::Throw { messenger, .. }
            | Action::Catch { messenger }
            | Action::Dispose { messenger } => Some(*messenger),
        }
    }

    pub fn gate(&self) -> Option<&Gate> {
        match self {
            Action::Gate(g) => Some(g),
            _ => None,
        }
    }

    fn coords(&self) -> Vec<Coord> {
        match self {
            Action::Gate(g) => g.operands.iter().filter_map(QubitRef::coord).collect(),
            _ => Vec::new(),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Action::Gate(g) => g.kind.name(),
            Action::Load { .. } => "load",
            Action::Route { .. } => "route",
            Action::Throw { .. } => "throw",
            Action::Catch { .. } => "catch",
            Action::Dispose { .. } => "dispose",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalEvent {
    /// Start time in seconds.
    pub time: f64,
    /// Position in units of the lattice spacing.
    pub position: Point,
    pub action: Action,
}

/// Deterministic total order on events: time, action class, messenger serial,
/// operand coordinates, then a structural fallback so equal keys never depend on
/// insertion order.
pub fn compare_events(a: &PhysicalEvent, b: &PhysicalEvent) -> Ordering {
    a.time
        .total_cmp(&b.time)
        .then_with(|| a.action.class_rank().cmp(&b.action.class_rank()))
        .then_with(|| a.action.messenger().cmp(&b.action.messenger()))
        .then_with(|| a.action.coords().cmp(&b.action.coords()))
        .then_with(|| a.action.name().cmp(b.action.name()))
        .then_with(|| {
            let ga = a.action.gate().map(|g| (g.kind, g.operands.clone()));
            let gb = b.action.gate().map(|g| (g.kind, g.operands.clone()));
            ga.cmp(&gb)
        })
        .then_with(|| a.position.x.total_cmp(&b.position.x))
        .then_with(|| a.position.y.total_cmp(&b.position.y))
}

/// Timestamped physical events, kept in [`compare_events`] order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhysicalProgram {
    pub events: Vec<PhysicalEvent>,
}

impl PhysicalProgram {
    pub fn new(mut events: Vec<PhysicalEvent>) -> Self {
        events.sort_by(compare_events);
        Self { events }
    }

    pub fn sort(&mut self) {
        self.events.sort_by(compare_events);
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    /// Gate events in time order.
    pub fn gates(&self) -> impl Iterator<Item = (usize, &PhysicalEvent, &Gate)> {
        self.events
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.action.gate().map(|g| (i, e, g)))
    }

    pub fn gate_sequence(&self) -> Vec<Gate> {
        self.gates().map(|(_, _, g)| g.clone()).collect()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            let rec = EventRecord::from(e);
            out.push_str(&serde_json::to_string(&rec).expect("event records always serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, IrError> {
        let mut events = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let rec: EventRecord =
                serde_json::from_str(line).map_err(|e| IrError::Record(e.to_string()))?;
            events.push(rec.into_event()?);
        }
        Ok(Self { events })
    }
}

/// One line of the JSON-lines program format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub action: String,
    pub operands: Vec<String>,
    pub bit: Option<u32>,
}

impl From<&PhysicalEvent> for EventRecord {
    fn from(e: &PhysicalEvent) -> Self {
        let (operands, bit) = match &e.action {
            Action::Gate(g) => (g.operands.iter().map(|q| q.to_string()).collect(), g.kind.bit().map(|b| b.0)),
            Action::Load { messenger, belt } => {
                let site = belt.map_or_else(|| "throw-zone".to_string(), |b| b.to_string());
                (vec![format!("m{messenger}"), site], None)
            }
            Action::Route { messenger, from, to } => {
                (vec![format!("m{messenger}"), from.to_string(), to.to_string()], None)
            }
            Action::Throw { messenger, velocity } => (
                vec![format!("m{messenger}"), velocity.x.to_string(), velocity.y.to_string()],
                None,
            ),
            Action::Catch { messenger } | Action::Dispose { messenger } => (vec![format!("m{messenger}")], None),
        };
        EventRecord { t: e.time, x: e.position.x, y: e.position.y, action: e.action.name().to_string(), operands, bit }
    }
}

impl EventRecord {
    pub fn into_event(self) -> Result<PhysicalEvent, IrError> {
        let bad = |msg: String| IrError::Record(msg);
        let messenger = |s: Option<&String>| -> Result<u32, IrError> {
            match s.map(|s| s.parse::<QubitRef>()) {
                Some(Ok(QubitRef::Messenger(m))) => Ok(m),
                _ => Err(bad(format!("`{}` needs a messenger operand", self.action))),
            }
        };
        let belt = |s: Option<&String>| -> Result<Belt, IrError> {
            s.ok_or_else(|| bad("missing belt".into()))?.parse().map_err(bad)
        };
        let ops = &self.operands;
        let action = match self.action.as_str() {
            "load" => Action::Load {
                messenger: messenger(ops.first())?,
                belt: match ops.get(1).map(String::as_str) {
                    Some("throw-zone") => None,
                    _ => Some(belt(ops.get(1))?),
                },
            },
            "route" => Action::Route { messenger: messenger(ops.first())?, from: belt(ops.get(1))?, to: belt(ops.get(2))? },
            "throw" => {
                let num = |i: usize| -> Result<f64, IrError> {
                    ops.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| bad("bad throw velocity".into()))
                };
                Action::Throw { messenger: messenger(ops.first())?, velocity: Point::new(num(1)?, num(2)?) }
            }
            "catch" => Action::Catch { messenger: messenger(ops.first())? },
            "dispose" => Action::Dispose { messenger: messenger(ops.first())? },
            name => {
                let kind = GateKind::from_name(name, self.bit.map(BitId))
                    .ok_or_else(|| bad(format!("unknown action `{name}` (bit {:?})", self.bit)))?;
                let operands = ops
                    .iter()
                    .map(|s| s.parse::<QubitRef>().map_err(bad))
                    .collect::<Result<Vec<_>, _>>()?;
                Action::Gate(Gate::new(kind, operands)?)
            }
        };
        Ok(PhysicalEvent { time: self.t, position: Point::new(self.x, self.y), action })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SingleQubitGate {
    H,
    Z,
    X,
}

impl SingleQubitGate {
    pub fn kind(&self) -> GateKind {
        match self {
            SingleQubitGate::H => GateKind::H,
            SingleQubitGate::Z => GateKind::Z,
            SingleQubitGate::X => GateKind::X,
        }
    }

    fn keyword(&self) -> &'static str {
        match self {
            SingleQubitGate::H => "h",
            SingleQubitGate::Z => "z",
            SingleQubitGate::X => "x",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LogicalOp {
    Cz(Coord, Coord),
    Single(SingleQubitGate, Coord),
}

impl LogicalOp {
    pub fn coords(&self) -> Vec<Coord> {
        match self {
            LogicalOp::Cz(a, b) => vec![*a, *b],
            LogicalOp::Single(_, c) => vec![*c],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalCircuit {
    pub lattice_size: u32,
    pub ops: Vec<LogicalOp>,
}

impl LogicalCircuit {
    pub fn new(lattice_size: u32) -> Self {
        Self { lattice_size, ops: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing `lattice <L>` header")]
    MissingLattice,
    #[error("duplicate `lattice` header")]
    DuplicateLattice,
    #[error("{0}")]
    Syntax(String),
    #[error("coordinate {coord} out of range for lattice size {lattice_size}")]
    OutOfRange { coord: Coord, lattice_size: u32 },
    #[error("cz operands are identical: {0}")]
    IdenticalOperands(Coord),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

/// Parses the line-oriented program source.
///
/// ```text
/// # comment
/// lattice 4
/// cz (0,0) (3,3)
/// h (1,2)
/// ```
pub fn parse_program(text: &str) -> Result<LogicalCircuit, ParseError> {
    let mut lattice: Option<u32> = None;
    let mut ops = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |kind| ParseError { line: line_no, kind };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        if keyword == "lattice" {
            if lattice.is_some() {
                return Err(err(ParseErrorKind::DuplicateLattice));
            }
            let l: u32 = rest
                .parse()
                .map_err(|_| err(ParseErrorKind::Syntax(format!("bad lattice size `{rest}`"))))?;
            if l == 0 {
                return Err(err(ParseErrorKind::Syntax("lattice size must be positive".into())));
            }
            lattice = Some(l);
            continue;
        }
        let l = lattice.ok_or_else(|| err(ParseErrorKind::MissingLattice))?;
        let coords = parse_coords(rest).map_err(|m| err(ParseErrorKind::Syntax(m)))?;
        for c in &coords {
            if !c.in_lattice(l) {
                return Err(err(ParseErrorKind::OutOfRange { coord: *c, lattice_size: l }));
            }
        }
        let expect = |n: usize| {
            if coords.len() == n {
                Ok(())
            } else {
                Err(err(ParseErrorKind::Syntax(format!("`{keyword}` takes {n} coordinate(s), got {}", coords.len()))))
            }
        };
        let op = match keyword {
            "cz" => {
                expect(2)?;
                if coords[0] == coords[1] {
                    return Err(err(ParseErrorKind::IdenticalOperands(coords[0])));
                }
                LogicalOp::Cz(coords[0], coords[1])
            }
            "h" | "z" | "x" => {
                expect(1)?;
                let g = match keyword {
                    "h" => SingleQubitGate::H,
                    "z" => SingleQubitGate::Z,
                    _ => SingleQubitGate::X,
                };
                LogicalOp::Single(g, coords[0])
            }
            other => return Err(err(ParseErrorKind::Syntax(format!("unknown statement `{other}`")))),
        };
        ops.push(op);
    }
    let lattice_size = lattice.ok_or(ParseError { line: text.lines().count().max(1), kind: ParseErrorKind::MissingLattice })?;
    Ok(LogicalCircuit { lattice_size, ops })
}

fn parse_coords(rest: &str) -> Result<Vec<Coord>, String> {
    let mut coords = Vec::new();
    let mut s = rest.trim();
    while !s.is_empty() {
        if !s.starts_with('(') {
            return Err(format!("expected `(`, found `{s}`"));
        }
        let close = s.find(')').ok_or_else(|| "unclosed `(`".to_string())?;
        coords.push(s[..=close].parse()?);
        s = s[close + 1..].trim_start();
    }
    Ok(coords)
}

/// Inverse of [`parse_program`].
pub fn render(circuit: &LogicalCircuit) -> String {
    let mut out = format!("lattice {}\n", circuit.lattice_size);
    for op in &circuit.ops {
        match op {
            LogicalOp::Cz(a, b) => out.push_str(&format!("cz {a} {b}\n")),
            LogicalOp::Single(g, c) => out.push_str(&format!("{} {c}\n", g.keyword())),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub op_index: usize,
    pub message: String,
}

/// Lists every invariant violation of a circuit; empty means valid.
pub fn validate(circuit: &LogicalCircuit) -> Vec<Violation> {
    let l = circuit.lattice_size;
    let mut out = Vec::new();
    if l == 0 {
        out.push(Violation { op_index: 0, message: "lattice size must be positive".into() });
    }
    for (i, op) in circuit.ops.iter().enumerate() {
        for c in op.coords() {
            if !c.in_lattice(l) {
                out.push(Violation { op_index: i, message: format!("coordinate {c} out of range for lattice size {l}") });
            }
        }
        if let LogicalOp::Cz(a, b) = op {
            if a == b {
                out.push(Violation { op_index: i, message: format!("cz operands are identical: {a}") });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BitRecord {
    pub writer: Option<usize>,
    pub readers: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum BitViolation {
    ReadBeforeWrite { bit: BitId, reader: usize },
    MultipleWriters { bit: BitId, writers: Vec<usize> },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BitUsage {
    pub bits: BTreeMap<BitId, BitRecord>,
    pub violations: Vec<BitViolation>,
}

impl BitUsage {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Writer/reader map of classical bits. Event indices refer to `program.events`.
pub fn classical_bits(program: &PhysicalProgram) -> BitUsage {
    let items: Vec<(usize, f64, &Gate)> = program.gates().map(|(i, e, g)| (i, e.time, g)).collect();
    bit_usage(&items)
}

/// Same as [`classical_bits`] for an untimed gate list; list order stands in for time.
pub fn classical_bits_of_gates(gates: &[Gate]) -> BitUsage {
    let items: Vec<(usize, f64, &Gate)> = gates.iter().enumerate().map(|(i, g)| (i, i as f64, g)).collect();
    bit_usage(&items)
}

fn bit_usage(items: &[(usize, f64, &Gate)]) -> BitUsage {
    let mut usage = BitUsage::default();
    let mut writers: BTreeMap<BitId, Vec<(usize, f64)>> = BTreeMap::new();
    for &(idx, t, g) in items {
        if let GateKind::MeasureX(b) = g.kind {
            writers.entry(b).or_default().push((idx, t));
            usage.bits.entry(b).or_default();
        }
    }
    for (bit, ws) in &writers {
        usage.bits.get_mut(bit).expect("inserted above").writer = Some(ws[0].0);
        if ws.len() > 1 {
            usage
                .violations
                .push(BitViolation::MultipleWriters { bit: *bit, writers: ws.iter().map(|w| w.0).collect() });
        }
    }
    for &(idx, t, g) in items {
        if let GateKind::CondZ(b) | GateKind::CondX(b) = g.kind {
            match writers.get(&b).map(|ws| ws[0]) {
                Some((_, w_t)) if t > w_t => {
                    usage.bits.get_mut(&b).expect("writer recorded").readers.push(idx);
                }
                _ => {
                    usage.bits.entry(b).or_default().readers.push(idx);
                    usage.violations.push(BitViolation::ReadBeforeWrite { bit: b, reader: idx });
                }
            }
        }
    }
    usage
}
