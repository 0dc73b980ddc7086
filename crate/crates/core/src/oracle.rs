//! Dense state-vector simulator used to check compiled protocols.
//!
//! Qubit `i` of a [`PureState`] is bit `i` of the amplitude index. Mid-circuit
//! X-basis measurements fork the simulation into [`Branch`]es, which are
//! enumerated exhaustively.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use thiserror::Error;

use crate::arch::{decompose_cz, ArchError, ArchitectureSpec, Decomposition};
use crate::ir::{BitId, Coord, Gate, GateKind, QubitRef};

pub const MAX_QUBITS: usize = 8;
pub const NORM_TOLERANCE: f64 = 1e-9;
pub const PRUNE_BELOW: f64 = 1e-12;
pub const FIDELITY_THRESHOLD: f64 = 1.0 - 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("operand {0} is not part of the simulated register")]
    UnknownOperand(QubitRef),
    #[error("measure_x cannot be applied as a unitary; use branch_execute")]
    MeasurementAsUnitary,
    #[error("{0} qubits exceed the dense-simulation limit of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("norm drifted to {norm} after {gate}")]
    NumericalInstability { norm: f64, gate: String },
    #[error("{0} reads bit {1} before it is written")]
    UnwrittenBit(String, BitId),
    #[error("operands of {0} must be distinct")]
    RepeatedOperand(String),
    #[error(transparent)]
    Arch(#[from] ArchError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    pub amplitudes: Vec<Complex64>,
    pub qubit_order: Vec<QubitRef>,
}

const PLUS: [Complex64; 2] = [Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0), Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)];
const ZERO: [Complex64; 2] = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];

impl PureState {
    /// Product state of single-qubit states, one per entry of `qubits`.
    pub fn product(qubits: &[(QubitRef, [Complex64; 2])]) -> Result<Self, OracleError> {
        if qubits.len() > MAX_QUBITS {
            return Err(OracleError::TooManyQubits(qubits.len()));
        }
        let mut amplitudes = vec![Complex64::new(1.0, 0.0)];
        for (i, (_, q)) in qubits.iter().enumerate() {
            let mut next = vec![Complex64::default(); amplitudes.len() * 2];
            for (idx, amp) in amplitudes.iter().enumerate() {
                next[idx] = amp * q[0];
                next[idx | (1 << i)] = amp * q[1];
            }
            amplitudes = next;
        }
        Ok(Self { amplitudes, qubit_order: qubits.iter().map(|(r, _)| *r).collect() })
    }

    /// `|0...0>` over the given register.
    pub fn zeros(qubit_order: Vec<QubitRef>) -> Result<Self, OracleError> {
        let spec: Vec<_> = qubit_order.iter().map(|q| (*q, ZERO)).collect();
        Self::product(&spec)
    }

    pub fn num_qubits(&self) -> usize {
        self.qubit_order.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn index_of(&self, q: &QubitRef) -> Result<usize, OracleError> {
        self.qubit_order.iter().position(|x| x == q).ok_or(OracleError::UnknownOperand(*q))
    }

    /// Applies a unitary gate in place. Conditional gates are applied unconditionally.
    pub fn apply(&mut self, kind: GateKind, operands: &[QubitRef]) -> Result<(), OracleError> {
        let idx = operands.iter().map(|q| self.index_of(q)).collect::<Result<Vec<_>, _>>()?;
        if idx.len() == 2 && idx[0] == idx[1] {
            return Err(OracleError::RepeatedOperand(kind.name().to_string()));
        }
        let amps = &mut self.amplitudes;
        match kind {
            GateKind::MeasureX(_) => return Err(OracleError::MeasurementAsUnitary),
            GateKind::H => {
                let m = 1 << idx[0];
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for i in (0..amps.len()).filter(|i| i & m == 0) {
                    let (a, b) = (amps[i], amps[i | m]);
                    amps[i] = (a + b) * s;
                    amps[i | m] = (a - b) * s;
                }
            }
            GateKind::Z | GateKind::CondZ(_) => {
                let m = 1 << idx[0];
                amps.iter_mut().enumerate().filter(|(i, _)| i & m != 0).for_each(|(_, a)| *a = -*a);
            }
            GateKind::X | GateKind::CondX(_) => {
                let m = 1 << idx[0];
                for i in (0..amps.len()).filter(|i| i & m == 0) {
                    amps.swap(i, i | m);
                }
            }
            GateKind::Cz => {
                let m = (1 << idx[0]) | (1 << idx[1]);
                amps.iter_mut().enumerate().filter(|(i, _)| i & m == m).for_each(|(_, a)| *a = -*a);
            }
            GateKind::Swap => {
                let (ma, mb) = (1 << idx[0], 1 << idx[1]);
                for i in (0..amps.len()).filter(|i| i & ma != 0 && i & mb == 0) {
                    amps.swap(i, (i & !ma) | mb);
                }
            }
        }
        Ok(())
    }

    /// Projects qubit `q` onto `|+>` (outcome 0) or `|->` (outcome 1), without renormalizing.
    fn project_x(&self, q: usize, outcome: u8) -> PureState {
        let m = 1 << q;
        let sign = if outcome == 0 { 1.0 } else { -1.0 };
        let mut amplitudes = vec![Complex64::default(); self.amplitudes.len()];
        for i in (0..amplitudes.len()).filter(|i| i & m == 0) {
            let c = (self.amplitudes[i] + self.amplitudes[i | m] * sign) * 0.5;
            amplitudes[i] = c;
            amplitudes[i | m] = c * sign;
        }
        PureState { amplitudes, qubit_order: self.qubit_order.clone() }
    }

    /// Reduced density matrix on `keep`, row-major, `keep[0]` as least significant bit.
    pub fn reduced_density(&self, keep: &[QubitRef]) -> Result<Vec<Vec<Complex64>>, OracleError> {
        let kept = keep.iter().map(|q| self.index_of(q)).collect::<Result<Vec<_>, _>>()?;
        let dim = 1usize << kept.len();
        let kept_mask: usize = kept.iter().map(|k| 1usize << k).sum();
        let sub = |i: usize| kept.iter().enumerate().map(|(j, k)| ((i >> k) & 1) << j).sum::<usize>();
        let mut rho = vec![vec![Complex64::default(); dim]; dim];
        let mut by_env: BTreeMap<usize, Vec<(usize, Complex64)>> = BTreeMap::new();
        for (i, a) in self.amplitudes.iter().enumerate() {
            by_env.entry(i & !kept_mask).or_default().push((sub(i), *a));
        }
        for group in by_env.values() {
            for (r, ar) in group {
                for (c, ac) in group {
                    rho[*r][*c] += ar * ac.conj();
                }
            }
        }
        Ok(rho)
    }

    pub fn purity(&self, keep: &[QubitRef]) -> Result<f64, OracleError> {
        let rho = self.reduced_density(keep)?;
        Ok(rho.iter().flatten().map(|x| x.norm_sqr()).sum())
    }
}

/// Pure-function form of [`PureState::apply`].
pub fn apply_gate(state: &PureState, kind: GateKind, operands: &[QubitRef]) -> Result<PureState, OracleError> {
    let mut next = state.clone();
    next.apply(kind, operands)?;
    Ok(next)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    /// Outcome per bit: 0 for `+`, 1 for `-`.
    pub outcomes: BTreeMap<BitId, u8>,
    pub probability: f64,
    pub state: PureState,
}

impl Branch {
    pub fn label(&self) -> String {
        if self.outcomes.is_empty() {
            return "-".to_string();
        }
        self.outcomes.iter().map(|(b, o)| format!("{b}={o}")).collect::<Vec<_>>().join(",")
    }
}

/// Runs a gate list, forking at each X measurement. Branches come out in
/// lexicographic order of outcomes over bit ids.
pub fn branch_execute(gates: &[Gate], initial: PureState) -> Result<Vec<Branch>, OracleError> {
    let mut branches = vec![Branch { outcomes: BTreeMap::new(), probability: 1.0, state: initial }];
    for gate in gates {
        match gate.kind {
            GateKind::MeasureX(bit) => {
                let mut next = Vec::with_capacity(branches.len() * 2);
                for br in &branches {
                    let q = br.state.index_of(&gate.operands[0])?;
                    for outcome in [0u8, 1] {
                        let mut state = br.state.project_x(q, outcome);
                        let p = state.norm().powi(2);
                        if p > 0.0 {
                            let n = p.sqrt();
                            state.amplitudes.iter_mut().for_each(|a| *a /= n);
                        }
                        let mut outcomes = br.outcomes.clone();
                        outcomes.insert(bit, outcome);
                        next.push(Branch { outcomes, probability: br.probability * p, state });
                    }
                }
                next.retain(|b| b.probability >= PRUNE_BELOW);
                branches = next;
            }
            GateKind::CondZ(bit) | GateKind::CondX(bit) => {
                for br in &mut branches {
                    match br.outcomes.get(&bit) {
                        None => return Err(OracleError::UnwrittenBit(gate.to_string(), bit)),
                        Some(1) => br.state.apply(gate.kind, &gate.operands)?,
                        Some(_) => {}
                    }
                }
            }
            _ => {
                for br in &mut branches {
                    br.state.apply(gate.kind, &gate.operands)?;
                }
            }
        }
        for br in &branches {
            let norm = br.state.norm();
            if (norm - 1.0).abs() > NORM_TOLERANCE {
                return Err(OracleError::NumericalInstability { norm, gate: gate.to_string() });
            }
        }
    }
    Ok(branches)
}

/// A named two-qubit input on (A, B); index bit 0 is A, bit 1 is B.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitInput {
    pub label: String,
    pub amplitudes: [Complex64; 4],
}

/// `|00>, |01>, |10>, |11>, |++>`, written as `|ab>`.
pub fn standard_inputs() -> Vec<TwoQubitInput> {
    let one = Complex64::new(1.0, 0.0);
    let z = Complex64::default();
    let basis = |i: usize| {
        let mut a = [z; 4];
        a[i] = one;
        a
    };
    vec![
        TwoQubitInput { label: "|00>".into(), amplitudes: basis(0) },
        TwoQubitInput { label: "|01>".into(), amplitudes: basis(2) },
        TwoQubitInput { label: "|10>".into(), amplitudes: basis(1) },
        TwoQubitInput { label: "|11>".into(), amplitudes: basis(3) },
        TwoQubitInput { label: "|++>".into(), amplitudes: [Complex64::new(0.5, 0.0); 4] },
    ]
}

/// Haar-random two-qubit states from a seeded generator.
pub fn haar_inputs(seed: u64, count: usize) -> Vec<TwoQubitInput> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let mut amps = [Complex64::default(); 4];
            for a in &mut amps {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                *a = Complex64::new(re, im);
            }
            let n = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            amps.iter_mut().for_each(|a| *a /= n);
            TwoQubitInput { label: format!("haar[{k}]"), amplitudes: amps }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub architecture: String,
    pub a: Coord,
    pub b: Coord,
    pub input: String,
    pub branch: String,
    pub probability: f64,
    pub fidelity: f64,
    /// Purity of the reduced state on (A, B).
    pub purity: f64,
    /// Smallest single-qubit purity over all ancillas (messengers and spectators).
    pub ancilla_purity: f64,
}

impl VerificationRecord {
    pub fn passed(&self) -> bool {
        self.fidelity >= FIDELITY_THRESHOLD && self.purity >= FIDELITY_THRESHOLD && self.ancilla_purity >= FIDELITY_THRESHOLD
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerificationReport {
    pub records: Vec<VerificationRecord>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        !self.records.is_empty() && self.records.iter().all(VerificationRecord::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerificationRecord> {
        self.records.iter().filter(|r| !r.passed())
    }

    pub fn min_fidelity(&self) -> f64 {
        self.records.iter().map(|r| r.fidelity).fold(f64::INFINITY, f64::min)
    }

    pub fn to_jsonl(&self) -> String {
        self.records.iter().map(|r| serde_json::to_string(r).expect("records serialize") + "\n").collect()
    }
}

/// Checks that `gates` act as CZ on (A, B) for every input. Messengers start in
/// `|+>`, any other computational qubit in `|0>`.
pub fn verify_gates(
    architecture: &str,
    gates: &[Gate],
    a: Coord,
    b: Coord,
    inputs: &[TwoQubitInput],
) -> Result<VerificationReport, OracleError> {
    let (qa, qb) = (QubitRef::Computational(a), QubitRef::Computational(b));
    let mut ancillas: Vec<QubitRef> = Vec::new();
    for q in gates.iter().flat_map(|g| g.operands.iter()) {
        if *q != qa && *q != qb && !ancillas.contains(q) {
            ancillas.push(*q);
        }
    }
    if ancillas.len() + 2 > MAX_QUBITS {
        return Err(OracleError::TooManyQubits(ancillas.len() + 2));
    }
    let mut records = Vec::new();
    for input in inputs {
        let mut spec: Vec<(QubitRef, [Complex64; 2])> = vec![(qa, ZERO), (qb, ZERO)];
        spec.extend(ancillas.iter().map(|q| (*q, if q.messenger_serial().is_some() { PLUS } else { ZERO })));
        let mut initial = PureState::product(&spec)?;
        // Replace the (A, B) factor with the requested input.
        let rest = initial.amplitudes.clone();
        for (i, amp) in initial.amplitudes.iter_mut().enumerate() {
            let env = i & !3;
            *amp = rest[env] * input.amplitudes[i & 3];
        }
        let mut target = input.amplitudes;
        target[3] = -target[3];
        for br in branch_execute(gates, initial)? {
            let rho = br.state.reduced_density(&[qa, qb])?;
            let mut fid = Complex64::default();
            for r in 0..4 {
                for c in 0..4 {
                    fid += target[r].conj() * rho[r][c] * target[c];
                }
            }
            let purity = rho.iter().flatten().map(|x| x.norm_sqr()).sum();
            let ancilla_purity = ancillas
                .iter()
                .map(|q| br.state.purity(&[*q]))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .fold(1.0, f64::min);
            records.push(VerificationRecord {
                architecture: architecture.to_string(),
                a,
                b,
                input: input.label.clone(),
                branch: br.label(),
                probability: br.probability,
                fidelity: fid.re,
                purity,
                ancilla_purity,
            });
        }
    }
    Ok(VerificationReport { records })
}

pub fn verify_decomposition(d: &Decomposition, inputs: &[TwoQubitInput]) -> Result<VerificationReport, OracleError> {
    verify_gates(&d.name, &d.gates, d.a, d.b, inputs)
}

/// Compiles the pair under `arch` and checks it on the five standard inputs.
pub fn verify_logical_cz(arch: &ArchitectureSpec, a: Coord, b: Coord) -> Result<VerificationReport, OracleError> {
    let d = decompose_cz(arch, a, b)?;
    verify_decomposition(&d, &standard_inputs())
}
