//! Closed-form fidelity budgets for one logical CZ.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arch::{neighbor_chain_decompose, ArchError, ArchitectureSpec, GateCounts, Protocol};
use crate::config::{parse_key_values, parse_value, ConfigError};
use crate::ir::Coord;
use crate::schedule::makespan_estimate;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    #[error("{name} = {value} is outside {range}")]
    OutOfRange { name: &'static str, value: f64, range: &'static str },
    #[error("sweep grid must be strictly increasing inside (0, 1)")]
    BadGrid,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Arch(#[from] ArchError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostParams {
    pub f1: f64,
    pub f2_cz: f64,
    pub f2_swap: f64,
    pub fr: f64,
    /// Shuttling fidelity per logical gate at zero distance.
    pub f_shuttle: f64,
    /// Per-spacing decay rate of the shuttling fidelity; zero disables distance dependence.
    pub shuttle_kappa: f64,
    /// Physical two-qubit error of the nearest-neighbor baseline.
    pub p2: f64,
}

impl Default for CostParams {
    /// p1 = 5e-4, p2 = 1e-3 for both CZ and SWAP, pr = 3e-3, unit shuttling fidelity.
    fn default() -> Self {
        Self::from_errors(5e-4, 1e-3, 3e-3)
    }
}

impl CostParams {
    /// Equal CZ and SWAP error `p2`, unit shuttling fidelity.
    pub fn from_errors(p1: f64, p2: f64, pr: f64) -> Self {
        Self { f1: 1.0 - p1, f2_cz: 1.0 - p2, f2_swap: 1.0 - p2, fr: 1.0 - pr, f_shuttle: 1.0, shuttle_kappa: 0.0, p2 }
    }

    pub fn validate(&self) -> Result<(), CostError> {
        let fid = [("F1", self.f1), ("F2_cz", self.f2_cz), ("F2_swap", self.f2_swap), ("Fr", self.fr), ("F_shuttle", self.f_shuttle)];
        for (name, value) in fid {
            if !(value > 0.0 && value <= 1.0) {
                return Err(CostError::OutOfRange { name, value, range: "(0, 1]" });
            }
        }
        if !(0.0..1.0).contains(&self.p2) {
            return Err(CostError::OutOfRange { name: "p2", value: self.p2, range: "[0, 1)" });
        }
        if !(self.shuttle_kappa >= 0.0 && self.shuttle_kappa.is_finite()) {
            return Err(CostError::OutOfRange { name: "shuttle_kappa", value: self.shuttle_kappa, range: "[0, inf)" });
        }
        Ok(())
    }

    /// Shuttling fidelity after `distance` lattice spacings.
    pub fn shuttle_fidelity(&self, distance: f64) -> f64 {
        self.f_shuttle * (-self.shuttle_kappa * distance).exp()
    }

    /// Reads `key=value` lines over the defaults. `F2` sets both two-qubit
    /// fidelities; `p1`, `pr` are error aliases of `F1`, `Fr`.
    pub fn from_config(text: &str) -> Result<Self, CostError> {
        let mut p = Self::default();
        for (k, v) in parse_key_values(text)? {
            let x: f64 = parse_value(&k, &v)?;
            match k.as_str() {
                "F1" => p.f1 = x,
                "p1" => p.f1 = 1.0 - x,
                "F2" => {
                    p.f2_cz = x;
                    p.f2_swap = x;
                }
                "F2_cz" => p.f2_cz = x,
                "F2_swap" => p.f2_swap = x,
                "Fr" => p.fr = x,
                "pr" => p.fr = 1.0 - x,
                "F_shuttle" => p.f_shuttle = x,
                "shuttle_kappa" => p.shuttle_kappa = x,
                "p2" => p.p2 = x,
                _ => return Err(ConfigError::UnknownKey(k).into()),
            }
        }
        p.validate()?;
        Ok(p)
    }
}

/// `base` multiplied by itself `n` times, left to right.
fn repeat(base: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, _| acc * base)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityReport {
    pub protocol: String,
    pub counts: GateCounts,
    pub fidelity: f64,
    pub error: f64,
    pub makespan: Option<f64>,
}

/// F = F2_cz^n2_cz · F2_swap^n2_swap · F1^n1 · Fr^nr · F_shuttle.
pub fn logical_gate_fidelity(counts: GateCounts, params: &CostParams) -> Result<FidelityReport, CostError> {
    params.validate()?;
    let f = repeat(params.f2_cz, counts.n2_cz)
        * repeat(params.f2_swap, counts.n2_swap)
        * repeat(params.f1, counts.n1)
        * repeat(params.fr, counts.nr)
        * params.f_shuttle;
    Ok(FidelityReport { protocol: String::new(), counts, fidelity: f, error: 1.0 - f, makespan: None })
}

pub fn protocol_fidelity(protocol: Protocol, params: &CostParams) -> Result<FidelityReport, CostError> {
    let mut r = logical_gate_fidelity(protocol.counts(), params)?;
    r.protocol = protocol.name().to_string();
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NeighborChainFidelity {
    pub distance: u32,
    pub n2: u32,
    /// exp(-p2·L)
    pub asymptotic: f64,
    /// (1 - p2)^n2
    pub exact: f64,
}

pub fn neighbor_chain_asymptotic(p2: f64, lattice_size: u32) -> f64 {
    (-p2 * lattice_size as f64).exp()
}

pub fn neighbor_chain_exact(p2: f64, n2: u32) -> f64 {
    repeat(1.0 - p2, n2)
}

/// Both forms of the SWAP-chain baseline for a pair on an `L`×`L` lattice.
pub fn neighbor_chain_fidelity(lattice_size: u32, a: Coord, b: Coord, p2: f64) -> Result<NeighborChainFidelity, CostError> {
    if !(0.0..1.0).contains(&p2) {
        return Err(CostError::OutOfRange { name: "p2", value: p2, range: "[0, 1)" });
    }
    let d = neighbor_chain_decompose(a, b)?;
    let n2 = d.counts.n2();
    Ok(NeighborChainFidelity {
        distance: a.manhattan(&b),
        n2,
        asymptotic: neighbor_chain_asymptotic(p2, lattice_size),
        exact: neighbor_chain_exact(p2, n2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepAxis {
    /// Single-qubit error against p2; readout error held fixed.
    P1,
    /// Readout error against p2; single-qubit error held fixed.
    Pr,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::P1 => "p1",
            SweepAxis::Pr => "pr",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub protocol: String,
    pub axis: SweepAxis,
    pub axis_values: Vec<f64>,
    pub p2_values: Vec<f64>,
    /// `errors[i][j]` at `axis_values[i]`, `p2_values[j]`.
    pub errors: Vec<Vec<f64>>,
    /// `(p2, axis value)` points where the logical error equals [`CONTOUR_LEVEL`].
    pub contour: Vec<(f64, f64)>,
}

pub const CONTOUR_LEVEL: f64 = 1e-2;

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (l0, l1) = (lo.log10(), hi.log10());
    (0..n).map(|i| 10f64.powf(l0 + (l1 - l0) * i as f64 / (n - 1) as f64)).collect()
}

/// Default 50×50 grid over [1e-5, 1e-1].
pub fn default_grid() -> Vec<f64> {
    log_grid(1e-5, 1e-1, 50)
}

fn check_grid(g: &[f64]) -> Result<(), CostError> {
    let inside = g.iter().all(|x| *x > 0.0 && *x < 1.0);
    let increasing = g.windows(2).all(|w| w[0] < w[1]);
    if g.is_empty() || !inside || !increasing {
        return Err(CostError::BadGrid);
    }
    Ok(())
}

/// Logical error over an (axis, p2) grid with unit shuttling fidelity and equal CZ
/// and SWAP errors. The error not on the axis comes from `fixed`.
pub fn error_budget_sweep(
    protocol: Protocol,
    axis: SweepAxis,
    axis_values: &[f64],
    p2_values: &[f64],
    fixed: &CostParams,
) -> Result<Sweep, CostError> {
    check_grid(axis_values)?;
    check_grid(p2_values)?;
    fixed.validate()?;
    let counts = protocol.counts();
    let base = |x: f64| match axis {
        SweepAxis::P1 => CostParams { f1: 1.0 - x, f_shuttle: 1.0, shuttle_kappa: 0.0, ..*fixed },
        SweepAxis::Pr => CostParams { fr: 1.0 - x, f_shuttle: 1.0, shuttle_kappa: 0.0, ..*fixed },
    };
    let errors = axis_values
        .par_iter()
        .map(|&x| {
            p2_values
                .iter()
                .map(|&p2| {
                    let p = CostParams { f2_cz: 1.0 - p2, f2_swap: 1.0 - p2, p2, ..base(x) };
                    logical_gate_fidelity(counts, &p).map(|r| r.error)
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n2 = counts.n2();
    let contour = axis_values
        .iter()
        .filter_map(|&x| {
            let p = base(x);
            let rest = repeat(p.f1, counts.n1) * repeat(p.fr, counts.nr);
            let target = 1.0 - CONTOUR_LEVEL;
            if n2 == 0 || rest <= target {
                return None;
            }
            let p2 = 1.0 - (target / rest).powf(1.0 / n2 as f64);
            (p2 > 0.0 && p2 < 1.0).then_some((p2, x))
        })
        .collect();
    Ok(Sweep { protocol: protocol.name().to_string(), axis, axis_values: axis_values.to_vec(), p2_values: p2_values.to_vec(), errors, contour })
}

impl Sweep {
    /// Header row of p2 values, first column of axis values, body of logical errors.
    pub fn matrix_csv(&self) -> String {
        let mut out = format!("{}\\p2", self.axis.name());
        for p2 in &self.p2_values {
            let _ = write!(out, ",{p2:e}");
        }
        out.push('\n');
        for (x, row) in self.axis_values.iter().zip(&self.errors) {
            let _ = write!(out, "{x:e}");
            for e in row {
                let _ = write!(out, ",{e:e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn contour_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for (x, y) in &self.contour {
            let _ = writeln!(out, "{x:e},{y:e}");
        }
        out
    }
}

/// Representative pair for a protocol row: the corner pair, or the anti-corner pair
/// for the crossed one-way case.
pub fn representative_pair(protocol: Protocol, lattice_size: u32) -> (Coord, Coord) {
    let m = lattice_size - 1;
    match protocol {
        Protocol::OneWayCrossed => (Coord::new(0, m), Coord::new(m, 0)),
        _ => (Coord::new(0, 0), Coord::new(m, m)),
    }
}

/// Every protocol row under the same parameters, best first (error, then makespan).
pub fn architecture_comparison_with(params: &CostParams, arch: &ArchitectureSpec) -> Result<Vec<FidelityReport>, CostError> {
    let mut rows = Vec::with_capacity(Protocol::ALL.len());
    for protocol in Protocol::ALL {
        let mut r = protocol_fidelity(protocol, params)?;
        let (a, b) = representative_pair(protocol, arch.lattice_size);
        r.makespan = Some(makespan_estimate(&arch.with_variant(protocol.variant()), a, b));
        rows.push(r);
    }
    rows.sort_by(|x, y| {
        x.error
            .total_cmp(&y.error)
            .then(x.makespan.unwrap_or(0.0).total_cmp(&y.makespan.unwrap_or(0.0)))
            .then(x.protocol.cmp(&y.protocol))
    });
    Ok(rows)
}

/// [`architecture_comparison_with`] under default timing on an `L`×`L` lattice.
pub fn architecture_comparison(params: &CostParams, lattice_size: u32) -> Result<Vec<FidelityReport>, CostError> {
    let arch = ArchitectureSpec::new(crate::arch::Variant::TwoWayBelt, lattice_size.max(2));
    architecture_comparison_with(params, &arch)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_gates_give_unit_fidelity() {
        let p = CostParams::from_errors(0.0, 0.0, 0.0);
        for proto in Protocol::ALL {
            assert_eq!(protocol_fidelity(proto, &p).unwrap().fidelity, 1.0);
        }
    }

    #[test]
    fn rejects_out_of_range_params() {
        let p = CostParams { f1: 1.2, ..CostParams::default() };
        assert!(logical_gate_fidelity(GateCounts::default(), &p).is_err());
        let p = CostParams { p2: 1.0, ..CostParams::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn zero_error_origin_leaves_readout_only() {
        let g = [1e-9, 1e-8];
        for proto in Protocol::ALL {
            let s = error_budget_sweep(proto, SweepAxis::P1, &g, &g, &CostParams::from_errors(0.0, 0.0, 3e-3)).unwrap();
            let nr = proto.counts().nr as i32;
            let expect = 1.0 - 0.997f64.powi(nr);
            assert!((s.errors[0][0] - expect).abs() < 1e-7, "{proto}");
        }
    }

    #[test]
    fn contour_lies_on_the_level_set() {
        let g = default_grid();
        let s = error_budget_sweep(Protocol::TwoWayBelt, SweepAxis::P1, &g, &g, &CostParams::default()).unwrap();
        assert!(!s.contour.is_empty());
        for &(p2, p1) in &s.contour {
            let f = logical_gate_fidelity(Protocol::TwoWayBelt.counts(), &CostParams::from_errors(p1, p2, 3e-3)).unwrap();
            assert!((f.error - CONTOUR_LEVEL).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_grids_are_rejected() {
        let p = CostParams::default();
        assert_eq!(error_budget_sweep(Protocol::TwoWayBelt, SweepAxis::P1, &[0.1, 0.01], &[0.1], &p), Err(CostError::BadGrid));
        assert_eq!(error_budget_sweep(Protocol::TwoWayBelt, SweepAxis::P1, &[0.0], &[0.1], &p), Err(CostError::BadGrid));
    }

    #[test]
    fn config_aliases() {
        let p = CostParams::from_config("p1=1e-3\nF2=0.99\npr=0.01\n").unwrap();
        assert!((p.f1 - 0.999).abs() < 1e-15);
        assert_eq!((p.f2_cz, p.f2_swap), (0.99, 0.99));
        assert!((p.fr - 0.99).abs() < 1e-15);
        assert!(CostParams::from_config("F9=1").is_err());
    }

    #[test]
    fn comparison_ranks() {
        let equal = CostParams { fr: 1.0, ..CostParams::from_errors(1e-3, 1e-3, 0.0) };
        let rows = architecture_comparison(&equal, 8).unwrap();
        assert_eq!(rows[0].protocol, "throw-and-measure");

        let poor_readout = CostParams { fr: 0.9, ..CostParams::from_errors(1e-4, 1e-4, 0.0) };
        let rows = architecture_comparison(&poor_readout, 8).unwrap();
        let first_measuring = rows.iter().position(|r| r.counts.nr > 0).unwrap();
        assert!(rows[..first_measuring].len() == 3 && rows[first_measuring..].iter().all(|r| r.counts.nr > 0));
    }

    #[test]
    fn shuttle_decay() {
        let p = CostParams { shuttle_kappa: 0.01, ..CostParams::default() };
        assert!((p.shuttle_fidelity(10.0) - (-0.1f64).exp()).abs() < 1e-15);
        assert_eq!(CostParams::default().shuttle_fidelity(100.0), 1.0);
    }
}
