//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rydberg_messenger::arch::{decompose_cz, gate_counts, one_way_case, ArchitectureSpec, Protocol, Variant};
use rydberg_messenger::cli::EXIT_VERIFICATION;
use rydberg_messenger::cost::{
    default_grid, error_budget_sweep, logical_gate_fidelity, neighbor_chain_asymptotic, neighbor_chain_fidelity, CostParams, SweepAxis,
};
use rydberg_messenger::ir::Coord;
use rydberg_messenger::oracle::{standard_inputs, verify_decomposition};
use rydberg_messenger::schedule::{check_conflicts, path_cells, plan_trajectories, schedule};

use common::{all_pairs, random_circuit, unpaired_messengers};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn expected_counts(p: Protocol) -> (u32, u32, u32) {
    match p {
        Protocol::TwoWayBelt => (2, 6, 0),
        Protocol::OneWayAligned => (2, 3, 1),
        Protocol::OneWayCrossed => (4, 3, 2),
        Protocol::ThrowCatchThrow => (2, 3, 0),
        Protocol::ShuttleAndRoute => (2, 3, 0),
        Protocol::ThrowAndMeasure => (2, 2, 1),
    }
}

fn gate_count_table() -> Outcome {
    let mut checked = 0;
    for l in 2..=4 {
        for (a, b) in all_pairs(l) {
            for v in Variant::ALL {
                let arch = ArchitectureSpec::new(v, l);
                let p = Protocol::for_pair(v, a, b);
                let want = expected_counts(p);
                let table = gate_counts(v, one_way_case(a, b));
                let d = decompose_cz(&arch, a, b).expect("pair is valid");
                if table != want || d.counts.triple() != want {
                    return outcome(false, format!("{v} {a}-{b} on L={l}: table {table:?}, compiled {:?}, want {want:?}", d.counts.triple()));
                }
                checked += 1;
            }
        }
    }
    outcome(true, format!("{checked} compiled pairs match"))
}

fn oracle_correctness() -> Outcome {
    let inputs = standard_inputs();
    let mut jobs: Vec<(Variant, u32, Coord, Coord)> = Vec::new();
    for v in Variant::ALL {
        jobs.extend(all_pairs(4).into_iter().map(|(a, b)| (v, 4, a, b)));
        jobs.push((v, 8, Coord::new(0, 0), Coord::new(7, 7)));
    }
    let (mut records, mut min_f, mut min_purity) = (0, f64::INFINITY, f64::INFINITY);
    for (v, l, a, b) in &jobs {
        let d = decompose_cz(&ArchitectureSpec::new(*v, *l), *a, *b).expect("pair is valid");
        let report = verify_decomposition(&d, &inputs).expect("simulation succeeds");
        for r in &report.records {
            min_f = min_f.min(r.fidelity);
            min_purity = min_purity.min(r.ancilla_purity);
        }
        records += report.records.len();
        let first_failure = report.failures().next().cloned();
        if let Some(bad) = first_failure {
            return outcome(false, format!("{v} {a}-{b} on L={l}: {bad:?}"));
        }
    }
    outcome(true, format!("{} decompositions, {records} branches, min fidelity {min_f:.15}, min messenger purity {min_purity:.15}", jobs.len()))
}

fn closed_form_spot_values() -> Outcome {
    let params = CostParams { fr: 1.0, ..CostParams::from_errors(5e-4, 1e-3, 0.0) };
    let two_way = logical_gate_fidelity(Protocol::TwoWayBelt.counts(), &params).unwrap().error;
    let params = CostParams::from_errors(5e-4, 1e-3, 3e-3);
    let throw_measure = logical_gate_fidelity(Protocol::ThrowAndMeasure.counts(), &params).unwrap().error;
    let ok_two_way = (two_way - 6.99e-3).abs() <= 1e-5;
    let ok_throw_measure = (throw_measure - 3.988e-3).abs() <= 1e-5;
    outcome(
        ok_two_way && ok_throw_measure,
        format!(
            "two-way error {two_way:.6e} vs 6.99e-3 ±1e-5 [{}]; throw-and-measure error {throw_measure:.6e} vs 3.988e-3 ±1e-5 [{}]",
            if ok_two_way { "ok" } else { "off" },
            if ok_throw_measure { "ok" } else { "off" }
        ),
    )
}

fn coincident_sweeps() -> Outcome {
    let grid = default_grid();
    for axis in [SweepAxis::P1, SweepAxis::Pr] {
        let tct = error_budget_sweep(Protocol::ThrowCatchThrow, axis, &grid, &grid, &CostParams::default()).unwrap();
        let sr = error_budget_sweep(Protocol::ShuttleAndRoute, axis, &grid, &grid, &CostParams::default()).unwrap();
        if tct.errors != sr.errors || tct.contour != sr.contour {
            return outcome(false, format!("{} sweeps differ", axis.name()));
        }
    }
    outcome(true, "both 50x50 sweeps and contours identical")
}

fn neighbor_chain_baseline() -> Outcome {
    let asymptotic = neighbor_chain_asymptotic(1e-3, 100);
    let ok_asymptotic = (asymptotic - 0.9048).abs() <= 1e-4;
    let chain = neighbor_chain_fidelity(50, Coord::new(0, 0), Coord::new(49, 49), 1e-3).unwrap();
    let ok_n2 = chain.n2 == 195;
    let ok_exact = (chain.exact - 0.8229).abs() <= 1e-4;
    let params = CostParams::default();
    let mut size_independent = true;
    for v in Variant::ALL {
        let arch = ArchitectureSpec::new(v, 50);
        let near = decompose_cz(&arch, Coord::new(0, 0), Coord::new(1, 1)).unwrap();
        let far = decompose_cz(&arch, Coord::new(0, 0), Coord::new(49, 49)).unwrap();
        let f = |c| logical_gate_fidelity(c, &params).unwrap().fidelity;
        size_independent &= f(near.counts) == f(far.counts);
    }
    let short = neighbor_chain_fidelity(50, Coord::new(0, 0), Coord::new(1, 1), 1e-3).unwrap();
    let decays = chain.exact < short.exact;
    outcome(
        ok_asymptotic && ok_n2 && ok_exact && size_independent && decays,
        format!(
            "asymptotic {asymptotic:.10} vs 0.9048 ±1e-4 [{}]; corner n2 {} [{}]; exact {:.10} vs 0.8229 ±1e-4 [{}]; messenger size independence [{}]; chain decays with distance [{}]",
            ok(ok_asymptotic),
            chain.n2,
            ok(ok_n2),
            chain.exact,
            ok(ok_exact),
            ok(size_independent),
            ok(decays)
        ),
    )
}

fn ok(b: bool) -> &'static str {
    if b { "ok" } else { "off" }
}

fn makespan_scaling() -> Outcome {
    let sizes = [8u32, 16, 32, 64];
    let mut lines = Vec::new();
    let mut pass = true;
    for v in Variant::ALL {
        let (mut sxy, mut sxx) = (0.0, 0.0);
        let mut residuals = Vec::new();
        let mut tr_t1 = 0.0;
        for &l in &sizes {
            let mut arch = ArchitectureSpec::new(v, l);
            arch.speed = arch.max_speed();
            tr_t1 = arch.tr + arch.t1;
            let (a, b) = (Coord::new(0, 0), Coord::new(l - 1, l - 1));
            let d = decompose_cz(&arch, a, b).unwrap();
            let makespan = match plan_trajectories(&arch, &d) {
                Ok(p) => p.makespan,
                Err(e) => return outcome(false, format!("{v} on L={l}: {e}")),
            };
            let transport = path_cells(&arch, a, b) * arch.t2;
            sxy += transport * makespan;
            sxx += transport * transport;
            residuals.push(makespan - transport);
        }
        let slope = sxy / sxx;
        let slope_ok = (slope - 1.0).abs() <= 0.2;
        pass &= slope_ok;
        let mut line = format!("{v}: slope {slope:.4} of path·t2 [{}]", ok(slope_ok));
        if v.measures() {
            let intercept_ok = residuals.iter().all(|r| (r - tr_t1).abs() <= 0.25 * tr_t1);
            pass &= intercept_ok;
            line += &format!(", intercepts {:?} vs tr+t1 = {tr_t1:e} [{}]", residuals.iter().map(|r| format!("{r:.3e}")).collect::<Vec<_>>(), ok(intercept_ok));
        }
        lines.push(line);
    }
    outcome(pass, lines.join("; "))
}

fn scheduler_safety() -> Outcome {
    let mut gates = 0;
    for v in Variant::ALL {
        let arch = ArchitectureSpec::new(v, 8);
        for seed in 0..500 {
            let c = random_circuit(seed, 8, 20);
            gates += c.ops.len();
            let p = match schedule(&c, &arch) {
                Ok(p) => p,
                Err(e) => return outcome(false, format!("{v} seed {seed}: {e}")),
            };
            if let Some(violation) = check_conflicts(&p, &arch).first() {
                return outcome(false, format!("{v} seed {seed}: {violation:?}"));
            }
            let unpaired = unpaired_messengers(&p.events);
            if !unpaired.is_empty() {
                return outcome(false, format!("{v} seed {seed}: unpaired messengers {unpaired:?}"));
            }
        }
    }
    outcome(true, format!("2500 circuits, {gates} logical ops, no violations"))
}

fn mutation_sensitivity() -> Outcome {
    let cases = [
        (Variant::OneWayBelt, Coord::new(0, 0), Coord::new(3, 3)),
        (Variant::OneWayBelt, Coord::new(0, 3), Coord::new(3, 0)),
        (Variant::ThrowAndMeasure, Coord::new(0, 0), Coord::new(3, 3)),
    ];
    let dir = tempfile::tempdir().expect("temp dir");
    let mut lines = Vec::new();
    let mut pass = true;
    for (v, a, b) in cases {
        let d = decompose_cz(&ArchitectureSpec::new(v, 4), a, b).unwrap();
        let Some(i) = d.final_correction() else {
            return outcome(false, format!("{} has no conditional correction", d.name));
        };
        let report = verify_decomposition(&d.without_gate(i), &standard_inputs()).unwrap();
        let min_f = report.min_fidelity();
        let status = Command::new(env!("CARGO_BIN_EXE_messenger"))
            .args(["verify", "--variant", v.name(), "--drop-gate", "final-correction"])
            .arg("--pair")
            .arg(format!("{},{},{},{}", a.row, a.col, b.row, b.col))
            .arg("--out")
            .arg(dir.path())
            .output()
            .expect("binary runs")
            .status
            .code();
        let case_ok = min_f <= 0.5 && status == Some(EXIT_VERIFICATION);
        pass &= case_ok;
        lines.push(format!("{} {a}-{b}: min fidelity {min_f:.3}, exit {status:?} [{}]", d.name, ok(case_ok)));
    }
    outcome(pass, lines.join("; "))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 8] = [
        ("gate-count table", gate_count_table, Duration::from_secs(1)),
        ("oracle correctness", oracle_correctness, Duration::from_secs(30)),
        ("closed-form spot values", closed_form_spot_values, Duration::MAX),
        ("coincident sweeps", coincident_sweeps, Duration::MAX),
        ("neighbor-chain baseline", neighbor_chain_baseline, Duration::MAX),
        ("makespan scaling", makespan_scaling, Duration::from_secs(10)),
        ("scheduler safety", scheduler_safety, Duration::from_secs(60)),
        ("mutation sensitivity", mutation_sensitivity, Duration::MAX),
    ];
    let mut failed = 0;
    for (n, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let pass = result.pass && in_time;
        if !pass {
            failed += 1;
        }
        let timing = if *budget == Duration::MAX {
            format!("{:.2}s", elapsed.as_secs_f64())
        } else {
            format!("{:.2}s of {}s [{}]", elapsed.as_secs_f64(), budget.as_secs(), ok(in_time))
        };
        println!("criterion {} {name}: {} ({timing}) {}", n + 1, if pass { "PASS" } else { "FAIL" }, result.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
