//! Command-line driver. Every command writes its artifacts plus a `manifest.json`
//! (tool version, command, seed, SHA-256 of the resolved inputs) into `--out`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::arch::{decompose_cz, neighbor_chain_decompose, ArchitectureSpec, Decomposition, Protocol, Variant};
use crate::cost::{
    architecture_comparison_with, default_grid, error_budget_sweep, neighbor_chain_exact, protocol_fidelity, representative_pair,
    CostParams, SweepAxis,
};
use crate::ir::{parse_program, Coord, LogicalCircuit, LogicalOp};
use crate::oracle::{haar_inputs, standard_inputs, verify_decomposition, VerificationReport};
use crate::schedule::{check_conflicts, schedule, ScheduleError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;
pub const EXIT_IO: i32 = 5;

/// Haar-random inputs checked by `verify` in addition to the standard five.
const HAAR_INPUTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Compile,
    Verify,
    Schedule,
    Cost,
    Sweep,
    Compare,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Compile => "compile",
            Command::Verify => "verify",
            Command::Schedule => "schedule",
            Command::Cost => "cost",
            Command::Sweep => "sweep",
            Command::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VariantChoice {
    One(Variant),
    All,
}

fn parse_variant_choice(s: &str) -> Result<VariantChoice, String> {
    if s.eq_ignore_ascii_case("all") {
        Ok(VariantChoice::All)
    } else {
        s.parse().map(VariantChoice::One)
    }
}

fn parse_pair(s: &str) -> Result<(Coord, Coord), String> {
    let parts: Vec<u32> = s
        .split(',')
        .map(|p| p.trim().parse().map_err(|_| format!("bad index `{}` in pair", p.trim())))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [r1, c1, r2, c2] => Ok((Coord::new(r1, c1), Coord::new(r2, c2))),
        _ => Err("expected r1,c1,r2,c2".into()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DropGate {
    Index(usize),
    /// The last conditional correction of each decomposition.
    FinalCorrection,
}

fn parse_drop_gate(s: &str) -> Result<DropGate, String> {
    if s == "final-correction" {
        return Ok(DropGate::FinalCorrection);
    }
    s.parse().map(DropGate::Index).map_err(|_| format!("expected an index or `final-correction`, found `{s}`"))
}

#[derive(Debug, Clone, Parser)]
#[command(name = "messenger", version, about = "Compile, verify, schedule and cost logical CZ gates mediated by messenger atoms")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Architecture `key=value` file.
    #[arg(long)]
    pub arch: Option<PathBuf>,
    /// Cost-model `key=value` file.
    #[arg(long)]
    pub cost: Option<PathBuf>,
    /// Logical program source.
    #[arg(long)]
    pub program: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Variant name, or `all`; overrides the architecture file.
    #[arg(long, value_parser = parse_variant_choice)]
    pub variant: Option<VariantChoice>,
    /// Single logical CZ as `r1,c1,r2,c2`.
    #[arg(long, value_parser = parse_pair)]
    pub pair: Option<(Coord, Coord)>,
    /// Remove one gate (by index, or `final-correction`) from every decomposition before verifying.
    #[arg(long, value_parser = parse_drop_gate)]
    pub drop_gate: Option<DropGate>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl ToString) -> Self {
        Self { code, message: message.to_string() }
    }
}

fn parse_err(e: impl ToString) -> CliError {
    CliError::new(EXIT_PARSE, e)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn schedule_err(e: ScheduleError) -> CliError {
    match e {
        ScheduleError::Infeasible { .. } => CliError::new(EXIT_INFEASIBLE, e),
        _ => parse_err(e),
    }
}

/// Inputs after reading and parsing every referenced file.
struct Inputs {
    arch: ArchitectureSpec,
    variants: Vec<Variant>,
    params: CostParams,
    circuit: Option<LogicalCircuit>,
    /// Canonical text hashed into the manifest.
    canonical: String,
}

fn resolve(cli: &Cli) -> Result<Inputs, CliError> {
    let mut canonical = String::new();
    let arch_file = cli.arch.as_deref().map(read).transpose()?;
    let program = match cli.program.as_deref().map(read).transpose()? {
        Some(text) => {
            let _ = writeln!(canonical, "[program]\n{text}");
            Some(parse_program(&text).map_err(parse_err)?)
        }
        None => None,
    };
    let params = match cli.cost.as_deref().map(read).transpose()? {
        Some(text) => CostParams::from_config(&text).map_err(parse_err)?,
        None => CostParams::default(),
    };
    let mut arch = match &arch_file {
        Some(text) => ArchitectureSpec::from_config(text).map_err(parse_err)?,
        None => {
            let l = match (&program, &cli.pair) {
                (Some(c), _) => c.lattice_size,
                (None, Some((a, b))) => a.row.max(a.col).max(b.row).max(b.col) + 1,
                (None, None) => 8,
            };
            ArchitectureSpec::new(Variant::TwoWayBelt, l.max(2))
        }
    };
    if let Some(c) = &program {
        arch.lattice_size = c.lattice_size.max(2);
    }
    let variants = match &cli.variant {
        Some(VariantChoice::One(v)) => vec![*v],
        Some(VariantChoice::All) => Variant::ALL.to_vec(),
        None if arch_file.is_some() => vec![arch.variant],
        None => match cli.command {
            Command::Compile | Command::Schedule => vec![arch.variant],
            _ => Variant::ALL.to_vec(),
        },
    };
    arch.variant = variants[0];
    let _ = write!(canonical, "[arch]\n{}[cost]\n{params:?}\n", arch.to_config());
    let _ = writeln!(canonical, "[variants] {variants:?}\n[pair] {:?}\n[drop] {:?}", cli.pair, cli.drop_gate);
    Ok(Inputs { arch, variants, params, circuit: program, canonical })
}

/// Logical CZ pairs named on the command line or in the program; the corner pair otherwise.
fn cz_pairs(cli: &Cli, inputs: &Inputs) -> Vec<(Coord, Coord)> {
    if let Some(p) = cli.pair {
        return vec![p];
    }
    if let Some(c) = &inputs.circuit {
        return c
            .ops
            .iter()
            .filter_map(|op| match op {
                LogicalOp::Cz(a, b) => Some((*a, *b)),
                LogicalOp::Single(..) => None,
            })
            .collect();
    }
    let m = inputs.arch.lattice_size - 1;
    vec![(Coord::new(0, 0), Coord::new(m, m))]
}

fn circuit_for(cli: &Cli, inputs: &Inputs) -> Result<LogicalCircuit, CliError> {
    match (&inputs.circuit, cli.pair) {
        (Some(c), _) => Ok(c.clone()),
        (None, Some((a, b))) => {
            let mut c = LogicalCircuit::new(inputs.arch.lattice_size);
            c.ops.push(LogicalOp::Cz(a, b));
            Ok(c)
        }
        (None, None) => Err(parse_err("need --program or --pair")),
    }
}

fn single_variant(inputs: &Inputs, command: Command) -> Result<ArchitectureSpec, CliError> {
    match inputs.variants[..] {
        [v] => Ok(inputs.arch.with_variant(v)),
        _ => Err(parse_err(format!("`{}` takes a single variant", command.name()))),
    }
}

struct Artifacts(Vec<(String, String)>);

impl Artifacts {
    fn add(&mut self, name: impl Into<String>, body: String) {
        self.0.push((name.into(), body));
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    config_sha256: String,
    outputs: Vec<&'a str>,
}

fn write_all(cli: &Cli, inputs: &Inputs, artifacts: &Artifacts) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::new(EXIT_IO, format!("{}: {e}", cli.out.display()));
    fs::create_dir_all(&cli.out).map_err(io)?;
    for (name, body) in &artifacts.0 {
        fs::write(cli.out.join(name), body).map_err(io)?;
    }
    let manifest = Manifest {
        tool: "messenger",
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name(),
        seed: cli.seed,
        config_sha256: hex::encode(Sha256::digest(inputs.canonical.as_bytes())),
        outputs: artifacts.0.iter().map(|(n, _)| n.as_str()).collect(),
    };
    let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    fs::write(cli.out.join("manifest.json"), body).map_err(io)
}

fn compile(cli: &Cli, inputs: &Inputs, out: &mut Artifacts) -> Result<(), CliError> {
    let arch = single_variant(inputs, cli.command)?;
    let circuit = circuit_for(cli, inputs)?;
    let program = schedule(&circuit, &arch).map_err(schedule_err)?;
    out.add("program.jsonl", program.events.to_jsonl());
    Ok(())
}

fn run_schedule(cli: &Cli, inputs: &Inputs, out: &mut Artifacts) -> Result<(), CliError> {
    let arch = single_variant(inputs, cli.command)?;
    let circuit = circuit_for(cli, inputs)?;
    let program = schedule(&circuit, &arch).map_err(schedule_err)?;
    let conflicts = check_conflicts(&program, &ArchitectureSpec { lattice_size: circuit.lattice_size.max(2), ..arch.clone() });
    if let Some(v) = conflicts.first() {
        return Err(CliError::new(EXIT_INFEASIBLE, format!("schedule violates a constraint: {v:?}")));
    }
    let summary = serde_json::json!({
        "variant": arch.variant.name(),
        "lattice_size": circuit.lattice_size,
        "logical_ops": circuit.ops.len(),
        "events": program.events.len(),
        "messengers": program.trajectories.iter().map(|s| s.messenger).collect::<std::collections::BTreeSet<_>>().len(),
        "makespan_s": program.makespan,
    });
    out.add("events.jsonl", program.events.to_jsonl());
    out.add("trajectories.csv", program.trajectory_csv());
    out.add("summary.json", serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n");
    Ok(())
}

fn mutate(d: Decomposition, drop: &Option<DropGate>) -> Decomposition {
    match drop {
        None => d,
        Some(DropGate::Index(i)) => d.without_gate(*i),
        Some(DropGate::FinalCorrection) => match d.final_correction() {
            Some(i) => d.without_gate(i),
            None => d,
        },
    }
}

fn verify(cli: &Cli, inputs: &Inputs, out: &mut Artifacts) -> Result<(), CliError> {
    let mut states = standard_inputs();
    states.extend(haar_inputs(cli.seed, HAAR_INPUTS));
    let pairs = cz_pairs(cli, inputs);
    let mut report = VerificationReport::default();
    for v in &inputs.variants {
        let arch = inputs.arch.with_variant(*v);
        for &(a, b) in &pairs {
            let d = decompose_cz(&arch, a, b).map_err(parse_err)?;
            let r = verify_decomposition(&mutate(d, &cli.drop_gate), &states)
                .map_err(|e| CliError::new(EXIT_VERIFICATION, e))?;
            report.records.extend(r.records);
        }
    }
    out.add("verify.jsonl", report.to_jsonl());
    let failed = report.failures().count();
    if failed > 0 {
        write_all(cli, inputs, out)?;
        return Err(CliError::new(
            EXIT_VERIFICATION,
            format!("{failed} of {} branches failed; minimum fidelity {:.12}", report.records.len(), report.min_fidelity()),
        ));
    }
    Ok(())
}

fn counts_csv_row(out: &mut String, name: &str, counts: crate::arch::GateCounts, fidelity: f64) {
    let _ = writeln!(
        out,
        "{name},{},{},{},{},{fidelity:e},{:e}",
        counts.n1, counts.n2_cz, counts.n2_swap, counts.nr, 1.0 - fidelity
    );
}

fn cost(inputs: &Inputs, out: &mut Artifacts) -> Result<(), CliError> {
    let mut csv = String::from("protocol,n1,n2_cz,n2_swap,nr,fidelity,error\n");
    for p in Protocol::ALL.into_iter().filter(|p| inputs.variants.contains(&p.variant())) {
        let r = protocol_fidelity(p, &inputs.params).map_err(parse_err)?;
        counts_csv_row(&mut csv, &r.protocol, r.counts, r.fidelity);
    }
    let (a, b) = representative_pair(Protocol::TwoWayBelt, inputs.arch.lattice_size);
    let chain = neighbor_chain_decompose(a, b).map_err(parse_err)?;
    let f = neighbor_chain_exact(inputs.params.p2, chain.counts.n2());
    counts_csv_row(&mut csv, &format!("neighbor-chain(L={})", inputs.arch.lattice_size), chain.counts, f);
    out.add("cost.csv", csv);
    Ok(())
}

fn sweep(inputs: &Inputs, out: &mut Artifacts) -> Result<(), CliError> {
    let grid = default_grid();
    for p in Protocol::ALL.into_iter().filter(|p| inputs.variants.contains(&p.variant())) {
        for axis in [SweepAxis::P1, SweepAxis::Pr] {
            let s = error_budget_sweep(p, axis, &grid, &grid, &inputs.params).map_err(parse_err)?;
            let tag = format!("{}_{}", axis.name(), p.name().replace('(', "-").replace(')', ""));
            out.add(format!("sweep_{tag}.csv"), s.matrix_csv());
            out.add(format!("contour_{tag}.csv"), s.contour_csv());
        }
    }
    Ok(())
}

fn compare(inputs: &Inputs, out: &mut Artifacts) -> Result<(), CliError> {
    let rows = architecture_comparison_with(&inputs.params, &inputs.arch).map_err(parse_err)?;
    let mut csv = String::from("rank,protocol,n1,n2_cz,n2_swap,nr,fidelity,error,makespan_s\n");
    for (i, r) in rows.iter().filter(|r| inputs.variants.iter().any(|v| r.protocol.starts_with(v.name()))).enumerate() {
        let c = r.counts;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{:e},{:e},{:e}",
            i + 1,
            r.protocol,
            c.n1,
            c.n2_cz,
            c.n2_swap,
            c.nr,
            r.fidelity,
            r.error,
            r.makespan.unwrap_or(f64::NAN)
        );
    }
    out.add("compare.csv", csv);
    Ok(())
}

/// Runs one parsed invocation; artifacts are written only when the command succeeds
/// (or, for `verify`, when it completes with failed branches).
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let inputs = resolve(cli)?;
    let mut out = Artifacts(Vec::new());
    match cli.command {
        Command::Compile => compile(cli, &inputs, &mut out)?,
        Command::Verify => verify(cli, &inputs, &mut out)?,
        Command::Schedule => run_schedule(cli, &inputs, &mut out)?,
        Command::Cost => cost(&inputs, &mut out)?,
        Command::Sweep => sweep(&inputs, &mut out)?,
        Command::Compare => compare(&inputs, &mut out)?,
    }
    write_all(cli, &inputs, &out)
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
