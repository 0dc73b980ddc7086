use std::fs;
use std::path::Path;
use std::process::Command;

use rydberg_messenger::cli::{EXIT_INFEASIBLE, EXIT_IO, EXIT_OK, EXIT_PARSE, EXIT_VERIFICATION};

fn messenger(args: &[&str], out: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_messenger"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
        .status
        .code()
        .expect("exit code")
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn compile_of_an_empty_circuit_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let prog = dir.path().join("empty.prog");
    fs::write(&prog, "lattice 4\n").unwrap();
    let out = dir.path().join("out");
    assert_eq!(messenger(&["compile", "--program", prog.to_str().unwrap()], &out), EXIT_OK);
    assert_eq!(fs::read(out.join("program.jsonl")).unwrap(), b"");
    assert!(out.join("manifest.json").exists());
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let prog = dir.path().join("p.prog");
    fs::write(&prog, "lattice 6\ncz (0,0) (5,5)\nh (2,2)\ncz (1,4) (4,1)\ncz (0,0) (3,2)\n").unwrap();
    let p = prog.to_str().unwrap();
    let runs: [&[&str]; 6] = [
        &["compile", "--program", p, "--variant", "throw-catch-throw"],
        &["schedule", "--program", p, "--variant", "one-way"],
        &["verify", "--program", p, "--seed", "7"],
        &["cost"],
        &["sweep", "--variant", "tm"],
        &["compare"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let (a, b) = (dir.path().join(format!("a{i}")), dir.path().join(format!("b{i}")));
        assert_eq!(messenger(args, &a), EXIT_OK, "{args:?}");
        assert_eq!(messenger(args, &b), EXIT_OK, "{args:?}");
        assert_eq!(snapshot(&a), snapshot(&b), "{args:?}");
    }
}

#[test]
fn verify_passes_for_every_variant_on_the_corner_pair() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(messenger(&["verify", "--variant", "all", "--pair", "0,0,3,3"], dir.path()), EXIT_OK);
    let report = fs::read_to_string(dir.path().join("verify.jsonl")).unwrap();
    for v in ["two-way-belt", "one-way-belt(1)", "throw-catch-throw", "shuttle-and-route", "throw-and-measure"] {
        assert!(report.contains(&format!("\"architecture\":\"{v}\"")), "{v}");
    }
}

#[test]
fn dropped_gates_fail_verification() {
    let dir = tempfile::tempdir().unwrap();
    for v in ["two-way", "one-way", "tct", "sr", "tm"] {
        for idx in ["0", "1", "final-correction"] {
            let code = messenger(&["verify", "--variant", v, "--pair", "0,0,3,3", "--drop-gate", idx], dir.path());
            let expect = if idx == "final-correction" && !matches!(v, "one-way" | "tm") { EXIT_OK } else { EXIT_VERIFICATION };
            assert_eq!(code, expect, "{v} without {idx}");
        }
    }
}

#[test]
fn cost_rows_carry_the_closed_form_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cost.cfg");
    fs::write(&cfg, "p1=5e-4\np2=1e-3\nF2=0.999\npr=3e-3\n").unwrap();
    let out = dir.path().join("out");
    assert_eq!(messenger(&["cost", "--cost", cfg.to_str().unwrap()], &out), EXIT_OK);
    let csv = fs::read_to_string(out.join("cost.csv")).unwrap();
    let row = csv.lines().find(|l| l.starts_with("two-way-belt,")).unwrap();
    let error: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!((error - 6.978786461276e-3).abs() < 1e-14, "{row}");
}

#[test]
fn exit_codes_are_distinct() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let bad = d.join("bad.prog");
    fs::write(&bad, "lattice 4\ncz (0,0) (9,9)\n").unwrap();
    assert_eq!(messenger(&["compile", "--program", bad.to_str().unwrap()], &d.join("o")), EXIT_PARSE);
    assert_eq!(messenger(&["compile", "--variant", "nonesuch", "--pair", "0,0,1,1"], &d.join("o")), EXIT_PARSE);
    let cfg = d.join("bad.cost");
    fs::write(&cfg, "F1=1.5\n").unwrap();
    assert_eq!(messenger(&["cost", "--cost", cfg.to_str().unwrap()], &d.join("o")), EXIT_PARSE);

    // At v = a/t2 a same-row pair leaves no room for the two-way belt's gate windows.
    let fast = d.join("fast.arch");
    fs::write(&fast, "variant=two-way\nL=4\nv_mps=4\n").unwrap();
    assert_eq!(messenger(&["compile", "--arch", fast.to_str().unwrap(), "--pair", "0,0,0,3"], &d.join("o")), EXIT_INFEASIBLE);

    assert_eq!(messenger(&["verify", "--variant", "tm", "--pair", "0,0,3,3", "--drop-gate", "final-correction"], &d.join("o")), EXIT_VERIFICATION);
    assert_eq!(messenger(&["compile", "--program", d.join("missing").to_str().unwrap()], &d.join("o")), EXIT_IO);
    let blocker = d.join("file");
    fs::write(&blocker, "").unwrap();
    assert_eq!(messenger(&["cost"], &blocker.join("sub")), EXIT_IO);
}

#[test]
fn sweep_writes_matrix_and_contour() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(messenger(&["sweep", "--variant", "two-way"], dir.path()), EXIT_OK);
    let m = fs::read_to_string(dir.path().join("sweep_p1_two-way-belt.csv")).unwrap();
    let lines: Vec<&str> = m.lines().collect();
    assert_eq!(lines.len(), 51);
    assert!(lines.iter().all(|l| l.split(',').count() == 51));
    assert!(lines[0].starts_with("p1\\p2,1e-5,"));
    let c = fs::read_to_string(dir.path().join("contour_pr_two-way-belt.csv")).unwrap();
    assert!(c.starts_with("x,y\n") && c.lines().count() > 1);
}
