//! End-to-end acceptance run: one PASS/FAIL line per criterion. Runs
//! without the test harness so the lines are printed on every run.
//!
//! The check groups come from the library; the thresholds and runtime
//! budgets below are set here, independently of the limits the library
//! attaches to its own measurements.

use std::process::Command;
use std::time::{Duration, Instant};

use starga::suite::{run_group, GroupReport, SuiteConfig};

const SEED: u64 = 20_240_611;

struct Outcome {
    id: u8,
    title: &'static str,
    problems: Vec<String>,
    elapsed: Duration,
}

/// Threshold for a named measurement of a criterion. `None` means the
/// measurement is not recognized, which is itself a failure.
fn threshold(id: u8, name: &str) -> Option<f64> {
    let has = |s: &str| name.contains(s);
    match id {
        1 | 2 | 3 | 5 => Some(0.0),
        4 if has("annihilates") => Some(0.0),
        4 if has("oscillator flow") => Some(1e-12),
        6 if has("christoffel") => Some(1e-8),
        6 if has("|K - 1|") || has("|K - 1/4|") => Some(1e-6),
        6 if has("structure equation") || has("Bianchi") => Some(1e-6),
        7 if has("Omega = dH") || has("h_{F,G}") => Some(1e-10),
        7 if has("J) . J") || has("momentum map") => Some(0.0),
        7 if has("circle action") => Some(1e-9),
        8 if has("Casimir") => Some(1e-10),
        8 if has("energy") => Some(1e-8),
        8 if has("spatial angular momentum") => Some(1e-6),
        8 if has("Poincare") => Some(1e-6),
        8 if has("reversal") => Some(1e-8),
        8 if has("rotor normalization") => Some(1e-9),
        _ => None,
    }
}

/// Measurements every criterion must contain, so a group that silently
/// drops a check cannot pass.
fn required(id: u8) -> &'static [&'static str] {
    match id {
        1 => &["associativity", "grade structure", "reversion"],
        2 => &["basis products", "quaternion units", "vector product split (100 pairs)"],
        3 => &["so3", "lorentz (nonstandard)", "lorentz (standard)", "u(1)", "u(2)", "u(3)", "gl(1)", "gl(2)", "gl(3)"],
        4 => &["annihilates", "t = pi/4", "t = pi/2"],
        5 => &["canonical relations", "equations of motion (20", "BRST conservation and nilpotency (20"],
        6 => &["christoffel", "|K - 1|", "curvature structure", "torsion structure", "Bianchi", "|K - 1/4|"],
        7 => &["Omega = dH", "h_{F,G}", "J) . J", "momentum map", "circle action"],
        8 => &["Casimir", "energy", "spatial angular momentum", "Poincare", "reversal"],
        _ => &[],
    }
}

fn judge(id: u8, title: &'static str, budget: Option<Duration>) -> Outcome {
    let cfg = SuiteConfig { seed: SEED, ..SuiteConfig::default() };
    let start = Instant::now();
    let result = run_group(id, &cfg);
    let elapsed = start.elapsed();
    let mut problems = Vec::new();
    match result {
        Err(e) => problems.push(format!("error: {e}")),
        Ok(report) => check_report(id, &report, &mut problems),
    }
    if let Some(b) = budget {
        if elapsed > b {
            problems.push(format!("runtime {elapsed:?} exceeds {b:?}"));
        }
    }
    Outcome { id, title, problems, elapsed }
}

fn check_report(id: u8, report: &GroupReport, problems: &mut Vec<String>) {
    for need in required(id) {
        if !report.measurements.iter().any(|m| m.name.contains(need)) {
            problems.push(format!("missing measurement `{need}`"));
        }
    }
    if id == 1 {
        for sig in ["euclidean:2", "euclidean:3", "euclidean:4", "minkowski-nonstd:4", "symplectic:2", "symplectic:4"] {
            let n = report.measurements.iter().filter(|m| m.name.starts_with(&format!("{sig}:"))).count();
            if n != 3 {
                problems.push(format!("signature {sig} has {n} of 3 checks"));
            }
        }
    }
    for m in &report.measurements {
        match threshold(id, &m.name) {
            None => problems.push(format!("unrecognized measurement `{}`", m.name)),
            // NaN fails too
            Some(t) if m.value <= t => {}
            Some(t) => problems.push(format!("{} = {:e} > {:e}", m.name, m.value, t)),
        }
    }
}

fn determinism() -> Outcome {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_starga");
    let seed = SEED.to_string();
    let runs: [&[&str]; 5] = [
        &["property-suite", "--group", "2", "--group", "5", "--group", "7"],
        &["algebra", "lorentz:std"],
        &["brst", "--preset", "cubic"],
        &["geometry", "--chart", "torus:2:1", "--grid", "8", "--format", "csv"],
        &[
            "rigid-body",
            "--inertia",
            "1,2,3",
            "--L0",
            "0.7,-0.4,0.5",
            "--dt",
            "1e-2",
            "--steps",
            "500",
            "--format",
            "csv",
        ],
    ];
    let mut problems = Vec::new();
    for args in runs {
        let run = || Command::new(bin).args(args).args(["--seed", &seed]).output().expect("binary runs");
        let (a, b) = (run(), run());
        if !a.status.success() {
            problems.push(format!("{args:?} exited with {}", a.status));
        }
        if a.stdout.is_empty() || a.stdout != b.stdout || a.stderr != b.stderr || a.status != b.status {
            problems.push(format!("{args:?} output differs between runs"));
        }
    }
    Outcome { id: 9, title: "Determinism of CLI output", problems, elapsed: start.elapsed() }
}

fn main() {
    let secs = Duration::from_secs;
    let outcomes = vec![
        judge(1, "Clifford kernel exactness", Some(secs(60))),
        judge(2, "Basic product identities", None),
        judge(3, "Bivector algebra closure", None),
        judge(4, "Active/passive consistency", None),
        judge(5, "BRST suite", Some(secs(120))),
        judge(6, "Geometry residuals on the sphere", None),
        judge(7, "Symplectic suite", None),
        judge(8, "Rigid body conservation", Some(secs(10))),
        determinism(),
    ];
    let mut failed = Vec::new();
    for o in &outcomes {
        let verdict = if o.problems.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {}: {verdict}  {} ({:.2} s)", o.id, o.title, o.elapsed.as_secs_f64());
        for p in &o.problems {
            println!("    {p}");
        }
        if !o.problems.is_empty() {
            failed.push(o.id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
