//! Acceptance checks, one PASS/FAIL line per criterion.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use hartogs::moments::norm_sq_formula;
use hartogs::report::Check;
use hartogs::suite::{self, DEFAULT_EPS_LEVELS};

const SEED: u64 = 20240607;

/// Criteria whose failure is expected, with the reason printed on the line.
const KNOWN_UNATTAINABLE: &[(u8, &str)] = &[(
    8,
    "schur check at epsilon = 1 is outside (0, 1): the w-integral diverges for every z",
)];

struct Line {
    id: u8,
    title: &'static str,
    budget: Duration,
    checks: Vec<Check>,
    elapsed: Duration,
}

fn timed(id: u8, title: &'static str, budget_s: u64, f: impl FnOnce() -> Vec<Check>) -> Line {
    let start = Instant::now();
    let checks = f();
    Line { id, title, budget: Duration::from_secs(budget_s), checks, elapsed: start.elapsed() }
}

fn verify_fast() -> Vec<Check> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_hartogs")).args(["verify", "--suite", "fast"]).output();
    let elapsed = start.elapsed();
    match out {
        Ok(o) => vec![Check::new(
            "verify --suite fast",
            o.status.success() && elapsed < Duration::from_secs(60),
            "exit 0 within 60 s",
            format!("exit {:?} in {:.1} s", o.status.code(), elapsed.as_secs_f64()),
            String::from_utf8_lossy(&o.stderr).trim().to_string(),
        )],
        Err(err) => vec![Check::new("verify --suite fast", false, "exit 0", "spawn failed", err.to_string())],
    }
}

fn main() -> ExitCode {
    let lines = vec![
        timed(1, "range identities", 5, || vec![suite::range_identities(SEED)]),
        timed(2, "hartogs triangle endpoints", 1, || vec![suite::triangle_endpoints()]),
        timed(3, "norm oracle", 30, || vec![suite::norm_oracle(&[(1, 1), (2, 1), (3, 2), (5, 3)], 12, norm_sq_formula)]),
        timed(4, "diagonality", 60, suite::diagonality),
        timed(5, "sharpness thresholds", 120, || vec![suite::sharpness(DEFAULT_EPS_LEVELS)]),
        timed(6, "smoothing arithmetic", 1, || vec![suite::smoothing_arithmetic(SEED)]),
        timed(7, "kernel estimate evidence", 60, || suite::kernel_evidence(SEED)),
        timed(8, "disc lemma and schur trends", 60, suite::schur_trends),
        timed(9, "|w2|^(A-2n) integral", 1, || vec![suite::remark_29()]),
        timed(10, "verify --suite fast", 60, verify_fast),
    ];

    let mut unexpected = 0;
    for line in &lines {
        // informational checks are reported but do not decide the line
        let deciding: Vec<&Check> = line.checks.iter().filter(|c| !c.name.contains("[informational]")).collect();
        let slow = line.elapsed > line.budget;
        let pass = !deciding.is_empty() && deciding.iter().all(|c| c.pass) && !slow;
        let known = KNOWN_UNATTAINABLE.iter().find(|(id, _)| *id == line.id);
        let status = if pass { "PASS" } else { "FAIL" };
        let mut note = String::new();
        if slow {
            note.push_str(&format!(" (over {} s budget)", line.budget.as_secs()));
        }
        match (pass, known) {
            (false, Some((_, why))) => note.push_str(&format!(" [known unattainable: {why}]")),
            (false, None) => unexpected += 1,
            (true, Some(_)) => note.push_str(" [expected failure now passes]"),
            _ => {}
        }
        println!("{status} {:>2} {} ({:.2} s){note}", line.id, line.title, line.elapsed.as_secs_f64());
        for c in &line.checks {
            println!(
                "       {} {}: measured {} | tolerance {} | {}",
                if c.pass { "ok  " } else { "fail" },
                c.name,
                c.measured,
                c.tolerance,
                c.detail
            );
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} unexpected failure(s)");
        ExitCode::FAILURE
    }
}
