//! The eight acceptance criteria at default grids. Prints one line per
//! criterion and exits non-zero when any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use jeft::verify::{run_one, Check, VerificationReport, VerifyConfig};
use jeft::Model;

type Criterion = (&'static str, fn() -> Outcome);

const MODELS: [Model; 2] = [Model::H2, Model::H3];

struct Outcome {
    pass: bool,
    detail: String,
}

fn checked(check: Check) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for model in MODELS {
        let config = VerifyConfig::defaults(model);
        match run_one(&config, check) {
            Ok(r) => {
                pass &= r.succeeded();
                detail.push(summary(model, &r));
            }
            Err(e) => {
                pass = false;
                detail.push(format!("{model}: error {e}"));
            }
        }
    }
    Outcome { pass, detail: detail.join("; ") }
}

fn summary(model: Model, r: &VerificationReport) -> String {
    let failed: Vec<&str> = r.conditions.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect();
    let mut s = format!(
        "{model}: err {:.2e} (tol {:.0e}), {} conditions, {:.1} s",
        r.max_rel_error,
        r.tolerance,
        r.conditions.len(),
        r.wall_time.as_secs_f64()
    );
    if !failed.is_empty() {
        s.push_str(&format!(", failed: {}", failed.join(", ")));
    }
    s
}

fn lemma2_with_budget() -> Outcome {
    const BUDGET: Duration = Duration::from_secs(300);
    let start = Instant::now();
    let mut out = checked(Check::Lemma2);
    let elapsed = start.elapsed();
    if elapsed > BUDGET {
        out.pass = false;
    }
    out.detail.push_str(&format!("; total {:.1} s (budget {} s)", elapsed.as_secs_f64(), BUDGET.as_secs()));
    out
}

fn verify_manifest(dir: &Path, tag: &str, args: &[&str]) -> Result<Vec<u8>, String> {
    let path = dir.join(format!("{tag}.json"));
    let status = Command::new(env!("CARGO_BIN_EXE_jeft"))
        .arg("verify")
        .args(args)
        .arg("--out")
        .arg(&path)
        .stderr(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    // 1 means a check failed, which is fine here: only the bytes matter.
    if !matches!(status.code(), Some(0 | 1)) {
        return Err(format!("{tag}: exit {status}"));
    }
    std::fs::read(&path).map_err(|e| format!("{tag}: {e}"))
}

fn determinism() -> Outcome {
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return Outcome { pass: false, detail: e.to_string() },
    };
    let runs: [(&str, &[&str]); 2] = [
        ("h2", &["--model", "h2", "--profile", "reduced"]),
        ("h3", &["--model", "h3", "--profile", "reduced"]),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (model, base) in runs {
        let with = |threads: &'static str| [base, &["--threads", threads]].concat();
        let manifests = [
            verify_manifest(dir.path(), &format!("{model}-a"), &with("1")),
            verify_manifest(dir.path(), &format!("{model}-b"), &with("1")),
            verify_manifest(dir.path(), &format!("{model}-c"), &with("4")),
        ];
        match manifests {
            [Ok(a), Ok(b), Ok(c)] => {
                let same = a == b && a == c;
                pass &= same;
                detail.push(format!("{model}: {} bytes, {}", a.len(), if same { "identical" } else { "DIFFER" }));
            }
            other => {
                pass = false;
                for e in other.into_iter().filter_map(|m| m.err()) {
                    detail.push(e);
                }
            }
        }
    }
    Outcome { pass, detail: detail.join("; ") }
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 direct and composed transforms agree", lemma2_with_budget),
        ("2 radial restriction to the spherical transform", || checked(Check::Lemma1)),
        ("3 kernel factorization", || checked(Check::Kernel)),
        ("4 joint eigenfunctions", || checked(Check::Eigen)),
        ("5 Plancherel and inversion", || checked(Check::Plancherel)),
        ("6 exponential type", || checked(Check::PaleyWiener)),
        ("7 convolution factorization", || checked(Check::Convolution)),
        ("8 determinism", determinism),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let out = run();
        if !out.pass {
            failures += 1;
        }
        println!("[{}] {name}: {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
