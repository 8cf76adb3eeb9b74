//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Duration;

use heatlab::report::{Row, SuiteReport};
use heatlab::suites::{run_suite, SuiteConfig, SUITES};

struct Outcome {
    pass: bool,
    detail: String,
}

fn first_failures(rep: &SuiteReport) -> String {
    let fails: Vec<&Row> = rep.failures().collect();
    let shown: Vec<String> = fails
        .iter()
        .take(3)
        .map(|r| {
            let p: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("{}[{}] {:.3e} vs {:.3e}", r.check, p.join(","), r.oracle, r.bound)
        })
        .collect();
    let more = fails.len().saturating_sub(shown.len());
    let mut s = shown.join("; ");
    if more > 0 {
        s.push_str(&format!("; +{more} more"));
    }
    s
}

fn run(name: &str, limit: Duration) -> Outcome {
    let cfg = SuiteConfig::new(name).expect("registered suite");
    match run_suite(&cfg) {
        Ok(rep) => {
            let in_time = rep.wall_time < limit;
            let ok_rows = rep.rows.iter().filter(|r| r.pass).count();
            let mut detail = format!(
                "{ok_rows}/{} checks, {:.2} s (limit {} s)",
                rep.rows.len(),
                rep.wall_time.as_secs_f64(),
                limit.as_secs()
            );
            if !rep.passed() {
                detail.push_str(&format!(": {}", first_failures(&rep)));
            }
            if !in_time {
                detail.push_str(": over time limit");
            }
            Outcome {
                pass: rep.passed() && in_time && !rep.rows.is_empty(),
                detail,
            }
        }
        Err(e) => Outcome {
            pass: false,
            detail: format!("aborted: {e}"),
        },
    }
}

fn main() -> ExitCode {
    let mut criteria: Vec<_> = SUITES.iter().filter(|s| s.criterion.is_some()).collect();
    criteria.sort_by_key(|s| s.criterion);
    let mut failed = 0;
    for s in criteria {
        let c = s.criterion.unwrap();
        let o = run(s.name, s.time_limit);
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {c:>2} ({}): {}", s.name, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
