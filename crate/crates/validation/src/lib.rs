//! Harness for the acceptance suite. Each criterion runs in isolation, is
//! timed against its budget, and reports exactly one PASS or FAIL line; a
//! panic inside a criterion is reported as a failure of that criterion only.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

/// Result of one criterion, before its runtime is checked.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub budget: Option<Duration>,
    pub run: fn() -> Verdict,
}

/// Outcome of a criterion after timing.
#[derive(Clone, Debug)]
pub struct Report {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub elapsed: Duration,
    pub detail: String,
}

impl Report {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} [{}] ({:.2} s): {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

pub fn evaluate(c: &Criterion) -> Report {
    let start = Instant::now();
    let verdict = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Verdict::new(false, format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let mut pass = verdict.pass;
    let mut detail = verdict.detail;
    if let Some(budget) = c.budget {
        if elapsed > budget {
            pass = false;
            detail = format!("{detail}; over budget of {} s", budget.as_secs());
        }
    }
    Report { id: c.id, name: c.name, pass, elapsed, detail }
}

/// Runs every criterion in order, printing one line each, and returns the
/// reports.
pub fn run_all(criteria: &[Criterion]) -> Vec<Report> {
    criteria
        .iter()
        .map(|c| {
            let r = evaluate(c);
            println!("{}", r.line());
            r
        })
        .collect()
}
