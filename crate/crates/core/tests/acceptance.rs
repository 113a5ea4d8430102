//! Runs every acceptance criterion and prints one pass/fail line per
//! criterion. The process fails if any criterion other than the known-red
//! unification one fails, or if that one fails for an undocumented reason.
//!
//! ```text
//! cargo test --test acceptance
//! ```

use std::process::ExitCode;

use intertype::acceptance::{render, run_all, unification_tallies, Settings};

/// Unification properties on arbitrary equation sets.
const KNOWN_RED: usize = 6;

fn main() -> ExitCode {
    let settings = Settings::default();
    let reports = run_all(&settings);
    print!("{}", render(&reports));
    let mut problems = Vec::new();
    if reports.iter().map(|r| r.id).ne(1..=11) {
        problems.push("criteria are not numbered 1 to 11".to_string());
    }
    for r in reports.iter().filter(|r| !r.passed && r.id != KNOWN_RED) {
        problems.push(format!("unexpected failure: {r}"));
    }

    // every disagreement on random sets is between two stuck forms, and
    // pseudo-derivation sets complete from →o to the →u normal form
    let (random, derived) = unification_tallies(&settings);
    let checks = [
        ("random →u order disagreements are stuck-only", random.u_orders == random.u_orders_stuck),
        ("random →o order disagreements are stuck-only", random.o_orders == random.o_orders_stuck),
        ("random nf(nfo) ≠ nf cases are stuck-only", random.o_then_u == random.o_then_u_stuck),
        ("random sets: →u never diverges", random.u_diverged == 0),
        ("random sets: →o never unblocks", random.unblocked == 0),
        ("derived →u order disagreements are stuck-only", derived.u_orders == derived.u_orders_stuck),
        ("derived →o order disagreements are stuck-only", derived.o_orders == derived.o_orders_stuck),
        ("derived sets: nf(nfo) = nf", derived.o_then_u == 0),
        ("derived sets: →o never unblocks", derived.unblocked == 0),
        ("derived sets: no divergence", derived.u_diverged + derived.o_diverged == 0),
    ];
    for (name, ok) in checks {
        println!("   {} {name}", if ok { "ok  " } else { "FAIL" });
        if !ok {
            problems.push(name.to_string());
        }
    }

    if problems.is_empty() {
        println!("acceptance: all criteria pass except the documented criterion {KNOWN_RED}");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {}", problems.join("; "));
        ExitCode::FAILURE
    }
}
