//! Runs every acceptance criterion and prints one line per criterion, then
//! checks that a corrupted quasilinear profile is caught by the
//! quasilinear criterion alone.

use pflab::harness::acceptance::{run, AcceptanceContext, Level};
use pflab::solvers::QuasilinearProfile;
use std::process::ExitCode;

fn main() -> ExitCode {
    let level = match std::env::var("PFLAB_ACCEPT_LEVEL").as_deref() {
        Ok("full") => Level::Full,
        _ => Level::Quick,
    };
    println!("acceptance suite ({level:?})");
    let summary = run(level, &AcceptanceContext::default());
    for r in &summary.results {
        println!("{r}");
    }
    let mut ok = summary.all_passed();
    let ids: Vec<&str> = summary.results.iter().map(|r| r.id.as_str()).collect();
    for id in ["1", "2", "3", "4", "5", "6", "7", "8", "9", "10"] {
        if !ids.contains(&id) {
            println!("criterion {id} missing from the summary");
            ok = false;
        }
    }

    println!("fault injection: negated xi");
    let corrupted = QuasilinearProfile::minimal_surface();
    let negated = {
        let base = corrupted.clone();
        corrupted.with_xi("negated_xi", move |s| -base.xi(s))
    };
    let faulty = run(Level::Quick, &AcceptanceContext { profile: negated });
    let c2 = faulty.get("2").is_some_and(|r| r.passed);
    let c3 = faulty.get("3").is_some_and(|r| r.passed);
    println!("  criterion 2 (semilinear) passed: {c2}");
    println!("  criterion 3 (quasilinear) passed: {c3}");
    if !c2 || c3 {
        println!("  fault injection not isolated to the quasilinear criterion");
        ok = false;
    }

    if ok {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
