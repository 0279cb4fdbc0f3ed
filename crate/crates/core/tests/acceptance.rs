//! Acceptance suite: one pass/fail line per criterion.
//!
//! Lines go straight to the stdout handle, so they show without `--nocapture`.

mod common;

use std::io::Write;

use common::*;

fn report(line: String) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn criterion_7() -> Check {
    let parts = [
        ("metric axioms", metric_axioms(1000)),
        ("group law", group_law(64)),
        ("Rep monotonicity", rep_monotonicity(2000)),
        ("delta monotonicity", delta_monotonicity(32)),
        ("section injectivity", section_injectivity()),
        ("itinerary equivariance", itinerary_equivariance(16)),
        ("certificate re-verification", certificate_reverification()),
        ("JSON round trips", json_round_trips()),
        ("determinism", determinism()),
    ];
    let mut fails = Vec::new();
    for (name, r) in &parts {
        match r {
            Ok(d) => report(format!("    {name}: ok ({d})")),
            Err(e) => {
                report(format!("    {name}: FAIL ({e})"));
                fails.push(*name);
            }
        }
    }
    if fails.is_empty() {
        Ok(format!("{} property groups green", parts.len()))
    } else {
        Err(format!("failing: {}", fails.join(", ")))
    }
}

#[test]
fn acceptance() {
    let ln2 = std::f64::consts::LN_2;
    let criteria: Vec<(&str, Box<dyn Fn() -> Check>)> = vec![
        ("full-shift entropy", Box::new(move || {
            entropy_headline("suspension(full-2-shift, unit)", &[0.5, 0.25], &[4.0, 5.0, 6.0], ln2, 0.10)
        })),
        ("golden-mean entropy", Box::new(|| {
            entropy_headline("suspension(golden-mean-sft, unit)", &[0.5, 0.25], &[4.0, 6.0, 8.0], golden_oracle(), 0.15)
        })),
        ("cat-map certificate", Box::new(|| certify_cat(8))),
        ("singular discrimination", Box::new(singular_discrimination)),
        ("coding soundness", Box::new(coding_soundness)),
        ("specification reduction", Box::new(|| spec_reduction(100, 2024))),
        ("property suites", Box::new(criterion_7)),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let r = check();
        match &r {
            Ok(d) => report(format!("criterion {} ({name}): PASS: {d}", i + 1)),
            Err(e) => {
                report(format!("criterion {} ({name}): FAIL: {e}", i + 1));
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
