//! Acceptance run: one PASS/FAIL line per criterion, each against its time budget.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::panic;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use support::checks;

struct Criterion {
    what: &'static str,
    budget: Duration,
    run: fn(),
}

fn stirling_golden() {
    let out = Command::new(env!("CARGO_BIN_EXE_laplace")).args(["stirling", "--terms", "6"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let got: Vec<&str> = text.lines().skip(1).map(|l| l.split_whitespace().nth(1).unwrap()).collect();
    assert_eq!(got, ["1", "1/12", "1/288", "-139/51840", "-571/2488320", "163879/209018880"]);
}

fn closed_forms() {
    checks::closed_forms_d1();
    checks::closed_forms_d2();
    checks::closed_forms_d3();
}

fn bell() {
    checks::bell_matches_brute_force();
    checks::bell_f6_3_identity();
}

fn inversion() {
    checks::inversion_composes_to_identity();
    checks::inversion_leading_coefficient();
}

fn order() {
    checks::order_contract();
    checks::factorial_integral_at_50();
}

fn cross_pathway() {
    checks::pathways_agree_on_quadratic_minima();
    checks::pathways_agree_on_quartic_minima();
    checks::pathways_agree_in_one_dimension();
}

fn properties() {
    checks::odd_coefficients_vanish();
    checks::rotation_invariance();
    checks::scaling_law();
    checks::substitution_round_trip();
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { what: "Stirling series, first six terms", budget: secs(1), run: stirling_golden },
        Criterion { what: "Laplace approximation, 10 fixtures", budget: secs(1), run: checks::laplace_approximation },
        Criterion { what: "closed forms for d <= 3, 50 fixtures", budget: secs(10), run: closed_forms },
        Criterion { what: "partial Bell polynomials", budget: secs(1), run: bell },
        Criterion { what: "series reversion", budget: secs(5), run: inversion },
        Criterion { what: "sphere moments", budget: secs(5), run: checks::sphere_moments_match_quadrature },
        Criterion { what: "remainder order against quadrature", budget: secs(60), run: order },
        Criterion { what: "cross-pathway agreement", budget: secs(30), run: cross_pathway },
        Criterion { what: "structural properties", budget: secs(30), run: properties },
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let ok = panic::catch_unwind(c.run).is_ok();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.budget;
        let verdict = if ok && in_time { "PASS" } else { "FAIL" };
        let note = if ok && !in_time { "  (over budget)" } else { "" };
        println!(
            "criterion {}: {verdict}  {:<40} {:>8.3}s / {}s{note}",
            i + 1,
            c.what,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
        if verdict == "FAIL" {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
