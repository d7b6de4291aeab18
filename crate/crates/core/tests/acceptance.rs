//! Acceptance criteria, one line per criterion. Run with
//! `cargo test -p skewbc --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use skewbc::diagnostics::{convergence_study, ConvergenceScenario};
use skewbc::verify::{
    bounds_suite, energy_rate_suite, boundary_term_suite, rotations_suite, sbp_suite, strong_suite, Check, DEFAULT_SEED,
};

struct Outcome {
    passed: bool,
    summary: String,
    failures: Vec<String>,
}

fn from_checks(checks: Vec<Check>) -> Outcome {
    let failures: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.to_string()).collect();
    let worst = checks
        .iter()
        .map(|c| format!("{} = {:.3e}", c.name, c.value))
        .take(3)
        .collect::<Vec<_>>()
        .join("; ");
    Outcome {
        passed: failures.is_empty() && !checks.is_empty(),
        summary: format!("{} checks, {} failed ({worst}{})", checks.len(), failures.len(), if checks.len() > 3 { "; ..." } else { "" }),
        failures,
    }
}

fn is_psi(c: &Check) -> bool {
    c.name.starts_with("psi") || c.name.contains("root of psi")
}

fn convergence() -> Outcome {
    let expected = [(2u32, 2.0), (4, 3.0)];
    match convergence_study::<f64>(ConvergenceScenario::FrozenIee, &[2, 4], &[21, 41, 81]) {
        Ok(table) => {
            let mut failures = Vec::new();
            let mut parts = Vec::new();
            for (k, &(order, target)) in expected.iter().enumerate() {
                let rates = &table.rates[k];
                parts.push(format!(
                    "order {order}: rates {}",
                    rates.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(", ")
                ));
                for r in rates {
                    if (r - target).abs() > 0.25 {
                        failures.push(format!("order {order} rate {r:.3} outside {target} +- 0.25"));
                    }
                }
            }
            Outcome {
                passed: failures.is_empty(),
                summary: parts.join("; "),
                failures,
            }
        }
        Err(e) => Outcome {
            passed: false,
            summary: format!("study failed: {e}"),
            failures: vec![e.to_string()],
        },
    }
}

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

fn main() -> ExitCode {
    let seed = DEFAULT_SEED;
    let criteria: Vec<Criterion> = vec![
        ("SBP property, orders 2/4/6, 11..101 nodes, < 1e-14", Box::new(|| from_checks(sbp_suite()))),
        (
            "diagonalization identities, 1000 states per variant, < 1e-12",
            Box::new(move || from_checks(rotations_suite(seed, 1000).into_iter().filter(|c| !is_psi(c)).collect())),
        ),
        (
            "boundary-term inequality, four cases, 1000 draws, slack >= -1e-12; Dirichlet CEE rejected",
            Box::new(move || from_checks(boundary_term_suite(seed, 1000))),
        ),
        (
            "energy-rate identity, 20 samples on 11x11, four systems, G = 0 and G != 0, < 1e-11",
            Box::new(move || from_checks(energy_rate_suite(seed))),
        ),
        (
            "energy bounds, homogeneous and inhomogeneous; violating preset exits 2",
            Box::new(move || from_checks(bounds_suite(seed))),
        ),
        (
            "psi switch: exact zero at (sqrt 2, 1), root at 0.8/0.84 within 1e-14",
            Box::new(move || from_checks(rotations_suite(seed, 1).into_iter().filter(is_psi).collect())),
        ),
        (
            "strong/weak round trip for every preset, < 1e-12",
            Box::new(move || from_checks(strong_suite(seed, 20))),
        ),
        ("convergence rates 2 and 3 on 21/41/81, +- 0.25", Box::new(convergence)),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {}: {verdict} {name} [{:.1}s] {}",
            k + 1,
            start.elapsed().as_secs_f64(),
            outcome.summary
        );
        for f in &outcome.failures {
            println!("    {f}");
        }
        if !outcome.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
