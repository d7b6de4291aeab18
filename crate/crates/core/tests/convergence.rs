use skewbc::diagnostics::{convergence_study, ConvergenceScenario};

#[test]
fn viscous_frozen_rates_near_two() {
    let table = convergence_study::<f64>(ConvergenceScenario::FrozenInse, &[2], &[11, 21, 41]).unwrap();
    assert!(table.non_monotone.is_empty());
    for r in &table.rates[0] {
        assert!((r - 2.0).abs() < 0.25, "{r}");
    }
}
