use proptest::prelude::*;

use skewbc::boundary::{check_r, preset_bc, BoundaryData, BoundarySpec, Mode, PresetContext, RegimeCondition};
use skewbc::diagnostics::{energy_rate_identity, physical_energy_norm};
use skewbc::equations::{boundary_rotation, characteristic_split, physical_form, EquationSpec, System, Variant};
use skewbc::linalg::Matrix;
use skewbc::sbp::{build_operator_set, build_sbp_1d, minimum_nodes, FaceId, Grid};
use skewbc::solver::{stable_dt, SemiDiscreteSystem};

fn order() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 4, 6])
}

fn normal() -> impl Strategy<Value = [f64; 2]> {
    (0.0..std::f64::consts::TAU).prop_map(|a| [a.cos(), a.sin()])
}

fn spec_for(system: System) -> EquationSpec<f64> {
    match system {
        System::Inse => EquationSpec::inse(0.01),
        other => EquationSpec::for_system(other),
    }
}

/// Conservative state from primitive draws in admissible ranges.
fn state(system: System, a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    let spec = spec_for(system);
    let prim = match system {
        System::Iee | System::Inse => vec![b, c, d],
        System::Swe => vec![0.2 + a, b, c],
        System::Cee => vec![0.2 + a, b, c, 0.2 + d.abs()],
    };
    spec.from_primitive(&prim).unwrap()
}

fn outflow(spec: &EquationSpec<f64>) -> Vec<BoundarySpec<f64>> {
    let name = match spec.system {
        System::Iee => "iee-pressure-outflow",
        System::Swe => "swe-outflow",
        System::Cee => "cee-outflow",
        System::Inse => "inse-stress-pressure-outflow",
    };
    FaceId::ALL
        .iter()
        .map(|&f| preset_bc(name, &PresetContext::new(spec.clone(), f, Mode::Weak)).unwrap())
        .collect()
}

fn variants(system: System) -> &'static [Variant] {
    match system {
        System::Iee => &[Variant::IeeChar],
        System::Swe => &[Variant::SwePrimitive, Variant::SweChar],
        System::Cee => &[Variant::CeeChar, Variant::CeeContracted],
        System::Inse => &[Variant::InseExtended],
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sbp_1d_operators(order in order(), extra in 0usize..40, h in 0.01f64..2.0) {
        let nodes = minimum_nodes(order).unwrap() + extra;
        let op = build_sbp_1d(order, nodes, h).unwrap();
        prop_assert!(op.sbp_residual() < 1e-13);
        prop_assert!(op.weights().iter().all(|&w| w > 0.0));
        let ones = vec![1.0; nodes];
        prop_assert!(op.apply(&ones).iter().all(|d| d.abs() < 1e-11 / h));
        for k in 1..=op.boundary_order() {
            let x: Vec<f64> = (0..nodes).map(|i| i as f64 * h).collect();
            let f: Vec<f64> = x.iter().map(|x| x.powi(k as i32)).collect();
            let d = op.apply(&f);
            let scale = (x[nodes - 1]).powi(k as i32 - 1).max(1.0);
            for (i, v) in d.iter().enumerate() {
                let exact = k as f64 * x[i].powi(k as i32 - 1);
                prop_assert!((v - exact).abs() < 1e-9 * scale * (nodes as f64), "k {k} node {i}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn too_few_nodes_rejected(order in order()) {
        let min = minimum_nodes(order).unwrap();
        prop_assert!(build_sbp_1d(order, min - 1, 0.1).is_err());
    }

    #[test]
    fn tensor_product_contract(order in order(), nx in 0usize..6, ny in 0usize..6, seed in any::<u64>()) {
        let min = minimum_nodes(order).unwrap();
        let grid = Grid::rectangle(min + nx, min + ny, (0.0, 1.0), (0.0, 2.0)).unwrap();
        let ops = build_operator_set(grid, order).unwrap();
        prop_assert!(ops.sbp_identity_residual().iter().all(|r| *r < 1e-13));
        for face in ops.faces() {
            prop_assert!(face.weights.iter().all(|&w| w > 0.0));
            let n: [f64; 2] = face.normal;
            prop_assert!((n[0].hypot(n[1]) - 1.0).abs() < 1e-15);
        }
        // constant in x, arbitrary in y
        let mut v = vec![0.0; ops.len()];
        let grid = ops.grid();
        for (g, slot) in v.iter_mut().enumerate() {
            let (_, j) = grid.ij(g);
            *slot = ((seed % 97) as f64 + 1.0) * (j as f64 * 0.7).sin();
        }
        prop_assert!(ops.apply_derivative(0, &v).iter().all(|d| d.abs() < 1e-10));
    }

    #[test]
    fn diagonalization_identity(
        system in prop::sample::select(vec![System::Iee, System::Swe, System::Cee, System::Inse]),
        a in 0.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0, d in -2.0f64..2.0,
        normal in normal(),
    ) {
        let spec = spec_for(system);
        let u = state(system, a, b, c, d);
        let expect = physical_form(&spec, &u, normal);
        for &variant in variants(system) {
            let Ok(rot) = boundary_rotation(&spec, &u, normal, variant) else {
                continue;
            };
            let got = rot.form();
            prop_assert!((got - expect).abs() <= 1e-12 * (1.0 + expect.abs()) * (1.0 + rot.w.iter().map(|w| w.abs()).fold(0.0, f64::max)),
                "{variant}: {got} vs {expect}");
            let split = characteristic_split(&rot, 1e-12);
            let mut all: Vec<usize> = split.minus.iter().chain(&split.plus).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..rot.lambda.len()).collect::<Vec<_>>());
            prop_assert!(split.lambda_minus.iter().all(|&l| l < 0.0));
        }
    }

    #[test]
    fn check_r_matches_eigenvalue(rows in 1usize..4, cols in 1usize..4, entries in prop::collection::vec(-1.5f64..1.5, 9)) {
        let r = Matrix::from_vec(rows, cols, entries[..rows * cols].to_vec());
        let report = check_r(&r);
        let min = report.min_eigenvalue.unwrap();
        let test = Matrix::identity(cols).sub(&r.transpose().matmul(&r));
        let (values, _) = test.symmetric_eigen();
        prop_assert!((values[0] - min).abs() < 1e-12);
        prop_assert_eq!(report.verdict.admissible(), min >= -1e-12);
    }

    #[test]
    fn energy_equals_entropy(
        system in prop::sample::select(vec![System::Iee, System::Swe, System::Cee, System::Inse]),
        amp in 0.0f64..0.5,
    ) {
        let spec = spec_for(system);
        let ops = build_operator_set(Grid::unit_square(11).unwrap(), 2).unwrap();
        let bcs = outflow(&spec);
        let sys = match SemiDiscreteSystem::new(spec.clone(), ops, bcs) {
            Ok(s) => s,
            Err(_) => return Ok(()),
        };
        let u = sys.initial_field(|[x, y]| state(system, 1.0 + amp * x, amp * y, 0.3, 1.0 + amp * x * y));
        let phi = spec.entropy_functionals(&u).phi;
        let integral: f64 = phi.iter().zip(sys.ops.volume_weights()).map(|(p, w)| p * w).sum();
        let energy = physical_energy_norm(&sys, &u);
        prop_assert!((integral - 0.5 * energy).abs() <= 1e-14 * (1.0 + energy));
    }

    #[test]
    fn iee_identity_ratio_is_scale_invariant(scale in 0.2f64..5.0, tilt in -0.3f64..0.3) {
        let spec = EquationSpec::<f64>::iee().with_kappa(1.0);
        let ops = build_operator_set(Grid::unit_square(11).unwrap(), 2).unwrap();
        let bcs = FaceId::ALL.iter().map(|&f| {
            BoundarySpec::new(f, Mode::Weak)
                .with_inflow(RegimeCondition::characteristic(Variant::IeeChar, 2, 1, BoundaryData::Zero))
                .with_outflow(RegimeCondition::characteristic(Variant::IeeChar, 1, 2, BoundaryData::Zero))
        }).collect();
        let sys = SemiDiscreteSystem::new(spec, ops, bcs).unwrap();
        let base = sys.initial_field(|[x, y]| vec![1.0 + tilt * y, 0.5 + tilt * x, 1.0 + 0.2 * x * y]);
        let scaled = base.scaled(scale);
        let a = energy_rate_identity(&sys, &base, 0.0).unwrap();
        let b = energy_rate_identity(&sys, &scaled, 0.0).unwrap();
        prop_assert!((a.rate / a.balance + 1.0).abs() < 1e-12);
        prop_assert!((a.rate / a.balance - b.rate / b.balance).abs() < 1e-12);
    }

    #[test]
    fn stable_dt_positive(
        system in prop::sample::select(vec![System::Iee, System::Swe, System::Cee]),
        b in 0.2f64..1.0, c in 0.2f64..1.0, cfl in 0.05f64..1.0,
    ) {
        let spec = spec_for(system);
        let ops = build_operator_set(Grid::unit_square(11).unwrap(), 2).unwrap();
        let bcs = outflow(&spec);
        let Ok(sys) = SemiDiscreteSystem::new(spec, ops, bcs) else {
            return Ok(());
        };
        let u = sys.initial_field(|_| state(system, 1.0, b, c, 1.0));
        let dt = stable_dt(&sys, &u, cfl).unwrap();
        prop_assert!(dt > 0.0 && dt.is_finite());
        let half = stable_dt(&sys, &u, 0.5 * cfl).unwrap();
        prop_assert!((half - 0.5 * dt).abs() <= 1e-14 * dt);
    }
}
