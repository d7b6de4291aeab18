use std::sync::Arc;

use crate::boundary::{BoundaryData, BoundarySpec, Mode, ReferenceState, RegimeCondition};
use crate::equations::{EquationSpec, Variant};
use crate::error::{Error, Result};
use crate::sbp::{build_operator_set, FaceId, Grid};
use crate::scalar::Real;
use crate::solver::{run, weighted_energy, SemiDiscreteSystem, TimeStepping};

/// Linear problems with a known exact solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvergenceScenario {
    /// Frozen-coefficient incompressible Euler, V = (1, 1/2), κ = 1, with a
    /// manufactured solution and characteristic data from it.
    FrozenIee,
    /// The same with viscosity ε = 0.05, the extended viscous variant and
    /// data that includes the exact shear.
    FrozenInse,
}

impl ConvergenceScenario {
    pub fn name(self) -> &'static str {
        match self {
            ConvergenceScenario::FrozenIee => "frozen-iee",
            ConvergenceScenario::FrozenInse => "frozen-inse",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [ConvergenceScenario::FrozenIee, ConvergenceScenario::FrozenInse]
            .into_iter()
            .find(|c| c.name() == s)
    }
}

/// Errors and observed rates, indexed `[order][resolution]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateTable<T> {
    pub orders: Vec<u32>,
    pub resolutions: Vec<usize>,
    pub errors: Vec<Vec<T>>,
    /// log(e_k/e_{k+1}) / log(h_k/h_{k+1}); one fewer entry than resolutions.
    pub rates: Vec<Vec<T>>,
    /// Orders whose error sequence does not decrease.
    pub non_monotone: Vec<u32>,
}

const T_END: f64 = 0.5;

struct Manufactured<T> {
    v: [T; 2],
    kappa: T,
    epsilon: T,
}

impl<T: Real> Manufactured<T> {
    // u = sin(2x + y − t), v = cos(x − 2y + t), p = sin(x + y + 2t)
    fn exact(&self, [x, y]: [T; 2], t: T) -> Vec<T> {
        let two = T::lit(2.0);
        vec![
            (two * x + y - t).sin(),
            (x - two * y + t).cos(),
            (x + y + two * t).sin(),
        ]
    }

    /// (∂_t, ∂_x, ∂_y) of each component, plus the Laplacian.
    fn derivatives(&self, [x, y]: [T; 2], t: T) -> [[T; 4]; 3] {
        let two = T::lit(2.0);
        let a = two * x + y - t;
        let b = x - two * y + t;
        let c = x + y + two * t;
        let five = T::lit(5.0);
        [
            [-a.cos(), two * a.cos(), a.cos(), -five * a.sin()],
            [-b.sin(), -b.sin(), two * b.sin(), -five * b.cos()],
            [two * c.cos(), c.cos(), c.cos(), -two * c.sin()],
        ]
    }

    fn forcing(&self, x: [T; 2], t: T) -> Vec<T> {
        let d = self.derivatives(x, t);
        let [v1, v2] = self.v;
        let adv = |k: usize| d[k][0] + v1 * d[k][1] + v2 * d[k][2];
        vec![
            adv(0) + d[2][1] - self.epsilon * d[0][3],
            adv(1) + d[2][2] - self.epsilon * d[1][3],
            self.kappa * d[2][0] + d[0][1] + d[1][2],
        ]
    }

    fn reference(&self, x: [T; 2], t: T) -> ReferenceState<T> {
        let d = self.derivatives(x, t);
        ReferenceState {
            u: self.exact(x, t),
            gradients: Some(vec![
                (0..3).map(|k| d[k][1]).collect(),
                (0..3).map(|k| d[k][2]).collect(),
            ]),
        }
    }
}

fn build<T: Real>(
    scenario: ConvergenceScenario,
    order: u32,
    nodes: usize,
) -> Result<(SemiDiscreteSystem<T>, Arc<Manufactured<T>>)> {
    let v = [T::one(), T::lit(0.5)];
    let (epsilon, variant) = match scenario {
        ConvergenceScenario::FrozenIee => (T::zero(), Variant::IeeChar),
        ConvergenceScenario::FrozenInse => (T::lit(0.05), Variant::InseExtended),
    };
    let mut spec = match scenario {
        ConvergenceScenario::FrozenIee => EquationSpec::iee(),
        ConvergenceScenario::FrozenInse => EquationSpec::inse(epsilon),
    }
    .with_kappa(T::one())
    .frozen(vec![v[0], v[1], T::zero()]);
    spec.epsilon = epsilon;
    let m = Arc::new(Manufactured {
        v,
        kappa: spec.kappa,
        epsilon,
    });
    let ops = build_operator_set(Grid::unit_square(nodes)?, order)?;
    let (m_in, m_out) = if variant == Variant::InseExtended { ((2, 2), (2, 2)) } else { ((2, 1), (1, 2)) };
    let bcs = FaceId::ALL
        .iter()
        .map(|&f| {
            let mr = m.clone();
            let data = BoundaryData::Reference(Arc::new(move |x, t| mr.reference(x, t)));
            BoundarySpec::new(f, Mode::Weak)
                .with_inflow(RegimeCondition::characteristic(variant, m_in.0, m_in.1, data.clone()))
                .with_outflow(RegimeCondition::characteristic(variant, m_out.0, m_out.1, data))
        })
        .collect();
    let mf = m.clone();
    let sys = SemiDiscreteSystem::new(spec, ops, bcs)?.with_forcing(Arc::new(move |x, t| mf.forcing(x, t)));
    Ok((sys, m))
}

/// Error of one run in the evolved norm.
fn solve<T: Real>(scenario: ConvergenceScenario, order: u32, nodes: usize) -> Result<T> {
    let (sys, m) = build::<T>(scenario, order, nodes)?;
    let u0 = sys.initial_field(|x| m.exact(x, T::zero()));
    let h = sys.ops.min_spacing();
    let t_end = T::lit(T_END);
    let mut dt = T::lit(0.25) * h;
    if sys.equation.epsilon > T::zero() {
        dt = dt.min(T::lit(0.05) * h * h / sys.equation.epsilon);
    }
    let out = run(&sys, &u0, t_end, TimeStepping::Fixed(dt), usize::MAX)?;
    if let Some(e) = out.abort {
        return Err(e);
    }
    let exact = sys.initial_field(|x| m.exact(x, out.time));
    let diff = out.state.axpy(-T::one(), &exact);
    Ok(weighted_energy(&sys.ops, &sys.equation.evolution_diag(), &diff).sqrt())
}

/// Runs every (order, resolution) pair and reports observed rates.
pub fn convergence_study<T: Real>(
    scenario: ConvergenceScenario,
    orders: &[u32],
    resolutions: &[usize],
) -> Result<RateTable<T>> {
    if resolutions.is_empty() || orders.is_empty() {
        return Err(Error::InvalidParameter("empty order or resolution list".into()));
    }
    let mut errors = Vec::new();
    let mut rates = Vec::new();
    let mut non_monotone = Vec::new();
    for &order in orders {
        let errs = resolutions
            .iter()
            .map(|&n| solve::<T>(scenario, order, n))
            .collect::<Result<Vec<T>>>()?;
        let r: Vec<T> = (1..errs.len())
            .map(|k| {
                let hr = T::from(resolutions[k] - 1).unwrap() / T::from(resolutions[k - 1] - 1).unwrap();
                if errs[k] == errs[k - 1] {
                    T::zero()
                } else {
                    (errs[k - 1] / errs[k]).ln() / hr.ln()
                }
            })
            .collect();
        if errs.windows(2).any(|w| w[1] >= w[0]) && errs.len() > 1 {
            non_monotone.push(order);
        }
        errors.push(errs);
        rates.push(r);
    }
    Ok(RateTable {
        orders: orders.to_vec(),
        resolutions: resolutions.to_vec(),
        errors,
        rates,
        non_monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manufactured_forcing_matches_difference_quotients() {
        let m = Manufactured {
            v: [1.0, 0.5],
            kappa: 1.0,
            epsilon: 0.0,
        };
        let x = [0.3, 0.7];
        let t = 0.2;
        let h = 1e-5;
        let d = |f: &dyn Fn(f64) -> Vec<f64>| {
            let (a, b) = (f(h), f(-h));
            a.iter().zip(b).map(|(p, q)| (p - q) / (2.0 * h)).collect::<Vec<_>>()
        };
        let ut = d(&|e| m.exact(x, t + e));
        let ux = d(&|e| m.exact([x[0] + e, x[1]], t));
        let uy = d(&|e| m.exact([x[0], x[1] + e], t));
        let f = m.forcing(x, t);
        let expect = [
            ut[0] + ux[0] + 0.5 * uy[0] + ux[2],
            ut[1] + ux[1] + 0.5 * uy[1] + uy[2],
            ut[2] + ux[0] + uy[1],
        ];
        for k in 0..3 {
            assert!((f[k] - expect[k]).abs() < 1e-8);
        }
    }

    #[test]
    fn identical_resolutions_give_unit_ratio() {
        let table = convergence_study::<f64>(ConvergenceScenario::FrozenIee, &[2], &[11, 11]).unwrap();
        assert_eq!(table.errors[0][0], table.errors[0][1]);
        assert_eq!(table.non_monotone, vec![2]);
    }
}
