use crate::boundary::penalty_stiffness;
use crate::diagnostics::{EnergyReport, Monitor};
use crate::equations::rotation_from_z;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

use super::{semi_discrete_rhs, semi_discrete_rhs_detailed, RhsOutput, SemiDiscreteSystem, StateField};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeStepping<T> {
    Fixed(T),
    /// dt from [`stable_dt`] at every step.
    Cfl(T),
}

/// Classical four-stage Runge–Kutta step. Strong faces are re-imposed on
/// every stage value and on the result.
pub fn rk4_step<T: Real>(system: &SemiDiscreteSystem<T>, u: &StateField<T>, t: T, dt: T) -> Result<StateField<T>> {
    let k1 = semi_discrete_rhs(system, u, t)?;
    rk4_from(system, u, &k1, t, dt)
}

fn rk4_from<T: Real>(
    system: &SemiDiscreteSystem<T>,
    u: &StateField<T>,
    k1: &StateField<T>,
    t: T,
    dt: T,
) -> Result<StateField<T>> {
    let half = T::lit(0.5);
    let stage = |k: &StateField<T>, w: T, ts: T| -> Result<StateField<T>> {
        let mut v = u.axpy(w, k);
        system.impose_strong(&mut v, ts)?;
        Ok(v)
    };
    let k2 = semi_discrete_rhs(system, &stage(k1, half * dt, t + half * dt)?, t + half * dt)?;
    let k3 = semi_discrete_rhs(system, &stage(&k2, half * dt, t + half * dt)?, t + half * dt)?;
    let k4 = semi_discrete_rhs(system, &stage(&k3, dt, t + dt)?, t + dt)?;
    let sixth = dt / T::lit(6.0);
    let two = T::lit(2.0);
    let mut next = u.clone();
    for (i, v) in next.data_mut().iter_mut().enumerate() {
        let inc = k1.data()[i] + two * k2.data()[i] + two * k3.data()[i] + k4.data()[i];
        *v = *v + sixth * inc;
    }
    system.impose_strong(&mut next, t + dt)?;
    Ok(next)
}

/// dt = cfl · h_min / max(ρ + 2ε/h_min, μ h_min).
///
/// ρ is the larger of the catalog |λ| over boundary nodes and the spectral
/// radius of P_eff^{-1/2} (A_i + A_iᵀ) P_eff^{-1/2} over all nodes; μ is
/// the penalty stiffness of the weak faces.
pub fn stable_dt<T: Real>(system: &SemiDiscreteSystem<T>, u: &StateField<T>, cfl: T) -> Result<T> {
    if !(cfl > T::zero()) {
        return Err(Error::InvalidParameter(format!("cfl must be positive, got {cfl}")));
    }
    let spec = &system.equation;
    let ops = &system.ops;
    let n = spec.n();
    let h = ops.min_spacing();
    let scale: Vec<T> = spec.evolution_diag().iter().map(|p| T::one() / p.sqrt()).collect();
    let mut rho = T::zero();
    let mut a = [[T::zero(); 4]; 4];
    let mut point = vec![T::zero(); n];
    let frozen = spec.is_frozen();
    let nodes = if frozen { 1 } else { ops.len() };
    for g in 0..nodes {
        u.node_into(g, &mut point);
        for axis in 0..ops.dimension() {
            spec.fill_flux(axis, &point, &mut a);
            let mut m = Matrix::zeros(n, n);
            for r in 0..n {
                for c in 0..n {
                    m[(r, c)] = (a[r][c] + a[c][r]) * scale[r] * scale[c];
                }
            }
            rho = rho.max(m.spectral_norm());
        }
    }
    for face in ops.faces() {
        let Some(bc) = system.boundary(face.id) else {
            continue;
        };
        for &g in &face.nodes {
            u.node_into(g, &mut point);
            let Ok(regime) = bc.regime(spec, &point, face.normal) else {
                continue;
            };
            let Ok(cond) = bc.condition(regime) else {
                continue;
            };
            let mut z = spec.rotate(&point, face.normal);
            if z.len() < cond.variant.z_len(n) {
                z.resize(cond.variant.z_len(n), T::zero());
            }
            if let Ok(rot) = rotation_from_z(spec, cond.variant, &z, face.normal) {
                for l in rot.lambda {
                    rho = rho.max(l.abs());
                }
            }
        }
    }
    // the penalty acts like a relaxation of rate μ on boundary nodes
    let mu = penalty_stiffness(spec, ops, &system.boundaries, u, T::zero());
    let speed = (rho + T::lit(2.0) * spec.epsilon / h).max(mu * h);
    if !(speed > T::zero()) {
        return Err(Error::InvalidParameter(
            "zero wave speed and no viscosity; configure a fixed dt".into(),
        ));
    }
    Ok(cfl * h / speed)
}

/// A CFL step below this fraction of the first step aborts the run.
pub const STEP_COLLAPSE: f64 = 1e-4;

/// Final state and energy history of a run.
#[derive(Clone, Debug)]
pub struct RunOutput<T> {
    pub state: StateField<T>,
    pub time: T,
    pub steps: usize,
    pub report: EnergyReport<T>,
    /// Set when the run stopped early.
    pub abort: Option<Error>,
}

/// Advances `u0` to `t_end`, sampling the monitors at step 0, every
/// `cadence` steps and at the final time. A zero-length run takes no samples.
pub fn run<T: Real>(
    system: &SemiDiscreteSystem<T>,
    u0: &StateField<T>,
    t_end: T,
    stepping: TimeStepping<T>,
    cadence: usize,
) -> Result<RunOutput<T>> {
    if t_end < T::zero() {
        return Err(Error::InvalidParameter(format!("t_end must be non-negative, got {t_end}")));
    }
    if let TimeStepping::Fixed(dt) = stepping {
        if !(dt > T::zero()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
    }
    let cadence = cadence.max(1);
    let mut u = u0.clone();
    system.impose_strong(&mut u, T::zero())?;
    let mut monitor = Monitor::new(system, &u);
    let mut t = T::zero();
    let mut steps = 0usize;
    let mut current: RhsOutput<T> = semi_discrete_rhs_detailed(system, &u, t)?;
    monitor.record_step(system, &u, t, &current);
    let tiny = T::lit(1e-12) * (T::one() + t_end.abs());
    if t_end - t > tiny {
        monitor.sample(system, &u, t, &current);
    }
    let mut abort = None;
    let mut first_dt = None;
    while t_end - t > tiny {
        let dt = match stepping {
            TimeStepping::Fixed(dt) => dt,
            TimeStepping::Cfl(cfl) => match stable_dt(system, &u, cfl) {
                Ok(dt) => dt,
                Err(e) => {
                    abort = Some(e);
                    break;
                }
            },
        };
        let reference = *first_dt.get_or_insert(dt);
        if dt < T::lit(STEP_COLLAPSE) * reference {
            abort = Some(Error::StepCollapse {
                step: steps,
                time: t.to_f64_lossy(),
                dt: dt.to_f64_lossy(),
            });
            break;
        }
        let dt = dt.min(t_end - t);
        let next = rk4_from(system, &u, &current.rate, t, dt).and_then(|next| {
            if next.is_finite() {
                Ok(next)
            } else {
                Err(Error::NonFinite {
                    step: steps + 1,
                    time: (t + dt).to_f64_lossy(),
                })
            }
        });
        let next = match next {
            Ok(v) => v,
            Err(e) => {
                abort = Some(e);
                break;
            }
        };
        let t_next = if t_end - (t + dt) <= tiny { t_end } else { t + dt };
        let detailed = match semi_discrete_rhs_detailed(system, &next, t_next) {
            Ok(d) => d,
            Err(e) => {
                abort = Some(e);
                break;
            }
        };
        u = next;
        t = t_next;
        steps += 1;
        current = detailed;
        monitor.record_step(system, &u, t, &current);
        let last = t_end - t <= tiny;
        if steps.is_multiple_of(cadence) || last {
            monitor.sample(system, &u, t, &current);
        }
    }
    Ok(RunOutput {
        state: u,
        time: t,
        steps,
        report: monitor.finish(),
        abort,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{BoundaryData, BoundarySpec, Mode, RegimeCondition};
    use crate::equations::{EquationSpec, Variant};
    use crate::sbp::{build_operator_set, FaceId, Grid};

    fn line_system(kappa: f64) -> SemiDiscreteSystem<f64> {
        let spec = EquationSpec::iee().with_kappa(kappa);
        let ops = build_operator_set(Grid::line(11, 0.0, 1.0).unwrap(), 2).unwrap();
        let bcs = vec![
            BoundarySpec::new(FaceId::West, Mode::Weak).with_inflow(RegimeCondition::characteristic(
                Variant::IeeChar,
                2,
                1,
                BoundaryData::uniform(vec![1.0, 0.0, 0.0]),
            )),
            BoundarySpec::new(FaceId::East, Mode::Weak)
                .with_outflow(RegimeCondition::characteristic(Variant::IeeChar, 1, 2, BoundaryData::Zero)),
        ];
        SemiDiscreteSystem::new(spec, ops, bcs).unwrap()
    }

    #[test]
    fn stable_dt_example() {
        let sys = line_system(1.0);
        let u = sys.initial_field(|_| vec![1.0, 0.0, 0.0]);
        let dt = stable_dt(&sys, &u, 0.5).unwrap();
        // the weak penalties are stiffer than the waves here
        let mu = penalty_stiffness(&sys.equation, &sys.ops, &sys.boundaries, &u, 0.0);
        assert!((dt - 0.5 / mu).abs() < 1e-15, "{dt}");
        assert!((stable_dt(&sys, &u, 1.0).unwrap() - 2.0 * dt).abs() < 1e-15);
        // strong faces leave the wave speed (1 + √5)/2 of A + Aᵀ
        let mut strong = line_system(1.0);
        for bc in &mut strong.boundaries {
            bc.mode = Mode::Strong;
        }
        let golden = 0.5 * (1.0 + 5f64.sqrt());
        let dt = stable_dt(&strong, &u, 0.5).unwrap();
        assert!((dt - 0.05 / golden).abs() < 1e-14, "{dt}");
        let mut viscous = line_system(1.0);
        viscous.equation.epsilon = 10.0;
        assert!(stable_dt(&viscous, &u, 0.5).unwrap() < dt / 100.0);
    }

    #[test]
    fn zero_step_is_identity() {
        let sys = line_system(1.0);
        let u = sys.initial_field(|[x, _]| vec![1.0 + 0.1 * x, 0.2, x]);
        assert_eq!(rk4_step(&sys, &u, 0.0, 0.0).unwrap(), u);
    }

    #[test]
    fn zero_end_time() {
        let sys = line_system(1.0);
        let u = sys.initial_field(|_| vec![1.0, 0.0, 0.0]);
        let out = run(&sys, &u, 0.0, TimeStepping::Cfl(0.5), 1).unwrap();
        assert_eq!(out.steps, 0);
        assert_eq!(out.state, u);
        assert!(out.report.samples.is_empty());
        assert_eq!(out.report.steps.len(), 1);
    }

    #[test]
    fn uniform_flow_keeps_energy() {
        let sys = line_system(1.0);
        let u = sys.initial_field(|_| vec![1.0, 0.0, 0.0]);
        let out = run(&sys, &u, 1.0, TimeStepping::Fixed(0.01), 10).unwrap();
        assert!(out.abort.is_none());
        assert_eq!(out.steps, 100);
        let e0 = out.report.samples[0].energy;
        for s in &out.report.samples {
            assert!((s.energy - e0).abs() <= 1e-11 * e0);
        }
    }
}
