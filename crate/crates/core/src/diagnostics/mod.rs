//! Energy and entropy monitors, identity residuals, bound verdicts and
//! convergence studies.

mod convergence;
mod report;

pub use convergence::{convergence_study, ConvergenceScenario, RateTable};
pub use report::{EnergyReport, Sample, StepRecord};

use crate::boundary::Mode;
use crate::error::Result;
use crate::scalar::Real;
use crate::solver::{semi_discrete_rhs_detailed, weighted_energy, RhsOutput, SemiDiscreteSystem, StateField};

/// ‖U‖²_{P_eff⊗P_Ω}, the norm the evolved system conserves or dissipates.
pub fn energy_norm<T: Real>(system: &SemiDiscreteSystem<T>, u: &StateField<T>) -> T {
    system.energy(u)
}

/// ‖U‖²_{P⊗P_Ω} with the physical (possibly semi-definite) P.
pub fn physical_energy_norm<T: Real>(system: &SemiDiscreteSystem<T>, u: &StateField<T>) -> T {
    system.physical_energy(u)
}

/// Both sides of the semi-discrete energy balance
/// dE/dt + 2Σ(boundary + SAT) + 2ε‖DU‖² − 2⟨U, forcing⟩ = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityCheck<T> {
    /// 2⟨U, P_eff U_t⟩.
    pub rate: T,
    pub balance: T,
    /// |rate + balance| / (1 + |balance|).
    pub residual: T,
}

fn identity_from<T: Real>(system: &SemiDiscreteSystem<T>, u: &StateField<T>, rhs: &RhsOutput<T>) -> IdentityCheck<T> {
    let two = T::lit(2.0);
    let rate = two * evolved_inner(system, u, &rhs.rate);
    let faces: T = rhs.sat.faces.iter().map(|f| f.boundary_term + f.sat_term).sum();
    let balance = two * faces + two * rhs.dissipation - two * rhs.forcing_work;
    IdentityCheck {
        rate,
        balance,
        residual: (rate + balance).abs() / (T::one() + balance.abs()),
    }
}

fn evolved_inner<T: Real>(system: &SemiDiscreteSystem<T>, u: &StateField<T>, v: &StateField<T>) -> T {
    let vol = system.ops.volume_weights();
    system
        .equation
        .evolution_diag()
        .iter()
        .enumerate()
        .map(|(c, &p)| {
            p * u
                .component(c)
                .iter()
                .zip(v.component(c))
                .zip(vol)
                .map(|((&a, &b), &w)| w * a * b)
                .sum::<T>()
        })
        .sum()
}

/// Relative residual of the energy-rate identity, with the rate taken from
/// the analytic right-hand side.
pub fn energy_rate_identity<T: Real>(system: &SemiDiscreteSystem<T>, u: &StateField<T>, t: T) -> Result<IdentityCheck<T>> {
    let rhs = semi_discrete_rhs_detailed(system, u, t)?;
    Ok(identity_from(system, u, &rhs))
}

/// ∮ Ψ·n ds with Ψ_i = UᵀA_iU.
pub fn entropy_flux<T: Real>(system: &SemiDiscreteSystem<T>, u: &StateField<T>) -> T {
    let spec = &system.equation;
    let fields = spec.entropy_functionals(u);
    let mut total = T::zero();
    for face in system.ops.faces() {
        for (&g, &ds) in face.nodes.iter().zip(&face.weights) {
            total = total + ds * (face.normal[0] * fields.psi1[g] + face.normal[1] * fields.psi2[g]);
        }
    }
    total
}

/// |d/dt ∫Φ + ∮Ψ·n ds| / (1 + |∮Ψ·n ds|), with ∫Φ taken in the evolved
/// norm so that it equals half the monitored energy.
pub fn entropy_balance<T: Real>(system: &SemiDiscreteSystem<T>, u: &StateField<T>, t: T) -> Result<T> {
    let rhs = semi_discrete_rhs_detailed(system, u, t)?;
    Ok(entropy_residual(system, u, &rhs))
}

fn entropy_residual<T: Real>(system: &SemiDiscreteSystem<T>, u: &StateField<T>, rhs: &RhsOutput<T>) -> T {
    let flux = entropy_flux(system, u);
    let d_phi = evolved_inner(system, u, &rhs.rate);
    (d_phi + flux).abs() / (T::one() + flux.abs())
}

/// ∫Φ dΩ with Φ = UᵀPU/2.
pub fn entropy_integral<T: Real>(system: &SemiDiscreteSystem<T>, u: &StateField<T>) -> T {
    let phi = system.equation.entropy_functionals(u).phi;
    phi.iter().zip(system.ops.volume_weights()).map(|(&p, &w)| p * w).sum()
}

/// ‖D_x u + D_y v‖_{P_Ω} for the incompressible systems.
pub fn divergence_norm<T: Real>(system: &SemiDiscreteSystem<T>, u: &StateField<T>) -> Option<T> {
    if !system.equation.system.is_incompressible() {
        return None;
    }
    let ops = &system.ops;
    let mut div = vec![T::zero(); ops.len()];
    for axis in 0..ops.dimension() {
        let d = ops.apply_derivative(axis, u.component(axis));
        for (a, b) in div.iter_mut().zip(d) {
            *a = *a + b;
        }
    }
    Some(weighted_energy(ops, &[T::one()], &StateField::from_data(1, ops.len(), div).ok()?).sqrt())
}

/// Collects samples and per-step records during a run.
pub struct Monitor<T> {
    report: EnergyReport<T>,
    last_data_rate: Option<T>,
    data_integral: T,
    weak: Vec<bool>,
}

impl<T: Real> Monitor<T> {
    pub fn new(system: &SemiDiscreteSystem<T>, u0: &StateField<T>) -> Self {
        let faces: Vec<_> = system.ops.faces().iter().map(|f| f.id).collect();
        let weak = faces
            .iter()
            .map(|&f| system.boundary(f).is_some_and(|b| b.mode == Mode::Weak))
            .collect();
        Self {
            report: EnergyReport {
                faces,
                samples: Vec::new(),
                steps: Vec::new(),
                initial_energy: system.energy(u0),
                homogeneous: system.is_homogeneous(),
            },
            last_data_rate: None,
            data_integral: T::zero(),
            weak,
        }
    }

    /// Advances the data integral (trapezoid rule) and stores the step.
    pub fn record_step(&mut self, system: &SemiDiscreteSystem<T>, u: &StateField<T>, t: T, rhs: &RhsOutput<T>) {
        let two = T::lit(2.0);
        let rate = two * rhs.sat.faces.iter().map(|f| f.data_term).sum::<T>();
        if let (Some(prev), Some(last)) = (self.last_data_rate, self.report.steps.last()) {
            let dt = t - last.t;
            self.data_integral = self.data_integral + T::lit(0.5) * dt * (prev + rate);
        }
        self.last_data_rate = Some(rate);
        let face_margin = rhs
            .sat
            .faces
            .iter()
            .zip(&self.weak)
            .filter(|(_, &w)| w)
            .map(|(f, _)| f.boundary_term + f.sat_term + f.data_term)
            .reduce(T::min);
        self.report.steps.push(StepRecord {
            t,
            energy: system.energy(u),
            data_integral: self.data_integral,
            face_margin,
        });
    }

    /// Stores a full sample; call after [`Monitor::record_step`] for the
    /// same state.
    pub fn sample(&mut self, system: &SemiDiscreteSystem<T>, u: &StateField<T>, t: T, rhs: &RhsOutput<T>) {
        let identity = identity_from(system, u, rhs);
        self.report.samples.push(Sample {
            t,
            energy: system.energy(u),
            physical_energy: system.physical_energy(u),
            boundary_terms: rhs.sat.faces.iter().map(|f| f.boundary_term).collect(),
            sat_terms: rhs.sat.faces.iter().map(|f| f.sat_term).collect(),
            identity_residual: identity.residual,
            data_integral: self.data_integral,
            divergence: divergence_norm(system, u),
            entropy_flux: entropy_flux(system, u),
            entropy_residual: entropy_residual(system, u, rhs),
        });
    }

    pub fn finish(self) -> EnergyReport<T> {
        self.report
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMode {
    /// Energy must not grow: E_k ≤ E_{k−1} + slack.
    Homogeneous,
    /// E_k ≤ ‖F‖² + 2∫Σ s GᵀG ds dt + slack.
    Inhomogeneous,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundVerdict<T> {
    pub passed: bool,
    /// Largest amount by which an inequality failed (negative when all hold).
    pub max_violation: T,
    pub tolerance: T,
    /// Step index of the largest violation.
    pub step: Option<usize>,
    /// Smallest per-face boundary margin over the run.
    pub min_face_margin: Option<T>,
    pub detail: String,
}

/// Relative slack per step.
pub const BOUND_SLACK: f64 = 1e-10;

/// Checks the energy history against the bound of the given mode, and the
/// per-face boundary inequality at every step.
pub fn bound_check<T: Real>(report: &EnergyReport<T>, mode: BoundMode) -> BoundVerdict<T> {
    let f2 = report.initial_energy;
    let slack = T::lit(BOUND_SLACK) * f2.max(T::lit(1e-300));
    let mut worst = T::neg_infinity();
    let mut worst_step = None;
    for (k, s) in report.steps.iter().enumerate() {
        let excess = match mode {
            BoundMode::Homogeneous => match k.checked_sub(1) {
                Some(prev) => s.energy - report.steps[prev].energy,
                None => s.energy - f2,
            },
            BoundMode::Inhomogeneous => s.energy - f2 - s.data_integral,
        };
        let allowed = match mode {
            BoundMode::Homogeneous => slack,
            BoundMode::Inhomogeneous => slack * T::from(k + 1).unwrap_or(T::one()),
        };
        if excess - allowed > worst {
            worst = excess - allowed;
            worst_step = Some(k);
        }
    }
    let face_tol = T::lit(BOUND_SLACK) * (T::one() + f2);
    let min_face = report.steps.iter().filter_map(|s| s.face_margin).reduce(T::min);
    let energy_ok = !(worst > T::zero());
    let face_ok = min_face.is_none_or(|m| m >= -face_tol);
    let mut detail = Vec::new();
    if !energy_ok {
        detail.push(format!(
            "energy bound exceeded by {:e} at step {}",
            worst.to_f64_lossy(),
            worst_step.unwrap_or(0)
        ));
    }
    if !face_ok {
        detail.push(format!(
            "boundary term below the data bound on a face (margin {:e})",
            min_face.unwrap_or(T::zero()).to_f64_lossy()
        ));
    }
    BoundVerdict {
        passed: energy_ok && face_ok,
        max_violation: if report.steps.is_empty() { T::zero() } else { worst },
        tolerance: slack,
        step: worst_step,
        min_face_margin: min_face,
        detail: if detail.is_empty() { "ok".into() } else { detail.join("; ") },
    }
}
