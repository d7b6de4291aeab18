//! Semi-discrete assembly and explicit time stepping.

mod time;

use std::fmt;
use std::sync::Arc;

pub use crate::equations::StateField;
pub use time::{rk4_step, run, stable_dt, RunOutput, TimeStepping};

use crate::boundary::{impose_strong_field, sat_contribution, BoundarySpec, Mode, SatOutput};
use crate::equations::EquationSpec;
use crate::error::{Error, Result};
use crate::sbp::{FaceId, SbpOperatorSet};
use crate::scalar::Real;

pub type Forcing<T> = Arc<dyn Fn([T; 2], T) -> Vec<T> + Send + Sync>;

/// P U_t + D_i(A_iU) + A_iᵀD_iU + CU + L_D = ε D_i(P D_iU) + forcing.
#[derive(Clone)]
pub struct SemiDiscreteSystem<T> {
    pub equation: EquationSpec<T>,
    pub ops: SbpOperatorSet<T>,
    pub boundaries: Vec<BoundarySpec<T>>,
    pub forcing: Option<Forcing<T>>,
}

impl<T> fmt::Debug for SemiDiscreteSystem<T>
where
    T: fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemiDiscreteSystem")
            .field("equation", &self.equation)
            .field("boundaries", &self.boundaries)
            .field("forcing", &self.forcing.is_some())
            .finish_non_exhaustive()
    }
}

impl<T: Real> SemiDiscreteSystem<T> {
    pub fn new(equation: EquationSpec<T>, ops: SbpOperatorSet<T>, boundaries: Vec<BoundarySpec<T>>) -> Result<Self> {
        equation.validate()?;
        for face in ops.faces() {
            let count = boundaries.iter().filter(|b| b.face == face.id).count();
            if count != 1 {
                return Err(Error::InvalidParameter(format!(
                    "face {} needs exactly one boundary condition, got {count}",
                    face.id
                )));
            }
        }
        if let Some(extra) = boundaries.iter().find(|b| ops.face(b.face).is_none()) {
            return Err(Error::InvalidParameter(format!(
                "the grid has no {} face",
                extra.face
            )));
        }
        for bc in &boundaries {
            for cond in [&bc.inflow, &bc.outflow].into_iter().flatten() {
                if !cond.variant.supports(equation.system) {
                    return Err(Error::IncompatibleVariant {
                        variant: cond.variant.name(),
                        system: equation.system.name(),
                    });
                }
            }
        }
        Ok(Self {
            equation,
            ops,
            boundaries,
            forcing: None,
        })
    }

    pub fn with_forcing(mut self, forcing: Forcing<T>) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn boundary(&self, face: FaceId) -> Option<&BoundarySpec<T>> {
        self.boundaries.iter().find(|b| b.face == face)
    }

    pub fn has_strong_faces(&self) -> bool {
        self.boundaries.iter().any(|b| b.mode == Mode::Strong)
    }

    /// True when no face has data and there is no forcing.
    pub fn is_homogeneous(&self) -> bool {
        self.forcing.is_none()
            && self
                .boundaries
                .iter()
                .flat_map(|b| [&b.inflow, &b.outflow])
                .flatten()
                .all(|c| c.data.is_zero())
    }

    /// Overwrites the strongly imposed boundary values of `u`.
    pub fn impose_strong(&self, u: &mut StateField<T>, t: T) -> Result<T> {
        if !self.has_strong_faces() {
            return Ok(T::zero());
        }
        impose_strong_field(&self.equation, &self.ops, &self.boundaries, u, t)
    }

    /// Uᵀ(P_eff ⊗ P_Ω)U with the evolved (κ-relaxed) norm.
    pub fn energy(&self, u: &StateField<T>) -> T {
        weighted_energy(&self.ops, &self.equation.evolution_diag(), u)
    }

    /// Uᵀ(P ⊗ P_Ω)U with the physical norm.
    pub fn physical_energy(&self, u: &StateField<T>) -> T {
        weighted_energy(&self.ops, &self.equation.norm_diag(), u)
    }

    pub fn initial_field(&self, f: impl FnMut([T; 2]) -> Vec<T>) -> StateField<T> {
        StateField::from_fn(&self.ops, self.equation.n(), f)
    }
}

pub(crate) fn weighted_energy<T: Real>(ops: &SbpOperatorSet<T>, p: &[T], u: &StateField<T>) -> T {
    let vol = ops.volume_weights();
    let mut total = T::zero();
    for (c, &pc) in p.iter().enumerate() {
        if pc.is_zero() {
            continue;
        }
        let part: T = u.component(c).iter().zip(vol).map(|(&v, &w)| w * v * v).sum();
        total = total + pc * part;
    }
    total
}

/// Time derivative together with the terms of the energy balance.
#[derive(Clone, Debug)]
pub struct RhsOutput<T> {
    pub rate: StateField<T>,
    pub sat: SatOutput<T>,
    /// ε Σ_i ‖D_iU‖²_{P⊗P_Ω}.
    pub dissipation: T,
    /// ⟨U, forcing⟩ in the P_Ω product.
    pub forcing_work: T,
}

pub fn semi_discrete_rhs<T: Real>(system: &SemiDiscreteSystem<T>, u: &StateField<T>, t: T) -> Result<StateField<T>> {
    semi_discrete_rhs_detailed(system, u, t).map(|o| o.rate)
}

pub fn semi_discrete_rhs_detailed<T: Real>(
    system: &SemiDiscreteSystem<T>,
    u: &StateField<T>,
    t: T,
) -> Result<RhsOutput<T>> {
    let spec = &system.equation;
    let ops = &system.ops;
    let n = spec.n();
    let len = ops.len();
    if u.components() != n || u.nodes() != len {
        return Err(Error::ShapeMismatch {
            expected: n * len,
            got: u.components() * u.nodes(),
        });
    }
    let sat = sat_contribution(spec, ops, &system.boundaries, u, t)?;
    // acc collects −(D_i(A_iU) + A_iᵀD_iU + CU) + viscous + forcing − SAT
    let mut acc = StateField::zeros(n, len);
    let mut a = [[T::zero(); 4]; 4];
    let mut point = vec![T::zero(); n];
    let mut au = StateField::zeros(n, len);
    let mut du = StateField::zeros(n, len);
    let mut tmp = vec![T::zero(); len];
    let p = spec.norm_diag();
    let mut dissipation = T::zero();
    let vol = ops.volume_weights();
    for axis in 0..ops.dimension() {
        for c in 0..n {
            ops.apply_derivative_into(axis, u.component(c), du.component_mut(c));
        }
        for g in 0..len {
            u.node_into(g, &mut point);
            spec.fill_flux(axis, &point, &mut a);
            for r in 0..n {
                let mut s1 = T::zero();
                let mut s2 = T::zero();
                for c in 0..n {
                    s1 = s1 + a[r][c] * point[c];
                    s2 = s2 + a[c][r] * du.get(c, g);
                }
                au.component_mut(r)[g] = s1;
                acc.component_mut(r)[g] = acc.get(r, g) - s2;
            }
        }
        for c in 0..n {
            ops.apply_derivative_into(axis, au.component(c), &mut tmp);
            for (dst, &v) in acc.component_mut(c).iter_mut().zip(&tmp) {
                *dst = *dst - v;
            }
        }
        if spec.epsilon > T::zero() {
            for c in 0..n {
                if p[c].is_zero() {
                    continue;
                }
                let dc = du.component(c);
                let norm: T = dc.iter().zip(vol).map(|(&v, &w)| w * v * v).sum();
                dissipation = dissipation + spec.epsilon * p[c] * norm;
                let flux: Vec<T> = dc.iter().map(|&v| p[c] * v).collect();
                ops.apply_derivative_into(axis, &flux, &mut tmp);
                for (dst, &v) in acc.component_mut(c).iter_mut().zip(&tmp) {
                    *dst = *dst + spec.epsilon * v;
                }
            }
        }
    }
    let coriolis = spec.coriolis_matrix();
    if coriolis.max_abs() > T::zero() {
        for g in 0..len {
            u.node_into(g, &mut point);
            let cu = coriolis.matvec(&point);
            for (r, v) in cu.into_iter().enumerate() {
                acc.component_mut(r)[g] = acc.get(r, g) - v;
            }
        }
    }
    let mut forcing_work = T::zero();
    if let Some(f) = &system.forcing {
        let grid = ops.grid();
        for g in 0..len {
            let fg = f(grid.position(g), t);
            for (c, &v) in fg.iter().enumerate().take(n) {
                acc.component_mut(c)[g] = acc.get(c, g) + v;
                forcing_work = forcing_work + vol[g] * u.get(c, g) * v;
            }
        }
    }
    let evo = spec.evolution_diag();
    for c in 0..n {
        let inv = T::one() / evo[c];
        for (dst, &l) in acc.component_mut(c).iter_mut().zip(sat.field.component(c)) {
            *dst = (*dst - l) * inv;
        }
    }
    Ok(RhsOutput {
        rate: acc,
        sat,
        dissipation,
        forcing_work,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{preset_bc, BoundaryData, PresetContext, RegimeCondition};
    use crate::equations::{System, Variant};
    use crate::sbp::{build_operator_set, Grid};

    fn uniform_system(system: System, state: Vec<f64>) -> SemiDiscreteSystem<f64> {
        let spec = EquationSpec::for_system(system);
        let ops = build_operator_set(Grid::unit_square(9).unwrap(), 4).unwrap();
        let bcs = FaceId::ALL
            .iter()
            .map(|&f| {
                let mut bc = BoundarySpec::new(f, Mode::Weak);
                let data = BoundaryData::uniform(state.clone());
                let vn = spec.normal_velocity(&state, f.normal());
                let (variant, m_in, m_out) = match system {
                    System::Iee | System::Inse => (Variant::IeeChar, (2, 1), (1, 2)),
                    System::Swe => (Variant::SweChar, (2, 1), (1, 2)),
                    System::Cee => (Variant::CeeContracted, (4, 0), (0, 4)),
                };
                if vn < 0.0 {
                    bc.inflow = Some(RegimeCondition::characteristic(variant, m_in.0, m_in.1, data));
                } else {
                    bc.outflow = Some(RegimeCondition::characteristic(variant, m_out.0, m_out.1, data));
                }
                bc
            })
            .collect();
        SemiDiscreteSystem::new(spec, ops, bcs).unwrap()
    }

    #[test]
    fn constants_are_steady() {
        let cases = [
            (System::Iee, vec![1.0, 0.5, 2.0]),
            (System::Inse, vec![1.0, 0.5, 2.0]),
            (System::Swe, vec![2.0, 0.6, -0.4]),
            (System::Cee, vec![1.1, 0.3, 0.2, 1.3]),
        ];
        for (system, state) in cases {
            let sys = uniform_system(system, state.clone());
            let u = sys.initial_field(|_| state.clone());
            let rate = semi_discrete_rhs(&sys, &u, 0.0).unwrap();
            // residual of P_eff U_t, before the division by κ
            let p = sys.equation.evolution_diag();
            let worst = (0..rate.components())
                .flat_map(|c| rate.component(c).iter().map(|v| (v * p[c]).abs()).collect::<Vec<_>>())
                .fold(0.0f64, f64::max);
            assert!(worst < 1e-13, "{system:?}: {worst}");
        }
    }

    #[test]
    fn interior_perturbation_leaves_boundary_sat() {
        let state = vec![1.0, 0.5, 2.0];
        let sys = uniform_system(System::Iee, state.clone());
        let mut u = sys.initial_field(|[x, y]| vec![1.0 + 0.1 * x, 0.5 - 0.2 * y, 2.0 + x * y]);
        let before = semi_discrete_rhs_detailed(&sys, &u, 0.0).unwrap().sat.field;
        let g = sys.ops.grid().index(4, 4);
        u.component_mut(2)[g] += 0.7;
        let after = semi_discrete_rhs_detailed(&sys, &u, 0.0).unwrap().sat.field;
        assert_eq!(before, after);
    }

    #[test]
    fn face_coverage_is_validated() {
        let spec = EquationSpec::<f64>::iee();
        let ops = build_operator_set(Grid::unit_square(9).unwrap(), 2).unwrap();
        let ctx = PresetContext::new(spec.clone(), FaceId::West, Mode::Weak);
        let one = vec![preset_bc("iee-pressure-outflow", &ctx).unwrap()];
        assert!(SemiDiscreteSystem::new(spec, ops, one).is_err());
    }
}
