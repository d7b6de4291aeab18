use crate::equations::{EquationSpec, StateField, Variant, ViscousFlux};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::sbp::{Face, FaceId, SbpOperatorSet};
use crate::scalar::Real;

use super::{sigma_matrix, strong_impose, strong_impose_coupled, BoundarySpec, Mode, PointEvaluation};

/// Quadrature-weighted boundary quantities of one face, all multiplied by
/// the form scale s.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceEnergy<T> {
    pub face: FaceId,
    /// Physical boundary flux Σ ds (Uᵀ(n_iA_i)U − ε Uᵀ n_i P D_iU).
    pub boundary_term: T,
    /// Σ ds s·2(W⁻)ᵀΣ r with the unscaled penalty Σ = √|Λ⁻|; zero on strong faces.
    pub sat_term: T,
    /// Σ ds s·GᵀG.
    pub data_term: T,
}

#[derive(Clone, Debug)]
pub struct SatOutput<T> {
    /// L_D, already divided by the volume weights.
    pub field: StateField<T>,
    pub faces: Vec<FaceEnergy<T>>,
}

pub(crate) fn face_spec<T>(bcs: &[BoundarySpec<T>], id: FaceId) -> Result<&BoundarySpec<T>> {
    bcs.iter()
        .find(|b| b.face == id)
        .ok_or_else(|| Error::InvalidParameter(format!("no boundary condition for the {id} face")))
}

/// Nonzero entries (m, D_a[g][m]) of the derivative row at volume node `g`.
pub(crate) fn derivative_row<T: Real>(ops: &SbpOperatorSet<T>, axis: usize, g: usize) -> Vec<(usize, T)> {
    let grid = ops.grid();
    let (i, j) = grid.ij(g);
    let d = ops.operator(axis).d();
    let (k, n) = if axis == 0 { (i, grid.nodes(0)) } else { (j, grid.nodes(1)) };
    (0..n)
        .filter(|&m| !d[(k, m)].is_zero())
        .map(|m| {
            let node = if axis == 0 { grid.index(m, j) } else { grid.index(i, m) };
            (node, d[(k, m)])
        })
        .collect()
}

/// Viscous flux P D_a U at a face node, along the face's normal axis only.
fn face_viscous_flux<T: Real>(
    spec: &EquationSpec<T>,
    ops: &SbpOperatorSet<T>,
    face: &Face<T>,
    g: usize,
    u: &StateField<T>,
) -> ViscousFlux<T> {
    let axis = face.id.axis();
    let row = derivative_row(ops, axis, g);
    let grad: Vec<T> = (0..spec.n())
        .map(|c| row.iter().map(|&(m, w)| w * u.get(c, m)).sum())
        .collect();
    let mut gradients = vec![vec![T::zero(); spec.n()]; 2];
    gradients[axis] = grad;
    spec.viscous_flux(&gradients)
}

/// Rotated shear (εF̃_n, εF̃_τ) at a face node, when the variant needs it.
pub(crate) fn node_shear<T: Real>(
    spec: &EquationSpec<T>,
    ops: &SbpOperatorSet<T>,
    face: &Face<T>,
    g: usize,
    u: &StateField<T>,
) -> [T; 2] {
    face_viscous_flux(spec, ops, face, g, u).rotated_shear(spec.epsilon, face.normal)
}

/// The node shear is affine in the node's own state; this returns that map
/// with every other node frozen at its current value.
fn shear_model<T: Real>(
    spec: &EquationSpec<T>,
    ops: &SbpOperatorSet<T>,
    face: &Face<T>,
    g: usize,
    u: &mut StateField<T>,
) -> impl Fn(&[T]) -> [T; 2] {
    let n = spec.n();
    let base = node_shear(spec, ops, face, g, u);
    let current = u.node(g);
    let mut slope = vec![[T::zero(); 2]; n];
    for c in 0..n {
        let mut bumped = current.clone();
        bumped[c] = bumped[c] + T::one();
        u.set_node(g, &bumped);
        let s = node_shear(spec, ops, face, g, u);
        slope[c] = [s[0] - base[0], s[1] - base[1]];
    }
    u.set_node(g, &current);
    move |v: &[T]| {
        let mut s = base;
        for c in 0..n {
            let d = v[c] - current[c];
            s[0] = s[0] + slope[c][0] * d;
            s[1] = s[1] + slope[c][1] * d;
        }
        s
    }
}

fn uses_shear<T: Real>(spec: &EquationSpec<T>, bc: &BoundarySpec<T>) -> bool {
    spec.epsilon > T::zero()
        && [&bc.inflow, &bc.outflow]
            .into_iter()
            .flatten()
            .any(|c| c.variant == Variant::InseExtended)
}

/// SAT vector of all weak faces plus the per-face energy bookkeeping.
///
/// The field satisfies ⟨U, L_D⟩ = Σ_faces s Σ ds 2(W⁻)ᵀΣ r in the P_Ω inner
/// product (times the penalty scale of each face).
pub fn sat_contribution<T: Real>(
    spec: &EquationSpec<T>,
    ops: &SbpOperatorSet<T>,
    bcs: &[BoundarySpec<T>],
    u: &StateField<T>,
    t: T,
) -> Result<SatOutput<T>> {
    let n = spec.n();
    let s = spec.form_scale();
    let two = T::lit(2.0);
    let vol = ops.volume_weights();
    let grid = ops.grid();
    let mut field = StateField::zeros(n, ops.len());
    let mut faces = Vec::with_capacity(ops.faces().len());
    let mut point = vec![T::zero(); n];
    for face in ops.faces() {
        let bc = face_spec(bcs, face.id)?;
        let shear_needed = uses_shear(spec, bc);
        let mut energy = FaceEnergy {
            face: face.id,
            boundary_term: T::zero(),
            sat_term: T::zero(),
            data_term: T::zero(),
        };
        for (&g, &ds) in face.nodes.iter().zip(&face.weights) {
            u.node_into(g, &mut point);
            let flux = (spec.epsilon > T::zero()).then(|| face_viscous_flux(spec, ops, face, g, u));
            let shear = flux
                .as_ref()
                .filter(|_| shear_needed)
                .map(|f| f.rotated_shear(spec.epsilon, face.normal));
            let ev = bc.evaluate(spec, &point, shear, face.normal, grid.position(g), t)?;
            let mut flux_term = s * ev.rotation.form();
            if ev.rotation.variant != Variant::InseExtended {
                if let Some(f) = &flux {
                    // viscous boundary flux not carried by the rotation
                    let vn: T = (0..n)
                        .map(|c| point[c] * (face.normal[0] * f.d[0][c] + face.normal[1] * f.d[1][c]))
                        .sum();
                    flux_term = flux_term - spec.epsilon * vn;
                }
            }
            energy.boundary_term = energy.boundary_term + ds * flux_term;
            energy.data_term = energy.data_term + ds * s * ev.g.iter().map(|&v| v * v).sum::<T>();
            if bc.mode == Mode::Strong || ev.split.minus.is_empty() {
                continue;
            }
            energy.sat_term = energy.sat_term + ds * s * (ev.weak_boundary_term() - ev.rotation.form());
            let y = penalty_vector(&ev, s * two * bc.penalty_scale);
            add_penalty(spec, ops, face, g, ds, &y, vol, &mut field);
        }
        faces.push(energy);
    }
    Ok(SatOutput { field, faces })
}

/// Largest decay rate the weak penalties put on a boundary node, from a
/// difference Jacobian of the penalty in the evolution norm. Nodes whose
/// regime flips under the perturbation are skipped.
pub fn penalty_stiffness<T: Real>(
    spec: &EquationSpec<T>,
    ops: &SbpOperatorSet<T>,
    bcs: &[BoundarySpec<T>],
    u: &StateField<T>,
    t: T,
) -> T {
    let n = spec.n();
    let s = spec.form_scale();
    let vol = ops.volume_weights();
    let grid = ops.grid();
    let scale: Vec<T> = spec.evolution_diag().iter().map(|p| T::one() / p.sqrt()).collect();
    let mut worst = T::zero();
    let mut point = vec![T::zero(); n];
    for face in ops.faces() {
        let Ok(bc) = face_spec(bcs, face.id) else {
            continue;
        };
        if bc.mode == Mode::Strong {
            continue;
        }
        let k = T::lit(2.0) * s * bc.penalty_scale;
        let shear_needed = uses_shear(spec, bc);
        for (&g, &ds) in face.nodes.iter().zip(&face.weights) {
            u.node_into(g, &mut point);
            let shear = shear_needed.then(|| {
                face_viscous_flux(spec, ops, face, g, u).rotated_shear(spec.epsilon, face.normal)
            });
            let direct = |v: &[T]| -> Option<Vec<T>> {
                let ev = bc.evaluate(spec, v, shear, face.normal, grid.position(g), t).ok()?;
                if ev.split.minus.is_empty() {
                    return Some(vec![T::zero(); n]);
                }
                let y = penalty_vector(&ev, k);
                Some(spec.unrotate(&y[..n], face.normal))
            };
            let Some(base) = direct(&point) else {
                continue;
            };
            let mut jac = Matrix::zeros(n, n);
            let mut ok = true;
            for d in 0..n {
                let step = T::lit(1e-6) * (T::one() + point[d].abs());
                let mut bumped = point.clone();
                bumped[d] = bumped[d] + step;
                let Some(y) = direct(&bumped) else {
                    ok = false;
                    break;
                };
                for c in 0..n {
                    jac[(c, d)] = (y[c] - base[c]) / step * scale[c] * scale[d] * ds / vol[g];
                }
            }
            if ok {
                worst = worst.max(jac.spectral_norm());
            }
        }
    }
    worst
}

/// k (I⁻T⁻¹)ᵀ Σ r, a vector over the rotated unknowns z.
fn penalty_vector<T: Real>(ev: &PointEvaluation<T>, k: T) -> Vec<T> {
    let sigma = sigma_matrix(&ev.split.lambda_minus);
    let t_inv = &ev.rotation.t_inv;
    let mut y = vec![T::zero(); t_inv.cols()];
    for (idx, &row) in ev.split.minus.iter().enumerate() {
        let weight = k * sigma[idx] * ev.residual[idx];
        for (c, yc) in y.iter_mut().enumerate() {
            *yc = *yc + t_inv[(row, c)] * weight;
        }
    }
    y
}

#[allow(clippy::too_many_arguments)]
fn add_penalty<T: Real>(
    spec: &EquationSpec<T>,
    ops: &SbpOperatorSet<T>,
    face: &Face<T>,
    g: usize,
    ds: T,
    y: &[T],
    vol: &[T],
    field: &mut StateField<T>,
) {
    let n = spec.n();
    let direct = spec.unrotate(&y[..n], face.normal);
    for (c, v) in direct.iter().enumerate() {
        let slot = &mut field.component_mut(c)[g];
        *slot = *slot + *v * ds / vol[g];
    }
    if y.len() > n {
        // εF̃ depends on the derivative along the normal axis, so the
        // penalty on the shear is spread over that derivative row
        let mut pair = vec![T::zero(); n];
        pair[0] = y[n];
        pair[1] = y[n + 1];
        let back = spec.unrotate(&pair, face.normal);
        let p = spec.norm_diag();
        let axis = face.id.axis();
        let scale = spec.epsilon * face.normal[axis] * ds;
        for (m, w) in derivative_row(ops, axis, g) {
            for c in 0..n {
                if p[c].is_zero() {
                    continue;
                }
                let slot = &mut field.component_mut(c)[m];
                *slot = *slot + scale * p[c] * back[c] * w / vol[m];
            }
        }
    }
}

/// Injects the strong conditions of all strong faces into `u`, face by face
/// in the order West, East, South, North. Returns the largest remaining
/// condition residual.
pub fn impose_strong_field<T: Real>(
    spec: &EquationSpec<T>,
    ops: &SbpOperatorSet<T>,
    bcs: &[BoundarySpec<T>],
    u: &mut StateField<T>,
    t: T,
) -> Result<T> {
    let grid = ops.grid();
    let mut worst = T::zero();
    let mut point = vec![T::zero(); spec.n()];
    for face in ops.faces() {
        let bc = face_spec(bcs, face.id)?;
        if bc.mode != Mode::Strong {
            continue;
        }
        let shear_needed = uses_shear(spec, bc);
        for &g in &face.nodes {
            u.node_into(g, &mut point);
            let out = if shear_needed {
                let model = shear_model(spec, ops, face, g, u);
                strong_impose_coupled(spec, bc, &point, &model, face.normal, grid.position(g), t)?
            } else {
                strong_impose(spec, bc, &point, None, face.normal, grid.position(g), t)?
            };
            worst = worst.max(out.residual);
            u.set_node(g, &out.u);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{preset_bc, BoundaryData, PresetContext, RegimeCondition};
    use crate::sbp::{build_operator_set, Grid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn identity_gap(spec: &EquationSpec<f64>, ops: &SbpOperatorSet<f64>, bcs: &[BoundarySpec<f64>], u: &StateField<f64>) -> f64 {
        let out = sat_contribution(spec, ops, bcs, u, 0.0).unwrap();
        let lhs: f64 = (0..spec.n())
            .map(|c| ops.inner_product(u.component(c), out.field.component(c)).unwrap())
            .sum();
        let rhs: f64 = out.faces.iter().map(|f| f.sat_term).sum();
        (lhs - rhs).abs() / (1.0 + rhs.abs())
    }

    #[test]
    fn inner_product_identity_iee() {
        let spec = EquationSpec::<f64>::iee();
        let ops = build_operator_set(Grid::unit_square(11).unwrap(), 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = StateField::from_fn(&ops, 3, |[x, y]| {
            vec![x - 0.5 + 0.1 * rng.gen::<f64>(), y - 0.5 + 0.1, rng.gen::<f64>()]
        });
        let bcs: Vec<_> = FaceId::ALL
            .iter()
            .map(|&f| {
                let ctx = PresetContext::new(spec.clone(), f, Mode::Weak);
                preset_bc("iee-pressure-outflow", &ctx)
                    .unwrap()
                    .with_inflow(RegimeCondition::characteristic(
                        Variant::IeeChar,
                        2,
                        1,
                        BoundaryData::Constant(vec![0.3, -0.2]),
                    ))
            })
            .collect();
        assert!(identity_gap(&spec, &ops, &bcs, &u) < 1e-12);
    }

    #[test]
    fn inner_product_identity_inse_extended() {
        let spec = EquationSpec::inse(0.05);
        let ops = build_operator_set(Grid::unit_square(11).unwrap(), 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = StateField::from_fn(&ops, 3, |[x, y]| {
            vec![2.0 * x - 1.0 + 0.05 * rng.gen::<f64>(), 0.6 * y - 0.3, rng.gen::<f64>()]
        });
        let bcs: Vec<_> = FaceId::ALL
            .iter()
            .map(|&f| {
                let ctx = PresetContext::new(spec.clone(), f, Mode::Weak);
                let mut bc = preset_bc("inse-stress-pressure-outflow", &ctx).unwrap();
                bc.inflow = preset_bc("inse-velocity-inflow", &ctx).unwrap().inflow;
                bc
            })
            .collect();
        assert!(identity_gap(&spec, &ops, &bcs, &u) < 1e-12);
        let out = sat_contribution(&spec, &ops, &bcs, &u, 0.0).unwrap();
        assert!(out.field.data().iter().any(|v| *v != 0.0));
    }

    #[test]
    fn satisfied_condition_gives_zero_sat() {
        let spec = EquationSpec::<f64>::iee();
        let ops = build_operator_set(Grid::line(11, 0.0, 1.0).unwrap(), 2).unwrap();
        let u = StateField::from_fn(&ops, 3, |_| vec![1.0, 0.2, 0.0]);
        let bcs: Vec<_> = [FaceId::West, FaceId::East]
            .iter()
            .map(|&f| {
                BoundarySpec::new(f, Mode::Weak)
                    .with_outflow(RegimeCondition::characteristic(Variant::IeeChar, 1, 2, BoundaryData::Zero))
                    .with_inflow(RegimeCondition::characteristic(
                        Variant::IeeChar,
                        2,
                        1,
                        BoundaryData::uniform(vec![1.0, 0.2, 0.0]),
                    ))
            })
            .collect();
        let out = sat_contribution(&spec, &ops, &bcs, &u, 0.0).unwrap();
        assert!(out.field.data().iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn sat_is_supported_on_the_boundary() {
        let spec = EquationSpec::<f64>::swe(0.2, 0.2, 0.0);
        let ops = build_operator_set(Grid::unit_square(11).unwrap(), 2).unwrap();
        let u = StateField::from_fn(&ops, 3, |[x, y]| vec![1.0 + 0.1 * x, x - 0.5, y - 0.5]);
        let bcs: Vec<_> = FaceId::ALL
            .iter()
            .map(|&f| {
                let ctx = PresetContext::new(spec.clone(), f, Mode::Weak);
                let mut bc = preset_bc("swe-outflow", &ctx).unwrap();
                bc.inflow = preset_bc("swe-characteristic-inflow", &ctx).unwrap().inflow;
                bc.outflow = Some(RegimeCondition::characteristic(Variant::SweChar, 1, 2, BoundaryData::Zero));
                bc
            })
            .collect();
        let out = sat_contribution(&spec, &ops, &bcs, &u, 0.0).unwrap();
        let grid = ops.grid();
        for g in 0..ops.len() {
            let (i, j) = grid.ij(g);
            if i > 0 && j > 0 && i < 10 && j < 10 {
                assert!((0..3).all(|c| out.field.get(c, g) == 0.0));
            }
        }
        assert!(out.faces.iter().all(|f| f.sat_term >= 0.0));
    }
}
