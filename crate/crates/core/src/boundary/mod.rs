//! General nonlinear boundary conditions √|Λ⁻|W⁻ = R√Λ⁺W⁺ + S G.

mod admissibility;
mod presets;
mod sat;
mod strong;

use std::fmt;
use std::sync::Arc;

pub use admissibility::{check_r, check_s, AdmissibilityReport, Verdict};
pub use presets::{preset_bc, scenario_bc, PresetContext, FlowScenario, PRESET_NAMES};
pub use sat::{impose_strong_field, penalty_stiffness, sat_contribution, FaceEnergy, SatOutput};
pub use strong::{strong_impose, strong_impose_coupled, ShearModel, StrongResult};

use crate::equations::{
    characteristic_split, rotation_from_z, BoundaryRotation, EquationSpec, Split, Variant,
};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::sbp::FaceId;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Strong,
    Weak,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Strong => "strong",
            Mode::Weak => "weak",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    Inflow,
    Outflow,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Inflow => "inflow",
            Regime::Outflow => "outflow",
        }
    }
}

/// State used to derive boundary data, with optional gradients U_{x_i}.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceState<T> {
    pub u: Vec<T>,
    pub gradients: Option<Vec<Vec<T>>>,
}

pub type ReferenceFn<T> = Arc<dyn Fn([T; 2], T) -> ReferenceState<T> + Send + Sync>;
pub type DataFn<T> = Arc<dyn Fn([T; 2], T) -> Vec<T> + Send + Sync>;

/// Data G(x, t) of length m⁻.
#[derive(Clone)]
pub enum BoundaryData<T> {
    Zero,
    Constant(Vec<T>),
    /// G chosen so that the reference state satisfies the condition exactly.
    Reference(ReferenceFn<T>),
    Function(DataFn<T>),
}

impl<T: Real> BoundaryData<T> {
    /// Reference data from a fixed state.
    pub fn uniform(u: Vec<T>) -> Self {
        BoundaryData::Reference(Arc::new(move |_, _| ReferenceState {
            u: u.clone(),
            gradients: None,
        }))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            BoundaryData::Zero => true,
            BoundaryData::Constant(g) => g.iter().all(|v| v.is_zero()),
            _ => false,
        }
    }
}

impl<T> fmt::Debug for BoundaryData<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryData::Zero => f.write_str("Zero"),
            BoundaryData::Constant(_) => f.write_str("Constant(..)"),
            BoundaryData::Reference(_) => f.write_str("Reference(..)"),
            BoundaryData::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// R, S and data for one flow regime.
#[derive(Clone, Debug)]
pub struct RegimeCondition<T> {
    pub variant: Variant,
    pub r: Matrix<T>,
    pub s: Matrix<T>,
    s_inv: Matrix<T>,
    pub data: BoundaryData<T>,
}

impl<T: Real> RegimeCondition<T> {
    pub fn new(variant: Variant, r: Matrix<T>, s: Matrix<T>, data: BoundaryData<T>) -> Result<Self> {
        if s.rows() != s.cols() || s.rows() != r.rows() {
            return Err(Error::ShapeMismatch {
                expected: r.rows(),
                got: s.rows(),
            });
        }
        let s_inv = s.inverse().ok_or(Error::SingularS)?;
        Ok(Self {
            variant,
            r,
            s,
            s_inv,
            data,
        })
    }

    /// Condition with R = 0 and S = I.
    pub fn characteristic(variant: Variant, m_minus: usize, m_plus: usize, data: BoundaryData<T>) -> Self {
        Self::new(variant, Matrix::zeros(m_minus, m_plus), Matrix::identity(m_minus), data)
            .expect("identity S is invertible")
    }

    pub fn m_minus(&self) -> usize {
        self.r.rows()
    }

    pub fn m_plus(&self) -> usize {
        self.r.cols()
    }

    pub fn s_inverse(&self) -> &Matrix<T> {
        &self.s_inv
    }
}

/// Boundary condition of one face, given per flow regime.
#[derive(Clone, Debug)]
pub struct BoundarySpec<T> {
    pub face: FaceId,
    pub mode: Mode,
    pub inflow: Option<RegimeCondition<T>>,
    pub outflow: Option<RegimeCondition<T>>,
    /// Multiplies Σ in the SAT. Anything but 1 breaks the energy identity.
    pub penalty_scale: T,
    /// Relative tolerance of the characteristic split.
    pub split_tolerance: T,
}

impl<T: Real> BoundarySpec<T> {
    pub fn new(face: FaceId, mode: Mode) -> Self {
        Self {
            face,
            mode,
            inflow: None,
            outflow: None,
            penalty_scale: T::one(),
            split_tolerance: T::lit(1e-10),
        }
    }

    pub fn with_inflow(mut self, c: RegimeCondition<T>) -> Self {
        self.inflow = Some(c);
        self
    }

    pub fn with_outflow(mut self, c: RegimeCondition<T>) -> Self {
        self.outflow = Some(c);
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn condition(&self, regime: Regime) -> Result<&RegimeCondition<T>> {
        match regime {
            Regime::Inflow => self.inflow.as_ref(),
            Regime::Outflow => self.outflow.as_ref(),
        }
        .ok_or_else(|| Error::RegimeChange {
            face: self.face.name().to_string(),
            regime: regime.name(),
        })
    }

    fn any_variant(&self) -> &'static str {
        self.inflow
            .as_ref()
            .or(self.outflow.as_ref())
            .map_or("none", |c| c.variant.name())
    }

    pub fn regime(&self, spec: &EquationSpec<T>, u: &[T], normal: [T; 2]) -> Result<Regime> {
        let vn = spec.normal_velocity(u, normal);
        if vn.abs() < spec.degeneracy_threshold {
            return Err(Error::Degenerate {
                variant: self.any_variant(),
                quantity: "u_n",
                value: vn.abs().to_f64_lossy(),
                threshold: spec.degeneracy_threshold.to_f64_lossy(),
            });
        }
        Ok(if vn < T::zero() {
            Regime::Inflow
        } else {
            Regime::Outflow
        })
    }

    /// Rotation, split, data and condition residual at one boundary point.
    ///
    /// `shear` is the rotated viscous flux (εF̃_n, εF̃_τ), used by the
    /// extended variant only.
    pub fn evaluate(
        &self,
        spec: &EquationSpec<T>,
        u: &[T],
        shear: Option<[T; 2]>,
        normal: [T; 2],
        x: [T; 2],
        t: T,
    ) -> Result<PointEvaluation<T>> {
        let regime = self.regime(spec, u, normal)?;
        let cond = self.condition(regime)?;
        let z = extended_z(spec, cond.variant, u, shear, normal);
        let rotation = rotation_from_z(spec, cond.variant, &z, normal)?;
        let split = characteristic_split(&rotation, self.split_tolerance);
        self.check_split(cond, &split)?;
        let g = self.data_value(spec, cond, &split, normal, x, t)?;
        let residual = condition_residual(cond, &split, &g);
        Ok(PointEvaluation {
            regime,
            rotation,
            split,
            g,
            residual,
        })
    }

    fn check_split(&self, cond: &RegimeCondition<T>, split: &Split<T>) -> Result<()> {
        if split.minus.len() != cond.m_minus() || split.plus.len() != cond.m_plus() {
            return Err(Error::SplitMismatch {
                face: self.face.name().to_string(),
                detail: format!(
                    "{} has {} incoming / {} outgoing characteristics, R is {}x{}",
                    cond.variant,
                    split.minus.len(),
                    split.plus.len(),
                    cond.m_minus(),
                    cond.m_plus()
                ),
            });
        }
        Ok(())
    }

    fn data_value(
        &self,
        spec: &EquationSpec<T>,
        cond: &RegimeCondition<T>,
        split: &Split<T>,
        normal: [T; 2],
        x: [T; 2],
        t: T,
    ) -> Result<Vec<T>> {
        let m = cond.m_minus();
        let g = match &cond.data {
            BoundaryData::Zero => vec![T::zero(); m],
            BoundaryData::Constant(g) => g.clone(),
            BoundaryData::Function(f) => f(x, t),
            BoundaryData::Reference(f) => {
                let reference = f(x, t);
                let shear = reference
                    .gradients
                    .as_ref()
                    .map(|grads| spec.viscous_flux(grads).rotated_shear(spec.epsilon, normal));
                let z = extended_z(spec, cond.variant, &reference.u, shear, normal);
                let rot = rotation_from_z(spec, cond.variant, &z, normal)?;
                let ref_split = characteristic_split(&rot, self.split_tolerance);
                if ref_split.minus != split.minus {
                    return Err(Error::SplitMismatch {
                        face: self.face.name().to_string(),
                        detail: "reference state has a different characteristic split".into(),
                    });
                }
                let zero = vec![T::zero(); m];
                let lhs = condition_residual(cond, &ref_split, &zero);
                cond.s_inv.matvec(&lhs)
            }
        };
        if g.len() != m {
            return Err(Error::ShapeMismatch {
                expected: m,
                got: g.len(),
            });
        }
        Ok(g)
    }
}

/// Rotated vector z, extended by the shear for the viscous variant.
pub(crate) fn extended_z<T: Real>(
    spec: &EquationSpec<T>,
    variant: Variant,
    u: &[T],
    shear: Option<[T; 2]>,
    normal: [T; 2],
) -> Vec<T> {
    let mut z = spec.rotate(u, normal);
    if variant == Variant::InseExtended {
        z.extend(shear.unwrap_or([T::zero(), T::zero()]));
    }
    z
}

#[derive(Clone, Debug)]
pub struct PointEvaluation<T> {
    pub regime: Regime,
    pub rotation: BoundaryRotation<T>,
    pub split: Split<T>,
    pub g: Vec<T>,
    /// r = √|Λ⁻|W⁻ − R√Λ⁺W⁺ − S G.
    pub residual: Vec<T>,
}

impl<T: Real> PointEvaluation<T> {
    /// WᵀΛW + 2(W⁻)ᵀΣ r with Σ = √|Λ⁻|.
    pub fn weak_boundary_term(&self) -> T {
        let sigma = sigma_matrix(&self.split.lambda_minus);
        let penalty: T = (0..sigma.len())
            .map(|k| self.split.w_minus[k] * sigma[k] * self.residual[k])
            .sum();
        self.rotation.form() + T::lit(2.0) * penalty
    }
}

/// √|Λ⁻|W⁻ − R√Λ⁺W⁺ − S G.
pub fn condition_residual<T: Real>(cond: &RegimeCondition<T>, split: &Split<T>, g: &[T]) -> Vec<T> {
    let a: Vec<T> = split
        .lambda_minus
        .iter()
        .zip(&split.w_minus)
        .map(|(l, w)| l.abs().sqrt() * *w)
        .collect();
    let v: Vec<T> = split
        .lambda_plus
        .iter()
        .zip(&split.w_plus)
        .map(|(l, w)| l.max(T::zero()).sqrt() * *w)
        .collect();
    let rv = cond.r.matvec(&v);
    let sg = cond.s.matvec(g);
    (0..a.len()).map(|k| a[k] - rv[k] - sg[k]).collect()
}

/// Σ = √|Λ⁻| (diagonal).
pub fn sigma_matrix<T: Real>(lambda_minus: &[T]) -> Vec<T> {
    lambda_minus.iter().map(|l| l.abs().sqrt()).collect()
}

/// Original-variable boundary operator L = S⁻¹(I⁻ − R I⁺)√|Λ| T⁻¹ at a
/// point, so that L z − G = S⁻¹ r.
#[derive(Clone, Debug)]
pub struct BoundaryOperator<T> {
    pub l: Matrix<T>,
    pub evaluation: PointEvaluation<T>,
}

impl<T: Real> BoundaryOperator<T> {
    /// L z − G.
    pub fn residual(&self) -> Vec<T> {
        let lz = self.l.matvec(&self.evaluation.rotation.z);
        lz.iter().zip(&self.evaluation.g).map(|(&a, &b)| a - b).collect()
    }
}

pub fn boundary_operator<T: Real>(
    spec: &EquationSpec<T>,
    bc: &BoundarySpec<T>,
    u: &[T],
    shear: Option<[T; 2]>,
    normal: [T; 2],
    x: [T; 2],
    t: T,
) -> Result<BoundaryOperator<T>> {
    let ev = bc.evaluate(spec, u, shear, normal, x, t)?;
    let cond = bc.condition(ev.regime)?;
    let t_inv = &ev.rotation.t_inv;
    let cols = t_inv.cols();
    let m = ev.split.minus.len();
    let mut raw = Matrix::zeros(m, cols);
    for (k, &i) in ev.split.minus.iter().enumerate() {
        let sk = ev.rotation.lambda[i].abs().sqrt();
        for c in 0..cols {
            raw[(k, c)] = sk * t_inv[(i, c)];
        }
        for (p, &j) in ev.split.plus.iter().enumerate() {
            let sp = ev.rotation.lambda[j].max(T::zero()).sqrt() * cond.r[(k, p)];
            for c in 0..cols {
                raw[(k, c)] = raw[(k, c)] - sp * t_inv[(j, c)];
            }
        }
    }
    Ok(BoundaryOperator {
        l: cond.s_inv.matmul(&raw),
        evaluation: ev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_matrix(&[-4.0]), vec![2.0]);
        assert!(sigma_matrix::<f64>(&[]).is_empty());
    }

    #[test]
    fn iee_outflow_operator_row() {
        let spec = EquationSpec::<f64>::iee();
        let bc = BoundarySpec::new(FaceId::East, Mode::Weak).with_outflow(
            RegimeCondition::characteristic(Variant::IeeChar, 1, 2, BoundaryData::Zero),
        );
        let u = [4.0, 0.3, 0.7];
        let op = boundary_operator(&spec, &bc, &u, None, [1.0, 0.0], [1.0, 0.5], 0.0).unwrap();
        assert_eq!(op.l.shape(), (1, 3));
        assert_eq!(op.l.row(0), &[0.0, 0.0, 0.5]);
        let r = op.residual();
        assert!((r[0] - 0.35).abs() < 1e-15);
    }

    #[test]
    fn missing_regime_is_an_error() {
        let spec = EquationSpec::<f64>::iee();
        let bc = BoundarySpec::new(FaceId::East, Mode::Weak).with_outflow(
            RegimeCondition::characteristic(Variant::IeeChar, 1, 2, BoundaryData::Zero),
        );
        let err = bc.evaluate(&spec, &[-1.0, 0.0, 0.0], None, [1.0, 0.0], [1.0, 0.0], 0.0);
        assert!(matches!(err, Err(Error::RegimeChange { regime: "inflow", .. })));
        let err = bc.evaluate(&spec, &[0.0, 1.0, 0.0], None, [1.0, 0.0], [1.0, 0.0], 0.0);
        assert!(matches!(err, Err(Error::Degenerate { .. })));
    }

    #[test]
    fn wrong_dimensions_are_reported() {
        let spec = EquationSpec::<f64>::iee();
        let bc = BoundarySpec::new(FaceId::West, Mode::Weak).with_inflow(
            RegimeCondition::characteristic(Variant::IeeChar, 1, 2, BoundaryData::Zero),
        );
        let err = bc.evaluate(&spec, &[1.0, 0.0, 0.0], None, [-1.0, 0.0], [0.0, 0.0], 0.0);
        assert!(matches!(err, Err(Error::SplitMismatch { .. })));
    }

    #[test]
    fn singular_s_rejected() {
        let err = RegimeCondition::<f64>::new(
            Variant::IeeChar,
            Matrix::zeros(1, 2),
            Matrix::zeros(1, 1),
            BoundaryData::Zero,
        );
        assert!(matches!(err, Err(Error::SingularS)));
    }
}
