use crate::equations::{psi_from_mach_squared, EquationSpec, System, Variant};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::sbp::FaceId;
use crate::scalar::Real;

use super::{BoundaryData, BoundarySpec, Mode, ReferenceFn, RegimeCondition};

pub const PRESET_NAMES: [&str; 11] = [
    "iee-dirichlet-inflow",
    "iee-characteristic-inflow",
    "iee-pressure-outflow",
    "swe-dirichlet-inflow",
    "swe-characteristic-inflow",
    "swe-outflow",
    "cee-characteristic-inflow",
    "cee-dirichlet-inflow",
    "cee-outflow",
    "inse-velocity-inflow",
    "inse-stress-pressure-outflow",
];

/// Everything a preset needs besides its name.
#[derive(Clone)]
pub struct PresetContext<T> {
    pub spec: EquationSpec<T>,
    pub face: FaceId,
    pub mode: Mode,
    /// Data source; without it the preset is homogeneous.
    pub reference: Option<ReferenceFn<T>>,
}

impl<T: Real> PresetContext<T> {
    pub fn new(spec: EquationSpec<T>, face: FaceId, mode: Mode) -> Self {
        Self {
            spec,
            face,
            mode,
            reference: None,
        }
    }

    pub fn with_reference(mut self, reference: ReferenceFn<T>) -> Self {
        self.reference = Some(reference);
        self
    }

    fn data(&self) -> BoundaryData<T> {
        self.reference
            .clone()
            .map_or(BoundaryData::Zero, BoundaryData::Reference)
    }

    fn require(&self, system: System, name: &str) -> Result<()> {
        if self.spec.system != system {
            return Err(Error::InvalidParameter(format!(
                "preset {name} is for {}, not {}",
                system.name(),
                self.spec.system.name()
            )));
        }
        Ok(())
    }
}

fn column<T: Real>(values: &[T]) -> Matrix<T> {
    Matrix::from_rows(values.iter().map(|&v| vec![v]).collect())
}

/// Boundary specification for a named example condition.
pub fn preset_bc<T: Real>(name: &str, ctx: &PresetContext<T>) -> Result<BoundarySpec<T>> {
    let (z, one) = (T::zero(), T::one());
    let base = BoundarySpec::new(ctx.face, ctx.mode);
    let data = ctx.data();
    let incompressible = |ctx: &PresetContext<T>| {
        if ctx.spec.system.is_incompressible() {
            Ok(())
        } else {
            ctx.require(System::Iee, name)
        }
    };
    let spec = match name {
        "iee-dirichlet-inflow" => {
            incompressible(ctx)?;
            // R = (−1, 0)ᵀ cancels p/u_n for u_n < 0
            base.with_inflow(RegimeCondition::new(
                Variant::IeeChar,
                column(&[-one, z]),
                Matrix::identity(2),
                data,
            )?)
        }
        "iee-characteristic-inflow" => {
            incompressible(ctx)?;
            base.with_inflow(RegimeCondition::characteristic(Variant::IeeChar, 2, 1, data))
        }
        "iee-pressure-outflow" => {
            incompressible(ctx)?;
            base.with_outflow(RegimeCondition::characteristic(Variant::IeeChar, 1, 2, data))
        }
        "swe-dirichlet-inflow" => {
            ctx.require(System::Swe, name)?;
            base.with_inflow(RegimeCondition::new(
                Variant::SweChar,
                column(&[one, z]),
                Matrix::identity(2),
                data,
            )?)
        }
        "swe-characteristic-inflow" => {
            ctx.require(System::Swe, name)?;
            base.with_inflow(RegimeCondition::characteristic(Variant::SweChar, 2, 1, data))
        }
        "swe-outflow" => {
            ctx.require(System::Swe, name)?;
            base.with_outflow(RegimeCondition::characteristic(Variant::SwePrimitive, 0, 3, data))
        }
        "cee-characteristic-inflow" => {
            ctx.require(System::Cee, name)?;
            base.with_inflow(RegimeCondition::characteristic(Variant::CeeChar, 3, 1, data))
        }
        "cee-dirichlet-inflow" => {
            ctx.require(System::Cee, name)?;
            let state = match &ctx.reference {
                Some(f) => f([z, z], z).u,
                None => default_cee_inflow(&ctx.spec, ctx.face)?,
            };
            let r2 = cee_dirichlet_r2(&ctx.spec, &state, ctx.face.normal())?;
            base.with_inflow(RegimeCondition::new(
                Variant::CeeChar,
                column(&[z, r2, z]),
                Matrix::identity(3),
                data,
            )?)
        }
        "cee-outflow" => {
            ctx.require(System::Cee, name)?;
            base.with_outflow(RegimeCondition::characteristic(Variant::CeeContracted, 0, 4, data))
        }
        "inse-velocity-inflow" => {
            ctx.require(System::Inse, name)?;
            base.with_inflow(RegimeCondition::new(
                Variant::InseExtended,
                Matrix::identity(2),
                Matrix::identity(2),
                data,
            )?)
        }
        "inse-stress-pressure-outflow" => {
            ctx.require(System::Inse, name)?;
            base.with_outflow(RegimeCondition::characteristic(Variant::InseExtended, 2, 2, data))
        }
        _ => return Err(Error::UnknownPreset(name.to_string())),
    };
    Ok(spec)
}

/// R₂ = (2φ₄/φ₂)√((γ−1)/(2(2−γ)|Ψ|)) at a state, so that 1 − R₂² = −1/|Ψ|.
pub fn cee_dirichlet_r2<T: Real>(spec: &EquationSpec<T>, u: &[T], normal: [T; 2]) -> Result<T> {
    spec.check_state(u)?;
    let z = spec.rotate(u, normal);
    let (phi2, phi4) = (z[1], z[3]);
    if phi2.abs() < spec.degeneracy_threshold {
        return Err(Error::ZeroMach);
    }
    let g = spec.gamma;
    let two = T::lit(2.0);
    let psi = psi_from_mach_squared(g, phi2 * phi2 / (g * phi4 * phi4))?;
    Ok(two * phi4 / phi2 * ((g - T::one()) / (two * (two - g) * psi.abs())).sqrt())
}

/// Unit density and pressure entering at normal Mach 0.5.
fn default_cee_inflow<T: Real>(spec: &EquationSpec<T>, face: FaceId) -> Result<Vec<T>> {
    let c = spec.gamma.sqrt();
    let n = face.normal::<T>();
    let speed = -T::lit(0.5) * c;
    spec.from_primitive(&[T::one(), speed * n[0], speed * n[1], T::one()])
}

/// Inflow/outflow variant pairings for the shallow water equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlowScenario {
    /// Primitive form at inflow and outflow.
    PrimitivePrimitive,
    /// Characteristic form at inflow and outflow.
    CharChar,
    /// Primitive at inflow, characteristic at outflow.
    PrimitiveChar,
    /// Characteristic at inflow, primitive at outflow.
    CharPrimitive,
}

impl FlowScenario {
    pub const ALL: [FlowScenario; 4] = [
        FlowScenario::PrimitivePrimitive,
        FlowScenario::CharChar,
        FlowScenario::PrimitiveChar,
        FlowScenario::CharPrimitive,
    ];

    pub fn from_index(k: usize) -> Option<Self> {
        k.checked_sub(1).and_then(|k| Self::ALL.get(k).copied())
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&s| s == self).unwrap() + 1
    }

    pub fn variants(self) -> (Variant, Variant) {
        use Variant::{SweChar as C, SwePrimitive as P};
        match self {
            FlowScenario::PrimitivePrimitive => (P, P),
            FlowScenario::CharChar => (C, C),
            FlowScenario::PrimitiveChar => (P, C),
            FlowScenario::CharPrimitive => (C, P),
        }
    }
}

/// Characteristic (R = 0, S = I) conditions for both regimes of a shallow
/// water face, with the variants of the scenario.
pub fn scenario_bc<T: Real>(scenario: FlowScenario, ctx: &PresetContext<T>) -> Result<BoundarySpec<T>> {
    ctx.require(System::Swe, "scenario")?;
    let (inflow, outflow) = scenario.variants();
    // (m⁻, m⁺) per regime
    let m_in = if inflow == Variant::SwePrimitive { (3, 0) } else { (2, 1) };
    let m_out = if outflow == Variant::SwePrimitive { (0, 3) } else { (1, 2) };
    Ok(BoundarySpec::new(ctx.face, ctx.mode)
        .with_inflow(RegimeCondition::characteristic(inflow, m_in.0, m_in.1, ctx.data()))
        .with_outflow(RegimeCondition::characteristic(outflow, m_out.0, m_out.1, ctx.data())))
}
