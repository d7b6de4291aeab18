use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Real, Scalar};

use super::{quadratic, EquationSpec, System, ViscousFlux};

/// Catalog of boundary-term rotations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// W = (u_n + p/u_n, u_τ, p), Λ = (u_n, u_n, −1/u_n).
    IeeChar,
    /// W = (u_n, u_τ, √p), Λ = (u_n, u_n, 2u_n). Experimental.
    IeeSqrtPressure,
    /// W = (U_1, U_n, U_τ), Λ = (u_n, u_n/2, u_n/2).
    SwePrimitive,
    /// W = (U_1², U_1² + U_n², U_n U_τ), Λ = (−1, 1, 1)/(2 U_n √U_1).
    SweChar,
    /// W = (φ_1, φ_2 + 2φ_4²/φ_2, φ_3, φ_4) with the Ψ-switched last eigenvalue.
    CeeChar,
    /// W = Φ_r, Λ = (u_n, (γ−1)u_n/2, (γ−1)u_n/2, γ u_n).
    CeeContracted,
    /// Four-component viscous extension of [`Variant::IeeChar`].
    InseExtended,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::IeeChar,
        Variant::IeeSqrtPressure,
        Variant::SwePrimitive,
        Variant::SweChar,
        Variant::CeeChar,
        Variant::CeeContracted,
        Variant::InseExtended,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::IeeChar => "iee-char",
            Variant::IeeSqrtPressure => "iee-sqrt-pressure",
            Variant::SwePrimitive => "swe-primitive",
            Variant::SweChar => "swe-char",
            Variant::CeeChar => "cee-char",
            Variant::CeeContracted => "cee-contracted",
            Variant::InseExtended => "inse-extended",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }

    pub fn is_experimental(self) -> bool {
        self == Variant::IeeSqrtPressure
    }

    pub fn supports(self, system: System) -> bool {
        match self {
            Variant::IeeChar | Variant::IeeSqrtPressure => system.is_incompressible(),
            Variant::SwePrimitive | Variant::SweChar => system == System::Swe,
            Variant::CeeChar | Variant::CeeContracted => system == System::Cee,
            Variant::InseExtended => system == System::Inse,
        }
    }

    /// Length of the rotated vector z (state plus εF̃ for the extension).
    pub fn z_len(self, n: usize) -> usize {
        if self == Variant::InseExtended {
            5
        } else {
            n
        }
    }

    pub fn w_len(self, n: usize) -> usize {
        if self == Variant::InseExtended {
            4
        } else {
            n
        }
    }

    /// The z component adjusted when W component `k` is imposed strongly.
    pub fn incoming_z(self, k: usize) -> usize {
        match (self, k) {
            (Variant::InseExtended, 3) => 4,
            _ => k,
        }
    }

    fn accepts_frozen(self) -> bool {
        matches!(self, Variant::IeeChar | Variant::InseExtended)
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Diagonalized boundary form at one boundary point: T⁻¹ z = W and
/// s WᵀΛW = Uᵀ(n_i A_i)U (minus the viscous terms for the extension).
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryRotation<T> {
    pub variant: Variant,
    pub z: Vec<T>,
    pub w: Vec<T>,
    pub lambda: Vec<T>,
    pub t_inv: Matrix<T>,
    pub normal_velocity: T,
}

impl<T: Real> BoundaryRotation<T> {
    /// WᵀΛW.
    pub fn form(&self) -> T {
        self.w
            .iter()
            .zip(&self.lambda)
            .map(|(&w, &l)| l * w * w)
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Split<T> {
    pub minus: Vec<usize>,
    pub plus: Vec<usize>,
    pub w_minus: Vec<T>,
    pub lambda_minus: Vec<T>,
    pub w_plus: Vec<T>,
    pub lambda_plus: Vec<T>,
}

/// Negative eigenvalues go to Λ⁻; anything with λ ≥ −tol·max|λ| to Λ⁺.
pub fn characteristic_split<T: Real>(rot: &BoundaryRotation<T>, relative_tolerance: T) -> Split<T> {
    let scale = rot.lambda.iter().fold(T::zero(), |m, l| m.max(l.abs()));
    let tol = relative_tolerance * scale;
    let (minus, plus): (Vec<usize>, Vec<usize>) = (0..rot.lambda.len()).partition(|&k| rot.lambda[k] < -tol);
    let pick = |idx: &[usize], v: &[T]| idx.iter().map(|&k| v[k]).collect::<Vec<_>>();
    Split {
        w_minus: pick(&minus, &rot.w),
        lambda_minus: pick(&minus, &rot.lambda),
        w_plus: pick(&plus, &rot.w),
        lambda_plus: pick(&plus, &rot.lambda),
        minus,
        plus,
    }
}

/// Ψ = 1 − 2(γ−1)/(γ(2−γ)M²).
pub fn psi_from_mach_squared<T: Scalar>(gamma: T, mach_squared: T) -> Result<T> {
    if mach_squared.is_zero() {
        return Err(Error::ZeroMach);
    }
    Ok(T::one() - psi_root_mach_squared(gamma) / mach_squared)
}

pub fn psi_factor<T: Scalar>(gamma: T, mach: T) -> Result<T> {
    psi_from_mach_squared(gamma, mach.clone() * mach)
}

/// M² at which Ψ changes sign.
pub fn psi_root_mach_squared<T: Scalar>(gamma: T) -> T {
    let two = T::from_int(2);
    two.clone() * (gamma.clone() - T::one()) / (gamma.clone() * (two - gamma))
}

fn degenerate<T: Real>(variant: Variant, quantity: &'static str, value: T, threshold: T) -> Error {
    Error::Degenerate {
        variant: variant.name(),
        quantity,
        value: value.abs().to_f64_lossy(),
        threshold: threshold.to_f64_lossy(),
    }
}

/// Rotation from an already rotated vector z. The normal is only used for
/// frozen coefficients.
pub fn rotation_from_z<T: Real>(
    spec: &EquationSpec<T>,
    variant: Variant,
    z: &[T],
    normal: [T; 2],
) -> Result<BoundaryRotation<T>> {
    let n = spec.n();
    if !variant.supports(spec.system) {
        return Err(Error::IncompatibleVariant {
            variant: variant.name(),
            system: spec.system.name(),
        });
    }
    if spec.is_frozen() && !variant.accepts_frozen() {
        return Err(Error::FrozenUnsupported(variant.name()));
    }
    if z.len() != variant.z_len(n) {
        return Err(Error::ShapeMismatch {
            expected: variant.z_len(n),
            got: z.len(),
        });
    }
    let u = spec.unrotate(z, normal);
    spec.check_state(&u)?;
    let delta = spec.degeneracy_threshold;
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let one = T::one();
    let vn = spec.normal_velocity(&u, normal);
    let mut t_inv = Matrix::identity(variant.w_len(n));
    let lambda: Vec<T>;
    match variant {
        Variant::IeeChar => {
            if vn.abs() < delta {
                return Err(degenerate(variant, "u_n", vn, delta));
            }
            t_inv[(0, 2)] = one / vn;
            lambda = vec![vn, vn, -one / vn];
        }
        Variant::IeeSqrtPressure => {
            if !(z[2] > T::zero()) {
                return Err(Error::InadmissibleState(format!(
                    "{variant} needs positive pressure, got {}",
                    z[2]
                )));
            }
            t_inv[(2, 2)] = one / z[2].sqrt();
            lambda = vec![vn, vn, two * vn];
        }
        Variant::SwePrimitive => {
            lambda = vec![vn, half * vn, half * vn];
        }
        Variant::SweChar => {
            let (u1, un) = (z[0], z[1]);
            if un.abs() < delta {
                return Err(degenerate(variant, "U_n", un, delta));
            }
            t_inv = Matrix::from_rows(vec![
                vec![u1, T::zero(), T::zero()],
                vec![u1, un, T::zero()],
                vec![T::zero(), T::zero(), un],
            ]);
            let k = one / (two * un * u1.sqrt());
            lambda = vec![-k, k, k];
        }
        Variant::CeeChar => {
            let (phi2, phi4) = (z[1], z[3]);
            if phi2.abs() < delta {
                return Err(degenerate(variant, "phi_2", phi2, delta));
            }
            t_inv[(1, 3)] = two * phi4 / phi2;
            let g = spec.gamma;
            let mach2 = phi2 * phi2 / (g * phi4 * phi4);
            let psi = psi_from_mach_squared(g, mach2)?;
            let q = (g - one) / two * vn;
            lambda = vec![vn, q, q, (two - g) * vn * psi];
        }
        Variant::CeeContracted => {
            let g = spec.gamma;
            let q = (g - one) / two * vn;
            lambda = vec![vn, q, q, g * vn];
        }
        Variant::InseExtended => {
            if vn.abs() < delta {
                return Err(degenerate(variant, "u_n", vn, delta));
            }
            let zero = T::zero();
            t_inv = Matrix::from_rows(vec![
                vec![vn, zero, one, -one, zero],
                vec![zero, vn, zero, zero, -one],
                vec![zero, zero, one, -one, zero],
                vec![zero, zero, zero, zero, -one],
            ]);
            let k = one / vn;
            lambda = vec![k, k, -k, -k];
        }
    }
    let w = t_inv.matvec(z);
    Ok(BoundaryRotation {
        variant,
        z: z.to_vec(),
        w,
        lambda,
        t_inv,
        normal_velocity: vn,
    })
}

/// Rotation of the inviscid boundary form at a point state `u`.
///
/// For [`Variant::InseExtended`] the viscous part is taken as zero; use
/// [`extended_rotation_viscous`] to include it.
pub fn boundary_rotation<T: Real>(
    spec: &EquationSpec<T>,
    u: &[T],
    normal: [T; 2],
    variant: Variant,
) -> Result<BoundaryRotation<T>> {
    spec.check_state(u)?;
    let mut z = spec.rotate(u, normal);
    if variant == Variant::InseExtended {
        z.extend([T::zero(), T::zero()]);
    }
    rotation_from_z(spec, variant, &z, normal)
}

/// The extended viscous rotation with εF̃ = ε Rot Σ n_i D_i.
pub fn extended_rotation_viscous<T: Real>(
    spec: &EquationSpec<T>,
    u: &[T],
    flux: &ViscousFlux<T>,
    normal: [T; 2],
) -> Result<BoundaryRotation<T>> {
    spec.check_state(u)?;
    let mut z = spec.rotate(u, normal);
    z.extend(flux.rotated_shear(spec.epsilon, normal));
    rotation_from_z(spec, Variant::InseExtended, &z, normal)
}

/// Uᵀ(n_i A_i)U / s evaluated from the flux matrices directly, i.e. the
/// quantity every catalog WᵀΛW must reproduce.
pub fn physical_form<T: Real>(spec: &EquationSpec<T>, u: &[T], normal: [T; 2]) -> T {
    let n = spec.n();
    let mut a = [[T::zero(); 4]; 4];
    let mut total = T::zero();
    for (dir, &nd) in normal.iter().enumerate() {
        if nd.is_zero() {
            continue;
        }
        spec.fill_flux(dir, u, &mut a);
        total = total + nd * quadratic(&a, u, n);
    }
    total / spec.form_scale()
}
