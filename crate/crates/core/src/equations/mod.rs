//! The four flow systems in skew-symmetric form
//! `P U_t + (A_i U)_{x_i} + A_iᵀ U_{x_i} + C U = ε (P U_{x_i})_{x_i}`.

mod rotation;
mod state;

pub use rotation::{
    boundary_rotation, characteristic_split, extended_rotation_viscous, physical_form,
    psi_factor, psi_from_mach_squared, psi_root_mach_squared, rotation_from_z, BoundaryRotation,
    Split, Variant,
};
pub use state::StateField;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum System {
    /// Incompressible Euler, U = (u, v, p).
    Iee,
    /// Shallow water, U = (φ, √φ u, √φ v).
    Swe,
    /// Compressible Euler, Φ = (√ρ, √ρ u, √ρ v, √p).
    Cee,
    /// Incompressible Navier-Stokes, U = (u, v, p).
    Inse,
}

impl System {
    pub fn name(self) -> &'static str {
        match self {
            System::Iee => "iee",
            System::Swe => "swe",
            System::Cee => "cee",
            System::Inse => "inse",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [System::Iee, System::Swe, System::Cee, System::Inse]
            .into_iter()
            .find(|sys| sys.name() == s)
    }

    pub fn components(self) -> usize {
        match self {
            System::Cee => 4,
            _ => 3,
        }
    }

    /// Indices of the two velocity-like components.
    pub fn velocity_components(self) -> (usize, usize) {
        match self {
            System::Iee | System::Inse => (0, 1),
            System::Swe | System::Cee => (1, 2),
        }
    }

    pub fn is_incompressible(self) -> bool {
        matches!(self, System::Iee | System::Inse)
    }
}

/// Where the flux matrices take their coefficients from.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficients<T> {
    /// A_i = A_i(U).
    Nonlinear,
    /// A_i = A_i(V) for a fixed state V (linear problem).
    Frozen(Vec<T>),
}

pub(crate) type Mat4<T> = [[T; 4]; 4];

#[derive(Clone, Debug)]
pub struct FluxMatrices<T> {
    pub a: Vec<Matrix<T>>,
    /// B_i, always equal to A_iᵀ.
    pub b: Vec<Matrix<T>>,
    pub c: Matrix<T>,
}

/// Viscous fluxes D_i = P U_{x_i} at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct ViscousFlux<T> {
    pub d: Vec<Vec<T>>,
}

impl<T: Real> ViscousFlux<T> {
    /// ε Σ n_i D_i rotated to (normal, tangential) velocity components.
    pub fn rotated_shear(&self, epsilon: T, normal: [T; 2]) -> [T; 2] {
        let mut f = [T::zero(); 2];
        for (i, di) in self.d.iter().enumerate() {
            f[0] = f[0] + normal[i] * di[0];
            f[1] = f[1] + normal[i] * di[1];
        }
        let (nx, ny) = (normal[0], normal[1]);
        [
            epsilon * (nx * f[0] + ny * f[1]),
            epsilon * (-ny * f[0] + nx * f[1]),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquationSpec<T> {
    pub system: System,
    pub gamma: T,
    pub epsilon: T,
    pub coriolis: T,
    pub alpha: T,
    pub beta: T,
    /// Artificial-compressibility weight replacing the zero pressure row of P.
    pub kappa: T,
    pub coefficients: Coefficients<T>,
    /// |u_n| below this is a degenerate boundary point.
    pub degeneracy_threshold: T,
}

impl<T: Real> EquationSpec<T> {
    fn base(system: System) -> Self {
        Self {
            system,
            gamma: T::lit(1.4),
            epsilon: T::zero(),
            coriolis: T::zero(),
            alpha: T::lit(0.2),
            beta: T::lit(0.2),
            kappa: T::lit(1e-2),
            coefficients: Coefficients::Nonlinear,
            degeneracy_threshold: T::lit(1e-8),
        }
    }

    pub fn iee() -> Self {
        Self::base(System::Iee)
    }

    pub fn swe(alpha: T, beta: T, coriolis: T) -> Self {
        Self {
            alpha,
            beta,
            coriolis,
            ..Self::base(System::Swe)
        }
    }

    pub fn cee(gamma: T) -> Self {
        Self {
            gamma,
            ..Self::base(System::Cee)
        }
    }

    pub fn inse(epsilon: T) -> Self {
        Self {
            epsilon,
            ..Self::base(System::Inse)
        }
    }

    pub fn for_system(system: System) -> Self {
        Self::base(system)
    }

    pub fn with_kappa(mut self, kappa: T) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn frozen(mut self, v: Vec<T>) -> Self {
        self.coefficients = Coefficients::Frozen(v);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.system == System::Cee && !(self.gamma > T::one() && self.gamma < T::lit(2.0)) {
            return bad(format!("gamma must satisfy 1 < gamma < 2, got {}", self.gamma));
        }
        if self.epsilon < T::zero() || !self.epsilon.is_finite() {
            return bad(format!("epsilon must be >= 0, got {}", self.epsilon));
        }
        if self.system.is_incompressible() && !(self.kappa > T::zero()) {
            return bad(format!("kappa must be > 0, got {}", self.kappa));
        }
        if !(self.degeneracy_threshold > T::zero()) {
            return bad("degeneracy threshold must be > 0".into());
        }
        if let Coefficients::Frozen(v) = &self.coefficients {
            if !self.system.is_incompressible() {
                return Err(Error::FrozenUnsupported(self.system.name()));
            }
            if v.len() != self.n() {
                return Err(Error::ShapeMismatch {
                    expected: self.n(),
                    got: v.len(),
                });
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.system.components()
    }

    /// Diagonal of the physical norm matrix P.
    pub fn norm_diag(&self) -> Vec<T> {
        let g = (self.gamma - T::one()) / T::lit(2.0);
        match self.system {
            System::Iee | System::Inse => vec![T::one(), T::one(), T::zero()],
            System::Swe => vec![T::one(); 3],
            System::Cee => vec![T::one(), g, g, T::one()],
        }
    }

    /// Diagonal of the matrix multiplying U_t in the evolved system.
    pub fn evolution_diag(&self) -> Vec<T> {
        let mut p = self.norm_diag();
        if self.system.is_incompressible() {
            p[2] = self.kappa;
        }
        p
    }

    /// The factor s in Uᵀ(n_i A_i)U = s WᵀΛW for the catalog rotations.
    pub fn form_scale(&self) -> T {
        match self.system {
            System::Swe => T::one(),
            _ => T::lit(0.5),
        }
    }

    pub fn is_frozen(&self) -> bool {
        matches!(self.coefficients, Coefficients::Frozen(_))
    }

    /// Positivity and finiteness of a point state.
    pub fn check_state(&self, u: &[T]) -> Result<()> {
        if u.len() != self.n() {
            return Err(Error::ShapeMismatch {
                expected: self.n(),
                got: u.len(),
            });
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::InadmissibleState("non-finite component".into()));
        }
        match self.system {
            System::Swe if !(u[0] > T::zero()) => Err(Error::InadmissibleState(format!(
                "geopotential must be positive, got {}",
                u[0]
            ))),
            System::Cee if !(u[0] > T::zero() && u[3] > T::zero()) => {
                Err(Error::InadmissibleState(format!(
                    "sqrt(rho) and sqrt(p) must be positive, got {} and {}",
                    u[0], u[3]
                )))
            }
            _ => Ok(()),
        }
    }

    /// Rotates the velocity-like pair to (normal, tangential).
    pub fn rotate(&self, u: &[T], normal: [T; 2]) -> Vec<T> {
        let (a, b) = self.system.velocity_components();
        let mut z = u.to_vec();
        z[a] = normal[0] * u[a] + normal[1] * u[b];
        z[b] = -normal[1] * u[a] + normal[0] * u[b];
        z
    }

    pub fn unrotate(&self, z: &[T], normal: [T; 2]) -> Vec<T> {
        let (a, b) = self.system.velocity_components();
        let mut u = z[..self.n()].to_vec();
        u[a] = normal[0] * z[a] - normal[1] * z[b];
        u[b] = normal[1] * z[a] + normal[0] * z[b];
        u
    }

    /// Transport velocity normal to the boundary (frozen V when linear).
    pub fn normal_velocity(&self, u: &[T], normal: [T; 2]) -> T {
        let src = match &self.coefficients {
            Coefficients::Frozen(v) => v.as_slice(),
            Coefficients::Nonlinear => u,
        };
        let (a, b) = self.system.velocity_components();
        let m = normal[0] * src[a] + normal[1] * src[b];
        match self.system {
            System::Iee | System::Inse => m,
            System::Swe => m / src[0].sqrt(),
            System::Cee => m / src[0],
        }
    }

    /// Primitive variables: IEE/INSE (u, v, p), SWE (φ, u, v), CEE (ρ, u, v, p).
    pub fn from_primitive(&self, prim: &[T]) -> Result<Vec<T>> {
        let u = match self.system {
            System::Iee | System::Inse => prim.to_vec(),
            System::Swe => {
                let s = prim[0].sqrt();
                vec![prim[0], s * prim[1], s * prim[2]]
            }
            System::Cee => {
                let s = prim[0].sqrt();
                vec![s, s * prim[1], s * prim[2], prim[3].sqrt()]
            }
        };
        self.check_state(&u)?;
        Ok(u)
    }

    pub fn to_primitive(&self, u: &[T]) -> Vec<T> {
        match self.system {
            System::Iee | System::Inse => u.to_vec(),
            System::Swe => {
                let s = u[0].sqrt();
                vec![u[0], u[1] / s, u[2] / s]
            }
            System::Cee => vec![u[0] * u[0], u[1] / u[0], u[2] / u[0], u[3] * u[3]],
        }
    }

    /// Fills A_dir at `u` into the leading n×n block of `a`.
    pub(crate) fn fill_flux(&self, dir: usize, u: &[T], a: &mut Mat4<T>) {
        let z = T::zero();
        let half = T::lit(0.5);
        let c = match &self.coefficients {
            Coefficients::Frozen(v) => v.as_slice(),
            Coefficients::Nonlinear => u,
        };
        *a = [[z; 4]; 4];
        match self.system {
            System::Iee | System::Inse => {
                let vel = c[dir];
                a[0][0] = half * vel;
                a[1][1] = half * vel;
                a[dir][2] = half;
                a[2][dir] = half;
            }
            System::Swe => {
                let (k, other) = if dir == 0 { (self.alpha, 2) } else { (self.beta, 1) };
                let m = dir + 1;
                let s = c[0].sqrt();
                let vel = c[m] / s;
                a[0][0] = k * vel;
                a[0][m] = (T::one() - T::lit(3.0) * k) * s;
                a[m][0] = T::lit(2.0) * k * s;
                a[m][m] = half * vel;
                a[other][other] = half * vel;
            }
            System::Cee => {
                let g = self.gamma;
                let m = dir + 1;
                let vel = c[m] / c[0];
                let q = (g - T::one()) / T::lit(2.0) * vel;
                a[0][0] = half * vel;
                a[1][1] = half * q;
                a[2][2] = half * q;
                a[3][m] = (g - T::one()) * c[3] / c[0];
                a[3][3] = half * (T::lit(2.0) - g) * vel;
            }
        }
    }

    pub fn flux_matrix(&self, dir: usize, u: &[T]) -> Matrix<T> {
        let mut a = [[T::zero(); 4]; 4];
        self.fill_flux(dir, u, &mut a);
        let n = self.n();
        Matrix::from_rows((0..n).map(|i| a[i][..n].to_vec()).collect())
    }

    pub fn coriolis_matrix(&self) -> Matrix<T> {
        let mut c = Matrix::zeros(self.n(), self.n());
        if self.system == System::Swe {
            c[(1, 2)] = -self.coriolis;
            c[(2, 1)] = self.coriolis;
        }
        c
    }

    pub fn flux_matrices(&self, u: &[T]) -> Result<FluxMatrices<T>> {
        self.check_state(u)?;
        let a: Vec<_> = (0..2).map(|d| self.flux_matrix(d, u)).collect();
        let b = a.iter().map(Matrix::transpose).collect();
        Ok(FluxMatrices {
            a,
            b,
            c: self.coriolis_matrix(),
        })
    }

    /// D_i = P U_{x_i} for each supplied gradient.
    pub fn viscous_flux(&self, gradients: &[Vec<T>]) -> ViscousFlux<T> {
        let p = self.norm_diag();
        ViscousFlux {
            d: gradients
                .iter()
                .map(|g| g.iter().zip(&p).map(|(&gx, &pc)| pc * gx).collect())
                .collect(),
        }
    }

    /// Φ = UᵀPU/2 and Ψ_i = UᵀA_iU at every node.
    pub fn entropy_functionals(&self, state: &StateField<T>) -> EntropyFields<T> {
        let p = self.norm_diag();
        let n = self.n();
        let mut a = [[T::zero(); 4]; 4];
        let mut phi = Vec::with_capacity(state.nodes());
        let mut psi = [Vec::with_capacity(state.nodes()), Vec::with_capacity(state.nodes())];
        for g in 0..state.nodes() {
            let u = state.node(g);
            phi.push(T::lit(0.5) * (0..n).map(|c| p[c] * u[c] * u[c]).sum::<T>());
            for (dir, out) in psi.iter_mut().enumerate() {
                self.fill_flux(dir, &u, &mut a);
                out.push(quadratic(&a, &u, n));
            }
        }
        let [psi1, psi2] = psi;
        EntropyFields { phi, psi1, psi2 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyFields<T> {
    pub phi: Vec<T>,
    pub psi1: Vec<T>,
    pub psi2: Vec<T>,
}

/// uᵀ A u over the leading n×n block.
pub(crate) fn quadratic<T: Real>(a: &Mat4<T>, u: &[T], n: usize) -> T {
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            acc = acc + u[i] * a[i][j] * u[j];
        }
    }
    acc
}
