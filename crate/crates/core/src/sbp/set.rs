use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::operator::{build_sbp_1d, SbpOperator1D};

#[derive(Clone, Debug, PartialEq)]
pub struct Axis<T> {
    pub nodes: usize,
    pub left: T,
    pub right: T,
}

/// Uniform tensor-product grid in one or two dimensions.
///
/// Nodes are numbered `g = i + nx * j` with `i` running along x.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    axes: Vec<Axis<T>>,
}

impl<T: Scalar> Grid<T> {
    pub fn new(axes: Vec<Axis<T>>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2, got {}",
                axes.len()
            )));
        }
        for (d, a) in axes.iter().enumerate() {
            if a.nodes < 2 {
                return Err(Error::InvalidGrid(format!("axis {d}: need at least 2 nodes")));
            }
            if !(a.right > a.left) {
                return Err(Error::InvalidGrid(format!("axis {d}: right end must exceed left end")));
            }
        }
        Ok(Self { axes })
    }

    pub fn line(nodes: usize, left: T, right: T) -> Result<Self> {
        Self::new(vec![Axis { nodes, left, right }])
    }

    pub fn rectangle(nx: usize, ny: usize, x: (T, T), y: (T, T)) -> Result<Self> {
        Self::new(vec![
            Axis {
                nodes: nx,
                left: x.0,
                right: x.1,
            },
            Axis {
                nodes: ny,
                left: y.0,
                right: y.1,
            },
        ])
    }

    /// Unit square with `n` nodes per direction.
    pub fn unit_square(n: usize) -> Result<Self> {
        Self::rectangle(n, n, (T::zero(), T::one()), (T::zero(), T::one()))
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis<T>] {
        &self.axes
    }

    pub fn nodes(&self, axis: usize) -> usize {
        self.axes.get(axis).map_or(1, |a| a.nodes)
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.nodes).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> T {
        let a = &self.axes[axis];
        (a.right.clone() - a.left.clone()) / T::from_int(a.nodes as i64 - 1)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i + self.nodes(0) * j
    }

    pub fn ij(&self, g: usize) -> (usize, usize) {
        let nx = self.nodes(0);
        (g % nx, g / nx)
    }

    pub fn coordinate(&self, axis: usize, k: usize) -> T {
        match self.axes.get(axis) {
            Some(a) => a.left.clone() + self.spacing(axis) * T::from_int(k as i64),
            None => T::zero(),
        }
    }

    /// Physical position of node `g`; y is zero on a 1D grid.
    pub fn position(&self, g: usize) -> [T; 2] {
        let (i, j) = self.ij(g);
        [self.coordinate(0, i), self.coordinate(1, j)]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaceId {
    West,
    East,
    South,
    North,
}

impl FaceId {
    pub const ALL: [FaceId; 4] = [FaceId::West, FaceId::East, FaceId::South, FaceId::North];

    pub fn axis(self) -> usize {
        match self {
            FaceId::West | FaceId::East => 0,
            FaceId::South | FaceId::North => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FaceId::West => "west",
            FaceId::East => "east",
            FaceId::South => "south",
            FaceId::North => "north",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }

    /// Outward unit normal.
    pub fn normal<T: Scalar>(self) -> [T; 2] {
        let mut n = [T::zero(), T::zero()];
        n[self.axis()] = T::from_int(self.sign());
        n
    }

    fn sign(self) -> i64 {
        match self {
            FaceId::West | FaceId::South => -1,
            FaceId::East | FaceId::North => 1,
        }
    }
}

impl std::fmt::Display for FaceId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Boundary restriction, quadrature and outward normal of one face.
#[derive(Clone, Debug)]
pub struct Face<T> {
    pub id: FaceId,
    /// Volume indices of the face nodes (the restriction E).
    pub nodes: Vec<usize>,
    /// Diagonal boundary quadrature.
    pub weights: Vec<T>,
    pub normal: [T; 2],
}

#[derive(Clone, Debug)]
pub struct SbpOperatorSet<T> {
    grid: Grid<T>,
    ops: Vec<SbpOperator1D<T>>,
    volume: Vec<T>,
    faces: Vec<Face<T>>,
}

pub fn build_operator_set<T: Scalar>(grid: Grid<T>, order: u32) -> Result<SbpOperatorSet<T>> {
    let ops = (0..grid.dimension())
        .map(|d| build_sbp_1d(order, grid.nodes(d), grid.spacing(d)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SbpOperatorSet::assemble(grid, ops))
}

impl<T: Scalar> SbpOperatorSet<T> {
    fn assemble(grid: Grid<T>, ops: Vec<SbpOperator1D<T>>) -> Self {
        let nx = grid.nodes(0);
        let ny = grid.nodes(1);
        let ones = vec![T::one()];
        let wx = ops[0].weights();
        let wy = ops.get(1).map_or(ones.as_slice(), |o| o.weights());
        let mut volume = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                volume.push(wx[i].clone() * wy[j].clone());
            }
        }
        let ids: &[FaceId] = if grid.dimension() == 1 {
            &FaceId::ALL[..2]
        } else {
            &FaceId::ALL
        };
        let faces = ids
            .iter()
            .map(|&id| {
                let (nodes, weights): (Vec<usize>, Vec<T>) = match id {
                    FaceId::West => (0..ny).map(|j| (grid.index(0, j), wy[j].clone())).unzip(),
                    FaceId::East => (0..ny).map(|j| (grid.index(nx - 1, j), wy[j].clone())).unzip(),
                    FaceId::South => (0..nx).map(|i| (grid.index(i, 0), wx[i].clone())).unzip(),
                    FaceId::North => (0..nx).map(|i| (grid.index(i, ny - 1), wx[i].clone())).unzip(),
                };
                let normal = id.normal();
                Face {
                    id,
                    nodes,
                    weights,
                    normal,
                }
            })
            .collect();
        Self {
            grid,
            ops,
            volume,
            faces,
        }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn order(&self) -> u32 {
        self.ops[0].order()
    }

    pub fn dimension(&self) -> usize {
        self.grid.dimension()
    }

    pub fn len(&self) -> usize {
        self.volume.len()
    }

    pub fn is_empty(&self) -> bool {
        self.volume.is_empty()
    }

    pub fn operator(&self, axis: usize) -> &SbpOperator1D<T> {
        &self.ops[axis]
    }

    /// Diagonal of the volume quadrature P_Ω.
    pub fn volume_weights(&self) -> &[T] {
        &self.volume
    }

    pub fn faces(&self) -> &[Face<T>] {
        &self.faces
    }

    pub fn face(&self, id: FaceId) -> Option<&Face<T>> {
        self.faces.iter().find(|f| f.id == id)
    }

    /// Replaces `Q[i][j]` of the operator along `axis` by `Q[i][j] + delta`.
    pub fn with_perturbed_q(&self, axis: usize, i: usize, j: usize, delta: T) -> Self {
        let mut ops = self.ops.clone();
        ops[axis] = ops[axis].perturbed(i, j, delta);
        Self::assemble(self.grid.clone(), ops)
    }

    /// Derivative along `axis` of a scalar field.
    pub fn apply_derivative(&self, axis: usize, field: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); field.len()];
        self.apply_derivative_into(axis, field, &mut out);
        out
    }

    pub fn apply_derivative_into(&self, axis: usize, field: &[T], out: &mut [T]) {
        let nx = self.grid.nodes(0);
        let ny = self.grid.nodes(1);
        let op = &self.ops[axis];
        if axis == 0 {
            for j in 0..ny {
                op.apply_strided(field, j * nx, 1, out);
            }
        } else {
            for i in 0..nx {
                op.apply_strided(field, i, nx, out);
            }
        }
    }

    /// Diagonal of Σ_faces Eᵀ P_∂Ω N_axis E.
    pub fn boundary_diagonal(&self, axis: usize) -> Vec<T> {
        let mut diag = vec![T::zero(); self.len()];
        for face in &self.faces {
            let n = face.normal[axis].clone();
            if n.is_zero() {
                continue;
            }
            for (&g, w) in face.nodes.iter().zip(&face.weights) {
                diag[g] = diag[g].clone() + w.clone() * n.clone();
            }
        }
        diag
    }

    /// Max-norm residual of P_Ω D + (P_Ω D)ᵀ − Eᵀ P_∂Ω N E per direction.
    ///
    /// Q is recovered from the stored derivative operator, so the result
    /// reflects what the discretization actually applies.
    pub fn sbp_identity_residual(&self) -> Vec<T> {
        (0..self.dimension())
            .map(|axis| {
                let bd = self.boundary_diagonal(axis);
                let op = &self.ops[axis];
                let d = op.d();
                let n_line = op.nodes();
                let lines = self.len() / n_line;
                let mut worst = T::zero();
                for line in 0..lines {
                    let node = |k: usize| {
                        if axis == 0 {
                            self.grid.index(k, line)
                        } else {
                            self.grid.index(line, k)
                        }
                    };
                    for a in 0..n_line {
                        let ga = node(a);
                        for b in a..n_line {
                            let gb = node(b);
                            let mut r = self.volume[ga].clone() * d[(a, b)].clone()
                                + self.volume[gb].clone() * d[(b, a)].clone();
                            if a == b {
                                r = r - bd[ga].clone();
                            }
                            let m = r.magnitude();
                            if m > worst {
                                worst = m;
                            }
                        }
                    }
                }
                worst
            })
            .collect()
    }

    pub fn inner_product(&self, u: &[T], v: &[T]) -> Result<T> {
        for w in [u, v] {
            if w.len() != self.len() {
                return Err(Error::ShapeMismatch {
                    expected: self.len(),
                    got: w.len(),
                });
            }
        }
        Ok(u
            .iter()
            .zip(v)
            .zip(&self.volume)
            .fold(T::zero(), |acc, ((a, b), w)| acc + a.clone() * b.clone() * w.clone()))
    }

    pub fn face_integral(&self, id: FaceId, values: &[T]) -> Result<T> {
        let face = self
            .face(id)
            .ok_or_else(|| Error::InvalidGrid(format!("no {id} face on a {}D grid", self.dimension())))?;
        if values.len() != face.nodes.len() {
            return Err(Error::ShapeMismatch {
                expected: face.nodes.len(),
                got: values.len(),
            });
        }
        Ok(values
            .iter()
            .zip(&face.weights)
            .fold(T::zero(), |acc, (v, w)| acc + v.clone() * w.clone()))
    }

    /// Restriction of a volume field to a face.
    pub fn restrict(&self, id: FaceId, field: &[T]) -> Vec<T> {
        self.face(id)
            .map(|f| f.nodes.iter().map(|&g| field[g].clone()).collect())
            .unwrap_or_default()
    }

    pub fn min_spacing(&self) -> T {
        (0..self.dimension())
            .map(|d| self.grid.spacing(d))
            .fold(None, |acc: Option<T>, h| match acc {
                Some(a) if a < h => Some(a),
                _ => Some(h),
            })
            .unwrap_or_else(T::one)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;

    #[test]
    fn exact_two_dimensional_identity() {
        let grid = Grid::rectangle(
            11,
            7,
            (BigRational::zero(), BigRational::from_ratio(1, 1)),
            (BigRational::zero(), BigRational::from_ratio(1, 2)),
        )
        .unwrap();
        let ops = build_operator_set(grid, 2).unwrap();
        for r in ops.sbp_identity_residual() {
            assert!(r.is_zero());
        }
    }

    #[test]
    fn face_layout() {
        let ops = build_operator_set(Grid::<f64>::unit_square(11).unwrap(), 2).unwrap();
        let west = ops.face(FaceId::West).unwrap();
        assert_eq!(west.normal, [-1.0, 0.0]);
        assert_eq!(west.nodes.len(), 11);
        assert!(west.nodes.iter().all(|&g| ops.grid().ij(g).0 == 0));
        let total: f64 = west.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn one_dimensional_faces_are_points() {
        let ops = build_operator_set(Grid::line(9, 0.0, 2.0).unwrap(), 4).unwrap();
        assert_eq!(ops.faces().len(), 2);
        assert_eq!(ops.face(FaceId::East).unwrap().weights, vec![1.0]);
        assert!(ops.face(FaceId::North).is_none());
        assert!(ops.face_integral(FaceId::South, &[1.0]).is_err());
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let ops = build_operator_set(Grid::line(5, 0.0, 1.0).unwrap(), 2).unwrap();
        assert_eq!(
            ops.inner_product(&[1.0; 4], &[1.0; 5]).unwrap_err(),
            Error::ShapeMismatch { expected: 5, got: 4 }
        );
    }
}
