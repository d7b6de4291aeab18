use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

use super::coefficients::{closure, Closure};

/// Diagonal-norm first-derivative operator on a uniform 1D grid.
#[derive(Clone, Debug)]
pub struct SbpOperator1D<T> {
    order: u32,
    spacing: T,
    /// Diagonal of the quadrature P, spacing included.
    weights: Vec<T>,
    q: Matrix<T>,
    d: Matrix<T>,
    /// Nonzero column range of each row of D, used by [`Self::apply`].
    bands: Vec<(usize, usize)>,
}

/// Minimum node count for an operator order: twice the closure width.
pub fn minimum_nodes(order: u32) -> Result<usize> {
    closure(order)
        .map(|c| 2 * c.block)
        .ok_or(Error::UnsupportedOrder(order))
}

fn ratio<T: Scalar>((n, d): (i64, i64)) -> T {
    T::from_ratio(n, d)
}

fn interior_entry<T: Scalar>(c: &Closure, k: isize) -> T {
    let w = c.interior.len() as isize;
    if k == 0 || k.abs() > w {
        T::zero()
    } else if k > 0 {
        ratio(c.interior[k as usize - 1])
    } else {
        -ratio::<T>(c.interior[(-k) as usize - 1])
    }
}

/// Entry of Q for the half-line closure.
fn left_entry<T: Scalar>(c: &Closure, i: usize, j: usize) -> T {
    let bs = c.block;
    if i < bs && j < bs {
        return match i.cmp(&j) {
            std::cmp::Ordering::Equal if i == 0 => T::from_ratio(-1, 2),
            std::cmp::Ordering::Equal => T::zero(),
            std::cmp::Ordering::Less => ratio(c.upper[i][j - i - 1]),
            std::cmp::Ordering::Greater => -ratio::<T>(c.upper[j][i - j - 1]),
        };
    }
    interior_entry(c, j as isize - i as isize)
}

/// Builds the `order` operator on `nodes` points with the given spacing.
pub fn build_sbp_1d<T: Scalar>(order: u32, nodes: usize, spacing: T) -> Result<SbpOperator1D<T>> {
    let c = closure(order).ok_or(Error::UnsupportedOrder(order))?;
    let required = 2 * c.block;
    if nodes < required {
        return Err(Error::GridTooSmall {
            order,
            nodes,
            required,
        });
    }
    if !(spacing > T::zero()) {
        return Err(Error::InvalidGrid("spacing must be positive".into()));
    }
    let n = nodes;
    let bs = c.block;
    let mut q = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            q[(i, j)] = if i < bs || j < bs {
                left_entry(c, i, j)
            } else if i >= n - bs || j >= n - bs {
                -left_entry::<T>(c, n - 1 - i, n - 1 - j)
            } else {
                interior_entry(c, j as isize - i as isize)
            };
        }
    }
    let weights: Vec<T> = (0..n)
        .map(|i| {
            let unit = if i < bs {
                ratio(c.weights[i])
            } else if i >= n - bs {
                ratio(c.weights[n - 1 - i])
            } else {
                T::one()
            };
            unit * spacing.clone()
        })
        .collect();
    let mut op = SbpOperator1D {
        order,
        spacing,
        weights,
        q,
        d: Matrix::zeros(n, n),
        bands: Vec::new(),
    };
    op.refresh();
    Ok(op)
}

impl<T: Scalar> SbpOperator1D<T> {
    fn refresh(&mut self) {
        let n = self.nodes();
        let mut d = Matrix::zeros(n, n);
        let mut bands = Vec::with_capacity(n);
        for i in 0..n {
            let mut lo = n;
            let mut hi = 0;
            for j in 0..n {
                let v = self.q[(i, j)].clone();
                if !v.is_zero() {
                    lo = lo.min(j);
                    hi = hi.max(j + 1);
                }
                d[(i, j)] = v / self.weights[i].clone();
            }
            bands.push(if lo < hi { (lo, hi) } else { (0, 0) });
        }
        self.d = d;
        self.bands = bands;
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn nodes(&self) -> usize {
        self.weights.len()
    }

    pub fn spacing(&self) -> &T {
        &self.spacing
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn q(&self) -> &Matrix<T> {
        &self.q
    }

    pub fn d(&self) -> &Matrix<T> {
        &self.d
    }

    /// Accuracy of the boundary rows (half the interior order).
    pub fn boundary_order(&self) -> u32 {
        self.order / 2
    }

    /// A copy with `Q[i][j]` shifted by `delta`; D is rebuilt from the
    /// perturbed Q. Only meant for exercising residual detectors.
    pub fn perturbed(&self, i: usize, j: usize, delta: T) -> Self {
        let mut out = self.clone();
        out.q[(i, j)] = out.q[(i, j)].clone() + delta;
        out.refresh();
        out
    }

    /// `D v` using the banded structure.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); v.len()];
        self.apply_strided(v, 0, 1, &mut out);
        out
    }

    /// Applies D along a line `v[offset + k*stride]`, writing to the same
    /// positions of `out`.
    pub fn apply_strided(&self, v: &[T], offset: usize, stride: usize, out: &mut [T]) {
        for (i, &(lo, hi)) in self.bands.iter().enumerate() {
            let mut acc = T::zero();
            for j in lo..hi {
                acc = acc + self.d[(i, j)].clone() * v[offset + j * stride].clone();
            }
            out[offset + i * stride] = acc;
        }
    }

    /// Max-norm of Q + Qᵀ − diag(−1, 0, …, 0, 1).
    pub fn sbp_residual(&self) -> T {
        let n = self.nodes();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let mut r = self.q[(i, j)].clone() + self.q[(j, i)].clone();
                if i == j && i == 0 {
                    r = r + T::one();
                } else if i == j && i == n - 1 {
                    r = r - T::one();
                }
                let m = r.magnitude();
                if m > worst {
                    worst = m;
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;

    #[test]
    fn second_order_rows() {
        let op = build_sbp_1d(2, 5, 0.25f64).unwrap();
        let d = op.d();
        assert_eq!(d.row(0), &[-4.0, 4.0, 0.0, 0.0, 0.0]);
        assert_eq!(d.row(2), &[0.0, -2.0, 0.0, 2.0, 0.0]);
        let w: Vec<f64> = [0.5, 1.0, 1.0, 1.0, 0.5].iter().map(|x| x * 0.25).collect();
        assert_eq!(op.weights(), w.as_slice());
    }

    #[test]
    fn exact_sbp_property_all_orders() {
        for order in [2, 4, 6] {
            let n = minimum_nodes(order).unwrap() + 5;
            let h = BigRational::from_ratio(1, (n - 1) as i64);
            let op = build_sbp_1d(order, n, h).unwrap();
            assert!(op.sbp_residual().is_zero(), "order {order}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(build_sbp_1d(3, 20, 0.1f64).unwrap_err(), Error::UnsupportedOrder(3));
        assert!(matches!(
            build_sbp_1d(6, 11, 0.1f64),
            Err(Error::GridTooSmall { required: 12, .. })
        ));
        assert!(build_sbp_1d(2, 5, 0.0f64).is_err());
    }

    #[test]
    fn classical_first_row() {
        let op = build_sbp_1d(6, 12, BigRational::from_ratio(1, 1)).unwrap();
        assert_eq!(op.d()[(0, 1)], BigRational::from_ratio(104009, 54596));
        let op = build_sbp_1d(4, 8, BigRational::from_ratio(1, 1)).unwrap();
        assert_eq!(op.d()[(0, 1)], BigRational::from_ratio(59, 34));
    }

    #[test]
    fn banded_apply_matches_dense() {
        let op = build_sbp_1d(4, 13, 0.1f64).unwrap();
        let v: Vec<f64> = (0..13).map(|i| (i as f64 * 0.37).sin()).collect();
        let dense = op.d().matvec(&v);
        let banded = op.apply(&v);
        for (a, b) in dense.iter().zip(&banded) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
