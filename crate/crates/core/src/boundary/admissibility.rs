use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Strict,
    SemiDefinite,
    Violated,
}

impl Verdict {
    pub fn admissible(self) -> bool {
        self != Verdict::Violated
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibilityReport<T> {
    /// The symmetric test matrix whose definiteness decides the verdict.
    pub matrix: Matrix<T>,
    /// `None` for an empty test matrix.
    pub min_eigenvalue: Option<T>,
    pub verdict: Verdict,
    /// Eigenvector of the offending eigenvalue when violated.
    pub witness: Option<Vec<T>>,
}

fn tolerance<T: Real>() -> T {
    T::lit(1e-12)
}

fn report<T: Real>(matrix: Matrix<T>) -> AdmissibilityReport<T> {
    if matrix.rows() == 0 {
        return AdmissibilityReport {
            matrix,
            min_eigenvalue: None,
            verdict: Verdict::Strict,
            witness: None,
        };
    }
    let (values, vectors) = matrix.symmetric_eigen();
    let min = values[0];
    let tol = tolerance::<T>();
    let verdict = if min > tol {
        Verdict::Strict
    } else if min >= -tol {
        Verdict::SemiDefinite
    } else {
        Verdict::Violated
    };
    let witness = (verdict == Verdict::Violated)
        .then(|| (0..vectors.rows()).map(|k| vectors[(k, 0)]).collect());
    AdmissibilityReport {
        matrix,
        min_eigenvalue: Some(min),
        verdict,
        witness,
    }
}

/// Verdict on I − RᵀR (homogeneous admissibility).
pub fn check_r<T: Real>(r: &Matrix<T>) -> AdmissibilityReport<T> {
    let m = Matrix::identity(r.cols()).sub(&r.transpose().matmul(r));
    report(m.symmetric_part())
}

/// Verdict on I − SᵀS − (RᵀS)ᵀ(I − RᵀR)⁻¹(RᵀS) (admissibility of data).
///
/// Requires a strictly admissible R.
pub fn check_s<T: Real>(r: &Matrix<T>, s: &Matrix<T>) -> Result<AdmissibilityReport<T>> {
    let rr = check_r(r);
    if rr.verdict != Verdict::Strict {
        return Err(Error::RNotStrict(
            rr.min_eigenvalue.map_or(0.0, |v| v.to_f64_lossy()),
        ));
    }
    let m = s.cols();
    let mut test = Matrix::identity(m).sub(&s.transpose().matmul(s));
    if r.cols() > 0 {
        let rts = r.transpose().matmul(s);
        let inv = rr
            .matrix
            .inverse()
            .ok_or_else(|| Error::RNotStrict(rr.min_eigenvalue.map_or(0.0, |v| v.to_f64_lossy())))?;
        test = test.sub(&rts.transpose().matmul(&inv).matmul(&rts));
    }
    Ok(report(test.symmetric_part()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_examples() {
        let dirichlet = check_r(&Matrix::from_rows(vec![vec![1.0], vec![0.0]]));
        assert_eq!(dirichlet.verdict, Verdict::SemiDefinite);
        assert_eq!(dirichlet.min_eigenvalue, Some(0.0));
        let outflow = check_r(&Matrix::<f64>::zeros(1, 2));
        assert_eq!(outflow.verdict, Verdict::Strict);
        assert_eq!(outflow.matrix, Matrix::identity(2));
        let bad = check_r(&Matrix::from_rows(vec![vec![1.5]]));
        assert_eq!(bad.verdict, Verdict::Violated);
        assert!(bad.witness.is_some());
    }

    #[test]
    fn s_examples() {
        let zero = Matrix::<f64>::zeros(1, 0);
        let rep = check_s(&zero, &Matrix::identity(1)).unwrap();
        assert_eq!(rep.verdict, Verdict::SemiDefinite);
        let rep = check_s(&zero, &Matrix::from_diag(&[0.5])).unwrap();
        assert_eq!(rep.verdict, Verdict::Strict);
        assert!((rep.min_eigenvalue.unwrap() - 0.75).abs() < 1e-15);
        let rep = check_s(&Matrix::from_rows(vec![vec![0.5f64]]), &Matrix::identity(1)).unwrap();
        assert_eq!(rep.verdict, Verdict::Violated);
        assert!((rep.min_eigenvalue.unwrap() + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn s_needs_strict_r() {
        let r = Matrix::from_rows(vec![vec![1.0]]);
        assert!(matches!(check_s(&r, &Matrix::identity(1)), Err(Error::RNotStrict(_))));
    }
}
