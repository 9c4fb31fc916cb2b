use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::matfun::{self, SymMatrix};

use super::FrobeniusVariant;

/// The matrix each variant compares: `A`, `Chol(A)` or `logm(A)`.
pub(super) fn transform(a: &SymMatrix, variant: FrobeniusVariant) -> Result<Matrix> {
    match variant {
        FrobeniusVariant::Raw => Ok(a.as_matrix().clone()),
        FrobeniusVariant::Cholesky => Ok(matfun::cholesky(a)?.into_matrix()),
        FrobeniusVariant::Log => Ok(matfun::logm_spd(a)?.into_matrix()),
    }
}

/// `‖A−B‖_F`, `‖Chol(A)−Chol(B)‖_F` or `‖logm(A)−logm(B)‖_F`.
pub fn frobenius_variant(a: &SymMatrix, b: &SymMatrix, variant: FrobeniusVariant) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(transform(a, variant)?
        .sub(&transform(b, variant)?)?
        .frobenius_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn examples() {
        let i2 = SymMatrix::identity(2);
        let two = SymMatrix::from_diag(&[2.0, 2.0]).unwrap();
        assert_abs_diff_eq!(
            frobenius_variant(&i2, &two, FrobeniusVariant::Raw).unwrap(),
            2f64.sqrt(),
            epsilon = 1e-15
        );
        let a = SymMatrix::from_diag(&[4.0, 9.0]).unwrap();
        assert_abs_diff_eq!(
            frobenius_variant(&a, &i2, FrobeniusVariant::Cholesky).unwrap(),
            5f64.sqrt(),
            epsilon = 1e-15
        );
        let e = core::f64::consts::E;
        let ee = SymMatrix::from_diag(&[e, e]).unwrap();
        assert_abs_diff_eq!(
            frobenius_variant(&ee, &i2, FrobeniusVariant::Log).unwrap(),
            2f64.sqrt(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn scaled_variants_need_spd() {
        let indef = SymMatrix::from_diag(&[1.0, -1.0]).unwrap();
        let i2 = SymMatrix::identity(2);
        assert!(frobenius_variant(&indef, &i2, FrobeniusVariant::Raw).is_ok());
        for v in [FrobeniusVariant::Cholesky, FrobeniusVariant::Log] {
            assert!(matches!(
                frobenius_variant(&indef, &i2, v),
                Err(Error::NotPositiveDefinite { .. })
            ));
        }
        assert!(frobenius_variant(&i2, &SymMatrix::identity(3), FrobeniusVariant::Raw).is_err());
    }
}
