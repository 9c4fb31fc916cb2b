use crate::error::{Error, Result};
use crate::matfun::{self, LowerTriangular, SymMatrix};
use crate::math;

use super::Order;

fn check_len(u: &[f64], v: &[f64]) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(())
}

/// `Σ|u−v|` or `√Σ(u−v)²`.
pub fn lp_distance(u: &[f64], v: &[f64], p: Order) -> Result<f64> {
    check_len(u, v)?;
    let diffs = u.iter().zip(v).map(|(a, b)| a - b);
    Ok(match p {
        Order::One => diffs.map(math::abs).sum(),
        Order::Two => math::sqrt(diffs.map(|d| d * d).sum()),
    })
}

/// `√((u−v)ᵀ S⁻¹ (u−v))`.
pub fn mahalanobis(u: &[f64], v: &[f64], s: &SymMatrix) -> Result<f64> {
    check_len(u, v)?;
    if u.len() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: u.len(),
        });
    }
    let l = matfun::cholesky(s)?;
    mahalanobis_factored(u, v, &l)
}

pub(super) fn mahalanobis_factored(u: &[f64], v: &[f64], l: &LowerTriangular) -> Result<f64> {
    check_len(u, v)?;
    let diff: alloc::vec::Vec<f64> = u.iter().zip(v).map(|(a, b)| a - b).collect();
    Ok(math::sqrt(l.inverse_quadratic_form(&diff)?))
}
