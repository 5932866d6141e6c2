//! Closed-form Jacobians of the matrix transformations and a
//! finite-difference determinant oracle.
//!
//! All Jacobians are with respect to the packed upper-triangular coordinates
//! of the symmetric arguments (see [`crate::spd`]).

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::spd::{Mat, SymMat, STRICT_MARGIN};

/// `|det A|^(p+1)`, the Jacobian of `X ↦ A X A'` on symmetric `X`.
pub fn jac_congruence(a: &Mat) -> Result<f64> {
    let d = a.det();
    if d == 0.0 || !d.is_finite() {
        return Err(Error::SingularMatrix);
    }
    Ok(d.abs().powi(a.dim() as i32 + 1))
}

/// `|Y|^-(p+1)`, the Jacobian of `Y ↦ Y⁻¹` on symmetric positive definite `Y`.
pub fn jac_inverse(y: &SymMat) -> Result<f64> {
    let chk = y.spd_check();
    if !chk.is_pd {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: chk.min_eigenvalue });
    }
    Ok(y.det().powi(-(y.dim() as i32 + 1)))
}

/// `∏ⱼ |I − Yⱼ|^((k−j)(p+1)/2)`, the Jacobian of the forward Dirichlet chain
/// map `(Y₁..Y_k) ↦ (X₁..X_k)`.
pub fn jac_dirichlet_chain(ys: &[SymMat]) -> Result<f64> {
    let k = ys.len();
    if k == 0 {
        return Err(Error::InvalidArgument("empty chain"));
    }
    let p = ys[0].dim();
    let mut log_j = 0.0;
    for (idx, y) in ys.iter().enumerate() {
        if y.dim() != p {
            return Err(Error::DimensionMismatch { expected: p, found: y.dim() });
        }
        if !y.in_unit_interval() {
            return Err(Error::OutOfRange { what: "chain matrix must satisfy O < Y < I" });
        }
        let j = idx + 1;
        let expo = (k - j) as f64 * (p as f64 + 1.0) / 2.0;
        if expo != 0.0 {
            log_j += expo * (SymMat::identity(p) - *y).det().ln();
        }
    }
    Ok(log_j.exp())
}

/// Output of [`fd_jacobian_det`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdJacobian {
    pub abs_det: f64,
    /// Set when `|det| < 1e-14`; the value is still returned.
    pub near_singular: bool,
}

/// Default central-difference step at `point`: `1e-5·(1 + ‖point‖∞)`.
pub fn default_step(point: &[f64]) -> f64 {
    1e-5 * (1.0 + point.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

/// `|det J|` of `map` at `point` via central differences. `step = None`
/// selects [`default_step`].
pub fn fd_jacobian_det<F>(map: F, point: &[f64], step: Option<f64>) -> Result<FdJacobian>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = point.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty point"));
    }
    let h = step.unwrap_or_else(|| default_step(point));
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("finite-difference step must be positive"));
    }
    let mut jac = vec![0.0; n * n];
    let mut x = point.to_vec();
    for c in 0..n {
        x[c] = point[c] + h;
        let fp = map(&x)?;
        x[c] = point[c] - h;
        let fm = map(&x)?;
        x[c] = point[c];
        if fp.len() != n || fm.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: fp.len() });
        }
        for r in 0..n {
            jac[r * n + c] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    let abs_det = det_dense(&mut jac, n).abs();
    Ok(FdJacobian { abs_det, near_singular: abs_det < 1e-14 })
}

/// Determinant of a dense row-major `n × n` matrix (destroyed).
fn det_dense(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs())).unwrap();
        if a[piv * n + k] == 0.0 {
            return 0.0;
        }
        if piv != k {
            for c in 0..n {
                a.swap(piv * n + c, k * n + c);
            }
            det = -det;
        }
        let d = a[k * n + k];
        det *= d;
        for r in (k + 1)..n {
            let f = a[r * n + k] / d;
            if f != 0.0 {
                for c in k..n {
                    a[r * n + c] -= f * a[k * n + c];
                }
            }
        }
    }
    det
}

/// Packs a list of same-dimension symmetric matrices into one coordinate
/// vector.
pub fn pack_all(ms: &[SymMat]) -> Vec<f64> {
    ms.iter().flat_map(|m| m.packed().iter().copied()).collect()
}

/// Inverse of [`pack_all`].
pub fn unpack_all(p: usize, k: usize, v: &[f64]) -> Result<Vec<SymMat>> {
    let n = p * (p + 1) / 2;
    if v.len() != n * k {
        return Err(Error::DimensionMismatch { expected: n * k, found: v.len() });
    }
    v.chunks(n).map(|c| SymMat::from_packed(p, c)).collect()
}

/// `true` when `m` is positive definite with the strict margin.
pub(crate) fn strictly_pd(m: &SymMat) -> bool {
    m.min_eigenvalue() > STRICT_MARGIN
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randmat::{forward_dirichlet_chain, inverse_dirichlet_chain};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn congruence_examples() {
        assert_eq!(jac_congruence(&Mat::identity(3)).unwrap(), 1.0);
        let a = Mat::from_rows(2, &[2.0, 0.0, 0.0, 3.0]).unwrap();
        assert_relative_eq!(jac_congruence(&a).unwrap(), 216.0, max_relative = 1e-15);
        let s = Mat::from_rows(2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert_eq!(jac_congruence(&s), Err(Error::SingularMatrix));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(jac_inverse(&SymMat::identity(2)).unwrap(), 1.0);
        let y = SymMat::from_packed(1, &[2.0]).unwrap();
        assert_relative_eq!(jac_inverse(&y).unwrap(), 0.25, max_relative = 1e-15);
        assert!(jac_inverse(&SymMat::diag(&[1.0, -1.0]).unwrap()).is_err());
    }

    #[test]
    fn chain_examples() {
        let half = SymMat::scaled_identity(1, 0.5);
        assert_relative_eq!(jac_dirichlet_chain(&[half, half]).unwrap(), 0.5, max_relative = 1e-15);
        let y = SymMat::from_packed(2, &[0.3, 0.1, 0.6]).unwrap();
        assert_eq!(jac_dirichlet_chain(&[y]).unwrap(), 1.0);
        assert!(jac_dirichlet_chain(&[SymMat::identity(2)]).is_err());
    }

    #[test]
    fn fd_linear_map() {
        let r = fd_jacobian_det(|x: &[f64]| Ok(x.iter().map(|v| 2.0 * v).collect()), &[0.3, -1.0, 4.0], None)
            .unwrap();
        assert_relative_eq!(r.abs_det, 8.0, max_relative = 1e-9);
        assert!(!r.near_singular);
        let z = fd_jacobian_det(|x: &[f64]| Ok(vec![x[0], x[0]]), &[1.0, 2.0], None).unwrap();
        assert!(z.near_singular);
    }

    #[test]
    fn fd_chain_round_trip_is_identity() {
        let ys = [
            SymMat::from_packed(2, &[0.4, 0.1, 0.5]).unwrap(),
            SymMat::from_packed(2, &[0.3, -0.05, 0.2]).unwrap(),
        ];
        let x0 = pack_all(&forward_dirichlet_chain(&ys).unwrap());
        let r = fd_jacobian_det(
            |v: &[f64]| {
                let xs = unpack_all(2, 2, v)?;
                let ys = inverse_dirichlet_chain(&xs)?;
                Ok(pack_all(&forward_dirichlet_chain(&ys)?))
            },
            &x0,
            None,
        )
        .unwrap();
        assert_relative_eq!(r.abs_det, 1.0, max_relative = 1e-8);
    }

    fn mat_from(p: usize, raw: &[f64]) -> Mat {
        let mut m = Mat::from_rows(p, &raw[..p * p]).unwrap();
        for i in 0..p {
            m.set(i, i, m.get(i, i) + 2.0);
        }
        m
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn congruence_matches_fd(p in 1usize..=2, raw in proptest::collection::vec(-1.0f64..1.0, 4),
                                 xr in proptest::collection::vec(-1.0f64..1.0, 3)) {
            let a = mat_from(p, &raw);
            let n = p * (p + 1) / 2;
            let fd = fd_jacobian_det(|v: &[f64]| {
                Ok(SymMat::from_packed(p, v)?.congruence(&a).packed().to_vec())
            }, &xr[..n], None).unwrap();
            let cf = jac_congruence(&a).unwrap();
            prop_assert!((fd.abs_det / cf - 1.0).abs() < 1e-3);
        }

        #[test]
        fn inverse_matches_fd(p in 1usize..=2, raw in proptest::collection::vec(-1.0f64..1.0, 4)) {
            let a = mat_from(p, &raw);
            let y = SymMat::from_mat(&(a * a.transpose()));
            let fd = fd_jacobian_det(|v: &[f64]| {
                Ok(SymMat::from_packed(p, v)?.inverse()?.packed().to_vec())
            }, y.packed(), None).unwrap();
            let cf = jac_inverse(&y).unwrap();
            prop_assert!((fd.abs_det / cf - 1.0).abs() < 1e-3);
        }
    }
}
