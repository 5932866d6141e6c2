//! Small symmetric and general matrices (p ≤ 4).
//!
//! [`SymMat`] stores the upper triangle packed row-major:
//! `x11, x12, …, x1p, x22, …, x2p, …, xpp`. The finite-difference Jacobian
//! oracle and every closed-form Jacobian use this coordinate order.

use core::fmt;
use core::ops::{Add, Mul, Sub};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 4;
const MAX_PACKED: usize = MAX_DIM * (MAX_DIM + 1) / 2;

/// Margin used for the strict inequalities `X > O` and `X < I`.
pub const STRICT_MARGIN: f64 = 1e-10;

/// Number of packed coordinates of a `p × p` symmetric matrix.
pub const fn packed_len(p: usize) -> usize {
    p * (p + 1) / 2
}

/// A `p × p` real symmetric matrix.
#[derive(Clone, Copy, PartialEq)]
pub struct SymMat {
    p: usize,
    packed: [f64; MAX_PACKED],
}

/// A general `p × p` real matrix.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat {
    p: usize,
    a: [[f64; MAX_DIM]; MAX_DIM],
}

/// Eigenvalues and eigenvectors of a symmetric matrix; `vectors` holds the
/// eigenvectors as columns.
#[derive(Clone, Copy, Debug)]
pub struct Eigen {
    pub values: [f64; MAX_DIM],
    pub vectors: Mat,
}

/// Result of a positive-definiteness probe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpdCheck {
    pub is_pd: bool,
    pub min_eigenvalue: f64,
}

fn check_dim(p: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&p) {
        Ok(())
    } else {
        Err(Error::OutOfRange { what: "matrix dimension (1 ≤ p ≤ 4)" })
    }
}

impl SymMat {
    /// Builds from packed upper-triangular entries.
    pub fn from_packed(p: usize, entries: &[f64]) -> Result<Self> {
        check_dim(p)?;
        if entries.len() != packed_len(p) {
            return Err(Error::DimensionMismatch { expected: packed_len(p), found: entries.len() });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite matrix entry"));
        }
        let mut packed = [0.0; MAX_PACKED];
        packed[..entries.len()].copy_from_slice(entries);
        Ok(SymMat { p, packed })
    }

    pub fn zeros(p: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&p), "dimension out of range");
        SymMat { p, packed: [0.0; MAX_PACKED] }
    }

    pub fn identity(p: usize) -> Self {
        Self::scaled_identity(p, 1.0)
    }

    pub fn scaled_identity(p: usize, c: f64) -> Self {
        let mut m = Self::zeros(p);
        for i in 0..p {
            m.set(i, i, c);
        }
        m
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        check_dim(values.len())?;
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.set(i, i, *v);
        }
        Ok(m)
    }

    /// Symmetrises `(M + M')/2`.
    pub fn from_mat(m: &Mat) -> Self {
        let p = m.p;
        let mut s = Self::zeros(p);
        for i in 0..p {
            for j in i..p {
                s.set(i, j, 0.5 * (m.a[i][j] + m.a[j][i]));
            }
        }
        s
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn packed(&self) -> &[f64] {
        &self.packed[..packed_len(self.p)]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[offset(self.p, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.packed[offset(self.p, i, j)] = v;
    }

    pub fn to_mat(&self) -> Mat {
        let mut m = Mat::zeros(self.p);
        for i in 0..self.p {
            for j in 0..self.p {
                m.a[i][j] = self.get(i, j);
            }
        }
        m
    }

    pub fn trace(&self) -> f64 {
        (0..self.p).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = *self;
        for x in out.packed.iter_mut() {
            *x *= c;
        }
        out
    }

    pub fn det(&self) -> f64 {
        self.to_mat().det()
    }

    /// `tr(self · other)` for symmetric arguments.
    pub fn trace_product(&self, other: &SymMat) -> f64 {
        debug_assert_eq!(self.p, other.p);
        let mut t = 0.0;
        for i in 0..self.p {
            for j in 0..self.p {
                t += self.get(i, j) * other.get(j, i);
            }
        }
        t
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.p {
            for j in 0..self.p {
                s += self.get(i, j).powi(2);
            }
        }
        s.sqrt()
    }

    /// Cyclic Jacobi eigendecomposition.
    pub fn eigen(&self) -> Eigen {
        let p = self.p;
        let mut a = self.to_mat();
        let mut v = Mat::identity(p);
        let scale = self.frobenius_norm().max(f64::MIN_POSITIVE);
        for _sweep in 0..64 {
            let mut off = 0.0;
            for i in 0..p {
                for j in (i + 1)..p {
                    off += a.a[i][j] * a.a[i][j];
                }
            }
            if off.sqrt() <= 1e-17 * scale {
                break;
            }
            for i in 0..p {
                for j in (i + 1)..p {
                    let aij = a.a[i][j];
                    if aij == 0.0 {
                        continue;
                    }
                    let theta = (a.a[j][j] - a.a[i][i]) / (2.0 * aij);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..p {
                        let aki = a.a[k][i];
                        let akj = a.a[k][j];
                        a.a[k][i] = c * aki - s * akj;
                        a.a[k][j] = s * aki + c * akj;
                    }
                    for k in 0..p {
                        let aik = a.a[i][k];
                        let ajk = a.a[j][k];
                        a.a[i][k] = c * aik - s * ajk;
                        a.a[j][k] = s * aik + c * ajk;
                    }
                    for k in 0..p {
                        let vki = v.a[k][i];
                        let vkj = v.a[k][j];
                        v.a[k][i] = c * vki - s * vkj;
                        v.a[k][j] = s * vki + c * vkj;
                    }
                }
            }
        }
        let mut values = [0.0; MAX_DIM];
        for (i, val) in values.iter_mut().enumerate().take(p) {
            *val = a.a[i][i];
        }
        Eigen { values, vectors: v }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let e = self.eigen();
        e.values[..self.p].iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        let e = self.eigen();
        e.values[..self.p].iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Positive-definiteness probe. Eigenvalues at or below zero are never
    /// clamped.
    pub fn spd_check(&self) -> SpdCheck {
        let min_eigenvalue = self.min_eigenvalue();
        SpdCheck { is_pd: min_eigenvalue > 0.0, min_eigenvalue }
    }

    fn require_pd(&self) -> Result<Eigen> {
        let e = self.eigen();
        let min = e.values[..self.p].iter().copied().fold(f64::INFINITY, f64::min);
        if min > 0.0 {
            Ok(e)
        } else {
            Err(Error::NotPositiveDefinite { min_eigenvalue: min })
        }
    }

    /// `Q f(Λ) Q'` for a spectral function `f`.
    fn spectral(&self, e: &Eigen, f: impl Fn(f64) -> f64) -> SymMat {
        let p = self.p;
        let mut out = SymMat::zeros(p);
        let fv: [f64; MAX_DIM] = core::array::from_fn(|k| if k < p { f(e.values[k]) } else { 0.0 });
        for i in 0..p {
            for j in i..p {
                let mut s = 0.0;
                for k in 0..p {
                    s += e.vectors.a[i][k] * fv[k] * e.vectors.a[j][k];
                }
                out.set(i, j, s);
            }
        }
        out
    }

    /// Positive definite square root.
    pub fn sqrt(&self) -> Result<SymMat> {
        let e = self.require_pd()?;
        Ok(self.spectral(&e, Float::sqrt))
    }

    /// `A^{-1/2}`.
    pub fn inv_sqrt(&self) -> Result<SymMat> {
        let e = self.require_pd()?;
        Ok(self.spectral(&e, |x| 1.0 / x.sqrt()))
    }

    /// `A^{r}` for SPD `A` and real `r`.
    pub fn powf(&self, r: f64) -> Result<SymMat> {
        let e = self.require_pd()?;
        Ok(self.spectral(&e, |x| x.powf(r)))
    }

    pub fn inverse(&self) -> Result<SymMat> {
        Ok(SymMat::from_mat(&self.to_mat().inverse()?))
    }

    /// `A X A'`.
    pub fn congruence(&self, a: &Mat) -> SymMat {
        SymMat::from_mat(&(*a * self.to_mat() * a.transpose()))
    }

    /// `S X S` for symmetric `S`.
    pub fn sandwich(&self, s: &SymMat) -> SymMat {
        self.congruence(&s.to_mat())
    }

    /// `true` iff `O < X < I` with margin [`STRICT_MARGIN`] on both sides.
    pub fn in_unit_interval(&self) -> bool {
        let e = self.eigen();
        e.values[..self.p].iter().all(|&l| l > STRICT_MARGIN && 1.0 - l > STRICT_MARGIN)
    }
}

#[inline]
fn offset(p: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < p && j < p);
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // entries in rows 0..i: sum_{r<i} (p - r)
    i * (2 * p + 1 - i) / 2 + (j - i)
}

impl fmt::Debug for SymMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymMat").field("p", &self.p).field("packed", &self.packed()).finish()
    }
}

impl Add for SymMat {
    type Output = SymMat;
    fn add(self, rhs: SymMat) -> SymMat {
        assert_eq!(self.p, rhs.p, "dimension mismatch");
        let mut out = self;
        for (x, y) in out.packed.iter_mut().zip(rhs.packed.iter()) {
            *x += y;
        }
        out
    }
}

impl Sub for SymMat {
    type Output = SymMat;
    fn sub(self, rhs: SymMat) -> SymMat {
        assert_eq!(self.p, rhs.p, "dimension mismatch");
        let mut out = self;
        for (x, y) in out.packed.iter_mut().zip(rhs.packed.iter()) {
            *x -= y;
        }
        out
    }
}

/// `true` iff `B - A` is positive definite.
pub fn loewner_lt(a: &SymMat, b: &SymMat) -> Result<bool> {
    if a.p != b.p {
        return Err(Error::DimensionMismatch { expected: a.p, found: b.p });
    }
    Ok((*b - *a).min_eigenvalue() > 0.0)
}

/// Symmetric positive definite square root, `S·S = A`.
pub fn sym_sqrt(a: &SymMat) -> Result<SymMat> {
    a.sqrt()
}

impl Mat {
    pub fn zeros(p: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&p), "dimension out of range");
        Mat { p, a: [[0.0; MAX_DIM]; MAX_DIM] }
    }

    pub fn identity(p: usize) -> Self {
        let mut m = Self::zeros(p);
        for i in 0..p {
            m.a[i][i] = 1.0;
        }
        m
    }

    /// Row-major entries.
    pub fn from_rows(p: usize, entries: &[f64]) -> Result<Self> {
        check_dim(p)?;
        if entries.len() != p * p {
            return Err(Error::DimensionMismatch { expected: p * p, found: entries.len() });
        }
        let mut m = Self::zeros(p);
        for i in 0..p {
            for j in 0..p {
                m.a[i][j] = entries[i * p + j];
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i][j] = v;
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.p);
        for i in 0..self.p {
            for j in 0..self.p {
                t.a[i][j] = self.a[j][i];
            }
        }
        t
    }

    /// LU factorisation with partial pivoting; returns the row-reduced matrix
    /// and the sign of the permutation, or `None` when singular.
    fn lu(&self) -> Option<(Mat, [usize; MAX_DIM], f64)> {
        let p = self.p;
        let mut m = *self;
        let mut perm: [usize; MAX_DIM] = core::array::from_fn(|i| i);
        let mut sign = 1.0;
        for k in 0..p {
            let (piv, max) = (k..p)
                .map(|r| (r, m.a[r][k].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if max == 0.0 {
                return None;
            }
            if piv != k {
                m.a.swap(piv, k);
                perm.swap(piv, k);
                sign = -sign;
            }
            for r in (k + 1)..p {
                let f = m.a[r][k] / m.a[k][k];
                m.a[r][k] = f;
                for c in (k + 1)..p {
                    m.a[r][c] -= f * m.a[k][c];
                }
            }
        }
        Some((m, perm, sign))
    }

    pub fn det(&self) -> f64 {
        match self.p {
            1 => self.a[0][0],
            2 => self.a[0][0] * self.a[1][1] - self.a[0][1] * self.a[1][0],
            _ => match self.lu() {
                None => 0.0,
                Some((lu, _, sign)) => (0..self.p).fold(sign, |d, i| d * lu.a[i][i]),
            },
        }
    }

    pub fn inverse(&self) -> Result<Mat> {
        let p = self.p;
        let (lu, perm, _) = self.lu().ok_or(Error::SingularMatrix)?;
        let mut inv = Mat::zeros(p);
        for col in 0..p {
            let mut x = [0.0; MAX_DIM];
            for i in 0..p {
                let mut s = if perm[i] == col { 1.0 } else { 0.0 };
                for k in 0..i {
                    s -= lu.a[i][k] * x[k];
                }
                x[i] = s;
            }
            for i in (0..p).rev() {
                let mut s = x[i];
                for k in (i + 1)..p {
                    s -= lu.a[i][k] * x[k];
                }
                x[i] = s / lu.a[i][i];
            }
            for i in 0..p {
                inv.a[i][col] = x[i];
            }
        }
        if inv.a.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::SingularMatrix);
        }
        Ok(inv)
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: alloc::vec::Vec<&[f64]> = (0..self.p).map(|i| &self.a[i][..self.p]).collect();
        f.debug_struct("Mat").field("p", &self.p).field("rows", &rows).finish()
    }
}

impl Mul for Mat {
    type Output = Mat;
    fn mul(self, rhs: Mat) -> Mat {
        assert_eq!(self.p, rhs.p, "dimension mismatch");
        let p = self.p;
        let mut out = Mat::zeros(p);
        for i in 0..p {
            for k in 0..p {
                let aik = self.a[i][k];
                for j in 0..p {
                    out.a[i][j] += aik * rhs.a[k][j];
                }
            }
        }
        out
    }
}
