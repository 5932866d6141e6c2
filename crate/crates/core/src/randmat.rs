//! Samplers: Wishart, matrix gamma, type-1 matrix beta, matrix Dirichlet
//! and the Dirichlet chain.
//!
//! Samplers take any [`rand::Rng`]; use [`crate::rng::RngStream`] for
//! reproducible streams.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::matgamma::ln_gamma_p;
use crate::spd::{Mat, SymMat};

fn half_p1(p: usize) -> f64 {
    (p as f64 + 1.0) / 2.0
}

fn lower(p: usize) -> f64 {
    (p as f64 - 1.0) / 2.0
}

/// Chi-square draw with real degrees of freedom `df > 0`.
pub fn sample_chi_square<R: Rng + ?Sized>(df: f64, rng: &mut R) -> Result<f64> {
    let d = ChiSquared::new(df)
        .map_err(|_| Error::Domain { param: "df", value: df, bound: 0.0, rule: "df > 0 for χ²" })?;
    Ok(d.sample(rng))
}

/// Gamma draw with shape `a` and unit scale.
pub fn sample_gamma<R: Rng + ?Sized>(a: f64, rng: &mut R) -> Result<f64> {
    let d = Gamma::new(a, 1.0)
        .map_err(|_| Error::Domain { param: "shape", value: a, bound: 0.0, rule: "shape > 0 for Gamma" })?;
    Ok(d.sample(rng))
}

/// Standard Wishart `W_p(df, I)` via the triangular (Bartlett) construction.
pub fn sample_wishart<R: Rng + ?Sized>(p: usize, df: f64, rng: &mut R) -> Result<SymMat> {
    let bound = p as f64 - 1.0;
    if !(df > bound) || !df.is_finite() {
        return Err(Error::Domain { param: "df", value: df, bound, rule: "df > p − 1 for a Wishart draw" });
    }
    let mut t = Mat::zeros(p);
    for i in 0..p {
        t.set(i, i, sample_chi_square(df - i as f64, rng)?.sqrt());
        for j in 0..i {
            let z: f64 = StandardNormal.sample(rng);
            t.set(i, j, z);
        }
    }
    Ok(SymMat::from_mat(&(t * t.transpose())))
}

/// Matrix gamma with density `∝ |X|^(a−(p+1)/2) exp(−tr(θ⁻¹X))`.
pub fn sample_matrix_gamma<R: Rng + ?Sized>(a: f64, scale: &SymMat, rng: &mut R) -> Result<SymMat> {
    let p = scale.dim();
    let w = sample_wishart(p, 2.0 * a, rng)?;
    let root = scale.sqrt()?;
    Ok(w.scale(0.5).sandwich(&root))
}

/// Log density of [`sample_matrix_gamma`]'s law at `x`.
pub fn ln_matrix_gamma_density(x: &SymMat, a: f64, scale: &SymMat) -> Result<f64> {
    let p = x.dim();
    let inv = scale.inverse()?;
    let dx = x.det();
    if !(dx > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: x.min_eigenvalue() });
    }
    Ok((a - half_p1(p)) * dx.ln() - inv.trace_product(x) - a * scale.det().ln() - ln_gamma_p(p, a)?)
}

/// Shapes of a type-1 matrix beta law, density
/// `∝ |X|^(a−(p+1)/2) |I−X|^(b−(p+1)/2)` on `O < X < I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaMatParams {
    p: usize,
    a: f64,
    b: f64,
}

impl BetaMatParams {
    pub fn new(p: usize, a: f64, b: f64) -> Result<Self> {
        if !(1..=crate::spd::MAX_DIM).contains(&p) {
            return Err(Error::OutOfRange { what: "matrix dimension (1 ≤ p ≤ 4)" });
        }
        let bound = lower(p);
        if !(a > bound) {
            return Err(Error::Domain { param: "a", value: a, bound, rule: "a > (p−1)/2 for matrix beta" });
        }
        if !(b > bound) {
            return Err(Error::Domain { param: "b", value: b, bound, rule: "b > (p−1)/2 for matrix beta" });
        }
        Ok(BetaMatParams { p, a, b })
    }

    pub fn p(&self) -> usize {
        self.p
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }

    /// `E|X|^h = Γ_p(a+h)Γ_p(a+b) / [Γ_p(a)Γ_p(a+b+h)]`, for `a + h > (p−1)/2`.
    pub fn det_moment(&self, h: f64) -> Result<f64> {
        let p = self.p;
        let l = ln_gamma_p(p, self.a + h)? + ln_gamma_p(p, self.a + self.b)?
            - ln_gamma_p(p, self.a)?
            - ln_gamma_p(p, self.a + self.b + h)?;
        Ok(l.exp())
    }

    /// `ln B_p(a, b) = ln Γ_p(a) + ln Γ_p(b) − ln Γ_p(a+b)`.
    pub fn ln_beta_p(&self) -> f64 {
        let p = self.p;
        // parameters are validated at construction
        ln_gamma_p(p, self.a).unwrap() + ln_gamma_p(p, self.b).unwrap() - ln_gamma_p(p, self.a + self.b).unwrap()
    }
}

/// `X = (S₁+S₂)^(−1/2) S₁ (S₁+S₂)^(−1/2)`, `S₁ ~ W(2a, I)`, `S₂ ~ W(2b, I)`.
pub fn sample_matrix_beta<R: Rng + ?Sized>(params: &BetaMatParams, rng: &mut R) -> Result<SymMat> {
    let p = params.p;
    let s1 = sample_wishart(p, 2.0 * params.a, rng)?;
    let s2 = sample_wishart(p, 2.0 * params.b, rng)?;
    if p == 1 {
        let (x, y) = (s1.get(0, 0), s2.get(0, 0));
        return SymMat::from_packed(1, &[x / (x + y)]);
    }
    let r = (s1 + s2).inv_sqrt()?;
    Ok(s1.sandwich(&r))
}

/// `(Y₁..Y_k) ↦ (X₁..X_k)` with `Xⱼ = Mⱼ^(1/2) Yⱼ Mⱼ^(1/2)`,
/// `Mⱼ = I − X₁ − … − X_{j−1}`.
pub fn forward_dirichlet_chain(ys: &[SymMat]) -> Result<Vec<SymMat>> {
    let Some(first) = ys.first() else {
        return Err(Error::InvalidArgument("empty chain"));
    };
    let p = first.dim();
    let mut m = SymMat::identity(p);
    let mut out = Vec::with_capacity(ys.len());
    for (j, y) in ys.iter().enumerate() {
        if y.dim() != p {
            return Err(Error::DimensionMismatch { expected: p, found: y.dim() });
        }
        let x = if j == 0 { *y } else { y.sandwich(&m.sqrt()?) };
        m = m - x;
        out.push(x);
    }
    Ok(out)
}

/// Inverse of [`forward_dirichlet_chain`]:
/// `Yⱼ = Mⱼ^(−1/2) Xⱼ Mⱼ^(−1/2)`.
pub fn inverse_dirichlet_chain(xs: &[SymMat]) -> Result<Vec<SymMat>> {
    let Some(first) = xs.first() else {
        return Err(Error::InvalidArgument("empty chain"));
    };
    let p = first.dim();
    let mut m = SymMat::identity(p);
    let mut out = Vec::with_capacity(xs.len());
    for (j, x) in xs.iter().enumerate() {
        if x.dim() != p {
            return Err(Error::DimensionMismatch { expected: p, found: x.dim() });
        }
        let y = if j == 0 {
            *x
        } else {
            if !crate::jacobian::strictly_pd(&m) {
                return Err(Error::OutOfRange { what: "partial sums must satisfy X₁+…+Xⱼ < I" });
            }
            x.sandwich(&m.inv_sqrt()?)
        };
        m = m - *x;
        out.push(y);
    }
    if !crate::jacobian::strictly_pd(&m) {
        return Err(Error::OutOfRange { what: "partial sums must satisfy X₁+…+Xⱼ < I" });
    }
    Ok(out)
}

/// Per-variable matrix-beta shapes of the Dirichlet chain: `Yⱼ` has shapes
/// `(ζⱼ + (p+1)/2, secondⱼ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletChainParams {
    p: usize,
    betas: Vec<BetaMatParams>,
}

impl DirichletChainParams {
    /// `second` is usually produced by `matrix_ops::param_chain`.
    pub fn new(p: usize, zeta: &[f64], second: &[f64]) -> Result<Self> {
        if zeta.is_empty() {
            return Err(Error::InvalidArgument("empty chain"));
        }
        if zeta.len() != second.len() {
            return Err(Error::DimensionMismatch { expected: zeta.len(), found: second.len() });
        }
        let bound = lower(p);
        let mut betas = Vec::with_capacity(zeta.len());
        for (j, (&z, &b)) in zeta.iter().zip(second).enumerate() {
            let a = z + half_p1(p);
            if !(a > bound) {
                return Err(Error::ChainDomain { index: j + 1, value: a });
            }
            if !(b > bound) {
                return Err(Error::ChainDomain { index: j + 1, value: b });
            }
            betas.push(BetaMatParams::new(p, a, b)?);
        }
        Ok(DirichletChainParams { p, betas })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.betas.len()
    }

    pub fn betas(&self) -> &[BetaMatParams] {
        &self.betas
    }
}

/// Independent `Yⱼ` pushed through [`forward_dirichlet_chain`].
pub fn sample_dirichlet_chain<R: Rng + ?Sized>(params: &DirichletChainParams, rng: &mut R) -> Result<Vec<SymMat>> {
    let ys = params.betas.iter().map(|b| sample_matrix_beta(b, rng)).collect::<Result<Vec<_>>>()?;
    forward_dirichlet_chain(&ys)
}

/// Matrix Dirichlet draw `(X₁..X_k)` with density
/// `∝ ∏ |Xⱼ|^(aⱼ−(p+1)/2) · |I − ΣXⱼ|^(a_{k+1}−(p+1)/2)`, built as
/// `Xⱼ = S^(−1/2) Gⱼ S^(−1/2)` from independent matrix gammas `Gⱼ(aⱼ, I)`
/// with `S = G₁ + … + G_{k+1}`. `shapes` has `k + 1` entries.
pub fn sample_matrix_dirichlet<R: Rng + ?Sized>(p: usize, shapes: &[f64], rng: &mut R) -> Result<Vec<SymMat>> {
    if shapes.len() < 2 {
        return Err(Error::InvalidArgument("matrix Dirichlet needs k + 1 ≥ 2 shapes"));
    }
    let id = SymMat::identity(p);
    let gs = shapes.iter().map(|&a| sample_matrix_gamma(a, &id, rng)).collect::<Result<Vec<_>>>()?;
    let total = gs.iter().fold(SymMat::zeros(p), |acc, g| acc + *g);
    let root = total.inv_sqrt()?;
    Ok(gs[..shapes.len() - 1].iter().map(|g| g.sandwich(&root)).collect())
}
