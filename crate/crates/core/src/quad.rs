//! Gauss–Jacobi quadrature on `(0, 1)` with weight `t^c (1−t)^d`.
//!
//! Rules come from the Golub–Welsch eigenvalue problem for the Jacobi
//! recurrence, solved by implicit QL keeping only the first eigenvector
//! components. Integration doubles the node count until successive
//! estimates agree to `rel_tol`.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::OnceCell;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::special::ln_gamma_pos;

/// Node counts and tolerance for the adaptive rules.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadConfig {
    pub base_nodes: usize,
    pub max_doublings: u32,
    pub rel_tol: f64,
    /// Successive estimates closer than this also count as converged.
    pub abs_tol: f64,
    /// Cap on the number of integrand evaluations of one tensor-product
    /// level.
    pub max_tensor_points: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { base_nodes: 64, max_doublings: 6, rel_tol: 1e-9, abs_tol: 0.0, max_tensor_points: 1 << 22 }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if self.base_nodes == 0 || self.max_doublings == 0 || self.max_tensor_points == 0 {
            return Err(Error::InvalidArgument("quadrature counts must be positive"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidArgument("rel_tol must lie in (0, 1)"));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(Error::InvalidArgument("abs_tol must be non-negative"));
        }
        Ok(())
    }

    pub(crate) fn nodes_at(&self, level: u32) -> usize {
        self.base_nodes << level
    }
}

/// Nodes and weights of one rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn apply<F: FnMut(f64) -> Result<f64>>(&self, mut f: F) -> Result<f64> {
        let mut s = 0.0;
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(t)?;
        }
        Ok(s)
    }
}

/// `n`-point Gauss rule for `∫₀¹ t^c (1−t)^d g(t) dt`, `c, d > −1`.
pub fn gauss_jacobi(n: usize, c: f64, d: f64) -> Result<Rule> {
    if n == 0 {
        return Err(Error::InvalidArgument("rule needs at least one node"));
    }
    if !(c > -1.0) || !(d > -1.0) || !c.is_finite() || !d.is_finite() {
        return Err(Error::Domain { param: "weight exponent", value: c.min(d), bound: -1.0, rule: "Jacobi weight exponents > −1" });
    }
    // Jacobi polynomials on [-1, 1] with weight (1−x)^a (1+x)^b; t = (1+x)/2.
    let (a, b) = (d, c);
    let ab = a + b;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    diag[0] = (b - a) / (ab + 2.0);
    for i in 1..n {
        let k = i as f64;
        let s = 2.0 * k + ab;
        diag[i] = (b * b - a * a) / (s * (s + 2.0));
        let b2 = if i == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        off[i] = b2.sqrt();
    }
    let mut first = vec![0.0; n];
    first[0] = 1.0;
    tridiagonal_ql(&mut diag, &mut off, &mut first)?;
    // total mass of t^c (1−t)^d on (0, 1)
    let mass = (ln_gamma_pos(c + 1.0) + ln_gamma_pos(d + 1.0) - ln_gamma_pos(c + d + 2.0)).exp();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let nodes = idx.iter().map(|&i| ((1.0 + diag[i]) / 2.0).clamp(0.0, 1.0)).collect();
    let weights = idx.iter().map(|&i| mass * first[i] * first[i]).collect();
    Ok(Rule { nodes, weights })
}

/// Implicit QL on a symmetric tridiagonal matrix (`off[i]` couples `i−1`
/// and `i`). On exit `d` holds the eigenvalues and `z` the first components
/// of the eigenvectors, given `z = e₁` on entry.
fn tridiagonal_ql(d: &mut [f64], off: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    let mut e = vec![0.0; n];
    e[..(n - 1)].copy_from_slice(&off[1..]);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NonConvergence { terms: iter });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zi1 = z[i + 1];
                z[i + 1] = s * z[i] + c * zi1;
                z[i] = c * z[i] - s * zi1;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// A Jacobi weight with its rules built on first use, one per doubling
/// level.
#[derive(Debug)]
pub struct JacobiFamily {
    c: f64,
    d: f64,
    config: QuadConfig,
    levels: Vec<OnceCell<Rule>>,
}

impl JacobiFamily {
    pub fn new(c: f64, d: f64, config: &QuadConfig) -> Result<Self> {
        config.validate()?;
        if !(c > -1.0) || !(d > -1.0) {
            return Err(Error::Domain { param: "weight exponent", value: c.min(d), bound: -1.0, rule: "Jacobi weight exponents > −1" });
        }
        let levels = (0..=config.max_doublings).map(|_| OnceCell::new()).collect();
        Ok(JacobiFamily { c, d, config: *config, levels })
    }

    pub fn exponents(&self) -> (f64, f64) {
        (self.c, self.d)
    }

    pub fn config(&self) -> &QuadConfig {
        &self.config
    }

    pub fn level(&self, i: u32) -> Result<&Rule> {
        let cell = &self.levels[i as usize];
        if let Some(r) = cell.get() {
            return Ok(r);
        }
        let rule = gauss_jacobi(self.config.nodes_at(i), self.c, self.d)?;
        Ok(cell.get_or_init(|| rule))
    }
}

/// An integral estimate with its convergence record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Nodes of the accepted rule (per dimension for tensor rules).
    pub nodes: usize,
    /// `|difference|` between the last two levels.
    pub last_delta: f64,
}

pub(crate) fn converged(prev: f64, cur: f64, q: &QuadConfig) -> bool {
    let d = (cur - prev).abs();
    d <= q.rel_tol * cur.abs().max(f64::MIN_POSITIVE) || d <= q.abs_tol
}

/// `∫₀¹ t^c (1−t)^d g(t) dt` by doubling the node count.
pub fn integrate<F: FnMut(f64) -> Result<f64>>(fam: &JacobiFamily, mut g: F) -> Result<QuadResult> {
    let q = fam.config;
    let mut prev = fam.level(0)?.apply(&mut g)?;
    let mut delta = f64::INFINITY;
    for i in 1..=q.max_doublings {
        let rule = fam.level(i)?;
        let cur = rule.apply(&mut g)?;
        delta = (cur - prev).abs();
        if !cur.is_finite() {
            return Err(Error::QuadratureNotConverged { nodes: rule.len(), last_delta: delta });
        }
        if converged(prev, cur, &q) {
            return Ok(QuadResult { value: cur, nodes: rule.len(), last_delta: delta });
        }
        prev = cur;
    }
    Err(Error::QuadratureNotConverged { nodes: q.nodes_at(q.max_doublings), last_delta: delta })
}

/// One level of the tensor-product rule over `(0,1)^k`.
pub(crate) fn tensor_level<F: FnMut(&[f64]) -> Result<f64>>(
    fams: &[&JacobiFamily],
    level: u32,
    g: &mut F,
) -> Result<f64> {
    let k = fams.len();
    let rules = fams.iter().map(|f| f.level(level)).collect::<Result<Vec<_>>>()?;
    let total = rules.iter().try_fold(1usize, |acc, r| acc.checked_mul(r.len()));
    match total {
        Some(t) if t <= fams[0].config.max_tensor_points => {}
        _ => return Err(Error::QuadratureNotConverged { nodes: rules[0].len(), last_delta: f64::INFINITY }),
    }
    let mut idx = vec![0usize; k];
    let mut point = vec![0.0; k];
    let mut sum = 0.0;
    'outer: loop {
        let mut w = 1.0;
        for j in 0..k {
            point[j] = rules[j].nodes[idx[j]];
            w *= rules[j].weights[idx[j]];
        }
        sum += w * g(&point)?;
        for j in (0..k).rev() {
            idx[j] += 1;
            if idx[j] < rules[j].len() {
                continue 'outer;
            }
            idx[j] = 0;
        }
        break;
    }
    Ok(sum)
}

/// Sum of several tensor-product integrals refined together; convergence is
/// judged on the total.
pub(crate) fn integrate_tensor_sum<F>(parts: &[Vec<&JacobiFamily>], mut g: F) -> Result<QuadResult>
where
    F: FnMut(usize, &[f64]) -> Result<f64>,
{
    let Some(first) = parts.first().and_then(|p| p.first()) else {
        return Err(Error::InvalidArgument("empty tensor rule"));
    };
    let q = first.config;
    let eval = |level: u32, g: &mut F| -> Result<f64> {
        let mut total = 0.0;
        for (i, fams) in parts.iter().enumerate() {
            total += tensor_level(fams, level, &mut |x: &[f64]| g(i, x))?;
        }
        Ok(total)
    };
    let mut prev = eval(0, &mut g)?;
    let mut delta = f64::INFINITY;
    for i in 1..=q.max_doublings {
        let cur = match eval(i, &mut g) {
            Err(Error::QuadratureNotConverged { nodes, .. }) => {
                return Err(Error::QuadratureNotConverged { nodes, last_delta: delta });
            }
            r => r?,
        };
        delta = (cur - prev).abs();
        if !cur.is_finite() {
            return Err(Error::QuadratureNotConverged { nodes: q.nodes_at(i), last_delta: delta });
        }
        if converged(prev, cur, &q) {
            return Ok(QuadResult { value: cur, nodes: q.nodes_at(i), last_delta: delta });
        }
        prev = cur;
    }
    Err(Error::QuadratureNotConverged { nodes: q.nodes_at(q.max_doublings), last_delta: delta })
}

/// Tensor-product rule over `(0,1)^k` with one weight per coordinate; every
/// coordinate is refined together.
pub fn integrate_tensor<F: FnMut(&[f64]) -> Result<f64>>(fams: &[&JacobiFamily], mut g: F) -> Result<QuadResult> {
    if fams.is_empty() {
        return Err(Error::InvalidArgument("empty tensor rule"));
    }
    integrate_tensor_sum(&[fams.to_vec()], |_, x| g(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn beta(a: f64, b: f64) -> f64 {
        (libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)).exp()
    }

    #[test]
    fn legendre_small_rule() {
        let r = gauss_jacobi(2, 0.0, 0.0).unwrap();
        let x = 0.5 - 0.5 / 3f64.sqrt();
        assert_relative_eq!(r.nodes[0], x, max_relative = 1e-14);
        assert_relative_eq!(r.weights[0], 0.5, max_relative = 1e-14);
    }

    #[test]
    fn exact_on_polynomials_with_singular_weight() {
        // n nodes integrate t^m exactly for m < 2n
        let r = gauss_jacobi(8, -0.5, -0.7).unwrap();
        for m in 0..16 {
            let got = r.apply(|t| Ok(t.powi(m))).unwrap();
            assert_relative_eq!(got, beta(m as f64 + 0.5, 0.3), max_relative = 1e-12);
        }
    }

    #[test]
    fn large_rule_mass() {
        let r = gauss_jacobi(4096, 0.25, -0.5).unwrap();
        let mass: f64 = r.weights.iter().sum();
        assert_relative_eq!(mass, beta(1.25, 0.5), max_relative = 1e-11);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn adaptive_integration() {
        let fam = JacobiFamily::new(0.0, -0.5, &QuadConfig::default()).unwrap();
        let res = integrate(&fam, |t| Ok((t * 3.0).cos())).unwrap();
        // ∫₀¹ cos(3t)/√(1−t) dt
        assert_relative_eq!(res.value, -0.658_437_951_611_503_2, max_relative = 1e-9, epsilon = 0.0);
        assert!(res.last_delta < 1e-9);
    }

    #[test]
    fn tensor_product() {
        let q = QuadConfig { base_nodes: 8, ..QuadConfig::default() };
        let f1 = JacobiFamily::new(0.5, 0.0, &q).unwrap();
        let f2 = JacobiFamily::new(0.0, -0.3, &q).unwrap();
        let res = integrate_tensor(&[&f1, &f2], |x| Ok(x[0] * x[1] + 1.0)).unwrap();
        let want = beta(2.5, 1.0) * beta(2.0, 0.7) + beta(1.5, 1.0) * beta(1.0, 0.7);
        assert_relative_eq!(res.value, want, max_relative = 1e-12);
    }

    #[test]
    fn tensor_budget() {
        let q = QuadConfig { base_nodes: 64, max_tensor_points: 1000, ..QuadConfig::default() };
        let f = JacobiFamily::new(0.0, 0.0, &q).unwrap();
        assert!(matches!(integrate_tensor(&[&f, &f], |_| Ok(1.0)), Err(Error::QuadratureNotConverged { .. })));
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(gauss_jacobi(4, -1.0, 0.0).is_err());
        assert!(JacobiFamily::new(0.0, -1.5, &QuadConfig::default()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn moments_exact(c in -0.95f64..3.0, d in -0.95f64..3.0, m in 0u32..20) {
            let r = gauss_jacobi(12, c, d).unwrap();
            let got = r.apply(|t| Ok(t.powi(m as i32))).unwrap();
            let want = beta(c + 1.0 + m as f64, d + 1.0);
            prop_assert!((got / want - 1.0).abs() < 1e-11, "{} vs {}", got, want);
        }
    }
}
