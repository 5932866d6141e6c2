//! Real matrix-variate gamma function
//! `Γ_p(α) = π^(p(p−1)/4) ∏_{i=0}^{p−1} Γ(α − i/2)`, defined for `α > (p−1)/2`.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::special::ln_gamma_pos;

/// `ln Γ_p(α)`.
pub fn ln_gamma_p(p: usize, alpha: f64) -> Result<f64> {
    if p == 0 {
        return Err(Error::OutOfRange { what: "dimension p ≥ 1" });
    }
    let bound = (p as f64 - 1.0) / 2.0;
    if !(alpha > bound) || !alpha.is_finite() {
        return Err(Error::Domain { param: "alpha", value: alpha, bound, rule: "α > (p−1)/2 for Γ_p(α)" });
    }
    let pf = p as f64;
    let mut s = pf * (pf - 1.0) / 4.0 * PI.ln();
    for i in 0..p {
        s += ln_gamma_pos(alpha - i as f64 / 2.0);
    }
    Ok(s)
}

/// `Γ_p(α)`; errors with [`Error::Overflow`] when it is not representable.
pub fn gamma_p(p: usize, alpha: f64) -> Result<f64> {
    exp_checked(ln_gamma_p(p, alpha)?)
}

/// `∏ Γ_p(numerator) / ∏ Γ_p(denominator)`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GammaRatioSpec {
    pub p: usize,
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
}

impl GammaRatioSpec {
    pub fn new(p: usize) -> Self {
        GammaRatioSpec { p, numerator: Vec::new(), denominator: Vec::new() }
    }

    pub fn num(mut self, a: f64) -> Self {
        self.numerator.push(a);
        self
    }

    pub fn den(mut self, a: f64) -> Self {
        self.denominator.push(a);
        self
    }

    /// Logarithm of the ratio.
    pub fn ln_value(&self) -> Result<f64> {
        let mut s = 0.0;
        for &a in &self.numerator {
            s += ln_gamma_p(self.p, a)?;
        }
        for &a in &self.denominator {
            s -= ln_gamma_p(self.p, a)?;
        }
        Ok(s)
    }
}

/// Evaluates a [`GammaRatioSpec`] in log space.
pub fn gamma_ratio(spec: &GammaRatioSpec) -> Result<f64> {
    exp_checked(spec.ln_value()?)
}

pub(crate) fn exp_checked(log_value: f64) -> Result<f64> {
    if log_value > f64::MAX.ln() {
        return Err(Error::Overflow { log_value });
    }
    Ok(log_value.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // mpmath, 40 digits
    const LN_GAMMA_2_5: f64 = 0.284_682_870_472_919_159_63;
    const LN_PI_OVER_2: f64 = 0.451_582_705_289_454_864_73;
    const LN_PI2_OVER_2: f64 = 1.596_312_591_138_855_038_9;

    #[test]
    fn reference_values() {
        assert_relative_eq!(ln_gamma_p(1, 2.5).unwrap(), LN_GAMMA_2_5, max_relative = 1e-13);
        assert_relative_eq!(ln_gamma_p(2, 1.5).unwrap(), LN_PI_OVER_2, max_relative = 1e-13);
        assert_relative_eq!(ln_gamma_p(3, 2.0).unwrap(), LN_PI2_OVER_2, max_relative = 1e-13);
    }

    #[test]
    fn domain() {
        assert!(matches!(ln_gamma_p(2, 0.5), Err(Error::Domain { .. })));
        assert!(ln_gamma_p(3, 1.0).is_err());
        assert!(ln_gamma_p(3, 1.0 + 1e-9).is_ok());
        // p = 1 admits small positive arguments
        assert!(ln_gamma_p(1, 0.1).is_ok());
    }

    #[test]
    fn ratios() {
        let same = GammaRatioSpec::new(2).num(3.3).den(3.3);
        assert_eq!(gamma_ratio(&same).unwrap(), 1.0);
        let r = GammaRatioSpec::new(1).num(3.0).den(4.0);
        assert_relative_eq!(gamma_ratio(&r).unwrap(), 1.0 / 3.0, max_relative = 1e-13);
        let r = GammaRatioSpec::new(2).num(2.5).den(1.5);
        assert_relative_eq!(gamma_ratio(&r).unwrap(), 1.5, max_relative = 1e-13);
        let big = GammaRatioSpec::new(3).num(200.0).num(200.0);
        assert!(matches!(gamma_ratio(&big), Err(Error::Overflow { .. })));
        // huge arguments cancel in log space
        let r = GammaRatioSpec::new(3).num(400.0).den(400.0).num(300.5).den(300.0);
        assert!(gamma_ratio(&r).unwrap().is_finite());
    }

    #[test]
    fn p1_reduction() {
        for i in 1..=20 {
            let a = 0.5 * i as f64;
            let want = libm::lgamma(a);
            assert!((ln_gamma_p(1, a).unwrap() - want).abs() <= 1e-13 * want.abs().max(1.0));
        }
    }

    proptest! {
        #[test]
        fn recurrence(p in 1usize..=3, a in 1.01f64..12.0) {
            let ratio = (ln_gamma_p(p, a + 1.0).unwrap() - ln_gamma_p(p, a).unwrap()).exp();
            let want: f64 = (0..p).map(|i| a - i as f64 / 2.0).product();
            prop_assert!((ratio / want - 1.0).abs() < 1e-12);
        }
    }
}
