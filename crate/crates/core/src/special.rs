//! Scalar gamma function and friends.

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEF: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_741_78;

/// Lanczos sum for `x >= 0.5`.
fn ln_gamma_lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut sum = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_2PI + (z + 0.5) * t.ln() - t + sum.ln()
}

/// `ln Γ(x)` for `x > 0`.
///
/// Arguments below one half are shifted up with `Γ(x) = Γ(x + 1) / x`; there
/// is no reflection, so non-positive arguments are rejected.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain { param: "x", value: x, bound: 0.0, rule: "x > 0 for ln Γ(x)" });
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        ln_gamma_lanczos(x + 1.0) - x.ln()
    } else {
        ln_gamma_lanczos(x)
    }
}

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    ln_gamma(x).map(Float::exp)
}

/// Reciprocal gamma `1/Γ(x)` on the whole real line (zero at the poles).
pub fn rgamma(x: f64) -> f64 {
    if x > 0.0 {
        return (-ln_gamma_pos(x)).exp();
    }
    if x == x.floor() {
        return 0.0;
    }
    // 1/Γ(x) = Γ(1 - x) sin(πx) / π
    (PI * x).sin() * ln_gamma_pos(1.0 - x).exp() / PI
}

/// `Γ(x)` on the whole real line; errors at the poles.
pub fn gamma_signed(x: f64) -> Result<f64> {
    let r = rgamma(x);
    if r == 0.0 {
        return Err(Error::Domain { param: "x", value: x, bound: 0.0, rule: "x not a non-positive integer" });
    }
    Ok(1.0 / r)
}

/// `ln B(a, b)` for positive arguments.
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    Ok(ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn matches_libm_lgamma() {
        let mut x = 0.05;
        while x < 40.0 {
            let got = ln_gamma(x).unwrap();
            let want = libm::lgamma(x);
            assert!((got - want).abs() < 1e-13 * want.abs().max(1.0), "x = {x}: {got} vs {want}");
            x += 0.173;
        }
    }

    #[test]
    fn half_integer_values() {
        assert_relative_eq!(gamma(0.5).unwrap(), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(2.5).unwrap(), 1.329_340_388_179_137, max_relative = 1e-14);
        assert_relative_eq!(gamma(5.0).unwrap(), 24.0, max_relative = 1e-14);
    }

    #[test]
    fn reciprocal_gamma_negative_arguments() {
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-3.0), 0.0);
        // Γ(-0.5) = -2√π
        assert_relative_eq!(gamma_signed(-0.5).unwrap(), -2.0 * PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(gamma_signed(-1.5).unwrap(), 4.0 * PI.sqrt() / 3.0, max_relative = 1e-13);
        assert!(gamma_signed(-2.0).is_err());
    }

    #[test]
    fn rejects_non_positive() {
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
        assert!(ln_gamma(f64::NAN).is_err());
    }
}
