//! Gauss hypergeometric function `₂F₁(a, b; c; z)` for real `z ≤ 1`.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::special::{gamma_signed, rgamma};

const MAX_TERMS: usize = 20_000;
const PERTURB: f64 = 1e-5;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Power series about zero.
fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut small = 0;
    for n in 0..MAX_TERMS {
        let k = n as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if term.abs() <= f64::EPSILON * sum.abs() {
            small += 1;
            if small >= 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence { terms: MAX_TERMS })
}

/// Connection formula about `z = 1`; requires `c − a − b` non-integer.
fn about_one(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let w = 1.0 - z;
    let s = c - a - b;
    let g_c = gamma_signed(c)?;
    let t1 = g_c * gamma_signed(s)? * rgamma(c - a) * rgamma(c - b);
    let t2 = g_c * gamma_signed(-s)? * rgamma(a) * rgamma(b);
    let mut v = 0.0;
    if t1 != 0.0 {
        v += t1 * series(a, b, 1.0 - s, w)?;
    }
    if t2 != 0.0 {
        v += t2 * w.powf(s) * series(c - a, c - b, 1.0 + s, w)?;
    }
    Ok(v)
}

/// `₂F₁(a, b; c; z)`.
///
/// `c` must not be a non-positive integer. At `z = 1` the value is finite
/// only for `c − a − b > 0` (or a terminating series).
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return Err(Error::Domain { param: "c", value: c, bound: 0.0, rule: "c not a non-positive integer in ₂F₁" });
    }
    if !(z <= 1.0) || !z.is_finite() {
        return Err(Error::Domain { param: "z", value: z, bound: 1.0, rule: "z ≤ 1 for real ₂F₁" });
    }
    if a == 0.0 || b == 0.0 || z == 0.0 {
        return Ok(1.0);
    }
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return series(a, b, c, z);
    }
    if z < 0.0 {
        // Pfaff: (1−z)^(−a) ₂F₁(a, c−b; c; z/(z−1)), argument in (0, 1)
        return Ok((1.0 - z).powf(-a) * gauss_2f1(a, c - b, c, z / (z - 1.0))?);
    }
    let s = c - a - b;
    if z == 1.0 {
        if s > 0.0 {
            return Ok(gamma_signed(c)? * gamma_signed(s)? * rgamma(c - a) * rgamma(c - b));
        }
        return Err(Error::HypergeometricNonConvergent);
    }
    if z <= 0.5 {
        return series(a, b, c, z);
    }
    if s != s.round() {
        return about_one(a, b, c, z);
    }
    if z <= 0.9 {
        return series(a, b, c, z);
    }
    // integer c − a − b: symmetric perturbation of c cancels the first-order error
    let up = about_one(a, b, c + PERTURB, z)?;
    let down = about_one(a, b, c - PERTURB, z)?;
    Ok(0.5 * (up + down))
}
