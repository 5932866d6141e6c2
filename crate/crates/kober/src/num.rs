//! Locale-free parsing of numeric flags and fixed-precision output.

use crate::error::{CliError, CliResult};

/// Parses a decimal (`-1.25`, `3e-2`) or a ratio of two decimals (`1/3`).
pub fn parse_number(text: &str) -> CliResult<f64> {
    let t = text.trim();
    let bad = || CliError::usage(format!("not a number: {text:?}"));
    let value = match t.split_once('/') {
        Some((n, d)) => {
            let n = parse_decimal(n).ok_or_else(bad)?;
            let d = parse_decimal(d).ok_or_else(bad)?;
            if d == 0.0 {
                return Err(CliError::usage(format!("zero denominator in {text:?}")));
            }
            n / d
        }
        None => parse_decimal(t).ok_or_else(bad)?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

fn parse_decimal(t: &str) -> Option<f64> {
    let t = t.trim();
    let has_digit = t.bytes().any(|b| b.is_ascii_digit());
    let allowed = t.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'+' | b'-' | b'e' | b'E'));
    if has_digit && allowed {
        t.parse().ok()
    } else {
        None
    }
}

/// Comma- or semicolon-separated numbers.
pub fn parse_list(text: &str) -> CliResult<Vec<f64>> {
    let v = text.split([',', ';']).map(parse_number).collect::<CliResult<Vec<_>>>()?;
    if v.is_empty() {
        return Err(CliError::usage("empty list"));
    }
    Ok(v)
}

/// A non-negative integer; `1e6` and `10/2` are accepted when exact.
pub fn parse_count(text: &str) -> CliResult<usize> {
    let v = parse_number(text)?;
    if v < 0.0 || v.fract() != 0.0 || v > 9.007_199_254_740_992e15 {
        return Err(CliError::usage(format!("not a non-negative integer: {text:?}")));
    }
    Ok(v as usize)
}

/// Decimal or `0x`-prefixed hexadecimal.
pub fn parse_seed(text: &str) -> CliResult<u64> {
    let t = text.trim();
    let r = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    r.map_err(|_| CliError::usage(format!("invalid seed: {text:?}")))
}

/// `x` rounded to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Text form of [`sig12`]; empty for non-finite values.
pub fn fmt12(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    let r = sig12(x);
    let a = r.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(parse_number("0.5").unwrap(), 0.5);
        assert_eq!(parse_number(" -3 ").unwrap(), -3.0);
        assert_eq!(parse_number("1/4").unwrap(), 0.25);
        assert_eq!(parse_number("-1.5/0.5").unwrap(), -3.0);
        assert_eq!(parse_number("2e-3").unwrap(), 0.002);
        for bad in ["", "abc", "1,5", "inf", "NaN", "1/0", "0x10", "1/2/3", "1e999"] {
            assert!(parse_number(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn lists_counts_seeds() {
        assert_eq!(parse_list("2,0.5;1").unwrap(), vec![2.0, 0.5, 1.0]);
        assert!(parse_list("1,,2").is_err());
        assert_eq!(parse_count("1e6").unwrap(), 1_000_000);
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-2").is_err());
        assert_eq!(parse_seed("0xE4DE17").unwrap(), 0xE4DE17);
        assert_eq!(parse_seed("42").unwrap(), 42);
        assert!(parse_seed("-1").is_err());
    }

    #[test]
    fn twelve_digits() {
        assert_eq!(sig12(0.515_830_476_386_520_03), 0.515_830_476_387);
        assert_eq!(fmt12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt12(1.234_567_890_123_4e-9), "1.23456789012e-9");
        assert_eq!(fmt12(f64::NAN), "");
        assert_eq!(fmt12(0.0), "0");
    }
}
