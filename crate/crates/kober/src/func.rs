//! The `--f` mini-language.
//!
//! Scalar: `exp`, `exp:RATE`, `power:LAMBDA`, `powerexp:LAMBDA:RATE`.
//! Several variables: `sumpowerexp:C`, or any scalar family applied to each
//! variable. Matrix: `detpower:LAMBDA`, `exptrace`, `detpowerexp:GAMMA`,
//! `wishart:DF`; at `p ≥ 2`, `exp` and `power:λ` mean `exptrace` and
//! `detpower:λ`.

use std::fmt;
use std::str::FromStr;

use kober_core::matrix_ops::MatrixFn;
use kober_core::scalar_ops::{Func1D, FuncKD};

use crate::error::{CliError, CliResult};
use crate::num::parse_number;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FnSpec {
    Exp { rate: f64 },
    Power { lambda: f64 },
    PowerExp { lambda: f64, rate: f64 },
    SumPowerExp { c: f64 },
    DetPower { lambda: f64 },
    ExpTrace,
    DetPowerExp { gamma: f64 },
    Wishart { df: f64 },
}

impl FromStr for FnSpec {
    type Err = CliError;

    fn from_str(text: &str) -> CliResult<Self> {
        let mut parts = text.trim().split(':');
        let name = parts.next().unwrap_or_default().to_ascii_lowercase();
        let args = parts.map(parse_number).collect::<CliResult<Vec<f64>>>()?;
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(CliError::usage(format!("function {name:?} takes {n} parameter(s), got {} in {text:?}", args.len())))
            }
        };
        let spec = match name.as_str() {
            "exp" if args.is_empty() => FnSpec::Exp { rate: 1.0 },
            "exp" => {
                arity(1)?;
                FnSpec::Exp { rate: args[0] }
            }
            "power" => {
                arity(1)?;
                FnSpec::Power { lambda: args[0] }
            }
            "powerexp" => {
                arity(2)?;
                FnSpec::PowerExp { lambda: args[0], rate: args[1] }
            }
            "sumpowerexp" => {
                arity(1)?;
                FnSpec::SumPowerExp { c: args[0] }
            }
            "detpower" => {
                arity(1)?;
                FnSpec::DetPower { lambda: args[0] }
            }
            "exptrace" => {
                arity(0)?;
                FnSpec::ExpTrace
            }
            "detpowerexp" => {
                arity(1)?;
                FnSpec::DetPowerExp { gamma: args[0] }
            }
            "wishart" => {
                arity(1)?;
                FnSpec::Wishart { df: args[0] }
            }
            _ => {
                return Err(CliError::usage(format!(
                    "unknown function {text:?}; expected exp, exp:RATE, power:L, powerexp:L:RATE, sumpowerexp:C, \
                     detpower:L, exptrace, detpowerexp:G or wishart:DF"
                )))
            }
        };
        Ok(spec)
    }
}

impl fmt::Display for FnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FnSpec::Exp { rate } => write!(f, "exp:{rate}"),
            FnSpec::Power { lambda } => write!(f, "power:{lambda}"),
            FnSpec::PowerExp { lambda, rate } => write!(f, "powerexp:{lambda}:{rate}"),
            FnSpec::SumPowerExp { c } => write!(f, "sumpowerexp:{c}"),
            FnSpec::DetPower { lambda } => write!(f, "detpower:{lambda}"),
            FnSpec::ExpTrace => write!(f, "exptrace"),
            FnSpec::DetPowerExp { gamma } => write!(f, "detpowerexp:{gamma}"),
            FnSpec::Wishart { df } => write!(f, "wishart:{df}"),
        }
    }
}

impl FnSpec {
    pub fn scalar(&self) -> CliResult<Func1D<'static>> {
        match *self {
            FnSpec::Exp { rate } => Ok(Func1D::Exp { rate }),
            FnSpec::Power { lambda } => Ok(Func1D::Power { lambda }),
            FnSpec::PowerExp { lambda, rate } => Ok(Func1D::PowerExp { lambda, rate }),
            _ => Err(CliError::usage(format!("{self} is not a function of one scalar variable"))),
        }
    }

    pub fn multivar(&self, k: usize) -> CliResult<FuncKD<'static>> {
        match *self {
            FnSpec::SumPowerExp { c } => Ok(FuncKD::SumPowerExp { c, k }),
            _ => Ok(FuncKD::Separable(vec![self.scalar()?; k])),
        }
    }

    pub fn matrix(&self) -> CliResult<MatrixFn<'static>> {
        match *self {
            FnSpec::Exp { rate } if rate == 1.0 => Ok(MatrixFn::ExpNegTrace),
            FnSpec::ExpTrace => Ok(MatrixFn::ExpNegTrace),
            FnSpec::Power { lambda } | FnSpec::DetPower { lambda } => Ok(MatrixFn::DetPower { lambda }),
            FnSpec::DetPowerExp { gamma } => Ok(MatrixFn::DetPowerExp { gamma }),
            FnSpec::Wishart { df } => Ok(MatrixFn::Wishart { df }),
            _ => Err(CliError::usage(format!("{self} is not a function of symmetric matrices"))),
        }
    }

    /// Exponent `λ` when the function is a pure power.
    pub fn power(&self) -> Option<f64> {
        match *self {
            FnSpec::Power { lambda } | FnSpec::DetPower { lambda } => Some(lambda),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_map() {
        assert_eq!("exp".parse::<FnSpec>().unwrap(), FnSpec::Exp { rate: 1.0 });
        assert_eq!("power:1/2".parse::<FnSpec>().unwrap(), FnSpec::Power { lambda: 0.5 });
        assert_eq!("PowerExp:1:2".parse::<FnSpec>().unwrap(), FnSpec::PowerExp { lambda: 1.0, rate: 2.0 });
        assert_eq!("wishart:5".parse::<FnSpec>().unwrap(), FnSpec::Wishart { df: 5.0 });
        for bad in ["", "power", "power:1:2", "exptrace:1", "gauss:1", "exp:x"] {
            assert!(bad.parse::<FnSpec>().is_err(), "{bad}");
        }
        assert!(matches!(FnSpec::Exp { rate: 1.0 }.matrix().unwrap(), MatrixFn::ExpNegTrace));
        assert!(FnSpec::Exp { rate: 2.0 }.matrix().is_err());
        assert!(FnSpec::Wishart { df: 5.0 }.scalar().is_err());
        assert_eq!(FnSpec::Exp { rate: 1.0 }.multivar(3).unwrap().arity(), 3);
        for s in ["exp:1", "power:2.5", "powerexp:1:2", "sumpowerexp:1", "detpower:-1", "exptrace", "wishart:5"] {
            assert_eq!(s.parse::<FnSpec>().unwrap().to_string(), s);
        }
    }
}
