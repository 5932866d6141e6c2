//! Fractional integral operators of the first and second kind.
//!
//! The crate covers the one-variable Kober, Riemann–Liouville, Weyl and Saigo
//! operators, their multivariable product-kernel forms, and the many-matrix
//! Kober operators acting on functions of symmetric positive definite
//! arguments. Every operator is paired with a way to check it: Gauss–Jacobi
//! quadrature against closed forms in the scalar case, and exact importance
//! sampling over matrix-variate beta proposals in the matrix case, together
//! with the gamma-ratio identities satisfied by the M-transforms of the
//! operator outputs.
//!
//! The crate is `no_std` and needs only `alloc`. Monte Carlo estimators run
//! their batches through a [`mc::BatchRunner`]; [`mc::Serial`] is provided
//! here and a parallel runner lives in the companion `kober` crate.
#![no_std]
#![forbid(unsafe_code)]
// `num_traits::Float` provides f64 math under no_std; once std is in the crate
// graph its inherent methods win and the import goes unused.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod hyper;
pub mod jacobian;
pub mod matgamma;
pub mod matrix_ops;
pub mod mc;
pub mod mtransform;
pub mod quad;
pub mod randmat;
pub mod rng;
pub mod scalar_ops;
pub mod spd;
pub mod special;

pub use error::{Error, Result};
pub use spd::{Mat, SymMat};
