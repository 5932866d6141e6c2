//! Mellin and M-transforms of operator outputs and the gamma-ratio
//! identities they satisfy.
//!
//! For the many-matrix operators, with `f*` the M-transform of `f`,
//!
//! * first kind: `M{K₁f}(s) = f*(s) ∏ Γ_p((p+1)/2+ζⱼ−sⱼ) / Γ_p((p+1)/2+αⱼ+ζⱼ−sⱼ)`
//! * second kind: `M{K₂f}(s) = f*(s) ∏ Γ_p(ζⱼ+sⱼ) / Γ_p(αⱼ+ζⱼ+sⱼ)`
//!
//! The left-hand sides are computed independently of these formulas: by
//! quadrature of the operator output at `p = 1`, and by Monte Carlo over
//! `(W, U)` at `p ≥ 2`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matgamma::{exp_checked, ln_gamma_p};
use crate::matrix_ops::{density_constant, half_p1, lower, proposals, DensityMode, MatrixFn, MatrixOpParams, OpKind, YRoute};
use crate::mc::{estimate, BatchRunner, Estimate, McConfig};
use crate::quad::{integrate_tensor_sum, JacobiFamily, QuadConfig, QuadResult};
use crate::randmat::{ln_matrix_gamma_density, sample_matrix_beta, sample_matrix_gamma};
use crate::scalar_ops::{Func1D, FuncKD, MultivarOperator, ScalarOpSpec, ScalarOperator, Tail, VarDecl};
use crate::special::ln_gamma;
use crate::spd::SymMat;

/// Relative tolerance of quadrature-based transform checks.
pub const QUAD_REL_TOL: f64 = 1e-6;
/// Relative cap of Monte Carlo transform checks.
pub const MC_REL_CAP: f64 = 0.02;
/// Standard errors allowed in Monte Carlo transform checks.
pub const MC_SE_FACTOR: f64 = 3.0;

/// Transform variables `(s₁, …, s_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MPoint {
    pub s: Vec<f64>,
}

impl MPoint {
    pub fn new(s: &[f64]) -> Self {
        MPoint { s: s.to_vec() }
    }

    pub fn scalar(s: f64) -> Self {
        MPoint { s: vec![s] }
    }

    pub fn k(&self) -> usize {
        self.s.len()
    }
}

fn check_point(params: &MatrixOpParams, s: &MPoint) -> Result<()> {
    if s.k() != params.k() {
        return Err(Error::DimensionMismatch { expected: params.k(), found: s.k() });
    }
    if s.s.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("transform variables must be finite"));
    }
    Ok(())
}

fn ln_ratio_first(params: &MatrixOpParams, s: &MPoint) -> Result<f64> {
    check_point(params, s)?;
    let p = params.p();
    let h = half_p1(p);
    let mut l = 0.0;
    for (j, (&(zeta, alpha), &sj)) in params.pairs().iter().zip(&s.s).enumerate() {
        if !(sj < zeta + 1.0) {
            return Err(Error::Domain { param: "s", value: sj, bound: zeta + 1.0, rule: "s < ζ + 1 for the first-kind transform" }
                .at_variable(j + 1));
        }
        l += ln_gamma_p(p, h + zeta - sj)? - ln_gamma_p(p, h + alpha + zeta - sj)?;
    }
    Ok(l)
}

fn ln_ratio_second(params: &MatrixOpParams, s: &MPoint) -> Result<f64> {
    check_point(params, s)?;
    let p = params.p();
    let mut l = 0.0;
    for (j, (&(zeta, alpha), &sj)) in params.pairs().iter().zip(&s.s).enumerate() {
        let lo = lower(p);
        if !(zeta + sj > lo) {
            return Err(Error::Domain { param: "s", value: sj, bound: lo - zeta, rule: "ζ + s > (p−1)/2 for the second-kind transform" }
                .at_variable(j + 1));
        }
        l += ln_gamma_p(p, zeta + sj)? - ln_gamma_p(p, alpha + zeta + sj)?;
    }
    Ok(l)
}

/// `∏ⱼ Γ_p((p+1)/2+ζⱼ−sⱼ) / Γ_p((p+1)/2+αⱼ+ζⱼ−sⱼ)`, for `sⱼ < ζⱼ + 1`.
pub fn gamma_ratio_first(params: &MatrixOpParams, s: &MPoint) -> Result<f64> {
    exp_checked(ln_ratio_first(params, s)?)
}

/// `∏ⱼ Γ_p(ζⱼ+sⱼ) / Γ_p(αⱼ+ζⱼ+sⱼ)`, for `ζⱼ + sⱼ > (p−1)/2`.
pub fn gamma_ratio_second(params: &MatrixOpParams, s: &MPoint) -> Result<f64> {
    exp_checked(ln_ratio_second(params, s)?)
}

/// Gamma ratio of the parameters' kind.
pub fn gamma_ratio(params: &MatrixOpParams, s: &MPoint) -> Result<f64> {
    match params.kind() {
        OpKind::First => gamma_ratio_first(params, s),
        OpKind::Second => gamma_ratio_second(params, s),
    }
}

/// Mellin transform of a one-variable family, `∫₀^∞ x^(s−1) f(x) dx`.
pub fn mellin_closed_1d(f: &Func1D, s: f64) -> Result<f64> {
    let (shift, rate) = match *f {
        Func1D::Exp { rate } => (0.0, rate),
        Func1D::PowerExp { lambda, rate } => (lambda, rate),
        _ => return Err(Error::InvalidArgument("no closed-form Mellin transform for this function")),
    };
    if !(rate > 0.0) {
        return Err(Error::TailDivergence("exponential rate must be positive"));
    }
    let a = s + shift;
    if !(a > 0.0) {
        return Err(Error::Domain { param: "s", value: s, bound: -shift, rule: "s + λ > 0 for the Mellin transform" });
    }
    exp_checked(ln_gamma(a)? - a * rate.ln())
}

/// Mellin transform `∫ ∏ xⱼ^(sⱼ−1) f(x) dx` of a multivariable family.
pub fn mellin_closed_kd(f: &FuncKD, s: &[f64]) -> Result<f64> {
    if s.len() != f.arity() {
        return Err(Error::DimensionMismatch { expected: f.arity(), found: s.len() });
    }
    match f {
        FuncKD::Separable(fs) => fs.iter().zip(s).map(|(g, &sj)| mellin_closed_1d(g, sj)).product(),
        FuncKD::SumPowerExp { c, .. } => {
            // Dirichlet integral: ∏Γ(sⱼ)/Γ(Σs) · Γ(Σs + c)
            let mut l = 0.0;
            for (j, &sj) in s.iter().enumerate() {
                if !(sj > 0.0) {
                    return Err(Error::Domain { param: "s", value: sj, bound: 0.0, rule: "s > 0 for the Mellin transform" }
                        .at_variable(j + 1));
                }
                l += ln_gamma(sj)?;
            }
            let total: f64 = s.iter().sum();
            exp_checked(l + ln_gamma(total + c)? - ln_gamma(total)?)
        }
        FuncKD::Callback(_) => Err(Error::InvalidArgument("no closed-form Mellin transform for a callback")),
    }
}

/// How one coordinate of the Mellin integral maps `t ∈ (0,1)` to `x`.
#[derive(Clone, Copy, Debug)]
enum Piece {
    /// `x = t`, factor `t^(−e)`.
    Low { e: f64 },
    /// `x = 1/t`, factor `t^(−s−1)`.
    HighExp { s: f64 },
    /// `x = 1/t`, factor `t^(−c)`.
    HighPower { c: f64 },
}

impl Piece {
    #[inline]
    fn map(self, t: f64) -> (f64, f64) {
        match self {
            Piece::Low { e } => (t, if e == 0.0 { 1.0 } else { t.powf(-e) }),
            Piece::HighExp { s } => (1.0 / t, t.powf(-s - 1.0)),
            Piece::HighPower { c } => (1.0 / t, t.powf(-c)),
        }
    }
}

struct MellinPlan {
    /// per coordinate: (low, high) pieces with their families
    coords: Vec<[(JacobiFamily, Piece); 2]>,
}

impl MellinPlan {
    /// `(0, 1)` carries weight `t^(s−1+e)` (e: zero exponent); `(1, ∞)` maps
    /// `x = 1/t` and carries `t^(c−s−1)` for power tails.
    fn new(decls: &[VarDecl], s: &[f64], q: &QuadConfig) -> Result<Self> {
        if decls.len() != s.len() {
            return Err(Error::DimensionMismatch { expected: decls.len(), found: s.len() });
        }
        let mut coords = Vec::with_capacity(s.len());
        for (j, (d, &sj)) in decls.iter().zip(s).enumerate() {
            let wrap = |e: Error| e.at_variable(j + 1);
            let e = d.zero_exponent;
            if !(sj + e > 0.0) {
                return Err(wrap(Error::Domain { param: "s", value: sj, bound: -e, rule: "s + e > 0 for convergence at zero" }));
            }
            let low = (JacobiFamily::new(sj - 1.0 + e, 0.0, q)?, Piece::Low { e });
            let high = match d.tail {
                Tail::Exponential => (JacobiFamily::new(0.0, 0.0, q)?, Piece::HighExp { s: sj }),
                Tail::Power(c) => {
                    if !(c > sj) {
                        return Err(wrap(Error::TailDivergence("Mellin transform needs s below the power-tail exponent")));
                    }
                    (JacobiFamily::new(c - sj - 1.0, 0.0, q)?, Piece::HighPower { c })
                }
                Tail::Unknown => return Err(wrap(Error::TailDivergence("Mellin transform needs a declared tail"))),
            };
            coords.push([low, high]);
        }
        Ok(MellinPlan { coords })
    }

    fn integrate<F: FnMut(&[f64]) -> Result<f64>>(&self, mut g: F) -> Result<QuadResult> {
        let k = self.coords.len();
        let parts: Vec<Vec<&JacobiFamily>> =
            (0..1usize << k).map(|part| (0..k).map(|j| &self.coords[j][(part >> j) & 1].0).collect()).collect();
        let mut x = vec![0.0; k];
        integrate_tensor_sum(&parts, |part, t| {
            let mut factor = 1.0;
            for j in 0..k {
                let (xj, fj) = self.coords[j][(part >> j) & 1].1.map(t[j]);
                x[j] = xj;
                factor *= fj;
            }
            let v = g(&x)?;
            Ok(if v == 0.0 { 0.0 } else { v * factor })
        })
    }
}

/// `∫₀^∞ x^(s−1) g(x) dx` split at `x = 1`; the zero exponent of `g` and a
/// power tail sit in Gauss–Jacobi weights.
pub fn mellin_numeric_1d(g: &Func1D, s: f64, q: &QuadConfig) -> Result<QuadResult> {
    let decl = VarDecl { zero_exponent: g.zero_exponent(), tail: g.tail() };
    MellinPlan::new(&[decl], &[s], q)?.integrate(|x| Ok(g.eval(x[0])))
}

/// `∫ ∏ xⱼ^(sⱼ−1) g(x) dx` over the positive orthant, `2^k` tensor pieces.
pub fn mellin_numeric_kd(g: &FuncKD, s: &[f64], q: &QuadConfig) -> Result<QuadResult> {
    let decls: Vec<VarDecl> = (0..g.arity()).map(|j| g.decl(j)).collect();
    MellinPlan::new(&decls, s, q)?.integrate(|x| Ok(g.eval(x)))
}

/// Declared behaviour of a Kober output in one coordinate, from the poles
/// of `Γ(ζ+s)` (second kind) or `Γ(ζ+1−s)` (first kind).
fn output_decl(kind: OpKind, zeta: f64, d: VarDecl) -> VarDecl {
    match kind {
        OpKind::Second => VarDecl { zero_exponent: d.zero_exponent.min(zeta), tail: d.tail },
        OpKind::First => {
            let tail = match d.tail {
                Tail::Exponential => Tail::Power(zeta + 1.0),
                Tail::Power(c) => Tail::Power(c.min(zeta + 1.0)),
                Tail::Unknown => Tail::Unknown,
            };
            VarDecl { zero_exponent: d.zero_exponent, tail }
        }
    }
}

/// Inner rules run a hundred times tighter than the outer one, with an
/// absolute floor relative to the output at `u = 1`; several variables start
/// from coarser inner rules.
fn inner_config(q: &QuadConfig, magnitude: f64, k: usize) -> QuadConfig {
    let m = if magnitude.is_finite() && magnitude > 0.0 { magnitude } else { 1.0 };
    let base_nodes = if k > 1 { (q.base_nodes / 2).max(16) } else { q.base_nodes };
    QuadConfig { rel_tol: (1e-2 * q.rel_tol).max(1e-14), abs_tol: 1e-2 * q.rel_tol * m, base_nodes, ..*q }
}

/// Mellin transform of the one-variable Kober output, by quadrature of the
/// operator values.
pub fn operator_mellin_1d(kind: OpKind, zeta: f64, alpha: f64, f: &Func1D, s: f64, q: &QuadConfig) -> Result<QuadResult> {
    let spec = match kind {
        OpKind::First => ScalarOpSpec::kober1(zeta, alpha),
        OpKind::Second => ScalarOpSpec::kober2(zeta, alpha),
    };
    let probe = ScalarOperator::new(spec, *f, q)?.eval(1.0)?;
    let op = ScalarOperator::new(spec, *f, &inner_config(q, probe.value.abs(), 1))?;
    let decl = output_decl(kind, zeta, VarDecl { zero_exponent: f.zero_exponent(), tail: f.tail() });
    MellinPlan::new(&[decl], &[s], q)?.integrate(|x| Ok(op.eval(x[0])?.value))
}

/// Mellin transform of the multivariable Kober output.
pub fn operator_mellin_kd(kind: OpKind, params: &[(f64, f64)], f: &FuncKD, s: &[f64], q: &QuadConfig) -> Result<QuadResult> {
    let ones = vec![1.0; params.len()];
    let probe = MultivarOperator::new(kind, params, f.clone(), q)?.eval(&ones)?;
    let op = MultivarOperator::new(kind, params, f.clone(), &inner_config(q, probe.value.abs(), params.len()))?;
    let decls: Vec<VarDecl> = params.iter().enumerate().map(|(j, &(zeta, _))| output_decl(kind, zeta, f.decl(j))).collect();
    MellinPlan::new(&decls, s, q)?.integrate(|u| Ok(op.eval(u)?.value))
}

fn moment_domain(params: &MatrixOpParams, f: &MatrixFn<'_>, s: &MPoint) -> Result<()> {
    let bound = match params.kind() {
        OpKind::First => ln_ratio_first(params, s),
        OpKind::Second => ln_ratio_second(params, s),
    };
    match bound.and_then(|_| f.m_transform(params.p(), &s.s)) {
        Ok(_) => Ok(()),
        Err(Error::Domain { .. } | Error::Variable { .. }) => {
            Err(Error::MomentDivergence("s is on or beyond the boundary of the moment domain"))
        }
        Err(e) => Err(e),
    }
}

/// M-transform of the operator output from density-mode draws:
/// `c · ∫f · E ∏ⱼ |Uⱼ|^(sⱼ−(p+1)/2)`, `c` the density constant.
///
/// Raises [`Error::MomentDivergence`] when the moment is infinite at `s` or
/// when the batch means show a heavy tail.
pub fn mtransform_mc<B: BatchRunner + ?Sized>(
    params: &MatrixOpParams,
    f: &MatrixFn<'_>,
    route: YRoute,
    s: &MPoint,
    mc: &McConfig,
    runner: &B,
) -> Result<Estimate> {
    check_point(params, s)?;
    moment_domain(params, f, s)?;
    let p = params.p();
    let k = params.k();
    let h: Vec<f64> = s.s.iter().map(|sj| sj - half_p1(p)).collect();
    let dm = DensityMode::new(params, route)?;
    let scale = density_constant(params)? * f.total_mass(p, k)?;
    let est = estimate(mc, runner, |rng| {
        let vs = f.sample_normalized(p, k, rng)?;
        let us = dm.sample_given(&vs, rng)?;
        let l: f64 = us.iter().zip(&h).map(|(u, hj)| hj * u.det().ln()).sum();
        Ok(l.exp())
    })?;
    if est.heavy_tailed() {
        return Err(Error::MomentDivergence("batch means disagree beyond five standard errors"));
    }
    Ok(est.scaled(scale))
}

/// Shape and scale `(a, θ)` with `f ∝ |V|^(a−(p+1)/2) e^(−tr V/θ)` per
/// argument.
fn gamma_form(f: &MatrixFn<'_>, p: usize) -> Result<(f64, f64)> {
    match *f {
        MatrixFn::DetPowerExp { gamma } => Ok((gamma, 1.0)),
        MatrixFn::ExpNegTrace => Ok((half_p1(p), 1.0)),
        MatrixFn::Wishart { df } => Ok((df / 2.0, 2.0)),
        _ => Err(Error::InvalidArgument("operator transform by Monte Carlo needs a gamma-type function")),
    }
}

/// Widening of the proposal scale relative to `f`, keeping weights bounded.
const PROPOSAL_WIDEN: f64 = 1.25;

/// M-transform of the operator output at any `p` by Monte Carlo over
/// `(W, U)`: `M = c ∫∫ ∏ |Uⱼ|^(sⱼ−(p+1)/2) f(V(U, W)) dβ(W) dU`.
///
/// `W` comes from the estimator's matrix-beta proposal. Given `W`, `U` is
/// drawn as `W^(1/2) Ṽ W^(1/2)` (second kind) or `W^(−1/2) Ṽ W^(−1/2)`
/// (first kind) with `Ṽ` matrix gamma; `V` is then formed from `U` and `W`
/// and `f(V)` evaluated directly.
pub fn operator_mtransform_mc<B: BatchRunner + ?Sized>(
    params: &MatrixOpParams,
    f: &MatrixFn<'_>,
    s: &MPoint,
    mc: &McConfig,
    runner: &B,
) -> Result<Estimate> {
    check_point(params, s)?;
    let p = params.p();
    let hp = half_p1(p);
    let (a_f, theta) = gamma_form(f, p)?;
    let (props, ln_c) = proposals(params)?;
    let c = exp_checked(ln_c)?;
    let scale = SymMat::scaled_identity(p, theta * PROPOSAL_WIDEN);
    let mut shapes = Vec::with_capacity(s.k());
    for (j, &sj) in s.s.iter().enumerate() {
        let a = sj - hp + a_f;
        if !(a > lower(p)) {
            return Err(Error::Domain { param: "s", value: sj, bound: lower(p) + hp - a_f, rule: "s + a > p for the gamma proposal" }
                .at_variable(j + 1));
        }
        shapes.push(a);
    }
    let second = params.kind() == OpKind::Second;
    let est = estimate(mc, runner, |rng| {
        let mut vs = Vec::with_capacity(props.len());
        let mut ln_w = 0.0;
        for ((prop, &a), &sj) in props.iter().zip(&shapes).zip(&s.s) {
            let w = sample_matrix_beta(&prop.beta, rng)?;
            let vt = sample_matrix_gamma(a, &scale, rng)?;
            let (u, ln_jac) = if second {
                (vt.sandwich(&w.sqrt()?), hp * w.det().ln())
            } else {
                (vt.sandwich(&w.inv_sqrt()?), -hp * w.det().ln())
            };
            // U = W^(±1/2) Ṽ W^(±1/2): density of U given W is q(Ṽ)·|W|^(∓(p+1)/2)
            let ln_q = ln_matrix_gamma_density(&vt, a, &scale)? - ln_jac;
            let root = u.sqrt()?;
            let v = if second { w.inverse()?.sandwich(&root) } else { w.sandwich(&root) };
            vs.push(v);
            ln_w += (sj - hp) * u.det().ln() - ln_q;
            if prop.shifted {
                ln_w -= w.det().ln();
            }
        }
        let fv = f.eval(&vs)?;
        Ok(if fv == 0.0 { 0.0 } else { fv * ln_w.exp() })
    })?;
    Ok(est.scaled(c))
}

/// What the left-hand side of a transform check is computed from.
#[derive(Clone, Debug)]
pub enum TransformTarget<'a> {
    /// `p = 1`, `k = 1`, quadrature.
    Scalar(Func1D<'a>),
    /// `p = 1`, `k ≥ 1`, quadrature.
    Multivar(FuncKD<'a>),
    /// Any `p`, Monte Carlo over `(W, U)`.
    Matrix(MatrixFn<'a>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LhsMethod {
    Quadrature,
    MonteCarlo,
}

/// One grid point of a transform check.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformReport {
    pub s: Vec<f64>,
    pub method: LhsMethod,
    pub lhs: f64,
    /// Standard error (Monte Carlo) or last quadrature change.
    pub lhs_err: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Relative tolerance on `ratio − 1`.
    pub tol: f64,
    pub pass: bool,
    pub error: Option<Error>,
}

impl TransformReport {
    fn failed(s: &MPoint, method: LhsMethod, tol: f64, e: Error) -> Self {
        TransformReport {
            s: s.s.clone(),
            method,
            lhs: f64::NAN,
            lhs_err: f64::NAN,
            rhs: f64::NAN,
            ratio: f64::NAN,
            tol,
            pass: false,
            error: Some(e),
        }
    }
}

/// `f*(s)` of a target.
pub fn target_transform(params: &MatrixOpParams, target: &TransformTarget<'_>, s: &MPoint) -> Result<f64> {
    match target {
        TransformTarget::Scalar(f) => {
            if s.k() != 1 {
                return Err(Error::DimensionMismatch { expected: 1, found: s.k() });
            }
            mellin_closed_1d(f, s.s[0])
        }
        TransformTarget::Multivar(f) => mellin_closed_kd(f, &s.s),
        TransformTarget::Matrix(f) => f.m_transform(params.p(), &s.s),
    }
}

fn lhs(
    params: &MatrixOpParams,
    target: &TransformTarget<'_>,
    s: &MPoint,
    q: &QuadConfig,
    mc: &McConfig,
    runner: &(impl BatchRunner + ?Sized),
) -> Result<(f64, f64)> {
    check_point(params, s)?;
    let scalar_only = || {
        if params.p() == 1 {
            Ok(())
        } else {
            Err(Error::InvalidArgument("quadrature transforms need p = 1"))
        }
    };
    match target {
        TransformTarget::Scalar(f) => {
            scalar_only()?;
            let (zeta, alpha) = params.pairs()[0];
            let r = operator_mellin_1d(params.kind(), zeta, alpha, f, s.s[0], q)?;
            Ok((r.value, r.last_delta))
        }
        TransformTarget::Multivar(f) => {
            scalar_only()?;
            let r = operator_mellin_kd(params.kind(), params.pairs(), f, &s.s, q)?;
            Ok((r.value, r.last_delta))
        }
        TransformTarget::Matrix(f) => {
            let e = operator_mtransform_mc(params, f, s, mc, runner)?;
            Ok((e.mean, e.se))
        }
    }
}

/// Checks `M{K f}(s) = f*(s) · gamma ratio` over a grid.
///
/// Quadrature points pass when `|lhs/rhs − 1| < 1e-6`; Monte Carlo points
/// when `|lhs − rhs| ≤ 3 s.e.` and `|lhs/rhs − 1| < 2%`. Points outside the
/// domain produce failed reports carrying the error.
pub fn verify_transform<B: BatchRunner + ?Sized>(
    params: &MatrixOpParams,
    target: &TransformTarget<'_>,
    grid: &[MPoint],
    q: &QuadConfig,
    mc: &McConfig,
    runner: &B,
) -> Vec<TransformReport> {
    let method = match target {
        TransformTarget::Matrix(_) => LhsMethod::MonteCarlo,
        _ => LhsMethod::Quadrature,
    };
    let tol = match method {
        LhsMethod::Quadrature => QUAD_REL_TOL,
        LhsMethod::MonteCarlo => MC_REL_CAP,
    };
    grid.iter()
        .map(|s| {
            let rhs = match gamma_ratio(params, s).and_then(|g| Ok(g * target_transform(params, target, s)?)) {
                Ok(v) => v,
                Err(e) => return TransformReport::failed(s, method, tol, e),
            };
            let (lhs, err) = match lhs(params, target, s, q, mc, runner) {
                Ok(v) => v,
                Err(e) => return TransformReport::failed(s, method, tol, e),
            };
            let ratio = lhs / rhs;
            let pass = match method {
                LhsMethod::Quadrature => (ratio - 1.0).abs() < tol,
                LhsMethod::MonteCarlo => (lhs - rhs).abs() <= MC_SE_FACTOR * err && (ratio - 1.0).abs() < tol,
            };
            TransformReport { s: s.s.clone(), method, lhs, lhs_err: err, rhs, ratio, tol, pass, error: None }
        })
        .collect()
}
