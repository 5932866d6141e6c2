//! One-variable fractional operators (Kober of both kinds,
//! Riemann–Liouville, Weyl, Saigo), fractional derivatives, and the
//! product-kernel multivariable operators.
//!
//! Every operator is reduced to an integral over `(0, 1)` whose endpoint
//! singularities sit in a Gauss–Jacobi weight:
//!
//! * first kind: `K₁f(u) = Γ(α)⁻¹ ∫₀¹ t^ζ (1−t)^(α−1) f(ut) dt`
//! * second kind: `K₂f(u) = Γ(α)⁻¹ ∫₀¹ t^(ζ−1) (1−t)^(α−1) f(u/t) dt`
//! * Weyl: `v = x + t/(1−t)`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hyper::gauss_2f1;
use crate::quad::{integrate, integrate_tensor, integrate_tensor_sum, JacobiFamily, QuadConfig, QuadResult};
use crate::special::{gamma_signed, rgamma};

/// Declared behaviour of a function towards infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tail {
    /// Decays faster than any power.
    Exponential,
    /// `f(v) = v^(−c) h(v)` with `h` smooth and bounded in `1/v`.
    Power(f64),
    /// Nothing declared; infinite ranges are refused.
    Unknown,
}

/// A user function with declared regularity.
#[derive(Clone, Copy)]
pub struct Callback1D<'a> {
    pub f: &'a dyn Fn(f64) -> f64,
    /// `f(v) = v^e h(v)` near zero with `h` smooth.
    pub zero_exponent: f64,
    /// Behaviour as `v → +∞`.
    pub tail: Tail,
    /// Behaviour as `v → −∞`.
    pub left_tail: Tail,
    /// Number of continuous derivatives on `(0, ∞)`.
    pub smoothness: u32,
}

impl<'a> Callback1D<'a> {
    pub fn new(f: &'a dyn Fn(f64) -> f64) -> Self {
        Callback1D { f, zero_exponent: 0.0, tail: Tail::Unknown, left_tail: Tail::Unknown, smoothness: 0 }
    }

    pub fn zero_exponent(mut self, e: f64) -> Self {
        self.zero_exponent = e;
        self
    }

    pub fn tail(mut self, t: Tail) -> Self {
        self.tail = t;
        self
    }

    pub fn left_tail(mut self, t: Tail) -> Self {
        self.left_tail = t;
        self
    }

    pub fn smoothness(mut self, m: u32) -> Self {
        self.smoothness = m;
        self
    }
}

impl fmt::Debug for Callback1D<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Callback1D")
            .field("zero_exponent", &self.zero_exponent)
            .field("tail", &self.tail)
            .field("left_tail", &self.left_tail)
            .field("smoothness", &self.smoothness)
            .finish_non_exhaustive()
    }
}

/// Integrand families of the one-variable operators.
#[derive(Clone, Copy, Debug)]
pub enum Func1D<'a> {
    /// `v^λ`
    Power { lambda: f64 },
    /// `e^(−rate·v)`
    Exp { rate: f64 },
    /// `v^λ e^(−rate·v)`
    PowerExp { lambda: f64, rate: f64 },
    Callback(Callback1D<'a>),
}

impl Func1D<'_> {
    pub fn eval(&self, v: f64) -> f64 {
        match *self {
            Func1D::Power { lambda } => v.powf(lambda),
            Func1D::Exp { rate } => (-rate * v).exp(),
            Func1D::PowerExp { lambda, rate } => v.powf(lambda) * (-rate * v).exp(),
            Func1D::Callback(c) => (c.f)(v),
        }
    }

    pub fn zero_exponent(&self) -> f64 {
        match *self {
            Func1D::Power { lambda } | Func1D::PowerExp { lambda, .. } => lambda,
            Func1D::Exp { .. } => 0.0,
            Func1D::Callback(c) => c.zero_exponent,
        }
    }

    pub fn tail(&self) -> Tail {
        match *self {
            Func1D::Power { lambda } => Tail::Power(-lambda),
            Func1D::Exp { rate } | Func1D::PowerExp { rate, .. } if rate > 0.0 => Tail::Exponential,
            Func1D::Exp { .. } | Func1D::PowerExp { .. } => Tail::Unknown,
            Func1D::Callback(c) => c.tail,
        }
    }

    pub fn left_tail(&self) -> Tail {
        match *self {
            Func1D::Exp { rate } if rate < 0.0 => Tail::Exponential,
            Func1D::Callback(c) => c.left_tail,
            _ => Tail::Unknown,
        }
    }

    pub fn smoothness(&self) -> u32 {
        match *self {
            Func1D::Callback(c) => c.smoothness,
            _ => u32::MAX,
        }
    }

    fn defined_on_positive_only(&self) -> bool {
        matches!(self, Func1D::Power { .. } | Func1D::PowerExp { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarOpKind {
    Kober1,
    Kober2,
    RiemannLiouville,
    WeylLeft,
    WeylRight,
    Saigo1,
}

/// Parameters of a one-variable operator. `a` is the lower limit of
/// Riemann–Liouville (`−∞` selects Weyl-left); `beta` and `gamma` are the
/// extra Saigo parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarOpSpec {
    pub kind: ScalarOpKind,
    pub alpha: f64,
    pub zeta: f64,
    pub a: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl ScalarOpSpec {
    fn base(kind: ScalarOpKind, alpha: f64) -> Self {
        ScalarOpSpec { kind, alpha, zeta: 0.0, a: 0.0, beta: 0.0, gamma: 0.0 }
    }

    pub fn kober1(zeta: f64, alpha: f64) -> Self {
        ScalarOpSpec { zeta, ..Self::base(ScalarOpKind::Kober1, alpha) }
    }

    pub fn kober2(zeta: f64, alpha: f64) -> Self {
        ScalarOpSpec { zeta, ..Self::base(ScalarOpKind::Kober2, alpha) }
    }

    pub fn riemann_liouville(alpha: f64, a: f64) -> Self {
        ScalarOpSpec { a, ..Self::base(ScalarOpKind::RiemannLiouville, alpha) }
    }

    pub fn weyl_left(alpha: f64) -> Self {
        Self::base(ScalarOpKind::WeylLeft, alpha)
    }

    pub fn weyl_right(alpha: f64) -> Self {
        Self::base(ScalarOpKind::WeylRight, alpha)
    }

    pub fn saigo1(alpha: f64, beta: f64, gamma: f64, zeta: f64) -> Self {
        ScalarOpSpec { zeta, beta, gamma, ..Self::base(ScalarOpKind::Saigo1, alpha) }
    }
}

/// How one coordinate maps `t ∈ (0, 1)` to the function argument.
#[derive(Clone, Copy, Debug)]
enum VarMode {
    /// `v = u t`, factor `t^(−absorb)`.
    First { absorb: f64 },
    /// `v = u / t`, factor `t^(−c)` for power tails or, for exponential
    /// tails with `ζ ≤ 0`, `t^(ζ−1)`.
    Second { factor_exp: f64 },
    /// `v = x + s·t/(1−t)`, factor `(1−t)^(−e)`.
    Weyl { sign: f64, one_minus_exp: f64 },
}

impl VarMode {
    #[inline]
    fn map(&self, u: f64, t: f64) -> (f64, f64) {
        match *self {
            VarMode::First { absorb } => (u * t, pow_or_one(t, -absorb)),
            VarMode::Second { factor_exp } => (u / t, pow_or_one(t, factor_exp)),
            VarMode::Weyl { sign, one_minus_exp } => {
                (u + sign * t / (1.0 - t), pow_or_one(1.0 - t, -one_minus_exp))
            }
        }
    }
}

#[inline]
fn pow_or_one(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        x.powf(e)
    }
}

/// `f(v)·factor`, with zero function values short-circuiting overflowing
/// factors.
#[inline]
fn weighted(fv: f64, factor: f64) -> f64 {
    if fv == 0.0 {
        0.0
    } else {
        fv * factor
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { param: "alpha", value: alpha, bound: 0.0, rule: "α > 0 for a fractional integral" })
    }
}

/// Weight exponents and coordinate map of a first-kind coordinate.
fn plan_first(zeta: f64, alpha: f64, e0: f64, q: &QuadConfig) -> Result<(JacobiFamily, VarMode)> {
    check_alpha(alpha)?;
    let absorb = e0;
    if !(zeta + absorb > -1.0) {
        return Err(Error::Domain {
            param: "zeta",
            value: zeta,
            bound: -1.0 - absorb,
            rule: "ζ + e > −1 for the first-kind operator (e: zero exponent of f)",
        });
    }
    Ok((JacobiFamily::new(zeta + absorb, alpha - 1.0, q)?, VarMode::First { absorb }))
}

/// Above this argument a first-kind coordinate with exponentially decaying
/// `f` switches to [`FirstFar`]; below its reciprocal a second-kind
/// coordinate switches to [`SecondNear`].
const FAR_SWITCH: f64 = 4.0;

/// First-kind coordinate at large `u`:
/// `∫₀¹ w^ζ (1−w)^(α−1) f(uw) dw = u^(−ζ−1) [∫₀¹ + ∫₁ᵘ] y^ζ (1−y/u)^(α−1) f(y) dy`.
/// The second piece uses `y = 1/r`, `r = 1/u + (1−1/u)τ`, which leaves
/// `(1−1/u)^α τ^(α−1) r^(−ζ−1−α) f(1/r)`. Neither piece resolves a scale
/// that shrinks with `u`.
#[derive(Debug)]
struct FirstFar {
    near: JacobiFamily,
    tail: JacobiFamily,
    zeta: f64,
    alpha: f64,
    absorb: f64,
}

impl FirstFar {
    fn new(zeta: f64, alpha: f64, absorb: f64, q: &QuadConfig) -> Result<Self> {
        Ok(FirstFar {
            near: JacobiFamily::new(zeta + absorb, 0.0, q)?,
            tail: JacobiFamily::new(alpha - 1.0, 0.0, q)?,
            zeta,
            alpha,
            absorb,
        })
    }

    #[inline]
    fn map(&self, piece: usize, u: f64, t: f64) -> (f64, f64) {
        let lead = u.powf(-self.zeta - 1.0);
        if piece == 0 {
            (t, lead * pow_or_one(1.0 - t / u, self.alpha - 1.0) * pow_or_one(t, -self.absorb))
        } else {
            let a = 1.0 / u;
            let r = a + (1.0 - a) * t;
            (1.0 / r, lead * (1.0 - a).powf(self.alpha) * r.powf(-self.zeta - 1.0 - self.alpha))
        }
    }
}

/// Second-kind coordinate at small `u`: `∫₀¹ t^(ζ−1) (1−t)^(α−1) f(u/t) dt`
/// split at `t = u`. Below, `t = u r` puts `v = 1/r`; above, `t = u^(1−r)`
/// puts `v = u^r`, so `f` is sampled evenly in `ln v`.
#[derive(Debug)]
struct SecondNear {
    tail: JacobiFamily,
    near: JacobiFamily,
    zeta: f64,
    alpha: f64,
    r_exp: f64,
}

impl SecondNear {
    fn new(zeta: f64, alpha: f64, tail: Tail, q: &QuadConfig) -> Result<Self> {
        // same weight split as the plain rule: r^a · r^(r_exp)
        let (a, r_exp) = match tail {
            Tail::Exponential if zeta > 0.0 => (zeta - 1.0, 0.0),
            Tail::Exponential => (0.0, zeta - 1.0),
            Tail::Power(c) => (zeta - 1.0 + c, -c),
            Tail::Unknown => return Err(Error::TailDivergence("the second-kind operator needs a declared tail")),
        };
        Ok(SecondNear {
            tail: JacobiFamily::new(a, 0.0, q)?,
            near: JacobiFamily::new(0.0, alpha - 1.0, q)?,
            zeta,
            alpha,
            r_exp,
        })
    }

    #[inline]
    fn map(&self, piece: usize, u: f64, t: f64) -> (f64, f64) {
        if piece == 0 {
            let lead = u.powf(self.zeta) * pow_or_one(1.0 - u * t, self.alpha - 1.0);
            (1.0 / t, lead * pow_or_one(t, self.r_exp))
        } else {
            let lu = u.ln();
            let w = ((1.0 - t) * lu).exp();
            // (1−w)/(1−t) stays finite as t → 1
            let ratio = -((1.0 - t) * lu).exp_m1() / (1.0 - t);
            (u / w, -lu * pow_or_one(w, self.zeta) * pow_or_one(ratio, self.alpha - 1.0))
        }
    }
}

/// Two-piece representation of a Kober coordinate away from unit scale.
#[derive(Debug)]
enum Split {
    FirstFar(FirstFar),
    SecondNear(SecondNear),
}

impl Split {
    fn first(zeta: f64, alpha: f64, e0: f64, tail: Tail, q: &QuadConfig) -> Result<Option<Self>> {
        if tail == Tail::Exponential {
            Ok(Some(Split::FirstFar(FirstFar::new(zeta, alpha, e0, q)?)))
        } else {
            Ok(None)
        }
    }

    fn second(zeta: f64, alpha: f64, tail: Tail, q: &QuadConfig) -> Result<Option<Self>> {
        Ok(Some(Split::SecondNear(SecondNear::new(zeta, alpha, tail, q)?)))
    }

    fn applies(&self, u: f64) -> bool {
        match self {
            Split::FirstFar(_) => u > FAR_SWITCH,
            Split::SecondNear(_) => u < 1.0 / FAR_SWITCH,
        }
    }

    fn family(&self, piece: usize) -> &JacobiFamily {
        match (self, piece) {
            (Split::FirstFar(s), 0) => &s.near,
            (Split::FirstFar(s), _) => &s.tail,
            (Split::SecondNear(s), 0) => &s.tail,
            (Split::SecondNear(s), _) => &s.near,
        }
    }

    #[inline]
    fn map(&self, piece: usize, u: f64, t: f64) -> (f64, f64) {
        match self {
            Split::FirstFar(s) => s.map(piece, u, t),
            Split::SecondNear(s) => s.map(piece, u, t),
        }
    }
}

/// Weight exponents and coordinate map of a second-kind coordinate.
fn plan_second(zeta: f64, alpha: f64, tail: Tail, q: &QuadConfig) -> Result<(JacobiFamily, VarMode)> {
    check_alpha(alpha)?;
    match tail {
        Tail::Exponential => {
            if zeta > 0.0 {
                Ok((JacobiFamily::new(zeta - 1.0, alpha - 1.0, q)?, VarMode::Second { factor_exp: 0.0 }))
            } else {
                Ok((JacobiFamily::new(0.0, alpha - 1.0, q)?, VarMode::Second { factor_exp: zeta - 1.0 }))
            }
        }
        Tail::Power(c) => {
            if !(zeta + c > 0.0) {
                return Err(Error::TailDivergence("ζ + c must be positive for f(v) = O(v^−c)"));
            }
            Ok((JacobiFamily::new(zeta - 1.0 + c, alpha - 1.0, q)?, VarMode::Second { factor_exp: -c }))
        }
        Tail::Unknown => Err(Error::TailDivergence("the second-kind operator needs a declared tail")),
    }
}

/// Weight and map of a Weyl integral over `(x, ∞)` (`sign = 1`) or
/// `(−∞, x)` (`sign = −1`) given the tail on that side.
fn plan_weyl(alpha: f64, tail: Tail, sign: f64, q: &QuadConfig) -> Result<(JacobiFamily, VarMode)> {
    check_alpha(alpha)?;
    match tail {
        Tail::Exponential => Ok((
            JacobiFamily::new(alpha - 1.0, 0.0, q)?,
            VarMode::Weyl { sign, one_minus_exp: alpha + 1.0 },
        )),
        Tail::Power(c) => {
            if !(c > alpha) {
                return Err(Error::TailDivergence("Weyl integral needs f(v) = O(|v|^−c) with c > α"));
            }
            Ok((JacobiFamily::new(alpha - 1.0, c - 1.0 - alpha, q)?, VarMode::Weyl { sign, one_minus_exp: c }))
        }
        Tail::Unknown => Err(Error::TailDivergence("the Weyl integral needs a declared tail")),
    }
}

#[derive(Clone, Copy, Debug)]
enum Extra {
    None,
    /// Saigo kernel `₂F₁(a, b; c; 1−t)·t^(−absorb)`.
    Hyper { a: f64, b: f64, c: f64, absorb: f64 },
}

/// A one-variable operator with its quadrature rules prepared; repeated
/// evaluations reuse the rules.
#[derive(Debug)]
pub struct ScalarOperator<'a> {
    spec: ScalarOpSpec,
    f: Func1D<'a>,
    fam: JacobiFamily,
    mode: VarMode,
    extra: Extra,
    split: Option<Split>,
}

impl<'a> ScalarOperator<'a> {
    pub fn new(spec: ScalarOpSpec, f: Func1D<'a>, q: &QuadConfig) -> Result<Self> {
        let e0 = f.zero_exponent();
        let mut extra = Extra::None;
        let mut split = None;
        let (fam, mode) = match spec.kind {
            ScalarOpKind::Kober1 => {
                let plan = plan_first(spec.zeta, spec.alpha, e0, q)?;
                split = Split::first(spec.zeta, spec.alpha, e0, f.tail(), q)?;
                plan
            }
            ScalarOpKind::Kober2 => {
                let plan = plan_second(spec.zeta, spec.alpha, f.tail(), q)?;
                split = Split::second(spec.zeta, spec.alpha, f.tail(), q)?;
                plan
            }
            ScalarOpKind::RiemannLiouville if spec.a == f64::NEG_INFINITY => {
                return Self::new(ScalarOpSpec { kind: ScalarOpKind::WeylLeft, ..spec }, f, q);
            }
            ScalarOpKind::RiemannLiouville => {
                if !spec.a.is_finite() {
                    return Err(Error::InvalidArgument("lower limit must be finite or −∞"));
                }
                let e = if spec.a == 0.0 { e0 } else { 0.0 };
                // (x−a)^α Γ(α)⁻¹ ∫₀¹ (1−t)^(α−1) f(a + (x−a)t) dt
                plan_first(0.0, spec.alpha, e, q).map_err(|err| match err {
                    Error::Domain { .. } => Error::Domain {
                        param: "lambda",
                        value: e,
                        bound: -1.0,
                        rule: "zero exponent of f > −1 for the Riemann–Liouville integral",
                    },
                    other => other,
                })?
            }
            ScalarOpKind::WeylRight => plan_weyl(spec.alpha, f.tail(), 1.0, q)?,
            ScalarOpKind::WeylLeft => plan_weyl(spec.alpha, f.left_tail(), -1.0, q)?,
            ScalarOpKind::Saigo1 => {
                check_alpha(spec.alpha)?;
                let (a, b, c) = (spec.alpha + spec.beta, -spec.gamma, spec.alpha);
                let trivial = a == 0.0 || b == 0.0;
                let absorb_h = if trivial { 0.0 } else { (spec.gamma - spec.beta).min(0.0) };
                let absorb_f = e0;
                if !(spec.zeta + absorb_f > -1.0) {
                    return Err(Error::Domain {
                        param: "zeta",
                        value: spec.zeta,
                        bound: -1.0 - absorb_f,
                        rule: "ζ + e > −1 for the Saigo operator (e: zero exponent of f)",
                    });
                }
                if !(spec.zeta + absorb_f + absorb_h > -1.0) {
                    return Err(Error::HypergeometricNonConvergent);
                }
                if !trivial {
                    extra = Extra::Hyper { a, b, c, absorb: absorb_h };
                }
                (
                    JacobiFamily::new(spec.zeta + absorb_f + absorb_h, spec.alpha - 1.0, q)?,
                    VarMode::First { absorb: absorb_f },
                )
            }
        };
        Ok(ScalarOperator { spec, f, fam, mode, extra, split })
    }

    pub fn spec(&self) -> &ScalarOpSpec {
        &self.spec
    }

    /// Operator value at `x` (`u` for the Kober and Saigo operators).
    pub fn eval(&self, x: f64) -> Result<QuadResult> {
        if !x.is_finite() {
            return Err(Error::InvalidArgument("evaluation point must be finite"));
        }
        let alpha = self.spec.alpha;
        let (base, offset, scale) = match self.spec.kind {
            ScalarOpKind::Kober1 | ScalarOpKind::Kober2 | ScalarOpKind::Saigo1 => {
                if !(x > 0.0) {
                    return Err(Error::Domain { param: "u", value: x, bound: 0.0, rule: "u > 0" });
                }
                (x, 0.0, rgamma(alpha))
            }
            ScalarOpKind::RiemannLiouville => {
                let a = self.spec.a;
                if !(x > a) {
                    return Err(Error::Domain { param: "x", value: x, bound: a, rule: "x > a for the Riemann–Liouville integral" });
                }
                (x - a, a, (x - a).powf(alpha) * rgamma(alpha))
            }
            ScalarOpKind::WeylRight | ScalarOpKind::WeylLeft => {
                if self.f.defined_on_positive_only() && !(x > 0.0) {
                    return Err(Error::Domain { param: "x", value: x, bound: 0.0, rule: "x > 0 for power-type f" });
                }
                (x, 0.0, rgamma(alpha))
            }
        };
        let f = &self.f;
        if let Some(split) = self.split.as_ref().filter(|s| s.applies(x)) {
            let res = integrate_tensor_sum(&[vec![split.family(0)], vec![split.family(1)]], |piece, t| {
                let (v, factor) = split.map(piece, x, t[0]);
                Ok(weighted(f.eval(v), factor))
            })?;
            return Ok(QuadResult { value: res.value * scale, nodes: res.nodes, last_delta: res.last_delta * scale });
        }
        let mode = self.mode;
        let extra = self.extra;
        let res = integrate(&self.fam, |t| {
            let (v, factor) = mode.map(base, t);
            let mut val = weighted(f.eval(v + offset), factor);
            if let Extra::Hyper { a, b, c, absorb } = extra {
                if val != 0.0 {
                    val *= gauss_2f1(a, b, c, 1.0 - t)? * pow_or_one(t, -absorb);
                }
            }
            Ok(val)
        })?;
        Ok(QuadResult { value: res.value * scale, nodes: res.nodes, last_delta: res.last_delta * scale.abs() })
    }
}

fn expect_kind(spec: &ScalarOpSpec, kinds: &[ScalarOpKind]) -> Result<()> {
    if kinds.contains(&spec.kind) {
        Ok(())
    } else {
        Err(Error::InvalidArgument("operator spec has the wrong kind for this function"))
    }
}

/// `u^(−ζ−α) Γ(α)⁻¹ ∫₀ᵘ (u−v)^(α−1) v^ζ f(v) dv`.
pub fn kober_first(spec: &ScalarOpSpec, f: &Func1D, u: f64, q: &QuadConfig) -> Result<QuadResult> {
    expect_kind(spec, &[ScalarOpKind::Kober1])?;
    ScalarOperator::new(*spec, *f, q)?.eval(u)
}

/// `u^ζ Γ(α)⁻¹ ∫ᵤ^∞ v^(−ζ−α) (v−u)^(α−1) f(v) dv`.
pub fn kober_second(spec: &ScalarOpSpec, f: &Func1D, u: f64, q: &QuadConfig) -> Result<QuadResult> {
    expect_kind(spec, &[ScalarOpKind::Kober2])?;
    ScalarOperator::new(*spec, *f, q)?.eval(u)
}

/// `Γ(α)⁻¹ ∫ₐˣ (x−v)^(α−1) f(v) dv`; `a = −∞` gives [`weyl_left`].
pub fn riemann_liouville(spec: &ScalarOpSpec, f: &Func1D, x: f64, q: &QuadConfig) -> Result<QuadResult> {
    expect_kind(spec, &[ScalarOpKind::RiemannLiouville])?;
    ScalarOperator::new(*spec, *f, q)?.eval(x)
}

/// `Γ(α)⁻¹ ∫ₓ^∞ (v−x)^(α−1) f(v) dv`.
pub fn weyl_right(spec: &ScalarOpSpec, f: &Func1D, x: f64, q: &QuadConfig) -> Result<QuadResult> {
    expect_kind(spec, &[ScalarOpKind::WeylRight])?;
    ScalarOperator::new(*spec, *f, q)?.eval(x)
}

/// `Γ(α)⁻¹ ∫_{−∞}^x (x−v)^(α−1) f(v) dv`.
pub fn weyl_left(spec: &ScalarOpSpec, f: &Func1D, x: f64, q: &QuadConfig) -> Result<QuadResult> {
    expect_kind(spec, &[ScalarOpKind::WeylLeft])?;
    ScalarOperator::new(*spec, *f, q)?.eval(x)
}

/// `u^(−ζ−α) Γ(α)⁻¹ ∫₀ᵘ (u−v)^(α−1) v^ζ ₂F₁(α+β, −γ; α; 1−v/u) f(v) dv`.
pub fn saigo_first(spec: &ScalarOpSpec, f: &Func1D, u: f64, q: &QuadConfig) -> Result<QuadResult> {
    expect_kind(spec, &[ScalarOpKind::Saigo1])?;
    ScalarOperator::new(*spec, *f, q)?.eval(u)
}

fn binomial(m: u32, i: u32) -> f64 {
    (0..i).fold(1.0, |acc, j| acc * (m - j) as f64 / (j + 1) as f64)
}

/// Mixed central difference `∂^m g` at `x` with steps `h`, Richardson
/// extrapolated over `h` and `h/2`.
fn central_difference<G>(mut g: G, orders: &[u32], x: &[f64], h: &[f64]) -> Result<f64>
where
    G: FnMut(&[f64]) -> Result<f64>,
{
    let k = orders.len();
    let mut stencil = |scale: f64| -> Result<f64> {
        let mut idx = vec![0u32; k];
        let mut point = vec![0.0; k];
        let mut sum = 0.0;
        'outer: loop {
            let mut coef = 1.0;
            for j in 0..k {
                let (m, i) = (orders[j], idx[j]);
                let hj = h[j] * scale;
                point[j] = x[j] + (m as f64 / 2.0 - i as f64) * hj;
                coef *= binomial(m, i) * if i % 2 == 0 { 1.0 } else { -1.0 } / hj.powi(m as i32);
            }
            sum += coef * g(&point)?;
            for j in (0..k).rev() {
                idx[j] += 1;
                if idx[j] <= orders[j] {
                    continue 'outer;
                }
                idx[j] = 0;
            }
            break;
        }
        Ok(sum)
    };
    let coarse = stencil(1.0)?;
    let fine = stencil(0.5)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

fn derivative_step(m: u32, x: f64, q: &QuadConfig) -> f64 {
    let h = q.rel_tol.powf(1.0 / (m as f64 + 2.0)) * (1.0 + x.abs());
    // keep the stencil inside (0, ∞)
    h.min(x / m as f64)
}

fn order_m(alpha: f64) -> Result<u32> {
    check_alpha(alpha)?;
    Ok(alpha.floor() as u32 + 1)
}

/// Riemann–Liouville derivative `D^α f(x) = (d/dx)^m I^(m−α) f(x)` with lower
/// limit zero and `m = ⌊α⌋ + 1`.
///
/// Power and exponential families are differentiated analytically; other
/// functions by central differences of the quadrature, which needs declared
/// smoothness of order at least `m`.
pub fn frac_derivative(alpha: f64, f: &Func1D, x: f64, q: &QuadConfig) -> Result<f64> {
    let m = order_m(alpha)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain { param: "x", value: x, bound: 0.0, rule: "x > 0 for the fractional derivative" });
    }
    match *f {
        Func1D::Power { lambda } => {
            if !(lambda > -1.0) {
                return Err(Error::Domain { param: "lambda", value: lambda, bound: -1.0, rule: "λ > −1 for D^α v^λ" });
            }
            Ok(gamma_signed(lambda + 1.0)? * rgamma(lambda + 1.0 - alpha) * x.powf(lambda - alpha))
        }
        Func1D::Exp { rate } => {
            // Σ_{j<m} f⁽ʲ⁾(0) x^(j−α)/Γ(j+1−α) + I^(m−α) f⁽ᵐ⁾
            let mut s = 0.0;
            for j in 0..m {
                s += (-rate).powi(j as i32) * x.powf(j as f64 - alpha) * rgamma(j as f64 + 1.0 - alpha);
            }
            let rest = ScalarOperator::new(ScalarOpSpec::riemann_liouville(m as f64 - alpha, 0.0), *f, q)?.eval(x)?;
            Ok(s + (-rate).powi(m as i32) * rest.value)
        }
        _ => {
            if f.smoothness() < m {
                return Err(Error::NonDifferentiable { order: m });
            }
            let op = ScalarOperator::new(ScalarOpSpec::riemann_liouville(m as f64 - alpha, 0.0), *f, q)?;
            let h = derivative_step(m, x, q);
            central_difference(|p| Ok(op.eval(p[0])?.value), &[m], &[x], &[h])
        }
    }
}

/// First or second kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpKind {
    First,
    Second,
}

/// Declared regularity of one argument of a multivariable function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarDecl {
    pub zero_exponent: f64,
    pub tail: Tail,
}

/// A user function of `k` variables.
#[derive(Clone, Copy)]
pub struct CallbackKD<'a> {
    pub f: &'a dyn Fn(&[f64]) -> f64,
    pub decls: &'a [VarDecl],
    /// Declared total order of continuous mixed partials.
    pub smoothness: u32,
}

impl fmt::Debug for CallbackKD<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CallbackKD").field("decls", &self.decls).field("smoothness", &self.smoothness).finish_non_exhaustive()
    }
}

/// Integrand families of the multivariable operators.
#[derive(Clone, Debug)]
pub enum FuncKD<'a> {
    /// `∏ⱼ fⱼ(vⱼ)`
    Separable(Vec<Func1D<'a>>),
    /// `(v₁+…+v_k)^c e^(−(v₁+…+v_k))`, `c ≥ 0`.
    SumPowerExp { c: f64, k: usize },
    Callback(CallbackKD<'a>),
}

impl FuncKD<'_> {
    pub fn arity(&self) -> usize {
        match self {
            FuncKD::Separable(fs) => fs.len(),
            FuncKD::SumPowerExp { k, .. } => *k,
            FuncKD::Callback(c) => c.decls.len(),
        }
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        match self {
            FuncKD::Separable(fs) => fs.iter().zip(v).map(|(f, &x)| f.eval(x)).product(),
            FuncKD::SumPowerExp { c, .. } => {
                let s: f64 = v.iter().sum();
                s.powf(*c) * (-s).exp()
            }
            FuncKD::Callback(cb) => (cb.f)(v),
        }
    }

    pub(crate) fn decl(&self, j: usize) -> VarDecl {
        match self {
            FuncKD::Separable(fs) => VarDecl { zero_exponent: fs[j].zero_exponent(), tail: fs[j].tail() },
            FuncKD::SumPowerExp { .. } => VarDecl { zero_exponent: 0.0, tail: Tail::Exponential },
            FuncKD::Callback(cb) => cb.decls[j],
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            FuncKD::SumPowerExp { c, k } => {
                if *k == 0 {
                    return Err(Error::InvalidArgument("function arity must be positive"));
                }
                if !(*c >= 0.0) {
                    return Err(Error::Domain { param: "c", value: *c, bound: 0.0, rule: "c ≥ 0 for (Σv)^c e^(−Σv)" });
                }
                Ok(())
            }
            _ if self.arity() == 0 => Err(Error::InvalidArgument("function arity must be positive")),
            _ => Ok(()),
        }
    }
}

/// A product-kernel multivariable operator with prepared rules.
#[derive(Debug)]
pub struct MultivarOperator<'a> {
    kind: OpKind,
    f: FuncKD<'a>,
    plans: Vec<(JacobiFamily, VarMode)>,
    split: Vec<Option<Split>>,
    scale: f64,
}

impl<'a> MultivarOperator<'a> {
    /// `params[j] = (ζⱼ, αⱼ)`.
    pub fn new(kind: OpKind, params: &[(f64, f64)], f: FuncKD<'a>, q: &QuadConfig) -> Result<Self> {
        f.validate()?;
        if params.len() != f.arity() {
            return Err(Error::DimensionMismatch { expected: f.arity(), found: params.len() });
        }
        if params.len() > 3 {
            return Err(Error::OutOfRange { what: "number of variables (k ≤ 3)" });
        }
        let mut plans = Vec::with_capacity(params.len());
        let mut split = Vec::with_capacity(params.len());
        let mut scale = 1.0;
        for (j, &(zeta, alpha)) in params.iter().enumerate() {
            let d = f.decl(j);
            let plan = match kind {
                OpKind::First => plan_first(zeta, alpha, d.zero_exponent, q),
                OpKind::Second => plan_second(zeta, alpha, d.tail, q),
            }
            .map_err(|e| e.at_variable(j + 1))?;
            plans.push(plan);
            split.push(match kind {
                OpKind::First => Split::first(zeta, alpha, d.zero_exponent, d.tail, q)?,
                OpKind::Second => Split::second(zeta, alpha, d.tail, q)?,
            });
            scale *= rgamma(alpha);
        }
        Ok(MultivarOperator { kind, f, plans, split, scale })
    }

    pub fn kind(&self) -> OpKind {
        self.kind
    }

    pub fn eval(&self, u: &[f64]) -> Result<QuadResult> {
        if u.len() != self.plans.len() {
            return Err(Error::DimensionMismatch { expected: self.plans.len(), found: u.len() });
        }
        for (j, &x) in u.iter().enumerate() {
            if !(x > 0.0) || !x.is_finite() {
                return Err(Error::Domain { param: "u", value: x, bound: 0.0, rule: "u > 0" }.at_variable(j + 1));
            }
        }
        // per coordinate: None for the plain rule, Some for the split pieces
        let far: Vec<Option<&Split>> = self.split.iter().zip(u).map(|(s, &x)| s.as_ref().filter(|s| s.applies(x))).collect();
        let k = u.len();
        let n_parts = far.iter().map(|f| if f.is_some() { 2 } else { 1 }).product::<usize>();
        // digit j of a part index selects the piece of coordinate j
        let piece = |part: usize, j: usize| (part >> j) & 1;
        let parts: Vec<Vec<&JacobiFamily>> = (0..n_parts)
            .map(|part| {
                let mut bits = 0;
                (0..k)
                    .map(|j| match far[j] {
                        Some(ff) => {
                            let fam = ff.family(piece(part, bits));
                            bits += 1;
                            fam
                        }
                        None => &self.plans[j].0,
                    })
                    .collect()
            })
            .collect();
        let mut v = vec![0.0; k];
        let res = integrate_tensor_sum(&parts, |part, t| {
            let mut factor = 1.0;
            let mut bits = 0;
            for j in 0..k {
                let (vj, fj) = match far[j] {
                    Some(ff) => {
                        let r = ff.map(piece(part, bits), u[j], t[j]);
                        bits += 1;
                        r
                    }
                    None => self.plans[j].1.map(u[j], t[j]),
                };
                v[j] = vj;
                factor *= fj;
            }
            Ok(weighted(self.f.eval(&v), factor))
        })?;
        Ok(QuadResult { value: res.value * self.scale, nodes: res.nodes, last_delta: res.last_delta * self.scale })
    }
}

/// First-kind (`∏ u^(−ζ−α)Γ(α)⁻¹ ∫₀ᵘ (u−v)^(α−1) v^ζ`) or second-kind
/// (`∏ u^ζ Γ(α)⁻¹ ∫ᵤ^∞ v^(−ζ−α) (v−u)^(α−1)`) product kernel applied to `f`.
pub fn multivar_op(kind: OpKind, params: &[(f64, f64)], f: &FuncKD, u: &[f64], q: &QuadConfig) -> Result<QuadResult> {
    MultivarOperator::new(kind, params, f.clone(), q)?.eval(u)
}

/// `∏ⱼ xⱼ^βⱼ Γ(βⱼ)⁻¹ ∫_{(0,1)^k} ∏ (1−tⱼ)^(βⱼ−1) f(x∘t) dt`.
struct MultivarRl<'a> {
    f: &'a FuncKD<'a>,
    plans: Vec<(JacobiFamily, VarMode)>,
    orders: Vec<f64>,
}

impl<'a> MultivarRl<'a> {
    fn new(orders: &[f64], f: &'a FuncKD<'a>, q: &QuadConfig) -> Result<Self> {
        let plans = orders
            .iter()
            .enumerate()
            .map(|(j, &b)| plan_first(0.0, b, f.decl(j).zero_exponent, q).map_err(|e| e.at_variable(j + 1)))
            .collect::<Result<Vec<_>>>()?;
        Ok(MultivarRl { f, plans, orders: orders.to_vec() })
    }

    fn eval(&self, x: &[f64]) -> Result<f64> {
        let fams: Vec<&JacobiFamily> = self.plans.iter().map(|p| &p.0).collect();
        let mut v = vec![0.0; x.len()];
        let res = integrate_tensor(&fams, |t| {
            let mut factor = 1.0;
            for (j, (_, mode)) in self.plans.iter().enumerate() {
                let (vj, fj) = mode.map(x[j], t[j]);
                v[j] = vj;
                factor *= fj;
            }
            Ok(weighted(self.f.eval(&v), factor))
        })?;
        let scale: f64 = self.orders.iter().zip(x).map(|(&b, &xj)| xj.powf(b) * rgamma(b)).product();
        Ok(res.value * scale)
    }
}

/// Mixed Riemann–Liouville derivative `∏ⱼ (∂/∂xⱼ)^mⱼ` of the product
/// integral of orders `mⱼ − αⱼ`, for `k ≤ 2`. Separable functions are
/// differentiated factor by factor.
pub fn multivar_frac_derivative(alphas: &[f64], f: &FuncKD, x: &[f64], q: &QuadConfig) -> Result<f64> {
    f.validate()?;
    let k = alphas.len();
    if k == 0 || k > 2 {
        return Err(Error::OutOfRange { what: "number of variables (1 ≤ k ≤ 2)" });
    }
    if f.arity() != k || x.len() != k {
        return Err(Error::DimensionMismatch { expected: k, found: if f.arity() != k { f.arity() } else { x.len() } });
    }
    if let FuncKD::Separable(fs) = f {
        let mut prod = 1.0;
        for (j, fj) in fs.iter().enumerate() {
            prod *= frac_derivative(alphas[j], fj, x[j], q).map_err(|e| e.at_variable(j + 1))?;
        }
        return Ok(prod);
    }
    let mut orders = Vec::with_capacity(k);
    for (j, (&a, &xj)) in alphas.iter().zip(x).enumerate() {
        orders.push(order_m(a).map_err(|e| e.at_variable(j + 1))?);
        if !(xj > 0.0) || !xj.is_finite() {
            return Err(Error::Domain { param: "x", value: xj, bound: 0.0, rule: "x > 0" }.at_variable(j + 1));
        }
    }
    let total: u32 = orders.iter().sum();
    if let FuncKD::Callback(cb) = f {
        if cb.smoothness < total {
            return Err(Error::NonDifferentiable { order: total });
        }
    }
    let betas: Vec<f64> = orders.iter().zip(alphas).map(|(&m, &a)| m as f64 - a).collect();
    let rl = MultivarRl::new(&betas, f, q)?;
    let h: Vec<f64> = orders.iter().zip(x).map(|(&m, &xj)| derivative_step(m, xj, q)).collect();
    central_difference(|p| rl.eval(p), &orders, x, &h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn lg(x: f64) -> f64 {
        libm::lgamma(x)
    }

    fn q() -> QuadConfig {
        QuadConfig::default()
    }

    // mpmath references
    const KOBER1_ZETA1_A05_V2: f64 = 0.515_830_476_386_520_03;
    const KOBER2_ZETA1_L1_A05_U2: f64 = 0.376_126_389_031_837_52;
    const RL_L1_A05_X1: f64 = 0.752_252_778_063_675_05;
    const TWO_OVER_SQRT_PI: f64 = 1.128_379_167_095_512_6;

    #[test]
    fn kober1_examples() {
        let s = ScalarOpSpec::kober1(0.0, 1.0);
        for u in [0.3, 1.0, 7.0] {
            assert_relative_eq!(kober_first(&s, &Func1D::Power { lambda: 0.0 }, u, &q()).unwrap().value, 1.0, max_relative = 1e-14);
        }
        let s = ScalarOpSpec::kober1(1.0, 0.5);
        let got = kober_first(&s, &Func1D::Power { lambda: 2.0 }, 1.0, &q()).unwrap();
        assert_relative_eq!(got.value, KOBER1_ZETA1_A05_V2, max_relative = 1e-12);
    }

    #[test]
    fn kober2_examples() {
        let s = ScalarOpSpec::kober2(1.0, 0.5);
        let got = kober_second(&s, &Func1D::Power { lambda: -1.0 }, 2.0, &q()).unwrap();
        assert_relative_eq!(got.value, KOBER2_ZETA1_L1_A05_U2, max_relative = 1e-12);
        let s = ScalarOpSpec::kober2(0.0, 1.0);
        let got = kober_second(&s, &Func1D::Power { lambda: -2.0 }, 1.0, &q()).unwrap();
        assert_relative_eq!(got.value, 0.5, max_relative = 1e-12);
        // constant f with ζ = 0 diverges
        assert!(matches!(
            kober_second(&s, &Func1D::Power { lambda: 0.0 }, 1.0, &q()),
            Err(Error::TailDivergence(_))
        ));
        let cb = |v: f64| 1.0 / (1.0 + v * v);
        let undeclared = Func1D::Callback(Callback1D::new(&cb));
        assert!(matches!(kober_second(&s, &undeclared, 1.0, &q()), Err(Error::TailDivergence(_))));
    }

    #[test]
    fn riemann_liouville_examples() {
        let s = ScalarOpSpec::riemann_liouville(0.5, 0.0);
        let got = riemann_liouville(&s, &Func1D::Power { lambda: 1.0 }, 1.0, &q()).unwrap();
        assert_relative_eq!(got.value, RL_L1_A05_X1, max_relative = 1e-12);
        let s = ScalarOpSpec::riemann_liouville(1.0, -0.7);
        let got = riemann_liouville(&s, &Func1D::Exp { rate: 0.0 }, 2.0, &q()).unwrap();
        assert_relative_eq!(got.value, 2.7, max_relative = 1e-13);
        assert!(riemann_liouville(&s, &Func1D::Exp { rate: 0.0 }, -1.0, &q()).is_err());
    }

    #[test]
    fn riemann_liouville_semigroup() {
        // I^0.5 I^0.5 v² = I¹ v² = x³/3
        let half = ScalarOpSpec::riemann_liouville(0.5, 0.0);
        let inner = ScalarOperator::new(half, Func1D::Power { lambda: 2.0 }, &q()).unwrap();
        let g = |v: f64| inner.eval(v).unwrap().value;
        let cb = Func1D::Callback(Callback1D::new(&g).zero_exponent(2.5));
        let got = riemann_liouville(&half, &cb, 1.0, &q()).unwrap().value;
        assert!((got - 1.0 / 3.0).abs() < 1e-7, "{got}");
    }

    #[test]
    fn weyl_examples() {
        for alpha in [0.3, 1.0, 2.5] {
            for x in [0.0, 1.0, 5.0] {
                let got = weyl_right(&ScalarOpSpec::weyl_right(alpha), &Func1D::Exp { rate: 1.0 }, x, &q()).unwrap();
                assert_relative_eq!(got.value, (-x).exp(), max_relative = 1e-9);
            }
        }
        let got = weyl_right(&ScalarOpSpec::weyl_right(1.0), &Func1D::Power { lambda: -3.0 }, 2.0, &q()).unwrap();
        assert_relative_eq!(got.value, 0.125, max_relative = 1e-12);
        // W^α v^(−3) = Γ(3−α)/Γ(3) x^(α−3)
        let got = weyl_right(&ScalarOpSpec::weyl_right(0.4), &Func1D::Power { lambda: -3.0 }, 1.5, &q()).unwrap();
        let want = (lg(2.6) - lg(3.0)).exp() * 1.5f64.powf(-2.6);
        assert_relative_eq!(got.value, want, max_relative = 1e-10);
        assert!(weyl_right(&ScalarOpSpec::weyl_right(3.5), &Func1D::Power { lambda: -3.0 }, 2.0, &q()).is_err());
        // left: e^v from −∞ to x gives e^x
        let got = weyl_left(&ScalarOpSpec::weyl_left(0.6), &Func1D::Exp { rate: -1.0 }, 0.4, &q()).unwrap();
        assert_relative_eq!(got.value, 0.4f64.exp(), max_relative = 1e-9);
        let rl = ScalarOpSpec::riemann_liouville(0.6, f64::NEG_INFINITY);
        let got2 = riemann_liouville(&rl, &Func1D::Exp { rate: -1.0 }, 0.4, &q()).unwrap();
        assert_eq!(got.value, got2.value);
    }

    #[test]
    fn saigo_reductions() {
        let f = Func1D::Power { lambda: 1.3 };
        let k = kober_first(&ScalarOpSpec::kober1(0.7, 0.8), &f, 1.9, &q()).unwrap().value;
        let s = saigo_first(&ScalarOpSpec::saigo1(0.8, -0.8, 0.4, 0.7), &f, 1.9, &q()).unwrap().value;
        assert_relative_eq!(s, k, max_relative = 1e-9);
        let s = saigo_first(&ScalarOpSpec::saigo1(0.8, 0.3, 0.0, 0.7), &f, 1.9, &q()).unwrap().value;
        assert_relative_eq!(s, k, max_relative = 1e-9);
    }

    #[test]
    fn saigo_reference() {
        // independent tanh-sinh quadrature of the defining integral (mpmath)
        let cases = [
            (0.5, 0.0, 0.7, 0.675_978_240_067_284_73),
            (0.5, 1.0, 0.7, 0.397_475_205_159_563_4),
            (0.5, 2.5, 1.3, 0.902_359_435_454_619_5),
            (1.0, 1.0, 1.3, 0.686_835_295_525_934_05),
            (1.0, 2.5, 0.7, 0.182_382_296_357_184_33),
        ];
        for (zeta, lambda, u, want) in cases {
            let s = ScalarOpSpec::saigo1(0.5, 0.25, 0.5, zeta);
            let got = saigo_first(&s, &Func1D::Power { lambda }, u, &q()).unwrap().value;
            assert_relative_eq!(got, want, max_relative = 1e-7);
        }
    }

    #[test]
    fn saigo_singular_kernel_rejected() {
        // c − a − b = γ − β = −1.5 makes the kernel non-integrable against t^0.2
        let s = ScalarOpSpec::saigo1(0.5, 2.0, 0.5, 0.2);
        assert_eq!(saigo_first(&s, &Func1D::Power { lambda: 0.0 }, 1.0, &q()), Err(Error::HypergeometricNonConvergent));
    }

    #[test]
    fn frac_derivative_examples() {
        let got = frac_derivative(0.5, &Func1D::Power { lambda: 1.0 }, 1.0, &q()).unwrap();
        assert_relative_eq!(got, TWO_OVER_SQRT_PI, max_relative = 1e-13);
        let sq = |v: f64| v * v;
        let f = Func1D::Callback(Callback1D::new(&sq).smoothness(4));
        assert_relative_eq!(frac_derivative(1.0, &f, 3.0, &q()).unwrap(), 6.0, max_relative = 1e-6);
        let rough = Func1D::Callback(Callback1D::new(&sq).smoothness(1));
        assert_eq!(frac_derivative(1.0, &rough, 3.0, &q()), Err(Error::NonDifferentiable { order: 2 }));
    }

    #[test]
    fn frac_derivative_semigroup() {
        let g = |v: f64| frac_derivative(0.5, &Func1D::Power { lambda: 1.0 }, v, &q()).unwrap();
        let cb = Func1D::Callback(Callback1D::new(&g).zero_exponent(0.5).smoothness(8));
        let got = frac_derivative(0.5, &cb, 1.0, &q()).unwrap();
        assert!((got - 1.0).abs() < 1e-5, "{got}");
    }

    #[test]
    fn frac_derivative_exp_family() {
        // D^α e^(−v) against the callback route
        let e = |v: f64| (-v).exp();
        let cb = Func1D::Callback(Callback1D::new(&e).smoothness(8));
        for alpha in [0.3, 1.5] {
            let a = frac_derivative(alpha, &Func1D::Exp { rate: 1.0 }, 0.8, &q()).unwrap();
            let b = frac_derivative(alpha, &cb, 0.8, &q()).unwrap();
            assert!((a - b).abs() < 1e-6 * a.abs().max(1.0), "α={alpha}: {a} vs {b}");
        }
    }

    #[test]
    fn multivar_examples() {
        let f1 = FuncKD::Separable(vec![Func1D::Power { lambda: 1.5 }]);
        let one = multivar_op(OpKind::First, &[(0.5, 0.7)], &f1, &[1.3], &q()).unwrap().value;
        let d = kober_first(&ScalarOpSpec::kober1(0.5, 0.7), &Func1D::Power { lambda: 1.5 }, 1.3, &q()).unwrap().value;
        assert_eq!(one, d);

        let f = FuncKD::Separable(vec![Func1D::Power { lambda: 2.0 }, Func1D::Power { lambda: 0.5 }]);
        let got = multivar_op(OpKind::First, &[(1.0, 0.5), (0.0, 1.5)], &f, &[1.2, 0.8], &q()).unwrap().value;
        let cf = |z: f64, a: f64, l: f64, u: f64| u.powf(l) * (lg(z + l + 1.0) - lg(z + l + 1.0 + a)).exp();
        let want = cf(1.0, 0.5, 2.0, 1.2) * cf(0.0, 1.5, 0.5, 0.8);
        assert_relative_eq!(got, want, max_relative = 1e-8);

        let f = FuncKD::Separable(vec![Func1D::Power { lambda: -2.0 }, Func1D::Power { lambda: -1.5 }]);
        let got = multivar_op(OpKind::Second, &[(1.0, 0.5), (0.5, 1.5)], &f, &[1.2, 0.8], &q()).unwrap().value;
        let cf2 = |z: f64, a: f64, l: f64, u: f64| u.powf(-l) * (lg(z + l) - lg(z + l + a)).exp();
        let want = cf2(1.0, 0.5, 2.0, 1.2) * cf2(0.5, 1.5, 1.5, 0.8);
        assert_relative_eq!(got, want, max_relative = 1e-8);

        let ones = FuncKD::Separable(vec![Func1D::Power { lambda: 0.0 }; 2]);
        let got = multivar_op(OpKind::First, &[(0.0, 1.0), (0.0, 1.0)], &ones, &[0.4, 3.0], &q()).unwrap().value;
        assert_relative_eq!(got, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn multivar_errors_name_variable() {
        let f = FuncKD::Separable(vec![Func1D::Power { lambda: 0.0 }, Func1D::Power { lambda: 0.0 }]);
        let err = multivar_op(OpKind::First, &[(0.0, 1.0), (0.0, -1.0)], &f, &[1.0, 1.0], &q()).unwrap_err();
        assert!(matches!(err, Error::Variable { index: 2, .. }));
    }

    #[test]
    fn multivar_derivative() {
        let sep = FuncKD::Separable(vec![Func1D::Power { lambda: 1.0 }, Func1D::Power { lambda: 2.5 }]);
        let closed = |a: f64, l: f64, x: f64| (lg(l + 1.0) - lg(l + 1.0 - a)).exp() * x.powf(l - a);
        let want = closed(0.5, 1.0, 1.1) * closed(1.5, 2.5, 0.9);
        let got = multivar_frac_derivative(&[0.5, 1.5], &sep, &[1.1, 0.9], &q()).unwrap();
        assert_relative_eq!(got, want, max_relative = 1e-12);
        let g = |v: &[f64]| v[0] * v[1].powf(2.5);
        let decls = [VarDecl { zero_exponent: 1.0, tail: Tail::Unknown }, VarDecl { zero_exponent: 2.5, tail: Tail::Unknown }];
        let cb = FuncKD::Callback(CallbackKD { f: &g, decls: &decls, smoothness: 6 });
        let fd = multivar_frac_derivative(&[0.5, 1.5], &cb, &[1.1, 0.9], &q()).unwrap();
        assert!((fd / want - 1.0).abs() < 1e-4, "{fd} vs {want}");
        // integer orders: ∂²(x₁² x₂³)/∂x₁∂x₂ = 6 x₁ x₂²
        let h = |v: &[f64]| v[0] * v[0] * v[1].powi(3);
        let decls = [VarDecl { zero_exponent: 0.0, tail: Tail::Unknown }; 2];
        let cb = FuncKD::Callback(CallbackKD { f: &h, decls: &decls, smoothness: 6 });
        let got = multivar_frac_derivative(&[1.0, 1.0], &cb, &[0.7, 1.2], &q()).unwrap();
        assert_relative_eq!(got, 6.0 * 0.7 * 1.44, max_relative = 1e-5);
    }

    #[test]
    fn ratio_density_histogram() {
        use crate::rng::RngStream;
        use rand_distr::{Beta, Distribution, Gamma};
        // u = x₂/x₁, x₁ ~ Beta(ζ, α), x₂ ~ Gamma(2): density Γ(ζ+α)/Γ(ζ)·K₁f
        let (zeta, alpha) = (1.5, 0.8);
        let f = Func1D::PowerExp { lambda: 1.0, rate: 1.0 };
        let op = ScalarOperator::new(ScalarOpSpec::kober1(zeta, alpha), f, &q()).unwrap();
        let c = (lg(zeta + alpha) - lg(zeta)).exp();
        let mut rng = RngStream::new(11, 0).rng();
        let b = Beta::new(zeta, alpha).unwrap();
        let g = Gamma::new(2.0, 1.0).unwrap();
        let n = 400_000usize;
        let (lo, hi, bins) = (0.0, 8.0, 20usize);
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0usize; bins];
        for _ in 0..n {
            let u = g.sample(&mut rng) / b.sample(&mut rng);
            if u < hi {
                counts[(u / width) as usize] += 1;
            }
        }
        for (i, &cnt) in counts.iter().enumerate() {
            let p = cnt as f64 / n as f64;
            let est = p / width;
            let se = (p * (1.0 - p) / n as f64).sqrt() / width;
            // bin average of the density by quadrature over the bin
            let a = lo + i as f64 * width;
            let mut avg = 0.0;
            let r = crate::quad::gauss_jacobi(16, 0.0, 0.0).unwrap();
            for (&t, &w) in r.nodes.iter().zip(&r.weights) {
                avg += w * c * op.eval(a + t * width).unwrap().value;
            }
            assert!((est - avg).abs() < 3.0 * se.max(1e-12) + 1e-9, "bin {i}: {est} vs {avg} (se {se})");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn kober1_homogeneity(zeta in 0.0f64..2.0, alpha in 0.2f64..2.5, lambda in 0.0f64..3.0) {
            let s = ScalarOpSpec::kober1(zeta, alpha);
            let f = Func1D::Power { lambda };
            let vals: Vec<f64> = [0.5, 1.0, 2.0].iter()
                .map(|&u| kober_first(&s, &f, u, &q()).unwrap().value / u.powf(lambda)).collect();
            prop_assert!((vals[0] / vals[1] - 1.0).abs() < 1e-8);
            prop_assert!((vals[2] / vals[1] - 1.0).abs() < 1e-8);
        }

        #[test]
        fn kober2_homogeneity(zeta in 0.1f64..2.0, alpha in 0.2f64..2.5, lambda in 0.5f64..3.0) {
            let s = ScalarOpSpec::kober2(zeta, alpha);
            let f = Func1D::Power { lambda: -lambda };
            let vals: Vec<f64> = [0.5, 1.0, 2.0].iter()
                .map(|&u| kober_second(&s, &f, u, &q()).unwrap().value * u.powf(lambda)).collect();
            prop_assert!((vals[0] / vals[1] - 1.0).abs() < 1e-8);
            prop_assert!((vals[2] / vals[1] - 1.0).abs() < 1e-8);
        }
    }
}
