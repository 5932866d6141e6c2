//! Many-matrix Kober operators of the first and second kind, their density
//! constants and the parameter chains of the Dirichlet-type families.
//!
//! Both operators are estimated by exact importance sampling. With
//! `Wⱼ = Uⱼ^(1/2) Vⱼ^(−1) Uⱼ^(1/2)` (second kind) or
//! `Wⱼ = Uⱼ^(−1/2) Vⱼ Uⱼ^(−1/2)` (first kind) each factor becomes a
//! matrix-beta integral over `O < Wⱼ < I`, so the operator is a gamma ratio
//! times an expectation under independent matrix-beta draws.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::{require_gt, Error, Result};
use crate::matgamma::{exp_checked, ln_gamma_p, GammaRatioSpec};
use crate::mc::{estimate, BatchRunner, Estimate, McConfig};
use crate::randmat::{
    inverse_dirichlet_chain, sample_dirichlet_chain, sample_matrix_beta, sample_matrix_gamma, sample_wishart,
    BetaMatParams, DirichletChainParams,
};
pub use crate::scalar_ops::OpKind;
use crate::spd::{SymMat, MAX_DIM};

pub(crate) fn half_p1(p: usize) -> f64 {
    (p as f64 + 1.0) / 2.0
}

pub(crate) fn lower(p: usize) -> f64 {
    (p as f64 - 1.0) / 2.0
}

/// Kind, dimension and `(ζⱼ, αⱼ)` pairs of a many-matrix operator.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixOpParams {
    kind: OpKind,
    p: usize,
    pairs: Vec<(f64, f64)>,
}

impl MatrixOpParams {
    /// All `αⱼ > (p−1)/2`. First kind needs `ζⱼ > (p−1)/2`, second kind
    /// `ζⱼ > −1`.
    pub fn new(kind: OpKind, p: usize, pairs: &[(f64, f64)]) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&p) {
            return Err(Error::OutOfRange { what: "matrix dimension (1 ≤ p ≤ 4)" });
        }
        if pairs.is_empty() {
            return Err(Error::InvalidArgument("at least one (zeta, alpha) pair"));
        }
        let lo = lower(p);
        for (j, &(zeta, alpha)) in pairs.iter().enumerate() {
            let check = || -> Result<()> {
                require_gt("alpha", alpha, lo, "α > (p−1)/2")?;
                match kind {
                    OpKind::First => require_gt("zeta", zeta, lo, "ζ > (p−1)/2 for the first kind"),
                    OpKind::Second => require_gt("zeta", zeta, lo - half_p1(p), "ζ > −1 for the second kind"),
                }
            };
            check().map_err(|e| e.at_variable(j + 1))?;
        }
        Ok(MatrixOpParams { kind, p, pairs: pairs.to_vec() })
    }

    /// Parameters whose `αⱼ` are the chain outputs. For chains with a
    /// terminal `ζ_{k+1}` only the first `k` entries of `zeta` are used.
    pub fn from_chain(kind: OpKind, p: usize, chain: &ChainSpec) -> Result<Self> {
        let alphas = param_chain(chain)?;
        let zeta = chain.zeta();
        let pairs: Vec<_> = alphas.iter().enumerate().map(|(j, &a)| (zeta[j], a)).collect();
        Self::new(kind, p, &pairs)
    }

    pub fn kind(&self) -> OpKind {
        self.kind
    }
    pub fn p(&self) -> usize {
        self.p
    }
    pub fn k(&self) -> usize {
        self.pairs.len()
    }
    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }
    pub fn zetas(&self) -> Vec<f64> {
        self.pairs.iter().map(|q| q.0).collect()
    }
    pub fn alphas(&self) -> Vec<f64> {
        self.pairs.iter().map(|q| q.1).collect()
    }
}

/// Test functions of `k` matrix arguments. The closed families are
/// products of the same factor over the arguments.
#[derive(Clone, Copy)]
pub enum MatrixFn<'a> {
    /// `∏ |Vⱼ|^λ`.
    DetPower { lambda: f64 },
    /// `exp(−Σ tr Vⱼ)`.
    ExpNegTrace,
    /// `∏ |Vⱼ|^(γ−(p+1)/2) e^(−tr Vⱼ)`.
    DetPowerExp { gamma: f64 },
    /// `∏` of the standard Wishart `W_p(df, I)` density.
    Wishart { df: f64 },
    Callback(&'a (dyn Fn(&[SymMat]) -> f64 + Sync)),
}

impl core::fmt::Debug for MatrixFn<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MatrixFn::DetPower { lambda } => write!(f, "DetPower({lambda})"),
            MatrixFn::ExpNegTrace => write!(f, "ExpNegTrace"),
            MatrixFn::DetPowerExp { gamma } => write!(f, "DetPowerExp({gamma})"),
            MatrixFn::Wishart { df } => write!(f, "Wishart({df})"),
            MatrixFn::Callback(_) => write!(f, "Callback"),
        }
    }
}

impl MatrixFn<'_> {
    /// `ln f` of one factor from its determinant and trace.
    fn ln_factor(&self, p: usize, det: f64, tr: f64) -> Result<f64> {
        let ld = det.ln();
        Ok(match *self {
            MatrixFn::DetPower { lambda } => {
                if lambda == 0.0 {
                    0.0
                } else {
                    lambda * ld
                }
            }
            MatrixFn::ExpNegTrace => -tr,
            MatrixFn::DetPowerExp { gamma } => (gamma - half_p1(p)) * ld - tr,
            MatrixFn::Wishart { df } => {
                let pf = p as f64;
                (df - pf - 1.0) / 2.0 * ld - tr / 2.0 - pf * df / 2.0 * core::f64::consts::LN_2 - ln_gamma_p(p, df / 2.0)?
            }
            MatrixFn::Callback(_) => return Err(Error::InvalidArgument("callback has no determinant form")),
        })
    }

    /// Value from per-argument determinants and traces (closed families).
    fn eval_dt(&self, p: usize, dets: &[f64], traces: &[f64]) -> Result<f64> {
        let mut l = 0.0;
        for (&d, &t) in dets.iter().zip(traces) {
            l += self.ln_factor(p, d, t)?;
        }
        Ok(l.exp())
    }

    /// `f(V₁, …, V_k)`.
    pub fn eval(&self, vs: &[SymMat]) -> Result<f64> {
        if let MatrixFn::Callback(f) = self {
            return Ok(f(vs));
        }
        let p = vs.first().ok_or(Error::InvalidArgument("no matrix arguments"))?.dim();
        let dets: Vec<f64> = vs.iter().map(SymMat::det).collect();
        let trs: Vec<f64> = vs.iter().map(SymMat::trace).collect();
        self.eval_dt(p, &dets, &trs)
    }

    /// `∫ f(V) dV` over the SPD cone, `k` arguments.
    pub fn total_mass(&self, p: usize, k: usize) -> Result<f64> {
        let one = match *self {
            MatrixFn::DetPowerExp { gamma } => ln_gamma_p(p, gamma)?,
            MatrixFn::ExpNegTrace => ln_gamma_p(p, half_p1(p))?,
            MatrixFn::Wishart { .. } => 0.0,
            _ => return Err(Error::InvalidArgument("function is not a finite-mass density family")),
        };
        exp_checked(one * k as f64)
    }

    /// Draws `(V₁..V_k)` from the normalized density `f / ∫f`.
    pub fn sample_normalized<R: Rng + ?Sized>(&self, p: usize, k: usize, rng: &mut R) -> Result<Vec<SymMat>> {
        let id = SymMat::identity(p);
        (0..k)
            .map(|_| match *self {
                MatrixFn::DetPowerExp { gamma } => sample_matrix_gamma(gamma, &id, rng),
                MatrixFn::ExpNegTrace => sample_matrix_gamma(half_p1(p), &id, rng),
                MatrixFn::Wishart { df } => sample_wishart(p, df, rng),
                _ => Err(Error::InvalidArgument("function is not a finite-mass density family")),
            })
            .collect()
    }

    /// M-transform `f*(s) = ∫ ∏ |Vⱼ|^(sⱼ−(p+1)/2) f(V) dV`.
    pub fn m_transform(&self, p: usize, s: &[f64]) -> Result<f64> {
        let h = half_p1(p);
        let mut l = 0.0;
        for &sj in s {
            l += match *self {
                MatrixFn::DetPowerExp { gamma } => ln_gamma_p(p, sj + gamma - h)?,
                MatrixFn::ExpNegTrace => ln_gamma_p(p, sj)?,
                MatrixFn::Wishart { df } => {
                    p as f64 * (sj - h) * core::f64::consts::LN_2 + ln_gamma_p(p, df / 2.0 + sj - h)?
                        - ln_gamma_p(p, df / 2.0)?
                }
                _ => return Err(Error::InvalidArgument("no closed-form M-transform for this function")),
            };
        }
        exp_checked(l)
    }
}

/// How the chain parameter sequence is formed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BetaStep {
    /// Step of one per remaining index.
    Unit,
    /// Step of `(p+1)/2` per remaining index, the increment that makes the
    /// chain reproduce a matrix Dirichlet law.
    HalfP1 { p: usize },
}

/// Parameter-chain rules. `j` runs over `1..=k`.
#[derive(Clone, Debug, PartialEq)]
pub enum ChainSpec {
    /// `βⱼ = ζ_{j+1}+…+ζ_k + (k−j)·step + terminal`; `zeta` has `k` entries.
    Beta { zeta: Vec<f64>, step: BetaStep, terminal: f64 },
    /// `γⱼ = ζ_{j+1}+…+ζ_{k+1}`; `zeta` has `k+1` entries.
    Gamma { zeta: Vec<f64> },
    /// `δⱼ = ζ_{j+1}+…+ζ_k + βⱼ+…+β_k`; `zeta` and `beta` have `k` entries.
    Delta { zeta: Vec<f64>, beta: Vec<f64> },
    /// `δⱼ = ζ_{j+1}+…+ζ_{k+1} + βⱼ+…+β_k`; `zeta` has `k+1` entries.
    DeltaFirst { zeta: Vec<f64>, beta: Vec<f64> },
}

impl ChainSpec {
    pub fn zeta(&self) -> &[f64] {
        match self {
            ChainSpec::Beta { zeta, .. }
            | ChainSpec::Gamma { zeta }
            | ChainSpec::Delta { zeta, .. }
            | ChainSpec::DeltaFirst { zeta, .. } => zeta,
        }
    }
}

fn tail_sum(v: &[f64], from: usize) -> f64 {
    v.get(from..).map_or(0.0, |t| t.iter().sum())
}

/// Evaluates a parameter chain, returning `k` values.
pub fn param_chain(spec: &ChainSpec) -> Result<Vec<f64>> {
    match spec {
        ChainSpec::Beta { zeta, step, terminal } => {
            let k = zeta.len();
            if k == 0 {
                return Err(Error::InvalidArgument("empty chain"));
            }
            let c = match *step {
                BetaStep::Unit => 1.0,
                BetaStep::HalfP1 { p } => half_p1(p),
            };
            Ok((0..k).map(|j| tail_sum(zeta, j + 1) + (k - j - 1) as f64 * c + terminal).collect())
        }
        ChainSpec::Gamma { zeta } => {
            if zeta.len() < 2 {
                return Err(Error::InvalidArgument("gamma chain needs k + 1 ≥ 2 zetas"));
            }
            let k = zeta.len() - 1;
            Ok((0..k).map(|j| tail_sum(zeta, j + 1)).collect())
        }
        ChainSpec::Delta { zeta, beta } => {
            if zeta.is_empty() {
                return Err(Error::InvalidArgument("empty chain"));
            }
            if beta.len() != zeta.len() {
                return Err(Error::DimensionMismatch { expected: zeta.len(), found: beta.len() });
            }
            Ok((0..zeta.len()).map(|j| tail_sum(zeta, j + 1) + tail_sum(beta, j)).collect())
        }
        ChainSpec::DeltaFirst { zeta, beta } => {
            if zeta.len() < 2 {
                return Err(Error::InvalidArgument("first-kind delta chain needs k + 1 ≥ 2 zetas"));
            }
            let k = zeta.len() - 1;
            if beta.len() != k {
                return Err(Error::DimensionMismatch { expected: k, found: beta.len() });
            }
            Ok((0..k).map(|j| tail_sum(zeta, j + 1) + tail_sum(beta, j)).collect())
        }
    }
}

/// Shapes of the matrix-beta `Yⱼ` of the density mode.
fn density_betas(params: &MatrixOpParams) -> Result<Vec<BetaMatParams>> {
    let p = params.p;
    params
        .pairs
        .iter()
        .enumerate()
        .map(|(j, &(z, a))| {
            let shape = match params.kind {
                OpKind::Second => z + half_p1(p),
                OpKind::First => z,
            };
            BetaMatParams::new(p, shape, a).map_err(|e| e.at_variable(j + 1))
        })
        .collect()
}

/// `c` with `operator f = c · g`, where `g` is the density of the
/// density-mode draws when `f` is itself a density:
/// second kind `∏ Γ_p(ζⱼ+(p+1)/2)/Γ_p(ζⱼ+(p+1)/2+αⱼ)`,
/// first kind `∏ Γ_p(ζⱼ)/Γ_p(ζⱼ+αⱼ)`.
pub fn density_constant(params: &MatrixOpParams) -> Result<f64> {
    let mut spec = GammaRatioSpec::new(params.p);
    for b in density_betas(params)? {
        spec = spec.num(b.a()).den(b.a() + b.b());
    }
    exp_checked(spec.ln_value()?)
}

/// How the independent `Yⱼ` of the density mode are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum YRoute {
    #[default]
    Independent,
    /// Draw `(X₁..X_k)` from the Dirichlet-type law and recover `Yⱼ`
    /// through the inverse chain map.
    DirichletChain,
}

/// Prepared density-mode sampler.
#[derive(Clone, Debug)]
pub struct DensityMode {
    kind: OpKind,
    p: usize,
    betas: Vec<BetaMatParams>,
    chain: Option<DirichletChainParams>,
}

impl DensityMode {
    pub fn new(params: &MatrixOpParams, route: YRoute) -> Result<Self> {
        let betas = density_betas(params)?;
        let p = params.p;
        let chain = match route {
            YRoute::Independent => None,
            YRoute::DirichletChain => {
                let z: Vec<f64> = betas.iter().map(|b| b.a() - half_p1(p)).collect();
                let second: Vec<f64> = betas.iter().map(BetaMatParams::b).collect();
                Some(DirichletChainParams::new(p, &z, &second)?)
            }
        };
        Ok(DensityMode { kind: params.kind, p, betas, chain })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.betas.len()
    }

    /// The `Yⱼ` of one draw.
    pub fn sample_y<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<SymMat>> {
        match &self.chain {
            None => self.betas.iter().map(|b| sample_matrix_beta(b, rng)).collect(),
            Some(c) => inverse_dirichlet_chain(&sample_dirichlet_chain(c, rng)?),
        }
    }

    /// One draw `(U₁..U_k)` given `(V₁..V_k)`: second kind
    /// `Uⱼ = Vⱼ^(1/2) Yⱼ Vⱼ^(1/2)`, first kind `Uⱼ = Vⱼ^(1/2) Yⱼ^(−1) Vⱼ^(1/2)`.
    pub fn sample_given<R: Rng + ?Sized>(&self, vs: &[SymMat], rng: &mut R) -> Result<Vec<SymMat>> {
        if vs.len() != self.k() {
            return Err(Error::DimensionMismatch { expected: self.k(), found: vs.len() });
        }
        let ys = self.sample_y(rng)?;
        ys.iter()
            .zip(vs)
            .map(|(y, v)| {
                let root = v.sqrt()?;
                match self.kind {
                    OpKind::Second => Ok(y.sandwich(&root)),
                    OpKind::First => Ok(y.inverse()?.sandwich(&root)),
                }
            })
            .collect()
    }
}

/// One density-mode draw with `V` drawn from the normalized `f`.
pub fn density_mode_sample<R: Rng + ?Sized>(
    params: &MatrixOpParams,
    f: &MatrixFn<'_>,
    route: YRoute,
    rng: &mut R,
) -> Result<Vec<SymMat>> {
    let dm = DensityMode::new(params, route)?;
    let vs = f.sample_normalized(params.p, params.k(), rng)?;
    dm.sample_given(&vs, rng)
}

/// Matrix-beta proposal of one coordinate of the estimator.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Proposal {
    pub(crate) beta: BetaMatParams,
    /// proposal shape raised by one; weight `|W|^(−1)`
    pub(crate) shifted: bool,
}

/// Proposals and the log normalizing constant `Σ ln Γ_p(a) − ln Γ_p(a+α)`.
pub(crate) fn proposals(params: &MatrixOpParams) -> Result<(Vec<Proposal>, f64)> {
    let p = params.p;
    let lo = lower(p);
    let mut ln_c = 0.0;
    let mut out = Vec::with_capacity(params.k());
    for (j, &(zeta, alpha)) in params.pairs.iter().enumerate() {
        let wrap = |e: Error| e.at_variable(j + 1);
        let (shape, shifted) = match params.kind {
            OpKind::First => (zeta + half_p1(p), false),
            OpKind::Second if zeta > lo => (zeta, false),
            OpKind::Second if zeta + 1.0 > lo => (zeta + 1.0, true),
            OpKind::Second => return Err(wrap(Error::ProposalDomain { zeta, p })),
        };
        let beta = BetaMatParams::new(p, shape, alpha).map_err(wrap)?;
        ln_c += ln_gamma_p(p, shape)? - ln_gamma_p(p, shape + alpha)?;
        out.push(Proposal { beta, shifted });
    }
    Ok((out, ln_c))
}

struct Factor {
    prop: Proposal,
    root: SymMat,
    u: SymMat,
    det_u: f64,
}

fn prepare(params: &MatrixOpParams, u: &[SymMat]) -> Result<(Vec<Factor>, f64)> {
    let p = params.p;
    if u.len() != params.k() {
        return Err(Error::DimensionMismatch { expected: params.k(), found: u.len() });
    }
    for (j, uj) in u.iter().enumerate() {
        if uj.dim() != p {
            return Err(Error::DimensionMismatch { expected: p, found: uj.dim() }.at_variable(j + 1));
        }
        let chk = uj.spd_check();
        if !chk.is_pd {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: chk.min_eigenvalue }.at_variable(j + 1));
        }
    }
    let (props, ln_c) = proposals(params)?;
    let factors = props
        .into_iter()
        .zip(u)
        .map(|(prop, uj)| Ok(Factor { prop, root: uj.sqrt()?, u: *uj, det_u: uj.det() }))
        .collect::<Result<Vec<_>>>()?;
    Ok((factors, ln_c))
}

fn kober_matrix<B: BatchRunner + ?Sized>(
    params: &MatrixOpParams,
    f: &MatrixFn<'_>,
    u: &[SymMat],
    mc: &McConfig,
    runner: &B,
) -> Result<Estimate> {
    let (factors, ln_c) = prepare(params, u)?;
    let c = exp_checked(ln_c)?;
    let p = params.p;
    let k = factors.len();
    let second = params.kind == OpKind::Second;
    let callback = matches!(f, MatrixFn::Callback(_));
    let est = estimate(mc, runner, |rng| {
        let mut dets = [0.0; 8];
        let mut trs = [0.0; 8];
        let mut vs = Vec::new();
        let mut weight = 1.0;
        for (j, fc) in factors.iter().enumerate() {
            let w = sample_matrix_beta(&fc.prop.beta, rng)?;
            let dw = w.det();
            if fc.prop.shifted {
                weight /= dw;
            }
            if callback {
                let v = if second { w.inverse()?.sandwich(&fc.root) } else { w.sandwich(&fc.root) };
                vs.push(v);
            } else if j < dets.len() {
                // |V| and tr V without forming V
                if second {
                    dets[j] = fc.det_u / dw;
                    trs[j] = w.inverse()?.trace_product(&fc.u);
                } else {
                    dets[j] = fc.det_u * dw;
                    trs[j] = w.trace_product(&fc.u);
                }
            } else {
                return Err(Error::OutOfRange { what: "number of matrix arguments (k ≤ 8)" });
            }
        }
        let fv = if callback { f.eval(&vs)? } else { f.eval_dt(p, &dets[..k], &trs[..k])? };
        Ok(weight * fv)
    })?;
    Ok(est.scaled(c))
}

/// Second-kind operator at `(U₁..U_k)`.
///
/// `E f(U^(1/2) W^(−1) U^(1/2))` over `Wⱼ ~ beta(ζⱼ, αⱼ)` times
/// `∏ Γ_p(ζⱼ)/Γ_p(ζⱼ+αⱼ)`. For `ζⱼ ≤ (p−1)/2` the proposal is
/// `beta(ζⱼ+1, αⱼ)` with weight `|Wⱼ|^(−1)`; below `(p−3)/2` there is no
/// proposal and [`Error::ProposalDomain`] is returned.
pub fn kober_matrix_second<B: BatchRunner + ?Sized>(
    params: &MatrixOpParams,
    f: &MatrixFn<'_>,
    u: &[SymMat],
    mc: &McConfig,
    runner: &B,
) -> Result<Estimate> {
    if params.kind != OpKind::Second {
        return Err(Error::InvalidArgument("parameters are not of the second kind"));
    }
    kober_matrix(params, f, u, mc, runner)
}

/// First-kind operator at `(U₁..U_k)`.
///
/// `E f(U^(1/2) W U^(1/2))` over `Wⱼ ~ beta(ζⱼ+(p+1)/2, αⱼ)` times
/// `∏ Γ_p(ζⱼ+(p+1)/2)/Γ_p(ζⱼ+(p+1)/2+αⱼ)`.
pub fn kober_matrix_first<B: BatchRunner + ?Sized>(
    params: &MatrixOpParams,
    f: &MatrixFn<'_>,
    u: &[SymMat],
    mc: &McConfig,
    runner: &B,
) -> Result<Estimate> {
    if params.kind != OpKind::First {
        return Err(Error::InvalidArgument("parameters are not of the first kind"));
    }
    kober_matrix(params, f, u, mc, runner)
}

/// Exact operator value on `f = ∏ |Vⱼ|^λ`: second kind
/// `∏ |Uⱼ|^λ Γ_p(ζⱼ−λ)/Γ_p(ζⱼ+αⱼ−λ)`, first kind
/// `∏ |Uⱼ|^λ Γ_p(ζⱼ+(p+1)/2+λ)/Γ_p(ζⱼ+(p+1)/2+αⱼ+λ)`.
pub fn det_power_closed_form(params: &MatrixOpParams, lambda: f64, u: &[SymMat]) -> Result<f64> {
    if u.len() != params.k() {
        return Err(Error::DimensionMismatch { expected: params.k(), found: u.len() });
    }
    let p = params.p;
    let mut l = 0.0;
    for (&(zeta, alpha), uj) in params.pairs.iter().zip(u) {
        let a = match params.kind {
            OpKind::Second => zeta - lambda,
            OpKind::First => zeta + half_p1(p) + lambda,
        };
        l += lambda * uj.det().ln() + ln_gamma_p(p, a)? - ln_gamma_p(p, a + alpha)?;
    }
    exp_checked(l)
}

/// `[(ζ, α); k]` helper for uniform parameters.
pub fn uniform_pairs(zeta: f64, alpha: f64, k: usize) -> Vec<(f64, f64)> {
    vec![(zeta, alpha); k]
}
