//! Verification suites run by `kober verify`.

use kober_core::jacobian::{fd_jacobian_det, jac_congruence, jac_dirichlet_chain, jac_inverse, pack_all, unpack_all};
use kober_core::matgamma::gamma_p;
use kober_core::matrix_ops::{
    kober_matrix_first, kober_matrix_second, param_chain, BetaStep, ChainSpec, MatrixFn, MatrixOpParams, OpKind, YRoute,
};
use kober_core::mc::{estimate, estimate_many, BatchRunner, Estimate, McConfig};
use kober_core::mtransform::{
    mtransform_mc, operator_mtransform_mc, verify_transform, LhsMethod, MPoint, TransformTarget, MC_REL_CAP, MC_SE_FACTOR,
    QUAD_REL_TOL,
};
use kober_core::quad::QuadConfig;
use kober_core::randmat::{
    forward_dirichlet_chain, inverse_dirichlet_chain, sample_matrix_beta, sample_matrix_dirichlet, BetaMatParams,
};
use kober_core::rng::{RngStream, StreamRng};
use kober_core::scalar_ops::{
    frac_derivative, kober_first, kober_second, riemann_liouville, saigo_first, weyl_right, Callback1D, Func1D, FuncKD,
    ScalarOpSpec, ScalarOperator, Tail,
};
use kober_core::special::gamma;
use kober_core::spd::{Mat, SymMat};
use kober_core::Error;
use rand::Rng;

use crate::error::{CliError, CliResult};
use crate::report::Case;

pub const SUITES: [&str; 7] = [
    "scalar-closed-forms",
    "jacobians",
    "beta-moments",
    "dirichlet-chain",
    "mtransform-second",
    "mtransform-first",
    "density-identity",
];

/// Settings shared by all suites.
pub struct SuiteCtx<'a> {
    pub seed: u64,
    /// Restricts suites that range over several dimensions.
    pub p: Option<usize>,
    /// Overrides the default Monte Carlo sample size.
    pub n_samples: Option<usize>,
    /// Overrides the transform grids.
    pub s: &'a [Vec<f64>],
    pub runner: &'a dyn BatchRunner,
}

impl SuiteCtx<'_> {
    /// Seed of the case named `tag`, fixed by the run seed.
    fn sub_seed(&self, tag: &str) -> u64 {
        // FNV-1a
        let h = tag.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3));
        self.seed ^ h.rotate_left(17)
    }

    fn rng(&self, tag: &str) -> StreamRng {
        RngStream::new(self.sub_seed(tag), 0).rng()
    }

    fn mc(&self, tag: &str, default_n: usize) -> McConfig {
        McConfig::with_samples(self.n_samples.unwrap_or(default_n), self.sub_seed(tag))
    }

    fn dims(&self, default: &[usize]) -> Vec<usize> {
        self.p.map_or_else(|| default.to_vec(), |p| vec![p])
    }
}

pub fn run_suite(name: &str, ctx: &SuiteCtx<'_>) -> CliResult<Vec<Case>> {
    match name {
        "scalar-closed-forms" => Ok(scalar_closed_forms()),
        "jacobians" => Ok(jacobians(ctx)),
        "beta-moments" => Ok(beta_moments(ctx)),
        "dirichlet-chain" => Ok(dirichlet_chain(ctx)),
        "mtransform-second" => Ok(mtransform(OpKind::Second, ctx)),
        "mtransform-first" => Ok(mtransform(OpKind::First, ctx)),
        "density-identity" => Ok(density_identity(ctx)),
        other => Err(CliError::usage(format!("unknown suite {other:?}; available: {}", SUITES.join(", ")))),
    }
}

fn ratio_gamma(a: f64, b: f64) -> kober_core::Result<f64> {
    Ok(gamma(a)? / gamma(b)?)
}

// ---------------------------------------------------------------- scalar

/// `(α, β, γ, ζ, λ, u, value)` of the Saigo operator on `v^λ`, from
/// adaptive tanh-sinh quadrature at 30 digits (`tests/oracles` in the core
/// crate).
const SAIGO_ORACLE: [(f64, f64, f64, f64, f64, f64, f64); 18] = [
    (0.5, 0.25, 0.5, 0.5, 0.0, 0.7, 0.675_978_240_067_284_73),
    (0.5, 0.25, 0.5, 0.5, 0.0, 1.3, 0.675_978_240_067_284_73),
    (0.5, 0.25, 0.5, 0.5, 1.0, 0.7, 0.397_475_205_159_563_4),
    (0.5, 0.25, 0.5, 0.5, 1.0, 1.3, 0.738_168_238_153_474_9),
    (0.5, 0.25, 0.5, 0.5, 2.5, 0.7, 0.191_984_551_311_709_82),
    (0.5, 0.25, 0.5, 0.5, 2.5, 1.3, 0.902_359_435_454_619_5),
    (0.5, 0.25, 0.5, 1.0, 0.0, 0.7, 0.616_390_649_830_966_4),
    (0.5, 0.25, 0.5, 1.0, 0.0, 1.3, 0.616_390_649_830_966_4),
    (0.5, 0.25, 0.5, 1.0, 1.0, 0.7, 0.369_834_389_898_579_84),
    (0.5, 0.25, 0.5, 1.0, 1.0, 1.3, 0.686_835_295_525_934_05),
    (0.5, 0.25, 0.5, 1.0, 2.5, 0.7, 0.182_382_296_357_184_33),
    (0.5, 0.25, 0.5, 1.0, 2.5, 1.3, 0.857_227_234_448_566_7),
    (1.3, -0.4, 0.8, 0.5, 1.0, 0.9, 0.204_061_862_653_420_76),
    (1.3, -0.4, 0.8, 1.5, 2.0, 1.7, 0.342_228_639_872_078_94),
    (1.3, -0.4, 0.8, 0.2, 0.5, 2.4, 0.523_633_290_892_936_1),
    (0.7, 0.6, 1.2, 0.5, 1.0, 0.9, 0.269_706_276_375_983_97),
    (0.7, 0.6, 1.2, 1.5, 2.0, 1.7, 0.735_702_030_773_820_8),
    (0.7, 0.6, 1.2, 0.2, 0.5, 2.4, 0.464_434_500_661_807_84),
];

const ZETAS: [f64; 3] = [0.0, 0.5, 2.0];
const ALPHAS: [f64; 3] = [0.3, 1.0, 2.5];

fn scalar_closed_forms() -> Vec<Case> {
    let q = QuadConfig::default();
    let mut cases = Vec::new();
    let u: f64 = 1.7;

    for zeta in ZETAS {
        for alpha in ALPHAS {
            for lambda in [0.0, 1.0, 2.5] {
                let spec = ScalarOpSpec::kober1(zeta, alpha);
                let want = ratio_gamma(zeta + lambda + 1.0, zeta + lambda + 1.0 + alpha).map(|g| g * u.powf(lambda));
                let got = kober_first(&spec, &Func1D::Power { lambda }, u, &q).map(|r| r.value);
                let id = format!("kober1/power/zeta={zeta}/alpha={alpha}/lambda={lambda}");
                cases.push(Case::rel_or_error(id, "first-kind operator on v^λ", want.clone(), got, 1e-8));
                if zeta == 0.5 {
                    let pw = move |v: f64| v.powf(lambda);
                    let f = Func1D::Callback(Callback1D::new(&pw).zero_exponent(lambda));
                    let got = kober_first(&spec, &f, u, &q).map(|r| r.value);
                    let id = format!("kober1/callback/zeta={zeta}/alpha={alpha}/lambda={lambda}");
                    cases.push(Case::rel_or_error(id, "first-kind operator on v^λ", want, got, 1e-8));
                }
            }
        }
    }

    for zeta in ZETAS {
        for alpha in ALPHAS {
            for lambda in [1.0, 2.0, 3.5] {
                let spec = ScalarOpSpec::kober2(zeta, alpha);
                let want = ratio_gamma(zeta + lambda, zeta + lambda + alpha).map(|g| g * u.powf(-lambda));
                let got = kober_second(&spec, &Func1D::Power { lambda: -lambda }, u, &q).map(|r| r.value);
                let id = format!("kober2/power/zeta={zeta}/alpha={alpha}/lambda={lambda}");
                cases.push(Case::rel_or_error(id, "second-kind operator on v^(−λ)", want.clone(), got, 1e-8));
                if zeta == 0.5 {
                    let pw = move |v: f64| v.powf(-lambda);
                    let f = Func1D::Callback(Callback1D::new(&pw).zero_exponent(-lambda).tail(Tail::Power(lambda)));
                    let got = kober_second(&spec, &f, u, &q).map(|r| r.value);
                    let id = format!("kober2/callback/zeta={zeta}/alpha={alpha}/lambda={lambda}");
                    cases.push(Case::rel_or_error(id, "second-kind operator on v^(−λ)", want, got, 1e-8));
                }
            }
        }
    }

    let x: f64 = 1.3;
    for alpha in ALPHAS {
        for lambda in [0.0, 1.0, 2.5] {
            let spec = ScalarOpSpec::riemann_liouville(alpha, 0.0);
            let want = ratio_gamma(lambda + 1.0, lambda + 1.0 + alpha).map(|g| g * x.powf(lambda + alpha));
            let got = riemann_liouville(&spec, &Func1D::Power { lambda }, x, &q).map(|r| r.value);
            let id = format!("riemann-liouville/alpha={alpha}/lambda={lambda}");
            cases.push(Case::rel_or_error(id, "Riemann-Liouville integral of v^λ", want, got, 1e-8));
        }
    }

    let decay = |v: f64| (-v).exp();
    for alpha in ALPHAS {
        for x in [0.0, 1.0, 5.0] {
            let spec = ScalarOpSpec::weyl_right(alpha);
            let got = weyl_right(&spec, &Func1D::Exp { rate: 1.0 }, x, &q).map(|r| r.value);
            let id = format!("weyl-right/exp/alpha={alpha}/x={x}");
            cases.push(Case::rel_or_error(id, "Weyl integral of e^(−v)", Ok((-x).exp()), got, 1e-8));
            let f = Func1D::Callback(Callback1D::new(&decay).tail(Tail::Exponential));
            let got = weyl_right(&spec, &f, x, &q).map(|r| r.value);
            let id = format!("weyl-right/callback/alpha={alpha}/x={x}");
            cases.push(Case::rel_or_error(id, "Weyl integral of e^(−v)", Ok((-x).exp()), got, 1e-8));
        }
    }

    // β = −α: the hypergeometric factor is identically one
    let mut rng = RngStream::new(0x5A160, 0).rng();
    for i in 0..10 {
        let zeta = rng.random_range(0.0..2.0);
        let alpha = rng.random_range(0.2..2.5);
        let g = rng.random_range(-1.0..1.0);
        let u = rng.random_range(0.3..3.0);
        let lambda = rng.random_range(0.0..3.0);
        let f = Func1D::Power { lambda };
        let want = kober_first(&ScalarOpSpec::kober1(zeta, alpha), &f, u, &q).map(|r| r.value);
        let got = saigo_first(&ScalarOpSpec::saigo1(alpha, -alpha, g, zeta), &f, u, &q).map(|r| r.value);
        cases.push(Case::rel_or_error(format!("saigo/reduction/{i}"), "Saigo operator at β = −α", want, got, 1e-9));
    }

    for (alpha, beta, g, zeta, lambda, u, want) in SAIGO_ORACLE {
        let got = saigo_first(&ScalarOpSpec::saigo1(alpha, beta, g, zeta), &Func1D::Power { lambda }, u, &q).map(|r| r.value);
        let id = format!("saigo/oracle/alpha={alpha}/beta={beta}/gamma={g}/zeta={zeta}/lambda={lambda}/u={u}");
        cases.push(Case::rel_or_error(id, "Saigo operator on v^λ", Ok(want), got, 1e-7));
    }

    let x: f64 = 1.3;
    for alpha in [0.3, 0.7, 1.5] {
        for lambda in [1.0, 2.5] {
            let want = ratio_gamma(lambda + 1.0, lambda + 1.0 - alpha).map(|g| g * x.powf(lambda - alpha));
            let pw = move |v: f64| v.powf(lambda);
            let f = Func1D::Callback(Callback1D::new(&pw).zero_exponent(lambda).smoothness(4));
            let got = frac_derivative(alpha, &f, x, &q);
            let id = format!("frac-derivative/alpha={alpha}/lambda={lambda}");
            cases.push(Case::rel_or_error(id, "fractional derivative of v^λ", want, got, 1e-5));

            // D^α I^α f = f with I^α f evaluated by quadrature
            let id = format!("derivative-of-integral/alpha={alpha}/lambda={lambda}");
            let reference = "fractional derivative inverts the integral";
            let op = match ScalarOperator::new(ScalarOpSpec::riemann_liouville(alpha, 0.0), Func1D::Power { lambda }, &q) {
                Ok(op) => op,
                Err(e) => {
                    cases.push(Case::error(id, reference, Some(x.powf(lambda)), e));
                    continue;
                }
            };
            let integral = move |v: f64| op.eval(v).map_or(f64::NAN, |r| r.value);
            let g = Func1D::Callback(Callback1D::new(&integral).zero_exponent(lambda + alpha).smoothness(4));
            let got = frac_derivative(alpha, &g, x, &q);
            cases.push(Case::rel_or_error(id, reference, Ok(x.powf(lambda)), got, 1e-5));
        }
    }
    cases
}

// ------------------------------------------------------------- jacobians

const JACOBIAN_POINTS: usize = 20;

fn random_mat(p: usize, rng: &mut StreamRng) -> Mat {
    let mut m = Mat::identity(p);
    for i in 0..p {
        for j in 0..p {
            let boost = if i == j { 1.0 } else { 0.0 };
            m.set(i, j, boost + rng.random_range(-0.7..0.7));
        }
    }
    m
}

fn random_spd(p: usize, rng: &mut StreamRng) -> SymMat {
    SymMat::identity(p).congruence(&random_mat(p, rng)) + SymMat::scaled_identity(p, 0.3)
}

fn random_sym(p: usize, rng: &mut StreamRng) -> SymMat {
    let n = p * (p + 1) / 2;
    let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    SymMat::from_packed(p, &v).expect("packed length matches")
}

fn jacobian_case<F>(id: String, reference: &str, want: kober_core::Result<f64>, map: F, point: &[f64]) -> Case
where
    F: Fn(&[f64]) -> kober_core::Result<Vec<f64>>,
{
    let got = fd_jacobian_det(map, point, None).map(|j| j.abs_det);
    Case::rel_or_error(id, reference, want, got, 1e-3)
}

fn product(vals: impl IntoIterator<Item = kober_core::Result<f64>>) -> kober_core::Result<f64> {
    vals.into_iter().try_fold(1.0, |acc, v| Ok(acc * v?))
}

fn jacobians(ctx: &SuiteCtx<'_>) -> Vec<Case> {
    let mut cases = Vec::new();
    for p in ctx.dims(&[1, 2]) {
        for k in [1, 2] {
            let mut rng = ctx.rng(&format!("jacobians/p={p}/k={k}"));
            for i in 0..JACOBIAN_POINTS {
                let a: Vec<Mat> = (0..k).map(|_| random_mat(p, &mut rng)).collect();
                let xs: Vec<SymMat> = (0..k).map(|_| random_sym(p, &mut rng)).collect();
                let map = |v: &[f64]| {
                    let ms = unpack_all(p, k, v)?;
                    Ok(pack_all(&ms.iter().zip(&a).map(|(m, a)| m.congruence(a)).collect::<Vec<_>>()))
                };
                let want = product(a.iter().map(jac_congruence));
                cases.push(jacobian_case(format!("congruence/p={p}/k={k}/{i}"), "congruence Jacobian", want, map, &pack_all(&xs)));

                let ys: Vec<SymMat> = (0..k).map(|_| random_spd(p, &mut rng)).collect();
                let map = |v: &[f64]| {
                    let ms = unpack_all(p, k, v)?;
                    Ok(pack_all(&ms.iter().map(SymMat::inverse).collect::<kober_core::Result<Vec<_>>>()?))
                };
                let want = product(ys.iter().map(jac_inverse));
                cases.push(jacobian_case(format!("inverse/p={p}/k={k}/{i}"), "inverse Jacobian", want, map, &pack_all(&ys)));

                let beta = BetaMatParams::new(p, 2.5, 2.5).expect("valid shapes");
                let ys = (0..k).map(|_| sample_matrix_beta(&beta, &mut rng)).collect::<kober_core::Result<Vec<_>>>();
                let id = format!("dirichlet-chain/p={p}/k={k}/{i}");
                let reference = "Dirichlet chain Jacobian";
                match ys {
                    Ok(ys) => {
                        let map = |v: &[f64]| Ok(pack_all(&forward_dirichlet_chain(&unpack_all(p, k, v)?)?));
                        cases.push(jacobian_case(id, reference, jac_dirichlet_chain(&ys), map, &pack_all(&ys)));
                    }
                    Err(e) => cases.push(Case::error(id, reference, None, e)),
                }
            }
        }
    }
    cases
}

// ---------------------------------------------------------- beta moments

fn beta_moments(ctx: &SuiteCtx<'_>) -> Vec<Case> {
    let mut cases = Vec::new();
    for i in 1..=20 {
        let a = 0.5 * i as f64;
        let got = gamma_p(1, a);
        cases.push(Case::rel_or_error(format!("gamma-p/p=1/a={a}"), "Γ_p at p = 1", Ok(libm::tgamma(a)), got, 1e-12));
    }
    for p in [1usize, 2, 3] {
        for a in [1.3, 2.0, 3.7, 6.25] {
            let want: f64 = (0..p).map(|i| a - i as f64 / 2.0).product();
            let got = gamma_p(p, a + 1.0).and_then(|n| Ok(n / gamma_p(p, a)?));
            cases.push(Case::rel_or_error(format!("gamma-p-recurrence/p={p}/a={a}"), "Γ_p recurrence", Ok(want), got, 1e-12));
        }
    }

    // p = 2 beta integral by uniform sampling of the box (0,1)×(−1,1)×(0,1)
    for (a, b) in [(2.0, 1.5), (3.0, 2.5)] {
        let id = format!("beta-integral/p=2/a={a}/b={b}");
        let reference = "matrix beta integral";
        let want = gamma_p(2, a).and_then(|ga| Ok(ga * gamma_p(2, b)? / gamma_p(2, a + b)?));
        let est = estimate(&ctx.mc(&id, 2_000_000), ctx.runner, |rng| {
            let x = SymMat::from_packed(2, &[rng.random::<f64>(), rng.random_range(-1.0..1.0), rng.random::<f64>()])?;
            if !x.in_unit_interval() {
                return Ok(0.0);
            }
            let c = SymMat::identity(2) - x;
            Ok(2.0 * x.det().powf(a - 1.5) * c.det().powf(b - 1.5))
        });
        cases.push(mc_case(id, reference, want, est, None));
    }

    for (p, a, b) in [(2, 2.0, 1.5), (2, 3.0, 3.0), (3, 2.5, 2.0)] {
        let tag = format!("p={p}/a={a}/b={b}");
        let beta = match BetaMatParams::new(p, a, b) {
            Ok(beta) => beta,
            Err(e) => {
                cases.push(Case::error(format!("beta-det-moment/{tag}"), "matrix beta determinant moment", None, e));
                continue;
            }
        };
        let cfg = ctx.mc(&format!("beta-det-moment/{tag}"), 100_000);
        let est = estimate_many(&cfg, ctx.runner, 2, |rng, out| {
            let x = sample_matrix_beta(&beta, rng)?;
            out[0] = x.det();
            out[1] = f64::from(u8::from(!x.in_unit_interval()));
            Ok(())
        });
        match est {
            Ok(e) => {
                cases.push(mc_case(format!("beta-det-moment/{tag}"), "matrix beta determinant moment", beta.det_moment(1.0), Ok(e[0]), None));
                let outside = (e[1].mean * e[1].n as f64).round();
                cases.push(
                    Case::abs(format!("beta-support/{tag}"), "matrix beta support", 0.0, outside, None, 0.0)
                        .with_detail(format!("{} draws", e[1].n)),
                );
            }
            Err(err) => cases.push(Case::error(format!("beta-det-moment/{tag}"), "matrix beta determinant moment", None, err)),
        }
    }
    cases
}

fn mc_case(id: String, reference: &str, want: kober_core::Result<f64>, est: kober_core::Result<Estimate>, cap: Option<f64>) -> Case {
    match (want, est) {
        (Ok(w), Ok(e)) => Case::mc(id, reference, w, &e, MC_SE_FACTOR, cap),
        (Ok(w), Err(err)) => Case::error(id, reference, Some(w), err),
        (Err(err), _) => Case::error(id, reference, None, err),
    }
}

// ------------------------------------------------------- dirichlet chain

const CHAIN_ZETA: [f64; 2] = [0.5, 1.0];
const CHAIN_TERMINAL: f64 = 1.75;

fn max_diff(a: &[SymMat], b: &[SymMat]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (*x - *y).frobenius_norm()).fold(0.0, f64::max)
}

fn dirichlet_chain(ctx: &SuiteCtx<'_>) -> Vec<Case> {
    let p = ctx.p.unwrap_or(2);
    let h = (p as f64 + 1.0) / 2.0;
    let mut shapes: Vec<f64> = CHAIN_ZETA.iter().map(|z| z + h).collect();
    shapes.push(CHAIN_TERMINAL);
    let mut cases = Vec::new();

    let mut rng = ctx.rng("dirichlet-chain/round-trip");
    let beta = BetaMatParams::new(p, 2.0, 2.0).expect("valid shapes");
    for i in 0..20 {
        let r = (|| {
            let ys = (0..CHAIN_ZETA.len()).map(|_| sample_matrix_beta(&beta, &mut rng)).collect::<kober_core::Result<Vec<_>>>()?;
            let a = max_diff(&ys, &inverse_dirichlet_chain(&forward_dirichlet_chain(&ys)?)?);
            let xs = sample_matrix_dirichlet(p, &shapes, &mut rng)?;
            let b = max_diff(&xs, &forward_dirichlet_chain(&inverse_dirichlet_chain(&xs)?)?);
            Ok::<_, Error>((a, b))
        })();
        let reference = "chain map round trip";
        match r {
            Ok((a, b)) => {
                cases.push(Case::abs(format!("round-trip/forward-inverse/p={p}/{i}"), reference, 0.0, a, None, 1e-10));
                cases.push(Case::abs(format!("round-trip/inverse-forward/p={p}/{i}"), reference, 0.0, b, None, 1e-10));
            }
            Err(e) => cases.push(Case::error(format!("round-trip/p={p}/{i}"), reference, Some(0.0), e)),
        }
    }

    let second = match param_chain(&ChainSpec::Beta { zeta: CHAIN_ZETA.to_vec(), step: BetaStep::HalfP1 { p }, terminal: CHAIN_TERMINAL }) {
        Ok(s) => s,
        Err(e) => {
            cases.push(Case::error(format!("chain-parameters/p={p}"), "chain parameters", None, e));
            return cases;
        }
    };
    let cfg = ctx.mc("dirichlet-chain/moments", 100_000);
    let est = estimate_many(&cfg, ctx.runner, 5, |rng, out| {
        let xs = sample_matrix_dirichlet(p, &shapes, rng)?;
        let ys = inverse_dirichlet_chain(&xs)?;
        let (d1, d2) = (ys[0].det(), ys[1].det());
        out.copy_from_slice(&[d1, d2, d1 * d2, d1 * d1, d2 * d2]);
        Ok(())
    });
    let e = match est {
        Ok(e) => e,
        Err(err) => {
            cases.push(Case::error(format!("chain-moments/p={p}"), "chain factor law", None, err));
            return cases;
        }
    };
    for j in 0..2 {
        let want = BetaMatParams::new(p, shapes[j], second[j]).and_then(|b| b.det_moment(1.0));
        let id = format!("y-det-moment/p={p}/j={}", j + 1);
        cases.push(mc_case(id, "chain factor law", want, Ok(e[j]), None).with_detail(format!(
            "Y{} ~ beta({}, {})",
            j + 1,
            shapes[j],
            second[j]
        )));
    }
    let cov = e[2].mean - e[0].mean * e[1].mean;
    let corr = cov / ((e[3].mean - e[0].mean.powi(2)) * (e[4].mean - e[1].mean.powi(2))).sqrt();
    let n = e[0].n as f64;
    cases.push(Case::abs(format!("y-uncorrelated/p={p}"), "independence of chain factors", 0.0, corr, None, 3.0 / n.sqrt()));
    cases
}

// ------------------------------------------------------------ transforms

struct ScalarGrid {
    pairs: Vec<(f64, f64)>,
    f: FuncKD<'static>,
    grid: Vec<Vec<f64>>,
}

fn quad_grids(kind: OpKind) -> [ScalarGrid; 2] {
    match kind {
        OpKind::Second => [
            ScalarGrid {
                pairs: vec![(2.0, 1.5)],
                f: FuncKD::Separable(vec![Func1D::Exp { rate: 1.0 }]),
                grid: [0.8, 1.2, 1.5, 2.2, 3.0].iter().map(|&s| vec![s]).collect(),
            },
            ScalarGrid {
                pairs: vec![(2.0, 1.5), (1.0, 0.5)],
                f: FuncKD::SumPowerExp { c: 1.0, k: 2 },
                grid: vec![vec![0.8, 1.2], vec![1.5, 0.9], vec![1.2, 1.2], vec![2.0, 1.5], vec![3.0, 2.5]],
            },
        ],
        OpKind::First => [
            ScalarGrid {
                pairs: vec![(2.0, 1.5)],
                f: FuncKD::Separable(vec![Func1D::Exp { rate: 1.0 }]),
                grid: [0.5, 0.8, 1.5, 2.2, 2.6].iter().map(|&s| vec![s]).collect(),
            },
            ScalarGrid {
                pairs: vec![(2.0, 1.5), (1.5, 0.5)],
                f: FuncKD::SumPowerExp { c: 1.0, k: 2 },
                grid: vec![vec![0.5, 1.2], vec![1.5, 0.9], vec![1.0, 1.0], vec![2.0, 1.5], vec![2.4, 2.3]],
            },
        ],
    }
}

/// `(ζ, α)`, function and grid of the Monte Carlo checks at `p ≥ 2`.
fn matrix_grid(kind: OpKind) -> ((f64, f64), MatrixFn<'static>, Vec<f64>) {
    match kind {
        OpKind::Second => ((2.0, 1.5), MatrixFn::Wishart { df: 5.0 }, vec![0.8, 1.0, 1.3, 1.6, 2.0]),
        OpKind::First => ((5.0, 1.5), MatrixFn::Wishart { df: 5.0 }, vec![0.8, 1.0, 1.3, 1.6, 1.9]),
    }
}

/// Quadrature settings of the transform checks: a coarser base and looser
/// convergence than the operator default keep the two-variable cases fast
/// while staying well inside the 1e-6 check.
pub fn transform_quad() -> QuadConfig {
    QuadConfig { base_nodes: 32, rel_tol: 1e-7, ..QuadConfig::default() }
}

fn kind_name(kind: OpKind) -> &'static str {
    match kind {
        OpKind::First => "first",
        OpKind::Second => "second",
    }
}

fn transform_reference(kind: OpKind) -> &'static str {
    match kind {
        OpKind::First => "first-kind M-transform identity",
        OpKind::Second => "second-kind M-transform identity",
    }
}

fn fmt_point(s: &[f64]) -> String {
    s.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// Grid points from `--s`, widened to `k` coordinates when one is given.
fn override_grid(s: &[Vec<f64>], k: usize) -> Vec<Vec<f64>> {
    s.iter().map(|pt| if pt.len() == 1 { vec![pt[0]; k] } else { pt.clone() }).collect()
}

pub fn transform_cases(
    kind: OpKind,
    label: &str,
    params: kober_core::Result<MatrixOpParams>,
    target: &TransformTarget<'_>,
    grid: &[Vec<f64>],
    mc: &McConfig,
    runner: &dyn BatchRunner,
) -> Vec<Case> {
    let reference = transform_reference(kind);
    let params = match params {
        Ok(p) => p,
        Err(e) => return vec![Case::error(format!("{label}/parameters"), reference, None, e)],
    };
    let points: Vec<MPoint> = grid.iter().map(|s| MPoint::new(s)).collect();
    verify_transform(&params, target, &points, &transform_quad(), mc, runner)
        .into_iter()
        .map(|r| {
            let id = format!("{label}/s={}", fmt_point(&r.s));
            if let Some(e) = r.error {
                return Case::error(id, reference, None, e);
            }
            let tol = match r.method {
                LhsMethod::Quadrature => QUAD_REL_TOL * r.rhs.abs(),
                LhsMethod::MonteCarlo => (MC_SE_FACTOR * r.lhs_err).min(MC_REL_CAP * r.rhs.abs()),
            };
            let mut c = Case::abs(id, reference, r.rhs, r.lhs, Some(r.lhs_err), tol);
            c.pass = r.pass;
            c.with_detail(format!("ratio {}", crate::num::fmt12(r.ratio)))
        })
        .collect()
}

fn mtransform(kind: OpKind, ctx: &SuiteCtx<'_>) -> Vec<Case> {
    let name = kind_name(kind);
    let mut cases = Vec::new();
    for p in ctx.dims(&[1, 2]) {
        if p == 1 {
            for g in quad_grids(kind) {
                let k = g.pairs.len();
                let label = format!("{name}/p=1/k={k}");
                let grid = if ctx.s.is_empty() { g.grid.clone() } else { override_grid(ctx.s, k) };
                let params = MatrixOpParams::new(kind, 1, &g.pairs);
                let mc = ctx.mc(&label, 100_000);
                cases.extend(transform_cases(kind, &label, params, &TransformTarget::Multivar(g.f), &grid, &mc, ctx.runner));
            }
        } else {
            let ((zeta, alpha), f, grid) = matrix_grid(kind);
            let label = format!("{name}/p={p}/k=1");
            let grid = if ctx.s.is_empty() { grid.iter().map(|&s| vec![s]).collect() } else { override_grid(ctx.s, 1) };
            let params = MatrixOpParams::new(kind, p, &[(zeta, alpha)]);
            let mc = ctx.mc(&label, 1_000_000);
            cases.extend(transform_cases(kind, &label, params, &TransformTarget::Matrix(f), &grid, &mc, ctx.runner));
        }
    }
    if ctx.s.is_empty() {
        cases.extend(domain_guards(kind, ctx));
    }
    cases
}

/// Points just outside the transform domain must be refused with the
/// violated bound.
fn domain_guards(kind: OpKind, ctx: &SuiteCtx<'_>) -> Vec<Case> {
    let mut cases = Vec::new();
    for p in ctx.dims(&[1, 2]) {
        let (zeta, s) = match kind {
            OpKind::First => (2.0, 3.0),
            OpKind::Second => (2.0, (p as f64 - 1.0) / 2.0 - 2.0),
        };
        let id = format!("domain-guard/{}/p={p}/s={s}", kind_name(kind));
        let target = if p == 1 {
            TransformTarget::Scalar(Func1D::Exp { rate: 1.0 })
        } else {
            TransformTarget::Matrix(MatrixFn::Wishart { df: 5.0 })
        };
        let report = MatrixOpParams::new(kind, p, &[(zeta, 1.5)]).map(|params| {
            let mc = McConfig::with_samples(10_000, ctx.sub_seed(&id));
            verify_transform(&params, &target, &[MPoint::scalar(s)], &transform_quad(), &mc, ctx.runner)
        });
        let case = match report.as_ref().map(|r| r[0].error.as_ref()) {
            Ok(Some(e)) if matches!(e.root(), Error::Domain { .. }) => Case::flag(id, "transform domain", true, e.to_string()),
            Ok(Some(e)) => Case::flag(id, "transform domain", false, format!("unexpected error: {e}")),
            Ok(None) => Case::flag(id, "transform domain", false, "point outside the domain was accepted"),
            Err(e) => Case::error(id, "transform domain", None, e),
        };
        cases.push(case);
    }
    cases
}

// ------------------------------------------------------ density identity

fn density_identity(ctx: &SuiteCtx<'_>) -> Vec<Case> {
    let mut cases = Vec::new();
    let q = QuadConfig::default();
    let gamma_f = 2.5;
    let f = MatrixFn::DetPowerExp { gamma: gamma_f };
    let f1 = Func1D::PowerExp { lambda: gamma_f - 1.0, rate: 1.0 };

    for (kind, zeta, alpha) in [(OpKind::Second, 2.0, 1.5), (OpKind::First, 1.0, 0.8)] {
        let name = kind_name(kind);
        for u in [0.5, 1.0, 2.5] {
            let id = format!("estimator/{name}/p=1/u={u}");
            let reference = "matrix estimator against one-variable quadrature";
            let want = match kind {
                OpKind::Second => kober_second(&ScalarOpSpec::kober2(zeta, alpha), &f1, u, &q),
                OpKind::First => kober_first(&ScalarOpSpec::kober1(zeta, alpha), &f1, u, &q),
            }
            .map(|r| r.value);
            let est = MatrixOpParams::new(kind, 1, &[(zeta, alpha)]).and_then(|params| {
                let um = [SymMat::from_packed(1, &[u])?];
                let mc = ctx.mc(&id, 100_000);
                match kind {
                    OpKind::Second => kober_matrix_second(&params, &f, &um, &mc, ctx.runner),
                    OpKind::First => kober_matrix_first(&params, &f, &um, &mc, ctx.runner),
                }
            });
            cases.push(mc_case(id, reference, want, est, None));
        }
    }

    // standard error against sample size at p = 2
    let u2 = SymMat::from_packed(2, &[1.2, 0.3, 0.7]).expect("packed length matches");
    for (kind, zeta, alpha) in [(OpKind::Second, 2.0, 1.5), (OpKind::First, 1.0, 0.8)] {
        let id = format!("se-rate/{}/p=2", kind_name(kind));
        let reference = "Monte Carlo error rate";
        let ses = MatrixOpParams::new(kind, 2, &[(zeta, alpha)]).and_then(|params| {
            [10_000usize, 100_000, 1_000_000]
                .iter()
                .map(|&n| {
                    let mc = McConfig::with_samples(n, ctx.sub_seed(&format!("{id}/n={n}")));
                    let e = match kind {
                        OpKind::Second => kober_matrix_second(&params, &f, &[u2], &mc, ctx.runner),
                        OpKind::First => kober_matrix_first(&params, &f, &[u2], &mc, ctx.runner),
                    }?;
                    Ok(((n as f64).ln(), e.se.ln()))
                })
                .collect::<kober_core::Result<Vec<_>>>()
        });
        cases.push(match ses {
            Ok(pts) => {
                let slope = fit_slope(&pts);
                Case::abs(id, reference, -0.5, slope, None, 0.05).with_detail("log-log slope over n = 1e4, 1e5, 1e6")
            }
            Err(e) => Case::error(id, reference, Some(-0.5), e),
        });
    }

    let wishart = MatrixFn::Wishart { df: 5.0 };
    for (kind, zeta, alpha) in [(OpKind::Second, 2.0, 1.5), (OpKind::First, 5.0, 1.5)] {
        for s in [1.0, 1.5, 1.8] {
            let id = format!("density-mode/{}/p=2/s={s}", kind_name(kind));
            let reference = "density-mode M-transform against the operator";
            let r = MatrixOpParams::new(kind, 2, &[(zeta, alpha)]).and_then(|params| {
                let pt = MPoint::scalar(s);
                let n = ctx.n_samples.unwrap_or(1_000_000);
                let dm = mtransform_mc(&params, &wishart, YRoute::Independent, &pt, &McConfig::with_samples(n, ctx.sub_seed(&id)), ctx.runner)?;
                let op_id = format!("{id}/operator");
                let op = operator_mtransform_mc(&params, &wishart, &pt, &McConfig::with_samples(n, ctx.sub_seed(&op_id)), ctx.runner)?;
                let closed = kober_core::mtransform::gamma_ratio(&params, &pt)? * wishart.m_transform(2, &[s])?;
                Ok((dm, op, closed))
            });
            cases.push(match r {
                Ok((dm, op, closed)) => {
                    let se = dm.se.hypot(op.se);
                    Case::abs(id, reference, op.mean, dm.mean, Some(se), MC_SE_FACTOR * se)
                        .with_detail(format!("closed form {}", crate::num::fmt12(closed)))
                }
                Err(e) => Case::error(id, reference, None, e),
            });
        }
    }
    cases
}

/// Least-squares slope of `y` on `x`.
fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = [1.0f64, 2.0, 3.0].iter().map(|&x| (x, 4.0 - 0.5 * x)).collect();
        assert!((fit_slope(&pts) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn override_widens() {
        assert_eq!(override_grid(&[vec![1.5], vec![1.0, 2.0]], 2), vec![vec![1.5, 1.5], vec![1.0, 2.0]]);
    }

    #[test]
    fn unknown_suite() {
        let ctx = SuiteCtx { seed: 1, p: None, n_samples: None, s: &[], runner: &kober_core::mc::Serial };
        let err = run_suite("nope", &ctx).unwrap_err().to_string();
        assert!(SUITES.iter().all(|s| err.contains(s)));
    }
}
