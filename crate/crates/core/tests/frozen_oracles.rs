//! Values frozen from an independent 40-digit evaluation (tests/oracles/frozen_values.py).

use approx::assert_relative_eq;
use kober_core::hyper::gauss_2f1;
use kober_core::matgamma::ln_gamma_p;
use kober_core::quad::QuadConfig;
use kober_core::scalar_ops::{kober_first, kober_second, riemann_liouville, saigo_first, Func1D, ScalarOpSpec};
use kober_core::special::ln_gamma;

#[test]
fn gamma_values() {
    assert_relative_eq!(ln_gamma(2.5).unwrap(), 0.284_682_870_472_919_16, max_relative = 1e-13);
    assert_relative_eq!(ln_gamma_p(2, 1.5).unwrap(), 0.451_582_705_289_454_86, max_relative = 1e-13);
    assert_relative_eq!(ln_gamma_p(3, 2.0).unwrap(), 1.596_312_591_138_855, max_relative = 1e-13);
}

#[test]
fn power_closed_forms() {
    let q = QuadConfig::default();
    let got = kober_first(&ScalarOpSpec::kober1(1.0, 0.5), &Func1D::Power { lambda: 2.0 }, 1.0, &q).unwrap().value;
    assert_relative_eq!(got, 0.515_830_476_386_520_03, max_relative = 1e-10);
    let got = kober_second(&ScalarOpSpec::kober2(1.0, 0.5), &Func1D::Power { lambda: -1.0 }, 2.0, &q).unwrap().value;
    assert_relative_eq!(got, 0.376_126_389_031_837_5, max_relative = 1e-10);
    let got = riemann_liouville(&ScalarOpSpec::riemann_liouville(0.5, 0.0), &Func1D::Power { lambda: 1.0 }, 1.0, &q).unwrap().value;
    assert_relative_eq!(got, 0.752_252_778_063_675, max_relative = 1e-10);
    let got = riemann_liouville(&ScalarOpSpec::riemann_liouville(0.5, 0.0), &Func1D::Power { lambda: 0.0 }, 1.0, &q).unwrap().value;
    assert_relative_eq!(got, 1.128_379_167_095_512_6, max_relative = 1e-10);
}

const HYP: [(f64, f64, f64, f64, f64, f64); 10] = [
    (0.5, 0.3, 0.3, 0.36, 1.25, 1e-14),
    (1.0, 1.0, 2.0, 0.5, 1.386_294_361_119_890_6, 1e-14),
    (0.75, -0.5, 0.5, 0.3, 0.751_221_630_756_512_1, 1e-14),
    (0.75, -0.5, 0.5, 0.9, -0.142_355_082_816_592_8, 1e-12),
    (0.75, -0.5, 0.5, 0.999_999, -1.247_782_581_076_8, 1e-12),
    (1.0, 1.0, 2.0, 0.99, 4.651_687_056_553_627, 1e-9),
    (0.5, 0.5, 1.0, 0.999, 3.081_960_708_698_816, 1e-9),
    (1.5, 0.25, 2.5, 0.8, 1.210_475_086_356_264_6, 1e-13),
    (0.3, 0.7, 1.2, -3.0, 0.763_061_178_503_542_4, 1e-12),
    (2.0, -3.0, 1.5, 0.95, -0.035_771_428_571_428_58, 1e-13),
];

#[test]
fn hypergeometric() {
    for (a, b, c, z, want, tol) in HYP {
        let got = gauss_2f1(a, b, c, z).unwrap();
        assert!((got - want).abs() <= tol * want.abs().max(1.0), "2F1({a},{b};{c};{z}) = {got}, want {want}");
    }
}

const SAIGO: [(f64, f64, f64, f64, f64, f64, f64); 6] = [
    (0.5, 0.25, 0.5, 0.5, 0.0, 0.7, 0.675_978_240_067_284_73),
    (0.5, 0.25, 0.5, 1.0, 1.0, 1.3, 0.686_835_295_525_934_05),
    (0.5, 0.25, 0.5, 1.0, 2.5, 0.7, 0.182_382_296_357_184_33),
    (1.3, -0.4, 0.8, 1.5, 2.0, 1.7, 0.342_228_639_872_078_94),
    (1.3, -0.4, 0.8, 0.2, 0.5, 2.4, 0.523_633_290_892_936_1),
    (0.7, 0.6, 1.2, 0.5, 1.0, 0.9, 0.269_706_276_375_983_97),
];

#[test]
fn saigo_on_powers() {
    let q = QuadConfig::default();
    for (a, b, g, zeta, lambda, u, want) in SAIGO {
        let got = saigo_first(&ScalarOpSpec::saigo1(a, b, g, zeta), &Func1D::Power { lambda }, u, &q).unwrap().value;
        assert_relative_eq!(got, want, max_relative = 1e-7);
    }
}
