use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;

use mspace::classify::{is_tho, is_tto, sedlock_class};
use mspace::operators::{sedlock_op, tho_matrix, tto_matrix};
use mspace::{ExtendedScalar, InnerFunction, ModelSpace, RationalSymbol, SpaceElement};

const TOL: f64 = 1e-9;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn zero() -> impl Strategy<Value = Complex64> {
    (0.0..0.85f64, 0.0..2.0 * PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn unit() -> impl Strategy<Value = Complex64> {
    (0.0..2.0 * PI).prop_map(|t| Complex64::from_polar(1.0, t))
}

fn boxed() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| c(a, b))
}

fn space(max_degree: usize) -> impl Strategy<Value = Arc<ModelSpace>> {
    (prop::collection::vec(zero(), 1..=max_degree), unit())
        .prop_map(|(zeros, constant)| ModelSpace::new(InnerFunction::new(zeros, constant).unwrap()).unwrap())
}

fn with_element(max_degree: usize) -> impl Strategy<Value = (Arc<ModelSpace>, SpaceElement)> {
    space(max_degree).prop_flat_map(|sp| {
        let n = sp.dim();
        (Just(sp), prop::collection::vec(boxed(), n)).prop_map(|(sp, coords)| {
            let f = sp.element(coords).unwrap();
            (sp, f)
        })
    })
}

fn laurent() -> impl Strategy<Value = RationalSymbol> {
    (-3i32..=0, prop::collection::vec(boxed(), 1..=6)).prop_map(|(low, coeffs)| RationalSymbol::laurent(low, coeffs))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inner_functions_are_unimodular_on_the_circle(sp in space(6), zeta in unit()) {
        prop_assert!((sp.inner().value(zeta).norm() - 1.0).abs() < 1e-12);
        prop_assert!(sp.gram_residual() < TOL);
    }

    #[test]
    fn kernels_reproduce_point_values((sp, f) in with_element(6), lambda in zero()) {
        let k = sp.kernel(lambda).unwrap();
        prop_assert!((f.inner(&k).unwrap() - f.eval(lambda)).norm() < TOL);
    }

    #[test]
    fn conjugation_is_an_isometric_involution((sp, f) in with_element(6)) {
        let cu = sp.conjugation_c().unwrap();
        let cf = cu.apply(&f).unwrap();
        prop_assert!((cf.norm() - f.norm()).abs() < TOL);
        prop_assert!(cu.apply(&cf).unwrap().dist(&f).unwrap() < TOL);
    }

    #[test]
    fn toeplitz_adjoint_has_the_conjugate_symbol(sp in space(5), phi in laurent()) {
        let a = tto_matrix(&sp, &sp, &phi).unwrap();
        let b = tto_matrix(&sp, &sp, &phi.conj()).unwrap();
        prop_assert!(a.adjoint().max_dist(&b).unwrap() < TOL);
        prop_assert!(is_tto(&a, TOL).unwrap().member);
    }

    #[test]
    fn hankel_builds_pass_membership(sp in space(5), phi in laurent()) {
        let b = tho_matrix(&sp, &sp, &phi).unwrap();
        prop_assert!(is_tho(&b, TOL).unwrap().member);
    }

    #[test]
    fn sedlock_operators_lie_in_their_class((sp, f) in with_element(5), alpha in (0.0..0.9f64, 0.0..2.0 * PI)) {
        prop_assume!(sp.dim() >= 2);
        let alpha = ExtendedScalar::Finite(Complex64::from_polar(alpha.0, alpha.1));
        let a = sedlock_op(alpha, &f, c(0.3, -0.2)).unwrap();
        let report = sedlock_class(&a, TOL).unwrap();
        prop_assert!(report.contains(alpha, 1e-6), "{:?}", report.alpha);
    }
}
