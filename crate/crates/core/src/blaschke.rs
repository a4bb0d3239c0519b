//! Finite Blaschke products and their Clark data.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{from_pair, pairs, unpairs, Pair};
use crate::linalg::{cosine_distance, ONE, ZERO};
use crate::modelspace::ModelSpace;
use crate::operators;

/// Zeros must stay this far inside the unit circle.
pub const ZERO_MARGIN: f64 = 1e-9;
pub const UNIMODULAR_TOL: f64 = 1e-12;
pub const POLE_TOL: f64 = 1e-12;
/// Matching tolerance for conjugate-pair detection.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// `u(z) = constant * prod_k (z - a_k) / (1 - conj(a_k) z)`.
#[derive(Clone, PartialEq)]
pub struct InnerFunction {
    zeros: Vec<Complex64>,
    constant: Complex64,
}

impl fmt::Debug for InnerFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InnerFunction").field("zeros", &self.zeros).field("constant", &self.constant).finish()
    }
}

impl InnerFunction {
    pub fn new(zeros: Vec<Complex64>, constant: Complex64) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::ConstantInnerFunction);
        }
        if let Some(&zero) = zeros.iter().find(|a| !(a.norm() < 1.0 - ZERO_MARGIN)) {
            return Err(Error::ZeroOnOrOutsideCircle { zero, modulus: zero.norm() });
        }
        if !((constant.norm() - 1.0).abs() <= UNIMODULAR_TOL) {
            return Err(Error::NotUnimodular { constant });
        }
        let u = Self { zeros, constant };
        // cheap sanity sweep of unimodularity on the circle
        for k in 0..16 {
            let z = Complex64::from_polar(1.0, std::f64::consts::TAU * (k as f64 + 0.5) / 16.0);
            let m = u.value(z).norm();
            if (m - 1.0).abs() > 1e-10 {
                return Err(Error::NotUnimodular { constant: u.value(z) });
            }
        }
        Ok(u)
    }

    /// `z^n`
    pub fn monomial(n: usize) -> Self {
        Self::new(vec![ZERO; n], ONE).expect("monomial is a valid Blaschke product")
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// Evaluation without the pole check; callers stay inside the closed disk
    /// or otherwise away from `1/conj(a_k)`.
    pub fn value(&self, z: Complex64) -> Complex64 {
        self.zeros.iter().fold(self.constant, |acc, &a| acc * factor(a, z))
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        Ok(self.value(z))
    }

    fn check_pole(&self, z: Complex64) -> Result<()> {
        for a in &self.zeros {
            if *a != ZERO && (z - 1.0 / a.conj()).norm() < POLE_TOL {
                return Err(Error::PoleHit { point: z });
            }
        }
        Ok(())
    }

    /// `u'(z)`: logarithmic derivative away from the zeros of `u`, product
    /// rule near them.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        let near_zero = self.zeros.iter().any(|&a| (z - a).norm() < 1e-6);
        if near_zero {
            let mut total = ZERO;
            for (k, &ak) in self.zeros.iter().enumerate() {
                let d = 1.0 - ak.conj() * z;
                let mut term = self.constant * (1.0 - ak.norm_sqr()) / (d * d);
                for (j, &aj) in self.zeros.iter().enumerate() {
                    if j != k {
                        term *= factor(aj, z);
                    }
                }
                total += term;
            }
            Ok(total)
        } else {
            let log_der: Complex64 = self.zeros.iter().map(|&a| 1.0 / (z - a) + a.conj() / (1.0 - a.conj() * z)).sum();
            Ok(self.value(z) * log_der)
        }
    }

    /// `u^(z) = conj(u(conj z))`. A real-symmetric `u` is returned unchanged so
    /// that `K_u` and `K_u^` carry the same coordinates.
    pub fn hat(&self) -> Self {
        if self.is_real_symmetric() {
            return self.clone();
        }
        Self { zeros: self.zeros.iter().map(Complex64::conj).collect(), constant: self.constant.conj() }
    }

    /// True iff the zero multiset is closed under conjugation and the
    /// constant is real.
    pub fn is_real_symmetric(&self) -> bool {
        if self.constant.im.abs() > SYMMETRY_TOL {
            return false;
        }
        let mut pool: Vec<Complex64> = self.zeros.clone();
        for a in &self.zeros {
            let target = a.conj();
            match pool.iter().position(|b| (b - target).norm() <= SYMMETRY_TOL) {
                Some(i) => {
                    pool.swap_remove(i);
                }
                None => return false,
            }
        }
        true
    }

    /// The product `self * other` (zeros concatenated in order).
    pub fn product(&self, other: &Self) -> Self {
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&other.zeros);
        Self { zeros, constant: self.constant * other.constant }
    }

    pub fn with_constant(&self, constant: Complex64) -> Result<Self> {
        Self::new(self.zeros.clone(), constant)
    }

    /// Same zero list (in order) and same constant.
    pub fn same_data(&self, other: &Self) -> bool {
        self == other
    }

    /// Numerator and denominator coefficient lists (ascending powers).
    pub fn coefficients(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut num = vec![self.constant];
        let mut den = vec![ONE];
        for &a in &self.zeros {
            num = crate::poly::mul(&num, &crate::poly::linear_root(a));
            den = crate::poly::mul(&den, &crate::poly::linear_pole(a));
        }
        (num, den)
    }
}

#[inline]
pub(crate) fn factor(a: Complex64, z: Complex64) -> Complex64 {
    (z - a) / (1.0 - a.conj() * z)
}

#[derive(Serialize, Deserialize)]
struct InnerFunctionWire {
    zeros: Vec<Pair>,
    constant: Pair,
}

impl Serialize for InnerFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        InnerFunctionWire { zeros: pairs(&self.zeros), constant: [self.constant.re, self.constant.im] }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for InnerFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = InnerFunctionWire::deserialize(d)?;
        InnerFunction::new(unpairs(&w.zeros), from_pair(w.constant)).map_err(serde::de::Error::custom)
    }
}

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedScalar {
    Finite(Complex64),
    Infinity,
}

impl ExtendedScalar {
    pub fn finite(re: f64, im: f64) -> Self {
        Self::Finite(Complex64::new(re, im))
    }

    pub fn as_finite(self) -> Option<Complex64> {
        match self {
            Self::Finite(z) => Some(z),
            Self::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Self::Infinity)
    }

    pub fn modulus(self) -> f64 {
        match self {
            Self::Finite(z) => z.norm(),
            Self::Infinity => f64::INFINITY,
        }
    }

    pub fn conj(self) -> Self {
        match self {
            Self::Finite(z) => Self::Finite(z.conj()),
            Self::Infinity => Self::Infinity,
        }
    }

    /// `1 / conj(alpha)` on the sphere.
    pub fn reciprocal_conj(self) -> Self {
        match self {
            Self::Finite(z) if z == ZERO => Self::Infinity,
            Self::Finite(z) => Self::Finite(1.0 / z.conj()),
            Self::Infinity => Self::Finite(ZERO),
        }
    }

    /// `1 / alpha` on the sphere.
    pub fn reciprocal(self) -> Self {
        self.reciprocal_conj().conj()
    }

    /// Chordal distance on the sphere; finite-vs-infinite comparisons behave.
    pub fn chordal_distance(self, other: Self) -> f64 {
        match (self, other) {
            (Self::Infinity, Self::Infinity) => 0.0,
            (Self::Finite(a), Self::Infinity) | (Self::Infinity, Self::Finite(a)) => 2.0 / (1.0 + a.norm_sqr()).sqrt(),
            (Self::Finite(a), Self::Finite(b)) => 2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt()),
        }
    }
}

impl fmt::Display for ExtendedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            Self::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtendedScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(z) => [z.re, z.im].serialize(s),
            Self::Infinity => "inf".serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            Pair(Pair),
            Word(String),
        }
        match Wire::deserialize(d)? {
            Wire::Pair(p) => Ok(Self::Finite(from_pair(p))),
            Wire::Word(w) if w == "inf" || w == "infinity" => Ok(Self::Infinity),
            Wire::Word(w) => Err(serde::de::Error::custom(format!("unknown scalar {w:?}"))),
        }
    }
}

/// Atoms of the Clark measure for a unimodular parameter.
#[derive(Debug, Clone)]
pub struct ClarkData {
    pub alpha: Complex64,
    pub points: Vec<Complex64>,
    pub weights: Vec<f64>,
    /// Eigenvectors of the Clark unitary, one column per point.
    pub eigenvectors: Vec<Vec<Complex64>>,
    /// `max_j |u(zeta_j) - alpha|`; the eigenvalue problem fixes the points
    /// and this records how they relate to `alpha`.
    pub value_mismatch: f64,
    /// `max_j |u(zeta_j) - conj(alpha)|`.
    pub conj_value_mismatch: f64,
    /// Largest cosine distance between an eigenvector and the boundary
    /// kernel at its eigenvalue.
    pub alignment: f64,
}

pub const DEGENERACY_GAP: f64 = 1e-10;

impl ClarkData {
    pub fn compute(space: &Arc<ModelSpace>, alpha: Complex64) -> Result<Self> {
        if (alpha.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnimodular { constant: alpha });
        }
        let u = space.inner();
        let unitary = operators::clark_perturbation(space, alpha)?;
        let (values, vectors) = unitary.matrix().eigen()?;
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].arg().total_cmp(&values[b].arg()));
        let points: Vec<Complex64> = order.iter().map(|&k| values[k] / values[k].norm()).collect();
        let eigenvectors: Vec<Vec<Complex64>> = order.iter().map(|&k| vectors.column(k)).collect();
        let mut gap = f64::INFINITY;
        for i in 0..points.len() {
            for j in 0..i {
                gap = gap.min((points[i] - points[j]).norm());
            }
        }
        if gap < DEGENERACY_GAP {
            return Err(Error::DegenerateSpectrum { gap });
        }
        let mut weights = Vec::with_capacity(points.len());
        let mut value_mismatch: f64 = 0.0;
        let mut conj_value_mismatch: f64 = 0.0;
        let mut alignment: f64 = 0.0;
        for (zeta, vec) in points.iter().zip(&eigenvectors) {
            weights.push(1.0 / u.derivative(*zeta)?.norm());
            let uz = u.value(*zeta);
            value_mismatch = value_mismatch.max((uz - alpha).norm());
            conj_value_mismatch = conj_value_mismatch.max((uz - alpha.conj()).norm());
            let k = space.boundary_kernel(*zeta)?;
            alignment = alignment.max(cosine_distance(vec, k.coords()));
        }
        Ok(Self { alpha, points, weights, eigenvectors, value_mismatch, conj_value_mismatch, alignment })
    }

    /// `sum_j w_j |f(zeta_j)|^2`
    pub fn quadrature(&self, f: impl Fn(Complex64) -> Complex64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&z, &w)| w * f(z).norm_sqr()).sum()
    }
}

/// Clark points of `u` for `alpha`, on a freshly built model space.
pub fn clark_points(u: &InnerFunction, alpha: Complex64) -> Result<ClarkData> {
    let space = ModelSpace::new(u.clone())?;
    ClarkData::compute(&space, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn construction_rejects_bad_data() {
        assert!(matches!(InnerFunction::new(vec![c(1.0, 0.0)], ONE), Err(Error::ZeroOnOrOutsideCircle { .. })));
        assert!(matches!(InnerFunction::new(vec![c(0.5, 0.0)], c(1.1, 0.0)), Err(Error::NotUnimodular { .. })));
        assert!(matches!(InnerFunction::new(vec![], ONE), Err(Error::ConstantInnerFunction)));
    }

    #[test]
    fn monomial_values() {
        let u = InnerFunction::monomial(2);
        assert!((u.eval(c(0.5, 0.0)).unwrap() - c(0.25, 0.0)).norm() < 1e-15);
        assert!((u.eval(c(2.0, 0.0)).unwrap() - c(4.0, 0.0)).norm() < 1e-15);
        assert!((u.derivative(ONE).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn single_factor() {
        let u = InnerFunction::new(vec![c(0.5, 0.0)], ONE).unwrap();
        assert!(u.eval(c(0.5, 0.0)).unwrap().norm() < 1e-15);
        assert!((u.eval(c(0.0, 1.0)).unwrap().norm() - 1.0).abs() < 1e-15);
        assert!((u.eval(ZERO).unwrap() - c(-0.5, 0.0)).norm() < 1e-15);
        // (z - a)/(1 - a z) has derivative 1 - |a|^2 at the origin
        assert!((u.derivative(ZERO).unwrap() - c(0.75, 0.0)).norm() < 1e-15);
        // at the zero itself the product rule is used: 1 / (1 - |a|^2)
        assert!((u.derivative(c(0.5, 0.0)).unwrap() - c(1.0 / 0.75, 0.0)).norm() < 1e-14);
        assert!(matches!(u.eval(c(2.0, 0.0)), Err(Error::PoleHit { .. })));
    }

    #[test]
    fn unimodular_on_circle() {
        let u = InnerFunction::new(vec![c(0.3, 0.4)], c(-1.0, 0.0)).unwrap();
        for k in 0..16 {
            let z = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 16.0);
            assert!((u.eval(z).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let u = InnerFunction::new(vec![c(0.3, 0.1), c(-0.2, 0.5), ZERO], c(0.0, 1.0)).unwrap();
        for z in [c(0.3, 0.0), c(0.1, -0.4), c(0.3, 0.1)] {
            let h = 1e-5;
            let fd = (u.value(z + h) - u.value(z - h)) / (2.0 * h);
            assert!((u.derivative(z).unwrap() - fd).norm() < 1e-6);
        }
        let z2 = InnerFunction::monomial(2);
        let lam = c(0.3, 0.0);
        let fd = (z2.value(lam + 1e-5) - z2.value(lam - 1e-5)) / 2e-5;
        assert!((z2.derivative(lam).unwrap() - fd).norm() < 1e-6);
    }

    #[test]
    fn hat_involution() {
        let u = InnerFunction::new(vec![c(0.0, 0.5)], ONE).unwrap();
        let h = u.hat();
        assert_eq!(h.zeros(), &[c(0.0, -0.5)]);
        assert_eq!(h.hat(), u);
        for k in 0..8 {
            let z = c(0.1 * k as f64 - 0.3, 0.05 * k as f64);
            assert!((h.value(z.conj()).conj() - u.value(z)).norm() < 1e-12);
        }
        let v = InnerFunction::new(vec![c(0.2, 0.0)], c(0.0, 1.0)).unwrap();
        assert_eq!(v.hat().constant(), c(0.0, -1.0));
    }

    #[test]
    fn real_symmetry() {
        assert!(InnerFunction::monomial(3).is_real_symmetric());
        assert!(!InnerFunction::new(vec![c(0.0, 0.5)], ONE).unwrap().is_real_symmetric());
        let u = InnerFunction::new(vec![c(0.0, 0.5), c(0.0, -0.5)], c(-1.0, 0.0)).unwrap();
        assert!(u.is_real_symmetric());
        assert_eq!(u.hat(), u);
        for k in 0..8 {
            let z = c(0.1 * k as f64 - 0.35, -0.07 * k as f64);
            assert!((u.value(z) - u.value(z.conj()).conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn extended_scalar_arithmetic() {
        assert_eq!(ExtendedScalar::finite(0.0, 0.0).reciprocal_conj(), ExtendedScalar::Infinity);
        assert_eq!(ExtendedScalar::Infinity.reciprocal_conj(), ExtendedScalar::finite(0.0, 0.0));
        let a = ExtendedScalar::finite(0.0, 2.0).reciprocal_conj();
        assert!(a.chordal_distance(ExtendedScalar::finite(0.0, 0.5)) < 1e-15);
        let json = serde_json::to_string(&ExtendedScalar::Infinity).unwrap();
        assert_eq!(json, "\"inf\"");
    }

    #[test]
    fn json_round_trip() {
        let u: InnerFunction = serde_json::from_str(r#"{"zeros":[[0,0],[0.5,0.25]],"constant":[0,1]}"#).unwrap();
        assert_eq!(u.degree(), 2);
        let back: InnerFunction = serde_json::from_str(&serde_json::to_string(&u).unwrap()).unwrap();
        assert_eq!(back, u);
        assert!(serde_json::from_str::<InnerFunction>(r#"{"zeros":[[1,0]],"constant":[1,0]}"#).is_err());
    }
}
