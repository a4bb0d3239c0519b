//! Rational symbols on the unit circle.
//!
//! A symbol is kept as an expression tree over certified rational leaves
//! (coefficient pairs, Blaschke products, model-space elements). Pointwise
//! evaluation walks the tree, so products of many factors never have to be
//! multiplied out into ill-conditioned high-degree coefficient lists. The
//! tree can still be flattened to a single `num/den` pair for export.
//!
//! Off the circle every node evaluates to the analytic continuation of its
//! boundary values: the boundary conjugate of `s` continues as
//! `conj(s(1/conj z))` and the flip `J s` as `s(1/z)/z`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::InnerFunction;
use crate::error::{Error, Result};
use crate::json::{from_pair, pairs, unpairs, Pair};
use crate::linalg::{ONE, ZERO};
use crate::poly::{self, Poly};
use crate::quadrature::node;

use super::SpaceElement;

/// Minimum distance between a denominator root and the unit circle.
pub const POLE_MARGIN: f64 = 1e-6;
/// Minimum modulus on the circle of anything we divide by.
pub const RECIP_FLOOR: f64 = 1e-10;
const RECIP_SAMPLES: usize = 4096;

#[derive(Clone)]
pub struct RationalSymbol(Arc<Node>);

enum Node {
    Ratio { num: Poly, den: Poly },
    Inner(InnerFunction),
    Element(SpaceElement),
    Sum(RationalSymbol, RationalSymbol),
    Product(RationalSymbol, RationalSymbol),
    Scaled(Complex64, RationalSymbol),
    Conj(RationalSymbol),
    Hat(RationalSymbol),
    Flip(RationalSymbol),
    Recip(RationalSymbol),
}

impl RationalSymbol {
    /// `num / den` with a certified denominator.
    pub fn new(num: Vec<Complex64>, den: Vec<Complex64>) -> Result<Self> {
        let den = poly::trim(den);
        if den.is_empty() {
            return Err(Error::SingularDenominator);
        }
        let k = poly::low_order_zeros(&den);
        let distance = poly::roots(&den[k..])?.iter().map(|r| (r.norm() - 1.0).abs()).fold(f64::INFINITY, f64::min);
        if distance < POLE_MARGIN {
            return Err(Error::PoleNearCircle { distance });
        }
        let (num, den) = normalize(poly::trim(num), den);
        Ok(Self(Arc::new(Node::Ratio { num, den })))
    }

    pub fn zero() -> Self {
        Self::polynomial(Vec::new())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::polynomial(vec![c])
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        Self(Arc::new(Node::Ratio { num: poly::trim(coeffs), den: vec![ONE] }))
    }

    /// `z^k` for any integer `k`.
    pub fn monomial(k: i32) -> Self {
        Self::laurent(k.min(0), {
            let mut c = vec![ZERO; (k - k.min(0)) as usize + 1];
            *c.last_mut().unwrap() = ONE;
            c
        })
    }

    /// `sum_j coeffs[j] z^(low + j)`.
    pub fn laurent(low: i32, coeffs: Vec<Complex64>) -> Self {
        if low >= 0 {
            Self::polynomial(poly::shift(&coeffs, low as usize))
        } else {
            let mut den = vec![ZERO; (-low) as usize];
            den.push(ONE);
            let (num, den) = normalize(poly::trim(coeffs), den);
            Self(Arc::new(Node::Ratio { num, den }))
        }
    }

    pub fn inner(u: &InnerFunction) -> Self {
        Self(Arc::new(Node::Inner(u.clone())))
    }

    /// `conj(u)` on the circle, realised as `1/u`.
    pub fn inner_conj(u: &InnerFunction) -> Self {
        Self(Arc::new(Node::Recip(Self::inner(u))))
    }

    pub fn element(f: &SpaceElement) -> Self {
        Self(Arc::new(Node::Element(f.clone())))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self(Arc::new(Node::Scaled(c, self.clone())))
    }

    /// Boundary conjugate: `conj(s(z))` for `|z| = 1`.
    pub fn conj(&self) -> Self {
        Self(Arc::new(Node::Conj(self.clone())))
    }

    /// `conj(s(conj z))`
    pub fn hat(&self) -> Self {
        Self(Arc::new(Node::Hat(self.clone())))
    }

    /// The flip `conj(z) s(conj z)` on the circle.
    pub fn flip(&self) -> Self {
        Self(Arc::new(Node::Flip(self.clone())))
    }

    /// `1/s`, certified nonvanishing on the circle by sampling.
    pub fn recip(&self) -> Result<Self> {
        let floor = (0..RECIP_SAMPLES).map(|m| self.eval(node(m, RECIP_SAMPLES)).norm()).fold(f64::INFINITY, f64::min);
        if !(floor >= RECIP_FLOOR) {
            return Err(Error::SingularDenominator);
        }
        Ok(Self(Arc::new(Node::Recip(self.clone()))))
    }

    /// Pointwise value (analytic continuation off the circle).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match &*self.0 {
            Node::Ratio { num, den } => poly::eval(num, z) / poly::eval(den, z),
            Node::Inner(u) => u.value(z),
            Node::Element(f) => f.eval(z),
            Node::Sum(a, b) => a.eval(z) + b.eval(z),
            Node::Product(a, b) => a.eval(z) * b.eval(z),
            Node::Scaled(c, a) => c * a.eval(z),
            Node::Conj(a) => a.eval(1.0 / z.conj()).conj(),
            Node::Hat(a) => a.eval(z.conj()).conj(),
            Node::Flip(a) => a.eval(1.0 / z) / z,
            Node::Recip(a) => 1.0 / a.eval(z),
        }
    }

    /// True only for a literal zero leaf.
    pub fn is_literal_zero(&self) -> bool {
        matches!(&*self.0, Node::Ratio { num, .. } if num.is_empty())
    }

    /// Flattens the tree into a single `num/den` pair: common powers of `z`
    /// cancelled, denominator monic.
    pub fn to_ratio(&self) -> (Poly, Poly) {
        match &*self.0 {
            Node::Ratio { num, den } => (num.clone(), den.clone()),
            Node::Inner(u) => {
                let (n, d) = u.coefficients();
                normalize(n, d)
            }
            Node::Element(f) => element_ratio(f),
            Node::Sum(a, b) => {
                let (an, ad) = a.to_ratio();
                let (bn, bd) = b.to_ratio();
                if ad == bd {
                    return normalize(poly::add(&an, &bn), ad);
                }
                normalize(poly::add(&poly::mul(&an, &bd), &poly::mul(&bn, &ad)), poly::mul(&ad, &bd))
            }
            Node::Product(a, b) => {
                let (an, ad) = a.to_ratio();
                let (bn, bd) = b.to_ratio();
                normalize(poly::mul(&an, &bn), poly::mul(&ad, &bd))
            }
            Node::Scaled(c, a) => {
                let (n, d) = a.to_ratio();
                normalize(poly::scale(&n, *c), d)
            }
            Node::Conj(a) => {
                let (n, d) = a.to_ratio();
                if n.is_empty() {
                    return (n, vec![ONE]);
                }
                let (dn, dd) = (n.len() - 1, d.len() - 1);
                let (n, d) = (poly::reversed_conj(&n), poly::reversed_conj(&d));
                shifted(n, d, dd as i64 - dn as i64)
            }
            Node::Hat(a) => {
                let (n, d) = a.to_ratio();
                normalize(poly::conj(&n), poly::conj(&d))
            }
            Node::Flip(a) => {
                let (n, d) = a.to_ratio();
                if n.is_empty() {
                    return (n, vec![ONE]);
                }
                let (dn, dd) = (n.len() - 1, d.len() - 1);
                shifted(poly::reversed(&n), poly::reversed(&d), dd as i64 - dn as i64 - 1)
            }
            Node::Recip(a) => {
                let (n, d) = a.to_ratio();
                normalize(d, n)
            }
        }
    }

    /// Laurent coefficients `c_k` for `k` in `low..=high`, by circle means.
    pub fn fourier(&self, low: i32, high: i32) -> Result<Vec<Complex64>> {
        let q = crate::quadrature::Quadrature::default();
        let width = (high - low + 1).max(0) as usize;
        q.mean(width, |z, out| {
            let s = self.eval(z);
            let zb = z.conj();
            let mut p = zb.powi(low);
            for o in out.iter_mut() {
                *o = s * p;
                p *= zb;
            }
        })
    }
}

fn shifted(n: Poly, d: Poly, shift: i64) -> (Poly, Poly) {
    if shift >= 0 {
        normalize(poly::shift(&n, shift as usize), d)
    } else {
        normalize(n, poly::shift(&d, (-shift) as usize))
    }
}

/// Cancels common low-order zeros and makes the denominator monic.
fn normalize(num: Poly, den: Poly) -> (Poly, Poly) {
    let num = poly::trim(num);
    let den = poly::trim(den);
    if num.is_empty() {
        return (Vec::new(), vec![ONE]);
    }
    let k = poly::low_order_zeros(&num).min(poly::low_order_zeros(&den));
    let lead = *den.last().expect("nonzero denominator");
    let num = num[k..].iter().map(|c| c / lead).collect();
    let den = den[k..].iter().map(|c| c / lead).collect();
    (num, den)
}

fn element_ratio(f: &SpaceElement) -> (Poly, Poly) {
    let zeros = f.space().inner().zeros();
    let n = zeros.len();
    let den = zeros.iter().fold(vec![ONE], |acc, &a| poly::mul(&acc, &poly::linear_pole(a)));
    let mut num = Vec::new();
    for (k, &x) in f.coords().iter().enumerate() {
        if x == ZERO {
            continue;
        }
        let mut term = vec![x * (1.0 - zeros[k].norm_sqr()).sqrt()];
        for &a in &zeros[..k] {
            term = poly::mul(&term, &poly::linear_root(a));
        }
        for &a in &zeros[k + 1..n] {
            term = poly::mul(&term, &poly::linear_pole(a));
        }
        num = poly::add(&num, &term);
    }
    normalize(num, den)
}

impl<'a> Add<&'a RationalSymbol> for &'a RationalSymbol {
    type Output = RationalSymbol;
    fn add(self, rhs: &'a RationalSymbol) -> RationalSymbol {
        if self.is_literal_zero() {
            return rhs.clone();
        }
        if rhs.is_literal_zero() {
            return self.clone();
        }
        RationalSymbol(Arc::new(Node::Sum(self.clone(), rhs.clone())))
    }
}

impl<'a> Sub<&'a RationalSymbol> for &'a RationalSymbol {
    type Output = RationalSymbol;
    fn sub(self, rhs: &'a RationalSymbol) -> RationalSymbol {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RationalSymbol> for &'a RationalSymbol {
    type Output = RationalSymbol;
    fn mul(self, rhs: &'a RationalSymbol) -> RationalSymbol {
        if self.is_literal_zero() || rhs.is_literal_zero() {
            return RationalSymbol::zero();
        }
        RationalSymbol(Arc::new(Node::Product(self.clone(), rhs.clone())))
    }
}

impl Neg for &RationalSymbol {
    type Output = RationalSymbol;
    fn neg(self) -> RationalSymbol {
        self.scale(-ONE)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<RationalSymbol> for RationalSymbol {
            type Output = RationalSymbol;
            fn $m(self, rhs: RationalSymbol) -> RationalSymbol {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Debug for RationalSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Ratio { num, den } => write!(f, "Ratio({num:?} / {den:?})"),
            Node::Inner(u) => write!(f, "{u:?}"),
            Node::Element(e) => write!(f, "Element({:?})", e.coords()),
            Node::Sum(a, b) => write!(f, "({a:?} + {b:?})"),
            Node::Product(a, b) => write!(f, "({a:?} * {b:?})"),
            Node::Scaled(c, a) => write!(f, "{c}*{a:?}"),
            Node::Conj(a) => write!(f, "conj({a:?})"),
            Node::Hat(a) => write!(f, "hat({a:?})"),
            Node::Flip(a) => write!(f, "J({a:?})"),
            Node::Recip(a) => write!(f, "1/{a:?}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SymbolWire {
    Ratio { num: Vec<Pair>, den: Vec<Pair> },
    Laurent { laurent: BTreeMap<String, Pair> },
}

impl Serialize for RationalSymbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (num, den) = self.to_ratio();
        SymbolWire::Ratio { num: pairs(&num), den: pairs(&den) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalSymbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match SymbolWire::deserialize(d)? {
            SymbolWire::Ratio { num, den } => RationalSymbol::new(unpairs(&num), unpairs(&den)).map_err(D::Error::custom),
            SymbolWire::Laurent { laurent } => {
                let mut terms = Vec::with_capacity(laurent.len());
                for (k, v) in laurent {
                    let k: i32 = k.trim().parse().map_err(|_| D::Error::custom(format!("bad exponent {k:?}")))?;
                    terms.push((k, from_pair(v)));
                }
                if terms.is_empty() {
                    return Ok(RationalSymbol::zero());
                }
                let low = terms.iter().map(|t| t.0).min().unwrap();
                let high = terms.iter().map(|t| t.0).max().unwrap();
                let mut coeffs = vec![ZERO; (high - low) as usize + 1];
                for (k, c) in terms {
                    coeffs[(k - low) as usize] += c;
                }
                Ok(RationalSymbol::laurent(low, coeffs))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn circle(k: usize) -> Complex64 {
        Complex64::from_polar(1.0, 0.37 + 0.91 * k as f64)
    }

    fn same_on_circle(a: &RationalSymbol, b: &RationalSymbol, tol: f64) {
        for k in 0..12 {
            let z = circle(k);
            assert!((a.eval(z) - b.eval(z)).norm() < tol, "differ at {z}: {} vs {}", a.eval(z), b.eval(z));
        }
    }

    fn flat(s: &RationalSymbol) -> RationalSymbol {
        let (n, d) = s.to_ratio();
        RationalSymbol::new(n, d).unwrap()
    }

    #[test]
    fn rejects_poles_near_circle() {
        let err = RationalSymbol::new(vec![ONE], vec![ONE, c(-1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::PoleNearCircle { .. }));
        assert!(RationalSymbol::new(vec![ONE], vec![ONE, c(-0.5, 0.0)]).is_ok());
        assert!(RationalSymbol::new(vec![ONE], vec![]).is_err());
    }

    #[test]
    fn flip_on_monomials() {
        let one = RationalSymbol::constant(ONE);
        let (n, d) = one.flip().to_ratio();
        assert_eq!((n, d), (vec![ONE], vec![ZERO, ONE]));
        same_on_circle(&RationalSymbol::monomial(3).flip(), &RationalSymbol::monomial(-4), 1e-14);
        same_on_circle(&RationalSymbol::monomial(-2).flip(), &RationalSymbol::monomial(1), 1e-14);
        let (n, d) = RationalSymbol::monomial(-2).flip().to_ratio();
        assert_eq!((n, d), (vec![ZERO, ONE], vec![ONE]));
    }

    #[test]
    fn conj_hat_flip_agree_with_their_flattenings() {
        let s = RationalSymbol::new(vec![c(1.0, 2.0), c(0.0, -1.0), c(0.5, 0.0)], vec![ONE, c(0.3, 0.4)]).unwrap();
        let t = &s * &RationalSymbol::monomial(-3);
        for expr in [s.conj(), s.hat(), s.flip(), t.conj(), t.flip(), t.hat().conj(), (&s + &t).flip().conj()] {
            same_on_circle(&expr, &flat(&expr), 1e-12);
        }
        for k in 0..6 {
            let z = circle(k);
            assert!((s.conj().eval(z) - s.eval(z).conj()).norm() < 1e-13);
            assert!((s.hat().eval(z) - s.eval(z.conj()).conj()).norm() < 1e-13);
            assert!((s.flip().eval(z) - z.conj() * s.eval(z.conj())).norm() < 1e-13);
        }
    }

    #[test]
    fn hat_is_multiplicative_on_coefficients() {
        let f = RationalSymbol::new(vec![c(0.2, 1.0), c(1.0, -0.3)], vec![ONE, c(0.1, 0.2)]).unwrap();
        let g = RationalSymbol::laurent(-1, vec![c(0.0, 1.0), c(2.0, 0.5)]);
        let lhs = (&f * &g).hat().to_ratio();
        let rhs = (&f.hat() * &g.hat()).to_ratio();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn inner_conj_is_reciprocal_on_circle() {
        let u = InnerFunction::new(vec![c(0.3, -0.2), c(-0.5, 0.0)], c(0.0, 1.0)).unwrap();
        let ub = RationalSymbol::inner_conj(&u);
        for k in 0..8 {
            let z = circle(k);
            assert!((ub.eval(z) - u.value(z).conj()).norm() < 1e-13);
        }
        same_on_circle(&ub, &flat(&ub), 1e-12);
        same_on_circle(&RationalSymbol::inner(&u).conj(), &ub, 1e-13);
    }

    #[test]
    fn recip_certificate() {
        let s = RationalSymbol::polynomial(vec![ONE, c(-1.0, 0.0)]);
        assert!(matches!(s.recip(), Err(Error::SingularDenominator)));
        let t = RationalSymbol::polynomial(vec![c(2.0, 0.0), ONE]);
        let r = t.recip().unwrap();
        assert!((r.eval(ONE) - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn fourier_coefficients_of_laurent_data() {
        let s = RationalSymbol::laurent(-2, vec![c(1.0, 0.0), ZERO, c(0.0, 3.0), c(-1.0, 1.0)]);
        let f = s.fourier(-3, 2).unwrap();
        let want = [ZERO, c(1.0, 0.0), ZERO, c(0.0, 3.0), c(-1.0, 1.0), ZERO];
        for (a, b) in f.iter().zip(want) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn json_forms() {
        let s: RationalSymbol = serde_json::from_str(r#"{"laurent":{"-2":[1,0],"0":[0,2]}}"#).unwrap();
        let (n, d) = s.to_ratio();
        assert_eq!(n, vec![c(1.0, 0.0), ZERO, c(0.0, 2.0)]);
        assert_eq!(d, vec![ZERO, ZERO, ONE]);
        let back: RationalSymbol = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        same_on_circle(&s, &back, 1e-15);
        let r: RationalSymbol = serde_json::from_str(r#"{"num":[[1,0]],"den":[[2,0],[-1,0]]}"#).unwrap();
        assert_eq!(r.to_ratio().1, vec![c(-2.0, 0.0), ONE]);
        assert!(serde_json::from_str::<RationalSymbol>(r#"{"num":[[1,0]],"den":[[1,0],[-1,0]]}"#).is_err());
    }
}
