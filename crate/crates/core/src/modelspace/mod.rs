//! The model space `K_u` in Takenaka-Malmquist coordinates.

mod element;
mod symbol;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::blaschke::{factor, InnerFunction};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, ZERO};
use crate::operators::OperatorMatrix;
use crate::quadrature::Quadrature;

pub use element::SpaceElement;
pub use symbol::{RationalSymbol, POLE_MARGIN, RECIP_FLOOR};

/// Antilinear maps share the operator representation; the flag on the
/// matrix says whether the input is conjugated first.
pub type ConjugateLinearMap = OperatorMatrix;

pub const GRAM_TOL: f64 = 1e-10;
/// Boundary points are accepted this close to the circle.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// `K_u` with its orthonormal basis
/// `e_k(z) = sqrt(1-|a_k|^2)/(1-conj(a_k) z) * prod_{j<k} b_{a_j}(z)`.
pub struct ModelSpace {
    inner: InnerFunction,
    quad: Quadrature,
    gram_residual: f64,
}

impl fmt::Debug for ModelSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelSpace").field("inner", &self.inner).field("dim", &self.dim()).finish()
    }
}

impl ModelSpace {
    pub fn new(inner: InnerFunction) -> Result<Arc<Self>> {
        Self::with_quadrature(inner, Quadrature::default())
    }

    /// Builds the basis and certifies its Gram matrix.
    pub fn with_quadrature(inner: InnerFunction, quad: Quadrature) -> Result<Arc<Self>> {
        let mut space = Self { inner, quad, gram_residual: 0.0 };
        let gram = space.gram()?;
        let residual = gram.max_dist(&CMatrix::identity(space.dim()));
        if residual > GRAM_TOL {
            return Err(Error::IdentityViolation { what: "basis Gram matrix", residual });
        }
        space.gram_residual = residual;
        Ok(Arc::new(space))
    }

    pub fn inner(&self) -> &InnerFunction {
        &self.inner
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quad
    }

    pub fn dim(&self) -> usize {
        self.inner.degree()
    }

    pub fn gram_residual(&self) -> f64 {
        self.gram_residual
    }

    /// Same generator data (zero list in order, constant).
    pub fn same_as(&self, other: &Self) -> bool {
        self.inner.same_data(&other.inner)
    }

    /// `K_{hat u}`, sharing the quadrature settings.
    pub fn hat_space(self: &Arc<Self>) -> Result<Arc<Self>> {
        let h = self.inner.hat();
        if h.same_data(&self.inner) {
            return Ok(self.clone());
        }
        Self::with_quadrature(h, self.quad)
    }

    /// A space with the same generator and different quadrature settings.
    pub fn requadrature(&self, quad: Quadrature) -> Result<Arc<Self>> {
        Self::with_quadrature(self.inner.clone(), quad)
    }

    /// Writes `e_k(z)` into `out`.
    pub fn basis_values(&self, z: Complex64, out: &mut [Complex64]) {
        let mut prefix = Complex64::new(1.0, 0.0);
        for (k, &a) in self.inner.zeros().iter().enumerate() {
            out[k] = prefix * (1.0 - a.norm_sqr()).sqrt() / (1.0 - a.conj() * z);
            prefix *= factor(a, z);
        }
    }

    pub fn basis_at(&self, z: Complex64) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.dim()];
        self.basis_values(z, &mut out);
        out
    }

    pub fn gram(&self) -> Result<CMatrix> {
        let n = self.dim();
        let mut e = vec![ZERO; n];
        let v = self.quad.mean(n * n, |z, out| {
            self.basis_values(z, &mut e);
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] = e[j] * e[i].conj();
                }
            }
        })?;
        Ok(CMatrix::from_fn(n, n, |i, j| v[i * n + j]))
    }

    pub fn element(self: &Arc<Self>, coords: Vec<Complex64>) -> Result<SpaceElement> {
        SpaceElement::new(self.clone(), coords)
    }

    pub fn zero_element(self: &Arc<Self>) -> SpaceElement {
        SpaceElement::new(self.clone(), vec![ZERO; self.dim()]).expect("length matches")
    }

    pub fn basis_element(self: &Arc<Self>, k: usize) -> SpaceElement {
        let mut c = vec![ZERO; self.dim()];
        c[k] = Complex64::new(1.0, 0.0);
        SpaceElement::new(self.clone(), c).expect("length matches")
    }

    /// `k_lambda(z) = (1 - conj(u(lambda)) u(z)) / (1 - conj(lambda) z)`, `|lambda| < 1`.
    pub fn kernel(self: &Arc<Self>, lambda: Complex64) -> Result<SpaceElement> {
        if !(lambda.norm() < 1.0) {
            return Err(Error::OutOfDomain { point: lambda, reason: "kernel needs |lambda| < 1" });
        }
        Ok(self.kernel_unchecked(lambda))
    }

    /// Boundary kernel `k_eta`, the continuous extension of the interior
    /// kernel to `|eta| = 1`.
    pub fn boundary_kernel(self: &Arc<Self>, eta: Complex64) -> Result<SpaceElement> {
        if (eta.norm() - 1.0).abs() > BOUNDARY_TOL {
            return Err(Error::OutOfDomain { point: eta, reason: "boundary kernel needs |eta| = 1" });
        }
        Ok(self.kernel_unchecked(eta))
    }

    fn kernel_unchecked(self: &Arc<Self>, lambda: Complex64) -> SpaceElement {
        let coords = self.basis_at(lambda).into_iter().map(|e| e.conj()).collect();
        SpaceElement::new(self.clone(), coords).expect("length matches")
    }

    /// `(u(z) - u(lambda)) / (z - lambda)` for `|lambda| <= 1`.
    pub fn conj_kernel(self: &Arc<Self>, lambda: Complex64) -> Result<SpaceElement> {
        if lambda.norm() > 1.0 + BOUNDARY_TOL {
            return Err(Error::OutOfDomain { point: lambda, reason: "conjugate kernel needs |lambda| <= 1" });
        }
        let u = &self.inner;
        let ul = u.value(lambda);
        let du = u.derivative(lambda)?;
        let n = self.dim();
        let mut e = vec![ZERO; n];
        let coords = self.quad.mean(n, |z, out| {
            let d = z - lambda;
            let q = if d.norm() < 1e-9 { du } else { (u.value(z) - ul) / d };
            self.basis_values(z, &mut e);
            for (o, ei) in out.iter_mut().zip(&e) {
                *o = q * ei.conj();
            }
        })?;
        SpaceElement::new(self.clone(), coords)
    }

    /// `P_u phi` via the orthonormal expansion `sum_k <phi, e_k> e_k`.
    pub fn project(self: &Arc<Self>, phi: &RationalSymbol) -> Result<SpaceElement> {
        let n = self.dim();
        let mut e = vec![ZERO; n];
        let coords = self.quad.mean(n, |z, out| {
            let p = phi.eval(z);
            self.basis_values(z, &mut e);
            for (o, ei) in out.iter_mut().zip(&e) {
                *o = p * ei.conj();
            }
        })?;
        SpaceElement::new(self.clone(), coords)
    }

    /// `<f, g>` over the circle.
    pub fn pairing(&self, f: &RationalSymbol, g: &RationalSymbol) -> Result<Complex64> {
        inner_product_with(&self.quad, f, g)
    }

    /// The conjugation `C_u f = conj(z f) u` as an antilinear matrix.
    pub fn conjugation_c(self: &Arc<Self>) -> Result<ConjugateLinearMap> {
        let n = self.dim();
        let u = &self.inner;
        let mut e = vec![ZERO; n];
        let v = self.quad.mean(n * n, |z, out| {
            self.basis_values(z, &mut e);
            let uz = u.value(z);
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] = (z * e[j]).conj() * uz * e[i].conj();
                }
            }
        })?;
        OperatorMatrix::new(CMatrix::from_fn(n, n, |i, j| v[i * n + j]), self.clone(), self.clone(), true)
    }

    /// `U f(z) = conj(f(conj z))` from `K_u` onto `K_{hat u}`.
    pub fn conjugation_u(self: &Arc<Self>) -> Result<ConjugateLinearMap> {
        let target = self.hat_space()?;
        let n = self.dim();
        let mut e = vec![ZERO; n];
        let mut h = vec![ZERO; n];
        let v = self.quad.mean(n * n, |z, out| {
            self.basis_values(z.conj(), &mut e);
            target.basis_values(z, &mut h);
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] = (e[j] * h[i]).conj();
                }
            }
        })?;
        OperatorMatrix::new(CMatrix::from_fn(n, n, |i, j| v[i * n + j]), self.clone(), target, true)
    }
}

/// `(1/2pi) int f conj(g)` with the given quadrature.
pub fn inner_product_with(q: &Quadrature, f: &RationalSymbol, g: &RationalSymbol) -> Result<Complex64> {
    q.mean_scalar(|z| f.eval(z) * g.eval(z).conj())
}

/// `(1/2pi) int f conj(g)` with default quadrature settings.
pub fn inner_product(f: &RationalSymbol, g: &RationalSymbol) -> Result<Complex64> {
    inner_product_with(&Quadrature::default(), f, g)
}

/// The flip `J phi(z) = conj(z) phi(conj z)`.
pub fn flip_j(phi: &RationalSymbol) -> RationalSymbol {
    phi.flip()
}
