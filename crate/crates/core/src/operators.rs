//! Matrix realizations: compressed shifts, Clark perturbations, truncated
//! Toeplitz and Hankel operators, Sedlock-class members, functional calculus.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::blaschke::{ClarkData, ExtendedScalar};
use crate::error::{Error, Result};
use crate::json::matrix_rows;
use crate::linalg::{CMatrix, ONE, ZERO};
use crate::modelspace::{ModelSpace, RationalSymbol, SpaceElement};

/// `|alpha|` within this of 1 is treated as unimodular.
pub const UNIT_CIRCLE_TOL: f64 = 1e-12;
pub const SINGULAR_DENOMINATOR_TOL: f64 = 1e-12;

/// A matrix between two model spaces. When `antilinear` is set the operator
/// is `x -> M conj(x)`.
#[derive(Clone)]
pub struct OperatorMatrix {
    matrix: CMatrix,
    domain: Arc<ModelSpace>,
    codomain: Arc<ModelSpace>,
    antilinear: bool,
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorMatrix").field("antilinear", &self.antilinear).field("matrix", &self.matrix).finish()
    }
}

impl OperatorMatrix {
    pub fn new(matrix: CMatrix, domain: Arc<ModelSpace>, codomain: Arc<ModelSpace>, antilinear: bool) -> Result<Self> {
        if matrix.rows() != codomain.dim() || matrix.cols() != domain.dim() {
            return Err(Error::Input(format!(
                "matrix is {}x{} but spaces need {}x{}",
                matrix.rows(),
                matrix.cols(),
                codomain.dim(),
                domain.dim()
            )));
        }
        Ok(Self { matrix, domain, codomain, antilinear })
    }

    pub fn linear(matrix: CMatrix, domain: Arc<ModelSpace>, codomain: Arc<ModelSpace>) -> Result<Self> {
        Self::new(matrix, domain, codomain, false)
    }

    pub fn identity(space: &Arc<ModelSpace>) -> Self {
        Self { matrix: CMatrix::identity(space.dim()), domain: space.clone(), codomain: space.clone(), antilinear: false }
    }

    pub fn zero(domain: &Arc<ModelSpace>, codomain: &Arc<ModelSpace>) -> Self {
        Self { matrix: CMatrix::zeros(codomain.dim(), domain.dim()), domain: domain.clone(), codomain: codomain.clone(), antilinear: false }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn domain(&self) -> &Arc<ModelSpace> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<ModelSpace> {
        &self.codomain
    }

    pub fn is_antilinear(&self) -> bool {
        self.antilinear
    }

    pub fn is_endomorphism(&self) -> bool {
        self.domain.same_as(&self.codomain)
    }

    pub fn apply(&self, x: &SpaceElement) -> Result<SpaceElement> {
        if !x.space().same_as(&self.domain) {
            return Err(Error::SpaceMismatch);
        }
        let input: Vec<Complex64> = if self.antilinear { x.coords().iter().map(Complex64::conj).collect() } else { x.coords().to_vec() };
        SpaceElement::new(self.codomain.clone(), self.matrix.mul_vec(&input))
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if !self.domain.same_as(&other.codomain) {
            return Err(Error::SpaceMismatch);
        }
        let right = if self.antilinear { other.matrix.conj() } else { other.matrix.clone() };
        Ok(Self {
            matrix: &self.matrix * &right,
            domain: other.domain.clone(),
            codomain: self.codomain.clone(),
            antilinear: self.antilinear ^ other.antilinear,
        })
    }

    /// Hilbert-space adjoint; for antilinear maps `<Ax, y> = conj(<x, A* y>)`.
    pub fn adjoint(&self) -> Self {
        Self {
            matrix: if self.antilinear { self.matrix.transpose() } else { self.matrix.adjoint() },
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            antilinear: self.antilinear,
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.domain.same_as(&other.domain) && self.codomain.same_as(&other.codomain) && self.antilinear == other.antilinear {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self { matrix: &self.matrix + &other.matrix, ..self.clone() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self { matrix: &self.matrix - &other.matrix, ..self.clone() })
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self { matrix: self.matrix.scale(k), ..self.clone() }
    }

    pub fn with_matrix(&self, matrix: CMatrix) -> Result<Self> {
        Self::new(matrix, self.domain.clone(), self.codomain.clone(), self.antilinear)
    }

    /// Frobenius distance; shapes and flags must agree.
    pub fn dist(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.matrix.dist(&other.matrix))
    }

    pub fn max_dist(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.matrix.max_dist(&other.matrix))
    }

    pub fn norm(&self) -> f64 {
        self.matrix.frobenius_norm()
    }

    pub fn inverse(&self, max_condition: f64) -> Result<Self> {
        Ok(Self {
            matrix: if self.antilinear { self.matrix.inverse(max_condition)?.conj() } else { self.matrix.inverse(max_condition)? },
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            antilinear: self.antilinear,
        })
    }
}

impl Serialize for OperatorMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("OperatorMatrix", 4)?;
        st.serialize_field("domain", self.domain.inner())?;
        st.serialize_field("codomain", self.codomain.inner())?;
        st.serialize_field("antilinear", &self.antilinear)?;
        st.serialize_field("matrix", &matrix_rows(&self.matrix))?;
        st.end()
    }
}

/// `f ⊗ g : h -> <h, g> f`
pub fn rank_one(f: &SpaceElement, g: &SpaceElement) -> OperatorMatrix {
    OperatorMatrix {
        matrix: CMatrix::outer(f.coords(), g.coords()),
        domain: g.space().clone(),
        codomain: f.space().clone(),
        antilinear: false,
    }
}

/// Toeplitz (`hankel = false`) or Hankel compressions from `u` to `v` of
/// `count` symbols at once; `symbols(z, out)` writes their values at `z`.
pub fn compressions<F>(u: &Arc<ModelSpace>, v: &Arc<ModelSpace>, count: usize, hankel: bool, mut symbols: F) -> Result<Vec<OperatorMatrix>>
where
    F: FnMut(Complex64, &mut [Complex64]),
{
    let (m, n) = (v.dim(), u.dim());
    let mut eu = vec![ZERO; n];
    let mut ev = vec![ZERO; m];
    let mut sv = vec![ZERO; count];
    let vals = u.quadrature().mean(count * m * n, |z, out| {
        symbols(z, &mut sv);
        u.basis_values(z, &mut eu);
        let w = if hankel { z.conj() } else { z };
        v.basis_values(w, &mut ev);
        for (k, &s) in sv.iter().enumerate() {
            let p = if hankel { s * z } else { s };
            for i in 0..m {
                let ci = ev[i].conj() * p;
                let row = &mut out[(k * m + i) * n..(k * m + i + 1) * n];
                for (o, e) in row.iter_mut().zip(&eu) {
                    *o = ci * e;
                }
            }
        }
    })?;
    (0..count).map(|k| OperatorMatrix::linear(CMatrix::from_fn(m, n, |i, j| vals[(k * m + i) * n + j]), u.clone(), v.clone())).collect()
}

fn single(u: &Arc<ModelSpace>, v: &Arc<ModelSpace>, phi: &RationalSymbol, hankel: bool) -> Result<OperatorMatrix> {
    let mut ops = compressions(u, v, 1, hankel, |z, out| out[0] = phi.eval(z))?;
    Ok(ops.remove(0))
}

/// `A_phi^{u,v} f = P_v(phi f)`, entries `<phi e_j^u, e_i^v>`.
pub fn tto_matrix(u: &Arc<ModelSpace>, v: &Arc<ModelSpace>, phi: &RationalSymbol) -> Result<OperatorMatrix> {
    single(u, v, phi, false)
}

/// `B_phi^{u,v} f = P_v J (I - P)(phi f)`, entries
/// `<phi e_j^u, J e_i^v>` since `J e_i^v` already lies in `(I - P) L^2`.
pub fn tho_matrix(u: &Arc<ModelSpace>, v: &Arc<ModelSpace>, phi: &RationalSymbol) -> Result<OperatorMatrix> {
    single(u, v, phi, true)
}

/// `S_u = A_z^u`.
pub fn shift(space: &Arc<ModelSpace>) -> Result<OperatorMatrix> {
    tto_matrix(space, space, &RationalSymbol::monomial(1))
}

pub fn shift_adj(space: &Arc<ModelSpace>) -> Result<OperatorMatrix> {
    Ok(shift(space)?.adjoint())
}

/// `(k_0 ⊗ k_0, k~_0 ⊗ k~_0)`, the defects `I - S S*` and `I - S* S`.
pub fn defects(space: &Arc<ModelSpace>) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let k0 = space.kernel(ZERO)?;
    let kt0 = space.conj_kernel(ZERO)?;
    Ok((rank_one(&k0, &k0), rank_one(&kt0, &kt0)))
}

/// `alpha / (1 - alpha conj(u(0)))`, the rank-one coefficient of `S_u^alpha`.
pub fn clark_coefficient(space: &ModelSpace, alpha: Complex64) -> Result<Complex64> {
    let d = ONE - alpha * space.inner().value(ZERO).conj();
    if d.norm() < SINGULAR_DENOMINATOR_TOL {
        return Err(Error::SingularDenominator);
    }
    Ok(alpha / d)
}

/// `S_u^alpha = S_u + alpha/(1 - alpha conj(u(0))) k_0 ⊗ k~_0`.
pub fn clark_perturbation(space: &Arc<ModelSpace>, alpha: Complex64) -> Result<OperatorMatrix> {
    let g = clark_coefficient(space, alpha)?;
    let s = shift(space)?;
    let k0 = space.kernel(ZERO)?;
    let kt0 = space.conj_kernel(ZERO)?;
    s.add(&rank_one(&k0, &kt0).scale(g))
}

/// `(B_phi^{u,v})* == B_{hat phi}^{v,u}` within `1e-9`.
pub fn adjoint_tho_check(u: &Arc<ModelSpace>, v: &Arc<ModelSpace>, phi: &RationalSymbol) -> Result<bool> {
    let lhs = tho_matrix(u, v, phi)?.adjoint();
    let rhs = tho_matrix(v, u, &phi.hat())?;
    Ok(lhs.max_dist(&rhs)? < 1e-9)
}

/// The Sedlock-class symbol `phi + alpha conj(S C phi) + c`, or
/// `conj(phi) + c` for `alpha = ∞`.
pub fn sedlock_symbol(alpha: ExtendedScalar, phi: &SpaceElement, c: Complex64) -> Result<RationalSymbol> {
    let base = match alpha {
        ExtendedScalar::Infinity => phi.to_symbol().conj(),
        ExtendedScalar::Finite(a) => {
            let space = phi.space();
            let scphi = shift(space)?.apply(&space.conjugation_c()?.apply(phi)?)?;
            &phi.to_symbol() + &scphi.to_symbol().conj().scale(a)
        }
    };
    Ok(&base + &RationalSymbol::constant(c))
}

pub fn sedlock_op(alpha: ExtendedScalar, phi: &SpaceElement, c: Complex64) -> Result<OperatorMatrix> {
    let space = phi.space();
    tto_matrix(space, space, &sedlock_symbol(alpha, phi, c)?)
}

/// `Psi(S_u^alpha)` (or its adjoint-side analogue for `|alpha| > 1`).
pub fn functional_calculus(space: &Arc<ModelSpace>, alpha: ExtendedScalar, psi: &RationalSymbol) -> Result<OperatorMatrix> {
    let u = RationalSymbol::inner(space.inner());
    match alpha {
        ExtendedScalar::Infinity => tto_matrix(space, space, &psi.conj()),
        ExtendedScalar::Finite(a) if (a.norm() - 1.0).abs() <= UNIT_CIRCLE_TOL => {
            let clark = ClarkData::compute(space, a)?;
            let mut m = CMatrix::zeros(space.dim(), space.dim());
            for &zeta in &clark.points {
                let k = space.boundary_kernel(zeta)?;
                let p = CMatrix::outer(k.coords(), k.coords()).scale_re(1.0 / k.norm_sqr());
                m = &m + &p.scale(psi.eval(zeta));
            }
            OperatorMatrix::linear(m, space.clone(), space.clone())
        }
        ExtendedScalar::Finite(a) if a.norm() < 1.0 => {
            // Psi / (1 - alpha conj(u)) = Psi u / (u - alpha) on the circle
            let den = (&u - &RationalSymbol::constant(a)).recip()?;
            tto_matrix(space, space, &(&(psi * &u) * &den))
        }
        ExtendedScalar::Finite(a) => {
            let den = (&RationalSymbol::constant(a) - &u).recip()?;
            tto_matrix(space, space, &(&psi.conj().scale(a) * &den))
        }
    }
}

/// `D = C_u U`, a linear unitary involution when `u` is real symmetric.
pub fn dee(space: &Arc<ModelSpace>) -> Result<OperatorMatrix> {
    if !space.inner().is_real_symmetric() {
        return Err(Error::NotRealSymmetric);
    }
    space.conjugation_c()?.compose(&space.conjugation_u()?)
}
