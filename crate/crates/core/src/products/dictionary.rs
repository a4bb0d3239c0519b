//! The intertwining dictionary between the Toeplitz and Hankel worlds:
//! conjugations by `C` and `U` turn one kind of truncated operator into
//! the other with an explicitly transformed symbol.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::blaschke::ExtendedScalar;
use crate::classify::{is_tho, is_tto, sedlock_class, MEMBERSHIP_TOL};
use crate::error::Result;
use crate::modelspace::{ModelSpace, RationalSymbol, SpaceElement};
use crate::operators::{clark_perturbation, dee, sedlock_op, tho_matrix, tto_matrix, OperatorMatrix};

/// One operator identity, both sides built independently.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
    pub max_residual: f64,
}

impl IdentityReport {
    fn new(checks: Vec<IdentityCheck>) -> Self {
        let max_residual = checks.iter().map(|c| c.residual).fold(0.0, f64::max);
        Self { checks, max_residual }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual < tol
    }
}

fn check(name: &'static str, lhs: &OperatorMatrix, rhs: &OperatorMatrix) -> Result<IdentityCheck> {
    if lhs.is_antilinear() != rhs.is_antilinear() {
        return Ok(IdentityCheck { name, residual: f64::INFINITY });
    }
    Ok(IdentityCheck { name, residual: lhs.max_dist(rhs)? })
}

fn inner_sym(space: &ModelSpace) -> RationalSymbol {
    RationalSymbol::inner(space.inner())
}

/// `U : K_{hat u} -> K_u`, the inverse of `space.conjugation_u()`.
fn u_back(space: &Arc<ModelSpace>) -> Result<OperatorMatrix> {
    space.hat_space()?.conjugation_u()
}

/// The eight conjugation identities for `A = A_φ^{u,v}` and `B = B_φ^{u,v}`.
pub fn equivalence_transforms(u: &Arc<ModelSpace>, v: &Arc<ModelSpace>, phi: &RationalSymbol) -> Result<IdentityReport> {
    let (uh, vh) = (u.hat_space()?, v.hat_space()?);
    let (cu, cv) = (u.conjugation_c()?, v.conjugation_c()?);
    let uv = v.conjugation_u()?;
    let ub = u_back(u)?;
    let a = tto_matrix(u, v, phi)?;
    let b = tho_matrix(u, v, phi)?;
    let (su, sv) = (inner_sym(u), inner_sym(v));
    let svh = inner_sym(&vh);
    let phat = phi.hat();
    let checks = vec![
        check(
            "C_v A C_u = A^{u,v}[conj(u) v conj(phi)]",
            &cv.compose(&a)?.compose(&cu)?,
            &tto_matrix(u, v, &(&(&su.conj() * &sv) * &phi.conj()))?,
        )?,
        check("U A U = A^{hat u,hat v}[hat phi]", &uv.compose(&a)?.compose(&ub)?, &tto_matrix(&uh, &vh, &phat)?)?,
        check(
            "C_v B C_u = B^{u,v}[conj(u hat(v) phi)]",
            &cv.compose(&b)?.compose(&cu)?,
            &tho_matrix(u, v, &(&(&su * &svh) * phi).conj())?,
        )?,
        check("U B U = B^{hat u,hat v}[hat phi]", &uv.compose(&b)?.compose(&ub)?, &tho_matrix(&uh, &vh, &phat)?)?,
        check("C_v A U = B^{hat u,v}[conj(hat v) hat phi]", &cv.compose(&a)?.compose(&ub)?, &tho_matrix(&uh, v, &(&svh.conj() * &phat))?)?,
        check("U A C_u = B^{u,hat v}[conj(u) conj(phi)]", &uv.compose(&a)?.compose(&cu)?, &tho_matrix(u, &vh, &(&su * phi).conj())?)?,
        check("U B C_u = A^{u,hat v}[conj(u phi)]", &uv.compose(&b)?.compose(&cu)?, &tto_matrix(u, &vh, &(&su * phi).conj())?)?,
        check("C_v B U = A^{hat u,v}[v hat phi]", &cv.compose(&b)?.compose(&ub)?, &tto_matrix(&uh, v, &(&sv * &phat))?)?,
    ];
    Ok(IdentityReport::new(checks))
}

/// Membership before and after one conjugation transport.
#[derive(Debug, Clone, Serialize)]
pub struct TransportCheck {
    pub name: &'static str,
    pub before: bool,
    pub after: bool,
}

/// The six membership transports for operators `a`, `b : K_u -> K_v`
/// (tested for Toeplitz and Hankel membership respectively).
pub fn transports(a: &OperatorMatrix, b: &OperatorMatrix, tol: f64) -> Result<Vec<TransportCheck>> {
    let (u, v) = (a.domain().clone(), a.codomain().clone());
    let (cu, cv) = (u.conjugation_c()?, v.conjugation_c()?);
    let uv = v.conjugation_u()?;
    let ub = u_back(&u)?;
    let a_in = is_tto(a, tol)?.member;
    let b_in = is_tho(b, tol)?.member;
    Ok(vec![
        TransportCheck { name: "T(u,v) under C_v . C_u", before: a_in, after: is_tto(&cv.compose(a)?.compose(&cu)?, tol)?.member },
        TransportCheck { name: "H(u,v) under C_v . C_u", before: b_in, after: is_tho(&cv.compose(b)?.compose(&cu)?, tol)?.member },
        TransportCheck { name: "T(u,v) under U . U", before: a_in, after: is_tto(&uv.compose(a)?.compose(&ub)?, tol)?.member },
        TransportCheck { name: "H(u,v) under U . U", before: b_in, after: is_tho(&uv.compose(b)?.compose(&ub)?, tol)?.member },
        TransportCheck { name: "T(u,v) under C_v . U into H", before: a_in, after: is_tho(&cv.compose(a)?.compose(&ub)?, tol)?.member },
        TransportCheck { name: "H(u,v) under U . C_u into T", before: b_in, after: is_tto(&uv.compose(b)?.compose(&cu)?, tol)?.member },
    ])
}

/// Conjugation identities for the Clark family and class transport by `U`.
#[derive(Debug, Clone, Serialize)]
pub struct ClassTransportReport {
    pub identities: IdentityReport,
    /// Class found for `U A U` on `K_{hat u}` for a member `A` of the class
    /// of `alpha`; expected `conj(alpha)`.
    pub transported_alpha: Option<ExtendedScalar>,
    pub transport_ok: bool,
}

pub fn clark_conjugation_checks(
    u: &Arc<ModelSpace>,
    alpha: ExtendedScalar,
    phi: &SpaceElement,
    c: Complex64,
) -> Result<ClassTransportReport> {
    let uh = u.hat_space()?;
    let uu = u.conjugation_u()?;
    let ub = u_back(u)?;
    let cu = u.conjugation_c()?;
    let mut checks = Vec::new();
    if let ExtendedScalar::Finite(a) = alpha {
        let sh = clark_perturbation(&uh, a)?;
        let s = clark_perturbation(u, a)?;
        checks.push(check("U S_{hat u}^a U = S_u^{conj a}", &ub.compose(&sh)?.compose(&uu)?, &clark_perturbation(u, a.conj())?)?);
        checks.push(check("C_u S_u^a C_u = (S_u^a)*", &cu.compose(&s)?.compose(&cu)?, &s.adjoint())?);
    }
    let cuh = uh.conjugation_c()?;
    checks.push(check("C_u U = B^{hat u,u}[conj(hat u)]", &cu.compose(&ub)?, &tho_matrix(&uh, u, &inner_sym(&uh).conj())?)?);
    checks.push(check("U C_u = B^{u,hat u}[conj(u)]", &uu.compose(&cu)?, &tho_matrix(u, &uh, &inner_sym(u).conj())?)?);
    checks.push(check("C_{hat u} U = U C_u", &cuh.compose(&uu)?, &uu.compose(&cu)?)?);
    checks.push(check("C_u U = U C_{hat u}", &cu.compose(&ub)?, &ub.compose(&cuh)?)?);
    let a = sedlock_op(alpha, phi, c)?;
    let moved = uu.compose(&a)?.compose(&ub)?;
    let class = sedlock_class(&moved, MEMBERSHIP_TOL)?;
    let transport_ok = class.contains(alpha.conj(), 1e-6);
    Ok(ClassTransportReport { identities: IdentityReport::new(checks), transported_alpha: class.alpha, transport_ok })
}

/// Identities around `D = C_u U` for real-symmetric `u`, and the two
/// mixed-space compositions valid for every `u`, `v`.
pub fn dee_identity_checks(
    u: &Arc<ModelSpace>,
    v: &Arc<ModelSpace>,
    phi: &RationalSymbol,
    alpha: Option<Complex64>,
) -> Result<IdentityReport> {
    let vh = v.hat_space()?;
    let uh = u.hat_space()?;
    let b = tho_matrix(u, v, phi)?;
    let phat = phi.hat();
    let mut checks = vec![
        check(
            "C_{hat v} U B^{u,v} = A^{u,hat v}[hat(v) phi]",
            &vh.conjugation_c()?.compose(&v.conjugation_u()?)?.compose(&b)?,
            &tto_matrix(u, &vh, &(&inner_sym(&vh) * phi))?,
        )?,
        check(
            "B^{u,v} C_u U = A^{hat u,v}[conj(hat u hat phi)]",
            &b.compose(&u.conjugation_c()?)?.compose(&u_back(u)?)?,
            &tto_matrix(&uh, v, &(&inner_sym(&uh) * &phat).conj())?,
        )?,
    ];
    if u.inner().is_real_symmetric() {
        let d = dee(u)?;
        let bu = tho_matrix(u, u, phi)?;
        let su = inner_sym(u);
        checks.push(check("D = B^u[conj u]", &d, &tho_matrix(u, u, &su.conj())?)?);
        checks.push(check("D^2 = I", &d.compose(&d)?, &OperatorMatrix::identity(u))?);
        checks.push(check("D = D*", &d, &d.adjoint())?);
        checks.push(check("D B^u = A^u[u phi]", &d.compose(&bu)?, &tto_matrix(u, u, &(&su * phi))?)?);
        checks.push(check("B^u D = A^u[conj(u hat phi)]", &bu.compose(&d)?, &tto_matrix(u, u, &(&su * &phat).conj())?)?);
        if let Some(a) = alpha {
            let lhs = d.compose(&clark_perturbation(u, a)?)?;
            let rhs = clark_perturbation(u, a.conj())?.adjoint().compose(&d)?;
            checks.push(check("D S^a = (S^{conj a})* D", &lhs, &rhs)?);
        }
    }
    Ok(IdentityReport::new(checks))
}

/// Four formulations of one product-membership question, evaluated
/// independently.
#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub memberships: [bool; 4],
    pub agree: bool,
}

impl ChainReport {
    fn new(memberships: [bool; 4]) -> Self {
        Self { agree: memberships.iter().all(|&m| m == memberships[0]), memberships }
    }
}

/// `B^{v,w}_{φ1} B^{u,v}_{φ2} ∈ H(u,w)` and its three conjugated forms.
pub fn hankel_product_chain(
    u: &Arc<ModelSpace>,
    v: &Arc<ModelSpace>,
    w: &Arc<ModelSpace>,
    phi1: &RationalSymbol,
    phi2: &RationalSymbol,
    tol: f64,
) -> Result<ChainReport> {
    let (uh, vh, wh) = (u.hat_space()?, v.hat_space()?, w.hat_space()?);
    let (su, sv, sw, svh) = (inner_sym(u), inner_sym(v), inner_sym(w), inner_sym(&vh));
    let (p1h, p2h) = (phi1.hat(), phi2.hat());
    let p1 = tho_matrix(v, w, phi1)?.compose(&tho_matrix(u, v, phi2)?)?;
    let p2 = tto_matrix(&vh, w, &(&sw * &p1h))?.compose(&tto_matrix(u, &vh, &(&su * phi2).conj())?)?;
    let a1 = tto_matrix(v, &wh, &(&sv * phi1).conj())?;
    let p3 = a1.compose(&tto_matrix(&uh, v, &(&sv * &p2h))?)?;
    let p4 = a1.compose(&tho_matrix(u, v, &(&(&su * &svh) * phi2).conj())?)?;
    Ok(ChainReport::new([is_tho(&p1, tol)?.member, is_tho(&p2, tol)?.member, is_tho(&p3, tol)?.member, is_tto(&p4, tol)?.member]))
}

/// The analogous chain for `B^{v,w}_{φ1} B^{u,v}_{φ2} ∈ T(u,w)`.
pub fn toeplitz_product_chain(
    u: &Arc<ModelSpace>,
    v: &Arc<ModelSpace>,
    w: &Arc<ModelSpace>,
    phi1: &RationalSymbol,
    phi2: &RationalSymbol,
    tol: f64,
) -> Result<ChainReport> {
    let (uh, vh, wh) = (u.hat_space()?, v.hat_space()?, w.hat_space()?);
    let (su, sv, sw, swh) = (inner_sym(u), inner_sym(v), inner_sym(w), inner_sym(&wh));
    let (p1h, p2h) = (phi1.hat(), phi2.hat());
    let p1 = tho_matrix(v, w, phi1)?.compose(&tho_matrix(u, v, phi2)?)?;
    let p2 = tto_matrix(&vh, w, &(&sw * &p1h))?.compose(&tto_matrix(u, &vh, &(&su * phi2).conj())?)?;
    let right = tto_matrix(&uh, v, &(&sv * &p2h))?;
    let p3 = tto_matrix(v, &wh, &(&sv * phi1).conj())?.compose(&right)?;
    let p4 = tho_matrix(v, w, &(&(&sv * &swh) * phi1).conj())?.compose(&right)?;
    Ok(ChainReport::new([is_tto(&p1, tol)?.member, is_tto(&p2, tol)?.member, is_tto(&p3, tol)?.member, is_tho(&p4, tol)?.member]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::InnerFunction;
    use crate::linalg::ZERO;
    use crate::operators::rank_one;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn space(zeros: &[(f64, f64)], constant: Complex64) -> Arc<ModelSpace> {
        ModelSpace::new(InnerFunction::new(zeros.iter().map(|&(a, b)| c(a, b)).collect(), constant).unwrap()).unwrap()
    }

    fn z(n: usize) -> Arc<ModelSpace> {
        ModelSpace::new(InnerFunction::monomial(n)).unwrap()
    }

    #[test]
    fn eight_identities_on_monomials() {
        let r = equivalence_transforms(&z(2), &z(2), &RationalSymbol::monomial(-1)).unwrap();
        assert!(r.passes(1e-10), "{r:?}");
        let phi = &RationalSymbol::monomial(-2) + &RationalSymbol::monomial(1);
        let r = equivalence_transforms(&z(2), &z(3), &phi).unwrap();
        assert!(r.passes(1e-9), "{r:?}");
        let r = equivalence_transforms(&z(2), &z(3), &RationalSymbol::zero()).unwrap();
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn eight_identities_on_generic_spaces() {
        let u = space(&[(0.3, 0.5), (-0.6, 0.1), (0.2, -0.7)], c(0.0, 1.0));
        let v = space(&[(0.4, -0.2), (-0.1, 0.6)], c(0.6, 0.8));
        let phi = RationalSymbol::new(vec![c(0.3, 1.0), c(-0.5, 0.2), c(0.0, 0.7)], vec![ZERO, ONE_C, c(0.2, -0.3)]).unwrap();
        let r = equivalence_transforms(&u, &v, &phi).unwrap();
        assert!(r.passes(1e-9), "{r:?}");
    }

    const ONE_C: Complex64 = Complex64::new(1.0, 0.0);

    #[test]
    fn transports_agree() {
        let u = space(&[(0.3, 0.5), (-0.6, 0.1)], c(0.0, 1.0));
        let v = space(&[(0.4, -0.2), (-0.1, 0.6), (0.5, 0.0)], c(1.0, 0.0));
        let phi = RationalSymbol::laurent(-2, vec![c(0.3, 0.1), c(1.0, 0.0), c(0.2, 0.5), c(0.0, -0.4)]);
        let a = tto_matrix(&u, &v, &phi).unwrap();
        let b = tho_matrix(&u, &v, &phi).unwrap();
        for t in transports(&a, &b, MEMBERSHIP_TOL).unwrap() {
            assert!(t.before && t.after, "{t:?}");
        }
        let f = v.element(vec![c(1.0, 0.0), c(0.3, -0.2), c(0.0, 1.0)]).unwrap();
        let g = u.element(vec![c(0.2, 0.9), c(-1.0, 0.0)]).unwrap();
        let noise = rank_one(&f, &g);
        let (a2, b2) = (a.add(&noise).unwrap(), b.add(&noise).unwrap());
        for t in transports(&a2, &b2, MEMBERSHIP_TOL).unwrap() {
            assert!(!t.before && !t.after, "{t:?}");
        }
    }

    #[test]
    fn clark_family_conjugations() {
        let u = z(2);
        let phi = u.element(vec![c(0.4, 0.2), c(-0.3, 0.6)]).unwrap();
        let r = clark_conjugation_checks(&u, ExtendedScalar::finite(0.3, 0.0), &phi, c(0.1, 0.0)).unwrap();
        assert!(r.identities.passes(1e-9) && r.transport_ok, "{r:?}");
        let r = clark_conjugation_checks(&u, ExtendedScalar::finite(0.0, 0.5), &phi, ZERO).unwrap();
        assert!(r.transport_ok);
        assert!(r.transported_alpha.unwrap().chordal_distance(ExtendedScalar::finite(0.0, -0.5)) < 1e-8);
        let g = space(&[(0.3, 0.5), (-0.6, 0.1), (0.2, -0.7)], c(0.0, 1.0));
        let phi = g.element(vec![c(0.4, 0.2), c(-0.3, 0.6), c(0.0, 1.0)]).unwrap();
        for alpha in [ExtendedScalar::finite(0.2, -0.5), ExtendedScalar::finite(0.6, 0.8), ExtendedScalar::Infinity] {
            let r = clark_conjugation_checks(&g, alpha, &phi, c(0.0, 0.3)).unwrap();
            assert!(r.identities.passes(1e-9) && r.transport_ok, "{alpha}: {r:?}");
        }
    }

    #[test]
    fn dee_identities() {
        let u = space(&[(0.3, 0.4), (0.3, -0.4), (-0.5, 0.0)], c(-1.0, 0.0));
        let v = space(&[(0.1, 0.2)], c(1.0, 0.0));
        let phi = RationalSymbol::laurent(-3, vec![c(0.3, 0.1), c(1.0, 0.0), c(0.2, 0.5), c(0.0, -0.4), c(0.7, 0.0)]);
        let r = dee_identity_checks(&u, &v, &phi, Some(c(0.3, -0.6))).unwrap();
        assert!(r.passes(1e-9), "{r:?}");
        assert_eq!(r.checks.len(), 8);
    }

    #[test]
    fn chains_on_trivial_and_rank_one_instances() {
        let u = space(&[(0.3, 0.5), (-0.2, 0.1)], c(1.0, 0.0));
        let v = space(&[(0.4, -0.2)], c(0.0, 1.0));
        let w = space(&[(-0.5, 0.3), (0.1, 0.6)], c(1.0, 0.0));
        // analytic phi1: the product vanishes
        let phi1 = RationalSymbol::polynomial(vec![c(1.0, 0.0), c(0.5, 0.0)]);
        let phi2 = RationalSymbol::laurent(-2, vec![c(0.3, 0.1), c(1.0, 0.0)]);
        for r in [
            hankel_product_chain(&u, &v, &w, &phi1, &phi2, MEMBERSHIP_TOL).unwrap(),
            toeplitz_product_chain(&u, &v, &w, &phi1, &phi2, MEMBERSHIP_TOL).unwrap(),
        ] {
            assert!(r.agree && r.memberships[0], "{r:?}");
        }
        let phi1 = RationalSymbol::laurent(-3, vec![c(0.2, 0.0), c(0.0, 1.0), c(-0.4, 0.3)]);
        let h = hankel_product_chain(&u, &v, &w, &phi1, &phi2, MEMBERSHIP_TOL).unwrap();
        let t = toeplitz_product_chain(&u, &v, &w, &phi1, &phi2, MEMBERSHIP_TOL).unwrap();
        assert!(h.agree && t.agree, "{h:?} {t:?}");
    }
}
