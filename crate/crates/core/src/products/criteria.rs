//! Product-closure criteria. Each test builds the stated condition on its
//! own and also classifies the actual product, so a verdict always comes
//! with its cross-check.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::blaschke::ExtendedScalar;
use crate::classify::{
    cross_decompose, hankel_symbol_space, is_tho, is_tto, recover_sedlock_symbol, sedlock_class, SedlockMembership, SedlockReport,
    CLASS_TOL, REBUILD_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, ONE, ZERO};
use crate::modelspace::{ModelSpace, RationalSymbol, SpaceElement};
use crate::operators::{clark_perturbation, dee, rank_one, shift, tho_matrix, tto_matrix, OperatorMatrix};

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Witness {
    Alpha {
        alpha: ExtendedScalar,
    },
    /// The two factors `Φ` (codomain side) and `Ψ` (domain side).
    Pair {
        phi: Vec<Complex64>,
        psi: Vec<Complex64>,
    },
    Scalar {
        c: Complex64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductVerdict {
    /// Verdict of the displayed condition.
    pub in_class: bool,
    /// Verdict of classifying the product itself.
    pub direct: bool,
    pub agree: bool,
    pub witness: Option<Witness>,
    pub lhs_residual: f64,
    /// For class witnesses: whether the product falls in that class.
    pub class_check: Option<bool>,
}

impl ProductVerdict {
    fn new(in_class: bool, direct: bool, witness: Option<Witness>, lhs_residual: f64) -> Self {
        Self { in_class, direct, agree: in_class == direct, witness, lhs_residual, class_check: None }
    }
}

fn scale_of(m: &OperatorMatrix) -> f64 {
    m.matrix().frobenius_norm().max(1.0)
}

fn inner_sym(space: &ModelSpace) -> RationalSymbol {
    RationalSymbol::inner(space.inner())
}

fn pair(phi: &SpaceElement, psi: &SpaceElement) -> Witness {
    Witness::Pair { phi: phi.coords().to_vec(), psi: psi.coords().to_vec() }
}

/// Best `c` with `M ≈ c N` and the residual `‖M - c N‖_F`.
fn scalar_fit(m: &OperatorMatrix, n: &OperatorMatrix) -> (Complex64, f64) {
    let nn = n.matrix().frobenius_norm().powi(2);
    let c = if nn == 0.0 { ZERO } else { m.matrix().frobenius_inner(n.matrix()) / nn };
    (c, m.matrix().dist(&n.matrix().scale(c)))
}

/// Common class of two Sedlock reports, if any; `All` defers to the other.
fn common_class(a: &SedlockReport, b: &SedlockReport) -> Option<ExtendedScalar> {
    match (a.membership, b.membership) {
        (SedlockMembership::None, _) | (_, SedlockMembership::None) => None,
        (SedlockMembership::All, SedlockMembership::All) => Some(ExtendedScalar::Finite(ZERO)),
        (SedlockMembership::All, _) => b.alpha,
        (_, SedlockMembership::All) => a.alpha,
        _ => {
            let (x, y) = (a.alpha?, b.alpha?);
            (x.chordal_distance(y) <= CLASS_TOL).then_some(x)
        }
    }
}

/// `L²` distance from `conj(φ)` to the model space `k`.
fn conj_membership_residual(k: &Arc<ModelSpace>, phi: &RationalSymbol) -> Result<f64> {
    let f = phi.conj();
    let diff = &f - &k.project(&f)?.to_symbol();
    Ok(k.pairing(&diff, &diff)?.re.max(0.0).sqrt())
}

fn require_conj_member(k: &Arc<ModelSpace>, phi: &RationalSymbol, tol: f64) -> Result<()> {
    let residual = conj_membership_residual(k, phi)?;
    let size = k.pairing(phi, phi)?.re.max(0.0).sqrt().max(1.0);
    if residual > tol * size {
        return Err(Error::SymbolNotInClass { residual });
    }
    Ok(())
}

fn require_symmetric(space: &ModelSpace) -> Result<()> {
    if space.inner().is_real_symmetric() {
        Ok(())
    } else {
        Err(Error::NotRealSymmetric)
    }
}

/// `A B` for `A ∈ T(v,w)`, `B ∈ T(u,v)`: the rank-two difference
/// `φ1⊗ψ2 - P_w v(φ1 + conj ψ1) ⊗ P_u v(ψ2 + conj φ2)` must split as
/// `Φ⊗k_0^u + k_0^w⊗Ψ`. Parts are recovered from the matrices.
pub fn atto_product_test(a: &OperatorMatrix, b: &OperatorMatrix, tol: f64) -> Result<ProductVerdict> {
    let (u, v, w) = (b.domain().clone(), b.codomain().clone(), a.codomain().clone());
    if !a.domain().same_as(&v) {
        return Err(Error::SpaceMismatch);
    }
    let ma = is_tto(a, tol)?;
    let mb = is_tto(b, tol)?;
    if !ma.member || !mb.member {
        let residual = ma.rebuild_residual.max(mb.rebuild_residual);
        return Err(Error::SymbolRecoveryFailed(format!("factor is not a truncated Toeplitz operator (residual {residual:e})")));
    }
    let sv = inner_sym(&v);
    let (phi1, phi2, psi2) = (&ma.psi1, &mb.psi1, &mb.psi2);
    let left = w.project(&(&sv * &ma.symbol()))?;
    let right = u.project(&(&sv * &(&psi2.to_symbol() + &phi2.to_symbol().conj())))?;
    let lhs = rank_one(phi1, psi2).sub(&rank_one(&left, &right))?;
    let dec = cross_decompose(&lhs, &u.kernel(ZERO)?, &w.kernel(ZERO)?, tol)?;
    let direct = is_tto(&a.compose(b)?, tol)?.member;
    Ok(ProductVerdict::new(dec.success, direct, dec.success.then(|| pair(&dec.left, &dec.right)), dec.residual_norm))
}

/// Closure of one Sedlock class under products: `A B` is a TTO in the
/// class of `alpha` whenever both factors are.
#[derive(Debug, Clone, Serialize)]
pub struct ClosureReport {
    pub product_is_tto: bool,
    pub product_class: Option<ExtendedScalar>,
    pub class_preserved: bool,
}

pub fn sedlock_product_closure(a: &OperatorMatrix, b: &OperatorMatrix, alpha: ExtendedScalar, tol: f64) -> Result<ClosureReport> {
    let p = a.compose(b)?;
    let class = sedlock_class(&p, tol)?;
    Ok(ClosureReport {
        product_is_tto: is_tto(&p, tol)?.member,
        product_class: class.alpha,
        class_preserved: class.contains(alpha, CLASS_TOL),
    })
}

/// `B1 B2 ∈ T(u)` for Hankel operators on a real-symmetric `K_u`: either a
/// factor is `cD`, or `B1 D` and `D B2` share a Sedlock class.
pub fn tho_product_tto_test(b1: &OperatorMatrix, b2: &OperatorMatrix, tol: f64) -> Result<ProductVerdict> {
    let u = b1.domain().clone();
    require_symmetric(&u)?;
    if !b1.is_endomorphism() || !b2.is_endomorphism() || !b2.domain().same_as(&u) {
        return Err(Error::SpaceMismatch);
    }
    for b in [b1, b2] {
        if !is_tho(b, tol)?.member {
            return Err(Error::NotTho);
        }
    }
    let d = dee(&u)?;
    let product = b1.compose(b2)?;
    let direct = is_tto(&product, tol)?.member;
    for b in [b1, b2] {
        let (c, residual) = scalar_fit(b, &d);
        if residual <= tol * scale_of(b) {
            return Ok(ProductVerdict::new(true, direct, Some(Witness::Scalar { c }), residual));
        }
    }
    let r1 = sedlock_class(&b1.compose(&d)?, tol)?;
    let r2 = sedlock_class(&d.compose(b2)?, tol)?;
    let lhs_residual = r1.commutator_residual.max(r2.commutator_residual);
    let Some(alpha) = common_class(&r1, &r2) else {
        return Ok(ProductVerdict::new(false, direct, None, lhs_residual));
    };
    let mut verdict = ProductVerdict::new(true, direct, Some(Witness::Alpha { alpha }), lhs_residual);
    if let ExtendedScalar::Finite(a) = alpha {
        // B1 (S^{conj a})* = S^a B1 and B2 S^a = (S^{conj a})* B2
        let s = clark_perturbation(&u, a)?;
        let sb = clark_perturbation(&u, a.conj())?.adjoint();
        let e1 = b1.compose(&sb)?.max_dist(&s.compose(b1)?)?;
        let e2 = b2.compose(&s)?.max_dist(&sb.compose(b2)?)?;
        verdict.lhs_residual = verdict.lhs_residual.max(e1).max(e2);
    }
    verdict.class_check = Some(sedlock_class(&product, tol)?.contains(alpha, CLASS_TOL));
    Ok(verdict)
}

/// Rational forms of the two factors once their common class `α` is known.
#[derive(Debug, Clone, Serialize)]
pub struct SymbolForms {
    pub alpha: ExtendedScalar,
    /// `B1 D = A_{σ1}` with `σ1 = ψ1 + α conj(S C ψ1) + c1`.
    pub psi1: Vec<Complex64>,
    pub c1: Complex64,
    pub psi2: Vec<Complex64>,
    pub c2: Complex64,
    /// `B1 = B_{conj(u) σ1(conj z)}`, `B2 = B_{conj(u) σ2}` rebuilt.
    pub rebuild_residuals: [f64; 2],
    pub regime: Option<RegimeForms>,
}

/// Functional-calculus forms `Ψ1`, `Ψ2` for `|α| ≠ 1`, with the two literal
/// Hankel symbols and the product symbol checked as matrices.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeForms {
    pub big_psi1: Vec<Complex64>,
    pub big_psi2: Vec<Complex64>,
    pub factor_residuals: [f64; 2],
    pub product_residual: f64,
}

/// Images of the basis of `K_u` under `Ψ ↦ Ψ(S_u^α)` for `|α| ≠ 1`, one
/// vectorized column each, from a single quadrature pass.
fn calculus_basis(space: &Arc<ModelSpace>, alpha: Complex64) -> Result<CMatrix> {
    let n = space.dim();
    let inside = alpha.norm() < 1.0;
    let mut e = vec![ZERO; n];
    let vals = space.quadrature().mean(n * n * n, |z, out| {
        let u = space.inner().eval(z).unwrap_or(Complex64::new(f64::NAN, 0.0));
        space.basis_values(z, &mut e);
        let r = if inside { u / (u - alpha) } else { alpha / (alpha - u) };
        for k in 0..n {
            let p = r * if inside { e[k] } else { e[k].conj() };
            for j in 0..n {
                let pj = p * e[j];
                for i in 0..n {
                    out[(k * n + j) * n + i] = pj * e[i].conj();
                }
            }
        }
    })?;
    Ok(CMatrix::from_fn(n * n, n, |row, k| vals[k * n * n + row]))
}

/// `Ψ ∈ K_u` with `Ψ(S_u^α) = x` (least squares over the basis images).
fn calculus_preimage(space: &Arc<ModelSpace>, alpha: Complex64, basis: &CMatrix, x: &OperatorMatrix) -> Result<SpaceElement> {
    let d = basis.lstsq(&x.matrix().vectorize(), 1e-10)?;
    let coords = if alpha.norm() > 1.0 { d.iter().map(Complex64::conj).collect() } else { d };
    space.element(coords)
}

/// The literal Hankel factors `B1`, `B2` whose product is `Ψ1Ψ2(S_u^α)`:
/// for `|α| < 1`, `B_{conj(u hat Ψ1)/(1 - α u)}` and `B_{conj(u) Ψ2/(1 - α conj u)}`;
/// for `|α| > 1`, `B_{α conj(u) hat Ψ1/(α - conj u)}` and `B_{α conj(u Ψ2)/(α - u)}`.
pub fn regime_factors(
    u: &Arc<ModelSpace>,
    alpha: Complex64,
    g1: &RationalSymbol,
    g2: &RationalSymbol,
) -> Result<(OperatorMatrix, OperatorMatrix)> {
    require_symmetric(u)?;
    let su = inner_sym(u);
    let one = RationalSymbol::constant(ONE);
    let a = RationalSymbol::constant(alpha);
    let (s1, s2) = if alpha.norm() < 1.0 {
        (&(&su * &g1.hat()).conj() * &(&one - &su.scale(alpha)).recip()?, &(&su.conj() * g2) * &(&one - &su.conj().scale(alpha)).recip()?)
    } else {
        (
            &(&su.conj() * &g1.hat()).scale(alpha) * &(&a - &su.conj()).recip()?,
            &(&su.conj() * &g2.conj()).scale(alpha) * &(&a - &su).recip()?,
        )
    };
    Ok((tho_matrix(u, u, &s1)?, tho_matrix(u, u, &s2)?))
}

fn regime_forms(u: &Arc<ModelSpace>, alpha: Complex64, b1: &OperatorMatrix, b2: &OperatorMatrix) -> Result<RegimeForms> {
    let d = dee(u)?;
    let basis = calculus_basis(u, alpha)?;
    let p1 = calculus_preimage(u, alpha, &basis, &b1.compose(&d)?)?;
    let p2 = calculus_preimage(u, alpha, &basis, &d.compose(b2)?)?;
    let su = inner_sym(u);
    let (g1, g2) = (p1.to_symbol(), p2.to_symbol());
    let prod = if alpha.norm() < 1.0 {
        &(&g1 * &g2) * &(&RationalSymbol::constant(ONE) - &su.conj().scale(alpha)).recip()?
    } else {
        &(&g1 * &g2).conj().scale(alpha) * &(&RationalSymbol::constant(alpha) - &su).recip()?
    };
    let (f1, f2) = regime_factors(u, alpha, &g1, &g2)?;
    Ok(RegimeForms {
        factor_residuals: [f1.max_dist(b1)?, f2.max_dist(b2)?],
        product_residual: tto_matrix(u, u, &prod)?.max_dist(&b1.compose(b2)?)?,
        big_psi1: p1.into_coords(),
        big_psi2: p2.into_coords(),
    })
}

/// Symbol certificates for a pair with `B1 B2 ∈ T(u)` through a common
/// class. Factors equal to `cD` are outside the hypothesis.
pub fn tho_product_symbol_forms(b1: &OperatorMatrix, b2: &OperatorMatrix, tol: f64) -> Result<SymbolForms> {
    let verdict = tho_product_tto_test(b1, b2, tol)?;
    let alpha = match verdict.witness {
        Some(Witness::Alpha { alpha }) => alpha,
        Some(Witness::Scalar { .. }) => return Err(Error::NoCertificate { residual: verdict.lhs_residual }),
        _ => return Err(Error::NoCertificate { residual: f64::INFINITY }),
    };
    let u = b1.domain().clone();
    let d = dee(&u)?;
    let (psi1, c1, _) = recover_sedlock_symbol(&b1.compose(&d)?, alpha)?;
    let (psi2, c2, _) = recover_sedlock_symbol(&d.compose(b2)?, alpha)?;
    let sigma1 = crate::operators::sedlock_symbol(alpha, &psi1, c1)?;
    let sigma2 = crate::operators::sedlock_symbol(alpha, &psi2, c2)?;
    let ubar = inner_sym(&u).conj();
    let r1 = tho_matrix(&u, &u, &(&ubar * &sigma1.hat().conj()))?.max_dist(b1)?;
    let r2 = tho_matrix(&u, &u, &(&ubar * &sigma2))?.max_dist(b2)?;
    let worst = r1.max(r2);
    if worst >= REBUILD_TOL {
        return Err(Error::NoCertificate { residual: worst });
    }
    let regime = match alpha {
        ExtendedScalar::Finite(a) if (a.norm() - 1.0).abs() > 1e-6 => Some(regime_forms(&u, a, b1, b2)?),
        _ => None,
    };
    Ok(SymbolForms { alpha, psi1: psi1.into_coords(), c1, psi2: psi2.into_coords(), c2, rebuild_residuals: [r1, r2], regime })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    /// `A B`: the Toeplitz factor acts last.
    AB,
    /// `B A`: the Hankel factor acts last.
    BA,
}

/// Mixed products on a real-symmetric `K_u`: `AB ∈ H(u)` iff `A = cI`,
/// `B = cD`, or `A` and `B D` share a class; for `BA` use `D B` instead.
pub fn mixed_product_test(a: &OperatorMatrix, b: &OperatorMatrix, order: Order, tol: f64) -> Result<ProductVerdict> {
    let u = a.domain().clone();
    require_symmetric(&u)?;
    if !a.is_endomorphism() || !b.is_endomorphism() || !b.domain().same_as(&u) {
        return Err(Error::SpaceMismatch);
    }
    if !is_tto(a, tol)?.member {
        return Err(Error::NotTto);
    }
    if !is_tho(b, tol)?.member {
        return Err(Error::NotTho);
    }
    let d = dee(&u)?;
    let product = match order {
        Order::AB => a.compose(b)?,
        Order::BA => b.compose(a)?,
    };
    let direct = is_tho(&product, tol)?.member;
    let (c, res_a) = scalar_fit(a, &OperatorMatrix::identity(&u));
    if res_a <= tol * scale_of(a) {
        return Ok(ProductVerdict::new(true, direct, Some(Witness::Scalar { c }), res_a));
    }
    let (c, res_b) = scalar_fit(b, &d);
    if res_b <= tol * scale_of(b) {
        return Ok(ProductVerdict::new(true, direct, Some(Witness::Scalar { c }), res_b));
    }
    let ra = sedlock_class(a, tol)?;
    let folded = match order {
        Order::AB => b.compose(&d)?,
        Order::BA => d.compose(b)?,
    };
    let rb = sedlock_class(&folded, tol)?;
    let lhs_residual = ra.commutator_residual.max(rb.commutator_residual);
    let alpha = common_class(&ra, &rb);
    Ok(ProductVerdict::new(alpha.is_some(), direct, alpha.map(|alpha| Witness::Alpha { alpha }), lhs_residual))
}

/// `B^{v,w}_{φ1} B^{u,v}_{φ2} ∈ T(u,w)` with `conj φ1 ∈ K_{v hat w}` and
/// `conj φ2 ∈ K_{u hat v}`. The displayed rank-two difference is built with
/// its first factors projected to `K_w` and `K_u`.
pub fn atho_product_tto_test(
    u: &Arc<ModelSpace>,
    v: &Arc<ModelSpace>,
    w: &Arc<ModelSpace>,
    phi1: &RationalSymbol,
    phi2: &RationalSymbol,
    tol: f64,
) -> Result<ProductVerdict> {
    require_conj_member(&hankel_symbol_space(v, w)?, phi1, tol)?;
    require_conj_member(&hankel_symbol_space(u, v)?, phi2, tol)?;
    let svh = inner_sym(&*v.hat_space()?);
    let p1h = phi1.hat();
    let f1 = w.project(&(&svh * &p1h).conj())?;
    let f2 = u.project(&(&svh * phi2).conj())?;
    let g1 = w.project(&p1h.conj())?;
    let g2 = u.project(&phi2.conj())?;
    let lhs = rank_one(&f1, &f2).sub(&rank_one(&g1, &g2))?;
    let dec = cross_decompose(&lhs, &u.kernel(ZERO)?, &w.kernel(ZERO)?, tol)?;
    let product = tho_matrix(v, w, phi1)?.compose(&tho_matrix(u, v, phi2)?)?;
    let direct = is_tto(&product, tol)?.member;
    Ok(ProductVerdict::new(dec.success, direct, dec.success.then(|| pair(&dec.left, &dec.right)), dec.residual_norm))
}

/// Distance between the two witnesses of a self-adjoint split
/// `Φ⊗k_0 + k_0⊗Ψ`, minimised over the real gauge `Φ - Ψ + t k_0`.
pub fn witness_asymmetry(witness: &Witness, anchor: &SpaceElement) -> Option<f64> {
    let Witness::Pair { phi, psi } = witness else { return None };
    let diff: Vec<Complex64> = phi.iter().zip(psi).map(|(a, b)| a - b).collect();
    let k = anchor.coords();
    let kk = anchor.norm_sqr();
    let t = -crate::linalg::dot(&diff, k).re / kk;
    Some(diff.iter().zip(k).map(|(d, ki)| (d + ki * t).norm_sqr()).sum::<f64>().sqrt())
}

/// The Hankel-times-Toeplitz condition for `B^{v,w}_φ A^{u,v}_{ψ1 + conj ψ2}`,
/// an operator `K_u -> K_{hat w}`.
fn hankel_toeplitz_condition(
    u: &Arc<ModelSpace>,
    v: &Arc<ModelSpace>,
    w: &Arc<ModelSpace>,
    phi: &RationalSymbol,
    psi1: &SpaceElement,
    psi2: &SpaceElement,
    tol: f64,
) -> Result<(bool, f64, Witness)> {
    let wh = w.hat_space()?;
    let sv = inner_sym(v);
    let f = wh.project(&(&sv * phi).conj())?;
    let g = u.project(&(&(&sv.conj() * &inner_sym(u)) * &psi1.to_symbol()))?;
    let h = wh.project(&phi.conj())?;
    let sc = shift(u)?.apply(&u.conjugation_c()?.apply(psi2)?)?;
    let lhs = rank_one(&f, &g).sub(&rank_one(&h, &sc))?;
    let dec = cross_decompose(&lhs, &u.kernel(ZERO)?, &wh.kernel(ZERO)?, tol)?;
    Ok((dec.success, dec.residual_norm, pair(&dec.left, &dec.right)))
}

/// Products of a Hankel operator with a Toeplitz operator, landing in
/// `H(u,w)`.
///
/// `BA`: `B = B^{v,w}_φ`, `A = A^{u,v}_{ψ1 + conj ψ2}` (`ψ1 ∈ K_v`, `ψ2 ∈ K_u`,
/// `conj φ ∈ K_{v hat w}`).
/// `AB`: `A = A^{v,w}_{ψ1 + conj ψ2}` (`ψ1 ∈ K_w`, `ψ2 ∈ K_v`),
/// `B = B^{u,v}_φ` (`conj φ ∈ K_{u hat v}`); the condition is the `BA` one
/// for the adjoint data.
pub fn atho_atto_product_test(
    u: &Arc<ModelSpace>,
    v: &Arc<ModelSpace>,
    w: &Arc<ModelSpace>,
    phi: &RationalSymbol,
    psi1: &SpaceElement,
    psi2: &SpaceElement,
    order: Order,
    tol: f64,
) -> Result<ProductVerdict> {
    let (toeplitz_dom, toeplitz_cod, hankel_dom, hankel_cod) = match order {
        Order::BA => (u, v, v, w),
        Order::AB => (v, w, u, v),
    };
    if !psi1.space().same_as(toeplitz_cod) || !psi2.space().same_as(toeplitz_dom) {
        return Err(Error::SpaceMismatch);
    }
    require_conj_member(&hankel_symbol_space(hankel_dom, hankel_cod)?, phi, tol)?;
    let a = tto_matrix(toeplitz_dom, toeplitz_cod, &(&psi1.to_symbol() + &psi2.to_symbol().conj()))?;
    let b = tho_matrix(hankel_dom, hankel_cod, phi)?;
    let (product, cond) = match order {
        Order::BA => (b.compose(&a)?, hankel_toeplitz_condition(u, v, w, phi, psi1, psi2, tol)?),
        Order::AB => (a.compose(&b)?, hankel_toeplitz_condition(w, v, u, &phi.hat(), psi2, psi1, tol)?),
    };
    let direct = is_tho(&product, tol)?.member;
    let (ok, residual, witness) = cond;
    Ok(ProductVerdict::new(ok, direct, ok.then_some(witness), residual))
}

/// The Hankel-Toeplitz product conjugated into a product of two truncated
/// Toeplitz operators, then decided by [`atto_product_test`]:
/// `C_w B A U = (C_w B U)(U A U)` for `BA`, `C_w A B U = (C_w A C_v)(C_v B U)`
/// for `AB`. `a` is the Toeplitz factor, `b` the Hankel one.
pub fn hankel_toeplitz_conjugated_test(a: &OperatorMatrix, b: &OperatorMatrix, order: Order, tol: f64) -> Result<ProductVerdict> {
    let (first, second) = match order {
        Order::BA => {
            let (u, v, w) = (a.domain(), a.codomain(), b.codomain());
            let back_v = v.hat_space()?.conjugation_u()?;
            let back_u = u.hat_space()?.conjugation_u()?;
            let left = w.conjugation_c()?.compose(b)?.compose(&back_v)?;
            let right = v.conjugation_u()?.compose(a)?.compose(&back_u)?;
            (left, right)
        }
        Order::AB => {
            let (u, v, w) = (b.domain(), b.codomain(), a.codomain());
            let cv = v.conjugation_c()?;
            let left = w.conjugation_c()?.compose(a)?.compose(&cv)?;
            let right = cv.compose(b)?.compose(&u.hat_space()?.conjugation_u()?)?;
            (left, right)
        }
    };
    let mut verdict = atto_product_test(&first, &second, tol)?;
    let product = match order {
        Order::BA => b.compose(a)?,
        Order::AB => a.compose(b)?,
    };
    verdict.direct = is_tho(&product, tol)?.member;
    verdict.agree = verdict.direct == verdict.in_class;
    Ok(verdict)
}

/// The two rank-one product identities on a real-symmetric space: with
/// `B1 = k~_λ⊗k~_{conj λ}`, `B2 = k_{conj λ}⊗k_λ`, `A = k~_λ⊗k_λ`.
#[derive(Debug, Clone, Serialize)]
pub struct RankOneProductReport {
    /// `‖B1 B2 - conj(u'(conj λ)) A‖`.
    pub product_residual: f64,
    /// Same with `conj(u'(λ))`, recorded for the convention question.
    pub alternate_residual: f64,
    /// `‖A B1 - u'(λ) B1‖`.
    pub mixed_residual: f64,
}

pub fn rank_one_product_identities(u: &Arc<ModelSpace>, lambda: Complex64) -> Result<RankOneProductReport> {
    require_symmetric(u)?;
    let (b1, b2, a) = crate::classify::kernel_products(u, lambda)?;
    let p = b1.compose(&b2)?;
    let d_bar = u.inner().derivative(lambda.conj())?;
    let d = u.inner().derivative(lambda)?;
    Ok(RankOneProductReport {
        product_residual: p.max_dist(&a.scale(d_bar.conj()))?,
        alternate_residual: p.max_dist(&a.scale(d.conj()))?,
        mixed_residual: a.compose(&b1)?.max_dist(&b1.scale(d))?,
    })
}
