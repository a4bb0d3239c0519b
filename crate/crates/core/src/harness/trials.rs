//! One generator and one evaluator per suite check. Generators draw all
//! randomness into a `ProblemSpec`; evaluators are pure functions of it, so
//! a recorded spec replays a trial exactly.

use std::sync::Arc;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::generate::{circle_point, disk_point, random_coords, random_inner, random_laurent, unit_box, ProblemSpec, TrialRng};
use crate::blaschke::{ClarkData, ExtendedScalar, InnerFunction};
use crate::classify::{
    hankel_symbol_space, is_tho, is_tto, recover_tho_symbol, sedlock_class, tho_inverse_class, tho_unitary_report, zero_product_analysis,
};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, ONE, ZERO};
use crate::modelspace::{ModelSpace, RationalSymbol, SpaceElement};
use crate::operators::{
    clark_perturbation, dee, defects, functional_calculus, rank_one, sedlock_op, shift, tho_matrix, tto_matrix, OperatorMatrix,
};
use crate::products::{self, Order, ProductVerdict, Witness};
use crate::quadrature::Quadrature;

/// Parameters shared by every trial of a run.
#[derive(Debug, Clone, Copy)]
pub struct TrialContext {
    pub tol: f64,
    pub quadrature: Quadrature,
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub pass: bool,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Outcome {
    fn below(residual: f64, limit: f64) -> Self {
        Self { pass: residual < limit, residual, note: None }
    }

    fn with(pass: bool, residual: f64) -> Self {
        Self { pass, residual, note: None }
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

pub type Generator = fn(&mut TrialRng, u64, &TrialContext) -> Result<ProblemSpec>;
pub type Evaluator = fn(&ProblemSpec) -> Result<Outcome>;

/// A registered suite check.
#[derive(Clone, Copy)]
pub struct Check {
    pub id: &'static str,
    pub summary: &'static str,
    pub trials: usize,
    pub generate: Generator,
    pub evaluate: Evaluator,
}

/// Pinned limits used by the evaluators.
pub mod limits {
    pub const CORE: f64 = 1e-9;
    pub const REBUILD: f64 = 1e-8;
    pub const RANK_ONE: f64 = 1e-8;
    pub const CLASS: f64 = 1e-8;
    pub const UNITARY: f64 = 1e-10;
    pub const ALIGNMENT: f64 = 1e-8;
    pub const CLARK_QUADRATURE: f64 = 1e-8;
    pub const DICTIONARY: f64 = 1e-9;
    pub const ZERO_PRODUCT: f64 = 1e-9;
    pub const CROSS_CLASS: f64 = 1e-3;
    pub const EXAMPLE: f64 = 1e-9;
    pub const HYGIENE: f64 = 1e-11;
}

pub const CHECKS: &[Check] = &[
    Check {
        id: "core.kernels",
        summary: "reproducing kernels, conjugations, boundary kernels",
        trials: 200,
        generate: gen_kernels,
        evaluate: eval_kernels,
    },
    Check {
        id: "structure.toeplitz-displacement",
        summary: "TTO displacement split and symbol rebuild",
        trials: 200,
        generate: gen_two_spaces_symbol,
        evaluate: eval_toeplitz_displacement,
    },
    Check {
        id: "structure.hankel-displacement",
        summary: "THO displacement split and symbol rebuild",
        trials: 200,
        generate: gen_two_spaces_symbol,
        evaluate: eval_hankel_displacement,
    },
    Check {
        id: "structure.defects-rank-one",
        summary: "defect operators and rank-one memberships",
        trials: 100,
        generate: gen_defects,
        evaluate: eval_defects,
    },
    Check {
        id: "sedlock.round-trip",
        summary: "class detection recovers alpha",
        trials: 200,
        generate: gen_sedlock_round_trip,
        evaluate: eval_sedlock_round_trip,
    },
    Check {
        id: "sedlock.adjoint",
        summary: "adjoints move alpha to 1/conj(alpha)",
        trials: 100,
        generate: gen_sedlock_any,
        evaluate: eval_sedlock_adjoint,
    },
    Check {
        id: "sedlock.closure",
        summary: "same-class products stay in the class",
        trials: 100,
        generate: gen_sedlock_any,
        evaluate: eval_sedlock_closure,
    },
    Check {
        id: "clark.unitary",
        summary: "Clark unitaries, eigenvectors and quadrature",
        trials: 50,
        generate: gen_clark,
        evaluate: eval_clark,
    },
    Check {
        id: "dictionary.identities",
        summary: "eight conjugation identities",
        trials: 100,
        generate: gen_dictionary,
        evaluate: eval_dictionary_identities,
    },
    Check {
        id: "dictionary.transports",
        summary: "six membership transports",
        trials: 100,
        generate: gen_transports,
        evaluate: eval_transports,
    },
    Check {
        id: "dictionary.conjugations",
        summary: "Clark-family and D identities, class transport",
        trials: 100,
        generate: gen_conjugations,
        evaluate: eval_conjugations,
    },
    Check { id: "reports.unitary", summary: "six unitarity conditions agree", trials: 100, generate: gen_unitary, evaluate: eval_unitary },
    Check {
        id: "reports.inverse",
        summary: "inverse of an invertible THO and its class",
        trials: 20,
        generate: gen_inverse,
        evaluate: eval_inverse,
    },
    Check {
        id: "reports.zero-product",
        summary: "zero products and cross-class products",
        trials: 100,
        generate: gen_zero_product,
        evaluate: eval_zero_product,
    },
    Check {
        id: "products.toeplitz",
        summary: "TTO products into T(u,w)",
        trials: 200,
        generate: gen_toeplitz_product,
        evaluate: eval_toeplitz_product,
    },
    Check {
        id: "products.hankel-pair",
        summary: "THO products into T(u), common class",
        trials: 200,
        generate: gen_hankel_pair,
        evaluate: eval_hankel_pair,
    },
    Check {
        id: "products.hankel-forms",
        summary: "symbol certificates and regime forms",
        trials: 200,
        generate: gen_hankel_forms,
        evaluate: eval_hankel_forms,
    },
    Check {
        id: "products.mixed",
        summary: "TTO-THO products into H(u), both orders",
        trials: 200,
        generate: gen_mixed,
        evaluate: eval_mixed,
    },
    Check {
        id: "products.hankel-hankel",
        summary: "asymmetric THO products into T(u,w)",
        trials: 200,
        generate: gen_hankel_hankel,
        evaluate: eval_hankel_hankel,
    },
    Check {
        id: "products.hankel-toeplitz",
        summary: "asymmetric THO-TTO products into H(u,w)",
        trials: 200,
        generate: gen_hankel_toeplitz,
        evaluate: eval_hankel_toeplitz,
    },
    Check {
        id: "products.hankel-toeplitz-conjugated",
        summary: "THO-TTO products decided through the Toeplitz criterion",
        trials: 200,
        generate: gen_hankel_toeplitz,
        evaluate: eval_hankel_toeplitz_conjugated,
    },
    Check {
        id: "products.hankel-chain",
        summary: "four forms of a THO product in H(u,w)",
        trials: 200,
        generate: gen_chain,
        evaluate: eval_hankel_chain,
    },
    Check {
        id: "products.toeplitz-chain",
        summary: "four forms of a THO product in T(u,w)",
        trials: 200,
        generate: gen_chain,
        evaluate: eval_toeplitz_chain,
    },
    Check {
        id: "products.rank-one-example",
        summary: "kernel rank-one product identities",
        trials: 200,
        generate: gen_rank_one_example,
        evaluate: eval_rank_one_example,
    },
    Check {
        id: "hygiene.quadrature-doubling",
        summary: "doubling the nodes leaves matrices unchanged",
        trials: 50,
        generate: gen_doubling,
        evaluate: eval_doubling,
    },
    Check {
        id: "hygiene.monomial-oracle",
        summary: "exact Fourier oracle for u = z^n",
        trials: 64,
        generate: gen_monomial,
        evaluate: eval_monomial,
    },
];

pub fn find(id: &str) -> Option<&'static Check> {
    CHECKS.iter().find(|c| c.id == id)
}

// ---------------------------------------------------------------------------
// shared generation helpers

fn inner(rng: &mut TrialRng, lo: usize, hi: usize, symmetric: bool) -> Result<InnerFunction> {
    let degree = rng.gen_range(lo..=hi);
    random_inner(rng, degree, symmetric)
}

fn base(rng: &mut TrialRng, op: &str, seed: u64, ctx: &TrialContext, max_degree: usize, symmetric: bool) -> Result<ProblemSpec> {
    base_from(rng, op, seed, ctx, 1, max_degree, symmetric)
}

fn base_from(rng: &mut TrialRng, op: &str, seed: u64, ctx: &TrialContext, lo: usize, hi: usize, symmetric: bool) -> Result<ProblemSpec> {
    let u = inner(rng, lo, hi, symmetric)?;
    Ok(ProblemSpec::new(op, seed, u, ctx.tol, ctx.quadrature))
}

/// Negative expectations need room: on a one-dimensional space every
/// operator is scalar and lies in every class.
fn expect(expected: Option<bool>, dims: &[usize]) -> Option<bool> {
    expected.filter(|&e| e || dims.iter().all(|&d| d > 1))
}

/// A parameter from one of four regimes: inside the disk, on the circle,
/// outside the closed disk, infinity.
fn any_alpha(rng: &mut TrialRng) -> ExtendedScalar {
    match rng.gen_range(0..4) {
        0 => ExtendedScalar::Finite(disk_point(rng, 0.9)),
        1 => ExtendedScalar::Finite(circle_point(rng)),
        2 => ExtendedScalar::Finite(outside_point(rng)),
        _ => ExtendedScalar::Infinity,
    }
}

fn outside_point(rng: &mut TrialRng) -> Complex64 {
    let r = rng.gen_range(1.2..4.0);
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

fn pick(rng: &mut TrialRng, variants: &[&str]) -> String {
    variants.choose(rng).copied().unwrap_or_default().to_string()
}

fn coords(spec: &ProblemSpec, k: usize) -> Result<&[Complex64]> {
    spec.vectors.get(k).map(Vec::as_slice).ok_or_else(|| Error::Input(format!("{} needs vector #{k}", spec.operation)))
}

fn element(spec: &ProblemSpec, k: usize, space: &Arc<ModelSpace>) -> Result<SpaceElement> {
    spec.vector(k, space)
}

fn scale_of(m: &OperatorMatrix) -> f64 {
    m.norm().max(1.0)
}

fn verdict_outcome(v: &ProductVerdict, expected: Option<bool>) -> Outcome {
    let expected_ok = expected.is_none_or(|e| e == v.in_class);
    let class_ok = v.class_check != Some(false);
    let pass = v.agree && expected_ok && class_ok;
    let out = Outcome::with(pass, v.lhs_residual);
    if pass {
        out
    } else {
        out.note(format!("condition {} direct {} expected {:?} class check {:?}", v.in_class, v.direct, expected, v.class_check))
    }
}

// ---------------------------------------------------------------------------
// core

fn gen_kernels(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let mut spec = base(rng, "core.kernels", seed, ctx, 8, false)?;
    spec.lambda = Some(disk_point(rng, 0.9));
    spec.eta = Some(circle_point(rng));
    spec.vectors.push(random_coords(rng, spec.u.degree()));
    Ok(spec)
}

fn eval_kernels(spec: &ProblemSpec) -> Result<Outcome> {
    let u = spec.space_u()?;
    let lambda = spec.get(spec.lambda, "lambda")?;
    let eta = spec.get(spec.eta, "eta")?;
    let f = element(spec, 0, &u)?;
    let k = u.kernel(lambda)?;
    let kt = u.conj_kernel(lambda)?;
    let c = u.conjugation_c()?;
    let uh = u.hat_space()?;
    let uu = u.conjugation_u()?;
    let k_eta = u.boundary_kernel(eta)?;
    let kt_eta = u.conj_kernel(eta)?.scale(u.inner().value(eta).conj() * eta);
    let residuals = [
        (f.inner(&k)? - f.eval(lambda)).norm(),
        c.apply(&k)?.dist(&kt)?,
        k_eta.dist(&kt_eta)?,
        uu.apply(&k)?.dist(&uh.kernel(lambda.conj())?)?,
        uu.apply(&kt)?.dist(&uh.conj_kernel(lambda.conj())?)?,
        c.apply(&c.apply(&f)?)?.dist(&f)?,
        (c.apply(&f)?.norm() - f.norm()).abs(),
    ];
    Ok(Outcome::below(residuals.into_iter().fold(0.0, f64::max), limits::CORE))
}

fn gen_two_spaces_symbol(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let mut spec = base(rng, "structure", seed, ctx, 6, false)?;
    spec.v = Some(inner(rng, 1, 6, false)?);
    spec.symbols.push(random_laurent(rng, -4, 4));
    Ok(spec)
}

fn eval_toeplitz_displacement(spec: &ProblemSpec) -> Result<Outcome> {
    let (u, v) = (spec.space_u()?, spec.space_v()?);
    let a = tto_matrix(&u, &v, spec.symbol(0)?)?;
    let m = is_tto(&a, spec.tol)?;
    let pass = m.member && m.displacement_residual < limits::CORE && m.rebuild_residual < limits::REBUILD;
    Ok(Outcome::with(pass, m.displacement_residual.max(m.rebuild_residual)))
}

fn eval_hankel_displacement(spec: &ProblemSpec) -> Result<Outcome> {
    let (u, v) = (spec.space_u()?, spec.space_v()?);
    let b = tho_matrix(&u, &v, spec.symbol(0)?)?;
    let m = is_tho(&b, spec.tol)?;
    let pass = m.member && m.displacement_residual < limits::CORE && m.rebuild_residual < limits::REBUILD;
    Ok(Outcome::with(pass, m.displacement_residual.max(m.rebuild_residual)))
}

fn gen_defects(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let mut spec = base(rng, "structure.defects-rank-one", seed, ctx, 6, false)?;
    spec.v = Some(inner(rng, 1, 6, false)?);
    spec.lambda = Some(disk_point(rng, 0.9));
    spec.eta = Some(circle_point(rng));
    Ok(spec)
}

fn eval_defects(spec: &ProblemSpec) -> Result<Outcome> {
    let (u, v) = (spec.space_u()?, spec.space_v()?);
    let lambda = spec.get(spec.lambda, "lambda")?;
    let eta = spec.get(spec.eta, "eta")?;
    let s = shift(&u)?;
    let id = OperatorMatrix::identity(&u);
    let (d1, d2) = defects(&u)?;
    let mut worst: f64 = 0.0;
    worst = worst.max(id.sub(&s.compose(&s.adjoint())?)?.max_dist(&d1)?);
    worst = worst.max(id.sub(&s.adjoint().compose(&s)?)?.max_dist(&d2)?);
    // k~^v_λ ⊗ k^u_λ = A_{v/(z-λ)}, k^v_λ ⊗ k~^u_λ = A_{conj(u) z/(1 - conj(λ) z)}
    let first = RationalSymbol::inner(v.inner()) * RationalSymbol::new(vec![ONE], vec![-lambda, ONE])?;
    let second = RationalSymbol::inner_conj(u.inner()) * RationalSymbol::new(vec![ZERO, ONE], vec![ONE, -lambda.conj()])?;
    worst = worst.max(rank_one(&v.conj_kernel(lambda)?, &u.kernel(lambda)?).max_dist(&tto_matrix(&u, &v, &first)?)?);
    worst = worst.max(rank_one(&v.kernel(lambda)?, &u.conj_kernel(lambda)?).max_dist(&tto_matrix(&u, &v, &second)?)?);
    let (kv, ku) = (v.boundary_kernel(eta)?, u.boundary_kernel(eta)?);
    let boundary = &(&kv.to_symbol() + &ku.to_symbol().conj()) - &RationalSymbol::constant(ONE);
    worst = worst.max(rank_one(&kv, &ku).max_dist(&tto_matrix(&u, &v, &boundary)?)?);
    let h1 = rank_one(&v.conj_kernel(lambda.conj())?, &u.conj_kernel(lambda)?);
    let h2 = rank_one(&v.kernel(lambda.conj())?, &u.kernel(lambda)?);
    let members = is_tho(&h1, spec.tol)?.member && is_tho(&h2, spec.tol)?.member;
    let out = Outcome::with(members && worst < limits::RANK_ONE, worst);
    Ok(if members { out } else { out.note("rank-one operator failed Hankel membership") })
}

// ---------------------------------------------------------------------------
// Sedlock classes and the Clark regime

fn gen_sedlock_round_trip(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    // on a one-dimensional space every operator is scalar and alpha is not identifiable
    let mut spec = ProblemSpec::new("sedlock.round-trip", seed, inner(rng, 2, 6, false)?, ctx.tol, ctx.quadrature);
    spec.alpha = Some(ExtendedScalar::Finite(disk_point(rng, 0.9)));
    spec.vectors.push(random_coords(rng, spec.u.degree()));
    spec.c = Some(unit_box(rng));
    Ok(spec)
}

fn sedlock_member(spec: &ProblemSpec, u: &Arc<ModelSpace>, k: usize, alpha: ExtendedScalar) -> Result<OperatorMatrix> {
    sedlock_op(alpha, &element(spec, k, u)?, spec.c.unwrap_or(ZERO))
}

fn eval_sedlock_round_trip(spec: &ProblemSpec) -> Result<Outcome> {
    let u = spec.space_u()?;
    let alpha = spec.get(spec.alpha, "alpha")?;
    let report = sedlock_class(&sedlock_member(spec, &u, 0, alpha)?, spec.tol)?;
    let error = match (report.alpha, alpha) {
        (Some(ExtendedScalar::Finite(found)), ExtendedScalar::Finite(a)) => (found - a).norm(),
        _ => f64::INFINITY,
    };
    let out = Outcome::below(error, limits::CLASS);
    Ok(if out.pass { out } else { out.note(format!("membership {:?}", report.membership)) })
}

fn gen_sedlock_any(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let mut spec = base(rng, "sedlock", seed, ctx, 6, false)?;
    spec.alpha = Some(any_alpha(rng));
    let n = spec.u.degree();
    spec.vectors.push(random_coords(rng, n));
    spec.vectors.push(random_coords(rng, n));
    spec.c = Some(unit_box(rng));
    Ok(spec)
}

fn eval_sedlock_adjoint(spec: &ProblemSpec) -> Result<Outcome> {
    let u = spec.space_u()?;
    let alpha = spec.get(spec.alpha, "alpha")?;
    let a = sedlock_member(spec, &u, 0, alpha)?;
    let direct = sedlock_class(&a, spec.tol)?;
    let adjoint = sedlock_class(&a.adjoint(), spec.tol)?;
    let expected = alpha.reciprocal_conj();
    let residual = match adjoint.alpha {
        Some(found) => found.chordal_distance(expected),
        None => f64::INFINITY,
    };
    let pass = direct.contains(alpha, limits::CLASS) && adjoint.contains(expected, limits::CLASS);
    Ok(Outcome::with(pass, residual))
}

fn eval_sedlock_closure(spec: &ProblemSpec) -> Result<Outcome> {
    let u = spec.space_u()?;
    let alpha = spec.get(spec.alpha, "alpha")?;
    let a = sedlock_member(spec, &u, 0, alpha)?;
    let b = sedlock_member(spec, &u, 1, alpha)?;
    let r = products::sedlock_product_closure(&a, &b, alpha, spec.tol)?;
    let residual = r.product_class.map_or(f64::INFINITY, |found| found.chordal_distance(alpha));
    Ok(Outcome::with(r.product_is_tto && r.class_preserved, residual))
}

fn gen_clark(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let mut spec = base(rng, "clark.unitary", seed, ctx, 8, false)?;
    spec.alpha = Some(ExtendedScalar::Finite(circle_point(rng)));
    spec.vectors.push(random_coords(rng, spec.u.degree()));
    Ok(spec)
}

fn eval_clark(spec: &ProblemSpec) -> Result<Outcome> {
    let u = spec.space_u()?;
    let alpha = spec.get(spec.alpha, "alpha")?.as_finite().ok_or_else(|| Error::Input("finite alpha required".into()))?;
    let s = clark_perturbation(&u, alpha)?;
    let id = OperatorMatrix::identity(&u);
    let unitary = s.adjoint().compose(&s)?.max_dist(&id)?.max(s.compose(&s.adjoint())?.max_dist(&id)?);
    let data = ClarkData::compute(&u, alpha)?;
    let mut alignment = data.alignment;
    for &zeta in &data.points {
        let k = u.boundary_kernel(zeta)?;
        let moved = s.apply(&k)?.dist(&k.scale(zeta))? / k.norm();
        alignment = alignment.max(moved);
    }
    let f = element(spec, 0, &u)?;
    let quad = (data.quadrature(|z| f.eval(z)) - f.norm_sqr()).abs() / f.norm_sqr().max(1e-300);
    let pass = unitary < limits::UNITARY && alignment < limits::ALIGNMENT && quad < limits::CLARK_QUADRATURE;
    Ok(Outcome::with(pass, unitary.max(alignment).max(quad))
        .note(format!("unitary {unitary:e} alignment {alignment:e} quadrature {quad:e}")))
}

// ---------------------------------------------------------------------------
// dictionary

fn gen_dictionary(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let mut spec = base(rng, "dictionary.identities", seed, ctx, 5, false)?;
    spec.v = Some(inner(rng, 1, 5, false)?);
    spec.symbols.push(random_laurent(rng, -4, 4));
    Ok(spec)
}

fn eval_dictionary_identities(spec: &ProblemSpec) -> Result<Outcome> {
    let r = products::equivalence_transforms(&spec.space_u()?, &spec.space_v()?, spec.symbol(0)?)?;
    let worst = r.checks.iter().max_by(|a, b| a.residual.total_cmp(&b.residual)).map(|c| c.name).unwrap_or_default();
    Ok(Outcome::below(r.max_residual, limits::DICTIONARY).note(format!("largest: {worst}")))
}

fn gen_transports(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let mut spec = gen_dictionary(rng, seed, ctx)?;
    spec.operation = "dictionary.transports".into();
    spec.variant = Some(pick(rng, &["member", "perturbed"]));
    let v_deg = spec.v.as_ref().map_or(1, InnerFunction::degree);
    spec.vectors.push(random_coords(rng, v_deg));
    spec.vectors.push(random_coords(rng, spec.u.degree()));
    Ok(spec)
}

fn eval_transports(spec: &ProblemSpec) -> Result<Outcome> {
    let (u, v) = (spec.space_u()?, spec.space_v()?);
    let phi = spec.symbol(0)?;
    let mut a = tto_matrix(&u, &v, phi)?;
    let mut b = tho_matrix(&u, &v, phi)?;
    let member = spec.variant() != "perturbed";
    if !member {
        let noise = rank_one(&element(spec, 0, &v)?, &element(spec, 1, &u)?);
        a = a.add(&noise)?;
        b = b.add(&noise)?;
    }
    let checks = products::transports(&a, &b, spec.tol)?;
    let expected = expect(Some(member), &[u.dim(), v.dim()]);
    let bad: Vec<_> = checks.iter().filter(|t| t.before != t.after || expected.is_some_and(|e| e != t.before)).map(|t| t.name).collect();
    let out = Outcome::with(bad.is_empty(), bad.len() as f64);
    Ok(if bad.is_empty() { out } else { out.note(bad.join("; ")) })
}

fn gen_conjugations(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let mut spec = base(rng, "dictionary.conjugations", seed, ctx, 6, true)?;
    spec.v = Some(inner(rng, 1, 5, false)?);
    spec.alpha = Some(any_alpha(rng));
    let v_deg = spec.v.as_ref().map_or(1, InnerFunction::degree);
    spec.vectors.push(random_coords(rng, v_deg));
    spec.c = Some(unit_box(rng));
    spec.symbols.push(random_laurent(rng, -3, 3));
    Ok(spec)
}

fn eval_conjugations(spec: &ProblemSpec) -> Result<Outcome> {
    let (u, v) = (spec.space_u()?, spec.space_v()?);
    let alpha = spec.get(spec.alpha, "alpha")?;
    let phi = element(spec, 0, &v)?;
    let clark = products::clark_conjugation_checks(&v, alpha, &phi, spec.c.unwrap_or(ZERO))?;
    let dee_checks = products::dee_identity_checks(&u, &v, spec.symbol(0)?, alpha.as_finite())?;
    let worst = clark.identities.max_residual.max(dee_checks.max_residual);
    let out = Outcome::with(clark.transport_ok && worst < limits::DICTIONARY, worst);
    Ok(if clark.transport_ok { out } else { out.note(format!("class transport found {:?}", clark.transported_alpha)) })
}

// ---------------------------------------------------------------------------
// structural reports

/// `Σ_j values_j P_j` over the Clark points of `alpha`.
fn clark_function(u: &Arc<ModelSpace>, alpha: Complex64, values: &[Complex64]) -> Result<OperatorMatrix> {
    let data = ClarkData::compute(u, alpha)?;
    let n = u.dim();
    let mut m = CMatrix::zeros(n, n);
    for (&zeta, &val) in data.points.iter().zip(values) {
        let k = u.boundary_kernel(zeta)?;
        m = &m + &CMatrix::outer(k.coords(), k.coords()).scale(val / k.norm_sqr());
    }
    OperatorMatrix::linear(m, u.clone(), u.clone())
}

fn gen_unitary(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    // on a one-dimensional space T(u) is everything, so the Toeplitz-defect conditions hold for every B
    let mut spec = base_from(rng, "reports.unitary", seed, ctx, 2, 6, true)?;
    spec.variant = Some(pick(rng, &["unitary", "random"]));
    spec.alpha = Some(ExtendedScalar::Finite(circle_point(rng)));
    let n = spec.u.degree();
    spec.vectors.push((0..n).map(|_| circle_point(rng)).collect());
    spec.symbols.push(random_laurent(rng, -4, 3));
    Ok(spec)
}

fn eval_unitary(spec: &ProblemSpec) -> Result<Outcome> {
    let u = spec.space_u()?;
    let unitary = spec.variant() == "unitary";
    let b = if unitary {
        let alpha = spec.get(spec.alpha, "alpha")?.as_finite().ok_or_else(|| Error::Input("finite alpha required".into()))?;
        dee(&u)?.compose(&clark_function(&u, alpha, coords(spec, 0)?)?)?
    } else {
        tho_matrix(&u, &u, spec.symbol(0)?)?
    };
    let r = tho_unitary_report(&b, spec.tol)?;
    let pass = r.agree && r.unitary == unitary;
    let out = Outcome::with(pass, r.isometry_residual.max(r.coisometry_residual));
    Ok(if pass { out } else { out.note(format!("conditions {:?}", r.conditions())) })
}

fn gen_inverse(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let mut spec = base_from(rng, "reports.inverse", seed, ctx, 2, 6, true)?;
    spec.alpha = Some(match rng.gen_range(0..3) {
        0 => ExtendedScalar::Finite(disk_point(rng, 0.9)),
        1 => ExtendedScalar::Finite(circle_point(rng)),
        _ => ExtendedScalar::Finite(outside_point(rng)),
    });
    // 2 + a small polynomial has no zeros in the closed disk
    let mut coeffs: Vec<Complex64> = (0..4).map(|_| unit_box(rng).scale(0.3)).collect();
    coeffs[0] += Complex64::new(2.0, 0.0);
    spec.symbols.push(RationalSymbol::polynomial(coeffs));
    Ok(spec)
}

fn eval_inverse(spec: &ProblemSpec) -> Result<Outcome> {
    let u = spec.space_u()?;
    let alpha = spec.get(spec.alpha, "alpha")?;
    let b = dee(&u)?.compose(&functional_calculus(&u, alpha, spec.symbol(0)?)?)?;
    let r = tho_inverse_class(&b, spec.tol)?;
    let rebuild = r.symbol_rebuild_residuals.map_or(f64::INFINITY, |(a, b)| a.max(b));
    let pass = r.inverse_is_tho && r.class_condition && r.agree && rebuild < limits::REBUILD;
    Ok(Outcome::with(pass, rebuild))
}

fn gen_zero_product(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let mut spec = ProblemSpec::new("reports.zero-product", seed, inner(rng, 2, 6, true)?, ctx.tol, ctx.quadrature);
    let variant = pick(rng, &["clark-split", "disk-split", "cross-class"]);
    let n = spec.u.degree();
    match variant.as_str() {
        "cross-class" => {
            spec.alpha = Some(any_alpha(rng));
            let mut beta = any_alpha(rng);
            while beta.chordal_distance(spec.alpha.unwrap_or(beta)) < 0.1 {
                beta = any_alpha(rng);
            }
            spec.beta = Some(beta);
            spec.vectors.push(random_coords(rng, n));
            spec.vectors.push(random_coords(rng, n));
            spec.c = Some(unit_box(rng));
        }
        _ => {
            spec.alpha = Some(ExtendedScalar::Finite(if variant == "clark-split" { circle_point(rng) } else { disk_point(rng, 0.9) }));
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let cut = rng.gen_range(1..n);
            let mut left = vec![ZERO; n];
            let mut right = vec![ZERO; n];
            for (pos, &j) in order.iter().enumerate() {
                let slot = if pos < cut { &mut left } else { &mut right };
                slot[j] = unit_box(rng) + Complex64::new(0.1, 0.0);
            }
            spec.vectors.push(left);
            spec.vectors.push(right);
        }
    }
    spec.variant = Some(variant);
    Ok(spec)
}

/// `Π_{j: mask_j != 0} (z - ζ_j)` over the eigenvalues of `S_u^α`, scaled
/// by the product of the mask values.
fn root_polynomial(u: &Arc<ModelSpace>, alpha: Complex64, mask: &[Complex64]) -> Result<RationalSymbol> {
    let roots = clark_perturbation(u, alpha)?.matrix().eigenvalues()?;
    let mut sorted = roots;
    sorted.sort_by(|a, b| a.arg().total_cmp(&b.arg()).then(a.norm().total_cmp(&b.norm())));
    let mut p = vec![ONE];
    let mut scale = ONE;
    for (&zeta, &m) in sorted.iter().zip(mask) {
        if m == ZERO {
            continue;
        }
        scale *= m;
        let mut next = vec![ZERO; p.len() + 1];
        for (k, &c) in p.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * zeta;
        }
        p = next;
    }
    Ok(RationalSymbol::polynomial(p.into_iter().map(|c| c * scale).collect()))
}

fn eval_zero_product(spec: &ProblemSpec) -> Result<Outcome> {
    let u = spec.space_u()?;
    let d = dee(&u)?;
    let alpha = spec.get(spec.alpha, "alpha")?;
    let (x1, x2) = match spec.variant() {
        "cross-class" => {
            let beta = spec.get(spec.beta, "beta")?;
            (sedlock_member(spec, &u, 0, alpha)?, sedlock_member(spec, &u, 1, beta)?)
        }
        "clark-split" => {
            let a = alpha.as_finite().ok_or_else(|| Error::Input("finite alpha required".into()))?;
            (clark_function(&u, a, coords(spec, 0)?)?, clark_function(&u, a, coords(spec, 1)?)?)
        }
        _ => {
            let a = alpha.as_finite().ok_or_else(|| Error::Input("finite alpha required".into()))?;
            let p1 = root_polynomial(&u, a, coords(spec, 0)?)?;
            let p2 = root_polynomial(&u, a, coords(spec, 1)?)?;
            (functional_calculus(&u, alpha, &p1)?, functional_calculus(&u, alpha, &p2)?)
        }
    };
    let (b1, b2) = (d.compose(&x1)?, x2.compose(&d)?);
    let r = zero_product_analysis(&b1, &b2, spec.tol)?;
    let out = if spec.variant() == "cross-class" {
        Outcome::with(r.product_norm > limits::CROSS_CLASS && !r.is_zero, r.product_norm)
    } else {
        let relative = r.product_norm / (b1.norm() * b2.norm()).max(1.0);
        Outcome::with(relative < limits::ZERO_PRODUCT && r.is_zero && r.agree, relative)
    };
    Ok(out)
}

// ---------------------------------------------------------------------------
// product criteria

fn gen_toeplitz_product(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let mut spec = base(rng, "products.toeplitz", seed, ctx, 6, false)?;
    let variant = pick(rng, &["same-class", "identity", "cross-class", "random"]);
    let n = spec.u.degree();
    match variant.as_str() {
        "same-class" => {
            spec.alpha = Some(any_alpha(rng));
            spec.vectors.push(random_coords(rng, n));
            spec.vectors.push(random_coords(rng, n));
            spec.c = Some(unit_box(rng));
        }
        "cross-class" => {
            spec.vectors.push(random_coords(rng, n));
            spec.vectors.push(random_coords(rng, n));
            spec.c = Some(unit_box(rng));
        }
        _ => {
            spec.v = Some(if variant == "identity" { spec.u.clone() } else { inner(rng, 1, 6, false)? });
            spec.w = Some(inner(rng, 1, 6, false)?);
            spec.symbols.push(random_laurent(rng, -3, 3));
            spec.symbols.push(random_laurent(rng, -3, 3));
        }
    }
    spec.variant = Some(variant);
    Ok(spec)
}

fn eval_toeplitz_product(spec: &ProblemSpec) -> Result<Outcome> {
    let u = spec.space_u()?;
    let (a, b, expected) = match spec.variant() {
        "same-class" => {
            let alpha = spec.get(spec.alpha, "alpha")?;
            (sedlock_member(spec, &u, 0, alpha)?, sedlock_member(spec, &u, 1, alpha)?, Some(true))
        }
        "cross-class" => (
            sedlock_member(spec, &u, 0, ExtendedScalar::Finite(ZERO))?,
            sedlock_member(spec, &u, 1, ExtendedScalar::Infinity)?,
            Some(false),
        ),
        variant => {
            let (v, w) = (spec.space_v()?, spec.space_w()?);
            let a = tto_matrix(&v, &w, spec.symbol(0)?)?;
            let b = if variant == "identity" { OperatorMatrix::identity(&u) } else { tto_matrix(&u, &v, spec.symbol(1)?)? };
            (a, b, (variant == "identity").then_some(true))
        }
    };
    Ok(verdict_outcome(&products::atto_product_test(&a, &b, spec.tol)?, expect(expected, &[u.dim()])))
}

fn gen_hankel_pair(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let mut spec = base(rng, "products.hankel-pair", seed, ctx, 6, true)?;
    let variant = pick(rng, &["same-class", "scalar", "mismatched", "random"]);
    let n = spec.u.degree();
    spec.alpha = Some(any_alpha(rng));
    let mut beta = any_alpha(rng);
    while beta.chordal_distance(spec.alpha.unwrap_or(beta)) < 0.1 {
        beta = any_alpha(rng);
    }
    spec.beta = Some(beta);
    spec.vectors.push(random_coords(rng, n));
    spec.vectors.push(random_coords(rng, n));
    spec.c = Some(unit_box(rng));
    spec.symbols.push(random_laurent(rng, -4, 3));
    spec.symbols.push(random_laurent(rng, -4, 3));
    spec.variant = Some(variant);
    Ok(spec)
}

fn eval_hankel_pair(spec: &ProblemSpec) -> Result<Outcome> {
    let u = spec.space_u()?;
    let d = dee(&u)?;
    let alpha = spec.get(spec.alpha, "alpha")?;
    let beta = spec.get(spec.beta, "beta")?;
    let (b1, b2, expected) = match spec.variant() {
        "same-class" => (sedlock_member(spec, &u, 0, alpha)?.compose(&d)?, d.compose(&sedlock_member(spec, &u, 1, alpha)?)?, Some(true)),
        "scalar" => (tho_matrix(&u, &u, spec.symbol(0)?)?, d.scale(spec.c.unwrap_or(ONE)), Some(true)),
        "mismatched" => (sedlock_member(spec, &u, 0, alpha)?.compose(&d)?, d.compose(&sedlock_member(spec, &u, 1, beta)?)?, Some(false)),
        _ => (tho_matrix(&u, &u, spec.symbol(0)?)?, tho_matrix(&u, &u, spec.symbol(1)?)?, None),
    };
    Ok(verdict_outcome(&products::tho_product_tto_test(&b1, &b2, spec.tol)?, expect(expected, &[u.dim()])))
}

fn gen_hankel_forms(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let mut spec = base_from(rng, "products.hankel-forms", seed, ctx, 2, 6, true)?;
    let variant = pick(rng, &["disk", "outside", "circle"]);
    spec.alpha = Some(ExtendedScalar::Finite(match variant.as_str() {
        "disk" => disk_point(rng, 0.9),
        "outside" => outside_point(rng),
        _ => circle_point(rng),
    }));
    for _ in 0..2 {
        let degree = rng.gen_range(1..=3);
        spec.symbols.push(RationalSymbol::polynomial((0..=degree).map(|_| unit_box(rng)).collect()));
    }
    spec.variant = Some(variant);
    Ok(spec)
}

fn eval_hankel_forms(spec: &ProblemSpec) -> Result<Outcome> {
    let u = spec.space_u()?;
    let alpha = spec.get(spec.alpha, "alpha")?;
    let a = alpha.as_finite().ok_or_else(|| Error::Input("finite alpha required".into()))?;
    let (g1, g2) = (spec.symbol(0)?, spec.symbol(1)?);
    let (b1, b2) = if spec.variant() == "circle" {
        let d = dee(&u)?;
        (d.compose(&functional_calculus(&u, alpha, g1)?)?.compose(&d)?.compose(&d)?, d.compose(&functional_calculus(&u, alpha, g2)?)?)
    } else {
        products::regime_factors(&u, a, g1, g2)?
    };
    // for the circle case B1 = Ψ1(S^α) D, written through D D = I above
    let b1 = if spec.variant() == "circle" { functional_calculus(&u, alpha, g1)?.compose(&dee(&u)?)? } else { b1 };
    let forms = match products::tho_product_symbol_forms(&b1, &b2, spec.tol) {
        Ok(f) => f,
        Err(Error::NoCertificate { residual }) => return Ok(Outcome::with(false, residual).note("no symbol certificate")),
        Err(e) => return Err(e),
    };
    let class_error = forms.alpha.chordal_distance(alpha);
    let mut worst = forms.rebuild_residuals[0].max(forms.rebuild_residuals[1]);
    if let Some(r) = &forms.regime {
        worst = worst.max(r.factor_residuals[0]).max(r.factor_residuals[1]).max(r.product_residual);
    }
    let regime_ok = forms.regime.is_some() == (spec.variant() != "circle");
    Ok(Outcome::with(class_error < limits::CLASS * 10.0 && worst < limits::REBUILD && regime_ok, worst)
        .note(format!("class error {class_error:e}")))
}

fn gen_mixed(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let mut spec = gen_hankel_pair(rng, seed, ctx)?;
    spec.operation = "products.mixed".into();
    let variant = pick(rng, &["same-class", "scalar-identity", "scalar-dee", "mismatched", "random"]);
    let order = pick(rng, &["ab", "ba"]);
    spec.variant = Some(format!("{variant}/{order}"));
    Ok(spec)
}

fn eval_mixed(spec: &ProblemSpec) -> Result<Outcome> {
    let u = spec.space_u()?;
    let d = dee(&u)?;
    let alpha = spec.get(spec.alpha, "alpha")?;
    let beta = spec.get(spec.beta, "beta")?;
    let (variant, order) = spec.variant().split_once('/').ok_or_else(|| Error::Input("variant must be kind/order".into()))?;
    let order = if order == "ab" { Order::AB } else { Order::BA };
    let fold = |x: OperatorMatrix| -> Result<OperatorMatrix> {
        match order {
            Order::AB => x.compose(&d),
            Order::BA => d.compose(&x),
        }
    };
    let c = spec.c.unwrap_or(ONE);
    let (a, b, expected) = match variant {
        "same-class" => (sedlock_member(spec, &u, 0, alpha)?, fold(sedlock_member(spec, &u, 1, alpha)?)?, Some(true)),
        "scalar-identity" => (OperatorMatrix::identity(&u).scale(c), tho_matrix(&u, &u, spec.symbol(0)?)?, Some(true)),
        "scalar-dee" => (tto_matrix(&u, &u, spec.symbol(0)?)?, d.scale(c), Some(true)),
        "mismatched" => (sedlock_member(spec, &u, 0, alpha)?, fold(sedlock_member(spec, &u, 1, beta)?)?, Some(false)),
        _ => (tto_matrix(&u, &u, spec.symbol(0)?)?, tho_matrix(&u, &u, spec.symbol(1)?)?, None),
    };
    Ok(verdict_outcome(&products::mixed_product_test(&a, &b, order, spec.tol)?, expect(expected, &[u.dim()])))
}

fn three_spaces(rng: &mut TrialRng, spec: &mut ProblemSpec, max_degree: usize) -> Result<()> {
    spec.v = Some(inner(rng, 1, max_degree, false)?);
    spec.w = Some(inner(rng, 1, max_degree, false)?);
    Ok(())
}

/// `conj(ψ)` for `ψ` with the given coordinates in `K_{dom · hat(cod)}`.
fn hankel_symbol(dom: &Arc<ModelSpace>, cod: &Arc<ModelSpace>, coords: &[Complex64]) -> Result<RationalSymbol> {
    Ok(hankel_symbol_space(dom, cod)?.element(coords.to_vec())?.to_symbol().conj())
}

fn recovered_symbol(b: &OperatorMatrix) -> Result<RationalSymbol> {
    Ok(recover_tho_symbol(b)?.0.to_symbol().conj())
}

fn gen_hankel_hankel(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let mut spec = base(rng, "products.hankel-hankel", seed, ctx, 5, false)?;
    three_spaces(rng, &mut spec, 5)?;
    let variant = pick(rng, &["random", "same-space", "symmetric", "rank-one", "zero"]);
    if variant == "same-space" || variant == "symmetric" {
        spec.w = Some(spec.u.clone());
    }
    let (du, dv, dw) =
        (spec.u.degree(), spec.v.as_ref().map_or(1, InnerFunction::degree), spec.w.as_ref().map_or(1, InnerFunction::degree));
    spec.vectors.push(random_coords(rng, dv + dw));
    spec.vectors.push(random_coords(rng, du + dv));
    spec.lambda = Some(disk_point(rng, 0.9));
    spec.variant = Some(variant);
    Ok(spec)
}

fn eval_hankel_hankel(spec: &ProblemSpec) -> Result<Outcome> {
    let (u, v, w) = (spec.space_u()?, spec.space_v()?, spec.space_w()?);
    let (phi1, phi2, expected) = match spec.variant() {
        "rank-one" => {
            let lambda = spec.get(spec.lambda, "lambda")?;
            let b1 = rank_one(&w.conj_kernel(lambda)?, &v.conj_kernel(lambda.conj())?);
            let b2 = rank_one(&v.kernel(lambda.conj())?, &u.kernel(lambda)?);
            (recovered_symbol(&b1)?, recovered_symbol(&b2)?, Some(true))
        }
        "zero" => (hankel_symbol(&v, &w, coords(spec, 0)?)?, RationalSymbol::zero(), Some(true)),
        "symmetric" => {
            let phi1 = hankel_symbol(&v, &w, coords(spec, 0)?)?;
            let phi2 = phi1.hat();
            (phi1, phi2, None)
        }
        _ => (hankel_symbol(&v, &w, coords(spec, 0)?)?, hankel_symbol(&u, &v, coords(spec, 1)?)?, None),
    };
    let verdict = products::atho_product_tto_test(&u, &v, &w, &phi1, &phi2, spec.tol)?;
    let mut out = verdict_outcome(&verdict, expected);
    if spec.variant() == "symmetric" {
        if let Some(witness) = &verdict.witness {
            let asym = products::witness_asymmetry(witness, &u.kernel(ZERO)?).unwrap_or(f64::INFINITY);
            let scale = match witness {
                Witness::Pair { phi, .. } => phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0),
                _ => 1.0,
            };
            if asym > limits::REBUILD * scale {
                out = Outcome::with(false, asym).note("witnesses of the symmetric case differ");
            }
        }
    }
    Ok(out)
}

fn gen_hankel_toeplitz(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let mut spec = base(rng, "products.hankel-toeplitz", seed, ctx, 5, false)?;
    three_spaces(rng, &mut spec, 5)?;
    let variant = pick(rng, &["random", "zero-toeplitz", "scalar", "rank-one"]);
    let order = pick(rng, &["ba", "ab"]);
    if variant == "scalar" {
        // the Toeplitz factor is an endomorphism
        if order == "ba" {
            spec.v = Some(spec.u.clone());
        } else {
            spec.w = spec.v.clone();
        }
    }
    let (du, dv, dw) =
        (spec.u.degree(), spec.v.as_ref().map_or(1, InnerFunction::degree), spec.w.as_ref().map_or(1, InnerFunction::degree));
    // Hankel symbol coordinates, then ψ1 (codomain of A), ψ2 (domain of A)
    let (hs, p1, p2) = if order == "ba" { (dv + dw, dv, du) } else { (du + dv, dw, dv) };
    spec.vectors.push(random_coords(rng, hs));
    spec.vectors.push(random_coords(rng, p1));
    spec.vectors.push(random_coords(rng, p2));
    spec.lambda = Some(disk_point(rng, 0.9));
    spec.c = Some(unit_box(rng));
    spec.variant = Some(format!("{variant}/{order}"));
    Ok(spec)
}

struct HankelToeplitzData {
    order: Order,
    phi: RationalSymbol,
    psi1: SpaceElement,
    psi2: SpaceElement,
    expected: Option<bool>,
}

fn hankel_toeplitz_data(spec: &ProblemSpec) -> Result<HankelToeplitzData> {
    let (u, v, w) = (spec.space_u()?, spec.space_v()?, spec.space_w()?);
    let (variant, order) = spec.variant().split_once('/').ok_or_else(|| Error::Input("variant must be kind/order".into()))?;
    let order = if order == "ab" { Order::AB } else { Order::BA };
    let (t_dom, t_cod, h_dom, h_cod) = match order {
        Order::BA => (&u, &v, &v, &w),
        Order::AB => (&v, &w, &u, &v),
    };
    let lambda = spec.get(spec.lambda, "lambda")?;
    let (phi, psi1, psi2, expected) = match variant {
        "rank-one" => {
            let (a, b) = match order {
                // B A = <k~_λ, k_λ> k^w_{conj λ} ⊗ k^u_λ
                Order::BA => {
                    (rank_one(&v.conj_kernel(lambda)?, &u.kernel(lambda)?), rank_one(&w.kernel(lambda.conj())?, &v.kernel(lambda)?))
                }
                // the adjoint of the same construction on (w, v, u)
                Order::AB => {
                    (rank_one(&w.kernel(lambda)?, &v.conj_kernel(lambda)?), rank_one(&v.kernel(lambda)?, &u.kernel(lambda.conj())?))
                }
            };
            let parts = is_tto(&a, spec.tol)?;
            (recovered_symbol(&b)?, parts.psi1, parts.psi2, Some(true))
        }
        "zero-toeplitz" => (hankel_symbol(h_dom, h_cod, coords(spec, 0)?)?, t_cod.zero_element(), t_dom.zero_element(), Some(true)),
        "scalar" => (
            hankel_symbol(h_dom, h_cod, coords(spec, 0)?)?,
            t_cod.kernel(ZERO)?.scale(spec.c.unwrap_or(ONE)),
            t_dom.zero_element(),
            Some(true),
        ),
        _ => (hankel_symbol(h_dom, h_cod, coords(spec, 0)?)?, element(spec, 1, t_cod)?, element(spec, 2, t_dom)?, None),
    };
    Ok(HankelToeplitzData { order, phi, psi1, psi2, expected })
}

fn eval_hankel_toeplitz(spec: &ProblemSpec) -> Result<Outcome> {
    let (u, v, w) = (spec.space_u()?, spec.space_v()?, spec.space_w()?);
    let d = hankel_toeplitz_data(spec)?;
    let verdict = products::atho_atto_product_test(&u, &v, &w, &d.phi, &d.psi1, &d.psi2, d.order, spec.tol)?;
    Ok(verdict_outcome(&verdict, d.expected))
}

fn eval_hankel_toeplitz_conjugated(spec: &ProblemSpec) -> Result<Outcome> {
    let (u, v, w) = (spec.space_u()?, spec.space_v()?, spec.space_w()?);
    let d = hankel_toeplitz_data(spec)?;
    let (t_dom, t_cod, h_dom, h_cod) = match d.order {
        Order::BA => (&u, &v, &v, &w),
        Order::AB => (&v, &w, &u, &v),
    };
    let a = tto_matrix(t_dom, t_cod, &(&d.psi1.to_symbol() + &d.psi2.to_symbol().conj()))?;
    let b = tho_matrix(h_dom, h_cod, &d.phi)?;
    let verdict = products::hankel_toeplitz_conjugated_test(&a, &b, d.order, spec.tol)?;
    Ok(verdict_outcome(&verdict, d.expected))
}

fn gen_chain(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let mut spec = base(rng, "products.chain", seed, ctx, 5, false)?;
    three_spaces(rng, &mut spec, 5)?;
    let variant = pick(rng, &["random", "analytic", "rank-one"]);
    let first = if variant == "analytic" { random_laurent(rng, 0, 3) } else { random_laurent(rng, -3, 3) };
    spec.symbols.push(first);
    spec.symbols.push(random_laurent(rng, -3, 3));
    spec.lambda = Some(disk_point(rng, 0.9));
    spec.variant = Some(variant);
    Ok(spec)
}

fn chain_symbols(spec: &ProblemSpec, toeplitz: bool) -> Result<(RationalSymbol, RationalSymbol, Option<bool>)> {
    if spec.variant() != "rank-one" {
        let expected = (spec.variant() == "analytic").then_some(true);
        return Ok((spec.symbol(0)?.clone(), spec.symbol(1)?.clone(), expected));
    }
    let (u, v, w) = (spec.space_u()?, spec.space_v()?, spec.space_w()?);
    let lambda = spec.get(spec.lambda, "lambda")?;
    let b1 = if toeplitz {
        rank_one(&w.conj_kernel(lambda)?, &v.conj_kernel(lambda.conj())?)
    } else {
        rank_one(&w.kernel(lambda.conj())?, &v.kernel(lambda)?)
    };
    let b2 = rank_one(&v.kernel(lambda.conj())?, &u.kernel(lambda)?);
    Ok((recovered_symbol(&b1)?, recovered_symbol(&b2)?, Some(true)))
}

fn eval_chain(spec: &ProblemSpec, toeplitz: bool) -> Result<Outcome> {
    let (u, v, w) = (spec.space_u()?, spec.space_v()?, spec.space_w()?);
    let (phi1, phi2, expected) = chain_symbols(spec, toeplitz)?;
    let r = if toeplitz {
        products::toeplitz_product_chain(&u, &v, &w, &phi1, &phi2, spec.tol)?
    } else {
        products::hankel_product_chain(&u, &v, &w, &phi1, &phi2, spec.tol)?
    };
    let pass = r.agree && expected.is_none_or(|e| e == r.memberships[0]);
    let out = Outcome::with(pass, if pass { 0.0 } else { 1.0 });
    Ok(if pass { out } else { out.note(format!("memberships {:?}", r.memberships)) })
}

fn eval_hankel_chain(spec: &ProblemSpec) -> Result<Outcome> {
    eval_chain(spec, false)
}

fn eval_toeplitz_chain(spec: &ProblemSpec) -> Result<Outcome> {
    eval_chain(spec, true)
}

fn gen_rank_one_example(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let mut spec = base(rng, "products.rank-one-example", seed, ctx, 6, true)?;
    spec.lambda = Some(disk_point(rng, 0.9));
    if seed.is_multiple_of(8) {
        spec.u = InnerFunction::monomial(2);
        spec.lambda = Some(Complex64::new(0.3, 0.0));
    }
    Ok(spec)
}

fn eval_rank_one_example(spec: &ProblemSpec) -> Result<Outcome> {
    let u = spec.space_u()?;
    let r = products::rank_one_product_identities(&u, spec.get(spec.lambda, "lambda")?)?;
    let (b1, _, _) = crate::classify::kernel_products(&u, spec.get(spec.lambda, "lambda")?)?;
    let scale = scale_of(&b1);
    let worst = r.product_residual.max(r.mixed_residual) / scale;
    Ok(Outcome::below(worst, limits::EXAMPLE).note(format!("alternate convention residual {:e}", r.alternate_residual)))
}

// ---------------------------------------------------------------------------
// numerical hygiene

fn gen_doubling(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let mut spec = base(rng, "hygiene.quadrature-doubling", seed, ctx, 8, false)?;
    spec.v = Some(inner(rng, 1, 8, false)?);
    spec.symbols.push(random_laurent(rng, -6, 6));
    spec.alpha = Some(ExtendedScalar::Finite(disk_point(rng, 0.9)));
    Ok(spec)
}

fn eval_doubling(spec: &ProblemSpec) -> Result<Outcome> {
    let (u, v) = (spec.space_u()?, spec.space_v()?);
    let q = spec.quadrature;
    let doubled = Quadrature { start: q.start * 2, cap: q.cap.max(q.start * 2), ..q };
    let (u2, v2) = (u.requadrature(doubled)?, v.requadrature(doubled)?);
    let phi = spec.symbol(0)?;
    let alpha = spec.get(spec.alpha, "alpha")?;
    let pairs = [
        (tto_matrix(&u, &v, phi)?, tto_matrix(&u2, &v2, phi)?),
        (tho_matrix(&u, &v, phi)?, tho_matrix(&u2, &v2, phi)?),
        (functional_calculus(&u, alpha, phi)?, functional_calculus(&u2, alpha, phi)?),
        (u.conjugation_c()?, u2.conjugation_c()?),
    ];
    let worst = pairs.iter().map(|(a, b)| a.matrix().max_dist(b.matrix())).fold(0.0, f64::max);
    Ok(Outcome::below(worst, limits::HYGIENE))
}

fn gen_monomial(rng: &mut TrialRng, seed: u64, ctx: &TrialContext) -> Result<ProblemSpec> {
    let n = (seed % 8) as usize + 1;
    let mut spec = ProblemSpec::new("hygiene.monomial-oracle", seed, InnerFunction::monomial(n), ctx.tol, ctx.quadrature);
    let d = rng.gen_range(1..=12);
    spec.vectors.push((0..2 * d + 1).map(|_| unit_box(rng)).collect());
    Ok(spec)
}

fn eval_monomial(spec: &ProblemSpec) -> Result<Outcome> {
    let u = spec.space_u()?;
    let n = u.dim();
    let coeffs = coords(spec, 0)?;
    let d = (coeffs.len() / 2) as i64;
    let c = |k: i64| if k.abs() <= d { coeffs[(k + d) as usize] } else { ZERO };
    let phi = RationalSymbol::laurent(-(d as i32), coeffs.to_vec());
    let a = tto_matrix(&u, &u, &phi)?;
    let b = tho_matrix(&u, &u, &phi)?;
    let ta = CMatrix::from_fn(n, n, |i, j| c(i as i64 - j as i64));
    let tb = CMatrix::from_fn(n, n, |i, j| c(-(i as i64 + j as i64 + 1)));
    Ok(Outcome::below(a.matrix().max_dist(&ta).max(b.matrix().max_dist(&tb)), limits::HYGIENE))
}
