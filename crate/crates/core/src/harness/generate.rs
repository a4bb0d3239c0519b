//! Seeded random instances and the replayable problem description.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blaschke::{ExtendedScalar, InnerFunction};
use crate::error::{Error, Result};
use crate::modelspace::{ModelSpace, RationalSymbol, SpaceElement};
use crate::quadrature::Quadrature;

pub const SCHEMA: &str = "v1";
/// Random Blaschke zeros stay inside this radius.
pub const ZERO_RADIUS: f64 = 0.85;
pub const MAX_DEGREE: usize = 32;

pub type TrialRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Everything needed to rebuild and replay one trial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub schema: String,
    pub operation: String,
    pub seed: u64,
    pub u: InnerFunction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<InnerFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<InnerFunction>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub symbols: Vec<RationalSymbol>,
    /// Coordinates of model-space elements in the basis of the space the
    /// operation assigns them to.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vectors: Vec<Vec<Complex64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<ExtendedScalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<ExtendedScalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    pub tol: f64,
    pub quadrature: Quadrature,
}

impl ProblemSpec {
    pub fn new(operation: &str, seed: u64, u: InnerFunction, tol: f64, quadrature: Quadrature) -> Self {
        Self {
            schema: SCHEMA.into(),
            operation: operation.into(),
            seed,
            u,
            v: None,
            w: None,
            symbols: Vec::new(),
            vectors: Vec::new(),
            alpha: None,
            beta: None,
            lambda: None,
            eta: None,
            c: None,
            variant: None,
            tol,
            quadrature,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::Input(format!("unsupported schema {:?}", self.schema)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Input("tolerance must be positive".into()));
        }
        if self.w.is_some() && self.v.is_none() {
            return Err(Error::Input("space w given without v".into()));
        }
        Ok(())
    }

    fn space_of(&self, inner: &InnerFunction) -> Result<Arc<ModelSpace>> {
        ModelSpace::with_quadrature(inner.clone(), self.quadrature)
    }

    pub fn space_u(&self) -> Result<Arc<ModelSpace>> {
        self.space_of(&self.u)
    }

    pub fn space_v(&self) -> Result<Arc<ModelSpace>> {
        self.space_of(self.v.as_ref().ok_or_else(|| Error::Input(format!("{} needs space v", self.operation)))?)
    }

    pub fn space_w(&self) -> Result<Arc<ModelSpace>> {
        self.space_of(self.w.as_ref().ok_or_else(|| Error::Input(format!("{} needs space w", self.operation)))?)
    }

    pub fn symbol(&self, k: usize) -> Result<&RationalSymbol> {
        self.symbols.get(k).ok_or_else(|| Error::Input(format!("{} needs symbol #{k}", self.operation)))
    }

    pub fn vector(&self, k: usize, space: &Arc<ModelSpace>) -> Result<SpaceElement> {
        let v = self.vectors.get(k).ok_or_else(|| Error::Input(format!("{} needs vector #{k}", self.operation)))?;
        space.element(v.clone())
    }

    pub fn variant(&self) -> &str {
        self.variant.as_deref().unwrap_or("")
    }

    pub fn get<T: Copy>(&self, value: Option<T>, name: &str) -> Result<T> {
        value.ok_or_else(|| Error::Input(format!("{} needs parameter {name}", self.operation)))
    }
}

/// Constraints on a generated instance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceConstraints {
    pub real_symmetric: bool,
    /// Attach this Sedlock/Clark parameter to the instance.
    pub clark_alpha: Option<ExtendedScalar>,
}

pub fn unit_box(rng: &mut TrialRng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

/// A point of the closed disk of radius `r`, uniform in area.
pub fn disk_point(rng: &mut TrialRng, r: f64) -> Complex64 {
    Complex64::from_polar(r * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI))
}

pub fn circle_point(rng: &mut TrialRng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI))
}

/// Finite Blaschke product of the given degree with zeros in `|a| <= 0.85`.
pub fn random_inner(rng: &mut TrialRng, degree: usize, real_symmetric: bool) -> Result<InnerFunction> {
    if degree == 0 || degree > MAX_DEGREE {
        return Err(Error::InvalidRange(format!("degree {degree} outside [1, {MAX_DEGREE}]")));
    }
    if !real_symmetric {
        let zeros = (0..degree).map(|_| disk_point(rng, ZERO_RADIUS)).collect();
        return InnerFunction::new(zeros, circle_point(rng));
    }
    let mut zeros = Vec::with_capacity(degree);
    while zeros.len() + 2 <= degree {
        let a = disk_point(rng, ZERO_RADIUS);
        zeros.push(a);
        zeros.push(a.conj());
    }
    if zeros.len() < degree {
        zeros.push(Complex64::new(rng.gen_range(-ZERO_RADIUS..=ZERO_RADIUS), 0.0));
    }
    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    InnerFunction::new(zeros, Complex64::new(sign, 0.0))
}

/// Laurent polynomial with exponents `low..=high` and coefficients in the
/// unit box.
pub fn random_laurent(rng: &mut TrialRng, low: i32, high: i32) -> RationalSymbol {
    RationalSymbol::laurent(low, (low..=high).map(|_| unit_box(rng)).collect())
}

pub fn random_coords(rng: &mut TrialRng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| unit_box(rng)).collect()
}

fn check_range(name: &str, (lo, hi): (usize, usize), cap: usize) -> Result<()> {
    if lo == 0 || lo > hi || hi > cap {
        return Err(Error::InvalidRange(format!("{name} range [{lo}, {hi}] must lie within [1, {cap}]")));
    }
    Ok(())
}

/// A random instance: three spaces `u`, `v`, `w`, one Laurent symbol with
/// exponents in `-d..=d` (`d` drawn from `symbol_degree_range`), and a
/// random element of `K_u`.
pub fn generate_instance(
    seed: u64,
    degree_range: (usize, usize),
    symbol_degree_range: (usize, usize),
    constraints: InstanceConstraints,
) -> Result<ProblemSpec> {
    check_range("degree", degree_range, MAX_DEGREE)?;
    if symbol_degree_range.0 > symbol_degree_range.1 {
        return Err(Error::InvalidRange("symbol degree range is empty".into()));
    }
    let mut rng = rng(seed);
    let draw = |rng: &mut TrialRng| {
        let degree = rng.gen_range(degree_range.0..=degree_range.1);
        random_inner(rng, degree, constraints.real_symmetric)
    };
    let u = draw(&mut rng)?;
    let v = draw(&mut rng)?;
    let w = draw(&mut rng)?;
    let d = rng.gen_range(symbol_degree_range.0..=symbol_degree_range.1) as i32;
    let mut spec = ProblemSpec::new("instance", seed, u, 1e-9, Quadrature::default());
    spec.vectors.push(random_coords(&mut rng, spec.u.degree()));
    spec.v = Some(v);
    spec.w = Some(w);
    spec.symbols.push(random_laurent(&mut rng, -d, d));
    spec.alpha = constraints.clark_alpha;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_instances_are_conjugate_closed() {
        let spec = generate_instance(1, (2, 2), (1, 3), InstanceConstraints { real_symmetric: true, clark_alpha: None }).unwrap();
        for inner in [&spec.u, spec.v.as_ref().unwrap(), spec.w.as_ref().unwrap()] {
            assert!(inner.is_real_symmetric());
            assert_eq!(inner.degree(), 2);
        }
        for degree in 1..=7 {
            let u = random_inner(&mut rng(degree as u64), degree, true).unwrap();
            assert!(u.is_real_symmetric() && u.degree() == degree);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let c = InstanceConstraints::default();
        let a = generate_instance(1, (1, 6), (0, 4), c).unwrap();
        let b = generate_instance(1, (1, 6), (0, 4), c).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let other = generate_instance(2, (1, 6), (0, 4), c).unwrap();
        assert_ne!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&other).unwrap());
    }

    #[test]
    fn sweep_respects_invariants() {
        for seed in 0..1000 {
            let spec = generate_instance(seed, (1, 6), (0, 4), InstanceConstraints::default()).unwrap();
            for inner in [&spec.u, spec.v.as_ref().unwrap(), spec.w.as_ref().unwrap()] {
                assert!((1..=6).contains(&inner.degree()));
                assert!(inner.zeros().iter().all(|a| a.norm() <= ZERO_RADIUS));
                assert!((inner.constant().norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ranges_are_checked() {
        let c = InstanceConstraints::default();
        assert!(matches!(generate_instance(1, (0, 3), (0, 1), c), Err(Error::InvalidRange(_))));
        assert!(matches!(generate_instance(1, (2, 33), (0, 1), c), Err(Error::InvalidRange(_))));
        assert!(matches!(generate_instance(1, (4, 3), (0, 1), c), Err(Error::InvalidRange(_))));
        assert!(matches!(generate_instance(1, (1, 3), (2, 1), c), Err(Error::InvalidRange(_))));
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = generate_instance(
            5,
            (1, 4),
            (1, 2),
            InstanceConstraints { real_symmetric: false, clark_alpha: Some(ExtendedScalar::Infinity) },
        )
        .unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"schema\":\"v1\""));
        let back: ProblemSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        back.validate().unwrap();
    }
}
