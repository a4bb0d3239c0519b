use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm, ZERO};

use super::{ModelSpace, RationalSymbol};

/// A vector of `K_u` in basis coordinates.
#[derive(Clone)]
pub struct SpaceElement {
    space: Arc<ModelSpace>,
    coords: Vec<Complex64>,
}

impl fmt::Debug for SpaceElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpaceElement").field("coords", &self.coords).finish()
    }
}

impl SpaceElement {
    pub fn new(space: Arc<ModelSpace>, coords: Vec<Complex64>) -> Result<Self> {
        if coords.len() != space.dim() {
            return Err(Error::Input(format!("expected {} coordinates, got {}", space.dim(), coords.len())));
        }
        Ok(Self { space, coords })
    }

    pub fn space(&self) -> &Arc<ModelSpace> {
        &self.space
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Complex64> {
        self.coords
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut e = vec![ZERO; self.coords.len()];
        self.space.basis_values(z, &mut e);
        self.coords.iter().zip(&e).map(|(c, e)| c * e).sum()
    }

    pub fn to_symbol(&self) -> RationalSymbol {
        RationalSymbol::element(self)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(Complex64::norm_sqr).sum()
    }

    /// Norm of the represented function by quadrature.
    pub fn quadrature_norm(&self) -> Result<f64> {
        let s = self.to_symbol();
        Ok(self.space.pairing(&s, &s)?.re.max(0.0).sqrt())
    }

    /// `<self, other>`; both must live in the same space.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check(other)?;
        Ok(dot(&self.coords, &other.coords))
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self { space: self.space.clone(), coords: self.coords.iter().map(|c| c * k).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { space: self.space.clone(), coords: axpy(Complex64::new(1.0, 0.0), &other.coords, &self.coords) })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn dist(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.space.same_as(&other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::InnerFunction;

    #[test]
    fn coordinate_norm_matches_quadrature_norm() {
        let u = InnerFunction::new(
            vec![Complex64::new(0.4, 0.4), Complex64::new(-0.8, 0.0), Complex64::new(0.1, -0.3)],
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        let s = ModelSpace::new(u).unwrap();
        let f = s.element(vec![Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.5), Complex64::new(0.0, 3.0)]).unwrap();
        assert!((f.norm() - f.quadrature_norm().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn mixing_spaces_is_rejected() {
        let a = ModelSpace::new(InnerFunction::monomial(2)).unwrap();
        let b = ModelSpace::new(InnerFunction::new(vec![ZERO, Complex64::new(0.5, 0.0)], Complex64::new(1.0, 0.0)).unwrap()).unwrap();
        assert!(matches!(a.zero_element().inner(&b.zero_element()), Err(Error::SpaceMismatch)));
    }
}
