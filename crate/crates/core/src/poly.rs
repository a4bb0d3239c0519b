//! Dense complex polynomials, coefficients in ascending powers of `z`.

use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::{CMatrix, ONE, ZERO};

pub type Poly = Vec<Complex64>;

/// Drops exactly-zero high-order coefficients.
pub fn trim(mut p: Poly) -> Poly {
    while p.last() == Some(&ZERO) {
        p.pop();
    }
    p
}

pub fn degree(p: &[Complex64]) -> Option<usize> {
    p.iter().rposition(|&c| c != ZERO)
}

pub fn eval(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

pub fn add(a: &[Complex64], b: &[Complex64]) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n).map(|k| a.get(k).copied().unwrap_or(ZERO) + b.get(k).copied().unwrap_or(ZERO)).collect();
    trim(out)
}

pub fn scale(a: &[Complex64], k: Complex64) -> Poly {
    trim(a.iter().map(|&c| c * k).collect())
}

pub fn mul(a: &[Complex64], b: &[Complex64]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == ZERO {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// Multiplies by `z^k`.
pub fn shift(a: &[Complex64], k: usize) -> Poly {
    if a.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; k];
    out.extend_from_slice(a);
    out
}

/// `z - a`
pub fn linear_root(a: Complex64) -> Poly {
    vec![-a, ONE]
}

/// `1 - conj(a) z`
pub fn linear_pole(a: Complex64) -> Poly {
    trim(vec![ONE, -a.conj()])
}

/// Coefficients reversed (`z^d p(1/z)`, `d` the degree).
pub fn reversed(p: &[Complex64]) -> Poly {
    let p = trim(p.to_vec());
    p.into_iter().rev().collect()
}

/// Coefficients reversed and conjugated: on the circle this is
/// `z^d conj(p(z))`.
pub fn reversed_conj(p: &[Complex64]) -> Poly {
    let p = trim(p.to_vec());
    p.into_iter().rev().map(|c| c.conj()).collect()
}

pub fn conj(p: &[Complex64]) -> Poly {
    p.iter().map(Complex64::conj).collect()
}

/// Number of leading (low-order) coefficients that are exactly zero.
pub fn low_order_zeros(p: &[Complex64]) -> usize {
    p.iter().take_while(|&&c| c == ZERO).count()
}

/// Roots via the eigenvalues of the companion matrix. Roots at the origin
/// are split off exactly first.
pub fn roots(p: &[Complex64]) -> Result<Vec<Complex64>> {
    let p = trim(p.to_vec());
    if p.len() <= 1 {
        return Ok(Vec::new());
    }
    let k = low_order_zeros(&p);
    let mut out = vec![ZERO; k];
    let q = &p[k..];
    let d = q.len() - 1;
    if d == 0 {
        return Ok(out);
    }
    let lead = q[d];
    let mut comp = CMatrix::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = ONE;
    }
    for i in 0..d {
        comp[(i, d - 1)] = -q[i] / lead;
    }
    out.extend(comp.eigenvalues()?);
    Ok(out)
}

/// Monic polynomial with the given roots.
pub fn from_roots(roots: &[Complex64]) -> Poly {
    roots.iter().fold(vec![ONE], |acc, &r| mul(&acc, &linear_root(r)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn multiply_and_evaluate() {
        let p = from_roots(&[c(0.5, 0.0), c(0.0, -0.25)]);
        assert!(eval(&p, c(0.5, 0.0)).norm() < 1e-15);
        assert!(eval(&p, c(0.0, -0.25)).norm() < 1e-15);
        assert_eq!(p.len(), 3);
        assert_eq!(p[2], ONE);
    }

    #[test]
    fn companion_roots() {
        let want = [c(0.3, 0.4), c(-0.7, 0.1), c(2.0, -1.0), ZERO];
        let p = from_roots(&want);
        let mut got = roots(&p).unwrap();
        for w in want {
            let (idx, d) = got.iter().enumerate().map(|(i, g)| (i, (g - w).norm())).min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
            assert!(d < 1e-10, "root {w} missing, nearest at {d}");
            got.remove(idx);
        }
    }

    #[test]
    fn reversal_on_circle() {
        let p = vec![c(1.0, 2.0), c(0.0, 1.0), c(3.0, 0.0)];
        let r = reversed_conj(&p);
        let z = Complex64::from_polar(1.0, 0.7);
        let lhs = eval(&r, z);
        let rhs = z * z * eval(&p, z).conj();
        assert!((lhs - rhs).norm() < 1e-14);
    }
}
