//! Adaptive trapezoid rule on the unit circle.
//!
//! Every pairing in the crate is a circle mean `(1/2pi) int f(e^{it}) dt` of
//! a function analytic in an annulus around the circle, for which the
//! trapezoid rule converges geometrically. The node count is doubled from
//! `start` until two successive means agree to `tol`; hitting `cap` is an error.

use std::cell::Cell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ZERO;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub tol: f64,
    pub start: usize,
    pub cap: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { tol: 1e-12, start: 1024, cap: 65536 }
    }
}

/// Per-thread counters, read and reset by the verification harness.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureStats {
    pub calls: u64,
    pub max_nodes: usize,
    pub failures: u64,
}

thread_local! {
    static STATS: Cell<QuadratureStats> = const { Cell::new(QuadratureStats { calls: 0, max_nodes: 0, failures: 0 }) };
}

pub fn take_stats() -> QuadratureStats {
    STATS.with(|s| s.replace(QuadratureStats::default()))
}

fn record(nodes: usize, failed: bool) {
    STATS.with(|s| {
        let mut st = s.get();
        st.calls += 1;
        st.max_nodes = st.max_nodes.max(nodes);
        st.failures += u64::from(failed);
        s.set(st);
    });
}

pub fn node(m: usize, total: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * m as f64 / total as f64)
}

impl Quadrature {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    /// Circle mean of a vector-valued integrand. `integrand(z, out)` must
    /// overwrite `out` (length `width`) with the integrand values at `z`.
    pub fn mean<F>(&self, width: usize, mut integrand: F) -> Result<Vec<Complex64>>
    where
        F: FnMut(Complex64, &mut [Complex64]),
    {
        let start = self.start.max(4);
        let mut buf = vec![ZERO; width];
        let mut sum = vec![ZERO; width];
        for m in 0..start {
            integrand(node(m, start), &mut buf);
            for (s, b) in sum.iter_mut().zip(&buf) {
                *s += b;
            }
        }
        let mut nodes = start;
        let mut prev: Vec<Complex64> = sum.iter().map(|s| s / nodes as f64).collect();
        let mut last_change = f64::INFINITY;
        while nodes * 2 <= self.cap.max(start) {
            let total = nodes * 2;
            for m in (1..total).step_by(2) {
                integrand(node(m, total), &mut buf);
                for (s, b) in sum.iter_mut().zip(&buf) {
                    *s += b;
                }
            }
            nodes = total;
            let cur: Vec<Complex64> = sum.iter().map(|s| s / nodes as f64).collect();
            last_change = cur.iter().zip(&prev).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            if !last_change.is_finite() {
                break;
            }
            if last_change < self.tol {
                record(nodes, false);
                return Ok(cur);
            }
            prev = cur;
        }
        record(nodes, true);
        Err(Error::NoConvergence { cap: self.cap, last_change })
    }

    pub fn mean_scalar<F>(&self, mut f: F) -> Result<Complex64>
    where
        F: FnMut(Complex64) -> Complex64,
    {
        Ok(self.mean(1, |z, out| out[0] = f(z))?[0])
    }

    /// The same mean with twice the converged node budget, used to audit
    /// quadrature sensitivity.
    pub fn refined(&self) -> Self {
        Self { tol: self.tol, start: self.start * 2, cap: self.cap * 2 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomials_are_orthonormal() {
        let q = Quadrature::default();
        let v = q.mean(3, |z, out| {
            out[0] = z * z.conj();
            out[1] = z * z * (z * z * z).conj();
            out[2] = z.powi(5);
        });
        let v = v.unwrap();
        assert!((v[0] - 1.0).norm() < 1e-14);
        assert!(v[1].norm() < 1e-14);
        assert!(v[2].norm() < 1e-14);
    }

    #[test]
    fn geometric_kernel_mean() {
        // mean of 1/(1 - z/2) over the circle is its value at 0.
        let q = Quadrature::default();
        let m = q.mean_scalar(|z| 1.0 / (1.0 - 0.5 * z)).unwrap();
        assert!((m - 1.0).norm() < 1e-14);
    }

    #[test]
    fn impossible_tolerance_reports_no_convergence() {
        let q = Quadrature { tol: 0.0, start: 1024, cap: 4096 };
        let err = q.mean_scalar(|z| 1.0 / (1.0 - 0.999 * z)).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { cap: 4096, .. }));
        assert!(take_stats().failures >= 1);
    }
}
