//! Projective power iteration for Perron vectors.
//!
//! Each step maps a ray `p` to `normalize(M p)`. The projective action is
//! `c(M)`-Lipschitz for the pseudo-Hilbert metric, so when `c(M) < 1` the
//! iterates converge geometrically and the last step bounds the distance to the
//! fixed point `p*`:
//!
//! ```text
//! d(p_{n+1}, p*) <= c / (1 - c) * d(p_n, p_{n+1})
//! ```
//!
//! Eigenvalue brackets are the Collatz-Wielandt ratios `min (Mp)/p` and `max (Mp)/p`.

use serde::Serialize;

use crate::cone::{normalize, pseudo_distance, ConeVector, ProjectivePoint};
use crate::error::{Error, Result};
use crate::matrix::{contraction_coeff, is_cone_preserving, NonnegativeMatrix};

/// Above this dimension `c(M)` is not computed and no error bound is reported.
pub const COEFF_DIM_LIMIT: usize = 512;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerronResult {
    pub eigenvector: ProjectivePoint,
    pub eigenvalue_lower: f64,
    pub eigenvalue_upper: f64,
    /// Number of matrix-vector products in the main loop.
    pub iterations: usize,
    /// `d` between the last two iterates.
    pub final_step_distance: f64,
    /// Bound on `d(eigenvector, p*)`, present iff `c(M) < 1` was established.
    pub error_bound: Option<f64>,
    pub converged: bool,
    /// `c(M)` when it was computed.
    pub contraction: Option<f64>,
}

/// One iterate and its distance to the previous one.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub point: ProjectivePoint,
    pub step_distance: f64,
}

/// Infinite iterator over `p_{n+1} = normalize(M p_n)`.
#[derive(Debug, Clone)]
pub struct ProjectiveIteration<'a> {
    m: &'a NonnegativeMatrix,
    current: ProjectivePoint,
}

impl<'a> ProjectiveIteration<'a> {
    pub fn new(m: &'a NonnegativeMatrix, start: &ConeVector) -> Result<Self> {
        if let Some(column) = (0..m.dim()).find(|&j| (0..m.dim()).all(|i| m.get(i, j) == 0.0)) {
            return Err(Error::ZeroColumn { column });
        }
        if start.len() != m.dim() {
            return Err(Error::DimensionMismatch {
                left: m.dim(),
                right: start.len(),
            });
        }
        Ok(Self {
            m,
            current: normalize(start),
        })
    }

    pub fn current(&self) -> &ProjectivePoint {
        &self.current
    }
}

impl Iterator for ProjectiveIteration<'_> {
    type Item = Step;

    fn next(&mut self) -> Option<Step> {
        // Only fails if M p underflows to zero.
        let image = self.m.apply(&self.current).ok()?;
        let point = normalize(&image);
        let step_distance = pseudo_distance(&self.current, &point).ok()?;
        self.current = point.clone();
        Some(Step {
            point,
            step_distance,
        })
    }
}

/// `(min_{p>0} q/p, max_{q>0} q/p)`; the upper end is `+inf` when `q` has
/// support outside that of `p`.
fn ratio_bounds(p: &[f64], q: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    for (&px, &qx) in p.iter().zip(q) {
        if px > 0.0 {
            let r = qx / px;
            lo = lo.min(r);
            hi = hi.max(r);
        } else if qx > 0.0 {
            hi = f64::INFINITY;
        }
    }
    (lo, hi)
}

/// Power iteration from `start` until the step distance is `<= tol` or
/// `max_iter` products have been taken. Hitting `max_iter` is reported through
/// `converged = false`, not as an error.
pub fn perron_iterate(
    m: &NonnegativeMatrix,
    start: &ConeVector,
    tol: f64,
    max_iter: usize,
) -> Result<PerronResult> {
    if !(tol > 0.0) {
        return Err(Error::Domain {
            name: "tol",
            value: tol,
            domain: "(0, inf)",
        });
    }
    if max_iter == 0 {
        return Err(Error::Domain {
            name: "max_iter",
            value: 0.0,
            domain: "[1, inf)",
        });
    }
    let mut iter = ProjectiveIteration::new(m, start)?;
    let contraction = if m.dim() <= COEFF_DIM_LIMIT {
        Some(contraction_coeff(m)?.c)
    } else {
        None
    };

    let mut iterations = 0;
    let mut step = f64::INFINITY;
    let mut converged = false;
    for s in iter.by_ref().take(max_iter) {
        iterations += 1;
        step = s.step_distance;
        if step <= tol {
            converged = true;
            break;
        }
    }

    let eigenvector = iter.current().clone();
    let image = m.apply_slice(eigenvector.entries());
    let (eigenvalue_lower, eigenvalue_upper) = ratio_bounds(eigenvector.entries(), &image);
    let error_bound = contraction
        .filter(|&c| c < 1.0)
        .map(|c| c / (1.0 - c) * step);

    Ok(PerronResult {
        eigenvector,
        eigenvalue_lower,
        eigenvalue_upper,
        iterations,
        final_step_distance: step,
        error_bound,
        converged,
        contraction,
    })
}

/// [`perron_iterate`] from the all-ones vector with default tolerance and budget.
pub fn perron(m: &NonnegativeMatrix) -> Result<PerronResult> {
    perron_iterate(m, &ConeVector::uniform(m.dim())?, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

/// Collatz-Wielandt bracket `(min (Mf)/f, max (Mf)/f)` for strictly positive `f`.
pub fn collatz_wielandt(m: &NonnegativeMatrix, f: &ConeVector) -> Result<(f64, f64)> {
    if !is_cone_preserving(m) {
        let column = (0..m.dim())
            .find(|&j| (0..m.dim()).all(|i| m.get(i, j) == 0.0))
            .unwrap_or_default();
        return Err(Error::ZeroColumn { column });
    }
    if f.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            left: m.dim(),
            right: f.len(),
        });
    }
    if let Some(index) = f.first_zero(0.0) {
        return Err(Error::NotStrictlyPositiveVector { index });
    }
    Ok(ratio_bounds(f.entries(), &m.apply_slice(f.entries())))
}

/// `prod_i c(M_i)`, an upper bound for `c(M_1 ... M_n)`.
pub fn product_contraction_bound(ms: &[NonnegativeMatrix]) -> Result<f64> {
    let first = ms.first().ok_or(Error::EmptySequence)?;
    if let Some(other) = ms.iter().find(|m| m.dim() != first.dim()) {
        return Err(Error::DimensionMismatch {
            left: first.dim(),
            right: other.dim(),
        });
    }
    ms.iter()
        .try_fold(1.0, |acc, m| Ok(acc * contraction_coeff(m)?.c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> NonnegativeMatrix {
        NonnegativeMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn v(x: &[f64]) -> ConeVector {
        ConeVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn symmetric_two_by_two() {
        // Perron pair of [[2,1],[1,2]] is (3, (1,1)).
        let m = mat(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let r = perron_iterate(&m, &v(&[1.0, 0.0]), 1e-12, 100).unwrap();
        assert!(r.converged);
        assert!(r.eigenvector.same_ray_within(&normalize(&v(&[1.0, 1.0])), 1e-10));
        assert!(r.eigenvalue_lower <= 3.0 + 1e-12 && 3.0 - 1e-12 <= r.eigenvalue_upper);
        assert!(r.eigenvalue_upper - r.eigenvalue_lower < 1e-9);
        assert_eq!(r.contraction, Some(0.6));
        assert!(r.error_bound.unwrap() <= 1.5 * r.final_step_distance);
    }

    #[test]
    fn rank_one_converges_at_once() {
        let m = mat(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let r = perron(&m).unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.eigenvector.entries(), &[1.0, 1.0]);
        assert_eq!((r.eigenvalue_lower, r.eigenvalue_upper), (2.0, 2.0));
        assert_eq!(r.error_bound, Some(0.0));

        // From the edge ray the first image is already the fixed point.
        let mut it = ProjectiveIteration::new(&m, &v(&[1.0, 0.0])).unwrap();
        assert_eq!(it.next().unwrap().point.entries(), &[1.0, 1.0]);
        assert_eq!(it.next().unwrap().step_distance, 0.0);
    }

    #[test]
    fn diagonal_has_no_certificate() {
        // Iterates are (1, 2^-n) after normalization.
        let m = NonnegativeMatrix::diagonal(&[2.0, 1.0]).unwrap();
        let r = perron_iterate(&m, &v(&[1.0, 1.0]), 1e-12, 10_000).unwrap();
        assert_eq!(r.contraction, Some(1.0));
        assert_eq!(r.error_bound, None);
        assert!(r.eigenvector.same_ray_within(&normalize(&v(&[1.0, 0.0])), 1e-11));
        assert_eq!((r.eigenvalue_lower, r.eigenvalue_upper), (2.0, 2.0));

        let steps: Vec<f64> = ProjectiveIteration::new(&m, &v(&[1.0, 1.0]))
            .unwrap()
            .take(20)
            .map(|s| s.step_distance)
            .collect();
        // m(p_n, p_{n+1}) = 1/2 at every step, so d = 1/3: the iterates approach
        // the boundary ray (1, 0) without the step distance shrinking.
        for (n, s) in steps.iter().enumerate() {
            assert!((s - 1.0 / 3.0).abs() < 1e-12, "step {n}: {s}");
        }
    }

    #[test]
    fn max_iter_reached_is_not_an_error() {
        let m = NonnegativeMatrix::diagonal(&[2.0, 1.0]).unwrap();
        let r = perron_iterate(&m, &v(&[1.0, 1.0]), 1e-12, 5).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 5);
        let p = NonnegativeMatrix::identity(2);
        let r = perron_iterate(&p, &v(&[1.0, 2.0]), 1e-12, 3).unwrap();
        assert!(r.converged && r.iterations == 1);
    }

    #[test]
    fn rejects_bad_input() {
        let m = mat(&[&[1.0, 0.0], &[1.0, 0.0]]);
        assert_eq!(perron(&m), Err(Error::ZeroColumn { column: 1 }));
        let m = mat(&[&[2.0, 1.0], &[1.0, 2.0]]);
        assert!(perron_iterate(&m, &v(&[1.0, 1.0]), 0.0, 10).is_err());
        assert!(perron_iterate(&m, &v(&[1.0, 1.0]), 1e-9, 0).is_err());
        assert!(perron_iterate(&m, &v(&[1.0, 1.0, 1.0]), 1e-9, 10).is_err());
    }

    #[test]
    fn collatz_wielandt_examples() {
        let m = mat(&[&[2.0, 1.0], &[1.0, 2.0]]);
        assert_eq!(collatz_wielandt(&m, &v(&[1.0, 1.0])).unwrap(), (3.0, 3.0));
        // M f = (4, 5); ratios 4/1 and 5/2.
        assert_eq!(collatz_wielandt(&m, &v(&[1.0, 2.0])).unwrap(), (2.5, 4.0));
        let id = NonnegativeMatrix::identity(3);
        assert_eq!(collatz_wielandt(&id, &v(&[0.2, 5.0, 1.0])).unwrap(), (1.0, 1.0));
        assert_eq!(
            collatz_wielandt(&m, &v(&[1.0, 0.0])),
            Err(Error::NotStrictlyPositiveVector { index: 1 })
        );
    }

    #[test]
    fn product_bound_examples() {
        let a = mat(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let ones = mat(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(product_contraction_bound(std::slice::from_ref(&a)).unwrap(), 0.6);
        assert_eq!(product_contraction_bound(&[ones, a.clone()]).unwrap(), 0.0);
        assert_eq!(product_contraction_bound(&[]), Err(Error::EmptySequence));
        assert!(product_contraction_bound(&[a, NonnegativeMatrix::identity(3)]).is_err());
    }
}
