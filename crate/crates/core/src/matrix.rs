//! Dense nonnegative matrices acting on column vectors, `f -> M f`.
//!
//! The contraction coefficient `c(M)` is the diameter, for the pseudo-Hilbert
//! metric, of the image of the cone. It is attained on pairs of basis rays, so
//! it reduces to a scan over column pairs. `c(M) < 1` exactly when every zero
//! entry of `M` lies in an all-zero row (for matrices that map the cone into
//! itself, i.e. have no zero column).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::{phi_unchecked, psi_inverse, ConeVector};
use crate::error::{Error, Result};

/// Square matrix with nonnegative finite entries, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct NonnegativeMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl NonnegativeMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Empty);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    row,
                    cols: r.len(),
                });
            }
            data.extend(r);
        }
        Self::from_row_major(dim, data)
    }

    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Empty);
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: dim * dim,
                right: data.len(),
            });
        }
        if let Some((index, &value)) = data
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidEntry { index, value });
        }
        Ok(Self { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Self { dim, data }
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        let mut data = vec![0.0; dim * dim];
        for (i, &v) in diag.iter().enumerate() {
            data[i * dim + i] = v;
        }
        Self::from_row_major(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    /// Column-major copy: column `j` occupies `[j * dim, (j + 1) * dim)`.
    fn column_major(&self) -> Vec<f64> {
        self.transpose().data
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j];
            }
        }
        Self { dim: d, data }
    }

    /// Matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &NonnegativeMatrix) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        let d = self.dim;
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            let out = &mut data[i * d..(i + 1) * d];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a != 0.0 {
                    for (o, &b) in out.iter_mut().zip(rhs.row(k)) {
                        *o += a * b;
                    }
                }
            }
        }
        Ok(Self { dim: d, data })
    }

    /// Multiplies column `j` by `weights[j]`.
    pub fn scale_columns(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: weights.len(),
            });
        }
        let data = self
            .data
            .chunks(self.dim)
            .flat_map(|row| row.iter().zip(weights).map(|(m, w)| m * w))
            .collect();
        Self::from_row_major(self.dim, data)
    }

    /// `M f`, rejected when the image is the zero vector.
    pub fn apply(&self, f: &ConeVector) -> Result<ConeVector> {
        if f.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: f.len(),
            });
        }
        let image = self.apply_slice(f.entries());
        ConeVector::new(image).map_err(|e| match e {
            Error::ZeroVector => Error::ZeroImage,
            other => other,
        })
    }

    pub(crate) fn apply_slice(&self, f: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.dim)
            .map(|row| row.iter().zip(f).map(|(m, x)| m * x).sum())
            .collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for NonnegativeMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<NonnegativeMatrix> for Vec<Vec<f64>> {
    fn from(m: NonnegativeMatrix) -> Self {
        m.to_rows()
    }
}

/// Knobs shared by the matrix routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    /// Entries `<= zero_tol` count as zero in pattern tests and ratios.
    pub zero_tol: f64,
    /// Spread the column-pair scan over the rayon pool.
    pub parallel: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            zero_tol: 0.0,
            parallel: true,
        }
    }
}

impl AnalysisOptions {
    pub fn with_zero_tol(zero_tol: f64) -> Self {
        Self {
            zero_tol,
            ..Self::default()
        }
    }

    pub fn serial() -> Self {
        Self {
            parallel: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Definitional,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionReport {
    pub c: f64,
    pub is_strict: bool,
    /// `psi_inverse(c)`, present iff `c < 1`.
    pub a_star: Option<f64>,
    /// Lexicographically smallest column pair attaining `c`; `None` in dimension one.
    pub witness: Option<(usize, usize)>,
    pub method: Method,
}

impl ContractionReport {
    fn new(c: f64, witness: Option<(usize, usize)>, method: Method) -> Self {
        let a_star = psi_inverse(c).ok();
        Self {
            c,
            is_strict: c < 1.0,
            a_star,
            witness,
            method,
        }
    }
}

fn first_zero_column(m: &NonnegativeMatrix, zero_tol: f64) -> Option<usize> {
    (0..m.dim).find(|&j| (0..m.dim).all(|i| m.get(i, j) <= zero_tol))
}

fn zero_rows(m: &NonnegativeMatrix, zero_tol: f64) -> Vec<bool> {
    (0..m.dim)
        .map(|i| m.row(i).iter().all(|&v| v <= zero_tol))
        .collect()
}

fn zero_cols(m: &NonnegativeMatrix, zero_tol: f64) -> Vec<bool> {
    (0..m.dim)
        .map(|j| (0..m.dim).all(|i| m.get(i, j) <= zero_tol))
        .collect()
}

fn require_cone_preserving(m: &NonnegativeMatrix, zero_tol: f64) -> Result<()> {
    match first_zero_column(m, zero_tol) {
        Some(column) => Err(Error::ZeroColumn { column }),
        None => Ok(()),
    }
}

/// True iff no column is zero, so every basis ray, hence the whole cone, has a
/// nonzero image.
pub fn is_cone_preserving(m: &NonnegativeMatrix) -> bool {
    is_cone_preserving_with(m, 0.0)
}

pub fn is_cone_preserving_with(m: &NonnegativeMatrix, zero_tol: f64) -> bool {
    first_zero_column(m, zero_tol).is_none()
}

/// `m(f, g)` for two columns in one pass.
///
/// Uses `aleph(f, g) * aleph(g, f) = min(g/f) / max(g/f)` on a common support;
/// differing supports give `m = 0`.
#[inline]
fn column_m(f: &[f64], g: &[f64], zero_tol: f64) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    for (&fx, &gx) in f.iter().zip(g) {
        match (fx > zero_tol, gx > zero_tol) {
            (true, true) => {
                let r = gx / fx;
                lo = lo.min(r);
                hi = hi.max(r);
            }
            (false, false) => {}
            _ => return 0.0,
        }
    }
    // Both columns are nonzero, so the common support is not empty here.
    (lo / hi).min(1.0)
}

/// Farthest later column from column `i`: `(distance, j)`, first `j` on ties.
fn farthest_partner(cols: &[f64], d: usize, i: usize, zero_tol: f64) -> Option<(f64, usize)> {
    let ci = &cols[i * d..(i + 1) * d];
    let mut best: Option<(f64, usize)> = None;
    for j in i + 1..d {
        let dist = phi_unchecked(column_m(ci, &cols[j * d..(j + 1) * d], zero_tol));
        if best.is_none_or(|(b, _)| dist > b) {
            best = Some((dist, j));
            if dist >= 1.0 {
                break;
            }
        }
    }
    best
}

/// `c(M)` as the largest pseudo-Hilbert distance between two columns.
pub fn contraction_coeff(m: &NonnegativeMatrix) -> Result<ContractionReport> {
    contraction_coeff_with(m, &AnalysisOptions::default())
}

/// [`contraction_coeff`] with explicit options.
///
/// The result, witness included, does not depend on `opts.parallel` or on the
/// size of the thread pool: every row of the pair scan is evaluated serially and
/// rows are reduced in index order.
pub fn contraction_coeff_with(
    m: &NonnegativeMatrix,
    opts: &AnalysisOptions,
) -> Result<ContractionReport> {
    require_cone_preserving(m, opts.zero_tol)?;
    let d = m.dim;
    let cols = m.column_major();
    let scan = |i| farthest_partner(&cols, d, i, opts.zero_tol);
    let rows: Vec<_> = if opts.parallel {
        (0..d).into_par_iter().map(scan).collect()
    } else {
        (0..d).map(scan).collect()
    };

    let mut best: Option<(f64, (usize, usize))> = None;
    for (i, row) in rows.into_iter().enumerate() {
        if let Some((dist, j)) = row {
            if best.is_none_or(|(b, _)| dist > b) {
                best = Some((dist, (i, j)));
            }
        }
    }
    Ok(match best {
        Some((c, pair)) => ContractionReport::new(c, Some(pair), Method::Definitional),
        None => ContractionReport::new(0.0, None, Method::Definitional),
    })
}

fn require_strictly_positive(m: &NonnegativeMatrix, zero_tol: f64) -> Result<()> {
    match m.data.iter().position(|&v| v <= zero_tol) {
        Some(p) => Err(Error::NotStrictlyPositive {
            row: p / m.dim,
            col: p % m.dim,
        }),
        None => Ok(()),
    }
}

/// Closed form over all index quadruples, strictly positive matrices only:
///
/// ```text
/// c(M) = max_{i,j,k,l} |M_ki M_lj - M_kj M_li| / (M_ki M_lj + M_kj M_li)
/// ```
///
/// O(d^4). Kept as an independent check of [`contraction_coeff`].
pub fn contraction_coeff_formula(m: &NonnegativeMatrix) -> Result<f64> {
    Ok(closed_form(m, 0.0)?.0)
}

/// [`contraction_coeff_formula`] packaged as a report; the witness is the column pair.
pub fn contraction_report_formula(
    m: &NonnegativeMatrix,
    zero_tol: f64,
) -> Result<ContractionReport> {
    let (c, witness) = closed_form(m, zero_tol)?;
    Ok(ContractionReport::new(c, witness, Method::ClosedForm))
}

fn closed_form(m: &NonnegativeMatrix, zero_tol: f64) -> Result<(f64, Option<(usize, usize)>)> {
    require_strictly_positive(m, zero_tol)?;
    let d = m.dim;
    let mut best: Option<(f64, (usize, usize))> = None;
    // The expression is symmetric under i <-> j and under k <-> l and vanishes
    // when i = j or k = l.
    for i in 0..d {
        for j in i + 1..d {
            let mut col_best = 0.0_f64;
            for k in 0..d {
                for l in k + 1..d {
                    let a = m.get(k, i) * m.get(l, j);
                    let b = m.get(k, j) * m.get(l, i);
                    col_best = col_best.max((a - b).abs() / (a + b));
                }
            }
            if best.is_none_or(|(v, _)| col_best > v) {
                best = Some((col_best, (i, j)));
            }
        }
    }
    Ok(match best {
        Some((c, pair)) => (c, Some(pair)),
        None => (0.0, None),
    })
}

/// First zero entry (row-major) that is neither in an all-zero row nor in an
/// all-zero column.
pub fn uniform_positivity_violation(m: &NonnegativeMatrix, zero_tol: f64) -> Option<(usize, usize)> {
    let zr = zero_rows(m, zero_tol);
    let zc = zero_cols(m, zero_tol);
    (0..m.dim)
        .flat_map(|i| (0..m.dim).map(move |j| (i, j)))
        .find(|&(i, j)| !zr[i] && !zc[j] && m.get(i, j) <= zero_tol)
}

/// Zero-pattern test: after deleting all-zero rows and all-zero columns the
/// remaining block is strictly positive. The zero matrix is not uniformly positive.
pub fn is_uniformly_positive(m: &NonnegativeMatrix) -> bool {
    is_uniformly_positive_with(m, 0.0)
}

pub fn is_uniformly_positive_with(m: &NonnegativeMatrix, zero_tol: f64) -> bool {
    m.data.iter().any(|&v| v > zero_tol) && uniform_positivity_violation(m, zero_tol).is_none()
}

/// Pattern test for `c(M) < 1`: every zero entry lies in an all-zero row.
pub fn is_strictly_contracting(m: &NonnegativeMatrix) -> Result<bool> {
    is_strictly_contracting_with(m, 0.0)
}

pub fn is_strictly_contracting_with(m: &NonnegativeMatrix, zero_tol: f64) -> Result<bool> {
    require_cone_preserving(m, zero_tol)?;
    let zr = zero_rows(m, zero_tol);
    Ok((0..m.dim).all(|i| zr[i] || m.row(i).iter().all(|&v| v > zero_tol)))
}

/// `A* = psi_inverse(c(M))`, defined when `c(M) < 1`.
pub fn a_star(m: &NonnegativeMatrix) -> Result<f64> {
    a_star_with(m, &AnalysisOptions::default())
}

pub fn a_star_with(m: &NonnegativeMatrix, opts: &AnalysisOptions) -> Result<f64> {
    contraction_coeff_with(m, opts)?
        .a_star
        .ok_or(Error::NotContracting)
}

/// Witness of uniform positivity: `A^-1 b_j h <= M e_j <= A b_j h` for every basis vector `e_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformPositivityCertificate {
    pub h: ConeVector,
    pub b: ConeVector,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "i0")]
    pub reference_row: usize,
    #[serde(rename = "j0")]
    pub reference_col: usize,
}

/// Relative slack used when validating sandwich inequalities.
pub const SANDWICH_REL_TOL: f64 = 1e-9;

impl UniformPositivityCertificate {
    /// Checks the sandwich on every basis vector.
    pub fn validate(&self, m: &NonnegativeMatrix) -> bool {
        let h = self.h.entries();
        let b = self.b.entries();
        if h.len() != m.dim || b.len() != m.dim {
            return false;
        }
        (0..m.dim).all(|j| {
            (0..m.dim).all(|i| sandwiched(m.get(i, j), b[j] * h[i], self.a, SANDWICH_REL_TOL))
        })
    }

    /// Checks `A^-1 b(f) h <= M f <= A b(f) h` with `b(f) = sum_j b_j f_j`.
    pub fn validate_on(&self, m: &NonnegativeMatrix, f: &ConeVector) -> bool {
        if f.len() != m.dim {
            return false;
        }
        let bf: f64 = self.b.entries().iter().zip(f.entries()).map(|(b, x)| b * x).sum();
        let image = m.apply_slice(f.entries());
        image
            .iter()
            .zip(self.h.entries())
            .all(|(&y, &h)| sandwiched(y, bf * h, self.a, SANDWICH_REL_TOL))
    }
}

/// `scale / a <= value <= a * scale`, up to relative slack `rel`.
pub(crate) fn sandwiched(value: f64, scale: f64, a: f64, rel: f64) -> bool {
    let lower = scale / a;
    let upper = scale * a;
    lower <= value + rel * value.max(lower) && value <= upper + rel * value.max(upper)
}

/// Builds `h = M e_{j0}` (column `j0`), `b_j = M_{i0 j}` (row `i0`) and the
/// smallest `A` making the sandwich hold for this `(h, b)`:
///
/// ```text
/// A = max over M_ij > 0 of max(M_ij / (h_i b_j), h_i b_j / M_ij)
/// ```
///
/// `(i0, j0)` is the position of the largest entry, first in row-major order.
/// `A` is an upper bound for the optimal constant, it is not minimized.
pub fn uniform_positivity_certificate(m: &NonnegativeMatrix) -> Result<UniformPositivityCertificate> {
    uniform_positivity_certificate_with(m, 0.0)
}

pub fn uniform_positivity_certificate_with(
    m: &NonnegativeMatrix,
    zero_tol: f64,
) -> Result<UniformPositivityCertificate> {
    require_cone_preserving(m, zero_tol)?;
    if let Some((row, col)) = uniform_positivity_violation(m, zero_tol) {
        return Err(Error::NotUniformlyPositive { row, col });
    }
    let d = m.dim;
    let (p0, _) = m
        .data
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bp, bv), (p, &v)| if v > bv { (p, v) } else { (bp, bv) });
    let (i0, j0) = (p0 / d, p0 % d);

    let h: Vec<f64> = (0..d).map(|i| clean(m.get(i, j0), zero_tol)).collect();
    let b: Vec<f64> = m.row(i0).iter().map(|&v| clean(v, zero_tol)).collect();

    let mut a = 1.0_f64;
    for i in 0..d {
        for j in 0..d {
            let v = m.get(i, j);
            if v > zero_tol {
                let r = v / (h[i] * b[j]);
                a = a.max(r).max(r.recip());
            }
        }
    }
    let cert = UniformPositivityCertificate {
        h: ConeVector::new(h)?,
        b: ConeVector::new(b)?,
        a,
        reference_row: i0,
        reference_col: j0,
    };
    debug_assert!(zero_tol > 0.0 || cert.validate(m));
    Ok(cert)
}

fn clean(v: f64, zero_tol: f64) -> f64 {
    if v <= zero_tol {
        0.0
    } else {
        v
    }
}
