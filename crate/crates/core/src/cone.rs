//! Ratio functionals on the positive cone and the projective metrics built from them.
//!
//! For `f, g` in the cone `C = {x >= 0} \ {0}`:
//!
//! ```text
//! aleph(f, g) = sup { b >= 0 : b f <= g } = min { g(x) / f(x) : f(x) > 0 }
//! m(f, g)     = aleph(f, g) * aleph(g, f)          in [0, 1]
//! d(f, g)     = (1 - m) / (1 + m)                  in [0, 1]
//! d_H(f, g)   = |log m|                            in [0, +inf]
//! ```
//!
//! `d` and `d_H` only depend on the rays through `f` and `g`, and are linked by
//! `d = tanh(d_H / 2)`. `d` stays bounded by one on the boundary of the cone,
//! where `d_H` is infinite.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entrywise absolute tolerance used to compare normalized representatives.
pub const RAY_TOL: f64 = 1e-12;

/// A nonnegative coordinate vector that is not identically zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ConeVector(Vec<f64>);

impl ConeVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty);
        }
        if let Some((index, &value)) = entries
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidEntry { index, value });
        }
        if entries.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(Self(entries))
    }

    /// The all-ones vector of length `len`.
    pub fn uniform(len: usize) -> Result<Self> {
        Self::new(vec![1.0; len])
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_entry(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    /// Index of the first entry that is `<= zero_tol`, if any.
    pub fn first_zero(&self, zero_tol: f64) -> Option<usize> {
        self.0.iter().position(|&v| v <= zero_tol)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for ConeVector {
    type Error = Error;

    fn try_from(entries: Vec<f64>) -> Result<Self> {
        Self::new(entries)
    }
}

impl From<ConeVector> for Vec<f64> {
    fn from(v: ConeVector) -> Self {
        v.0
    }
}

impl AsRef<[f64]> for ConeVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Canonical representative of a ray: the cone vector scaled to sup-norm one.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProjectivePoint(ConeVector);

impl ProjectivePoint {
    pub fn from_entries(entries: Vec<f64>) -> Result<Self> {
        Ok(normalize(&ConeVector::new(entries)?))
    }

    pub fn representative(&self) -> &ConeVector {
        &self.0
    }

    /// Ray equality: normalized representatives agree entrywise within [`RAY_TOL`].
    pub fn same_ray(&self, other: &ProjectivePoint) -> bool {
        self.same_ray_within(other, RAY_TOL)
    }

    pub fn same_ray_within(&self, other: &ProjectivePoint, tol: f64) -> bool {
        self.len() == other.len()
            && self
                .entries()
                .iter()
                .zip(other.entries())
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    pub fn into_vector(self) -> ConeVector {
        self.0
    }
}

impl Deref for ProjectivePoint {
    type Target = ConeVector;

    fn deref(&self) -> &ConeVector {
        &self.0
    }
}

/// `aleph(f, g)`, `aleph(g, f)` and their product `m(f, g)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioPair {
    pub aleph_fg: f64,
    pub aleph_gf: f64,
    pub m: f64,
}

/// Scales `f` so that its largest entry is exactly one.
pub fn normalize(f: &ConeVector) -> ProjectivePoint {
    let max = f.max_entry();
    ProjectivePoint(ConeVector(f.entries().iter().map(|&v| v / max).collect()))
}

/// `min { g(x) / f(x) : f(x) > zero_tol }`, with `g(x) <= zero_tol` read as zero.
///
/// Returns `None` when `f` has no entry above `zero_tol`.
pub(crate) fn aleph_slice(f: &[f64], g: &[f64], zero_tol: f64) -> Option<f64> {
    debug_assert_eq!(f.len(), g.len());
    let mut best = f64::INFINITY;
    for (&fx, &gx) in f.iter().zip(g) {
        if fx > zero_tol {
            if gx <= zero_tol {
                return Some(0.0);
            }
            let r = gx / fx;
            if r < best {
                best = r;
            }
        }
    }
    best.is_finite().then_some(best)
}

fn check_dims(f: &ConeVector, g: &ConeVector) -> Result<()> {
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    Ok(())
}

/// Largest `b >= 0` with `b f <= g` entrywise.
pub fn aleph(f: &ConeVector, g: &ConeVector) -> Result<f64> {
    aleph_with(f, g, 0.0)
}

/// [`aleph`] with entries `<= zero_tol` treated as zero.
pub fn aleph_with(f: &ConeVector, g: &ConeVector, zero_tol: f64) -> Result<f64> {
    check_dims(f, g)?;
    aleph_slice(f.entries(), g.entries(), zero_tol).ok_or(Error::ZeroVector)
}

pub fn m_ratio(f: &ConeVector, g: &ConeVector) -> Result<RatioPair> {
    m_ratio_with(f, g, 0.0)
}

pub fn m_ratio_with(f: &ConeVector, g: &ConeVector, zero_tol: f64) -> Result<RatioPair> {
    let aleph_fg = aleph_with(f, g, zero_tol)?;
    let aleph_gf = aleph_with(g, f, zero_tol)?;
    Ok(RatioPair {
        aleph_fg,
        aleph_gf,
        m: (aleph_fg * aleph_gf).min(1.0),
    })
}

/// Bounded pseudo-Hilbert distance between the rays through `f` and `g`.
///
/// Any representatives may be passed; a [`ProjectivePoint`] derefs to its
/// normalized representative.
pub fn pseudo_distance(f: &ConeVector, g: &ConeVector) -> Result<f64> {
    Ok(phi_unchecked(m_ratio(f, g)?.m))
}

/// Hilbert projective distance `|log m|`, `+inf` when `m = 0`.
pub fn hilbert_distance(f: &ConeVector, g: &ConeVector) -> Result<f64> {
    let m = m_ratio(f, g)?.m;
    Ok(if m == 0.0 { f64::INFINITY } else { -m.ln() })
}

#[inline]
pub(crate) fn phi_unchecked(s: f64) -> f64 {
    (1.0 - s) / (1.0 + s)
}

/// `phi(s) = (1 - s) / (1 + s)` on `[0, 1]`.
pub fn phi(s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain {
            name: "s",
            value: s,
            domain: "[0, 1]",
        });
    }
    Ok(phi_unchecked(s))
}

/// `psi(a) = phi(a^-2)`, an increasing bijection from `[1, inf)` onto `[0, 1)`.
pub fn psi(a: f64) -> Result<f64> {
    if a.is_nan() || a < 1.0 {
        return Err(Error::Domain {
            name: "A",
            value: a,
            domain: "[1, inf)",
        });
    }
    Ok(phi_unchecked((a * a).recip()))
}

/// Inverse of [`psi`]: `sqrt((1 + c) / (1 - c))`.
pub fn psi_inverse(c: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&c) {
        return Err(Error::Domain {
            name: "c",
            value: c,
            domain: "[0, 1)",
        });
    }
    Ok(((1.0 + c) / (1.0 - c)).sqrt())
}

/// Distance between two rays given by their coordinates in a basis `(u, v)`
/// of endpoints of a planar cone section:
/// `|f1 g2 - f2 g1| / (f1 g2 + f2 g1)`, with `0/0 = 0`.
pub fn segment_distance(f1: f64, f2: f64, g1: f64, g2: f64) -> Result<f64> {
    for (index, value) in [f1, f2, g1, g2].into_iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidEntry { index, value });
        }
    }
    if (f1 == 0.0 && f2 == 0.0) || (g1 == 0.0 && g2 == 0.0) {
        return Err(Error::ZeroVector);
    }
    let a = f1 * g2;
    let b = f2 * g1;
    let den = a + b;
    Ok(if den == 0.0 { 0.0 } else { (a - b).abs() / den })
}
