//! Positive integral operators `M_K f(x) = int_0^1 K(x, y) f(y) dy` sampled on
//! a quadrature grid.
//!
//! The operator is strictly contracting iff the kernel factorizes up to a
//! bounded constant, `A^-1 g1(x) g2(y) <= K(x, y) <= A g1(x) g2(y)`. On a grid
//! this is the matrix zero-pattern test applied to the sampled values.

use serde::{Deserialize, Serialize};

use crate::cone::{psi, ConeVector};
use crate::error::{Error, Result};
use crate::matrix::{
    contraction_coeff_with, sandwiched, uniform_positivity_violation, AnalysisOptions,
    ContractionReport, NonnegativeMatrix, SANDWICH_REL_TOL,
};

/// Quadrature rule on a uniform grid over `[0, 1]`. Both rules have strictly
/// positive weights summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    /// Nodes `(k + 1/2) / n`, weights `1 / n`.
    Midpoint,
    /// Nodes `k / (n - 1)` including both endpoints, half weights at the ends.
    #[default]
    Trapezoid,
}

impl QuadratureRule {
    pub fn nodes_and_weights(self, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        match self {
            QuadratureRule::Midpoint => {
                if n == 0 {
                    return Err(Error::InvalidGrid("midpoint rule needs n >= 1".into()));
                }
                let h = 1.0 / n as f64;
                let nodes = (0..n).map(|k| (k as f64 + 0.5) * h).collect();
                Ok((nodes, vec![h; n]))
            }
            QuadratureRule::Trapezoid => {
                if n < 2 {
                    return Err(Error::InvalidGrid("trapezoid rule needs n >= 2".into()));
                }
                let h = 1.0 / (n - 1) as f64;
                let nodes = (0..n).map(|k| if k == n - 1 { 1.0 } else { k as f64 * h }).collect();
                let mut weights = vec![h; n];
                weights[0] = 0.5 * h;
                weights[n - 1] = 0.5 * h;
                Ok((nodes, weights))
            }
        }
    }
}

/// Named kernel families on `[0, 1]^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum BuiltinKernel {
    /// `K = 1`.
    Constant,
    /// `K = (1 + a x)(1 + b y)`.
    Separable { a: f64, b: f64 },
    /// `K = 1 + x y`.
    Poly1xy,
    /// `K = exp(-(x - y)^2 / sigma)`.
    Gaussian { sigma: f64 },
}

impl BuiltinKernel {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            BuiltinKernel::Constant => 1.0,
            BuiltinKernel::Separable { a, b } => (1.0 + a * x) * (1.0 + b * y),
            BuiltinKernel::Poly1xy => 1.0 + x * y,
            BuiltinKernel::Gaussian { sigma } => (-(x - y).powi(2) / sigma).exp(),
        }
    }
}

#[derive(Deserialize)]
struct RawGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<Vec<f64>>,
}

/// Kernel values `values[k][j] = K(nodes[k], nodes[j])` with quadrature weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct KernelGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl TryFrom<RawGrid> for KernelGrid {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        Self::new(raw.nodes, raw.weights, raw.values)
    }
}

/// Tolerance on `sum(weights) = 1`.
const WEIGHT_SUM_TOL: f64 = 1e-9;

impl KernelGrid {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        let n = nodes.len();
        let bad = |msg: String| Err(Error::InvalidGrid(msg));
        if n == 0 {
            return bad("no nodes".into());
        }
        if nodes.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return bad("nodes must lie in [0, 1]".into());
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return bad("nodes must be strictly increasing".into());
        }
        if weights.len() != n {
            return bad(format!("{} weights for {n} nodes", weights.len()));
        }
        if let Some(k) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return bad(format!("weight {k} is not strictly positive"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return bad(format!("weights sum to {total}, expected 1"));
        }
        if values.len() != n {
            return bad(format!("{} value rows for {n} nodes", values.len()));
        }
        for (k, row) in values.iter().enumerate() {
            if row.len() != n {
                return bad(format!("value row {k} has {} entries, expected {n}", row.len()));
            }
            if let Some(j) = row.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
                return bad(format!("value ({k}, {j}) is negative or not finite"));
            }
        }
        if let Some(j) = (0..n).find(|&j| values.iter().all(|row| row[j] == 0.0)) {
            return bad(format!("column {j} is identically zero"));
        }
        Ok(Self {
            nodes,
            weights,
            values,
        })
    }

    /// Samples `kernel` on the nodes of `rule`.
    pub fn tabulate(n: usize, rule: QuadratureRule, kernel: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let (nodes, weights) = rule.nodes_and_weights(n)?;
        let values = nodes
            .iter()
            .map(|&x| nodes.iter().map(|&y| kernel(x, y)).collect())
            .collect();
        Self::new(nodes, weights, values)
    }

    pub fn builtin(kernel: BuiltinKernel, n: usize, rule: QuadratureRule) -> Result<Self> {
        Self::tabulate(n, rule, |x, y| kernel.eval(x, y))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Same values under other positive column weights (no sum constraint).
    pub fn reweighted(&self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.len() {
            return Err(Error::DimensionMismatch {
                left: self.len(),
                right: weights.len(),
            });
        }
        if let Some(k) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidGrid(format!("weight {k} is not strictly positive")));
        }
        Ok(Self {
            weights,
            ..self.clone()
        })
    }

    /// Sampled values as a matrix, without weights.
    pub fn value_matrix(&self) -> NonnegativeMatrix {
        NonnegativeMatrix::from_rows(self.values.clone()).expect("validated grid")
    }
}

/// Quadrature matrix `values[k][j] * weights[j]`: `(M f)_k` approximates `int K(x_k, y) f(y) dy`.
pub fn discretize(grid: &KernelGrid) -> NonnegativeMatrix {
    grid.value_matrix()
        .scale_columns(&grid.weights)
        .expect("validated grid")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationCertificate {
    pub g1: ConeVector,
    pub g2: ConeVector,
    #[serde(rename = "A")]
    pub a: f64,
    /// Grid indices `(k0, j0)` of the reference point.
    pub reference: (usize, usize),
}

impl FactorizationCertificate {
    /// Sandwich `A^-1 g1 g2 <= K <= A g1 g2` at every grid point.
    pub fn validate(&self, grid: &KernelGrid) -> bool {
        let g1 = self.g1.entries();
        let g2 = self.g2.entries();
        if g1.len() != grid.len() || g2.len() != grid.len() {
            return false;
        }
        grid.values.iter().enumerate().all(|(k, row)| {
            row.iter()
                .enumerate()
                .all(|(j, &v)| sandwiched(v, g1[k] * g2[j], self.a, SANDWICH_REL_TOL))
        })
    }
}

/// Grid factorization `g1(x) = K(x, y0)`, `g2(y) = K(x0, y) / K(x0, y0)` around the
/// grid maximum `(x0, y0)` (first in row-major order on ties), with the smallest
/// `A` valid for that pair.
pub fn factorization_certificate(grid: &KernelGrid) -> Result<FactorizationCertificate> {
    let values = grid.value_matrix();
    if let Some((row, col)) = uniform_positivity_violation(&values, 0.0) {
        return Err(Error::NotFactorizable { row, col });
    }
    let n = grid.len();
    let mut reference = (0, 0);
    let mut top = f64::NEG_INFINITY;
    for (k, row) in grid.values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v > top {
                top = v;
                reference = (k, j);
            }
        }
    }
    let (k0, j0) = reference;
    let g1: Vec<f64> = (0..n).map(|k| grid.values[k][j0]).collect();
    let g2: Vec<f64> = grid.values[k0].iter().map(|v| v / top).collect();

    let mut a = 1.0_f64;
    for (k, row) in grid.values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v > 0.0 {
                let r = v / (g1[k] * g2[j]);
                a = a.max(r).max(r.recip());
            }
        }
    }
    let cert = FactorizationCertificate {
        g1: ConeVector::new(g1)?,
        g2: ConeVector::new(g2)?,
        a,
        reference,
    };
    debug_assert!(cert.validate(grid));
    Ok(cert)
}

/// `c` of the discretized operator.
pub fn kernel_contraction_estimate(grid: &KernelGrid) -> Result<ContractionReport> {
    kernel_contraction_estimate_with(grid, &AnalysisOptions::default())
}

pub fn kernel_contraction_estimate_with(
    grid: &KernelGrid,
    opts: &AnalysisOptions,
) -> Result<ContractionReport> {
    contraction_coeff_with(&discretize(grid), opts)
}

/// `(psi(A_certificate), c_grid)`.
///
/// Both are computed independently; callers compare them. A valid certificate
/// constant `A` always gives `c_grid <= psi(A^2)`.
pub fn relate_certificate_to_coefficient(grid: &KernelGrid) -> Result<(f64, f64)> {
    let cert = factorization_certificate(grid)?;
    let c = kernel_contraction_estimate(grid)?.c;
    Ok((psi(cert.a)?, c))
}
