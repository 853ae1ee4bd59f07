//! Projective geometry of the positive cone.
//!
//! * [`cone`]: the ratio functionals `aleph` and `m`, the bounded pseudo-Hilbert
//!   metric `d = (1 - m) / (1 + m)` and the Hilbert metric `d_H = |log m|`.
//! * [`matrix`]: contraction coefficient `c(M)` of nonnegative matrices, zero-pattern
//!   tests for strict contraction and uniform-positivity certificates.
//! * [`kernel`]: quadrature discretization of positive integral kernels on `[0, 1]`
//!   and grid factorization certificates.
//! * [`perron`]: projective power iteration with contraction-certified error bounds.
//!
//! ```
//! use projcone::{contraction_coeff, NonnegativeMatrix};
//!
//! let m = NonnegativeMatrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
//! let report = contraction_coeff(&m).unwrap();
//! assert!((report.c - 0.6).abs() < 1e-15);
//! assert!((report.a_star.unwrap() - 2.0).abs() < 1e-12);
//! ```

pub mod cone;
pub mod error;
pub mod kernel;
pub mod matrix;
pub mod perron;

pub use cone::{
    aleph, aleph_with, hilbert_distance, m_ratio, m_ratio_with, normalize, phi, pseudo_distance,
    psi, psi_inverse, segment_distance, ConeVector, ProjectivePoint, RatioPair, RAY_TOL,
};
pub use error::{Error, Result};
pub use kernel::{
    discretize, factorization_certificate, kernel_contraction_estimate,
    kernel_contraction_estimate_with, relate_certificate_to_coefficient, BuiltinKernel,
    FactorizationCertificate, KernelGrid, QuadratureRule,
};
pub use matrix::{
    a_star, a_star_with, contraction_coeff, contraction_coeff_formula, contraction_coeff_with,
    contraction_report_formula, is_cone_preserving, is_cone_preserving_with,
    is_strictly_contracting, is_strictly_contracting_with, is_uniformly_positive,
    is_uniformly_positive_with, uniform_positivity_certificate,
    uniform_positivity_certificate_with, uniform_positivity_violation, AnalysisOptions,
    ContractionReport, Method, NonnegativeMatrix, UniformPositivityCertificate,
};
pub use perron::{
    collatz_wielandt, perron, perron_iterate, product_contraction_bound, PerronResult,
    ProjectiveIteration, Step,
};
