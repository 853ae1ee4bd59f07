use projcone::*;
use proptest::prelude::*;

fn entry() -> impl Strategy<Value = f64> {
    prop_oneof![
        1 => Just(0.0),
        2 => 0.0..1.0f64,
        2 => (-6.0..6.0f64).prop_map(|e| 10f64.powf(e)),
    ]
}

fn cone_vector(dim: usize) -> impl Strategy<Value = ConeVector> {
    prop::collection::vec(entry(), dim)
        .prop_filter("nonzero", |v| v.iter().any(|&x| x > 0.0))
        .prop_map(|v| ConeVector::new(v).unwrap())
}

fn triple() -> impl Strategy<Value = (ConeVector, ConeVector, ConeVector)> {
    (2usize..10).prop_flat_map(|d| (cone_vector(d), cone_vector(d), cone_vector(d)))
}

fn cone_preserving(max_dim: usize) -> impl Strategy<Value = NonnegativeMatrix> {
    (1usize..=max_dim)
        .prop_flat_map(|d| (Just(d), prop::collection::vec(entry(), d * d)))
        .prop_map(|(d, data)| NonnegativeMatrix::from_row_major(d, data).unwrap())
        .prop_filter("cone-preserving", is_cone_preserving)
}

fn positive_matrix(max_dim: usize) -> impl Strategy<Value = NonnegativeMatrix> {
    (2usize..=max_dim).prop_flat_map(positive_matrix_of)
}

fn positive_matrix_of(d: usize) -> impl Strategy<Value = NonnegativeMatrix> {
    prop::collection::vec(0.05..20.0f64, d * d)
        .prop_map(move |data| NonnegativeMatrix::from_row_major(d, data).unwrap())
}

proptest! {
    #[test]
    fn triangle_inequality((f, g, h) in triple()) {
        let d = |a: &ConeVector, b: &ConeVector| pseudo_distance(a, b).unwrap();
        prop_assert!(d(&f, &h) <= d(&f, &g) + d(&g, &h) + 1e-12);
    }

    #[test]
    fn distance_is_bounded_and_symmetric((f, g, _) in triple()) {
        let d = pseudo_distance(&f, &g).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, pseudo_distance(&g, &f).unwrap());
    }

    #[test]
    fn pseudo_is_tanh_of_half_hilbert((f, g, _) in triple()) {
        let dh = hilbert_distance(&f, &g).unwrap();
        let d = pseudo_distance(&f, &g).unwrap();
        if dh.is_finite() {
            prop_assert!((d - (dh / 2.0).tanh()).abs() <= 1e-12);
        } else {
            prop_assert_eq!(d, 1.0);
        }
    }

    #[test]
    fn normalize_is_idempotent_and_scale_free((f, _, _) in triple(), a in 1e-3..1e3f64) {
        let p = normalize(&f);
        prop_assert_eq!(p.max_entry(), 1.0);
        prop_assert_eq!(&normalize(&p), &p);
        let scaled = ConeVector::new(f.entries().iter().map(|x| x * a).collect()).unwrap();
        prop_assert!(normalize(&scaled).same_ray(&p));
    }

    #[test]
    fn phi_is_subadditive_on_products(s in 0.0..=1.0f64, t in 0.0..=1.0f64) {
        prop_assert!(phi(s * t).unwrap() <= phi(s).unwrap() + phi(t).unwrap() + 1e-15);
    }

    #[test]
    fn psi_round_trip(c in 0.0..0.999f64) {
        let a = psi_inverse(c).unwrap();
        prop_assert!(a >= 1.0);
        prop_assert!((psi(a).unwrap() - c).abs() <= 1e-12);
    }

    #[test]
    fn coefficient_is_max_over_columns(m in cone_preserving(6)) {
        let rep = contraction_coeff(&m).unwrap();
        let cols: Vec<ConeVector> =
            (0..m.dim()).map(|j| ConeVector::new(m.column(j)).unwrap()).collect();
        let mut c = 0.0_f64;
        for i in 0..cols.len() {
            for j in i + 1..cols.len() {
                c = c.max(pseudo_distance(&cols[i], &cols[j]).unwrap());
            }
        }
        // The scan computes m in one pass; it may differ from aleph * aleph in the last ulp.
        prop_assert!((rep.c - c).abs() <= 1e-14);
        if let Some((i, j)) = rep.witness {
            prop_assert!((pseudo_distance(&cols[i], &cols[j]).unwrap() - c).abs() <= 1e-14);
        }
        prop_assert_eq!(rep.is_strict, c < 1.0);
    }

    #[test]
    fn scan_is_deterministic(m in cone_preserving(8)) {
        let a = contraction_coeff_with(&m, &AnalysisOptions::serial()).unwrap();
        let b = contraction_coeff_with(&m, &AnalysisOptions::default()).unwrap();
        prop_assert_eq!(a.c.to_bits(), b.c.to_bits());
        prop_assert_eq!(a.witness, b.witness);
    }

    #[test]
    fn formula_matches_and_is_transpose_invariant(m in positive_matrix(6)) {
        let cf = contraction_coeff_formula(&m).unwrap();
        prop_assert!((cf - contraction_coeff(&m).unwrap().c).abs() <= 1e-12);
        prop_assert_eq!(cf, contraction_coeff_formula(&m.transpose()).unwrap());
    }

    #[test]
    fn certificate_sandwich_holds((m, f) in (2usize..=5).prop_flat_map(|d| (positive_matrix_of(d), cone_vector(d)))) {
        let cert = uniform_positivity_certificate(&m).unwrap();
        prop_assert!(cert.validate(&m));
        prop_assert!(cert.validate_on(&m, &f));
        let c = contraction_coeff(&m).unwrap().c;
        prop_assert!(c <= psi(cert.a * cert.a).unwrap() + 1e-10);
    }

    #[test]
    fn perron_eigenvalue_bracket(m in positive_matrix(6)) {
        let r = perron(&m).unwrap();
        prop_assert!(r.eigenvalue_lower <= r.eigenvalue_upper);
        prop_assert!(r.converged);
        let c = r.contraction.unwrap();
        prop_assert_eq!(r.error_bound, Some(c / (1.0 - c) * r.final_step_distance));
        let (lo, hi) = collatz_wielandt(&m, &r.eigenvector).unwrap();
        let mid = 0.5 * (lo + hi);
        let mp = m.apply(&r.eigenvector).unwrap();
        let norm = mp.max_entry();
        for (y, x) in mp.entries().iter().zip(r.eigenvector.entries()) {
            prop_assert!((y - mid * x).abs() <= 10.0 * 1e-12 * norm + 1e-12 * norm);
        }
    }

    #[test]
    fn steps_contract_at_rate_c((m, f) in (2usize..=5).prop_flat_map(|d| (positive_matrix_of(d), cone_vector(d)))) {
        let c = contraction_coeff(&m).unwrap().c;
        let steps: Vec<f64> = ProjectiveIteration::new(&m, &f)
            .unwrap()
            .take(12)
            .map(|s| s.step_distance)
            .collect();
        for w in steps.windows(2) {
            prop_assert!(w[1] <= c * w[0] + 1e-10);
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn grid_certificate_monotone_under_refinement(k in 1usize..5, sigma in 0.2..2.0f64) {
        // Trapezoid nodes for n = k + 1 are a subset of those for n = 2k + 1.
        let kern = BuiltinKernel::Gaussian { sigma };
        let coarse = KernelGrid::builtin(kern, k + 1, QuadratureRule::Trapezoid).unwrap();
        let fine = KernelGrid::builtin(kern, 2 * k + 1, QuadratureRule::Trapezoid).unwrap();
        let ac = factorization_certificate(&coarse).unwrap().a;
        let af = factorization_certificate(&fine).unwrap().a;
        prop_assert!(af >= ac * (1.0 - 1e-12), "coarse {ac} fine {af}");
    }
}

#[test]
fn separable_times_bounded_factor() {
    // K = g1(x) g2(y) g3(x, y) with g3 in [1/B, B] gives A <= B^2.
    let b: f64 = 1.5;
    for n in [3, 8, 20] {
        let grid = KernelGrid::tabulate(n, QuadratureRule::default(), |x, y| {
            let g3 = b.powf((3.0 * x * y).sin());
            (1.0 + x * x) * (2.0 - y) * g3
        })
        .unwrap();
        let cert = factorization_certificate(&grid).unwrap();
        assert!(cert.validate(&grid));
        assert!(cert.a <= b * b * (1.0 + 1e-12), "n={n} A={}", cert.a);
    }
}

#[test]
fn product_bound_dominates_product_coefficient() {
    use rand::{Rng, SeedableRng};
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let d = r.random_range(2..=6);
        let len = r.random_range(1..=5);
        let ms: Vec<NonnegativeMatrix> = (0..len)
            .map(|_| {
                let data = (0..d * d)
                    .map(|_| if r.random_bool(0.8) { r.random_range(0.1..10.0) } else { 0.0 })
                    .collect();
                NonnegativeMatrix::from_row_major(d, data).unwrap()
            })
            .filter(is_cone_preserving)
            .collect();
        if ms.is_empty() {
            continue;
        }
        let prod = ms[1..].iter().fold(ms[0].clone(), |acc, m| acc.matmul(m).unwrap());
        let bound = product_contraction_bound(&ms).unwrap();
        assert!(contraction_coeff(&prod).unwrap().c <= bound + 1e-10);
    }
}

#[test]
fn phi_subadditivity_grid() {
    let n = 200;
    for i in 0..=n {
        for j in 0..=n {
            let (s, t) = (i as f64 / n as f64, j as f64 / n as f64);
            assert!(phi(s * t).unwrap() <= phi(s).unwrap() + phi(t).unwrap() + 1e-15);
        }
    }
}

#[test]
fn pattern_test_is_exhaustive_for_uniform_positivity() {
    // Every 0/1 pattern up to 3x3 with ones as magnitudes: uniform positivity
    // and strict contraction agree on cone-preserving patterns.
    for d in 1..=3usize {
        for mask in 0u32..(1 << (d * d)) {
            let data = (0..d * d).map(|k| (mask >> k & 1) as f64).collect();
            let m = NonnegativeMatrix::from_row_major(d, data).unwrap();
            if !is_cone_preserving(&m) {
                assert!(contraction_coeff(&m).is_err());
                continue;
            }
            let c = contraction_coeff(&m).unwrap().c;
            assert_eq!(is_uniformly_positive(&m), c < 1.0, "{:?}", m.to_rows());
            assert_eq!(is_strictly_contracting(&m).unwrap(), c < 1.0, "{:?}", m.to_rows());
        }
    }
}
