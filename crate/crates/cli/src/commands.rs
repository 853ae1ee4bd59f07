use std::time::Instant;

use projcone::{
    contraction_coeff_with, contraction_report_formula, factorization_certificate,
    is_cone_preserving_with, is_strictly_contracting_with, is_uniformly_positive_with,
    kernel_contraction_estimate_with, m_ratio_with, perron_iterate, phi, psi,
    uniform_positivity_certificate_with, AnalysisOptions, BuiltinKernel, ConeVector,
    ContractionReport, KernelGrid, NonnegativeMatrix,
};
use serde_json::{json, Value};

use crate::io::{load_kernel_grid, load_matrix, load_vector_pair, parse_vector};
use crate::report::{num, nums, opt_num, CliError, Report};
use crate::{BuiltinName, Cli, CoeffArgs, Command, DistArgs, KernelArgs, MatrixArg, PerronArgs};

/// Tolerance for the quadrature-weight invariance check.
pub const WEIGHT_INVARIANCE_TOL: f64 = 1e-12;

pub fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    if !(cli.zero_tol >= 0.0) || !cli.zero_tol.is_finite() {
        return Err(CliError::new("invalid_argument", format!("--zero-tol must be finite and >= 0, got {}", cli.zero_tol))
            .at(json!({ "argument": "zero_tol" })));
    }
    match &cli.command {
        Command::Dist(a) => dist(a, cli.zero_tol),
        Command::Coeff(a) => coeff(a, cli.zero_tol),
        Command::Check(a) => check(a, cli.zero_tol),
        Command::Perron(a) => perron(a, cli.zero_tol),
        Command::Kernel(a) => kernel(a, cli.zero_tol),
    }
}

fn witness(w: Option<(usize, usize)>) -> Value {
    w.map_or(Value::Null, |(i, j)| json!([i, j]))
}

fn contraction_json(r: &ContractionReport) -> Value {
    json!({
        "c": num(r.c),
        "is_strict": r.is_strict,
        "a_star": opt_num(r.a_star),
        "witness": witness(r.witness),
        "method": r.method,
    })
}

pub fn dist(args: &DistArgs, zero_tol: f64) -> Result<Report, CliError> {
    let (f, g, inputs) = match &args.file {
        Some(path) => {
            let (f, g) = load_vector_pair(path)?;
            (f, g, json!({ "file": path.display().to_string() }))
        }
        None => {
            let f = parse_vector(&args.vectors[0])?;
            let g = parse_vector(&args.vectors[1])?;
            let inputs = json!({ "f": nums(f.entries()), "g": nums(g.entries()) });
            (f, g, inputs)
        }
    };
    let r = m_ratio_with(&f, &g, zero_tol)?;
    let d = phi(r.m)?;
    let d_h = if r.m > 0.0 { -r.m.ln() } else { f64::INFINITY };
    let mut inputs = inputs;
    inputs["zero_tol"] = num(zero_tol);
    Ok(Report::new(
        "dist",
        inputs,
        json!({
            "d": num(d),
            "d_H": num(d_h),
            "m": num(r.m),
            "aleph_fg": num(r.aleph_fg),
            "aleph_gf": num(r.aleph_gf),
        }),
    ))
}

pub fn coeff(args: &CoeffArgs, zero_tol: f64) -> Result<Report, CliError> {
    let m = load_matrix(&args.file)?;
    let opts = AnalysisOptions {
        zero_tol,
        parallel: !args.serial,
    };
    let start = Instant::now();
    let r = if args.formula {
        contraction_report_formula(&m, zero_tol)?
    } else {
        contraction_coeff_with(&m, &opts)?
    };
    let elapsed = start.elapsed().as_secs_f64();
    let mut results = contraction_json(&r);
    results["elapsed_seconds"] = num(elapsed);
    Ok(Report::new(
        "coeff",
        json!({
            "file": args.file.display().to_string(),
            "dim": m.dim(),
            "formula": args.formula,
            "serial": args.serial,
            "zero_tol": num(zero_tol),
        }),
        results,
    ))
}

pub fn check(args: &MatrixArg, zero_tol: f64) -> Result<Report, CliError> {
    let m = load_matrix(&args.file)?;
    let mut warnings = Vec::new();
    let cone_preserving = is_cone_preserving_with(&m, zero_tol);
    let uniformly_positive = is_uniformly_positive_with(&m, zero_tol);
    let strictly_contracting = match is_strictly_contracting_with(&m, zero_tol) {
        Ok(s) => s,
        Err(e) => {
            warnings.push(format!("strict contraction is undefined: {e}"));
            false
        }
    };
    let certificate = if uniformly_positive && cone_preserving {
        serde_json::to_value(uniform_positivity_certificate_with(&m, zero_tol)?)
            .expect("certificate serializes")
    } else {
        if uniformly_positive {
            warnings.push("uniformly positive but not cone-preserving, no certificate".into());
        }
        Value::Null
    };
    let mut report = Report::new(
        "check",
        json!({
            "file": args.file.display().to_string(),
            "dim": m.dim(),
            "zero_tol": num(zero_tol),
        }),
        json!({
            "is_cone_preserving": cone_preserving,
            "is_uniformly_positive": uniformly_positive,
            "is_strictly_contracting": strictly_contracting,
            "certificate": certificate,
        }),
    );
    report.warnings = warnings;
    Ok(report)
}

pub fn perron(args: &PerronArgs, zero_tol: f64) -> Result<Report, CliError> {
    let m = load_matrix(&args.file)?;
    let start = match &args.start {
        Some(s) => parse_vector(s)?,
        None => ConeVector::uniform(m.dim())?,
    };
    let r = perron_iterate(&m, &start, args.tol, args.max_iter)?;
    let mut report = Report::new(
        "perron",
        json!({
            "file": args.file.display().to_string(),
            "dim": m.dim(),
            "tol": num(args.tol),
            "max_iter": args.max_iter,
            "start": nums(start.entries()),
            "zero_tol": num(zero_tol),
        }),
        json!({
            "eigenvector": nums(r.eigenvector.entries()),
            "eigenvalue_lower": num(r.eigenvalue_lower),
            "eigenvalue_upper": num(r.eigenvalue_upper),
            "iterations": r.iterations,
            "final_step_distance": num(r.final_step_distance),
            "error_bound": opt_num(r.error_bound),
            "converged": r.converged,
            "contraction": opt_num(r.contraction),
        }),
    );
    if !r.converged {
        report.warn(format!(
            "max-iter {} reached without step distance <= {}",
            args.max_iter, args.tol
        ));
    }
    match r.contraction {
        Some(c) if c >= 1.0 => report.warn("no contraction certificate (c = 1), error_bound omitted"),
        None => report.warn(format!(
            "dimension {} exceeds {}, contraction coefficient not computed, error_bound omitted",
            m.dim(),
            projcone::perron::COEFF_DIM_LIMIT
        )),
        _ => {}
    }
    Ok(report)
}

fn param(params: &[(String, f64)], key: &str, default: f64) -> f64 {
    params
        .iter()
        .rev()
        .find(|(k, _)| k == key)
        .map_or(default, |&(_, v)| v)
}

fn parse_params(raw: &[String], allowed: &[&str]) -> Result<Vec<(String, f64)>, CliError> {
    raw.iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let bad = || {
                CliError::new("invalid_argument", format!("bad parameter {s:?}, expected key=value"))
                    .at(json!({ "argument": "params" }))
            };
            let (k, v) = s.split_once('=').ok_or_else(bad)?;
            let k = k.trim();
            if !allowed.contains(&k) {
                return Err(CliError::new(
                    "invalid_argument",
                    format!("unknown parameter {k:?}, expected one of {allowed:?}"),
                )
                .at(json!({ "argument": "params" })));
            }
            let v: f64 = v.trim().parse().map_err(|_| bad())?;
            if !v.is_finite() {
                return Err(bad());
            }
            Ok((k.to_owned(), v))
        })
        .collect()
}

/// Builtin family with its parameters; defaults a = 1, b = 1, sigma = 1.
pub fn builtin_kernel(name: BuiltinName, raw: &[String]) -> Result<BuiltinKernel, CliError> {
    let positive = |key: &'static str, v: f64| {
        if v > 0.0 {
            Ok(v)
        } else {
            Err(CliError::new("invalid_argument", format!("{key} must be > 0, got {v}"))
                .at(json!({ "argument": key })))
        }
    };
    let nonneg = |key: &'static str, v: f64| {
        if v >= 0.0 {
            Ok(v)
        } else {
            Err(CliError::new("invalid_argument", format!("{key} must be >= 0, got {v}"))
                .at(json!({ "argument": key })))
        }
    };
    Ok(match name {
        BuiltinName::Constant => {
            parse_params(raw, &[])?;
            BuiltinKernel::Constant
        }
        BuiltinName::Poly1xy => {
            parse_params(raw, &[])?;
            BuiltinKernel::Poly1xy
        }
        BuiltinName::Separable => {
            let p = parse_params(raw, &["a", "b"])?;
            BuiltinKernel::Separable {
                a: nonneg("a", param(&p, "a", 1.0))?,
                b: nonneg("b", param(&p, "b", 1.0))?,
            }
        }
        BuiltinName::Gaussian => {
            let p = parse_params(raw, &["sigma"])?;
            BuiltinKernel::Gaussian {
                sigma: positive("sigma", param(&p, "sigma", 1.0))?,
            }
        }
    })
}

pub fn kernel(args: &KernelArgs, zero_tol: f64) -> Result<Report, CliError> {
    let (grid, inputs) = match (&args.file, args.builtin) {
        (Some(path), _) => (
            load_kernel_grid(path)?,
            json!({ "file": path.display().to_string() }),
        ),
        (None, Some(name)) => {
            let k = builtin_kernel(name, &args.params)?;
            let grid = KernelGrid::builtin(k, args.n, args.rule.into())?;
            (grid, json!({ "builtin": k, "n": args.n, "rule": projcone::QuadratureRule::from(args.rule) }))
        }
        (None, None) => {
            return Err(CliError::new("usage", "either --file or --builtin is required"));
        }
    };
    let mut inputs = inputs;
    inputs["zero_tol"] = num(zero_tol);

    let cert = factorization_certificate(&grid)?;
    let opts = AnalysisOptions::with_zero_tol(zero_tol);
    let report = kernel_contraction_estimate_with(&grid, &opts)?;
    let unweighted = contraction_coeff_with(&grid.value_matrix(), &opts)?;
    let psi_a = psi(cert.a)?;
    let diff = (report.c - unweighted.c).abs();

    let mut out = Report::new(
        "kernel",
        inputs,
        json!({
            "n": grid.len(),
            "c_grid": num(report.c),
            "contraction": contraction_json(&report),
            "certificate": {
                "A": num(cert.a),
                "g1": nums(cert.g1.entries()),
                "g2": nums(cert.g2.entries()),
                "reference": [cert.reference.0, cert.reference.1],
            },
            "psi_of_A": num(psi_a),
            "psi_bound_holds": report.c <= psi_a + 1e-10,
            "weight_invariance": {
                "c_unweighted": num(unweighted.c),
                "abs_diff": num(diff),
                "holds": diff <= WEIGHT_INVARIANCE_TOL,
            },
        }),
    );
    if report.c > psi_a + 1e-10 {
        out.warn(format!(
            "c_grid = {} exceeds psi(A) = {}; the certificate only guarantees c <= psi(A^2) = {}",
            report.c,
            psi_a,
            psi(cert.a * cert.a)?
        ));
    }
    if diff > WEIGHT_INVARIANCE_TOL {
        out.warn(format!("weighted and unweighted c differ by {diff}"));
    }
    Ok(out)
}

/// For tests and scripting: the matrix behind a builtin kernel grid.
pub fn builtin_matrix(name: BuiltinName, params: &[String], n: usize, rule: crate::Rule) -> Result<NonnegativeMatrix, CliError> {
    let grid = KernelGrid::builtin(builtin_kernel(name, params)?, n, rule.into())?;
    Ok(projcone::discretize(&grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params() {
        let k = builtin_kernel(BuiltinName::Separable, &["a=2".into(), "b=0.5".into()]).unwrap();
        assert_eq!(k, BuiltinKernel::Separable { a: 2.0, b: 0.5 });
        let k = builtin_kernel(BuiltinName::Gaussian, &[]).unwrap();
        assert_eq!(k, BuiltinKernel::Gaussian { sigma: 1.0 });
        for bad in [vec!["sigma=0".to_string()], vec!["s=1".into()], vec!["sigma".into()], vec!["sigma=x".into()]] {
            let e = builtin_kernel(BuiltinName::Gaussian, &bad).unwrap_err();
            assert_eq!(e.code, "invalid_argument", "{bad:?}");
        }
        assert!(builtin_kernel(BuiltinName::Constant, &["a=1".into()]).is_err());
    }

    #[test]
    fn separable_matrix_is_rank_one() {
        let m = builtin_matrix(BuiltinName::Separable, &[], 5, crate::Rule::Midpoint).unwrap();
        assert!(projcone::contraction_coeff(&m).unwrap().c <= 1e-12);
    }
}
