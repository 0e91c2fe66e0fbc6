use super::oracle::{ode_oracle_many, OracleCase};
use super::report::{CheckResult, Status};
use crate::error::{Error, Result};
use crate::frac_calculus::{caputo_l1, default_grading, SampledFunction, TimeGrid};
use crate::mlf::{laplace_transform_kernel, MLKernelSpec};
use crate::propagator::{Head, Propagator};
use crate::spectral::{
    frequency, solve, ForcingField, SolutionBundle, SolveOptions, SpectralField,
};
use crate::symbols::TriangularSystem;
use num_complex::Complex64;
use serde_json::json;
use std::time::Instant;

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn complex_json(v: &[Complex64]) -> serde_json::Value {
    json!(v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>())
}

/// Numerical Laplace transform of the kernel against `1/(s^β + λ)`, relative error.
pub fn laplace_identity_check(
    beta: f64,
    lambda: f64,
    s_samples: &[f64],
    tol: f64,
) -> Result<CheckResult> {
    let start = Instant::now();
    let spec = MLKernelSpec::new(beta, lambda)?;
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for &s in s_samples {
        let numeric = laplace_transform_kernel(spec, s)?;
        let exact = 1.0 / (s.powf(beta) + lambda);
        let rel = (numeric - exact).abs() / exact.abs();
        worst = worst.max(rel);
        rows.push(json!({"s": s, "numeric": numeric, "closed_form": exact, "rel_error": rel}));
    }
    Ok(CheckResult::graded(
        "laplace",
        "Laplace transform of the Mittag-Leffler kernel",
        worst,
        tol,
    )
    .with_details(json!({"beta": beta, "lambda": lambda, "samples": rows}))
    .timed(start))
}

/// Both Duhamel forms at one frequency and time.
pub fn duhamel_equivalence_check(
    sys: &TriangularSystem,
    xi: &[f64],
    h_hat: &dyn Fn(f64) -> Vec<Complex64>,
    t: f64,
    tol: f64,
) -> Result<CheckResult> {
    let start = Instant::now();
    let prop = Propagator::new(sys, xi)?;
    let inner = (tol * 1e-3).max(1e-7);
    let direct = prop.duhamel_term(t, h_hat, inner)?;
    let alt = prop.duhamel_alt(t, h_hat, inner)?;
    let err = max_abs_diff(&direct, &alt);
    Ok(CheckResult::graded("duhamel_equivalence", "two forms of the Duhamel integral coincide", err, tol)
        .with_details(json!({"xi": xi, "t": t, "direct": complex_json(&direct), "alternative": complex_json(&alt)}))
        .timed(start))
}

/// `sup |D_t^B Û + A(ξ)Û - Ĥ|` over the bundle's modes and the times `t ≥ t_from`.
///
/// The bundle times must form a mesh starting at `0`; the Caputo derivative is
/// the L1 discretisation on that mesh.
pub fn residual_sup(
    sys: &TriangularSystem,
    bundle: &SolutionBundle,
    h: &ForcingField,
    t_from: f64,
) -> Result<f64> {
    let m = sys.m();
    if bundle.m() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: bundle.m(),
        });
    }
    if bundle.times.first() != Some(&0.0) {
        return Err(Error::domain(
            "residual needs a solution sampled from t = 0",
        ));
    }
    let grid = TimeGrid::from_nodes(bundle.times.clone())?;
    let mut worst: f64 = 0.0;
    for k in bundle.lattice() {
        let xi = frequency(&k, h.period());
        let a = sys.matrix(&xi)?;
        let derivs = (0..m)
            .map(|i| {
                let samples: Vec<Complex64> = (0..bundle.times.len())
                    .map(|s| bundle.fields[s][i].get(&k))
                    .collect();
                caputo_l1(
                    &SampledFunction::new(grid.clone(), samples)?,
                    sys.betas()[i],
                )
            })
            .collect::<Result<Vec<_>>>()?;
        for (s, &t) in bundle.times.iter().enumerate().skip(1) {
            if t < t_from {
                continue;
            }
            let u = bundle.mode(s, &k);
            let hk = h.mode_at(&k, t);
            for i in 0..m {
                let au: Complex64 = (0..=i).map(|j| u[j] * a[(i, j)]).sum();
                worst = worst.max((derivs[i].values[s] + au - hk[i]).norm());
            }
        }
    }
    Ok(worst)
}

/// Residual of a given solution on its own time samples, over `t ≥ T/4`.
pub fn residual_check_bundle(
    sys: &TriangularSystem,
    bundle: &SolutionBundle,
    h: &ForcingField,
    tol: f64,
) -> Result<CheckResult> {
    let start = Instant::now();
    let t_end = *bundle
        .times
        .last()
        .ok_or_else(|| Error::domain("empty solution bundle"))?;
    let r = residual_sup(sys, bundle, h, 0.25 * t_end)?;
    Ok(
        CheckResult::graded("residual", "the solution satisfies the equation", r, tol)
            .with_details(json!({"samples": bundle.times.len()}))
            .timed(start),
    )
}

/// Solves on graded meshes of the given interval counts and records the
/// residual on each; passes when the residuals strictly decrease and the
/// finest one is within `tol`.
pub fn residual_check(
    sys: &TriangularSystem,
    phi: &[SpectralField],
    h: &ForcingField,
    t_end: f64,
    intervals: &[usize],
    tol: f64,
    opts: SolveOptions,
) -> Result<CheckResult> {
    let start = Instant::now();
    if intervals.len() < 2 {
        return Err(Error::domain(
            "residual refinement needs at least two meshes",
        ));
    }
    let grading = default_grading(sys.betas().min());
    let mut sups = Vec::with_capacity(intervals.len());
    for &n in intervals {
        let grid = TimeGrid::graded(t_end, n, grading)?;
        let bundle = solve(sys, phi, h, grid.nodes(), opts)?;
        sups.push(residual_sup(sys, &bundle, h, 0.25 * t_end)?);
    }
    let decreasing = sups.windows(2).all(|w| w[1] < w[0]);
    let finest = *sups.last().expect("two meshes");
    let mut r = CheckResult::graded(
        "residual",
        "the solution satisfies the equation",
        finest,
        tol,
    );
    if !decreasing {
        r.status = Status::Fail;
    }
    let ratios: Vec<f64> = sups.windows(2).map(|w| w[0] / w[1]).collect();
    Ok(r.with_details(json!({"intervals": intervals, "residuals": sups, "ratios": ratios, "decreasing": decreasing}))
        .timed(start))
}

/// Relative distance `‖a - b‖_∞ / ‖b‖_∞` (absolute when `b = 0`).
pub fn relative_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let d = max_abs_diff(a, b);
    if scale > 0.0 {
        d / scale
    } else {
        d
    }
}

/// Propagator solution at one frequency against the L1 time-stepping oracle
/// run once up to the largest time and interpolated at the others.
#[allow(clippy::too_many_arguments)]
pub fn oracle_check(
    sys: &TriangularSystem,
    xi: &[f64],
    phi_hat: &[Complex64],
    h_hat: &dyn Fn(f64) -> Vec<Complex64>,
    times: &[f64],
    steps: usize,
    solve_tol: f64,
    tol: f64,
) -> Result<CheckResult> {
    Ok(oracle_check_many(sys, xi, &[(phi_hat, h_hat)], times, steps, solve_tol, tol)?.remove(0))
}

/// [`oracle_check`] for several data sets sharing one oracle mesh.
pub fn oracle_check_many(
    sys: &TriangularSystem,
    xi: &[f64],
    cases: &[OracleCase],
    times: &[f64],
    steps: usize,
    solve_tol: f64,
    tol: f64,
) -> Result<Vec<CheckResult>> {
    let start = Instant::now();
    let prop = Propagator::new(sys, xi)?;
    let t_end = times.iter().copied().fold(0.0, f64::max);
    let oracles = ode_oracle_many(sys, xi, cases, t_end, steps)?;
    let mut out = Vec::with_capacity(cases.len());
    for (&(phi_hat, h_hat), oracle) in cases.iter().zip(&oracles) {
        let mut worst: f64 = 0.0;
        let mut rows = Vec::new();
        for &t in times {
            let mut u = prop.apply_s(t, phi_hat)?;
            for (a, b) in u.iter_mut().zip(prop.duhamel_term(t, h_hat, solve_tol)?) {
                *a += b;
            }
            let o = oracle.at(t);
            let rel = relative_error(&u, &o);
            worst = worst.max(rel);
            rows.push(json!({"t": t, "propagator": complex_json(&u), "oracle": complex_json(&o), "rel_error": rel}));
        }
        out.push(
            CheckResult::graded(
                "oracle",
                "propagator solution matches direct time stepping",
                worst,
                tol,
            )
            .with_details(json!({"xi": xi, "steps": steps, "times": rows})),
        );
    }
    let seconds = start.elapsed().as_secs_f64() / cases.len().max(1) as f64;
    for r in &mut out {
        r.runtime_seconds = seconds;
    }
    Ok(out)
}

/// For order-one systems, `S(t, ξ)` against `exp(-A(ξ) t)`.
pub fn classical_limit_check(
    sys: &TriangularSystem,
    xi: &[f64],
    times: &[f64],
    tol: f64,
) -> Result<CheckResult> {
    let start = Instant::now();
    if sys.betas().as_slice().iter().any(|&b| b != 1.0) {
        return Err(Error::domain(
            "classical limit check needs every order equal to 1",
        ));
    }
    let prop = Propagator::new(sys, xi)?;
    let a = sys.matrix(xi)?;
    let mut worst: f64 = 0.0;
    for &t in times {
        let e = (-(&a) * t).exp();
        let s = prop.s_matrix(t);
        worst = worst.max((s - e).amax());
    }
    Ok(CheckResult::graded(
        "classical_limit",
        "order-one propagator is the matrix exponential",
        worst,
        tol,
    )
    .with_details(json!({"xi": xi, "times": times}))
    .timed(start))
}

/// Which propagator the bound probe looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    S,
    SPrime,
}

/// Growth ratio of the longest-path term of row `m`, column `i` (one-based)
/// against the power-law majorant
/// `|ξ|^{p* - ℓ_ii + (m-i)ε} · t^{ε Σ β_j - β_i}` (sum over `j > i`) for `S`,
/// and `t^{ε Σ_{j ≥ i} β_j - 1}` for `S′`; the numerator is `|A_qq(ξ) Q(t, ξ)|`.
///
/// Frequencies are `|ξ| e_1`. The maximum is also taken over the grid with
/// its frequencies doubled; a change below 20% counts as a plateau.
/// Always a diagnostic.
pub fn bound_probe_lemma5(
    sys: &TriangularSystem,
    i: usize,
    q: usize,
    epsilon: f64,
    xi_grid: &[f64],
    t_grid: &[f64],
    kind: ProbeKind,
) -> Result<CheckResult> {
    let start = Instant::now();
    let m = sys.m();
    if !(1..=m).contains(&i) || !(1..=m).contains(&q) {
        return Err(Error::IndexOutOfRange(format!(
            "probe indices i = {i}, q = {q} must lie in 1..={m}"
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!(
            "epsilon = {epsilon} must lie in (0, 1)"
        )));
    }
    if xi_grid.is_empty() || t_grid.is_empty() || xi_grid.iter().chain(t_grid).any(|v| !(*v > 0.0))
    {
        return Err(Error::domain("probe grids must be non-empty and exclude 0"));
    }
    let betas = sys.betas().as_slice();
    let xi_exp = (sys.p_star() - sys.order(i - 1, i - 1)) as f64 + (m - i) as f64 * epsilon;
    let t_exp = match kind {
        ProbeKind::S => epsilon * betas[i..].iter().sum::<f64>() - betas[i - 1],
        ProbeKind::SPrime => epsilon * betas[i - 1..].iter().sum::<f64>() - 1.0,
    };
    let head = match kind {
        ProbeKind::S => Head::Relaxation,
        ProbeKind::SPrime => Head::Kernel,
    };
    let n = sys.n();
    let max_ratio = |grid: &[f64]| -> Result<f64> {
        let mut best: f64 = 0.0;
        for &r in grid {
            let mut xi = vec![0.0; n];
            xi[0] = r;
            let prop = Propagator::new(sys, &xi)?;
            let aqq = sys.entry(q - 1, q - 1).expect("diagonal entry").eval(&xi)?;
            let longest = if i == m {
                None
            } else {
                prop.terms(m - 1, i - 1)
                    .iter()
                    .find(|term| term.path.steps() == m - i)
            };
            for &t in t_grid {
                let qv = match (longest, head) {
                    (Some(term), _) => prop.term_value(term, t, head),
                    (None, Head::Relaxation) => prop.s_matrix(t)[(m - 1, m - 1)],
                    (None, Head::Kernel) => prop.sprime_matrix(t)[(m - 1, m - 1)],
                };
                let ratio = (aqq * qv).abs() / (r.powf(xi_exp) * t.powf(t_exp));
                if !ratio.is_finite() {
                    return Err(Error::domain(format!(
                        "probe ratio overflowed at |ξ| = {r}, t = {t}"
                    )));
                }
                best = best.max(ratio);
            }
        }
        Ok(best)
    };
    let base = max_ratio(xi_grid)?;
    let extended: Vec<f64> = xi_grid.iter().map(|r| 2.0 * r).collect();
    let ext = base.max(max_ratio(&extended)?);
    let change = if base > 0.0 { (ext - base) / base } else { 0.0 };
    let plateau = change < 0.2;
    let mut r = CheckResult::graded(
        "bound_probe",
        "longest-path term obeys a power-law majorant",
        base,
        f64::INFINITY,
    );
    r.status = Status::Diagnostic;
    Ok(r.with_details(json!({
        "i": i, "q": q, "epsilon": epsilon,
        "kind": match kind { ProbeKind::S => "S", ProbeKind::SPrime => "S'" },
        "xi_exponent": xi_exp, "t_exponent": t_exp,
        "max_ratio": base, "max_ratio_extended": ext, "relative_change": change, "plateau": plateau,
    }))
    .timed(start))
}
