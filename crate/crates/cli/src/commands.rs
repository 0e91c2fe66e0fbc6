use crate::{Format, Global};
use fracprop_core::config::{OutputFormat, RunConfig};
use fracprop_core::spectral::{
    self, check_hypotheses, frequency, sobolev_norm, SolutionBundle, SolveOptions, SpectralField,
};
use fracprop_core::symbols::{petrovsky_probe, validate_system, TriangularSystem};
use fracprop_core::verify::{self, CheckResult, ProbeKind, Status, VerificationReport};
use fracprop_core::{mittag_leffler, Complex64, Error, ForcingField};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_MALFORMED: u8 = 2;

const SPHERE_SAMPLES: usize = 256;

/// Configuration errors are malformed input; everything else is a failure of
/// the system or the computation.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => EXIT_MALFORMED,
        _ => EXIT_FAIL,
    }
}

pub fn report_error(e: &Error) -> u8 {
    eprintln!("error: {e}");
    exit_code(e)
}

pub fn load(g: &Global) -> Result<RunConfig, Error> {
    let path = g
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    RunConfig::load(path)
}

pub fn workers(g: &Global, cfg: &RunConfig) -> usize {
    g.workers.or(cfg.raw.workers).unwrap_or(1).max(1)
}

pub fn format(g: &Global, cfg: &RunConfig) -> Format {
    g.format.unwrap_or(match cfg.raw.output.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Json => Format::Json,
    })
}

pub fn output_dir(g: &Global, cfg: &RunConfig) -> Option<PathBuf> {
    g.output
        .clone()
        .or_else(|| cfg.raw.output.dir.as_ref().map(|d| cfg.resolve(d)))
}

/// Writes `name` under `dir`, or prints it when there is no directory.
pub fn emit(dir: Option<&Path>, name: &str, text: &str) -> Result<(), Error> {
    match dir {
        Some(d) => {
            std::fs::create_dir_all(d)
                .map_err(|e| Error::Config(format!("{}: {e}", d.display())))?;
            let path = d.join(name);
            std::fs::write(&path, text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn validate(g: &Global) -> u8 {
    let cfg = match load(g) {
        Ok(c) => c,
        Err(e) => return report_error(&e),
    };
    let sys = match cfg.system() {
        Ok(s) => s,
        Err(e) => {
            if exit_code(&e) == EXIT_FAIL {
                println!("INVALID: {e}");
            }
            return report_error(&e);
        }
    };
    let report = validate_system(&sys, SPHERE_SAMPLES);
    let petrovsky = petrovsky_probe(&sys, SPHERE_SAMPLES);
    if g.format == Some(Format::Json) {
        let mut v = serde_json::to_value(&report).expect("report serialises");
        v["petrovsky"] = serde_json::json!(petrovsky);
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    } else {
        println!("{}", if report.valid { "VALID" } else { "INVALID" });
        println!("m = {}, n = {}", report.m, report.n);
        println!("p* = {}", report.p_star);
        println!("q = {:?}", report.q);
        for (j, (min, hom)) in report
            .ellipticity_min
            .iter()
            .zip(&report.homogeneous)
            .enumerate()
        {
            println!(
                "A_{0}{0}: homogeneous {hom}, sampled minimum on the sphere {min:.16e}",
                j + 1
            );
        }
        println!("petrovsky constant (sampled) {petrovsky:.16e}");
        for v in &report.violations {
            println!("violation: {v}");
        }
    }
    if report.valid {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

pub struct Problem {
    pub cfg: RunConfig,
    pub sys: TriangularSystem,
    pub phi: Vec<SpectralField>,
    pub h: ForcingField,
}

pub fn problem(g: &Global) -> Result<Problem, Error> {
    let cfg = load(g)?;
    let sys = cfg.system()?;
    let phi = cfg.initial(&sys)?;
    let h = cfg.forcing(&sys, &phi)?;
    Ok(Problem { cfg, sys, phi, h })
}

pub fn solve(g: &Global) -> u8 {
    let p = match problem(g) {
        Ok(p) => p,
        Err(e) => return report_error(&e),
    };
    let times = match p.cfg.times() {
        Ok(t) => t,
        Err(e) => return report_error(&e),
    };
    let opts = SolveOptions {
        tol: g.tol.unwrap_or(p.cfg.raw.tolerances.solve),
        workers: workers(g, &p.cfg),
    };
    let start = Instant::now();
    let mut bundle = match spectral::solve(&p.sys, &p.phi, &p.h, &times, opts) {
        Ok(b) => b,
        Err(e) => {
            if let Error::Tolerance { .. } = e {
                eprintln!("tolerance failure: {e}");
                return EXIT_FAIL;
            }
            return report_error(&e);
        }
    };
    let elapsed = start.elapsed().as_secs_f64();
    let dir = output_dir(g, &p.cfg);
    // timings vary run to run; they go to their own file so the solution is reproducible
    let timings = std::mem::take(&mut bundle.meta.mode_seconds);
    let (name, text) = match format(g, &p.cfg) {
        Format::Json => (
            "solution.json",
            serde_json::to_string_pretty(&bundle.to_json_value()).expect("json") + "\n",
        ),
        Format::Csv => match bundle.to_csv(p.cfg.raw.output.grid_points) {
            Ok(t) => ("solution.csv", t),
            Err(e) => return report_error(&e),
        },
    };
    if let Err(e) = emit(dir.as_deref(), name, &text) {
        return report_error(&e);
    }
    let mut summary = String::from("t,component,l2_norm\n");
    for (t, row) in bundle.times.iter().zip(&bundle.fields) {
        for (i, f) in row.iter().enumerate() {
            summary.push_str(&format!(
                "{t:.16e},{},{:.16e}\n",
                i + 1,
                sobolev_norm(f, 0.0)
            ));
        }
    }
    eprint!("{summary}");
    eprintln!(
        "{} modes, {} times, {} workers, {:.3} s",
        bundle.lattice().len(),
        bundle.times.len(),
        opts.workers,
        elapsed
    );
    if let Some(d) = dir.as_deref() {
        let mut csv = String::from("k,seconds\n");
        for m in &timings {
            let k: Vec<String> = m.k.iter().map(i64::to_string).collect();
            csv.push_str(&format!("{},{:.16e}\n", k.join(" "), m.seconds));
        }
        if let Err(e) = emit(Some(d), "timings.csv", &csv) {
            return report_error(&e);
        }
    }
    EXIT_OK
}

pub fn ml(beta: f64, mu: f64, x: f64) -> u8 {
    match mittag_leffler(beta, mu, x) {
        Ok(v) => {
            println!("{v:.16e}");
            EXIT_OK
        }
        Err(e) => report_error(&e),
    }
}

pub const CHECKS: [&str; 7] = [
    "classical",
    "duhamel",
    "hypotheses",
    "laplace",
    "oracle",
    "probe",
    "residual",
];

fn failed(name: &str, e: &Error) -> CheckResult {
    CheckResult {
        name: name.into(),
        property: "check could not be completed".into(),
        status: Status::Fail,
        error: f64::INFINITY,
        tol: 0.0,
        runtime_seconds: 0.0,
        details: serde_json::json!({ "error": e.to_string() }),
    }
}

/// Non-zero modes with the smallest `|k|` (at most `count`), lattice order on ties.
fn lowest_modes(p: &Problem, count: usize) -> Vec<Vec<i64>> {
    let mut ks: Vec<Vec<i64>> = p
        .phi
        .iter()
        .flat_map(|f| {
            f.modes()
                .filter(|(_, c)| c.norm() > 0.0)
                .map(|(k, _)| k.clone())
        })
        .chain(p.h.components().iter().flat_map(|c| {
            c.spatial
                .modes()
                .filter(|(_, c)| c.norm() > 0.0)
                .map(|(k, _)| k.clone())
        }))
        .collect();
    ks.sort_by_key(|k| (k.iter().map(|x| x * x).sum::<i64>(), k.clone()));
    ks.dedup();
    ks.truncate(count);
    ks
}

fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn run_checks(p: &Problem, g: &Global, wanted: &dyn Fn(&str) -> bool) -> VerificationReport {
    let cfg = &p.cfg;
    let v = &cfg.raw.verify;
    let tols = cfg.raw.tolerances;
    let solve_tol = g.tol.unwrap_or(tols.solve);
    let opts = SolveOptions {
        tol: solve_tol,
        workers: workers(g, cfg),
    };
    let horizon = cfg.horizon();
    let mut report = VerificationReport::new();
    let modes = if v.oracle_modes.is_empty() {
        lowest_modes(p, 3)
    } else {
        v.oracle_modes.clone()
    };
    let probe_k = modes.first().cloned().unwrap_or_else(|| vec![1; p.sys.n()]);
    let probe_xi = frequency(&probe_k, p.h.period());

    if wanted("laplace") {
        let l = &v.laplace;
        report.push(
            verify::laplace_identity_check(l.beta, l.lambda, &l.s, tols.laplace)
                .unwrap_or_else(|e| failed("laplace", &e)),
        );
    }
    if wanted("duhamel") {
        let xi = v.duhamel_xi.clone().unwrap_or_else(|| probe_xi.clone());
        let comps = p.h.components();
        // temporal profiles with unit spatial amplitude
        let h_hat = |t: f64| -> Vec<Complex64> {
            comps
                .iter()
                .map(|c| {
                    if p.h.is_zero() {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(c.profile.eval(t), 0.0)
                    }
                })
                .collect()
        };
        report.push(
            verify::duhamel_equivalence_check(&p.sys, &xi, &h_hat, v.duhamel_time, tols.duhamel)
                .unwrap_or_else(|e| failed("duhamel_equivalence", &e)),
        );
    }
    if wanted("residual") {
        let r = match &v.solution {
            Some(file) => std::fs::read_to_string(cfg.resolve(file))
                .map_err(|e| Error::Config(format!("{file}: {e}")))
                .and_then(|text| SolutionBundle::from_json_str(&text))
                .and_then(|b| verify::residual_check_bundle(&p.sys, &b, &p.h, tols.residual)),
            None => verify::residual_check(
                &p.sys,
                &p.phi,
                &p.h,
                horizon,
                &v.residual_intervals,
                tols.residual,
                opts,
            ),
        };
        report.push(r.unwrap_or_else(|e| failed("residual", &e)));
    }
    if wanted("oracle") {
        let mut times: Vec<f64> = cfg.raw.times.iter().copied().filter(|t| *t > 0.0).collect();
        if times.is_empty() {
            times = vec![0.25 * horizon, horizon];
        }
        for k in &modes {
            let xi = frequency(k, p.h.period());
            let phi_hat: Vec<Complex64> = p.phi.iter().map(|f| f.get(k)).collect();
            let h_hat = |t: f64| p.h.mode_at(k, t);
            let name = format!("oracle k={k:?}");
            let mut r = verify::oracle_check(
                &p.sys,
                &xi,
                &phi_hat,
                &h_hat,
                &times,
                v.oracle_steps,
                solve_tol,
                tols.oracle,
            )
            .unwrap_or_else(|e| failed(&name, &e));
            r.name = name;
            report.push(r);
        }
    }
    if wanted("classical") && p.sys.betas().as_slice().iter().all(|&b| b == 1.0) {
        report.push(
            verify::classical_limit_check(
                &p.sys,
                &probe_xi,
                &[0.1 * horizon, horizon],
                tols.classical,
            )
            .unwrap_or_else(|e| failed("classical_limit", &e)),
        );
    }
    if wanted("probe") {
        if let Some(pr) = &v.probe {
            let kind = if pr.sprime {
                ProbeKind::SPrime
            } else {
                ProbeKind::S
            };
            report.push(
                verify::bound_probe_lemma5(
                    &p.sys,
                    pr.i,
                    pr.q,
                    pr.epsilon,
                    &log_grid(1.0, 1e3, 13),
                    &log_grid(1e-3, 1.0, 13),
                    kind,
                )
                .unwrap_or_else(|e| failed("bound_probe", &e)),
            );
        }
    }
    if wanted("hypotheses") {
        if let Some(tau) = v.tau {
            let start = Instant::now();
            let r = check_hypotheses(&p.sys, &p.phi, &p.h, tau, horizon).map(|h| CheckResult {
                name: "hypotheses".into(),
                property: "data regularity exponents and the dimension condition".into(),
                status: Status::Diagnostic,
                error: 0.0,
                tol: 0.0,
                runtime_seconds: start.elapsed().as_secs_f64(),
                details: serde_json::to_value(&h).expect("report serialises"),
            });
            report.push(r.unwrap_or_else(|e| failed("hypotheses", &e)));
        }
    }
    report
}

pub fn verify(g: &Global) -> u8 {
    if let Some(only) = &g.only {
        if !CHECKS
            .iter()
            .any(|c| c.starts_with(only.as_str()) || only.starts_with(c))
        {
            eprintln!(
                "error: unknown check \"{only}\"; known checks: {}",
                CHECKS.join(", ")
            );
            return EXIT_MALFORMED;
        }
    }
    let p = match problem(g) {
        Ok(p) => p,
        Err(e) => return report_error(&e),
    };
    let wanted = |name: &str| {
        g.only
            .as_deref()
            .map_or(true, |o| name.starts_with(o) || o.starts_with(name))
    };
    let report = run_checks(&p, g, &wanted);
    for c in report.checks() {
        println!("{c}");
    }
    let json = serde_json::to_string_pretty(&report).expect("report serialises") + "\n";
    let dir = output_dir(g, &p.cfg);
    if let Some(d) = dir.as_deref() {
        if let Err(e) = emit(Some(d), "verify_report.json", &json) {
            return report_error(&e);
        }
    } else if g.format == Some(Format::Json) {
        print!("{json}");
    }
    if report.passed() {
        println!("verification passed");
        EXIT_OK
    } else {
        println!("verification FAILED");
        EXIT_FAIL
    }
}
