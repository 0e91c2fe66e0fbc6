use crate::commands::{emit, output_dir, problem, report_error, workers, EXIT_OK};
use crate::Global;
use fracprop_core::propagator::Propagator;
use fracprop_core::spectral::{frequency, solve, SolveOptions};
use fracprop_core::symbols::{SystemSpec, TriangularSystem};
use std::collections::BTreeSet;
use std::time::Instant;

/// Leading `k × k` block of the system.
fn leading(sys: &TriangularSystem, k: usize) -> Result<TriangularSystem, fracprop_core::Error> {
    let spec = sys.to_spec();
    SystemSpec {
        m: k,
        n: spec.n,
        betas: spec.betas[..k].to_vec(),
        entries: spec.entries.into_iter().filter(|e| e.i <= k).collect(),
    }
    .build()
}

/// Timing table: propagator evaluation per mode for every leading block of the
/// system, then a full solve with one worker and with the requested count.
pub fn run(g: &Global) -> u8 {
    let p = match problem(g) {
        Ok(p) => p,
        Err(e) => return report_error(&e),
    };
    let horizon = p.cfg.horizon();
    let lattice: Vec<Vec<i64>> = p
        .phi
        .iter()
        .flat_map(|f| f.modes().map(|(k, _)| k.clone()))
        .chain(
            p.h.components()
                .iter()
                .flat_map(|c| c.spatial.modes().map(|(k, _)| k.clone())),
        )
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut csv = String::from("kind,m,workers,modes,terms,seconds,seconds_per_mode\n");
    for k in 1..=p.sys.m() {
        let sub = match leading(&p.sys, k) {
            Ok(s) => s,
            Err(e) => return report_error(&e),
        };
        let start = Instant::now();
        let mut terms = 0;
        for mode in &lattice {
            let prop = match Propagator::new(&sub, &frequency(mode, p.h.period())) {
                Ok(pr) => pr,
                Err(e) => return report_error(&e),
            };
            terms = prop.term_count();
            std::hint::black_box(prop.s_matrix(horizon));
            std::hint::black_box(prop.sprime_matrix(0.5 * horizon));
        }
        let secs = start.elapsed().as_secs_f64();
        csv.push_str(&format!(
            "propagator,{k},1,{},{terms},{secs:.16e},{:.16e}\n",
            lattice.len(),
            secs / lattice.len().max(1) as f64
        ));
    }
    let times = p.cfg.times().unwrap_or_else(|_| vec![horizon]);
    let requested = workers(g, &p.cfg);
    let counts: Vec<usize> = if requested > 1 {
        vec![1, requested]
    } else {
        vec![1]
    };
    for w in counts {
        let opts = SolveOptions {
            tol: g.tol.unwrap_or(p.cfg.raw.tolerances.solve),
            workers: w,
        };
        let start = Instant::now();
        let bundle = match solve(&p.sys, &p.phi, &p.h, &times, opts) {
            Ok(b) => b,
            Err(e) => return report_error(&e),
        };
        let secs = start.elapsed().as_secs_f64();
        csv.push_str(&format!(
            "solve,{},{w},{},{},{secs:.16e},{:.16e}\n",
            p.sys.m(),
            lattice.len(),
            bundle.meta.term_count,
            secs / lattice.len().max(1) as f64
        ));
    }
    if let Err(e) = emit(output_dir(g, &p.cfg).as_deref(), "bench.csv", &csv) {
        return report_error(&e);
    }
    EXIT_OK
}
