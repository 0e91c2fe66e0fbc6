use approx::assert_abs_diff_eq;
use fracprop_core::spectral::{
    solve, ForcingComponent, ForcingField, SolutionBundle, SolveOptions, SpectralField, TimeProfile,
};
use fracprop_core::symbols::{FracOrderVector, MultiIndex, PolySymbol, TriangularSystem};
use fracprop_core::verify::{
    bound_probe_lemma5, classical_limit_check, duhamel_equivalence_check, laplace_identity_check,
    oracle_check, residual_check, residual_check_bundle, residual_sup, ProbeKind, Status,
};
use fracprop_core::Complex64;
use std::f64::consts::PI;

fn mono(e: u32, v: f64) -> PolySymbol {
    PolySymbol::new(1, [(MultiIndex(vec![e]), v)]).unwrap()
}

fn system(betas: &[f64], entries: Vec<((usize, usize), PolySymbol)>) -> TriangularSystem {
    TriangularSystem::new(1, FracOrderVector::new(betas.to_vec()).unwrap(), entries).unwrap()
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn two_by_two() -> TriangularSystem {
    system(
        &[0.5, 0.7],
        vec![
            ((0, 0), mono(2, 1.0)),
            ((1, 0), mono(1, 1.0)),
            ((1, 1), mono(4, 1.0)),
        ],
    )
}

fn showcase() -> TriangularSystem {
    system(
        &[0.4, 0.6, 0.8],
        vec![
            ((0, 0), mono(2, 1.0)),
            ((1, 0), mono(1, 1.0)),
            ((1, 1), mono(2, 2.0)),
            ((2, 0), mono(1, -0.5)),
            ((2, 1), mono(1, 1.5)),
            ((2, 2), mono(4, 1.0)),
        ],
    )
}

fn torus_field(modes: &[(i64, Complex64)]) -> SpectralField {
    SpectralField::from_modes(1, 2.0 * PI, modes.iter().map(|(k, c)| (vec![*k], *c))).unwrap()
}

#[test]
fn laplace_examples() {
    let r = laplace_identity_check(1.0, 2.0, &[1.0], 1e-10).unwrap();
    assert_eq!(r.status, Status::Pass);
    let r = laplace_identity_check(0.5, 1.0, &[1.0], 1e-8).unwrap();
    assert_eq!(r.status, Status::Pass);
    let r = laplace_identity_check(0.3, 10.0, &[2.0], 1e-8).unwrap();
    assert_eq!(r.status, Status::Pass);
    assert_abs_diff_eq!(
        r.details["samples"][0]["closed_form"].as_f64().unwrap(),
        0.0890,
        epsilon = 5e-5
    );
}

#[test]
fn duhamel_examples() {
    let zero = duhamel_equivalence_check(&two_by_two(), &[1.0], &|_| vec![re(0.0); 2], 1.0, 1e-12)
        .unwrap();
    assert_eq!(zero.error, 0.0);

    let lambda = 1.7;
    let heat = system(&[1.0], vec![((0, 0), mono(0, lambda))]);
    let r = duhamel_equivalence_check(&heat, &[0.3], &|_| vec![re(1.0)], 1.0, 1e-6).unwrap();
    let want = (1.0 - (-lambda).exp()) / lambda;
    assert_abs_diff_eq!(
        r.details["direct"][0][0].as_f64().unwrap(),
        want,
        epsilon = 1e-9
    );
    assert_abs_diff_eq!(
        r.details["alternative"][0][0].as_f64().unwrap(),
        want,
        epsilon = 1e-6
    );
    assert_eq!(r.status, Status::Pass);

    let h = |t: f64| vec![re(1.0), re(t), re((-t).exp())];
    let r = duhamel_equivalence_check(&showcase(), &[0.8], &h, 1.0, 1e-4).unwrap();
    assert_eq!(r.status, Status::Pass, "{r}");
}

#[test]
fn oracle_agrees_on_the_two_equation_example() {
    let sys = two_by_two();
    // cos x and sin x at k = 1: amplitudes 1/2 and i/2
    let phi = [re(0.5), Complex64::new(0.0, 0.5)];
    let r = oracle_check(
        &sys,
        &[1.0],
        &phi,
        &|_| vec![re(0.0); 2],
        &[0.25, 1.0],
        4096,
        1e-9,
        1e-3,
    )
    .unwrap();
    assert_eq!(r.status, Status::Pass, "{r}");
}

#[test]
fn order_one_systems_are_matrix_exponentials() {
    let sys = system(
        &[1.0, 1.0, 1.0],
        vec![
            ((0, 0), mono(2, 1.0)),
            ((1, 0), mono(1, 0.4)),
            ((1, 1), mono(2, 2.0)),
            ((2, 0), mono(0, -1.0)),
            ((2, 1), mono(1, 1.5)),
            ((2, 2), mono(4, 1.0)),
        ],
    );
    let r = classical_limit_check(&sys, &[1.1], &[0.1, 1.0], 1e-8).unwrap();
    assert_eq!(r.status, Status::Pass, "{r}");
    assert!(classical_limit_check(&two_by_two(), &[1.0], &[1.0], 1e-8).is_err());
}

#[test]
fn exact_heat_samples_have_first_order_residual() {
    let sys = system(&[1.0], vec![((0, 0), mono(2, 1.0))]);
    let h = ForcingField::zero(1, 1, 2.0 * PI).unwrap();
    let bundle = |n: usize| {
        let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let fields = times
            .iter()
            .map(|t| vec![torus_field(&[(1, re((-t).exp()))])])
            .collect();
        SolutionBundle {
            times,
            fields,
            meta: Default::default(),
        }
    };
    let coarse = residual_sup(&sys, &bundle(100), &h, 0.25).unwrap();
    let fine = residual_sup(&sys, &bundle(200), &h, 0.25).unwrap();
    assert!(
        fine < 4e-3 && (coarse / fine - 2.0).abs() < 0.05,
        "{coarse} {fine}"
    );
}

#[test]
fn residual_refines_for_the_two_equation_example() {
    let sys = two_by_two();
    let phi = [
        torus_field(&[(1, re(0.5)), (-1, re(0.5))]),
        torus_field(&[
            (1, Complex64::new(0.0, -0.5)),
            (-1, Complex64::new(0.0, 0.5)),
        ]),
    ];
    let h = ForcingField::zero(2, 1, 2.0 * PI).unwrap();
    let r = residual_check(
        &sys,
        &phi,
        &h,
        1.0,
        &[32, 64, 128, 256],
        1e-2,
        SolveOptions::default(),
    )
    .unwrap();
    assert_eq!(r.status, Status::Pass, "{r} {}", r.details);
}

#[test]
fn mismatched_forcing_fails_the_residual() {
    let sys = two_by_two();
    let phi = [
        torus_field(&[(1, re(0.5)), (-1, re(0.5))]),
        torus_field(&[]),
    ];
    let h = ForcingField::zero(2, 1, 2.0 * PI).unwrap();
    let times: Vec<f64> = (0..=128).map(|i| (i as f64 / 128.0).powi(4)).collect();
    let b = solve(&sys, &phi, &h, &times, SolveOptions::default()).unwrap();
    assert_eq!(
        residual_check_bundle(&sys, &b, &h, 1e-2).unwrap().status,
        Status::Pass
    );
    // H + 1 on the two modes of the first component
    let shifted = ForcingField::new(vec![
        ForcingComponent {
            spatial: torus_field(&[(1, re(1.0)), (-1, re(1.0))]),
            profile: TimeProfile::Constant { value: 1.0 },
        },
        ForcingComponent {
            spatial: torus_field(&[]),
            profile: TimeProfile::Constant { value: 0.0 },
        },
    ])
    .unwrap();
    let r = residual_check_bundle(&sys, &b, &shifted, 1e-2).unwrap();
    assert_eq!(r.status, Status::Fail);
    assert!((r.error - 1.0).abs() < 1e-2);
}

#[test]
fn bound_probe_plateaus() {
    let log = |a: f64, b: f64, n: usize| -> Vec<f64> {
        (0..n)
            .map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64))
            .collect()
    };
    let r = bound_probe_lemma5(
        &two_by_two(),
        1,
        2,
        0.5,
        &log(1.0, 1e3, 13),
        &log(1e-3, 1.0, 13),
        ProbeKind::S,
    )
    .unwrap();
    assert_eq!(r.status, Status::Diagnostic);
    assert!(r.details["plateau"].as_bool().unwrap(), "{}", r.details);
    assert!(r.error.is_finite() && r.error > 0.0);
    let scalar = system(&[0.6], vec![((0, 0), mono(2, 1.0))]);
    let r = bound_probe_lemma5(
        &scalar,
        1,
        1,
        0.5,
        &log(1.0, 1e3, 7),
        &log(1e-3, 1.0, 7),
        ProbeKind::SPrime,
    )
    .unwrap();
    assert!(r.error.is_finite());
    assert!(bound_probe_lemma5(&scalar, 1, 1, 0.5, &[0.0], &[1.0], ProbeKind::S).is_err());
}
