use approx::assert_abs_diff_eq;
use fracprop_core::mlf::mittag_leffler;
use fracprop_core::propagator::{
    apply_s, duhamel_alt, duhamel_term, propagator_terms, s_entry, sprime_entry, Head, Propagator,
};
use fracprop_core::symbols::{FracOrderVector, MultiIndex, PolySymbol, TriangularSystem};
use fracprop_core::Complex64;
use nalgebra::DMatrix;

fn c(v: f64) -> PolySymbol {
    PolySymbol::new(1, [(MultiIndex(vec![0]), v)]).unwrap()
}

fn mono(e: u32, v: f64) -> PolySymbol {
    PolySymbol::new(1, [(MultiIndex(vec![e]), v)]).unwrap()
}

fn system(betas: &[f64], entries: Vec<((usize, usize), PolySymbol)>) -> TriangularSystem {
    TriangularSystem::new(1, FracOrderVector::new(betas.to_vec()).unwrap(), entries).unwrap()
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

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

#[test]
fn three_equation_entry_has_the_two_expected_terms() {
    let sys = showcase();
    let xi = [1.3];
    let terms = propagator_terms(&sys, 2, 0, &xi).unwrap();
    assert_eq!(terms.len(), 2);
    assert_eq!(terms[0].sign, -1);
    assert_eq!(terms[0].factors, vec![(2, 0)]);
    assert_eq!(
        terms[0].chain.iter().map(|s| s.beta).collect::<Vec<_>>(),
        vec![0.8]
    );
    assert_eq!(terms[1].sign, 1);
    assert_eq!(terms[1].factors, vec![(2, 1), (1, 0)]);
    assert_eq!(
        terms[1].chain.iter().map(|s| s.beta).collect::<Vec<_>>(),
        vec![0.6, 0.8]
    );
    for t in &terms {
        assert_eq!(t.head.beta, 0.4);
        assert_abs_diff_eq!(t.head.lambda, 1.3 * 1.3, epsilon = 1e-15);
    }
    assert_abs_diff_eq!(terms[1].coeff, 1.5 * 1.3 * 1.3, epsilon = 1e-14);
}

#[test]
fn zero_couplings_are_pruned() {
    let sys = system(
        &[0.5, 0.5, 0.5],
        vec![
            ((0, 0), c(1.0)),
            ((1, 1), c(1.0)),
            ((2, 2), c(1.0)),
            ((2, 1), c(1.0)),
        ],
    );
    let terms = propagator_terms(&sys, 2, 0, &[0.0]).unwrap();
    assert!(terms.is_empty());
    assert_eq!(s_entry(&sys, 2, 0, 1.0, &[0.0], 1e-8).unwrap(), 0.0);
}

#[test]
fn scalar_propagator_is_mittag_leffler() {
    let sys = system(&[0.5], vec![((0, 0), mono(2, 1.0))]);
    for &xi in &[0.3, 1.0, 4.0] {
        for &t in &[0.1f64, 1.0, 3.0] {
            let expected = mittag_leffler(0.5, 1.0, -xi * xi * t.powf(0.5)).unwrap();
            assert_eq!(s_entry(&sys, 0, 0, t, &[xi], 1e-10).unwrap(), expected);
            let kern = t.powf(-0.5) * mittag_leffler(0.5, 0.5, -xi * xi * t.powf(0.5)).unwrap();
            assert_abs_diff_eq!(
                sprime_entry(&sys, 0, 0, t, &[xi], 1e-10).unwrap(),
                kern,
                epsilon = 1e-14
            );
        }
    }
}

#[test]
fn identity_at_time_zero_and_zero_above_diagonal() {
    let sys = showcase();
    for &xi in &[0.0, 0.7, 5.0] {
        let p = Propagator::new(&sys, &[xi]).unwrap();
        assert_eq!(p.s_matrix(0.0), DMatrix::identity(3, 3));
        let s = p.s_matrix(0.8);
        for k in 0..3 {
            for j in k + 1..3 {
                assert_eq!(s[(k, j)], 0.0);
                assert_eq!(s_entry(&sys, k, j, 0.8, &[xi], 1e-8).unwrap(), 0.0);
            }
        }
    }
    let phi = vec![re(1.0), Complex64::new(0.0, 2.0), re(-3.0)];
    assert_eq!(apply_s(&sys, 0.0, &phi, &[2.0], 1e-8).unwrap(), phi);
}

#[test]
fn classical_two_by_two_closed_form() {
    let (a, b, cc) = (1.0, 3.0, 0.7);
    let sys = system(
        &[1.0, 1.0],
        vec![((0, 0), c(a)), ((1, 0), c(cc)), ((1, 1), c(b))],
    );
    for &t in &[0.05, 0.5, 2.0] {
        let expected = -cc * ((-a * t).exp() - (-b * t).exp()) / (b - a);
        assert_abs_diff_eq!(
            s_entry(&sys, 1, 0, t, &[0.0], 1e-10).unwrap(),
            expected,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            sprime_entry(&sys, 1, 0, t, &[0.0], 1e-10).unwrap(),
            expected,
            epsilon = 1e-12
        );
    }
}

#[test]
fn diagonal_stays_in_unit_interval() {
    let sys = showcase();
    for &xi in &[0.0, 0.5, 3.0, 30.0] {
        let p = Propagator::new(&sys, &[xi]).unwrap();
        for &t in &[1e-6, 0.01, 1.0, 100.0] {
            let s = p.s_matrix(t);
            for k in 0..3 {
                assert!(
                    s[(k, k)] > 0.0 && s[(k, k)] <= 1.0,
                    "xi={xi} t={t} s={}",
                    s[(k, k)]
                );
            }
        }
    }
}

#[test]
fn decoupled_system_acts_componentwise() {
    let sys = system(
        &[0.3, 0.9],
        vec![((0, 0), mono(2, 1.0)), ((1, 1), mono(2, 2.0))],
    );
    let phi = vec![Complex64::new(1.0, -1.0), re(2.0)];
    let out = apply_s(&sys, 0.7, &phi, &[1.5], 1e-8).unwrap();
    let e1 = mittag_leffler(0.3, 1.0, -2.25 * 0.7f64.powf(0.3)).unwrap();
    let e2 = mittag_leffler(0.9, 1.0, -4.5 * 0.7f64.powf(0.9)).unwrap();
    assert_eq!(out, vec![phi[0] * e1, phi[1] * e2]);
}

#[test]
fn contour_route_matches_time_domain_convolutions() {
    let sys = showcase();
    let p = Propagator::new(&sys, &[0.9]).unwrap();
    let t = 0.75;
    for (k, j) in [(1, 0), (2, 0), (2, 1)] {
        for term in p.terms(k, j) {
            for head in [Head::Relaxation, Head::Kernel] {
                let fast = p.term_value(term, t, head);
                // nested quadrature cost grows like (panel nodes)^depth
                let tol = if term.chain.len() == 1 { 1e-10 } else { 1e-6 };
                let slow = p.term_value_time_domain(term, t, head, tol).unwrap();
                assert_abs_diff_eq!(fast, slow, epsilon = 2.0 * tol);
            }
        }
    }
}

#[test]
fn entry_equals_sum_of_its_terms() {
    let sys = showcase();
    let p = Propagator::new(&sys, &[1.1]).unwrap();
    let s = p.s_matrix(0.6);
    let sp = p.sprime_matrix(0.6);
    let sum = |head| {
        p.terms(2, 0)
            .iter()
            .map(|term| p.term_value(term, 0.6, head))
            .sum::<f64>()
    };
    assert_abs_diff_eq!(s[(2, 0)], sum(Head::Relaxation), epsilon = 1e-13);
    assert_abs_diff_eq!(sp[(2, 0)], sum(Head::Kernel), epsilon = 1e-13);
}

#[test]
fn equal_orders_match_matrix_mittag_leffler_series() {
    let beta = 0.6;
    let sys = system(
        &[beta; 3],
        vec![
            ((0, 0), c(1.0)),
            ((1, 0), c(0.5)),
            ((1, 1), c(2.0)),
            ((2, 0), c(-0.3)),
            ((2, 1), c(0.8)),
            ((2, 2), c(1.5)),
        ],
    );
    let a = sys.matrix(&[0.0]).unwrap();
    let t: f64 = 0.3;
    // Σ (-A)^k t^{βk} / Γ(βk + 1)
    let mut series = DMatrix::<f64>::identity(3, 3);
    let mut power = DMatrix::<f64>::identity(3, 3);
    for k in 1..80 {
        power = &power * (-&a);
        let w = t.powf(beta * k as f64) / statrs::function::gamma::gamma(beta * k as f64 + 1.0);
        series += &power * w;
    }
    let s = Propagator::new(&sys, &[0.0]).unwrap().s_matrix(t);
    for k in 0..3 {
        for j in 0..=k {
            assert_abs_diff_eq!(s[(k, j)], series[(k, j)], epsilon = 1e-11);
        }
    }
}

#[test]
fn duhamel_examples() {
    let heat = system(&[1.0], vec![((0, 0), c(2.0))]);
    let zero = duhamel_term(&heat, 1.0, |_| vec![re(0.0)], &[0.0], 1e-10).unwrap();
    assert_eq!(zero, vec![re(0.0)]);
    let v = duhamel_term(&heat, 1.5, |_| vec![re(1.0)], &[0.0], 1e-11).unwrap();
    assert_abs_diff_eq!(v[0].re, (1.0 - (-3.0f64).exp()) / 2.0, epsilon = 1e-10);
    let w = duhamel_alt(&heat, 1.5, |_| vec![re(1.0)], &[0.0], 1e-11).unwrap();
    assert_abs_diff_eq!(w[0].re, v[0].re, epsilon = 1e-10);

    let frac = system(&[0.5], vec![((0, 0), c(1.0))]);
    let v = duhamel_term(&frac, 1.0, |_| vec![re(1.0)], &[0.0], 1e-10).unwrap();
    assert_abs_diff_eq!(v[0].re, 0.572416423844193, epsilon = 1e-9);
    let w = duhamel_alt(&frac, 1.0, |_| vec![re(1.0)], &[0.0], 1e-10).unwrap();
    assert_abs_diff_eq!(w[0].re, 0.572416423844193, epsilon = 1e-9);
}

#[test]
fn duhamel_forms_agree_for_smooth_forcing() {
    let sys = system(
        &[0.5, 0.8],
        vec![
            ((0, 0), mono(2, 1.0)),
            ((1, 0), mono(1, 1.0)),
            ((1, 1), mono(4, 1.0)),
        ],
    );
    let h = |t: f64| vec![re(1.0 + t), re((-t).exp())];
    for &xi in &[0.5, 1.0, 2.0] {
        let a = duhamel_term(&sys, 1.0, h, &[xi], 1e-9).unwrap();
        // the alternative form interpolates the sampled derivative linearly,
        // so it cannot be refined below the interpolation error
        let b = duhamel_alt(&sys, 1.0, h, &[xi], 1e-7).unwrap();
        for k in 0..2 {
            assert!(
                (a[k] - b[k]).norm() < 1e-4,
                "xi={xi} k={k} {} vs {}",
                a[k],
                b[k]
            );
        }
    }
}
