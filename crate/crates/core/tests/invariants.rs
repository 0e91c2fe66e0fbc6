use fracprop_core::mlf::mittag_leffler;
use fracprop_core::propagator::{Head, Propagator};
use fracprop_core::spectral::SpectralField;
use fracprop_core::symbols::{FracOrderVector, MultiIndex, PolySymbol, TriangularSystem};
use fracprop_core::Complex64;
use proptest::prelude::*;

fn mono(e: u32, v: f64) -> PolySymbol {
    PolySymbol::new(1, [(MultiIndex(vec![e]), v)]).unwrap()
}

fn system3(betas: [f64; 3], diag: [f64; 3], low: [f64; 3]) -> TriangularSystem {
    TriangularSystem::new(
        1,
        FracOrderVector::new(betas.to_vec()).unwrap(),
        vec![
            ((0, 0), mono(2, diag[0])),
            ((1, 0), mono(1, low[0])),
            ((1, 1), mono(2, diag[1])),
            ((2, 0), mono(1, low[1])),
            ((2, 1), mono(1, low[2])),
            ((2, 2), mono(4, diag[2])),
        ],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn relaxation_is_completely_monotone_on_samples(beta in 0.1f64..=1.0, x in 0.0f64..50.0, dx in 1e-3f64..5.0) {
        let a = mittag_leffler(beta, 1.0, -x).unwrap();
        let b = mittag_leffler(beta, 1.0, -(x + dx)).unwrap();
        prop_assert!(a > 0.0 && a <= 1.0);
        prop_assert!(b <= a + 1e-15);
    }

    #[test]
    fn propagator_is_lower_triangular_with_identity_start(
        betas in prop::array::uniform3(0.1f64..=1.0),
        diag in prop::array::uniform3(0.2f64..3.0),
        low in prop::array::uniform3(-2.0f64..2.0),
        xi in 0.0f64..4.0,
        t in 1e-3f64..3.0,
    ) {
        let p = Propagator::new(&system3(betas, diag, low), &[xi]).unwrap();
        prop_assert_eq!(p.s_matrix(0.0), nalgebra::DMatrix::identity(3, 3));
        let s = p.s_matrix(t);
        for k in 0..3 {
            prop_assert!(s[(k, k)] > 0.0 && s[(k, k)] <= 1.0);
            for j in k + 1..3 {
                prop_assert_eq!(s[(k, j)], 0.0);
            }
            for j in 0..k {
                let sum: f64 = p.terms(k, j).iter().map(|term| p.term_value(term, t, Head::Relaxation)).sum();
                prop_assert!((s[(k, j)] - sum).abs() <= 1e-13 * (1.0 + sum.abs()));
            }
        }
    }

    #[test]
    fn apply_s_is_linear(
        betas in prop::array::uniform3(0.1f64..=1.0),
        low in prop::array::uniform3(-2.0f64..2.0),
        u in prop::array::uniform3(-1.0f64..1.0),
        v in prop::array::uniform3(-1.0f64..1.0),
        a in -3.0f64..3.0,
        t in 1e-3f64..2.0,
    ) {
        let p = Propagator::new(&system3(betas, [1.0, 2.0, 1.0], low), &[1.2]).unwrap();
        let c = |w: [f64; 3]| w.iter().map(|&x| Complex64::new(x, -x)).collect::<Vec<_>>();
        let mix: Vec<Complex64> = c(u).iter().zip(c(v)).map(|(x, y)| x * a + y).collect();
        let lhs = p.apply_s(t, &mix).unwrap();
        let (su, sv) = (p.apply_s(t, &c(u)).unwrap(), p.apply_s(t, &c(v)).unwrap());
        for k in 0..3 {
            prop_assert!((lhs[k] - (su[k] * a + sv[k])).norm() < 1e-13);
        }
    }

    #[test]
    fn grid_round_trip_recovers_band_limited_modes(
        coeffs in prop::collection::vec((-3i64..3, -3i64..3, -1.0f64..1.0, -1.0f64..1.0), 1..12),
        period in 0.5f64..10.0,
    ) {
        let mut f = SpectralField::new(2, period).unwrap();
        for (k1, k2, re, im) in coeffs {
            f.add_mode(vec![k1, k2], Complex64::new(re, im)).unwrap();
        }
        let grid = f.modes_to_grid(8).unwrap();
        let g = SpectralField::grid_to_modes(2, period, 8, &grid).unwrap();
        for (k, c) in f.modes() {
            prop_assert!((g.get(k) - c).norm() < 1e-13);
        }
        for (k, c) in g.modes() {
            if f.get(k) == Complex64::new(0.0, 0.0) {
                prop_assert!(c.norm() < 1e-13);
            }
        }
    }
}
