use adez::context::LatticeContext;
use adez::lattice::{parse_rational, LatticeSpec, Rational};
use adez::linalg::{sup_diff, CMatrix};
use adez::numerics::upper_incomplete_gamma;
use adez::theta::{tail_bound, verify_t_transform};
use adez::weil::weil_for;
use adez::zeta::{continuation_tail, xi_continued};
use num_complex::Complex64;
use proptest::prelude::*;

const SMALL: [&str; 6] = ["A1", "A2", "A3", "D4", "D5", "E6"];

fn ctx(i: usize) -> LatticeContext {
    LatticeContext::new(SMALL[i].parse().unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spec_round_trips(idx in 0usize..16) {
        let sp = LatticeSpec::default_set()[idx];
        let back: LatticeSpec = sp.to_string().parse().unwrap();
        prop_assert_eq!(sp, back);
        let json = serde_json::to_string(&sp).unwrap();
        prop_assert_eq!(json, format!("\"{sp}\""));
    }

    #[test]
    fn rationals_round_trip(p in -10_000i64..10_000, q in 1i64..5_000) {
        let r = Rational::new(p, q);
        prop_assert_eq!(parse_rational(&r.to_string()), Some(r));
    }

    #[test]
    fn weil_s_is_symmetric_unitary(idx in 0usize..16) {
        let rep = weil_for(LatticeSpec::default_set()[idx]);
        let n = rep.l;
        let s = &rep.rho_s;
        let st = CMatrix::from_fn(n, |i, j| s[(j, i)]);
        prop_assert!(s.max_abs_diff(&st) < 1e-14);
        prop_assert!((s * &s.adjoint()).max_abs_diff(&CMatrix::identity(n)) < 1e-13);
    }

    #[test]
    fn theta_t_transform(i in 0usize..6, x in -1.0f64..1.0, y in 0.8f64..2.0) {
        let c = ctx(i);
        let r = verify_t_transform(&c, Complex64::new(x, y), 1e-13).unwrap();
        prop_assert!(r.residual < 1e-11 + r.tail_bound);
    }

    #[test]
    fn xi_is_real_on_conjugates(i in 0usize..6, re in -2.0f64..6.0, im in 0.05f64..8.0) {
        let c = ctx(i);
        let s = Complex64::new(re, im);
        let a = xi_continued(&c, s, None, 1e-12).unwrap();
        let b = xi_continued(&c, s.conj(), None, 1e-12).unwrap();
        let conj: Vec<Complex64> = b.xi.iter().map(|z| z.conj()).collect();
        prop_assert!(sup_diff(&a.xi, &conj) < 1e-11 * (1.0 + a.xi.iter().map(|z| z.norm()).fold(0.0, f64::max)));
    }

    #[test]
    fn xi_independent_of_bound(i in 0usize..6, re in -1.0f64..4.0, im in 0.1f64..4.0) {
        let c = ctx(i);
        let s = Complex64::new(re, im);
        let b = Rational::from_integer(8);
        let small = xi_continued(&c, s, Some(b), 1e-12).unwrap();
        let large = xi_continued(&c, s, Some(b * 2), 1e-12).unwrap();
        let tail = continuation_tail(&c, 8.0, re);
        let scale = 1.0 + large.xi.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(sup_diff(&small.xi, &large.xi) <= tail + 1e-13 * scale);
    }

    #[test]
    fn incomplete_gamma_recurrence(re in -4.0f64..6.0, im in -5.0f64..5.0, x in 0.2f64..30.0) {
        let s = Complex64::new(re, im);
        let a = upper_incomplete_gamma(s + 1.0, x).unwrap();
        let b = upper_incomplete_gamma(s, x).unwrap();
        let rhs = s * b.value + (s * x.ln() - x).exp();
        let scale = a.value.norm() + (s * b.value).norm() + (s * x.ln() - x).exp().norm();
        prop_assert!((a.value - rhs).norm() <= 1e-12 * scale + 4.0 * (a.abs_error + s.norm() * b.abs_error));
    }

    #[test]
    fn theta_tail_bound_decreases(i in 0usize..6, y in 0.3f64..3.0, b in 2.0f64..40.0) {
        let c = ctx(i);
        prop_assert!(tail_bound(&c, b + 1.0, y) <= tail_bound(&c, b, y));
    }
}
