mod common;

use common::{random_word, rng};
use nalgebra::DMatrix;
use num_complex::Complex64;
use ncfree::format::{
    parse_genpoly, parse_mtx, parse_ncpolys, parse_tracepoly, write_genpoly, write_mtx, write_ncpolys, write_tracepoly,
};
use ncfree::mateval::MatTuple;
use ncfree::ncalg::{GenPoly, GenTerm, Mode, NCPoly, TraceMonomial, TracePoly};
use proptest::prelude::*;
use rand::Rng;

fn coeff<G: Rng>(r: &mut G) -> f64 {
    match r.random_range(0..3) {
        0 => r.random_range(-9i32..=9) as f64,
        1 => r.random_range(-1e3..1e3),
        _ => r.random::<f64>() * 10f64.powi(r.random_range(-12..12)),
    }
}

fn mode<G: Rng>(r: &mut G) -> Mode {
    if r.random_bool(0.5) {
        Mode::Involution
    } else {
        Mode::Free
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ncpoly_tuples_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let polys: Vec<NCPoly<f64>> = (0..r.random_range(1..3))
            .map(|_| {
                let mode = mode(&mut r);
                NCPoly::from_terms(mode, (0..r.random_range(0..6)).map(|_| {
                    let len = r.random_range(0..5);
                    (random_word(&mut r, 3, mode, len), coeff(&mut r))
                }).collect::<Vec<_>>())
            })
            .collect();
        let text = write_ncpolys(&polys);
        prop_assert_eq!(parse_ncpolys::<f64>(&text).unwrap(), polys.clone());
        let complex: Vec<NCPoly<Complex64>> =
            polys.iter().map(|p| p.map_coeffs(|c| Complex64::new(*c, -c / 3.0))).collect();
        prop_assert_eq!(parse_ncpolys::<Complex64>(&write_ncpolys(&complex)).unwrap(), complex);
    }

    #[test]
    fn trace_polys_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mode = mode(&mut r);
        let mut p = TracePoly::zero(mode);
        for _ in 0..r.random_range(0..5) {
            let pure = (0..r.random_range(0..3)).map(|_| {
                let len = r.random_range(1..4);
                random_word(&mut r, 2, mode, len)
            }).collect();
            let len = r.random_range(0..3);
            let tail = random_word(&mut r, 2, mode, len);
            p.add_term(TraceMonomial::new(pure, tail, mode).unwrap(), coeff(&mut r));
        }
        prop_assert_eq!(parse_tracepoly::<f64>(&write_tracepoly(&p)).unwrap(), p);
    }

    #[test]
    fn genpolys_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mode = mode(&mut r);
        let n = r.random_range(1..4);
        let mut p = GenPoly::zero(n, mode);
        for _ in 0..r.random_range(0..4) {
            let len = r.random_range(0..3);
            let w = random_word(&mut r, 2, mode, len);
            let mats = (0..=len).map(|_| DMatrix::from_fn(n, n, |_, _| coeff(&mut r))).collect();
            p.push(GenTerm::new(mats, w.0).unwrap()).unwrap();
        }
        let text = write_genpoly(&p);
        let back = parse_genpoly::<f64>(&text).unwrap();
        prop_assert_eq!(write_genpoly(&back), text);
        prop_assert_eq!(back.terms(), p.terms());
    }

    #[test]
    fn matrix_tuples_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..5);
        let g = r.random_range(1..4);
        let x = MatTuple::new((0..g).map(|_| DMatrix::from_fn(n, n, |_, _| coeff(&mut r))).collect()).unwrap();
        prop_assert_eq!(parse_mtx::<f64>(&write_mtx(&x)).unwrap(), x.clone());
        let z: MatTuple<Complex64> = MatTuple::random_normal(g, n, &mut r);
        prop_assert_eq!(parse_mtx::<Complex64>(&write_mtx(&z)).unwrap(), z);
        let widened = parse_mtx::<Complex64>(&write_mtx(&x)).unwrap();
        prop_assert_eq!(widened.get(0)[(0, 0)], Complex64::new(x.get(0)[(0, 0)], 0.0));
    }
}
