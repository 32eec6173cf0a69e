mod common;

use common::{random_poly, rel_diff, rng};
use nalgebra::DMatrix;
use ncfree::format::parse_ncpoly;
use ncfree::invfun::{compose_tuple, formal_inverse, identity_residual, newton_invert, NewtonOptions};
use ncfree::mateval::{conjugate, eval_ncpoly, random_group_element, Group, MatTuple};
use ncfree::ncalg::{FormalSeries, Mode, NCPoly};
use ncfree::oracle::FreeMapOracle;
use proptest::prelude::*;
use rand::Rng;

/// `x_k` plus a triangular mix of the other variables plus random terms of degree 2..=d.
fn random_invertible<G: Rng>(r: &mut G, g: usize, d: usize, mode: Mode) -> Vec<FormalSeries<f64>> {
    (1..=g)
        .map(|k| {
            let mut p = NCPoly::var(k, mode).scale(&(1.0 + r.random_range(0..3) as f64 / 2.0));
            for j in (k + 1)..=g {
                p = p.checked_add(&NCPoly::var(j, mode).scale(&(r.random_range(-2i32..=2) as f64))).unwrap();
            }
            let noise = random_poly(r, g, d, mode, 6);
            for m in 2..=d {
                p = p.checked_add(&noise.homogeneous_part(m)).unwrap();
            }
            FormalSeries::from_poly(&p, g, d)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn formal_inverse_is_two_sided(seed in any::<u64>(), g in 1usize..=2, d in 1usize..=5, inv in any::<bool>()) {
        let mut r = rng(seed);
        let mode = if inv { Mode::Involution } else { Mode::Free };
        let f = random_invertible(&mut r, g, d, mode);
        let h = formal_inverse(&f, d).unwrap();
        prop_assert!(identity_residual(&compose_tuple(&f, &h).unwrap()) < 1e-10);
        prop_assert!(identity_residual(&compose_tuple(&h, &f).unwrap()) < 1e-10);
        if !inv {
            prop_assert!(h.iter().all(|s| s.parts().iter().all(|p| p.terms().all(|(w, _)| !w.has_starred()))));
            prop_assert_eq!(h[0].mode(), Mode::Free);
        }
    }
}

fn x_plus_xxt() -> FreeMapOracle<f64> {
    FreeMapOracle::from_ncpoly(parse_ncpoly("NCPOLY1 mode=involution\n1 : x1\n1 : x1 x1*\n").unwrap())
}

#[test]
fn newton_inverse_is_orthogonally_equivariant() {
    let f = x_plus_xxt();
    let mut r = rng(21);
    for trial in 0..5u64 {
        let y = MatTuple::<f64>::random_on_sphere(1, 3, 0.05, &mut r);
        let (u, _) = random_group_element::<f64>(Group::O, 3, trial).unwrap();
        let x = newton_invert(&f, &y, None, &NewtonOptions::default()).unwrap().into_result().unwrap().x;
        let moved = conjugate(&y, &u, Group::O, 1e-10).unwrap();
        let xm = newton_invert(&f, &moved, None, &NewtonOptions::default()).unwrap().into_result().unwrap().x;
        let expected = &u * x.get(0) * u.transpose();
        assert!(rel_diff(xm.get(0), &expected) < 1e-7);
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

#[test]
fn newton_and_formal_inverses_agree_to_order() {
    let f = x_plus_xxt();
    let series = vec![FormalSeries::from_poly(f.polys().unwrap().first().unwrap(), 1, 4)];
    let opts = NewtonOptions { tol: 1e-15, ..Default::default() };
    let mut r = rng(3);
    let dir: DMatrix<f64> = MatTuple::<f64>::random_on_sphere(1, 3, 1.0, &mut r).into_mats().remove(0);
    for d in [2usize, 3] {
        let h = formal_inverse(&series, d).unwrap()[0].to_poly();
        let norms = [1e-1, 10f64.powf(-1.5), 1e-2];
        let gaps: Vec<f64> = norms
            .iter()
            .map(|&t| {
                let y = MatTuple::single(&dir * t);
                let x = newton_invert(&f, &y, None, &opts).unwrap().x;
                (x.get(0) - eval_ncpoly(&h, &y).unwrap()).norm()
            })
            .collect();
        let s = slope(&norms, &gaps);
        assert!(s >= d as f64 + 0.5, "D={d}: slope {s}, gaps {gaps:?}");
    }
}
