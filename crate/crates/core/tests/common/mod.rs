#![allow(dead_code)]

use nalgebra::DMatrix;
use ncfree::mateval::MatTuple;
use ncfree::ncalg::{Letter, Mode, NCPoly, Word};
use ncfree::scalar::Field;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_word<G: Rng>(rng: &mut G, g: usize, mode: Mode, len: usize) -> Word {
    let alphabet = Letter::alphabet(g, mode);
    Word((0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect())
}

/// Random polynomial with up to `terms` monomials of degree `<= deg` and
/// coefficients in `[-2, 2]` rounded to quarters.
pub fn random_poly<G: Rng>(rng: &mut G, g: usize, deg: usize, mode: Mode, terms: usize) -> NCPoly<f64> {
    let mut p = NCPoly::zero(mode);
    for _ in 0..terms {
        let len = rng.random_range(0..=deg);
        let w = random_word(rng, g, mode, len);
        let c = (rng.random_range(-8i32..=8) as f64) / 4.0;
        if c != 0.0 {
            p.add_term(w, c);
        }
    }
    if p.is_zero() {
        p.add_term(random_word(rng, g, mode, deg), 1.0);
    }
    p
}

/// Same as [`random_poly`] but with every monomial of degree exactly `deg`
/// present at least once when `deg > 0`.
pub fn random_poly_with_degree<G: Rng>(rng: &mut G, g: usize, deg: usize, mode: Mode, terms: usize) -> NCPoly<f64> {
    let mut p = random_poly(rng, g, deg, mode, terms);
    p.add_term(random_word(rng, g, mode, deg), 1.5);
    p
}

pub fn random_tuple<T: Field, G: Rng>(rng: &mut G, g: usize, n: usize) -> MatTuple<T> {
    MatTuple::random_normal(g, n, rng)
}

pub fn max_abs<T: Field>(m: &DMatrix<T>) -> f64 {
    m.iter().map(|v| v.magnitude()).fold(0.0, f64::max)
}

pub fn rel_diff<T: Field>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    max_abs(&(a - b)) / (1.0 + max_abs(a).max(max_abs(b)))
}
