use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::ncalg::{FormalSeries, Letter, Mode, NCPoly, Word};
use crate::scalar::Field;

const SINGULAR_DET: f64 = 1e-10;

/// Degree-one part of a tuple of series as a matrix on the letter space:
/// column `j` holds the image of letter `j`, row `i` the coefficient of letter `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPart<T: Field> {
    pub letters: Vec<Letter>,
    pub matrix: DMatrix<T>,
}

impl<T: Field> LinearPart<T> {
    pub fn from_series(f: &[FormalSeries<T>]) -> Result<Self> {
        let g = f.len();
        let mode = f.iter().fold(Mode::Free, |m, s| m.join(s.mode()));
        let letters = Letter::alphabet(g, mode);
        let l = letters.len();
        let mut matrix = DMatrix::zeros(l, l);
        for (k, s) in f.iter().enumerate() {
            let lin = if s.order() >= 1 { s.part(1).clone() } else { NCPoly::zero(mode) };
            if lin.max_var() > g {
                return Err(Error::IndexOutOfRange { index: lin.max_var(), g });
            }
            let mut images = vec![(Letter::x(k + 1), lin.clone())];
            if mode.has_involution() {
                images.push((Letter::xt(k + 1), lin.involution()));
            }
            for (target, p) in images {
                let row = target.alphabet_index(mode);
                for (w, c) in p.terms() {
                    matrix[(row, w.letters()[0].alphabet_index(mode))] = *c;
                }
            }
        }
        Ok(LinearPart { letters, matrix })
    }

    pub fn mode(&self) -> Mode {
        if self.letters.iter().any(|l| l.starred) {
            Mode::Involution
        } else {
            Mode::Free
        }
    }

    pub fn determinant_magnitude(&self) -> f64 {
        self.matrix.clone().determinant().modulus()
    }

    pub fn inverse(&self) -> Result<LinearPart<T>> {
        let det = self.determinant_magnitude();
        if !(det > SINGULAR_DET) {
            return Err(Error::Singular(det));
        }
        let inv = self.matrix.clone().try_inverse().ok_or(Error::Singular(det))?;
        let out = LinearPart { letters: self.letters.clone(), matrix: inv };
        out.check_involution()?;
        Ok(out)
    }

    /// Rows of starred letters must be the conjugated mirror of the unstarred ones.
    pub fn check_involution(&self) -> Result<()> {
        if self.mode() == Mode::Free {
            return Ok(());
        }
        let l = self.letters.len();
        let scale = self.matrix.iter().map(|c| c.modulus()).fold(1.0, f64::max);
        for k in 0..l / 2 {
            for j in 0..l {
                let mirror = j ^ 1;
                let defect = (self.matrix[(2 * k + 1, mirror)] - self.matrix[(2 * k, j)].conjugate()).modulus();
                if defect > 1e-10 * scale {
                    return Err(Error::InvalidArgument(format!(
                        "linear part is not compatible with the involution in the block of {} (defect {defect:e})",
                        self.letters[2 * k]
                    )));
                }
            }
        }
        Ok(())
    }

    /// The linear map as a tuple of series `x_k ↦ Σ_j M[k, j] ℓ_j`.
    pub fn as_series(&self, order: usize) -> Vec<FormalSeries<T>> {
        let mode = self.mode();
        let g = self.letters.iter().filter(|l| !l.starred).count();
        (1..=g)
            .map(|k| {
                let row = Letter::x(k).alphabet_index(mode);
                let mut p = NCPoly::zero(mode);
                for (j, l) in self.letters.iter().enumerate() {
                    let c = self.matrix[(row, j)];
                    if c != T::zero() {
                        p.add_term(Word::letter(*l), c);
                    }
                }
                FormalSeries::from_poly(&p, g, order)
            })
            .collect()
    }
}

/// Componentwise `F ∘ G`.
pub fn compose_tuple<T: Field>(f: &[FormalSeries<T>], g: &[FormalSeries<T>]) -> Result<Vec<FormalSeries<T>>> {
    f.iter().map(|s| s.compose(g)).collect()
}

/// Largest coefficient deviation of a tuple from the identity series.
pub fn identity_residual<T: Field>(f: &[FormalSeries<T>]) -> f64 {
    f.iter()
        .enumerate()
        .map(|(k, s)| {
            let id = FormalSeries::variable(k + 1, s.g(), s.mode(), s.order());
            s.max_coeff_diff(&id)
        })
        .fold(0.0, f64::max)
}

fn check_tuple<T: Field>(f: &[FormalSeries<T>]) -> Result<usize> {
    let g = f.len();
    if g == 0 {
        return Err(Error::InvalidArgument("empty tuple of series".into()));
    }
    for (k, s) in f.iter().enumerate() {
        if s.g() > g || s.parts().iter().any(|p| p.max_var() > g) {
            return Err(Error::SizeMismatch(format!("component {} uses more than {g} variables", k + 1)));
        }
        if !s.part(0).is_zero() {
            return Err(Error::NonzeroConstant(k + 1));
        }
    }
    Ok(g)
}

fn regrade<T: Field>(s: &FormalSeries<T>, g: usize, mode: Mode, order: usize) -> Result<FormalSeries<T>> {
    let t = s.truncate(order);
    let parts = t.parts().iter().map(|p| p.clone().with_mode(mode)).collect::<Result<Vec<_>>>()?;
    FormalSeries::from_parts(g, mode, parts)
}

/// Compositional inverse `H` of `F` with `F∘H = H∘F = id` up to degree `D`.
pub fn formal_inverse<T: Field>(f: &[FormalSeries<T>], d: usize) -> Result<Vec<FormalSeries<T>>> {
    let g = check_tuple(f)?;
    let mode = f.iter().fold(Mode::Free, |m, s| m.join(s.mode()));
    let f: Vec<FormalSeries<T>> = f.iter().map(|s| regrade(s, g, mode, d)).collect::<Result<_>>()?;
    let lin = LinearPart::from_series(&f)?;
    let lin_inv = lin.inverse()?.as_series(d);
    let lin_inv: Vec<FormalSeries<T>> = lin_inv.iter().map(|s| regrade(s, g, mode, d)).collect::<Result<_>>()?;

    // Normalized map F̄ = L⁻¹∘F = id + N with N of order ≥ 2.
    let normalized = compose_tuple(&lin_inv, &f)?;
    let ident = FormalSeries::identity_tuple(g, mode, d);
    let nonlinear: Vec<FormalSeries<T>> = normalized.iter().zip(&ident).map(|(a, b)| a.sub(b)).collect();

    let mut h = ident.clone();
    for _ in 1..d {
        let nh = compose_tuple(&nonlinear, &h)?;
        h = ident.iter().zip(&nh).map(|(y, n)| y.sub(n)).collect();
    }
    compose_tuple(&h, &lin_inv)
}

/// Solution `y = h(x)` of `f(x, y) = 0` as series in `x`, for `f` in the
/// variables `x_1..x_{gx}, x_{gx+1}..x_{gx+gy}` with `gy = f.len()`.
pub fn implicit_formal<T: Field>(f: &[FormalSeries<T>], gx: usize, d: usize) -> Result<Vec<FormalSeries<T>>> {
    let gy = f.len();
    let total = gx + gy;
    let mode = f.iter().fold(Mode::Free, |m, s| m.join(s.mode()));
    let mut aug: Vec<FormalSeries<T>> = (1..=gx).map(|k| FormalSeries::variable(k, total, mode, d)).collect();
    for (k, s) in f.iter().enumerate() {
        if s.parts().iter().any(|p| p.max_var() > total) {
            return Err(Error::SizeMismatch(format!("equation {} uses more than {total} variables", k + 1)));
        }
        aug.push(regrade(s, total, mode, d)?);
    }
    let inv = formal_inverse(&aug, d)?;
    let mut subs: Vec<FormalSeries<T>> = (1..=gx).map(|k| FormalSeries::variable(k, gx, mode, d)).collect();
    subs.extend((0..gy).map(|_| FormalSeries::zero(gx, mode, d)));
    inv[gx..].iter().map(|s| s.compose(&subs)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(terms: &[(&str, f64)], mode: Mode) -> NCPoly<f64> {
        NCPoly::from_terms(mode, terms.iter().map(|(w, c)| (w.parse::<Word>().unwrap(), *c)))
    }

    #[test]
    fn catalan_reversion() {
        let f = FormalSeries::from_poly(&poly(&[("x1", 1.0), ("x1 x1", -1.0)], Mode::Free), 1, 5);
        let h = formal_inverse(&[f.clone()], 5).unwrap();
        for (m, c) in [(1, 1.0), (2, 1.0), (3, 2.0), (4, 5.0), (5, 14.0)] {
            assert!((h[0].part(m).coeff(&Word::vars(&vec![1; m])) - c).abs() < 1e-12);
        }
        assert!(identity_residual(&compose_tuple(&[f.clone()], &h).unwrap()) < 1e-10);
        assert!(identity_residual(&compose_tuple(&h, &[f]).unwrap()) < 1e-10);
    }

    #[test]
    fn identity_is_its_own_inverse() {
        let f = FormalSeries::<f64>::variable(1, 1, Mode::Free, 4);
        let h = formal_inverse(&[f.clone()], 4).unwrap();
        assert_eq!(h[0], f);
    }

    #[test]
    fn transpose_map_inverse() {
        let f = FormalSeries::from_poly(&poly(&[("x1", 1.0), ("x1 x1*", 1.0)], Mode::Involution), 1, 3);
        let h = formal_inverse(&[f.clone()], 3).unwrap();
        assert!(identity_residual(&compose_tuple(&[f.clone()], &h).unwrap()) < 1e-10);
        assert!(identity_residual(&compose_tuple(&h, &[f]).unwrap()) < 1e-10);
        assert_eq!(h[0].part(2).coeff(&"x1 x1*".parse().unwrap()), -1.0);
    }

    #[test]
    fn mixed_linear_part() {
        let f1 = FormalSeries::from_poly(&poly(&[("x1", 2.0), ("x2", 1.0), ("x1 x2", 1.0)], Mode::Free), 2, 4);
        let f2 = FormalSeries::from_poly(&poly(&[("x1", 1.0), ("x2", 1.0), ("x2 x2 x1", -3.0)], Mode::Free), 2, 4);
        let f = vec![f1, f2];
        let h = formal_inverse(&f, 4).unwrap();
        assert!(h.iter().all(|s| s.mode() == Mode::Free));
        assert!(identity_residual(&compose_tuple(&f, &h).unwrap()) < 1e-10);
        assert!(identity_residual(&compose_tuple(&h, &f).unwrap()) < 1e-10);
    }

    #[test]
    fn singular_and_constant_inputs() {
        let f = FormalSeries::from_poly(&poly(&[("x1 x1", 1.0)], Mode::Free), 1, 3);
        assert!(matches!(formal_inverse(&[f], 3), Err(Error::Singular(_))));
        let c = FormalSeries::from_poly(&poly(&[("1", 1.0), ("x1", 1.0)], Mode::Free), 1, 3);
        assert_eq!(formal_inverse(&[c], 3), Err(Error::NonzeroConstant(1)));
    }

    #[test]
    fn implicit_examples() {
        // y − x² = 0
        let f = FormalSeries::from_poly(&poly(&[("x2", 1.0), ("x1 x1", -1.0)], Mode::Free), 2, 4);
        let h = implicit_formal(&[f], 1, 4).unwrap();
        assert!(h[0].to_poly().max_coeff_diff(&poly(&[("x1 x1", 1.0)], Mode::Free)) < 1e-12);

        // y + yx + x = 0
        let f = FormalSeries::from_poly(&poly(&[("x2", 1.0), ("x2 x1", 1.0), ("x1", 1.0)], Mode::Free), 2, 3);
        let h = implicit_formal(&[f.clone()], 1, 3).unwrap();
        let mut subs = vec![FormalSeries::variable(1, 1, Mode::Free, 3)];
        subs.push(h[0].clone());
        let residual = f.compose(&subs).unwrap();
        assert!(residual.parts().iter().all(|p| p.terms().all(|(_, c)| c.abs() < 1e-12)));
        assert_eq!(h[0].part(1).coeff(&Word::vars(&[1])), -1.0);
        assert_eq!(h[0].part(2).coeff(&Word::vars(&[1, 1])), 1.0);
    }
}
