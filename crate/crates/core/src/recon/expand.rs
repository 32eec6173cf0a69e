use nalgebra::{DMatrix, DVector, SVD};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mateval::{
    centralizer, eval_genpoly, eval_word, frobenius, generated_algebra, kron_identity, Group, MatTuple, SubspaceBasis,
    RANK_CUTOFF,
};
use crate::ncalg::{GenPoly, GenTerm, Letter, Word};
use crate::oracle::FreeMapOracle;
use crate::scalar::Field;

use super::interp::{default_plan, node_values, Interpolation};
use super::taylor::{mode_for, DegreeReport};

pub const MAX_EXPANSION_DEGREE: usize = 3;
pub const MAX_EXPANSION_SIZE: usize = 3;
pub const MAX_COEFFICIENT_DIM: usize = 4;

#[derive(Debug, Clone)]
pub struct ExpandOptions {
    pub tol: f64,
    pub seed: u64,
    pub h: Option<f64>,
    /// Equations per unknown in the least-squares systems.
    pub oversample: usize,
}

impl Default for ExpandOptions {
    fn default() -> Self {
        ExpandOptions { tol: 1e-8, seed: 0, h: None, oversample: 2 }
    }
}

/// Homogeneous parts of `H ↦ f(A ⊗ I_s + H)` as generalized polynomials
/// with coefficients in a fixed subalgebra of `M_n`.
#[derive(Debug, Clone)]
pub struct GenExpansion<T: Field> {
    pub center: MatTuple<T>,
    pub group: Group,
    pub basis: SubspaceBasis<T>,
    pub s_eval: usize,
    /// `parts[k][m]`: degree-`m` part of output `k`.
    pub parts: Vec<Vec<GenPoly<T>>>,
    /// Least-squares residual per degree, at level `n·s_eval`.
    pub report: Vec<DegreeReport>,
    /// Numerical null-space dimension of each degree's system.
    pub null_dims: Vec<usize>,
}

impl<T: Field> GenExpansion<T> {
    pub fn flagged(&self) -> impl Iterator<Item = &DegreeReport> {
        self.report.iter().filter(|r| r.flagged)
    }

    /// `Σ_m f_m(X − A ⊗ I_s)` at a point of level `n·s`.
    pub fn eval(&self, x: &MatTuple<T>) -> Result<MatTuple<T>> {
        let n = self.center.n();
        if x.n() % n != 0 {
            return Err(Error::SizeMismatch(format!("level {} is not a multiple of {}", x.n(), n)));
        }
        let h = x.sub(&self.center.kron_identity(x.n() / n))?;
        let mats = self
            .parts
            .iter()
            .map(|ps| {
                ps.iter().try_fold(DMatrix::zeros(x.n(), x.n()), |acc, p| Ok::<_, Error>(acc + eval_genpoly(p, &h)?))
            })
            .collect::<Result<Vec<_>>>()?;
        MatTuple::new(mats)
    }

    /// Degree-0 coefficient of output `k` (the value `f(A)`).
    pub fn constant(&self, k: usize) -> DMatrix<T> {
        let n = self.center.n();
        self.parts[k][0].terms().iter().fold(DMatrix::zeros(n, n), |acc, t| acc + &t.mats[0])
    }

    /// All coefficient matrices appearing in the parts.
    pub fn coefficient_matrices(&self) -> impl Iterator<Item = &DMatrix<T>> {
        self.parts.iter().flatten().flat_map(|p| p.terms().iter().flat_map(|t| t.mats.iter()))
    }
}

/// Coefficient algebra for the expansion at `a`: `C(C(F⟨A⟩))` for GL,
/// `F⟨A, A^*⟩` for O and U.
pub fn coefficient_algebra<T: Field>(a: &MatTuple<T>, group: Group) -> Result<SubspaceBasis<T>> {
    match group {
        Group::GL => {
            let alg = generated_algebra(a, false, None)?;
            let c = centralizer(alg.basis(), a.n(), None)?;
            centralizer(c.basis(), a.n(), None)
        }
        Group::O | Group::U => generated_algebra(a, true, None),
    }
}

struct Design<'a, T: Field> {
    lifted: Vec<DMatrix<T>>,
    letters: &'a [Letter],
    m: usize,
}

impl<T: Field> Design<'_, T> {
    /// Values of every basis monomial `b_{i_0} u_1 b_{i_1} ⋯ u_m b_{i_m}` at `h`,
    /// in the lexicographic order of `(i_0, k_1, i_1, …, k_m, i_m)`.
    fn columns(&self, h: &MatTuple<T>) -> Result<Vec<DMatrix<T>>> {
        let vals = self.letters.iter().map(|l| eval_word(&Word::letter(*l), h)).collect::<Result<Vec<_>>>()?;
        let mut layer: Vec<DMatrix<T>> = self.lifted.clone();
        for _ in 0..self.m {
            let mut next = Vec::with_capacity(layer.len() * vals.len() * self.lifted.len());
            for p in &layer {
                for v in &vals {
                    let pv = p * v;
                    for b in &self.lifted {
                        next.push(&pv * b);
                    }
                }
            }
            layer = next;
        }
        Ok(layer)
    }

    fn term(&self, basis: &[DMatrix<T>], mut idx: usize, c: T) -> Result<GenTerm<T>> {
        let (dim, nl) = (basis.len(), self.letters.len());
        let mut mats = Vec::with_capacity(self.m + 1);
        let mut letters = Vec::with_capacity(self.m);
        mats.push(basis[idx % dim].clone());
        idx /= dim;
        for _ in 0..self.m {
            letters.push(self.letters[idx % nl]);
            idx /= nl;
            mats.push(basis[idx % dim].clone());
            idx /= dim;
        }
        mats.reverse();
        letters.reverse();
        mats[0] *= c;
        GenTerm::new(mats, letters)
    }
}

/// Expansion of `f` around the non-scalar point `a` up to degree `d`,
/// identified from evaluations at level `n·s_eval`.
pub fn expand_at_point<T: Field>(
    f: &FreeMapOracle<T>,
    a: &MatTuple<T>,
    d: usize,
    s_eval: usize,
    opts: &ExpandOptions,
) -> Result<GenExpansion<T>> {
    let n = a.n();
    if a.g() != f.g() {
        return Err(Error::SizeMismatch(format!("center has {} components, map takes {}", a.g(), f.g())));
    }
    if s_eval <= d {
        return Err(Error::InvalidArgument(format!("evaluation multiplicity {s_eval} must exceed the degree {d}")));
    }
    if d > MAX_EXPANSION_DEGREE || n > MAX_EXPANSION_SIZE {
        return Err(Error::InvalidArgument(format!(
            "expansion limited to degree ≤ {MAX_EXPANSION_DEGREE} and size ≤ {MAX_EXPANSION_SIZE} (got {d}, {n})"
        )));
    }
    let group = f.group();
    let basis = coefficient_algebra(a, group)?;
    let dim = basis.dim();
    if dim > MAX_COEFFICIENT_DIM {
        return Err(Error::InvalidArgument(format!(
            "coefficient algebra has dimension {dim}, the solver handles at most {MAX_COEFFICIENT_DIM}"
        )));
    }
    let mode = mode_for(group);
    let letters = Letter::alphabet(f.g(), mode);
    let level = n * s_eval;
    let center = a.kron_identity(s_eval);
    let lifted: Vec<DMatrix<T>> = basis.basis().iter().map(|b| kron_identity(b, s_eval)).collect();

    let unknowns = |m: usize| dim.pow(m as u32 + 1) * letters.len().pow(m as u32);
    let rows_per_sample = level * level;
    let samples = (0..=d).map(|m| (opts.oversample * unknowns(m)).div_ceil(rows_per_sample)).max().unwrap_or(1).max(2);

    let shifted = |y: &MatTuple<T>| f.eval(&center.add(y)?);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let room = f.radius(level) - center.norm();
    let mut points = Vec::with_capacity(samples);
    let mut coeffs: Vec<Vec<MatTuple<T>>> = Vec::with_capacity(samples);
    for _ in 0..samples {
        let h = MatTuple::random_on_sphere(f.g(), level, 1.0, &mut rng);
        let (count, step) = default_plan(f.smoothness(), d, h.norm(), room);
        let plan = Interpolation::chebyshev(count, opts.h.unwrap_or(step))?;
        let values = node_values(&shifted, &plan, &h)?;
        coeffs.push(plan.coefficients(&values)?);
        points.push(h);
    }

    let g_out = f.g_out();
    let mut parts: Vec<Vec<GenPoly<T>>> = vec![Vec::new(); g_out];
    let mut report = Vec::new();
    let mut null_dims = Vec::new();
    for m in 0..=d {
        let design = Design { lifted: lifted.clone(), letters: &letters, m };
        let cols = unknowns(m);
        let rows = samples * rows_per_sample;
        let mut mat = DMatrix::<T>::zeros(rows, cols);
        let mut rhs = DMatrix::<T>::zeros(rows, g_out);
        for (s, h) in points.iter().enumerate() {
            for (c, v) in design.columns(h)?.iter().enumerate() {
                for (r, x) in v.iter().enumerate() {
                    mat[(s * rows_per_sample + r, c)] = *x;
                }
            }
            for k in 0..g_out {
                for (r, x) in coeffs[s][m].get(k).iter().enumerate() {
                    rhs[(s * rows_per_sample + r, k)] = *x;
                }
            }
        }
        let svd = SVD::new(mat.clone(), true, true);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let eps = RANK_CUTOFF * smax.max(f64::MIN_POSITIVE);
        let rank = svd.singular_values.iter().filter(|&&s| s > eps).count();
        null_dims.push(cols - rank);
        let sol = svd.solve(&rhs, eps).map_err(|e| Error::RankDeficient(e.to_string()))?;
        let fit = &mat * &sol;
        let mut worst: f64 = 0.0;
        for k in 0..g_out {
            let y = DVector::from_column_slice(rhs.column(k).as_slice());
            let r = frobenius(&DMatrix::from_column_slice(rows, 1, (fit.column(k) - &y).as_slice()));
            worst = worst.max(r / frobenius(&DMatrix::from_column_slice(rows, 1, y.as_slice())).max(1.0));
            let mut poly = GenPoly::zero(n, mode);
            let cmax = sol.column(k).iter().map(|c| c.modulus()).fold(0.0, f64::max);
            for (idx, c) in sol.column(k).iter().enumerate() {
                if c.modulus() > 1e-12 * cmax.max(1.0) {
                    poly.push(design.term(basis.basis(), idx, *c)?)?;
                }
            }
            parts[k].push(poly);
        }
        report.push(DegreeReport { degree: m, residual: worst, level, flagged: !(worst <= opts.tol) });
    }
    Ok(GenExpansion { center: a.clone(), group, basis, s_eval, parts, report, null_dims })
}
