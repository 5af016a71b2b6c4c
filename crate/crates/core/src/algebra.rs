//! Exact Laurent polynomials and sparse plug-indexed matrices.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Laurent polynomial with arbitrary-precision integer coefficients.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, BigInt::one())
    }

    pub fn monomial(exp: i64, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, c.into());
        p
    }

    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    pub fn add_term(&mut self, exp: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(exp).or_default();
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exactly one nonzero coefficient.
    pub fn is_monomial(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.coeffs.get(&exp).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    pub fn n_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Value at `q = 1`.
    pub fn sum(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    pub fn abs_sum(&self) -> BigInt {
        self.coeffs.values().map(|c| c.abs()).sum()
    }

    /// `P(q⁻¹)`.
    pub fn mirror(&self) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Rewrites a polynomial in `q̃` whose exponents are all multiples of `m`
    /// as a polynomial in `q = q̃^m`. Returns the first offending exponent otherwise.
    pub fn rebase(&self, m: i64) -> std::result::Result<Self, i64> {
        let mut coeffs = BTreeMap::new();
        for (&e, c) in &self.coeffs {
            if e.rem_euclid(m) != 0 {
                return Err(e);
            }
            coeffs.insert(e / m, c.clone());
        }
        Ok(LaurentPoly { coeffs })
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, c * k)).collect(),
        }
    }

    /// Multiplies by `q̃^shift`.
    pub fn shift(&self, shift: i64) -> Self {
        LaurentPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&e, c)| (e + shift, c.clone()))
                .collect(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&e, c)| z.powi(e as i32) * c.to_f64().unwrap_or(f64::INFINITY))
            .sum()
    }

    pub fn to_json(&self, m: i64) -> LaurentJson {
        LaurentJson {
            m,
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e.to_string(), c.to_string()))
                .collect(),
        }
    }

    pub fn from_json(j: &LaurentJson) -> Result<Self> {
        let mut p = Self::zero();
        for (e, c) in &j.coeffs {
            let e: i64 = e
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad exponent {e:?}")))?;
            let c: BigInt = c
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad coefficient {c:?}")))?;
            p.add_term(e, c);
        }
        Ok(p)
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(e, c)| match e {
                0 => c.to_string(),
                _ => format!("{c}q^{e}"),
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// `{"m": m, "coeffs": {"<exponent>": "<decimal>"}}`; exponents are in `q̃`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentJson {
    pub m: i64,
    pub coeffs: BTreeMap<String, String>,
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (&e, c) in &rhs.coeffs {
            self.add_term(e, c.clone());
        }
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, -c)).collect(),
        }
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&ea, ca) in &self.coeffs {
            for (&eb, cb) in &rhs.coeffs {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

/// Exact multiplication of two Laurent polynomials.
pub fn poly_mul(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    a * b
}

/// Scalars a plug matrix can hold: a commutative semiring.
pub trait Scalar: Clone + Send + Sync {
    fn nil() -> Self;
    fn is_nil(&self) -> bool;
    fn add_assign_ref(&mut self, rhs: &Self);
    fn mul_ref(&self, rhs: &Self) -> Self;
}

impl Scalar for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

impl Scalar for LaurentPoly {
    fn nil() -> Self {
        LaurentPoly::zero()
    }
    fn is_nil(&self) -> bool {
        LaurentPoly::is_zero(self)
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

impl Scalar for Complex64 {
    fn nil() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn is_nil(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

impl Scalar for f64 {
    fn nil() -> Self {
        0.0
    }
    fn is_nil(&self) -> bool {
        *self == 0.0
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

/// Square matrix indexed by plugs, stored as compressed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct PlugMatrix<S> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<S>,
}

impl<S: Scalar> PlugMatrix<S> {
    /// Builds from `(row, col, value)` triplets; duplicates are summed, zeros dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, S)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, S)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "index out of range");
            match merged.last_mut() {
                Some((lr, lc, lv)) if (*lr, *lc) == (r, c) => lv.add_assign_ref(&v),
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|(_, _, v)| !v.is_nil());
        let mut row_ptr = vec![0usize; dim + 1];
        for &(r, _, _) in &merged {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        let (cols, vals) = merged.into_iter().map(|(_, c, v)| (c, v)).unzip();
        PlugMatrix {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn identity(dim: usize, one: S) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, one.clone())).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, &S)> {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(&self.vals[span])
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&S> {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .binary_search(&c)
            .ok()
            .map(|k| &self.vals[span.start + k])
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PlugMatrix<T> {
        PlugMatrix::from_triplets(
            self.dim,
            self.entries().map(|(r, c, v)| (r, c, f(v))).collect(),
        )
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.dim,
            self.entries().map(|(r, c, v)| (c, r, v.clone())).collect(),
        )
    }

    /// `M v`, exact for exact scalars; rows are computed in parallel.
    pub fn apply(&self, v: &[S]) -> Result<Vec<S>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok((0..self.dim)
            .into_par_iter()
            .map(|r| {
                let mut acc = S::nil();
                for (c, m) in self.row(r) {
                    if !v[c].is_nil() {
                        acc.add_assign_ref(&m.mul_ref(&v[c]));
                    }
                }
                acc
            })
            .collect())
    }

    /// `M · other` (sparse × sparse).
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut triplets = Vec::new();
        for r in 0..self.dim {
            let mut acc: BTreeMap<usize, S> = BTreeMap::new();
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    acc.entry(c)
                        .or_insert_with(S::nil)
                        .add_assign_ref(&a.mul_ref(b));
                }
            }
            triplets.extend(acc.into_iter().map(|(c, v)| (r, c, v)));
        }
        Ok(Self::from_triplets(self.dim, triplets))
    }
}

/// `M v`.
pub fn mat_apply<S: Scalar>(m: &PlugMatrix<S>, v: &[S]) -> Result<Vec<S>> {
    m.apply(v)
}

pub fn unit_vector<S: Scalar>(dim: usize, at: usize, one: S) -> Vec<S> {
    let mut v = vec![S::nil(); dim];
    v[at] = one;
    v
}

const UNIT_CIRCLE_TOL: f64 = 1e-12;

/// Substitutes `z` for `q̃` in every entry. `z` must lie on the unit circle.
pub fn evaluate(m: &PlugMatrix<LaurentPoly>, z: Complex64) -> Result<PlugMatrix<Complex64>> {
    if (z.norm() - 1.0).abs() > UNIT_CIRCLE_TOL {
        return Err(Error::NotOnUnitCircle { re: z.re, im: z.im });
    }
    Ok(m.map(|p| p.eval(z)))
}

impl PlugMatrix<Complex64> {
    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let mut out = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            out[(r, c)] = *v;
        }
        out
    }

    /// Largest entrywise modulus of `M − M*`.
    pub fn hermitian_defect(&self) -> f64 {
        self.entries()
            .map(|(r, c, v)| {
                let w = self.get(c, r).copied().unwrap_or_default();
                (v - w.conj()).norm()
            })
            .fold(0.0, f64::max)
    }
}
