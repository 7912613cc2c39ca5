//! Exact integer and rational matrices.
//!
//! Characteristic polynomials and determinants use fraction-free Bareiss
//! elimination, so no rational arithmetic (let alone floating point) enters
//! the computation. Kernels and solves over a field go through a small
//! field-context trait implemented for the rationals and for number fields.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::IntPolynomial;
use crate::error::{Error, Result};

/// Square matrix with arbitrary-precision integer entries, row major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(dim: usize, entries: Vec<BigInt>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::validation(format!(
                "matrix needs {}x{} entries, got {}",
                dim,
                dim,
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim));
        let entries = rows.iter().flat_map(|r| r.iter().map(|&v| BigInt::from(v))).collect();
        Self { dim, entries }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self { dim, entries: vec![BigInt::zero(); dim * dim] };
        for i in 0..dim {
            m.entries[i * dim + i] = BigInt::one();
        }
        m
    }

    /// Companion matrix of a monic polynomial.
    pub fn companion(p: &IntPolynomial) -> Result<Self> {
        if !p.is_monic() || p.degree() == 0 {
            return Err(Error::validation("companion matrix needs a monic nonconstant polynomial"));
        }
        let d = p.degree();
        let mut m = Self { dim: d, entries: vec![BigInt::zero(); d * d] };
        for i in 1..d {
            m.entries[i * d + (i - 1)] = BigInt::one();
        }
        for i in 0..d {
            m.entries[i * d + (d - 1)] = -p.coeff(i);
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.dim + c]
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut v = vec![BigInt::zero(); d * d];
        for r in 0..d {
            for c in 0..d {
                v[c * d + r] = self.at(r, c).clone();
            }
        }
        Self { dim: d, entries: v }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim);
        let d = self.dim;
        let mut v = vec![BigInt::zero(); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..d {
                    v[r * d + c] += a * o.at(k, c);
                }
            }
        }
        Self { dim: d, entries: v }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim);
        Self {
            dim: self.dim,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim);
        Self {
            dim: self.dim,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|a| a * c).collect() }
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.at(r, c) * &v[c]).sum())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    pub fn commutes_with(&self, o: &Self) -> bool {
        self.mul(o) == o.mul(self)
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> BigInt {
        let d = self.dim;
        let mut m = self.entries.clone();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..d - 1 {
            if m[k * d + k].is_zero() {
                let Some(r) = (k + 1..d).find(|&r| !m[r * d + k].is_zero()) else {
                    return BigInt::zero();
                };
                for c in 0..d {
                    m.swap(k * d + c, r * d + c);
                }
                sign = -sign;
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    let num = &m[k * d + k] * &m[i * d + j] - &m[i * d + k] * &m[k * d + j];
                    let (q, r) = num_integer::Integer::div_rem(&num, &prev);
                    debug_assert!(r.is_zero(), "Bareiss division is exact");
                    let _ = r;
                    m[i * d + j] = q;
                }
                m[i * d + k] = BigInt::zero();
            }
            prev = m[k * d + k].clone();
        }
        let det = m[(d - 1) * d + (d - 1)].clone();
        if sign < 0 { -det } else { det }
    }

    /// Characteristic polynomial `det(xI - A)` by Bareiss elimination over
    /// `Z[x]`; always monic of degree `dim`.
    pub fn char_poly(&self) -> IntPolynomial {
        let d = self.dim;
        // entries of xI - A as integer polynomials
        let mut m: Vec<IntPolynomial> = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                let mut p = IntPolynomial::constant(-self.at(r, c).clone());
                if r == c {
                    p = p.add(&IntPolynomial::x());
                }
                m.push(p);
            }
        }
        let mut sign = 1i32;
        let mut prev = IntPolynomial::one();
        for k in 0..d.saturating_sub(1) {
            if m[k * d + k].is_zero() {
                let r = (k + 1..d)
                    .find(|&r| !m[r * d + k].is_zero())
                    .expect("xI - A is nonsingular over Q(x)");
                for c in 0..d {
                    m.swap(k * d + c, r * d + c);
                }
                sign = -sign;
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    let num = m[k * d + k].mul(&m[i * d + j]).sub(&m[i * d + k].mul(&m[k * d + j]));
                    m[i * d + j] = num.exact_div(&prev).expect("Bareiss division is exact");
                }
                m[i * d + k] = IntPolynomial::zero();
            }
            prev = m[k * d + k].clone();
        }
        let det = m[(d - 1) * d + (d - 1)].clone();
        if sign < 0 { det.neg() } else { det }
    }

    /// Exact inverse when it has integer entries (i.e. `det = +-1`).
    pub fn inverse(&self) -> Result<Self> {
        let d = self.dim;
        let rat = QMat::from_int(self);
        let inv = rat.inverse().ok_or_else(|| Error::degenerate("singular matrix"))?;
        let mut entries = Vec::with_capacity(d * d);
        for v in inv.data {
            if !v.is_integer() {
                return Err(Error::validation("inverse is not integral (matrix not unimodular)"));
            }
            entries.push(v.to_integer());
        }
        let out = Self { dim: d, entries };
        debug_assert!(self.mul(&out).is_identity());
        Ok(out)
    }

    /// Integer power, with exact inverse for negative exponents.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Self::identity(self.dim);
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Entries as i128 when they all fit (fast path for frequency maps).
    pub fn to_i128(&self) -> Option<Vec<i128>> {
        self.entries.iter().map(|v| i128::try_from(v).ok()).collect()
    }
}

impl std::fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in 0..self.dim {
            write!(f, "[")?;
            for c in 0..self.dim {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(r, c))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Integer matrix with determinant `+-1`: an automorphism of the lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnimodularMatrix {
    mat: IntMatrix,
    det: i8,
}

impl UnimodularMatrix {
    pub fn new(mat: IntMatrix) -> Result<Self> {
        let det = mat.det();
        let det = if det == BigInt::one() {
            1i8
        } else if det == -BigInt::one() {
            -1i8
        } else {
            return Err(Error::validation(format!("determinant {} is not +-1", det)));
        };
        Ok(Self { mat, det })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::new(IntMatrix::from_i64(rows))
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: IntMatrix::identity(dim), det: 1 }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn det_sign(&self) -> i8 {
        self.det
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self { mat: self.mat.mul(&o.mat), det: self.det * o.det }
    }

    pub fn inverse(&self) -> Self {
        Self { mat: self.mat.inverse().expect("unimodular matrices invert exactly"), det: self.det }
    }

    pub fn pow(&self, e: i64) -> Self {
        let mat = self.mat.pow(e).expect("unimodular matrices invert exactly");
        let det = if self.det == -1 && e.rem_euclid(2) == 1 { -1 } else { 1 };
        Self { mat, det }
    }

    pub fn transpose(&self) -> Self {
        Self { mat: self.mat.transpose(), det: self.det }
    }

    pub fn char_poly(&self) -> IntPolynomial {
        self.mat.char_poly()
    }
}

impl std::ops::Deref for UnimodularMatrix {
    type Target = IntMatrix;
    fn deref(&self) -> &IntMatrix {
        &self.mat
    }
}

/// Minimal field interface for exact elimination.
pub trait FieldCtx {
    type El: Clone + std::fmt::Debug;
    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn sub(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn inv(&self, a: &Self::El) -> Option<Self::El>;
    fn is_zero(&self, a: &Self::El) -> bool;
}

/// The rationals as a field context.
pub struct RationalField;

impl FieldCtx for RationalField {
    type El = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() { None } else { Some(a.recip()) }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

/// Dense rectangular matrix over an exact field.
#[derive(Debug, Clone)]
pub struct FieldMat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Clone + std::fmt::Debug> FieldMat<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn at(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    /// Row echelon reduction in place; returns pivot columns.
    pub fn rref<F: FieldCtx<El = T>>(&mut self, f: &F) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| !f.is_zero(self.at(r, col))) else {
                continue;
            };
            if pr != row {
                for c in 0..self.cols {
                    self.data.swap(row * self.cols + c, pr * self.cols + c);
                }
            }
            let inv = f.inv(self.at(row, col)).expect("pivot is nonzero");
            for c in col..self.cols {
                let v = f.mul(self.at(row, c), &inv);
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r != row && !f.is_zero(self.at(r, col)) {
                    let factor = self.at(r, col).clone();
                    for c in col..self.cols {
                        let v = f.sub(self.at(r, c), &f.mul(&factor, self.at(row, c)));
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank<F: FieldCtx<El = T>>(mut self, f: &F) -> usize {
        self.rref(f).len()
    }

    /// Basis of the right kernel.
    pub fn kernel_basis<F: FieldCtx<El = T>>(mut self, f: &F) -> Vec<Vec<T>> {
        let pivots = self.rref(f);
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![f.zero(); self.cols];
            v[fc] = f.one();
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = f.sub(&f.zero(), self.at(ri, fc));
            }
            basis.push(v);
        }
        basis
    }

    /// Solve `A x = b`; `None` when inconsistent. Free variables are set to 0.
    pub fn solve<F: FieldCtx<El = T>>(&self, f: &F, b: &[T]) -> Option<Vec<T>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = FieldMat::new(self.rows, self.cols + 1, {
            let mut d = Vec::with_capacity(self.rows * (self.cols + 1));
            for r in 0..self.rows {
                d.extend(self.data[r * self.cols..(r + 1) * self.cols].iter().cloned());
                d.push(b[r].clone());
            }
            d
        });
        let pivots = aug.rref(f);
        if pivots.contains(&self.cols) {
            return None; // pivot in the constant column
        }
        let mut x = vec![f.zero(); self.cols];
        for (ri, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.at(ri, self.cols).clone();
        }
        Some(x)
    }
}

/// Square rational matrix helpers used by the integer layer.
pub struct QMat {
    dim: usize,
    pub data: Vec<BigRational>,
}

impl QMat {
    pub fn from_int(m: &IntMatrix) -> Self {
        Self {
            dim: m.dim(),
            data: m.entries().iter().map(|v| BigRational::from(v.clone())).collect(),
        }
    }

    pub fn inverse(&self) -> Option<QMat> {
        let d = self.dim;
        let f = RationalField;
        let mut aug = FieldMat::new(d, 2 * d, {
            let mut data = Vec::with_capacity(2 * d * d);
            for r in 0..d {
                data.extend(self.data[r * d..(r + 1) * d].iter().cloned());
                for c in 0..d {
                    data.push(if r == c { BigRational::one() } else { BigRational::zero() });
                }
            }
            data
        });
        let pivots = aug.rref(&f);
        if pivots.len() < d || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        let mut out = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                out.push(aug.at(r, d + c).clone());
            }
        }
        Some(QMat { dim: d, data: out })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> IntMatrix {
        IntMatrix::from_i64(&[&[2, 1], &[1, 1]])
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(cat().char_poly(), IntPolynomial::from_i64(&[1, -3, 1]));
        assert_eq!(IntMatrix::identity(2).char_poly(), IntPolynomial::from_i64(&[1, -2, 1]));
        let comp = IntMatrix::from_i64(&[&[0, 0, 1], &[1, 0, 3], &[0, 1, 0]]);
        assert_eq!(comp.char_poly(), IntPolynomial::from_i64(&[-1, -3, 0, 1]));
        // and companion() reproduces it from the polynomial
        let p = IntPolynomial::from_i64(&[-1, -3, 0, 1]);
        assert_eq!(IntMatrix::companion(&p).unwrap(), comp);
    }

    #[test]
    fn det_and_inverse() {
        assert_eq!(cat().det(), BigInt::one());
        let inv = cat().inverse().unwrap();
        assert!(cat().mul(&inv).is_identity());
        let sing = IntMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(sing.det(), BigInt::zero());
        assert!(sing.inverse().is_err());
    }

    #[test]
    fn unimodular_validation() {
        assert!(UnimodularMatrix::from_i64(&[&[2, 1], &[1, 1]]).is_ok());
        assert!(UnimodularMatrix::from_i64(&[&[2, 0], &[0, 1]]).is_err());
        let m = UnimodularMatrix::from_i64(&[&[2, 1], &[1, 1]]).unwrap();
        let p = m.pow(-3);
        assert!(m.pow(3).mul(&p).matrix().is_identity());
    }

    #[test]
    fn bareiss_det_with_zero_pivot() {
        let m = IntMatrix::from_i64(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]);
        assert_eq!(m.det(), BigInt::from(-1));
        assert_eq!(m.char_poly().degree(), 3);
    }

    #[test]
    fn kernel_and_solve() {
        let f = RationalField;
        let q = |v: i64| BigRational::from(BigInt::from(v));
        // x + y + z = 0 has kernel of dimension 2
        let m = FieldMat::new(1, 3, vec![q(1), q(1), q(1)]);
        let k = m.clone().kernel_basis(&f);
        assert_eq!(k.len(), 2);
        let s = m.solve(&f, &[q(6)]).unwrap();
        assert_eq!(s.iter().fold(BigRational::zero(), |a, b| a + b), q(6));
    }
}
