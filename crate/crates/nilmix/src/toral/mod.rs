//! Trigonometric polynomials on `T^d` and the exact Fourier mixing oracle.
//!
//! A test function is a finite Fourier sum with complex-rational
//! coefficients plus a certified bound on the l1 mass of omitted terms, the
//! artifact's stand-in for a Hoelder function: every correlation becomes an
//! exact rational number plus a rigorous tail radius. `tail_bound = 0` means
//! the object *is* the finite sum.

pub mod correlation;
pub mod fit;
pub mod separation;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::IntMatrix;

pub use correlation::{multi_correlation, CorrelationBudget, CorrelationResult};
pub use fit::{decay_fit, DecayFit, DecayModel, DecaySample};
pub use separation::{separation_stats, SeparationStats};

/// A complex number with exact rational real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRational {
    pub fn zero() -> Self {
        Self { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Self { re: BigRational::one(), im: BigRational::zero() }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn from_int(re: i64) -> Self {
        Self::real(BigRational::from(BigInt::from(re)))
    }

    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    pub fn neg(&self) -> Self {
        Self { re: -&self.re, im: -&self.im }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self { re: &self.re * q, im: &self.im * q }
    }

    /// Exact `|.|^2`.
    pub fn abs_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Rational upper bound for the modulus (ceiling square root of the
    /// exact squared modulus).
    pub fn abs_upper(&self) -> BigRational {
        rational_sqrt_upper(&self.abs_sq())
    }

    pub fn modulus_f64(&self) -> f64 {
        rational_to_f64(&self.re).hypot(rational_to_f64(&self.im))
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Rational upper bound for `sqrt(q)`, `q >= 0`.
pub fn rational_sqrt_upper(q: &BigRational) -> BigRational {
    assert!(!q.is_negative());
    if q.is_zero() {
        return BigRational::zero();
    }
    // sqrt(n/d) <= ceil_sqrt(n) / floor_sqrt(d)
    let n = q.numer();
    let d = q.denom();
    let sn = n.sqrt();
    let sn = if &(&sn * &sn) < n { sn + BigInt::one() } else { sn };
    let sd = d.sqrt(); // floor sqrt, >= 1
    BigRational::new(sn, sd)
}

/// Finite Fourier sum with certified tail.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    dim: usize,
    coeffs: BTreeMap<Vec<i64>, CRational>,
    tail_bound: BigRational,
    holder_norm_hint: Option<f64>,
}

impl TrigPolynomial {
    pub fn new(dim: usize, coeffs: BTreeMap<Vec<i64>, CRational>) -> Result<Self> {
        Self::with_tail(dim, coeffs, BigRational::zero())
    }

    pub fn with_tail(
        dim: usize,
        coeffs: BTreeMap<Vec<i64>, CRational>,
        tail_bound: BigRational,
    ) -> Result<Self> {
        if tail_bound.is_negative() {
            return Err(Error::validation("tail bound must be nonnegative"));
        }
        let mut clean = BTreeMap::new();
        for (k, v) in coeffs {
            if k.len() != dim {
                return Err(Error::validation("frequency vector dimension mismatch"));
            }
            if !v.is_zero() {
                clean.insert(k, v);
            }
        }
        Ok(Self { dim, coeffs: clean, tail_bound, holder_norm_hint: None })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            coeffs: BTreeMap::new(),
            tail_bound: BigRational::zero(),
            holder_norm_hint: None,
        }
    }

    pub fn constant(dim: usize, c: CRational) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(vec![0; dim], c);
        }
        Self { dim, coeffs: m, tail_bound: BigRational::zero(), holder_norm_hint: None }
    }

    /// The character `e(<freq, x>)`.
    pub fn character(freq: Vec<i64>) -> Self {
        let dim = freq.len();
        let mut m = BTreeMap::new();
        m.insert(freq, CRational::one());
        Self { dim, coeffs: m, tail_bound: BigRational::zero(), holder_norm_hint: None }
    }

    /// `2 cos(2 pi <freq, x>)`: the real character pair.
    pub fn cosine(freq: Vec<i64>) -> Self {
        let dim = freq.len();
        let neg: Vec<i64> = freq.iter().map(|&v| -v).collect();
        let mut m = BTreeMap::new();
        m.insert(freq, CRational::one());
        m.insert(neg, CRational::one());
        Self { dim, coeffs: m, tail_bound: BigRational::zero(), holder_norm_hint: None }
    }

    pub fn with_hint(mut self, hint: f64) -> Self {
        self.holder_norm_hint = Some(hint);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<i64>, CRational> {
        &self.coeffs
    }

    pub fn coeff(&self, freq: &[i64]) -> CRational {
        self.coeffs.get(freq).cloned().unwrap_or_else(CRational::zero)
    }

    pub fn tail_bound(&self) -> &BigRational {
        &self.tail_bound
    }

    pub fn holder_norm_hint(&self) -> Option<f64> {
        self.holder_norm_hint
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.len()
    }

    /// Exact integral over the torus: the zero-frequency coefficient.
    pub fn mean(&self) -> CRational {
        self.coeff(&vec![0; self.dim])
    }

    /// Exact when `tail = 0`: coefficientwise conjugate symmetry.
    pub fn is_real_valued(&self) -> bool {
        self.coeffs.iter().all(|(k, v)| {
            let neg: Vec<i64> = k.iter().map(|&x| -x).collect();
            self.coeff(&neg) == v.conj()
        })
    }

    /// Rational upper bound of the l1 coefficient mass (tail not included).
    pub fn l1_upper(&self) -> BigRational {
        self.coeffs.values().map(|c| c.abs_upper()).fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_dim(o)?;
        let mut m = self.coeffs.clone();
        for (k, v) in &o.coeffs {
            let cur = m.remove(k).unwrap_or_else(CRational::zero);
            let s = cur.add(v);
            if !s.is_zero() {
                m.insert(k.clone(), s);
            }
        }
        Ok(Self {
            dim: self.dim,
            coeffs: m,
            tail_bound: &self.tail_bound + &o.tail_bound,
            holder_norm_hint: None,
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), v.neg())).collect(),
            tail_bound: self.tail_bound.clone(),
            holder_norm_hint: self.holder_norm_hint,
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self {
            dim: self.dim,
            coeffs: if q.is_zero() {
                BTreeMap::new()
            } else {
                self.coeffs.iter().map(|(k, v)| (k.clone(), v.scale(q))).collect()
            },
            tail_bound: &self.tail_bound * q.abs(),
            holder_norm_hint: None,
        }
    }

    /// Pointwise product (coefficient convolution). Exact only when both
    /// tails vanish; the product tail is the rigorous cross bound.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_dim(o)?;
        let mut m: BTreeMap<Vec<i64>, CRational> = BTreeMap::new();
        for (a, ca) in &self.coeffs {
            for (b, cb) in &o.coeffs {
                let k: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                let cur = m.remove(&k).unwrap_or_else(CRational::zero);
                let s = cur.add(&ca.mul(cb));
                if !s.is_zero() {
                    m.insert(k, s);
                }
            }
        }
        let tail = &self.tail_bound * (o.l1_upper() + &o.tail_bound)
            + (self.l1_upper() + &self.tail_bound) * &o.tail_bound;
        Ok(Self { dim: self.dim, coeffs: m, tail_bound: tail, holder_norm_hint: None })
    }

    /// Strips the mean: the zero-coefficient is removed exactly.
    pub fn zero_mean(&self) -> (Self, CRational) {
        let mean = self.mean();
        let mut m = self.coeffs.clone();
        m.remove(&vec![0; self.dim]);
        (
            Self {
                dim: self.dim,
                coeffs: m,
                tail_bound: self.tail_bound.clone(),
                holder_norm_hint: self.holder_norm_hint,
            },
            mean,
        )
    }

    /// Pullback under the automorphism: `(f o m)` has the coefficient of `f`
    /// at `a` moved to `m^T a`. Exact; the tail bound is preserved.
    pub fn pullback(&self, m: &IntMatrix) -> Result<Self> {
        if m.dim() != self.dim {
            return Err(Error::validation("pullback dimension mismatch"));
        }
        let mt = m.transpose();
        let mut out: BTreeMap<Vec<i64>, CRational> = BTreeMap::new();
        for (a, c) in &self.coeffs {
            let moved = apply_i64(&mt, a)?;
            // injective for invertible matrices, so no accumulation occurs
            out.insert(moved, c.clone());
        }
        Ok(Self {
            dim: self.dim,
            coeffs: out,
            tail_bound: self.tail_bound.clone(),
            holder_norm_hint: self.holder_norm_hint,
        })
    }

    fn check_dim(&self, o: &Self) -> Result<()> {
        if self.dim != o.dim {
            return Err(Error::validation("trig polynomial dimension mismatch"));
        }
        Ok(())
    }
}

/// Exact `m v` with overflow detection for frequency vectors.
pub fn apply_i64(m: &IntMatrix, v: &[i64]) -> Result<Vec<i64>> {
    apply_to_i128(m, v)?
        .into_iter()
        .map(|x| i64::try_from(x).map_err(|_| Error::budget("frequency overflow")))
        .collect()
}

/// Exact `m v` into wide integers (room for large automorphism powers).
pub fn apply_to_i128(m: &IntMatrix, v: &[i64]) -> Result<Vec<i128>> {
    let d = m.dim();
    let mut out = Vec::with_capacity(d);
    for r in 0..d {
        let mut acc: i128 = 0;
        for c in 0..d {
            let e: i128 = i128::try_from(m.at(r, c))
                .map_err(|_| Error::budget("matrix entry exceeds the frequency fast path"))?;
            acc = acc
                .checked_add(
                    e.checked_mul(v[c] as i128)
                        .ok_or_else(|| Error::budget("frequency overflow"))?,
                )
                .ok_or_else(|| Error::budget("frequency overflow"))?;
        }
        out.push(acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pullback_moves_frequencies() {
        let cat = IntMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let f = TrigPolynomial::character(vec![1, 0]);
        let g = f.pullback(&cat).unwrap();
        // A^T (1,0) = (2,1)
        assert!(g.coeffs().contains_key(&vec![2i64, 1]));
        assert_eq!(g.support_size(), 1);
        // identity leaves the function unchanged
        let id = IntMatrix::identity(2);
        assert_eq!(f.pullback(&id).unwrap(), f);
        // pullback twice by A equals pullback by A^2
        let twice = f.pullback(&cat).unwrap().pullback(&cat).unwrap();
        let sq = f.pullback(&cat.mul(&cat)).unwrap();
        assert_eq!(twice, sq);
    }

    #[test]
    fn real_valuedness_and_mean() {
        let f = TrigPolynomial::cosine(vec![1, 0]);
        assert!(f.is_real_valued());
        assert!(f.mean().is_zero());
        let g = TrigPolynomial::character(vec![1, 0]);
        assert!(!g.is_real_valued());
        let c = TrigPolynomial::constant(2, CRational::from_int(5));
        assert_eq!(c.mean(), CRational::from_int(5));
    }

    #[test]
    fn product_is_convolution() {
        // (e + e^-1)^2 = e^2 + 2 + e^-2
        let f = TrigPolynomial::cosine(vec![1]);
        let sq = f.mul(&f).unwrap();
        assert_eq!(sq.coeff(&[0]), CRational::from_int(2));
        assert_eq!(sq.coeff(&[2]), CRational::one());
        assert_eq!(sq.coeff(&[-2]), CRational::one());
        assert_eq!(sq.support_size(), 3);
    }

    #[test]
    fn tail_bookkeeping() {
        let mut m = BTreeMap::new();
        m.insert(vec![1i64], CRational::one());
        let f = TrigPolynomial::with_tail(1, m, BigRational::new(1.into(), 100.into())).unwrap();
        let g = f.add(&f).unwrap();
        assert_eq!(*g.tail_bound(), BigRational::new(2.into(), 100.into()));
        let p = f.mul(&f).unwrap();
        // cross terms: tail*(l1+tail) + (l1+tail)*tail with l1 = 1
        assert!(p.tail_bound() > &BigRational::new(2.into(), 100.into()));
    }

    #[test]
    fn sqrt_upper_is_rigorous() {
        let q = BigRational::new(2.into(), 1.into());
        let u = rational_sqrt_upper(&q);
        assert!(&u * &u >= q);
        let q2 = BigRational::new(1.into(), 4.into());
        let u2 = rational_sqrt_upper(&q2);
        assert!(&u2 * &u2 >= q2);
        assert!(u2 <= BigRational::new(3.into(), 4.into()));
    }
}
