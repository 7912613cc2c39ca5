//! Certified interval arithmetic over arbitrary-precision floats.
//!
//! A [`RealInterval`] is a pair of directed-rounded endpoints `[lo, hi]`
//! guaranteed to contain the exact value of the computation it tracks.
//! Every operation rounds the lower endpoint down and the upper endpoint up,
//! so enclosures never silently lose rigor. [`ComplexInterval`] is the
//! rectangle `re x im`.
//!
//! Precision is passed per operation as a bit count, the same convention as
//! the underlying `astro-float` operations.

use std::cell::RefCell;
use std::cmp::Ordering;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::error::{Error, Result};

/// Working precision in bits.
pub type Prec = usize;

const RM_DOWN: RoundingMode = RoundingMode::Down;
const RM_UP: RoundingMode = RoundingMode::Up;

thread_local! {
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("constants cache allocation"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

fn cmp_bf(a: &BigFloat, b: &BigFloat) -> Ordering {
    match a.cmp(b) {
        Some(s) if s < 0 => Ordering::Less,
        Some(s) if s > 0 => Ordering::Greater,
        Some(_) => Ordering::Equal,
        None => panic!("NaN in interval arithmetic"),
    }
}

fn bf_min(a: BigFloat, b: BigFloat) -> BigFloat {
    if cmp_bf(&a, &b) == Ordering::Greater { b } else { a }
}

fn bf_max(a: BigFloat, b: BigFloat) -> BigFloat {
    if cmp_bf(&a, &b) == Ordering::Less { b } else { a }
}

/// Exact conversion of a big integer into a float (no rounding).
pub fn bigint_to_bigfloat(v: &BigInt) -> BigFloat {
    if v.is_zero() {
        return BigFloat::from_i64(0, 64);
    }
    let words = v.magnitude().to_u64_digits();
    let sign = if v.is_negative() { Sign::Neg } else { Sign::Pos };
    BigFloat::from_words(&words, sign, (64 * words.len()) as i32)
}

use num_traits::Zero;

/// A closed interval with certified directed-rounded endpoints.
#[derive(Debug, Clone)]
pub struct RealInterval {
    lo: BigFloat,
    hi: BigFloat,
}

impl RealInterval {
    pub fn new(lo: BigFloat, hi: BigFloat) -> Self {
        debug_assert!(cmp_bf(&lo, &hi) != Ordering::Greater, "inverted interval");
        Self { lo, hi }
    }

    /// Point interval (exact value).
    pub fn point(v: BigFloat) -> Self {
        Self { lo: v.clone(), hi: v }
    }

    pub fn zero() -> Self {
        Self::point(BigFloat::from_i64(0, 64))
    }

    pub fn one() -> Self {
        Self::point(BigFloat::from_i64(1, 64))
    }

    pub fn from_i64(v: i64) -> Self {
        Self::point(BigFloat::from_i64(v, 64))
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Self::point(bigint_to_bigfloat(v))
    }

    /// Encloses a rational exactly up to one directed rounding per endpoint.
    pub fn from_rational(q: &BigRational, p: Prec) -> Self {
        let num = Self::from_bigint(q.numer());
        let den = Self::from_bigint(q.denom());
        num.div(&den, p).expect("nonzero denominator")
    }

    pub fn lo(&self) -> &BigFloat {
        &self.lo
    }

    pub fn hi(&self) -> &BigFloat {
        &self.hi
    }

    pub fn add(&self, o: &Self, p: Prec) -> Self {
        Self::new(self.lo.add(&o.lo, p, RM_DOWN), self.hi.add(&o.hi, p, RM_UP))
    }

    pub fn sub(&self, o: &Self, p: Prec) -> Self {
        Self::new(self.lo.sub(&o.hi, p, RM_DOWN), self.hi.sub(&o.lo, p, RM_UP))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.hi.neg(), self.lo.neg())
    }

    pub fn mul(&self, o: &Self, p: Prec) -> Self {
        let cands_lo = [
            self.lo.mul(&o.lo, p, RM_DOWN),
            self.lo.mul(&o.hi, p, RM_DOWN),
            self.hi.mul(&o.lo, p, RM_DOWN),
            self.hi.mul(&o.hi, p, RM_DOWN),
        ];
        let cands_hi = [
            self.lo.mul(&o.lo, p, RM_UP),
            self.lo.mul(&o.hi, p, RM_UP),
            self.hi.mul(&o.lo, p, RM_UP),
            self.hi.mul(&o.hi, p, RM_UP),
        ];
        let mut lo = cands_lo[0].clone();
        for c in &cands_lo[1..] {
            lo = bf_min(lo, c.clone());
        }
        let mut hi = cands_hi[0].clone();
        for c in &cands_hi[1..] {
            hi = bf_max(hi, c.clone());
        }
        Self::new(lo, hi)
    }

    /// Tight square: `[0, max]` when the interval straddles zero.
    pub fn sqr(&self, p: Prec) -> Self {
        if !self.contains_zero() {
            return self.mul(self, p);
        }
        let a = self.lo.mul(&self.lo, p, RM_UP);
        let b = self.hi.mul(&self.hi, p, RM_UP);
        Self::new(BigFloat::from_i64(0, 64), bf_max(a, b))
    }

    /// Fails when the divisor interval contains zero.
    pub fn div(&self, o: &Self, p: Prec) -> Result<Self> {
        if o.contains_zero() {
            return Err(Error::precision("interval division by enclosure of zero"));
        }
        let cands_lo = [
            self.lo.div(&o.lo, p, RM_DOWN),
            self.lo.div(&o.hi, p, RM_DOWN),
            self.hi.div(&o.lo, p, RM_DOWN),
            self.hi.div(&o.hi, p, RM_DOWN),
        ];
        let cands_hi = [
            self.lo.div(&o.lo, p, RM_UP),
            self.lo.div(&o.hi, p, RM_UP),
            self.hi.div(&o.lo, p, RM_UP),
            self.hi.div(&o.hi, p, RM_UP),
        ];
        let mut lo = cands_lo[0].clone();
        for c in &cands_lo[1..] {
            lo = bf_min(lo, c.clone());
        }
        let mut hi = cands_hi[0].clone();
        for c in &cands_hi[1..] {
            hi = bf_max(hi, c.clone());
        }
        Ok(Self::new(lo, hi))
    }

    pub fn abs(&self) -> Self {
        if self.lo.is_negative() && !self.hi.is_negative() {
            Self::new(BigFloat::from_i64(0, 64), bf_max(self.lo.abs(), self.hi.abs()))
        } else if self.hi.is_negative() {
            Self::new(self.hi.abs(), self.lo.abs())
        } else {
            self.clone()
        }
    }

    pub fn sqrt(&self, p: Prec) -> Result<Self> {
        if self.lo.is_negative() && !self.lo.is_zero() {
            return Err(Error::precision("sqrt of interval reaching below zero"));
        }
        Ok(Self::new(self.lo.sqrt(p, RM_DOWN), self.hi.sqrt(p, RM_UP)))
    }

    /// Natural log; requires a strictly positive enclosure.
    pub fn ln(&self, p: Prec) -> Result<Self> {
        if self.lo.is_negative() || self.lo.is_zero() {
            return Err(Error::precision("log of enclosure touching zero"));
        }
        Ok(with_consts(|cc| {
            Self::new(self.lo.ln(p, RM_DOWN, cc), self.hi.ln(p, RM_UP, cc))
        }))
    }

    pub fn exp(&self, p: Prec) -> Self {
        with_consts(|cc| Self::new(self.lo.exp(p, RM_DOWN, cc), self.hi.exp(p, RM_UP, cc)))
    }

    pub fn pow_i64(&self, mut e: i64, p: Prec) -> Result<Self> {
        let invert = e < 0;
        if invert {
            e = -e;
        }
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = e as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base, p);
            }
            base = base.sqr(p);
            k >>= 1;
        }
        if invert {
            acc = Self::one().div(&acc, p)?;
        }
        Ok(acc)
    }

    pub fn pi(p: Prec) -> Self {
        with_consts(|cc| Self::new(cc.pi(p, RM_DOWN), cc.pi(p, RM_UP)))
    }

    pub fn max(&self, o: &Self) -> Self {
        Self::new(bf_max(self.lo.clone(), o.lo.clone()), bf_max(self.hi.clone(), o.hi.clone()))
    }

    pub fn min(&self, o: &Self) -> Self {
        Self::new(bf_min(self.lo.clone(), o.lo.clone()), bf_min(self.hi.clone(), o.hi.clone()))
    }

    pub fn contains_zero(&self) -> bool {
        // note: astro-float's zero carries a positive sign bit
        !self.is_positive() && !self.is_negative()
    }

    pub fn contains(&self, v: &BigFloat) -> bool {
        cmp_bf(&self.lo, v) != Ordering::Greater && cmp_bf(v, &self.hi) != Ordering::Greater
    }

    pub fn contains_interval(&self, o: &Self) -> bool {
        cmp_bf(&self.lo, &o.lo) != Ordering::Greater && cmp_bf(&o.hi, &self.hi) != Ordering::Greater
    }

    /// Strict containment in the interior, the interval-Newton contraction test.
    pub fn contains_interior(&self, o: &Self) -> bool {
        cmp_bf(&self.lo, &o.lo) == Ordering::Less && cmp_bf(&o.hi, &self.hi) == Ordering::Less
    }

    pub fn intersects(&self, o: &Self) -> bool {
        cmp_bf(&self.lo, &o.hi) != Ordering::Greater && cmp_bf(&o.lo, &self.hi) != Ordering::Greater
    }

    pub fn intersect(&self, o: &Self) -> Option<Self> {
        if !self.intersects(o) {
            return None;
        }
        Some(Self::new(
            bf_max(self.lo.clone(), o.lo.clone()),
            bf_min(self.hi.clone(), o.hi.clone()),
        ))
    }

    /// `Some(true)` when certainly `self < o`, `Some(false)` when certainly not.
    pub fn lt(&self, o: &Self) -> Option<bool> {
        if cmp_bf(&self.hi, &o.lo) == Ordering::Less {
            Some(true)
        } else if cmp_bf(&o.hi, &self.lo) != Ordering::Greater {
            Some(false)
        } else {
            None
        }
    }

    pub fn gt(&self, o: &Self) -> Option<bool> {
        o.lt(self)
    }

    /// Certainly `> 0`.
    pub fn is_positive(&self) -> bool {
        self.lo.is_positive() && !self.lo.is_zero()
    }

    /// Certainly `< 0`.
    pub fn is_negative(&self) -> bool {
        self.hi.is_negative() && !self.hi.is_zero()
    }

    pub fn mid(&self, p: Prec) -> BigFloat {
        let two = BigFloat::from_i64(2, 64);
        self.lo.add(&self.hi, p, RoundingMode::ToEven).div(&two, p, RoundingMode::ToEven)
    }

    pub fn width(&self, p: Prec) -> BigFloat {
        self.hi.sub(&self.lo, p, RM_UP)
    }

    /// Width below `2^-bits`.
    pub fn width_below(&self, bits: i32, p: Prec) -> bool {
        let w = self.width(p);
        if w.is_zero() {
            return true;
        }
        match w.exponent() {
            Some(e) => e <= -bits,
            None => false,
        }
    }

    pub fn to_f64(&self) -> f64 {
        bigfloat_to_f64(&self.mid(64))
    }

    /// Decimal rendering of both endpoints, for reports.
    pub fn endpoints_dec(&self) -> (String, String) {
        (format!("{}", self.lo), format!("{}", self.hi))
    }
}

impl std::fmt::Display for RealInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

pub fn bigfloat_to_f64(v: &BigFloat) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    if v.is_inf() {
        return if v.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    match v.as_raw_parts() {
        Some((m, _n, s, e, _)) => {
            let top = m.last().copied().unwrap_or(0);
            let next = if m.len() >= 2 { m[m.len() - 2] } else { 0 };
            let frac = (top as f64) + (next as f64) / 1.8446744073709552e19;
            let val = frac / 1.8446744073709552e19 * 2f64.powi(e);
            if s == Sign::Neg { -val } else { val }
        }
        None => f64::NAN,
    }
}

/// Rectangle enclosure of a complex value.
#[derive(Debug, Clone)]
pub struct ComplexInterval {
    pub re: RealInterval,
    pub im: RealInterval,
}

impl ComplexInterval {
    pub fn new(re: RealInterval, im: RealInterval) -> Self {
        Self { re, im }
    }

    pub fn from_real(re: RealInterval) -> Self {
        Self { re, im: RealInterval::zero() }
    }

    pub fn zero() -> Self {
        Self::from_real(RealInterval::zero())
    }

    pub fn one() -> Self {
        Self::from_real(RealInterval::one())
    }

    pub fn is_real(&self) -> bool {
        self.im.lo().is_zero() && self.im.hi().is_zero()
    }

    pub fn add(&self, o: &Self, p: Prec) -> Self {
        Self::new(self.re.add(&o.re, p), self.im.add(&o.im, p))
    }

    pub fn sub(&self, o: &Self, p: Prec) -> Self {
        Self::new(self.re.sub(&o.re, p), self.im.sub(&o.im, p))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), self.im.neg())
    }

    pub fn mul(&self, o: &Self, p: Prec) -> Self {
        let re = self.re.mul(&o.re, p).sub(&self.im.mul(&o.im, p), p);
        let im = self.re.mul(&o.im, p).add(&self.im.mul(&o.re, p), p);
        Self::new(re, im)
    }

    pub fn div(&self, o: &Self, p: Prec) -> Result<Self> {
        let d = o.abs_sq(p);
        let num = self.mul(&o.conj(), p);
        Ok(Self::new(num.re.div(&d, p)?, num.im.div(&d, p)?))
    }

    pub fn abs_sq(&self, p: Prec) -> RealInterval {
        self.re.sqr(p).add(&self.im.sqr(p), p)
    }

    pub fn abs(&self, p: Prec) -> RealInterval {
        self.abs_sq(p).sqrt(p).expect("abs_sq is nonnegative")
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn intersects(&self, o: &Self) -> bool {
        self.re.intersects(&o.re) && self.im.intersects(&o.im)
    }

    pub fn contains_interior(&self, o: &Self) -> bool {
        self.re.contains_interior(&o.re) && self.im.contains_interior(&o.im)
    }

    pub fn intersect(&self, o: &Self) -> Option<Self> {
        Some(Self::new(self.re.intersect(&o.re)?, self.im.intersect(&o.im)?))
    }

    pub fn mid(&self, p: Prec) -> (BigFloat, BigFloat) {
        (self.re.mid(p), self.im.mid(p))
    }

    pub fn width(&self, p: Prec) -> BigFloat {
        bf_max(self.re.width(p), self.im.width(p))
    }

    pub fn width_below(&self, bits: i32, p: Prec) -> bool {
        self.re.width_below(bits, p) && self.im.width_below(bits, p)
    }

    pub fn pow_i64(&self, mut e: i64, p: Prec) -> Result<Self> {
        let invert = e < 0;
        if invert {
            e = -e;
        }
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = e as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base, p);
            }
            base = base.mul(&base, p);
            k >>= 1;
        }
        if invert {
            acc = Self::one().div(&acc, p)?;
        }
        Ok(acc)
    }
}

impl std::fmt::Display for ComplexInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn arithmetic_encloses() {
        let p = 128;
        let third = RealInterval::from_rational(&BigRational::new(1.into(), 3.into()), p);
        assert!(third.lo().cmp(third.hi()) != Some(1));
        let one = third.mul(&RealInterval::from_i64(3), p);
        assert!(one.contains(&BigFloat::from_i64(1, 64)));
        assert!(!one.lo().is_zero() || !one.hi().is_zero());
    }

    #[test]
    fn ln_exp_roundtrip_encloses() {
        let p = 192;
        let x = RealInterval::from_i64(7);
        let back = x.ln(p).unwrap().exp(p);
        assert!(back.contains(&BigFloat::from_i64(7, 64)));
        assert!(back.width_below(150, p));
    }

    #[test]
    fn sqr_of_straddling_interval_is_tight() {
        let p = 64;
        let x = RealInterval::new(BigFloat::from_i64(-1, 64), BigFloat::from_i64(2, 64));
        let s = x.sqr(p);
        assert!(s.lo().is_zero());
        assert!(s.contains(&BigFloat::from_i64(4, 64)));
        assert!(!s.contains(&BigFloat::from_i64(5, 64)));
    }

    #[test]
    fn division_by_zero_enclosure_fails() {
        let p = 64;
        let x = RealInterval::new(BigFloat::from_i64(-1, 64), BigFloat::from_i64(1, 64));
        assert!(RealInterval::one().div(&x, p).is_err());
    }

    #[test]
    fn complex_modulus() {
        let p = 128;
        let z = ComplexInterval::new(RealInterval::from_i64(3), RealInterval::from_i64(4));
        let a = z.abs(p);
        assert!(a.contains(&BigFloat::from_i64(5, 64)));
        assert!(a.width_below(100, p));
    }

    #[test]
    fn rational_roundtrip() {
        let p = 128;
        let q = BigRational::new(BigInt::from(-22), BigInt::from(7));
        let iv = RealInterval::from_rational(&q, p);
        let exact = BigRational::one() * q;
        assert!(iv.to_f64() - (-22.0 / 7.0) < 1e-12);
        // interval of a rational contains the rational: check via scaled integer
        let scaled = iv.mul(&RealInterval::from_bigint(exact.denom()), p);
        assert!(scaled.contains(&bigint_to_bigfloat(exact.numer())));
    }
}
