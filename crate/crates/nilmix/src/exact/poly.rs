//! Exact univariate polynomials over the integers.
//!
//! Coefficients are arbitrary-precision and stored in ascending order; the
//! zero polynomial is the empty coefficient vector. All arithmetic is exact.
//! The module also provides cyclotomic polynomials, squarefree (Yun)
//! decomposition, a primitive-PRS gcd, and the palindromic substitution
//! `x + 1/x -> y` used to locate eigenvalues on the unit circle.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::{ComplexInterval, Prec, RealInterval};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>, // ascending powers, trailing zeros trimmed
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// The monomial `c x^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c;
        Self { coeffs: v }
    }

    pub fn x() -> Self {
        Self::monomial(BigInt::one(), 1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; the zero polynomial reports degree 0 by convention of callers
    /// that have already excluded it.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(self.coeff(i) + o.coeff(i));
        }
        Self::new(v)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(self.coeff(i) - o.coeff(i));
        }
        Self::new(v)
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut v = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::new(v)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Exact division; `None` when the quotient is not an integer polynomial.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.degree() < d.degree() {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); self.degree() - d.degree() + 1];
        let dl = d.leading();
        for k in (0..q.len()).rev() {
            let top = rem[k + d.degree()].clone();
            if top.is_zero() {
                continue;
            }
            let (c, r) = top.div_rem(&dl);
            if !r.is_zero() {
                return None;
            }
            q[k] = c.clone();
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &c * dc;
            }
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::new(q))
    }

    /// Pseudo-remainder scaled by an even power of the divisor's leading
    /// coefficient, so the sign of the true remainder is preserved.
    pub fn signed_pseudo_rem(&self, d: &Self) -> Self {
        assert!(!d.is_zero(), "pseudo-remainder by zero");
        if self.degree() < d.degree() || self.is_zero() {
            return self.clone();
        }
        let delta = self.degree() - d.degree() + 1;
        let even_delta = if delta % 2 == 0 { delta } else { delta + 1 };
        let mult = num_traits::pow(d.leading(), even_delta);
        let mut rem = self.scale(&mult);
        let dl = d.leading();
        while !rem.is_zero() && rem.degree() >= d.degree() {
            let k = rem.degree() - d.degree();
            let top = rem.leading();
            let (c, r) = top.div_rem(&dl);
            debug_assert!(r.is_zero(), "even-power premultiplier guarantees exactness");
            let _ = r;
            rem = rem.sub(&d.mul(&Self::monomial(c, k)));
        }
        rem
    }

    /// Positive gcd of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides out the content, keeping the sign of the leading coefficient.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let g = self.content();
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Primitive with a positive leading coefficient: the normal form used
    /// for gcds and minimal polynomials.
    pub fn normalized(&self) -> Self {
        let p = self.primitive();
        if p.leading().is_negative() { p.neg() } else { p }
    }

    /// Primitive gcd with positive leading coefficient.
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.normalized();
        let mut b = o.normalized();
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            let r = a.signed_pseudo_rem(&b).primitive();
            if r.is_zero() {
                return b.normalized();
            }
            a = b;
            b = r;
        }
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * BigInt::from(i as u64 + 1))
                .collect(),
        )
    }

    pub fn eval_bigint(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Sign of the value at a rational point, computed with homogenized
    /// integer arithmetic.
    pub fn sign_at(&self, x: &BigRational) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let a = x.numer();
        let b = x.denom();
        let n = self.degree();
        let mut acc = BigInt::zero();
        let mut bpow = BigInt::one();
        // sum c_i a^i b^(n-i), evaluated Horner-style in a
        for i in (0..=n).rev() {
            acc = acc * a + self.coeff(i) * &bpow;
            if i > 0 {
                bpow *= b;
            }
        }
        match acc.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from(c.clone());
        }
        acc
    }

    pub fn eval_interval(&self, x: &RealInterval, p: Prec) -> RealInterval {
        let mut acc = RealInterval::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x, p).add(&RealInterval::from_bigint(c), p);
        }
        acc
    }

    pub fn eval_complex(&self, x: &ComplexInterval, p: Prec) -> ComplexInterval {
        let mut acc = ComplexInterval::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x, p);
            acc.re = acc.re.add(&RealInterval::from_bigint(c), p);
        }
        acc
    }

    /// `x^deg * p(1/x)`.
    pub fn reciprocal(&self) -> Self {
        let mut v = self.coeffs.clone();
        v.reverse();
        Self::new(v)
    }

    pub fn is_palindromic(&self) -> bool {
        !self.is_zero() && *self == self.reciprocal()
    }

    /// Substitute `x^k` for `x`.
    pub fn compose_power(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![BigInt::zero(); self.degree() * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * k] = c.clone();
        }
        Self::new(v)
    }

    /// For a palindromic polynomial of even degree `2m`, the polynomial `h`
    /// with `p(x) = x^m h(x + 1/x)`. Uses the recurrence
    /// `V_0 = 2, V_1 = y, V_{k+1} = y V_k - V_{k-1}` for `x^k + x^{-k}`.
    pub fn palindromic_reduction(&self) -> Option<Self> {
        if !self.is_palindromic() || self.degree() % 2 != 0 {
            return None;
        }
        let m = self.degree() / 2;
        let mut h = Self::constant(self.coeff(m));
        let mut v_prev = Self::constant(BigInt::from(2)); // V_0
        let mut v_cur = Self::x(); // V_1
        for k in 1..=m {
            h = h.add(&v_cur.scale(&self.coeff(m + k)));
            let next = Self::x().mul(&v_cur).sub(&v_prev);
            v_prev = std::mem::replace(&mut v_cur, next);
        }
        Some(h)
    }

    /// Squarefree part `p / gcd(p, p')`, normalized.
    pub fn squarefree_part(&self) -> Self {
        let g = self.gcd(&self.derivative());
        if g.is_constant() {
            return self.normalized();
        }
        // both primitive, so the division is exact over Z
        self.normalized().exact_div(&g).expect("gcd divides").normalized()
    }

    /// Yun decomposition into squarefree factors with multiplicities:
    /// `p = lc * prod f_i^(m_i)` with the `f_i` squarefree, pairwise coprime.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, usize)> {
        assert!(!self.is_zero());
        let f = self.normalized();
        if f.degree() == 0 {
            return vec![];
        }
        let df = f.derivative();
        let a0 = f.gcd(&df);
        if a0.is_constant() {
            return vec![(f, 1)];
        }
        let mut out = Vec::new();
        let mut b = f.exact_div(&a0).expect("gcd divides f");
        let mut c = df.exact_div(&a0).expect("gcd divides f'");
        let mut i = 1usize;
        loop {
            let d = c.sub(&b.derivative());
            if d.is_zero() {
                if b.degree() > 0 {
                    out.push((b.normalized(), i));
                }
                break;
            }
            let g = b.gcd(&d);
            if g.degree() > 0 {
                out.push((g.clone(), i));
            }
            b = b.exact_div(&g).expect("factor divides b");
            c = d.exact_div(&g).expect("factor divides d");
            if b.degree() == 0 {
                break;
            }
            i += 1;
        }
        out
    }

    /// Cauchy root bound: all complex roots have modulus below
    /// `1 + max |a_i| / |a_n|`, returned as a rational.
    pub fn cauchy_root_bound(&self) -> BigRational {
        assert!(!self.is_zero() && self.degree() >= 1);
        let lead = self.leading().abs();
        let mut m = BigInt::zero();
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            let a = c.abs();
            if a > m {
                m = a;
            }
        }
        BigRational::one() + BigRational::new(m, lead)
    }

    /// True when no root is a root of unity: the gcd with every cyclotomic
    /// polynomial of degree at most `deg p` is constant.
    pub fn is_root_of_unity_free(&self) -> bool {
        assert!(!self.is_constant(), "nonconstant polynomial required");
        let n = self.degree() as u64;
        for k in cyclotomic_indices_up_to_degree(n) {
            if !self.gcd(&cyclotomic(k)).is_constant() {
                return false;
            }
        }
        true
    }

    /// Whether this is exactly a cyclotomic polynomial; returns the index.
    pub fn cyclotomic_index(&self) -> Option<u64> {
        if self.is_zero() || !self.is_monic() {
            return None;
        }
        let n = self.degree() as u64;
        if n == 0 {
            return None;
        }
        for k in 1..=cyclotomic_index_bound(n) {
            if euler_phi(k) == n && *self == cyclotomic(k) {
                return Some(k);
            }
        }
        None
    }
}

impl std::fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let a = c.abs();
            if i == 0 || !a.is_one() {
                write!(f, "{}", a)?;
                if i > 0 {
                    write!(f, "*")?;
                }
            }
            if i == 1 {
                write!(f, "x")?;
            } else if i > 1 {
                write!(f, "x^{}", i)?;
            }
            first = false;
        }
        Ok(())
    }
}

pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// `phi(k) >= sqrt(k/2)`, so `phi(k) <= n` forces `k <= 2 n^2`.
fn cyclotomic_index_bound(n: u64) -> u64 {
    (2 * n * n).max(2)
}

/// All k with `phi(k) <= n`.
pub fn cyclotomic_indices_up_to_degree(n: u64) -> Vec<u64> {
    (1..=cyclotomic_index_bound(n)).filter(|&k| euler_phi(k) <= n).collect()
}

/// The k-th cyclotomic polynomial, by exact division of `x^k - 1`.
pub fn cyclotomic(k: u64) -> IntPolynomial {
    assert!(k >= 1);
    if k == 1 {
        return IntPolynomial::from_i64(&[-1, 1]);
    }
    let mut num = {
        let mut v = vec![BigInt::zero(); k as usize + 1];
        v[0] = BigInt::from(-1);
        v[k as usize] = BigInt::one();
        IntPolynomial::new(v)
    };
    for d in 1..k {
        if k % d == 0 {
            num = num.exact_div(&cyclotomic(d)).expect("cyclotomic division is exact");
        }
    }
    num
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn mul_div_roundtrip() {
        let a = p(&[1, -3, 1]); // x^2 - 3x + 1
        let b = p(&[2, 0, 5, 1]);
        let prod = a.mul(&b);
        assert_eq!(prod.exact_div(&a).unwrap(), b);
        assert_eq!(prod.exact_div(&b).unwrap(), a);
        assert!(p(&[1, 1]).exact_div(&p(&[0, 1])).is_none());
    }

    #[test]
    fn gcd_of_common_factor() {
        let common = p(&[1, 2, 1]); // (x+1)^2
        let a = common.mul(&p(&[-3, 1]));
        let b = common.mul(&p(&[5, 0, 1]));
        assert_eq!(a.gcd(&b), common.normalized());
        assert!(p(&[1, -3, 1]).gcd(&p(&[1, 1])).is_constant());
    }

    #[test]
    fn cyclotomics_small() {
        assert_eq!(cyclotomic(1), p(&[-1, 1]));
        assert_eq!(cyclotomic(2), p(&[1, 1]));
        assert_eq!(cyclotomic(3), p(&[1, 1, 1]));
        assert_eq!(cyclotomic(4), p(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), p(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), p(&[1, 0, -1, 0, 1]));
        // product over divisors of 12 rebuilds x^12 - 1
        let mut prod = IntPolynomial::one();
        for d in [1u64, 2, 3, 4, 6, 12] {
            prod = prod.mul(&cyclotomic(d));
        }
        let mut v = vec![BigInt::zero(); 13];
        v[0] = BigInt::from(-1);
        v[12] = BigInt::one();
        assert_eq!(prod, IntPolynomial::new(v));
    }

    #[test]
    fn root_of_unity_detection() {
        assert!(p(&[1, -3, 1]).is_root_of_unity_free()); // x^2-3x+1
        assert!(!p(&[-1, 1]).is_root_of_unity_free()); // x-1
        assert!(!p(&[1, 1, 1]).is_root_of_unity_free()); // x^2+x+1
        assert_eq!(p(&[1, 1]).cyclotomic_index(), Some(2));
        assert_eq!(p(&[1, 0, 1]).cyclotomic_index(), Some(4));
        assert_eq!(p(&[1, -3, 1]).cyclotomic_index(), None);
    }

    #[test]
    fn squarefree_decomposition_recovers_multiplicities() {
        // (x-1)^2 (x+2)^3 (x^2+1)
        let f = p(&[-1, 1]).mul(&p(&[-1, 1])).mul(&p(&[2, 1])).mul(&p(&[2, 1])).mul(&p(&[2, 1])).mul(&p(&[1, 0, 1]));
        let dec = f.squarefree_decomposition();
        let mut rebuilt = IntPolynomial::one();
        for (q, m) in &dec {
            for _ in 0..*m {
                rebuilt = rebuilt.mul(q);
            }
        }
        assert_eq!(rebuilt.normalized(), f.normalized());
        assert!(dec.iter().any(|(q, m)| *m == 2 && q.degree() == 1));
        assert!(dec.iter().any(|(q, m)| *m == 3 && q.degree() == 1));
        assert!(dec.iter().any(|(q, m)| *m == 1 && q.degree() == 2));
    }

    #[test]
    fn palindromic_reduction_cat_map() {
        // x^2 - 3x + 1 is palindromic: h(y) = y - 3, root y = 3 outside [-2,2]
        let h = p(&[1, -3, 1]).palindromic_reduction().unwrap();
        assert_eq!(h, p(&[-3, 1]));
        // x^4+1 = Phi_8: h(y) = y^2 - 2, roots +-sqrt2 inside (-2,2)
        let h8 = p(&[1, 0, 0, 0, 1]).palindromic_reduction().unwrap();
        assert_eq!(h8, p(&[-2, 0, 1]));
    }

    #[test]
    fn sign_at_rational() {
        let f = p(&[1, -3, 1]);
        assert_eq!(f.sign_at(&BigRational::new(1.into(), 2.into())), -1);
        assert_eq!(f.sign_at(&BigRational::new(3.into(), 1.into())), 1);
        assert_eq!(f.sign_at(&BigRational::new(0.into(), 1.into())), 1);
    }
}
