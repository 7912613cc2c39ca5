//! Factorization of monic integer polynomials over Q, and exact location of
//! roots on the unit circle.
//!
//! Factorization clusters certified root enclosures: the minimal
//! conjugation-closed subset of roots whose monic product has integer
//! coefficients is an irreducible factor. Candidate coefficients are read off
//! interval arithmetic and then verified by exact division, so a wrong guess
//! can only cost time, never correctness.
//!
//! Unit-circle roots are found exactly through the reciprocal gcd
//! `g = gcd(p, x^deg p(1/x))` and the substitution `y = x + 1/x`: roots of
//! `p` on the circle correspond to real roots of the reduced polynomial in
//! the open interval `(-2, 2)`, plus the rational points `x = +-1`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::interval::{ComplexInterval, Prec, RealInterval};
use super::poly::IntPolynomial;
use super::roots::{certified_roots, real_roots_in_range, RootConfig};
use crate::error::{Error, Result};

/// Exact integer in an interval, when there is exactly one.
fn unique_integer(iv: &RealInterval) -> Option<BigInt> {
    let lo = bigfloat_to_rational(iv.lo())?;
    let hi = bigfloat_to_rational(iv.hi())?;
    let a = lo.ceil().to_integer();
    let b = hi.floor().to_integer();
    if a == b { Some(a) } else { None }
}

/// Exact rational value of a finite BigFloat.
pub fn bigfloat_to_rational(v: &astro_float::BigFloat) -> Option<BigRational> {
    use astro_float::Sign;
    if v.is_zero() {
        return Some(BigRational::zero());
    }
    let (words, n, sign, e, _) = v.as_raw_parts()?;
    let mut m = BigInt::zero();
    for w in words.iter().rev() {
        m = (m << 64) + BigInt::from(*w);
    }
    if sign == Sign::Neg {
        m = -m;
    }
    // value = m * 2^(e - n)
    let shift = e as i64 - n as i64;
    let q = if shift >= 0 {
        BigRational::from(m << shift as usize)
    } else {
        BigRational::new(m, BigInt::one() << (-shift) as usize)
    };
    Some(q)
}

/// Irreducible factors of a monic squarefree integer polynomial, in a
/// canonical order (ascending degree, then lexicographic coefficients).
pub fn factor_squarefree_monic(p: &IntPolynomial) -> Result<Vec<IntPolynomial>> {
    if !p.is_monic() {
        return Err(Error::validation("factorization requires a monic polynomial"));
    }
    if p.degree() == 0 {
        return Ok(vec![]);
    }
    if p.degree() == 1 {
        return Ok(vec![p.clone()]);
    }
    let cfg = RootConfig::default();
    let mut prec: Prec = 96;
    loop {
        match try_factor(p, prec) {
            Ok(mut factors) => {
                factors.sort_by(|a, b| {
                    a.degree()
                        .cmp(&b.degree())
                        .then_with(|| a.coeffs().cmp(b.coeffs()))
                });
                return Ok(factors);
            }
            Err(e) => {
                prec *= 2;
                if prec > cfg.max_bits {
                    return Err(e);
                }
            }
        }
    }
}

fn try_factor(p: &IntPolynomial, prec: Prec) -> Result<Vec<IntPolynomial>> {
    let roots = certified_roots(p, prec)?;
    let work = prec + 32;
    // conjugation-closed items: real roots alone, nonreal roots paired with
    // their conjugates via the exact real quadratic x^2 - 2 Re(r) x + |r|^2
    #[derive(Clone)]
    struct Item {
        // monic real polynomial with exactly this item's roots, as intervals
        poly: Vec<RealInterval>, // ascending, degree 1 or 2, leading 1 omitted
    }
    let mut items: Vec<Item> = Vec::new();
    let mut used = vec![false; roots.len()];
    for (i, r) in roots.iter().enumerate() {
        if used[i] {
            continue;
        }
        used[i] = true;
        if r.is_real() {
            items.push(Item { poly: vec![r.value.re.neg()] });
        } else {
            // find the conjugate partner
            let conj = r.value.conj();
            let j = roots
                .iter()
                .enumerate()
                .position(|(j, s)| !used[j] && s.value.intersects(&conj))
                .ok_or_else(|| Error::precision("conjugate partner not found"))?;
            used[j] = true;
            let re2 = r.value.re.add(&r.value.re, work);
            let abs2 = r.value.abs_sq(work);
            items.push(Item { poly: vec![abs2, re2.neg()] });
        }
    }
    let m = items.len();
    if m > 24 {
        return Err(Error::budget("too many root clusters for subset factorization"));
    }
    let item_polys: Vec<Vec<RealInterval>> = items.into_iter().map(|i| i.poly).collect();
    let mut remaining: Vec<usize> = (0..m).collect();
    let mut factors: Vec<IntPolynomial> = Vec::new();
    'outer: while let Some(&anchor) = remaining.first() {
        let others: Vec<usize> = remaining[1..].to_vec();
        for size in 0..=others.len() {
            let mut chooser = SubsetIter::new(others.len(), size);
            while let Some(subset) = chooser.next() {
                let mut sel = vec![anchor];
                sel.extend(subset.iter().map(|&k| others[k]));
                if let Some(candidate) = expand_candidate(&item_polys, &sel, work) {
                    if p.exact_div(&candidate).is_some() {
                        factors.push(candidate);
                        remaining.retain(|k| !sel.contains(k));
                        continue 'outer;
                    }
                }
            }
        }
        return Err(Error::precision("no integer factor identified at this precision"));
    }
    Ok(factors)
}

/// Expand the monic product of the selected items with interval arithmetic
/// and read off integer coefficients when they are unambiguous.
fn expand_candidate(items: &[Vec<RealInterval>], sel: &[usize], work: Prec) -> Option<IntPolynomial> {
    let mut coeffs: Vec<RealInterval> = vec![RealInterval::one()];
    for &k in sel {
        let item = &items[k];
        let deg = item.len();
        let mut next = vec![RealInterval::zero(); coeffs.len() + deg];
        for (i, c) in coeffs.iter().enumerate() {
            // multiply by x^deg
            next[i + deg] = next[i + deg].add(c, work);
            for (j, ic) in item.iter().enumerate() {
                next[i + j] = next[i + j].add(&c.mul(ic, work), work);
            }
        }
        coeffs = next;
    }
    let mut ints = Vec::with_capacity(coeffs.len());
    for c in &coeffs {
        ints.push(unique_integer(c)?);
    }
    Some(IntPolynomial::new(ints))
}

struct SubsetIter {
    n: usize,
    k: usize,
    state: Option<Vec<usize>>,
}

impl SubsetIter {
    fn new(n: usize, k: usize) -> Self {
        let state = if k <= n { Some((0..k).collect()) } else { None };
        Self { n, k, state }
    }

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.state.clone()?;
        let mut s = cur.clone();
        let mut advanced = false;
        let mut i = self.k;
        while i > 0 {
            i -= 1;
            if s[i] < self.n - (self.k - i) {
                s[i] += 1;
                for j in i + 1..self.k {
                    s[j] = s[j - 1] + 1;
                }
                self.state = Some(s);
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.state = None;
        }
        Some(cur)
    }
}

/// Factor an arbitrary monic polynomial: squarefree decomposition first,
/// then cluster factorization of each squarefree part.
pub fn factor_monic(p: &IntPolynomial) -> Result<Vec<(IntPolynomial, usize)>> {
    if !p.is_monic() {
        return Err(Error::validation("factorization requires a monic polynomial"));
    }
    let mut out = Vec::new();
    for (q, mult) in p.squarefree_decomposition() {
        for f in factor_squarefree_monic(&q)? {
            out.push((f, mult));
        }
    }
    out.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.coeffs().cmp(b.0.coeffs())));
    Ok(out)
}

pub fn is_irreducible(p: &IntPolynomial) -> Result<bool> {
    if p.squarefree_part().degree() != p.degree() {
        return Ok(false);
    }
    Ok(factor_squarefree_monic(&p.normalized())?.len() == 1)
}

/// Roots of `p` lying exactly on the unit circle.
#[derive(Debug, Clone)]
pub struct UnitCircleRoots {
    pub plus_one: bool,
    pub minus_one: bool,
    /// Upper-half-plane representatives (conjugates are also roots), as
    /// certified enclosures built from `x = (y + i sqrt(4 - y^2)) / 2`.
    pub upper: Vec<ComplexInterval>,
}

impl UnitCircleRoots {
    pub fn any(&self) -> bool {
        self.plus_one || self.minus_one || !self.upper.is_empty()
    }

    /// All circle roots as enclosures (including conjugates and +-1).
    pub fn all_enclosures(&self) -> Vec<ComplexInterval> {
        let mut v = Vec::new();
        if self.plus_one {
            v.push(ComplexInterval::from_real(RealInterval::one()));
        }
        if self.minus_one {
            v.push(ComplexInterval::from_real(RealInterval::from_i64(-1)));
        }
        for u in &self.upper {
            v.push(u.clone());
            v.push(u.conj());
        }
        v
    }
}

/// Exact decision procedure for unit-modulus roots of an integer polynomial.
pub fn unit_circle_roots(p: &IntPolynomial, prec: Prec) -> Result<UnitCircleRoots> {
    if p.is_constant() {
        return Ok(UnitCircleRoots { plus_one: false, minus_one: false, upper: vec![] });
    }
    let sf = p.squarefree_part();
    let one = BigRational::one();
    let plus_one = sf.sign_at(&one) == 0;
    let minus_one = sf.sign_at(&-&one) == 0;
    let mut g = sf.gcd(&sf.reciprocal());
    // strip the rational circle points
    let xm1 = IntPolynomial::from_i64(&[-1, 1]);
    let xp1 = IntPolynomial::from_i64(&[1, 1]);
    while g.degree() >= 1 && g.sign_at(&one) == 0 {
        g = g.exact_div(&xm1).expect("x - 1 divides");
    }
    while g.degree() >= 1 && g.sign_at(&-&one) == 0 {
        g = g.exact_div(&xp1).expect("x + 1 divides");
    }
    if g.degree() == 0 {
        return Ok(UnitCircleRoots { plus_one, minus_one, upper: vec![] });
    }
    let h = g
        .normalized()
        .palindromic_reduction()
        .ok_or_else(|| Error::validation("reciprocal gcd is not palindromic"))?;
    let two = BigRational::from(BigInt::from(2));
    let mut upper = Vec::new();
    let work = prec.max(96);
    for y in real_roots_in_range(&h, &(-&two), &two, work)? {
        // certify strict interiority; roots at +-2 were stripped with x = +-1
        let two_iv = RealInterval::from_i64(2);
        let m_two_iv = RealInterval::from_i64(-2);
        if y.lt(&two_iv) != Some(true) || y.gt(&m_two_iv) != Some(true) {
            return Err(Error::precision("unit-circle parameter enclosure touches +-2"));
        }
        let y_half = y.div(&RealInterval::from_i64(2), work)?;
        let disc = RealInterval::from_i64(4).sub(&y.sqr(work), work);
        let im = disc.sqrt(work)?.div(&RealInterval::from_i64(2), work)?;
        upper.push(ComplexInterval::new(y_half, im));
    }
    Ok(UnitCircleRoots { plus_one, minus_one, upper })
}

/// Per-root unit-modulus classification, aligned with `certified_roots(p)`.
/// `Ordering::Equal` marks a root with modulus exactly 1.
pub fn modulus_classification(p: &IntPolynomial, prec: Prec) -> Result<Vec<(super::roots::CertifiedRoot, std::cmp::Ordering)>> {
    use std::cmp::Ordering;
    let cfg = RootConfig::default();
    let mut work = prec.max(128);
    loop {
        let roots = certified_roots(p, work)?;
        let circle = unit_circle_roots(p, work)?;
        let circle_encs = circle.all_enclosures();
        let mut out = Vec::with_capacity(roots.len());
        let mut ok = true;
        for r in roots.iter() {
            let matches: Vec<&ComplexInterval> =
                circle_encs.iter().filter(|c| c.intersects(&r.value)).collect();
            let a = r.value.abs(work + 32);
            let one_iv = RealInterval::one();
            let cls = if a.gt(&one_iv) == Some(true) {
                Some(Ordering::Greater)
            } else if a.lt(&one_iv) == Some(true) {
                Some(Ordering::Less)
            } else if matches.len() == 1 {
                // the enclosure straddles modulus 1 and hits exactly one
                // exact circle root: they are the same algebraic number when
                // every other root of p is disjoint from that circle root
                let c = matches[0];
                if roots
                    .iter()
                    .filter(|s| !std::ptr::eq(*s, r))
                    .all(|s| !s.value.intersects(c))
                {
                    Some(Ordering::Equal)
                } else {
                    None
                }
            } else {
                None
            };
            match cls {
                Some(c) => out.push((r.clone(), c)),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(out);
        }
        work *= 2;
        if work > cfg.max_bits {
            return Err(Error::precision("modulus-one classification undecided at precision cap"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn factor_products() {
        // (x^2 - 3x + 1)(x^2 + 1)
        let f = p(&[1, -3, 1]).mul(&p(&[1, 0, 1]));
        let factors = factor_squarefree_monic(&f).unwrap();
        assert_eq!(factors.len(), 2);
        assert!(factors.contains(&p(&[1, -3, 1])));
        assert!(factors.contains(&p(&[1, 0, 1])));
    }

    #[test]
    fn irreducible_stays_whole() {
        assert_eq!(factor_squarefree_monic(&p(&[-1, -3, 0, 1])).unwrap().len(), 1);
        assert!(is_irreducible(&p(&[1, -3, 1])).unwrap());
        assert!(!is_irreducible(&p(&[1, 0, 0, 0, 1]).mul(&p(&[-2, 0, 1]))).unwrap());
    }

    #[test]
    fn linear_factors_split() {
        // (x-1)(x-2)(x+3)
        let f = p(&[-1, 1]).mul(&p(&[-2, 1])).mul(&p(&[3, 1]));
        let factors = factor_squarefree_monic(&f).unwrap();
        assert_eq!(factors.len(), 3);
        assert!(factors.iter().all(|q| q.degree() == 1));
    }

    #[test]
    fn circle_roots_of_cyclotomic() {
        use crate::exact::poly::cyclotomic;
        let c = unit_circle_roots(&cyclotomic(8), 64).unwrap();
        assert!(!c.plus_one && !c.minus_one);
        assert_eq!(c.upper.len(), 2);
        // x^2 - 3x + 1 is palindromic but has no circle roots
        let c2 = unit_circle_roots(&p(&[1, -3, 1]), 64).unwrap();
        assert!(!c2.any());
        // x + 1 has the circle root -1
        let c3 = unit_circle_roots(&p(&[1, 1]), 64).unwrap();
        assert!(c3.minus_one && !c3.plus_one && c3.upper.is_empty());
    }

    #[test]
    fn salem_like_mixture() {
        // (x^2+1)(x^2-3x+1): two roots on the circle, two off
        let f = p(&[1, 0, 1]).mul(&p(&[1, -3, 1]));
        let cls = modulus_classification(&f, 64).unwrap();
        use std::cmp::Ordering::*;
        let count = |o: std::cmp::Ordering| cls.iter().filter(|(_, c)| *c == o).count();
        assert_eq!(count(Equal), 2);
        assert_eq!(count(Greater), 1);
        assert_eq!(count(Less), 1);
    }

    #[test]
    fn lehmer_polynomial_circle_roots() {
        // Lehmer's degree-10 Salem polynomial: 8 roots on the circle,
        // one inside, one outside.
        let lehmer = p(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        let cls = modulus_classification(&lehmer, 64).unwrap();
        use std::cmp::Ordering::*;
        assert_eq!(cls.iter().filter(|(_, c)| *c == Equal).count(), 8);
        assert_eq!(cls.iter().filter(|(_, c)| *c == Greater).count(), 1);
        assert_eq!(cls.iter().filter(|(_, c)| *c == Less).count(), 1);
    }
}
