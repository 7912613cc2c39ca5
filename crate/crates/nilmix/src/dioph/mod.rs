//! Heights of algebraic numbers and Diophantine lower-bound machinery.
//!
//! The absolute height is computed through the Mahler measure of the exact
//! minimal polynomial, `H(u) = M(p)^(1/deg p)` with
//! `M(p) = |lead| * prod max(1, |root|)`, which agrees with the conjugate
//! formula for algebraic integers and avoids p-adic machinery otherwise.
//! Relative vector heights take the product over places with the standard
//! normalization (every root of the defining polynomial contributes one
//! factor, so conjugate pairs enter squared), the convention under which the
//! product formula holds.

pub mod sunit;
pub mod waldschmidt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::exact::numfield::NfElement;
use crate::exact::{certified_roots, Prec, RealInterval};

pub use sunit::{sunit_solutions, SUnitInstance, SUnitSearch, SUnitSolution};
pub use waldschmidt::{
    calibrate_c1, empirical_gap, waldschmidt_bound, waldschmidt_chain, WaldschmidtBound,
    WaldschmidtChain, WaldschmidtParams,
};

/// Certified absolute height of an algebraic number.
#[derive(Debug, Clone)]
pub struct HeightValue {
    /// Enclosure of `H(u) >= 1`.
    pub value: RealInterval,
    /// Degree of `Q(u)` over `Q` (the minimal polynomial degree).
    pub degree: usize,
}

/// Absolute height via the Mahler measure of the exact minimal polynomial.
pub fn height(u: &NfElement, prec: Prec) -> Result<HeightValue> {
    if u.is_zero() {
        return Err(Error::degenerate("height of zero"));
    }
    let mp = u.min_poly();
    let degree = mp.degree();
    let work = prec + 64;
    let mut measure = RealInterval::from_bigint(&mp.leading()).abs();
    for root in certified_roots(&mp, prec + 16)?.iter() {
        for _ in 0..root.multiplicity {
            let m = root.value.abs(work).max(&RealInterval::one());
            measure = measure.mul(&m, work);
        }
    }
    // deg-th root as exp(ln/deg)
    let value = if degree == 1 {
        measure
    } else {
        let ln = measure.ln(work)?;
        ln.div(&RealInterval::from_i64(degree as i64), work)?.exp(work)
    };
    Ok(HeightValue { value, degree })
}

/// Relative height of a vector over the places of its field:
/// `H(x) = prod_v max(1, max_i |x_i|_v)`.
///
/// Archimedean places come from the certified embeddings. Finite places
/// contribute exactly 1 for vectors of algebraic integers and the
/// denominator lcm for rational vectors; other denominators are out of scope
/// and rejected.
pub fn vector_height(xs: &[NfElement], prec: Prec) -> Result<RealInterval> {
    if xs.is_empty() {
        return Err(Error::validation("vector height of an empty vector"));
    }
    let field = xs[0].field().clone();
    for x in xs {
        if x.field().defining_poly() != field.defining_poly() {
            return Err(Error::validation("vector entries live in different fields"));
        }
    }
    let work = prec + 64;
    let degree = field.degree();
    let all_rational = xs.iter().all(|x| x.is_rational());
    let finite_part: RealInterval = if all_rational {
        // prod over primes of max_i |x_i|_p = lcm of denominators
        let mut l = num_bigint::BigInt::one();
        for x in xs {
            let q = x.to_rational().expect("rational");
            l = num_integer::Integer::lcm(&l, q.denom());
        }
        RealInterval::from_bigint(&l)
    } else if xs.iter().all(|x| x.is_algebraic_integer()) {
        RealInterval::one()
    } else {
        return Err(Error::validation(
            "finite places are supported only for algebraic integers or rational vectors",
        ));
    };
    let mut h = finite_part;
    if all_rational && degree > 1 {
        // rationals embed diagonally: every archimedean place sees the same
        // value, and the normalized exponents over all places sum to degree
        let mut sup = RealInterval::zero();
        for x in xs {
            let q = x.to_rational().expect("rational");
            sup = sup.max(&RealInterval::from_rational(&q, work).abs());
        }
        let m = sup.max(&RealInterval::one());
        let mut pw = RealInterval::one();
        for _ in 0..degree {
            pw = pw.mul(&m, work);
        }
        return Ok(h.mul(&pw, work));
    }
    let embeddings: Vec<Vec<crate::exact::ComplexInterval>> =
        xs.iter().map(|x| x.embeddings(prec + 16)).collect::<Result<_>>()?;
    for place in 0..degree {
        let mut sup = RealInterval::zero();
        for e in &embeddings {
            sup = sup.max(&e[place].abs(work));
        }
        // one normalized factor per root of the defining polynomial, so
        // conjugate pairs enter twice (the squared-modulus convention)
        h = h.mul(&sup.max(&RealInterval::one()), work);
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{IntPolynomial, NumberField};
    use num_bigint::BigInt;
    use num_rational::BigRational;

    #[test]
    fn rational_height() {
        let q = NumberField::rationals();
        let two = NfElement::from_int(&q, 2);
        let h = height(&two, 96).unwrap();
        assert_eq!(h.degree, 1);
        assert!((h.value.to_f64() - 2.0).abs() < 1e-20);
        // H(p/q) = max(|p|, |q|)
        let frac = NfElement::from_rational(&q, BigRational::new(BigInt::from(3), BigInt::from(7)));
        let h = height(&frac, 96).unwrap();
        assert!((h.value.to_f64() - 7.0).abs() < 1e-12);
    }

    #[test]
    fn cat_eigenvalue_height() {
        // H((3+sqrt5)/2) = ((3+sqrt5)/2)^(1/2)
        let k = NumberField::new(IntPolynomial::from_i64(&[1, -3, 1])).unwrap();
        let theta = NfElement::generator(&k);
        let h = height(&theta, 128).unwrap();
        assert_eq!(h.degree, 2);
        let expect = 2.618033988749895f64.sqrt();
        assert!((h.value.to_f64() - expect).abs() < 1e-12);
    }

    #[test]
    fn silver_ratio_height() {
        // H(1+sqrt2) = (1+sqrt2)^(1/2): conjugate 1-sqrt2 has modulus < 1
        let k = NumberField::new(IntPolynomial::from_i64(&[-2, 0, 1])).unwrap();
        let u = NfElement::generator(&k).add(&NfElement::one(&k)).unwrap();
        let h = height(&u, 128).unwrap();
        let expect = (1.0 + 2f64.sqrt()).sqrt();
        assert!((h.value.to_f64() - expect).abs() < 1e-12);
    }

    #[test]
    fn root_of_unity_height_is_one() {
        let k = NumberField::new(IntPolynomial::from_i64(&[1, 0, 1])).unwrap();
        let i = NfElement::generator(&k);
        let h = height(&i, 96).unwrap();
        assert!(h.value.contains(&astro_float::BigFloat::from_i64(1, 64)));
        assert!(h.value.width_below(60, 256));
    }

    #[test]
    fn height_power_and_inverse_identities() {
        let k = NumberField::new(IntPolynomial::from_i64(&[-2, 0, 1])).unwrap();
        let u = NfElement::generator(&k).add(&NfElement::one(&k)).unwrap(); // 1+sqrt2
        let h1 = height(&u, 160).unwrap().value;
        // H(u^n) = H(u)^n
        for n in 1..=6i64 {
            let hn = height(&u.pow(n).unwrap(), 160).unwrap().value;
            let pw = h1.pow_i64(n, 256).unwrap();
            assert!(hn.intersects(&pw), "H(u^{}) = {} vs H(u)^{} = {}", n, hn, n, pw);
        }
        // H(1/u) = H(u) for units
        let hi = height(&u.inv().unwrap(), 160).unwrap().value;
        assert!(hi.intersects(&h1));
    }

    #[test]
    fn vector_height_silver_pair() {
        let k = NumberField::new(IntPolynomial::from_i64(&[-2, 0, 1])).unwrap(); // x^2-2
        let s = NfElement::generator(&k);
        let one = NfElement::one(&k);
        let x1 = one.add(&s).unwrap(); // 1+sqrt2
        let x2 = one.sub(&s).unwrap(); // 1-sqrt2
        let h = vector_height(&[x1.clone(), x2], 128).unwrap();
        let expect = (1.0 + 2f64.sqrt()).powi(2);
        assert!((h.to_f64() - expect).abs() < 1e-10, "H = {}", h.to_f64());
        // singleton vector of 1
        let h1 = vector_height(&[NfElement::one(&k)], 96).unwrap();
        assert!((h1.to_f64() - 1.0).abs() < 1e-12);
        // heights are never below 1
        let hu = vector_height(&[x1], 96).unwrap();
        assert!(
            hu.gt(&RealInterval::from_rational(
                &BigRational::new(99.into(), 100.into()),
                96
            )) == Some(true)
        );
    }
}
