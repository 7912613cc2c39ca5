//! Brute-force search for solutions of the S-unit inequality
//! `|b_1 + sum_j b_j x_j|_v < H(x)^(-eps)` over unit powers.
//!
//! Coordinates range over `x_j = zeta * prod u_k^(e_k)` with `zeta = +-1`
//! (the torsion of a field with a real embedding) and exponents in a box.
//! Every candidate is decided with certified arithmetic; subsum vanishing is
//! decided exactly in the field. A vanishing subsum -- including the full
//! sum -- marks the solution degenerate and excludes it from finiteness
//! counts.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::vector_height;
use crate::error::{Error, Result};
use crate::exact::numfield::{NfElement, NumberField};
use crate::exact::{Prec, RealInterval};

#[derive(Debug, Clone)]
pub struct SUnitInstance {
    pub field: Arc<NumberField>,
    /// Multiplicative basis for the searched units (validated: algebraic
    /// integers of norm `+-1`). Provided as input data; unit-group
    /// computation is out of scope.
    pub fundamental_units: Vec<NfElement>,
    /// `b_1, ..., b_s`; `b_1` is the constant term, `x_j` attaches to `b_j`
    /// for `j >= 2`.
    pub coefficients: Vec<NfElement>,
    /// Index of the distinguished archimedean place `v` (a root index of the
    /// defining polynomial).
    pub place: usize,
    pub epsilon: BigRational,
}

impl SUnitInstance {
    pub fn validate(&self, prec: Prec) -> Result<()> {
        if self.coefficients.is_empty() {
            return Err(Error::validation("instance needs at least b_1"));
        }
        if self.coefficients.iter().any(|b| b.is_zero()) {
            return Err(Error::validation("coefficients must be nonzero"));
        }
        if self.epsilon <= BigRational::zero() {
            return Err(Error::validation("epsilon must be positive"));
        }
        if self.place >= self.field.degree() {
            return Err(Error::validation("place index out of range"));
        }
        if !self.field.has_real_embedding(prec)? {
            return Err(Error::validation(
                "torsion beyond +-1 is unsupported: the field needs a real embedding",
            ));
        }
        for u in &self.fundamental_units {
            if u.field().defining_poly() != self.field.defining_poly() {
                return Err(Error::validation("unit lives in a different field"));
            }
            if !u.is_unit() {
                return Err(Error::validation(
                    "fundamental unit is not a unit of the ring of integers",
                ));
            }
        }
        for b in &self.coefficients {
            if b.field().defining_poly() != self.field.defining_poly() {
                return Err(Error::validation("coefficient lives in a different field"));
            }
        }
        Ok(())
    }
}

/// One coordinate assignment `x_j = sign * prod u_k^(e_k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateChoice {
    pub sign: i8,
    pub exponents: Vec<i64>,
}

#[derive(Debug, Clone)]
pub struct SUnitSolution {
    pub coordinates: Vec<CoordinateChoice>,
    /// Exact values of `x_2..x_s`.
    pub values: Vec<NfElement>,
    /// Certified `|b_1 + sum b_j x_j|_v`.
    pub lhs: RealInterval,
    /// Certified relative height of the coordinate vector.
    pub height: RealInterval,
    /// Bitmasks (over terms `b_1, b_2 x_2, ...`) of exactly vanishing
    /// subsums; nonempty marks the solution degenerate.
    pub vanishing_subsums: Vec<u32>,
}

impl SUnitSolution {
    pub fn is_degenerate(&self) -> bool {
        !self.vanishing_subsums.is_empty()
    }

    /// Largest exponent magnitude used by any coordinate.
    pub fn exponent_radius(&self) -> i64 {
        self.coordinates
            .iter()
            .flat_map(|c| c.exponents.iter().map(|e| e.abs()))
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct SUnitSearch {
    pub solutions: Vec<SUnitSolution>,
    /// True when the enumeration stopped at the budget before covering the
    /// requested box.
    pub partial: bool,
    pub scanned: u64,
}

impl SUnitSearch {
    pub fn nondegenerate_count(&self) -> usize {
        self.solutions.iter().filter(|s| !s.is_degenerate()).count()
    }

    /// Count of nondegenerate solutions whose exponents all fit in the
    /// sub-box of radius `b` (how the count stabilizes as the box grows).
    pub fn nondegenerate_count_within(&self, b: i64) -> usize {
        self.solutions
            .iter()
            .filter(|s| !s.is_degenerate() && s.exponent_radius() <= b)
            .count()
    }
}

/// Exhaustive search over the exponent box `[-box, box]^(rank)` per
/// coordinate. The output order is canonical (lexicographic in the
/// coordinate choices), independent of the worker partition.
pub fn sunit_solutions(
    inst: &SUnitInstance,
    exponent_box: i64,
    budget: u64,
    prec: Prec,
) -> Result<SUnitSearch> {
    inst.validate(prec)?;
    let s = inst.coefficients.len();
    if s == 1 {
        // no coordinates: the inequality reads |b_1|_v < 1
        let lhs = place_value(&inst.coefficients[0], inst.place, inst.field.as_ref(), prec)?;
        let mut solutions = Vec::new();
        if lhs.lt(&RealInterval::one()) == Some(true) {
            solutions.push(SUnitSolution {
                coordinates: vec![],
                values: vec![],
                lhs,
                height: RealInterval::one(),
                vanishing_subsums: vec![],
            });
        }
        return Ok(SUnitSearch { solutions, partial: false, scanned: 1 });
    }
    let rank = inst.fundamental_units.len();
    let per_coord = 2u64 * (2 * exponent_box as u64 + 1).pow(rank as u32);
    let total = per_coord.checked_pow((s - 1) as u32).unwrap_or(u64::MAX);
    let partial = total > budget;
    let limit = total.min(budget);

    // all coordinate choices in lexicographic order, with exact values
    let choices = coordinate_choices(inst, exponent_box)?;
    debug_assert_eq!(choices.len() as u64, per_coord);

    let indices: Vec<u64> = (0..limit).collect();
    let results: Vec<Option<SUnitSolution>> = indices
        .par_iter()
        .map(|&idx| {
            let mut rem = idx;
            let mut coord_idx = Vec::with_capacity(s - 1);
            for _ in 0..s - 1 {
                coord_idx.push((rem % per_coord) as usize);
                rem /= per_coord;
            }
            coord_idx.reverse();
            evaluate_candidate(inst, &choices, &coord_idx, prec)
        })
        .collect::<Result<Vec<Option<SUnitSolution>>>>()?;
    let solutions: Vec<SUnitSolution> = results.into_iter().flatten().collect();
    Ok(SUnitSearch { solutions, partial, scanned: limit })
}

fn coordinate_choices(
    inst: &SUnitInstance,
    exponent_box: i64,
) -> Result<Vec<(CoordinateChoice, NfElement)>> {
    let rank = inst.fundamental_units.len();
    // power tables u_k^e for e in [-box, box]
    let mut tables: Vec<Vec<NfElement>> = Vec::with_capacity(rank);
    for u in &inst.fundamental_units {
        let mut tab = Vec::with_capacity(2 * exponent_box as usize + 1);
        for e in -exponent_box..=exponent_box {
            tab.push(u.pow(e)?);
        }
        tables.push(tab);
    }
    let mut out = Vec::new();
    for sign in [1i8, -1] {
        let mut exps = vec![-exponent_box; rank];
        loop {
            let mut val = if sign == 1 {
                NfElement::one(&inst.field)
            } else {
                NfElement::from_int(&inst.field, -1)
            };
            for (k, &e) in exps.iter().enumerate() {
                val = val.mul(&tables[k][(e + exponent_box) as usize])?;
            }
            out.push((CoordinateChoice { sign, exponents: exps.clone() }, val));
            // odometer (lexicographic from the last index)
            let mut i = rank;
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if exps[i] < exponent_box {
                    exps[i] += 1;
                    for e in exps.iter_mut().skip(i + 1) {
                        *e = -exponent_box;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    Ok(out)
}

fn evaluate_candidate(
    inst: &SUnitInstance,
    choices: &[(CoordinateChoice, NfElement)],
    coord_idx: &[usize],
    prec: Prec,
) -> Result<Option<SUnitSolution>> {
    let s = inst.coefficients.len();
    // terms b_1, b_2 x_2, ..., b_s x_s
    let mut terms = Vec::with_capacity(s);
    terms.push(inst.coefficients[0].clone());
    let mut values = Vec::with_capacity(s - 1);
    for (j, &ci) in coord_idx.iter().enumerate() {
        let x = &choices[ci].1;
        values.push(x.clone());
        terms.push(inst.coefficients[j + 1].mul(x)?);
    }
    let mut total = NfElement::zero(&inst.field);
    for t in &terms {
        total = total.add(t)?;
    }
    let height = vector_height(&values, prec)?;
    let lhs = place_value(&total, inst.place, inst.field.as_ref(), prec)?;
    // rhs = H^(-eps) = exp(-eps ln H)
    let work = prec + 64;
    let eps = RealInterval::from_rational(&inst.epsilon, work);
    let rhs = eps.neg().mul(&height.ln(work)?, work).exp(work);
    let torsion_only = coord_idx
        .iter()
        .all(|&ci| choices[ci].0.exponents.iter().all(|&e| e == 0));
    let holds = if total.is_zero() {
        true // |0| < positive rhs
    } else if torsion_only {
        // all coordinates are roots of unity, so H = 1 and the right side is
        // exactly 1: ties are decided exactly on the unit circle
        let roots = inst.field.roots(prec)?;
        let cmp = total.modulus_cmp_one(inst.place, prec)?;
        let strict = cmp == std::cmp::Ordering::Less;
        if roots[inst.place].is_real() {
            strict
        } else {
            // squared normalization does not change the comparison with 1
            strict
        }
    } else {
        match lhs.lt(&rhs) {
            Some(v) => v,
            None => match decide_exact_low_degree(inst, &values, &total, prec)? {
                Some(v) => v,
                None => {
                    // escalate before giving up; a surviving tie is reported,
                    // not silently resolved
                    let mut p2 = prec * 2;
                    let cap = crate::exact::RootConfig::default().max_bits / 2;
                    loop {
                        let h2 = vector_height(&values, p2)?;
                        let l2 = place_value(&total, inst.place, inst.field.as_ref(), p2)?;
                        let w2 = p2 + 64;
                        let r2 = RealInterval::from_rational(&inst.epsilon, w2)
                            .neg()
                            .mul(&h2.ln(w2)?, w2)
                            .exp(w2);
                        if let Some(v) = l2.lt(&r2) {
                            break v;
                        }
                        p2 *= 2;
                        if p2 > cap {
                            return Err(Error::undecided(
                                "S-unit inequality comparison undecided at precision cap",
                            ));
                        }
                    }
                }
            },
        }
    };
    if !holds {
        return Ok(None);
    }
    // exact subsum analysis over all nonempty subsets of terms
    let mut vanishing = Vec::new();
    for mask in 1u32..(1 << s) {
        let mut sum = NfElement::zero(&inst.field);
        for (t, term) in terms.iter().enumerate() {
            if mask & (1 << t) != 0 {
                sum = sum.add(term)?;
            }
        }
        if sum.is_zero() {
            vanishing.push(mask);
        }
    }
    Ok(Some(SUnitSolution {
        coordinates: coord_idx.iter().map(|&ci| choices[ci].0.clone()).collect(),
        values,
        lhs,
        height,
        vanishing_subsums: vanishing,
    }))
}

/// Exact decision of `|total|_v < H^(-eps)` in fields of degree at most 2,
/// where algebraic ties are decidable: the comparison is equivalent to
/// `|total|^q H^p < 1` for `eps = p/q`, and over a quadratic field every
/// place modulus is the fixed-place modulus of a (possibly conjugated) field
/// element, so the whole expression collapses to one exact
/// modulus-versus-one test. Returns `None` for higher-degree fields.
fn decide_exact_low_degree(
    inst: &SUnitInstance,
    values: &[NfElement],
    total: &NfElement,
    prec: Prec,
) -> Result<Option<bool>> {
    use std::cmp::Ordering;
    let d = inst.field.degree();
    if d > 2 {
        return Ok(None);
    }
    let p_num: i64 = inst
        .epsilon
        .numer()
        .try_into()
        .map_err(|_| Error::validation("epsilon numerator too large"))?;
    let q_den: i64 = inst
        .epsilon
        .denom()
        .try_into()
        .map_err(|_| Error::validation("epsilon denominator too large"))?;
    if d == 1 {
        let one = BigRational::from_integer(1.into());
        let t = total.to_rational().expect("degree-1 field").abs();
        // H = lcm of denominators (finite places) * max(1, sup |x_i|)
        let mut lcm = num_bigint::BigInt::from(1);
        let mut sup = one.clone();
        for x in values {
            let q = x.to_rational().expect("degree-1 field");
            lcm = num_integer::Integer::lcm(&lcm, q.denom());
            let a = q.abs();
            if a > sup {
                sup = a;
            }
        }
        let h = BigRational::from_integer(lcm) * sup;
        // |total|^q * H^p < 1 decides |total| < H^(-p/q)
        let lhs = pow_rational(&t, q_den) * pow_rational(&h, p_num);
        return Ok(Some(lhs < one));
    }
    let place = inst.place;
    // a complex place (conjugate root pair) carries the squared modulus
    let nv: i64 = if inst.field.roots(prec)?[place].is_real() { 1 } else { 2 };
    let mut prod = total.pow(nv * q_den)?;
    for v in 0..2usize {
        let mut best: Option<NfElement> = None;
        for x in values {
            let g = if v == place { x.clone() } else { quadratic_conj(x)? };
            best = Some(match best {
                None => g,
                Some(b) => {
                    let ratio = g.mul(&b.inv()?)?;
                    if ratio.modulus_cmp_one(place, prec)? == Ordering::Greater {
                        g
                    } else {
                        b
                    }
                }
            });
        }
        if let Some(b) = best {
            if b.modulus_cmp_one(place, prec)? == Ordering::Greater {
                prod = prod.mul(&b.pow(p_num)?)?;
            }
        }
    }
    Ok(Some(prod.modulus_cmp_one(place, prec)? == Ordering::Less))
}

fn pow_rational(q: &BigRational, e: i64) -> BigRational {
    let mut acc = BigRational::from_integer(1.into());
    for _ in 0..e.unsigned_abs() {
        acc *= q;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// Galois conjugation in a quadratic field: `a + b theta -> a - b c1 - b theta`
/// for the defining polynomial `x^2 + c1 x + c0`.
fn quadratic_conj(x: &NfElement) -> Result<NfElement> {
    let poly = x.field().defining_poly();
    if poly.degree() != 2 {
        return Err(Error::validation("conjugation shortcut needs a quadratic field"));
    }
    let c1 = BigRational::from(poly.coeff(1));
    let a = &x.coords()[0];
    let b = &x.coords()[1];
    NfElement::new(x.field().clone(), vec![a - b * &c1, -b])
}

/// `|x|_v` in the normalization matching `vector_height`: one factor per
/// root, so a real place contributes the plain modulus and each complex
/// place (a conjugate root pair) effectively enters squared.
fn place_value(
    x: &NfElement,
    place: usize,
    field: &NumberField,
    prec: Prec,
) -> Result<RealInterval> {
    let work = prec + 64;
    let emb = x.embedding(place, prec)?;
    let roots = field.roots(prec)?;
    let is_real = roots[place].is_real();
    let m = emb.abs(work);
    if is_real { Ok(m) } else { Ok(m.sqr(work)) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::IntPolynomial;

    fn sqrt2_instance(eps: (i64, i64), s: usize) -> SUnitInstance {
        let field = NumberField::new(IntPolynomial::from_i64(&[-2, 0, 1])).unwrap();
        let unit = NfElement::generator(&field).add(&NfElement::one(&field)).unwrap(); // 1+sqrt2
        SUnitInstance {
            field: field.clone(),
            fundamental_units: vec![unit],
            coefficients: (0..s).map(|_| NfElement::one(&field)).collect(),
            place: 1, // the positive root sqrt2 ~ +1.414
            epsilon: BigRational::new(eps.0.into(), eps.1.into()),
        }
    }

    #[test]
    fn validation_rejects_non_units() {
        let field = NumberField::new(IntPolynomial::from_i64(&[-2, 0, 1])).unwrap();
        let mut inst = sqrt2_instance((1, 1), 2);
        inst.fundamental_units = vec![NfElement::from_int(&field, 2)];
        assert!(inst.validate(96).is_err());
    }

    #[test]
    fn degenerate_cancellation_detected() {
        // b_1 = 1, b_2 = 1, x_2 = -1: the full sum vanishes exactly
        let inst = sqrt2_instance((1, 1), 2);
        let out = sunit_solutions(&inst, 3, 1_000_000, 128).unwrap();
        let degenerate: Vec<_> =
            out.solutions.iter().filter(|s| s.is_degenerate()).collect();
        assert_eq!(degenerate.len(), 1);
        assert_eq!(degenerate[0].coordinates[0].sign, -1);
        assert!(degenerate[0].coordinates[0].exponents.iter().all(|&e| e == 0));
        // and it is excluded from the nondegenerate count
        assert_eq!(out.nondegenerate_count(), out.solutions.len() - 1);
    }

    #[test]
    fn counts_stabilize_below_box() {
        let inst = sqrt2_instance((1, 2), 3);
        let out = sunit_solutions(&inst, 12, 10_000_000, 128).unwrap();
        assert!(!out.partial);
        // stabilization: some radius after which the count stays constant
        let final_count = out.nondegenerate_count_within(12);
        let b0 = (0..=12)
            .find(|&b| (b..=12).all(|c| out.nondegenerate_count_within(c) == final_count)
                && out.nondegenerate_count_within(b) == final_count)
            .unwrap();
        assert!(b0 <= 12);
        // growing the box never loses solutions
        for b in 0..12 {
            assert!(out.nondegenerate_count_within(b) <= out.nondegenerate_count_within(b + 1));
        }
    }

    #[test]
    fn budget_yields_partial_flag() {
        let inst = sqrt2_instance((1, 1), 3);
        let out = sunit_solutions(&inst, 10, 50, 96).unwrap();
        assert!(out.partial);
        assert_eq!(out.scanned, 50);
    }

    #[test]
    fn single_coefficient_trivial_case() {
        // s = 1: |b_1|_v < 1 decides the empty solution
        let field = NumberField::new(IntPolynomial::from_i64(&[-2, 0, 1])).unwrap();
        let small = NfElement::generator(&field)
            .sub(&NfElement::one(&field))
            .unwrap(); // sqrt2 - 1 ~ 0.414 at place 1
        let inst = SUnitInstance {
            field: field.clone(),
            fundamental_units: vec![],
            coefficients: vec![small],
            place: 1,
            epsilon: BigRational::new(1.into(), 1.into()),
        };
        let out = sunit_solutions(&inst, 0, 10, 96).unwrap();
        assert_eq!(out.solutions.len(), 1);
        let inst2 = SUnitInstance {
            coefficients: vec![NfElement::from_int(&field, 3)],
            ..inst
        };
        assert_eq!(sunit_solutions(&inst2, 0, 10, 96).unwrap().solutions.len(), 0);
    }
}
