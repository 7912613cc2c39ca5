//! Certified complex root enclosures for integer polynomials.
//!
//! Real roots are isolated exactly by Sturm sequences over the rationals and
//! refined by interval Newton steps. Nonreal roots start from Durand-Kerner
//! approximations and are certified by a Krawczyk containment test in
//! rectangle arithmetic, which proves existence and uniqueness inside each
//! box. On failure the working precision doubles up to a configurable cap;
//! there is no silent widening.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use super::interval::{ComplexInterval, Prec, RealInterval};
use super::poly::IntPolynomial;
use crate::error::{Error, Result};

/// Precision-escalation policy for certification retries.
#[derive(Debug, Clone, Copy)]
pub struct RootConfig {
    /// Hard ceiling on working precision in bits.
    pub max_bits: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self { max_bits: 4096 }
    }
}

/// A root enclosure together with its multiplicity in the input polynomial.
#[derive(Debug, Clone)]
pub struct CertifiedRoot {
    pub value: ComplexInterval,
    pub multiplicity: usize,
}

impl CertifiedRoot {
    pub fn is_real(&self) -> bool {
        self.value.is_real()
    }
}

/// Sturm chain with sign-true primitive parts.
pub fn sturm_chain(p: &IntPolynomial) -> Vec<IntPolynomial> {
    let mut chain = vec![p.primitive(), p.derivative().primitive()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        if chain[n - 1].is_constant() {
            break;
        }
        let r = chain[n - 2].signed_pseudo_rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(r.primitive().neg());
    }
    chain
}

fn variations(signs: impl Iterator<Item = i32>) -> usize {
    let mut count = 0;
    let mut last = 0i32;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn variations_at(chain: &[IntPolynomial], x: &BigRational) -> usize {
    variations(chain.iter().map(|f| f.sign_at(x)))
}

/// Number of distinct real roots in the half-open interval `(a, b]`.
pub fn count_real_roots(chain: &[IntPolynomial], a: &BigRational, b: &BigRational) -> usize {
    variations_at(chain, a).saturating_sub(variations_at(chain, b))
}

/// Isolating intervals `(a, b]` for the real roots of a squarefree
/// polynomial; rational roots come out as point intervals `[r, r]`.
pub fn isolate_real_roots(p: &IntPolynomial) -> Vec<(BigRational, BigRational)> {
    assert!(!p.is_constant());
    let chain = sturm_chain(p);
    let bound = p.cauchy_root_bound() + BigRational::one();
    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((a, b)) = stack.pop() {
        let n = count_real_roots(&chain, &a, &b);
        if n == 0 {
            continue;
        }
        if n == 1 && p.sign_at(&b) != 0 {
            out.push((a, b));
            continue;
        }
        let mid = (&a + &b) / BigRational::from(BigInt::from(2));
        if p.sign_at(&mid) == 0 {
            out.push((mid.clone(), mid.clone()));
            // shave off an exclusion zone around the exact root
            let mut eps = (&b - &a) / BigRational::from(BigInt::from(16));
            loop {
                let lo = &mid - &eps;
                let hi = &mid + &eps;
                if p.sign_at(&lo) != 0
                    && p.sign_at(&hi) != 0
                    && count_real_roots(&chain, &lo, &hi) == 1
                {
                    stack.push((a, lo));
                    stack.push((hi, b));
                    break;
                }
                eps /= BigRational::from(BigInt::from(2));
            }
        } else {
            stack.push((a.clone(), mid.clone()));
            stack.push((mid, b));
        }
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// Interval-Newton refinement of an isolated simple real root down to width
/// `2^-target_bits`.
fn refine_real_root(
    p: &IntPolynomial,
    iso: &(BigRational, BigRational),
    target_bits: usize,
    work: Prec,
) -> Result<RealInterval> {
    if iso.0 == iso.1 {
        return Ok(RealInterval::from_rational(&iso.0, work));
    }
    let dp = p.derivative();
    // rational bisection to a comfortable Newton basin
    let (mut a, mut b) = iso.clone();
    let sa = p.sign_at(&a);
    let sa = if sa == 0 { -p.sign_at(&b) } else { sa };
    for _ in 0..64 {
        let width = &b - &a;
        if width < BigRational::new(BigInt::one(), BigInt::from(1u64 << 40)) {
            break;
        }
        let mid = (&a + &b) / BigRational::from(BigInt::from(2));
        let sm = p.sign_at(&mid);
        if sm == 0 {
            return Ok(RealInterval::from_rational(&mid, work));
        }
        if sm == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
    let mut x = RealInterval::new(
        RealInterval::from_rational(&a, work).lo().clone(),
        RealInterval::from_rational(&b, work).hi().clone(),
    );
    for _ in 0..work.max(64) {
        if x.width_below(target_bits as i32, work) {
            return Ok(x);
        }
        let m = RealInterval::point(x.mid(work));
        let pm = p.eval_interval(&m, work);
        let d = dp.eval_interval(&x, work);
        if d.contains_zero() {
            return Err(Error::precision("derivative enclosure straddles zero during refinement"));
        }
        let n = m.sub(&pm.div(&d, work)?, work);
        match x.intersect(&n) {
            Some(next) => x = next,
            None => return Err(Error::precision("interval Newton lost the root")),
        }
    }
    Err(Error::precision("real refinement did not converge"))
}

// ---- plain f64 Durand-Kerner for starting approximations ----

fn dk_roots_f64(p: &IntPolynomial) -> Vec<(f64, f64)> {
    let n = p.degree();
    let lead = big_to_f64(&p.leading());
    let coeffs: Vec<f64> = (0..=n).map(|i| big_to_f64(&p.coeff(i)) / lead).collect();
    let eval = |z: (f64, f64)| -> (f64, f64) {
        let mut acc = (0.0f64, 0.0f64);
        for c in coeffs.iter().rev() {
            acc = cmul(acc, z);
            acc.0 += c;
        }
        acc
    };
    let bound = 1.0 + coeffs[..n].iter().map(|c| c.abs()).fold(0.0f64, f64::max);
    let mut xs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.41;
            let r = bound.min(1e12) * 0.7;
            (r * ang.cos(), r * ang.sin())
        })
        .collect();
    for _ in 0..400 {
        let mut max_move = 0.0f64;
        for i in 0..n {
            let mut denom = (1.0f64, 0.0f64);
            for j in 0..n {
                if i != j {
                    denom = cmul(denom, csub(xs[i], xs[j]));
                }
            }
            if denom.0 == 0.0 && denom.1 == 0.0 {
                denom = (1e-300, 0.0);
            }
            let delta = cdiv(eval(xs[i]), denom);
            xs[i] = csub(xs[i], delta);
            max_move = max_move.max(cabs(delta));
        }
        if max_move < 1e-14 {
            break;
        }
    }
    xs
}

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}
fn csub(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 - b.0, a.1 - b.1)
}
fn cdiv(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}
fn cabs(a: (f64, f64)) -> f64 {
    (a.0 * a.0 + a.1 * a.1).sqrt()
}

fn big_to_f64(v: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::MAX)
}

/// Krawczyk containment step: `Some(K)` with `K` strictly inside `x` proves a
/// unique simple root in `x`.
fn krawczyk(p: &IntPolynomial, dp: &IntPolynomial, x: &ComplexInterval, work: Prec) -> Result<ComplexInterval> {
    let (mr, mi) = x.mid(work);
    let m = ComplexInterval::new(RealInterval::point(mr), RealInterval::point(mi));
    let pm = p.eval_complex(&m, work);
    let dpm = dp.eval_complex(&m, work);
    if dpm.contains_zero() {
        return Err(Error::precision("derivative vanishes at midpoint enclosure"));
    }
    let c = ComplexInterval::one().div(&dpm, work)?;
    let dpx = dp.eval_complex(x, work);
    let one_minus = ComplexInterval::one().sub(&c.mul(&dpx, work), work);
    let xm = x.sub(&m, work);
    Ok(m.sub(&c.mul(&pm, work), work).add(&one_minus.mul(&xm, work), work))
}

fn certify_complex_root(
    p: &IntPolynomial,
    approx: (f64, f64),
    radius: f64,
    target_bits: usize,
    work: Prec,
) -> Result<ComplexInterval> {
    use astro_float::BigFloat;
    let dp = p.derivative();
    let mut r = radius.max(1e-14);
    let mut certified: Option<ComplexInterval> = None;
    for _ in 0..8 {
        let x = ComplexInterval::new(
            RealInterval::new(BigFloat::from_f64(approx.0 - r, work), BigFloat::from_f64(approx.0 + r, work)),
            RealInterval::new(BigFloat::from_f64(approx.1 - r, work), BigFloat::from_f64(approx.1 + r, work)),
        );
        if let Ok(k) = krawczyk(p, &dp, &x, work) {
            if x.contains_interior(&k) {
                certified = Some(k.intersect(&x).unwrap_or(k));
                break;
            }
        }
        r *= 0.25;
    }
    let mut x = certified.ok_or_else(|| Error::precision("Krawczyk containment failed"))?;
    for _ in 0..work.max(64) {
        if x.width_below(target_bits as i32, work) {
            return Ok(x);
        }
        let k = krawczyk(p, &dp, &x, work)?;
        match x.intersect(&k) {
            Some(next) => x = next,
            None => return Err(Error::precision("Krawczyk iteration lost the root")),
        }
    }
    Err(Error::precision("complex refinement did not converge"))
}

/// Certified enclosures of the roots of a squarefree polynomial at working
/// precision `work`, each of width below `2^-target_bits`.
fn roots_squarefree(p: &IntPolynomial, target_bits: usize, work: Prec) -> Result<Vec<ComplexInterval>> {
    let n = p.degree();
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        let r = BigRational::new(-p.coeff(0), p.coeff(1));
        return Ok(vec![ComplexInterval::from_real(RealInterval::from_rational(&r, work))]);
    }
    let iso = isolate_real_roots(p);
    let mut out: Vec<ComplexInterval> = Vec::with_capacity(n);
    for r in &iso {
        out.push(ComplexInterval::from_real(refine_real_root(p, r, target_bits, work)?));
    }
    let n_real = iso.len();
    let n_pairs = (n - n_real) / 2;
    if n_real + 2 * n_pairs != n {
        return Err(Error::precision("real/complex root count mismatch"));
    }
    if n_pairs > 0 {
        let approx = dk_roots_f64(p);
        // nonreal approximations with positive imaginary part
        let mut upper: Vec<(f64, f64)> = approx.iter().copied().filter(|z| z.1 > 1e-9).collect();
        upper.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.partial_cmp(&b.1).unwrap()));
        if upper.len() != n_pairs {
            return Err(Error::precision("Durand-Kerner did not separate conjugate pairs"));
        }
        let min_gap = |z: (f64, f64)| -> f64 {
            let mut g = f64::MAX;
            for w in &approx {
                let d = cabs(csub(z, *w));
                if d > 1e-13 {
                    g = g.min(d);
                }
            }
            for r in &iso {
                use num_traits::ToPrimitive;
                let rv = ((r.0.numer().to_f64().unwrap_or(0.0) / r.0.denom().to_f64().unwrap_or(1.0))
                    + (r.1.numer().to_f64().unwrap_or(0.0) / r.1.denom().to_f64().unwrap_or(1.0)))
                    / 2.0;
                g = g.min(cabs(csub(z, (rv, 0.0))));
            }
            if g == f64::MAX { 1.0 } else { g }
        };
        for z in upper {
            let enc = certify_complex_root(p, z, min_gap(z) / 8.0, target_bits, work)?;
            if !enc.im.is_positive() {
                return Err(Error::precision("complex enclosure touches the real axis"));
            }
            out.push(enc.conj());
            out.push(enc);
        }
    }
    // pairwise disjointness is the isolation certificate
    for i in 0..out.len() {
        for j in i + 1..out.len() {
            if out[i].intersects(&out[j]) {
                return Err(Error::precision("root enclosures overlap"));
            }
        }
    }
    Ok(out)
}

fn canonical_sort(roots: &mut [(ComplexInterval, usize)]) -> bool {
    // real roots first (ascending), then nonreal grouped by real part
    // (ascending), ties broken by imaginary part; returns false when the
    // current enclosures cannot decide an order.
    let decided = |a: &ComplexInterval, b: &ComplexInterval| -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        match (a.is_real(), b.is_real()) {
            (true, false) => return Some(Less),
            (false, true) => return Some(Greater),
            _ => {}
        }
        if let Some(true) = a.re.lt(&b.re) {
            return Some(Less);
        }
        if let Some(true) = b.re.lt(&a.re) {
            return Some(Greater);
        }
        if a.re.intersects(&b.re) {
            if let Some(true) = a.im.lt(&b.im) {
                return Some(Less);
            }
            if let Some(true) = b.im.lt(&a.im) {
                return Some(Greater);
            }
            return None;
        }
        None
    };
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if decided(&roots[i].0, &roots[j].0).is_none() {
                return false;
            }
        }
    }
    // insertion sort: stays deterministic even if wide enclosures make the
    // pairwise relation intransitive (no total-order panic path)
    for i in 1..roots.len() {
        let mut j = i;
        while j > 0 && decided(&roots[j - 1].0, &roots[j].0) == Some(std::cmp::Ordering::Greater) {
            roots.swap(j - 1, j);
            j -= 1;
        }
    }
    true
}

/// Certified, pairwise-disjoint enclosures for all roots of `p` with
/// multiplicities, each of radius at most `2^-prec`.
pub fn certified_roots_cfg(p: &IntPolynomial, prec: Prec, cfg: RootConfig) -> Result<Vec<CertifiedRoot>> {
    if p.is_constant() {
        return Err(Error::validation("roots of a constant polynomial"));
    }
    let target_bits = prec.max(8);
    let mut work = (target_bits + 96).max(160);
    let mut last_err = None;
    while work <= cfg.max_bits {
        match try_roots(p, target_bits, work) {
            Ok(v) => return Ok(v),
            Err(e) => last_err = Some(e),
        }
        work *= 2;
    }
    Err(last_err.unwrap_or_else(|| Error::precision("root certification cap reached")))
}

fn try_roots(p: &IntPolynomial, target_bits: usize, work: Prec) -> Result<Vec<CertifiedRoot>> {
    let mut all: Vec<(ComplexInterval, usize)> = Vec::new();
    for (factor, mult) in p.squarefree_decomposition() {
        for enc in roots_squarefree(&factor, target_bits, work)? {
            all.push((enc, mult));
        }
    }
    // distinct roots of distinct squarefree factors: isolation across factors
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if all[i].1 != all[j].1 && all[i].0.intersects(&all[j].0) {
                return Err(Error::precision("enclosures from different factors overlap"));
            }
        }
    }
    if !canonical_sort(&mut all) {
        return Err(Error::precision("canonical root order undecided"));
    }
    Ok(all.into_iter().map(|(value, multiplicity)| CertifiedRoot { value, multiplicity }).collect())
}

pub fn certified_roots(p: &IntPolynomial, prec: Prec) -> Result<Vec<CertifiedRoot>> {
    certified_roots_cfg(p, prec, RootConfig::default())
}

/// Real roots of `p` inside `[lo, hi]` (used on the `x + 1/x` reductions).
pub fn real_roots_in_range(
    p: &IntPolynomial,
    lo: &BigRational,
    hi: &BigRational,
    prec: Prec,
) -> Result<Vec<RealInterval>> {
    let sf = p.squarefree_part();
    let work = (prec + 96).max(160);
    let mut out = Vec::new();
    for iso in isolate_real_roots(&sf) {
        if &iso.1 < lo || &iso.0 > hi {
            continue;
        }
        let enc = refine_real_root(&sf, &iso, prec, work)?;
        let lo_iv = RealInterval::from_rational(lo, work);
        let hi_iv = RealInterval::from_rational(hi, work);
        if enc.lt(&lo_iv) == Some(true) || enc.gt(&hi_iv) == Some(true) {
            continue;
        }
        out.push(enc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::interval::bigint_to_bigfloat;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn golden_ratio_like_roots() {
        // x^2 - 3x + 1: roots (3 +- sqrt5)/2, certified to 1e-9
        let roots = certified_roots(&p(&[1, -3, 1]), 40).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| r.is_real() && r.multiplicity == 1));
        let vals: Vec<f64> = roots.iter().map(|r| r.value.re.to_f64()).collect();
        assert!((vals[0] - 0.3819660113).abs() < 1e-9);
        assert!((vals[1] - 2.6180339887).abs() < 1e-9);
        // oracle: sqrt(5) via interval sqrt, root = (3+sqrt5)/2
        let work = 160;
        let s5 = RealInterval::from_i64(5).sqrt(work).unwrap();
        let upper = RealInterval::from_i64(3)
            .add(&s5, work)
            .div(&RealInterval::from_i64(2), work)
            .unwrap();
        assert!(upper.intersects(&roots[1].value.re));
    }

    #[test]
    fn linear_is_exact() {
        let roots = certified_roots(&p(&[-2, 1]), 64).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(roots[0].value.re.contains(&bigint_to_bigfloat(&BigInt::from(2))));
        assert!(roots[0].value.re.width_below(64, 160));
    }

    #[test]
    fn pure_imaginary_pair() {
        let roots = certified_roots(&p(&[1, 0, 1]), 40).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| !r.is_real()));
        let ims: Vec<f64> = roots.iter().map(|r| r.value.im.to_f64()).collect();
        assert!((ims[0] + 1.0).abs() < 1e-9);
        assert!((ims[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn multiplicities_via_yun() {
        // (x-1)^2 (x^2+1)
        let f = p(&[-1, 1]).mul(&p(&[-1, 1])).mul(&p(&[1, 0, 1]));
        let roots = certified_roots(&f, 40).unwrap();
        assert_eq!(roots.len(), 3);
        let real = roots.iter().find(|r| r.is_real()).unwrap();
        assert_eq!(real.multiplicity, 2);
        assert!(roots.iter().filter(|r| !r.is_real()).all(|r| r.multiplicity == 1));
    }

    #[test]
    fn product_of_enclosures_contains_constant_term() {
        // |prod roots| = |c_0 / c_n|
        let f = p(&[7, -2, -5, 1]);
        let roots = certified_roots(&f, 60).unwrap();
        let work = 256;
        let mut prod = RealInterval::one();
        for r in &roots {
            prod = prod.mul(&r.value.abs(work), work);
        }
        assert!(prod.contains(&bigint_to_bigfloat(&BigInt::from(7))));
    }

    #[test]
    fn high_precision_refinement() {
        let roots = certified_roots(&p(&[1, -3, 1]), 700).unwrap();
        assert!(roots[0].value.re.width_below(700, 1024));
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert!(certified_roots(&IntPolynomial::constant(BigInt::from(3)), 30).is_err());
    }
}
