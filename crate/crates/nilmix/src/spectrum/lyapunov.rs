//! The Lyapunov functional of a Galois orbit and its growth constant.
//!
//! For an orbit `X0` the functional is `l(z) = (log |chi(z)| : chi in X0)`,
//! linear in `z`. The growth constant is
//!
//! ```text
//! c = min over the sup-norm unit sphere of  max_chi l_chi(z),
//! ```
//!
//! computed facet by facet: the sphere is the union of the `2l` cube facets,
//! and on each facet the min-max of linear forms is a small linear program.
//! The implementation finds an approximate optimum and dual multipliers in
//! floating point, then certifies both sides with interval arithmetic: any
//! simplex weight vector gives a rigorous lower bound through the weighted
//! average, and any feasible point gives a rigorous upper bound. The result
//! is a certified enclosure, never a bare float.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::GaloisOrbit;
use crate::error::{Error, Result};
use crate::exact::{Prec, RealInterval};

/// Certified `log |chi(z)|` for every orbit member, as the linear form
/// `sum_i z_i log |chi(e_i)|` so that interval additivity in `z` holds by
/// construction.
pub fn lyapunov_map(orbit: &GaloisOrbit, z: &[i64], prec: Prec) -> Result<Vec<RealInterval>> {
    let logs = orbit_log_matrix(orbit, prec)?;
    // enough headroom that integer-by-interval products and the short sum
    // are exact, so additivity inclusions hold at the endpoint level
    let w = prec + 160;
    Ok(logs
        .iter()
        .map(|row| {
            let mut acc = RealInterval::zero();
            for (l, &e) in row.iter().zip(z) {
                if e != 0 {
                    acc = acc.add(&l.mul(&RealInterval::from_i64(e), w), w);
                }
            }
            acc
        })
        .collect())
}

/// Rows = orbit members, columns = generators: certified
/// `log |chi(e_i)|` entries. Escalates precision internally while a modulus
/// enclosure touches zero (character values are units, so this terminates).
pub fn orbit_log_matrix(orbit: &GaloisOrbit, prec: Prec) -> Result<Vec<Vec<RealInterval>>> {
    let cap = crate::exact::RootConfig::default().max_bits;
    let mut p = prec.max(64);
    loop {
        match try_log_matrix(orbit, p) {
            Ok(m) => return Ok(m),
            Err(e) => {
                p *= 2;
                if p > cap {
                    return Err(e);
                }
            }
        }
    }
}

fn try_log_matrix(orbit: &GaloisOrbit, prec: Prec) -> Result<Vec<Vec<RealInterval>>> {
    let mut rows = Vec::with_capacity(orbit.size());
    for member in orbit.members() {
        let mut row = Vec::with_capacity(member.rank());
        for v in member.values() {
            let m = v.embedding(member.embedding_index(), prec)?.abs(prec + 32);
            row.push(m.ln(prec + 32)?);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Certified growth constant of an orbit.
#[derive(Debug, Clone)]
pub struct Lemma21Constant {
    /// Enclosure of `min_sphere max_chi l_chi`.
    pub enclosure: RealInterval,
    /// Per-facet enclosures `(fixed coordinate, sign, enclosure)`.
    pub facets: Vec<(usize, i8, RealInterval)>,
}

/// The sup-norm growth constant of Lemma-2.1 type: certified positive, or an
/// error when the enclosure touches zero (non-ergodic input or insufficient
/// precision).
pub fn lemma21_constant(orbit: &GaloisOrbit, prec: Prec) -> Result<Lemma21Constant> {
    let logs = orbit_log_matrix(orbit, prec)?;
    let l = orbit.rank();
    let work = prec + 32;
    let mid: Vec<Vec<f64>> = logs.iter().map(|r| r.iter().map(|iv| iv.to_f64()).collect()).collect();
    let mut facets = Vec::with_capacity(2 * l);
    let mut best: Option<RealInterval> = None;
    for k in 0..l {
        for sign in [1i8, -1i8] {
            let enc = facet_enclosure(&logs, &mid, k, sign, work)?;
            best = Some(match best {
                None => enc.clone(),
                Some(b) => b.min(&enc),
            });
            facets.push((k, sign, enc));
        }
    }
    let enclosure = best.expect("at least one facet");
    if !enclosure.is_positive() {
        return Err(Error::precision(format!(
            "growth-constant enclosure {} touches zero (non-ergodic orbit or insufficient precision)",
            enclosure
        )));
    }
    Ok(Lemma21Constant { enclosure, facets })
}

/// Enclosure of `min {max_chi l_chi(z) : z_k = sign, |z_j| <= 1}`.
fn facet_enclosure(
    logs: &[Vec<RealInterval>],
    mid: &[Vec<f64>],
    k: usize,
    sign: i8,
    work: Prec,
) -> Result<RealInterval> {
    let l = logs[0].len();
    let free: Vec<usize> = (0..l).filter(|&j| j != k).collect();
    // approximate minimizer over the facet in f64
    let zstar = facet_minimizer_f64(mid, k, sign, &free);
    // approximate dual multipliers maximizing the weighted-average bound
    let lambda = dual_multipliers_f64(mid, k, sign, &free);

    // rigorous upper bound: evaluate the max at the rationalized minimizer
    let zq: Vec<BigRational> = zstar.iter().map(|&v| clamp_unit(rationalize(v))).collect();
    let mut upper: Option<RealInterval> = None;
    for row in logs {
        let mut acc = RealInterval::zero();
        for (j, iv) in row.iter().enumerate() {
            let c = RealInterval::from_rational(&zq[j], work);
            acc = acc.add(&iv.mul(&c, work), work);
        }
        upper = Some(match upper {
            None => acc,
            Some(u) => u.max(&acc),
        });
    }
    let upper = upper.expect("nonempty orbit");

    // rigorous lower bound: weighted average, minimized over the facet box
    let lam_q = simplex_rationalize(&lambda);
    let mut avg: Vec<RealInterval> = vec![RealInterval::zero(); l];
    for (row, lq) in logs.iter().zip(&lam_q) {
        if lq.is_zero() {
            continue;
        }
        let w = RealInterval::from_rational(lq, work);
        for (j, iv) in row.iter().enumerate() {
            avg[j] = avg[j].add(&iv.mul(&w, work), work);
        }
    }
    let mut lower = avg[k].mul(&RealInterval::from_i64(sign as i64), work);
    for &j in &free {
        lower = lower.sub(&avg[j].abs(), work);
    }

    let crossed = RealInterval::point(lower.lo().clone())
        .gt(&RealInterval::point(upper.hi().clone()))
        == Some(true);
    // a crossed pair means the dual step was numerically poor; keep validity
    let lo = if crossed { upper.lo().clone() } else { lower.lo().clone() };
    Ok(RealInterval::new(lo, upper.hi().clone()))
}

fn facet_minimizer_f64(mid: &[Vec<f64>], k: usize, sign: i8, free: &[usize]) -> Vec<f64> {
    let l = mid[0].len();
    let eval = |z: &[f64]| -> f64 {
        mid.iter()
            .map(|row| row.iter().zip(z).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut z = vec![0.0f64; l];
    z[k] = sign as f64;
    match free.len() {
        0 => z,
        1 => {
            let j = free[0];
            let mut cands = vec![-1.0f64, 1.0];
            for a in 0..mid.len() {
                for b in a + 1..mid.len() {
                    let denom = mid[a][j] - mid[b][j];
                    if denom.abs() > 1e-300 {
                        let t = (mid[b][k] - mid[a][k]) * (sign as f64) / denom;
                        if t > -1.0 && t < 1.0 {
                            cands.push(t);
                        }
                    }
                }
            }
            let mut best = (f64::INFINITY, 0.0f64);
            for t in cands {
                z[j] = t;
                let v = eval(&z);
                if v < best.0 {
                    best = (v, t);
                }
            }
            z[j] = best.1;
            z
        }
        _ => {
            // coarse-to-fine grid over the free coordinates
            let mut center: Vec<f64> = free.iter().map(|_| 0.0).collect();
            let mut half = 1.0f64;
            for _round in 0..8 {
                let steps = 16usize;
                let mut best = (f64::INFINITY, center.clone());
                let mut idx = vec![0usize; free.len()];
                loop {
                    for (d, &_j) in free.iter().enumerate() {
                        let t = center[d] - half + 2.0 * half * (idx[d] as f64) / (steps as f64);
                        z[free[d]] = t.clamp(-1.0, 1.0);
                    }
                    let v = eval(&z);
                    if v < best.0 {
                        best = (v, free.iter().map(|&j| z[j]).collect());
                    }
                    // odometer
                    let mut d = 0;
                    loop {
                        if d == free.len() {
                            break;
                        }
                        idx[d] += 1;
                        if idx[d] <= steps {
                            break;
                        }
                        idx[d] = 0;
                        d += 1;
                    }
                    if d == free.len() {
                        break;
                    }
                }
                center = best.1;
                half /= 4.0;
            }
            for (d, &j) in free.iter().enumerate() {
                z[j] = center[d].clamp(-1.0, 1.0);
            }
            z
        }
    }
}

/// Projected subgradient ascent for the concave dual bound
/// `phi(lambda) = sign * <lambda, L_k> - sum_j |<lambda, L_j>|`.
fn dual_multipliers_f64(mid: &[Vec<f64>], k: usize, sign: i8, free: &[usize]) -> Vec<f64> {
    let m = mid.len();
    let phi = |lam: &[f64]| -> f64 {
        let dot = |j: usize| -> f64 { lam.iter().zip(mid).map(|(w, row)| w * row[j]).sum() };
        let mut v = (sign as f64) * dot(k);
        for &j in free {
            v -= dot(j).abs();
        }
        v
    };
    let mut lam = vec![1.0 / m as f64; m];
    let mut best = (phi(&lam), lam.clone());
    for t in 1..=4000usize {
        let dot = |l: &[f64], j: usize| -> f64 { l.iter().zip(mid).map(|(w, row)| w * row[j]).sum() };
        let mut grad: Vec<f64> = mid.iter().map(|row| (sign as f64) * row[k]).collect();
        for &j in free {
            let s = dot(&lam, j).signum();
            for (g, row) in grad.iter_mut().zip(mid) {
                *g -= s * row[j];
            }
        }
        let step = 0.5 / (t as f64).sqrt();
        for (w, g) in lam.iter_mut().zip(&grad) {
            *w += step * g;
        }
        lam = project_simplex(&lam);
        let v = phi(&lam);
        if v > best.0 {
            best = (v, lam.clone());
        }
    }
    best.1
}

fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut acc = 0.0;
    let mut theta = u[0] - 1.0;
    for (i, &ui) in u.iter().enumerate() {
        acc += ui;
        let t = (acc - 1.0) / (i as f64 + 1.0);
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

fn rationalize(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap_or_else(BigRational::zero)
}

fn clamp_unit(q: BigRational) -> BigRational {
    let one = BigRational::one();
    if q > one {
        one
    } else if q < -&one {
        -one
    } else {
        q
    }
}

/// Clip to nonnegative and normalize to sum 1, exactly.
fn simplex_rationalize(lam: &[f64]) -> Vec<BigRational> {
    let mut qs: Vec<BigRational> = lam
        .iter()
        .map(|&v| {
            let q = rationalize(v);
            if q.is_negative() { BigRational::zero() } else { q }
        })
        .collect();
    let total: BigRational = qs.iter().fold(BigRational::zero(), |a, b| a + b);
    if total.is_zero() {
        let n = BigRational::from(BigInt::from(qs.len() as i64));
        return qs.iter().map(|_| BigRational::one() / &n).collect();
    }
    for q in &mut qs {
        *q = &*q / &total;
    }
    qs
}

/// Desk-scale verification of the growth inequality: for every `z` with
/// `0 < |z|_inf <= radius`, the certified upper end of `max_chi l_chi(z)`
/// must not fall below `c_lo * |z|_inf` (a violation would certify failure).
/// Returns the number of lattice points checked.
pub fn verify_growth_inequality(
    orbit: &GaloisOrbit,
    c_lo: &RealInterval,
    radius: i64,
    prec: Prec,
) -> Result<usize> {
    let l = orbit.rank();
    let work = prec + 32;
    let mut checked = 0usize;
    let mut z = vec![-radius; l];
    loop {
        let norm = z.iter().map(|v| v.abs()).max().unwrap_or(0);
        if norm != 0 {
            let vals = lyapunov_map(orbit, &z, prec)?;
            let mut max_iv = vals[0].clone();
            for v in &vals[1..] {
                max_iv = max_iv.max(v);
            }
            let rhs = c_lo.mul(&RealInterval::from_i64(norm), work);
            if max_iv.lt(&rhs) == Some(true) {
                return Err(Error::falsification(format!(
                    "growth inequality fails at z = {:?}: max l = {} < c*|z| = {}",
                    z, max_iv, rhs
                )));
            }
            checked += 1;
        }
        // odometer over the box
        let mut i = 0;
        loop {
            if i == l {
                return Ok(checked);
            }
            z[i] += 1;
            if z[i] <= radius {
                break;
            }
            z[i] = -radius;
            i += 1;
        }
    }
}
