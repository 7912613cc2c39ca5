//! Exact multi-correlation of trigonometric polynomials under a `Z^l`-action.
//!
//! The integral of a product `prod f_i(alpha(z_i) x)` picks out exactly the
//! frequency tuples `(a_0..a_s)` with `sum_i alpha(z_i)^T a_i = 0`; the
//! correlation is the exact rational sum of coefficient products over the
//! matching tuples, plus a certified radius collecting the tail
//! contributions. Enumeration is meet-in-the-middle over tuple halves hashed
//! by partial lattice sums, parallelized over the second half.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use super::separation::{separation_stats, SeparationStats};
use super::{apply_to_i128, CRational, TrigPolynomial};
use crate::error::{Error, Result};
use crate::exact::{IntMatrix, Prec};
use crate::spectrum::ZlAction;

#[derive(Debug, Clone)]
pub struct CorrelationBudget {
    /// Cap on the sum of the two half-product enumeration sizes.
    pub max_tuples: u64,
    /// Also compute the separation statistics of the query (needs the
    /// spectrum; off by default).
    pub compute_separation: bool,
    pub prec: Prec,
}

impl Default for CorrelationBudget {
    fn default() -> Self {
        Self { max_tuples: 100_000_000, compute_separation: false, prec: 128 }
    }
}

#[derive(Debug, Clone)]
pub struct CorrelationResult {
    /// Exact value of the finite part.
    pub value: CRational,
    /// Certified radius: the tail contribution bound
    /// `sum_i tail_i prod_{j != i} (l1_j + tail_j)`.
    pub radius: BigRational,
    /// Number of frequency tuples satisfying the lattice identity.
    pub matched_tuples: u64,
    pub separation: Option<SeparationStats>,
}

impl CorrelationResult {
    /// Exact product of the integrals of the factors.
    pub fn is_exactly_zero(&self) -> bool {
        self.value.is_zero()
    }
}

/// Exact product of means of a function list.
pub fn product_of_means(f_list: &[TrigPolynomial]) -> CRational {
    let mut acc = CRational::one();
    for f in f_list {
        acc = acc.mul(&f.mean());
    }
    acc
}

pub fn multi_correlation(
    f_list: &[TrigPolynomial],
    z_list: &[Vec<i64>],
    action: &ZlAction,
    budget: &CorrelationBudget,
) -> Result<CorrelationResult> {
    if f_list.len() != z_list.len() || f_list.len() < 2 {
        return Err(Error::validation(
            "need s+1 >= 2 functions with one exponent vector each",
        ));
    }
    let d = action.dim();
    if f_list.iter().any(|f| f.dim() != d) {
        return Err(Error::validation("function dimension differs from the action"));
    }
    // transposed automorphisms acting on frequencies
    let mats: Vec<IntMatrix> =
        z_list.iter().map(|z| action.element(z).map(|m| m.transpose())).collect::<Result<_>>()?;

    // contiguous split minimizing the larger half product
    let n = f_list.len();
    let sizes: Vec<u128> = f_list.iter().map(|f| f.support_size().max(1) as u128).collect();
    let mut best_split = 1usize;
    let mut best_cost = u128::MAX;
    for k in 1..n {
        let pa: u128 = sizes[..k].iter().product();
        let pb: u128 = sizes[k..].iter().product();
        let cost = pa.saturating_add(pb);
        if cost < best_cost {
            best_cost = cost;
            best_split = k;
        }
    }
    if best_cost > budget.max_tuples as u128 {
        return Err(Error::budget(format!(
            "support product {} exceeds the enumeration budget {}",
            best_cost, budget.max_tuples
        )));
    }
    let (half_a, half_b) = f_list.split_at(best_split);
    let (mats_a, mats_b) = mats.split_at(best_split);

    // half A: hash of partial sums
    let mut table: HashMap<Vec<i128>, (CRational, u64)> = HashMap::new();
    let supports_a: Vec<Vec<(&Vec<i64>, &CRational)>> =
        half_a.iter().map(|f| f.coeffs().iter().collect()).collect();
    if supports_a.iter().all(|s| !s.is_empty()) {
        let mut idx = vec![0usize; half_a.len()];
        loop {
            let mut key = vec![0i128; d];
            let mut coeff = CRational::one();
            for (i, &j) in idx.iter().enumerate() {
                let (freq, c) = supports_a[i][j];
                let moved = apply_to_i128(&mats_a[i], freq)?;
                for (k, m) in key.iter_mut().zip(&moved) {
                    *k = k
                        .checked_add(*m)
                        .ok_or_else(|| Error::budget("frequency overflow in partial sums"))?;
                }
                coeff = coeff.mul(c);
            }
            let entry = table.entry(key).or_insert_with(|| (CRational::zero(), 0));
            entry.0 = entry.0.add(&coeff);
            entry.1 += 1;
            // odometer
            let mut i = 0;
            loop {
                if i == idx.len() {
                    break;
                }
                idx[i] += 1;
                if idx[i] < supports_a[i].len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == idx.len() {
                break;
            }
        }
    }

    // half B in parallel over the first factor's support
    let supports_b: Vec<Vec<(&Vec<i64>, &CRational)>> =
        half_b.iter().map(|f| f.coeffs().iter().collect()).collect();
    let empty_b = supports_b.iter().any(|s| s.is_empty());
    let (value, matched) = if empty_b {
        (CRational::zero(), 0u64)
    } else {
        supports_b[0]
            .par_iter()
            .map(|&(freq0, c0)| {
                let mut value = CRational::zero();
                let mut matched = 0u64;
                let first = apply_to_i128(&mats_b[0], freq0)?;
                let rest = &supports_b[1..];
                let mut idx = vec![0usize; rest.len()];
                loop {
                    let mut key = first.clone();
                    let mut coeff = c0.clone();
                    for (i, &j) in idx.iter().enumerate() {
                        let (freq, c) = rest[i][j];
                        let moved = apply_to_i128(&mats_b[i + 1], freq)?;
                        for (k, m) in key.iter_mut().zip(&moved) {
                            *k = k
                                .checked_add(*m)
                                .ok_or_else(|| Error::budget("frequency overflow"))?;
                        }
                        coeff = coeff.mul(c);
                    }
                    // the lattice identity: sum over half A equals the
                    // negated half-B partial sum
                    let neg: Vec<i128> = key.iter().map(|&v| -v).collect();
                    if let Some((ca, count)) = table.get(&neg) {
                        value = value.add(&ca.mul(&coeff));
                        matched += count;
                    }
                    let mut i = 0;
                    loop {
                        if i == idx.len() {
                            break;
                        }
                        idx[i] += 1;
                        if idx[i] < rest[i].len() {
                            break;
                        }
                        idx[i] = 0;
                        i += 1;
                    }
                    if i == idx.len() {
                        break;
                    }
                }
                Ok((value, matched))
            })
            .try_reduce(
                || (CRational::zero(), 0u64),
                |a, b| Ok((a.0.add(&b.0), a.1 + b.1)),
            )?
    };

    // certified tail radius
    let mut radius = BigRational::zero();
    for i in 0..n {
        if f_list[i].tail_bound().is_zero() {
            continue;
        }
        let mut prod = f_list[i].tail_bound().clone();
        for (j, f) in f_list.iter().enumerate() {
            if j != i {
                prod *= f.l1_upper() + f.tail_bound();
            }
        }
        radius += prod;
    }

    let separation = if budget.compute_separation {
        let distinct = z_list
            .iter()
            .enumerate()
            .all(|(i, a)| z_list.iter().skip(i + 1).all(|b| a != b));
        if distinct {
            Some(separation_stats(action, z_list, budget.prec)?)
        } else {
            None
        }
    } else {
        None
    };

    Ok(CorrelationResult { value, radius, matched_tuples: matched, separation })
}
