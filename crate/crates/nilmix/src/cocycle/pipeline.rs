//! The rank-2 rigidity pipeline: from a validated cocycle to its constant
//! part and transfer function, with every intermediate identity checked
//! exactly.
//!
//! Steps: subtract means; verify the telescoping identity
//! `sum_{i=-n}^n (f o a^i b^j - f o a^i) = h o a^(n+1) - h o a^(-n)` with
//! `h = c(b^j, .)`; demonstrate the higher-rank finiteness of
//! `sum_{i,j} <f o a^i b^j, f>` inside a certified growth-constant box;
//! compute the variance obstruction (zero is the rigidity prediction; a
//! nonzero value on a validated cocycle is a falsification event); solve the
//! coboundary for the first generator; and check that the second generator's
//! residual vanishes exactly.

use num_rational::BigRational;
use num_traits::Zero;

use super::solve::{coboundary_solve, sigma_squared, CoboundaryOutcome};
use super::TorusCocycle;
use crate::error::{Error, Result};
use crate::exact::matrix::{FieldMat, RationalField};
use crate::exact::{Prec, RealInterval, UnimodularMatrix};
use crate::spectrum::{galois_orbits, lemma21_constant, simultaneous_spectrum, ZlAction};
use crate::toral::{apply_i64, CRational, TrigPolynomial};

#[derive(Debug, Clone)]
pub struct RigidityConfig {
    /// Telescoping identity verified for `(n, j)` in this inclusive range.
    pub telescope_range: (i64, i64),
    pub prec: Prec,
}

impl Default for RigidityConfig {
    fn default() -> Self {
        Self { telescope_range: (1, 3), prec: 128 }
    }
}

#[derive(Debug)]
pub struct RigidityReport {
    /// The homomorphism part: generator means.
    pub constants: (BigRational, BigRational),
    /// The transfer function, when the pipeline completes.
    pub transfer: Option<TrigPolynomial>,
    /// `sigma^2` of the zero-mean first-generator value (exact).
    pub sigma_sq: BigRational,
    /// Telescoping identities checked, as `(n, j)` pairs.
    pub telescoping_checked: Vec<(i64, i64)>,
    /// The higher-rank correlation sum over the certified box, its nonzero
    /// term count, and the box radius.
    pub trick_sum: BigRational,
    pub trick_nonzero_terms: usize,
    pub trick_box_radius: i64,
    /// A falsification message when a verified identity failed; the pipeline
    /// never silently swallows one.
    pub falsification: Option<String>,
}

impl RigidityReport {
    pub fn is_falsified(&self) -> bool {
        self.falsification.is_some()
    }
}

pub fn rigidity_pipeline(c: &TorusCocycle, config: &RigidityConfig) -> Result<RigidityReport> {
    let prec = config.prec;
    let cert = c.validate(prec)?;
    if !cert.is_valid() {
        return Err(Error::validation(format!(
            "cocycle failed validation: {} compatibility mismatches, ergodic = {}",
            cert.mismatches.len(),
            cert.ergodicity.is_certified()
        )));
    }
    // step 1: strip means
    let (zm, constants) = c.subtract_average()?;
    let f = zm.f_a().clone();
    let action = c.action().clone();
    let a_mat = action.element(&[1, 0])?;
    let a_uni = UnimodularMatrix::new(a_mat.clone())?;

    // step 2: telescoping identity, exact in the coefficients
    let mut telescoping_checked = Vec::new();
    let (range_lo, range_hi) = config.telescope_range;
    for n in range_lo..=range_hi {
        for j in range_lo..=range_hi {
            let h = zm.value((0, j))?;
            let mut lhs = TrigPolynomial::zero(f.dim());
            for i in -n..=n {
                let m_ij = action.element(&[i, j])?;
                let m_i = action.element(&[i, 0])?;
                lhs = lhs.add(&f.pullback(&m_ij)?)?.sub(&f.pullback(&m_i)?)?;
            }
            let rhs = h
                .pullback(&action.element(&[n + 1, 0])?)?
                .sub(&h.pullback(&action.element(&[-n, 0])?)?)?;
            let residual = lhs.sub(&rhs)?;
            if !residual.coeffs().is_empty() {
                return Ok(RigidityReport {
                    constants,
                    transfer: None,
                    sigma_sq: BigRational::zero(),
                    telescoping_checked,
                    trick_sum: BigRational::zero(),
                    trick_nonzero_terms: 0,
                    trick_box_radius: 0,
                    falsification: Some(format!(
                        "telescoping identity fails at (n, j) = ({}, {})",
                        n, j
                    )),
                });
            }
            telescoping_checked.push((n, j));
        }
    }

    // step 3: the higher-rank trick inside a certified box
    let (trick_sum, trick_nonzero_terms, trick_box_radius) =
        higher_rank_sum(&action, &f, prec)?;

    // step 4: the variance obstruction; zero is the rigidity prediction
    let sigma_sq = sigma_squared(&f, &a_uni, prec)?;
    if !sigma_sq.is_zero() {
        return Ok(RigidityReport {
            constants,
            transfer: None,
            sigma_sq: sigma_sq.clone(),
            telescoping_checked,
            trick_sum,
            trick_nonzero_terms,
            trick_box_radius,
            falsification: Some(format!(
                "sigma^2 = {} for a validated compatible cocycle",
                sigma_sq
            )),
        });
    }

    // step 5: solve for the transfer function of the first generator
    let phi = match coboundary_solve(&f, &a_uni, prec)? {
        CoboundaryOutcome::Solved(phi) => phi,
        CoboundaryOutcome::Obstructed(obs) => {
            return Ok(RigidityReport {
                constants,
                transfer: None,
                sigma_sq,
                telescoping_checked,
                trick_sum,
                trick_nonzero_terms,
                trick_box_radius,
                falsification: Some(format!(
                    "sigma^2 = 0 but {} orbit obstructions remain",
                    obs.len()
                )),
            });
        }
    };

    // step 6: the second generator's residual must vanish exactly
    let b_mat = action.element(&[0, 1])?;
    let residual = zm.f_b().sub(&phi.pullback(&b_mat)?.sub(&phi)?)?;
    let falsification = if residual.coeffs().is_empty() {
        None
    } else {
        Some("f_b - (phi o b - phi) is nonzero after mean subtraction".to_string())
    };
    Ok(RigidityReport {
        constants,
        transfer: Some(phi),
        sigma_sq,
        telescoping_checked,
        trick_sum,
        trick_nonzero_terms,
        trick_box_radius,
        falsification,
    })
}

/// `sum over the certified box of <f o alpha(z), f>`: outside the box no
/// frequency tuple can match, by the growth constant of the spectrum, which
/// is the finiteness mechanism of the higher-rank argument at trig scale.
fn higher_rank_sum(
    action: &ZlAction,
    f: &TrigPolynomial,
    prec: Prec,
) -> Result<(BigRational, usize, i64)> {
    if f.coeffs().is_empty() {
        return Ok((BigRational::zero(), 0, 0));
    }
    let chars = simultaneous_spectrum(action, prec)?;
    let orbits = galois_orbits(&chars);
    // growth constant over all orbits: max_chi log|chi(z)| >= c |z|
    let mut c_lo: Option<RealInterval> = None;
    for o in &orbits {
        let l = lemma21_constant(&o, prec)?;
        c_lo = Some(match c_lo {
            None => l.enclosure.clone(),
            Some(cur) => cur.min(&l.enclosure),
        });
    }
    let c_lo = c_lo.expect("at least one orbit");
    // projection range over all characters: matching requires
    // max_chi log|chi(z)| <= max_chi log(C_chi / m_chi)
    let work = prec + 32;
    let mut ratio_hi: Option<RealInterval> = None;
    for chi in &chars {
        let mut lo: Option<RealInterval> = None;
        let mut hi: Option<RealInterval> = None;
        for p in f.coeffs().keys() {
            let mut ip = crate::exact::NfElement::zero(chi.field());
            for (x, &cc) in chi.eigenvector().iter().zip(p.iter()) {
                if cc != 0 {
                    ip = ip.add(&x.scale(&BigRational::from(num_bigint::BigInt::from(cc))))?;
                }
            }
            if ip.is_zero() {
                return Err(Error::validation(
                    "support frequency orthogonal to an eigenvector (reducible action?)",
                ));
            }
            let m = ip.embedding(chi.embedding_index(), work)?.abs(work);
            lo = Some(match lo {
                None => m.clone(),
                Some(cur) => cur.min(&m),
            });
            hi = Some(match hi {
                None => m,
                Some(cur) => cur.max(&m),
            });
        }
        let r = hi.unwrap().div(&lo.unwrap(), work)?.ln(work)?;
        ratio_hi = Some(match ratio_hi {
            None => r,
            Some(cur) => cur.max(&r),
        });
    }
    let bound = ratio_hi.expect("nonempty").div(&c_lo, work)?;
    let radius =
        crate::exact::interval::bigfloat_to_f64(bound.hi()).ceil().max(0.0) as i64 + 1;

    let mut sum = BigRational::zero();
    let mut nonzero = 0usize;
    for i in -radius..=radius {
        for j in -radius..=radius {
            let m = action.element(&[i, j])?;
            let mt = m.transpose();
            // <f o alpha(z), f> = sum_n f((alpha^T)^{-1}... computed as
            // sum over support pairs via the pullback coefficients
            let mut term = CRational::zero();
            for (n, c) in f.coeffs() {
                let moved = match apply_i64(&mt, n) {
                    Ok(v) => v,
                    Err(_) => continue, // far outside any support
                };
                let other = f.coeff(&moved);
                if !other.is_zero() {
                    term = term.add(&c.mul(&other.conj()));
                }
            }
            if !term.is_zero() {
                nonzero += 1;
                sum += term.re;
            }
        }
    }
    Ok((sum, nonzero, radius))
}

/// Exact dimension comparison of the compatibility solution space on a
/// bounded frequency window against coboundaries-plus-constants.
#[derive(Debug, Clone)]
pub struct SolutionSpaceCheck {
    pub support_radius: i64,
    pub dim_solutions: usize,
    pub dim_coboundaries: usize,
    pub dim_constants: usize,
    /// Basis of the solution space, as stacked `(f_a, f_b)` coefficient
    /// vectors over the window (for sampling random compatible cocycles).
    pub window: Vec<Vec<i64>>,
    pub basis: Vec<Vec<BigRational>>,
}

impl SolutionSpaceCheck {
    pub fn dimensions_match(&self) -> bool {
        self.dim_solutions == self.dim_coboundaries + self.dim_constants
    }
}

/// Sets up the exact compatibility system on the sup-norm window of the
/// given radius and compares its solution dimension with the predicted
/// decomposition into coboundaries and constants.
pub fn compatibility_solution_space(
    action: &ZlAction,
    support_radius: i64,
    prec: Prec,
) -> Result<SolutionSpaceCheck> {
    if action.rank() != 2 {
        return Err(Error::validation("solution-space check expects a rank-2 action"));
    }
    let d = action.dim();
    let at = action.element(&[1, 0])?.transpose();
    let bt = action.element(&[0, 1])?.transpose();
    let at_inv = at.inverse()?;
    let bt_inv = bt.inverse()?;

    // the window S0 and index maps
    let mut window: Vec<Vec<i64>> = Vec::new();
    let mut v = vec![-support_radius; d];
    loop {
        window.push(v.clone());
        let mut i = 0;
        loop {
            if i == d {
                break;
            }
            v[i] += 1;
            if v[i] <= support_radius {
                break;
            }
            v[i] = -support_radius;
            i += 1;
        }
        if i == d {
            break;
        }
    }
    let index: std::collections::BTreeMap<Vec<i64>, usize> =
        window.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let s0 = window.len();

    // equations live on n in S0 union A^T S0 union B^T S0
    let mut eq_freqs: std::collections::BTreeSet<Vec<i64>> = window.iter().cloned().collect();
    for k in &window {
        eq_freqs.insert(apply_i64(&at, k)?);
        eq_freqs.insert(apply_i64(&bt, k)?);
    }
    let f = RationalField;
    let cols = 2 * s0; // unknowns: f_a coefficients then f_b coefficients
    let mut data: Vec<BigRational> = Vec::new();
    let mut rows = 0usize;
    for n in &eq_freqs {
        // f_a((B^T)^-1 n) + f_b(n) - f_b((A^T)^-1 n) - f_a(n) = 0
        let mut row = vec![BigRational::zero(); cols];
        let mut nontrivial = false;
        let bn = apply_i64(&bt_inv, n)?;
        if let Some(&i) = index.get(&bn) {
            row[i] += BigRational::from(num_bigint::BigInt::from(1));
            nontrivial = true;
        }
        if let Some(&i) = index.get(n) {
            row[s0 + i] += BigRational::from(num_bigint::BigInt::from(1));
            row[i] -= BigRational::from(num_bigint::BigInt::from(1));
            nontrivial = true;
        }
        let an = apply_i64(&at_inv, n)?;
        if let Some(&i) = index.get(&an) {
            row[s0 + i] -= BigRational::from(num_bigint::BigInt::from(1));
            nontrivial = true;
        }
        if nontrivial && row.iter().any(|v| !v.is_zero()) {
            data.extend(row);
            rows += 1;
        }
    }
    let mat = FieldMat::new(rows, cols, data);
    let basis = mat.kernel_basis(&f);
    let dim_solutions = basis.len();

    // coboundary side: phi supported on the orbit hull of the window, with
    // both coboundary components required to land inside S0
    let a_uni = UnimodularMatrix::new(action.element(&[1, 0])?)?;
    let b_uni = UnimodularMatrix::new(action.element(&[0, 1])?)?;
    let ha = super::orbits::escape_horizon(&a_uni, &window, prec)?;
    let hb = super::orbits::escape_horizon(&b_uni, &window, prec)?;
    let mut hull: std::collections::BTreeSet<Vec<i64>> = Default::default();
    for k in &window {
        let mut fwd = k.clone();
        let mut bwd = k.clone();
        hull.insert(k.clone());
        for _ in 0..ha.max(hb) {
            if let Ok(nf) = apply_i64(&at, &fwd) {
                hull.insert(nf.clone());
                fwd = nf;
            }
            if let Ok(nb) = apply_i64(&at_inv, &bwd) {
                hull.insert(nb.clone());
                bwd = nb;
            }
        }
        let mut fwd = k.clone();
        let mut bwd = k.clone();
        for _ in 0..hb.max(ha) {
            if let Ok(nf) = apply_i64(&bt, &fwd) {
                hull.insert(nf.clone());
                fwd = nf;
            }
            if let Ok(nb) = apply_i64(&bt_inv, &bwd) {
                hull.insert(nb.clone());
                bwd = nb;
            }
        }
    }
    hull.remove(&vec![0i64; d]); // the constant phi component is modded out
    let hull: Vec<Vec<i64>> = hull.into_iter().collect();
    let hull_index: std::collections::BTreeMap<Vec<i64>, usize> =
        hull.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    // constraints: (phi o a - phi)(n) = 0 for n outside S0, same for b
    let mut cdata: Vec<BigRational> = Vec::new();
    let mut crows = 0usize;
    let mut constraint_freqs: std::collections::BTreeSet<Vec<i64>> = Default::default();
    for k in &hull {
        constraint_freqs.insert(apply_i64(&at, k)?);
        constraint_freqs.insert(apply_i64(&bt, k)?);
        constraint_freqs.insert(k.clone());
    }
    for n in &constraint_freqs {
        if index.contains_key(n) {
            continue; // inside S0: unconstrained
        }
        for (mt_inv, _) in [(&at_inv, 'a'), (&bt_inv, 'b')] {
            // (phi o m - phi)(n) = phi((m^T)^-1 n) - phi(n)
            let mut row = vec![BigRational::zero(); hull.len()];
            let mut nontrivial = false;
            let pm = apply_i64(mt_inv, n)?;
            if let Some(&i) = hull_index.get(&pm) {
                row[i] += BigRational::from(num_bigint::BigInt::from(1));
                nontrivial = true;
            }
            if let Some(&i) = hull_index.get(n) {
                row[i] -= BigRational::from(num_bigint::BigInt::from(1));
                nontrivial = true;
            }
            if nontrivial && row.iter().any(|v| !v.is_zero()) {
                cdata.extend(row);
                crows += 1;
            }
        }
    }
    let cmat = FieldMat::new(crows, hull.len(), cdata);
    let phi_space = cmat.kernel_basis(&f);
    // the coboundary map phi -> (phi o a - phi, phi o b - phi) is injective
    // on the hull space without the constant component (no nonconstant
    // invariant trig polynomials under an ergodic automorphism)
    let dim_coboundaries = phi_space.len();
    let dim_constants = if index.contains_key(&vec![0i64; d]) { 2 } else { 0 };
    Ok(SolutionSpaceCheck {
        support_radius,
        dim_solutions,
        dim_coboundaries,
        dim_constants,
        window,
        basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::tests::{sample_phi, t3_rank2_action};

    #[test]
    fn pipeline_recovers_coboundary_data() {
        let action = t3_rank2_action();
        let phi0 = sample_phi();
        let consts = (BigRational::new(3.into(), 4.into()), BigRational::new(1.into(), 6.into()));
        let c = TorusCocycle::from_coboundary(action, &phi0, consts.clone()).unwrap();
        let report = rigidity_pipeline(&c, &RigidityConfig::default()).unwrap();
        assert!(!report.is_falsified(), "{:?}", report.falsification);
        assert_eq!(report.constants, consts);
        assert!(report.sigma_sq.is_zero());
        let phi = report.transfer.expect("transfer recovered");
        // phi agrees with phi0 (both zero-mean)
        assert!(phi.sub(&phi0).unwrap().coeffs().is_empty());
        assert_eq!(report.telescoping_checked.len(), 9);
        assert!(report.trick_nonzero_terms > 0);
    }

    #[test]
    fn incompatible_cocycle_rejected() {
        let action = t3_rank2_action();
        let c = TorusCocycle::new(
            action,
            crate::toral::TrigPolynomial::cosine(vec![1, 0, 0]),
            crate::toral::TrigPolynomial::zero(3),
        )
        .unwrap();
        assert!(rigidity_pipeline(&c, &RigidityConfig::default()).is_err());
    }

    #[test]
    fn solution_space_dimensions() {
        let action = t3_rank2_action();
        let check = compatibility_solution_space(&action, 1, 96).unwrap();
        assert!(
            check.dimensions_match(),
            "solutions {} vs coboundaries {} + constants {}",
            check.dim_solutions,
            check.dim_coboundaries,
            check.dim_constants
        );
        assert!(check.dim_solutions >= 2);
    }

    #[test]
    fn sampled_solutions_have_zero_sigma() {
        use rand::{Rng, SeedableRng};
        let action = t3_rank2_action();
        let check = compatibility_solution_space(&action, 1, 96).unwrap();
        let s0 = check.window.len();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let a_uni = UnimodularMatrix::new(action.element(&[1, 0]).unwrap()).unwrap();
        for _ in 0..10 {
            // random rational combination of the kernel basis
            let mut fa = vec![BigRational::zero(); s0];
            let mut fb = vec![BigRational::zero(); s0];
            for v in &check.basis {
                let w = BigRational::new(rng.gen_range(-5i64..=5).into(), rng.gen_range(1i64..=3).into());
                for (i, x) in v.iter().enumerate() {
                    if i < s0 {
                        fa[i] += x * &w;
                    } else {
                        fb[i - s0] += x * &w;
                    }
                }
            }
            // builds real-valued functions: symmetrize with the conjugate
            let mut ma = std::collections::BTreeMap::new();
            let mut mb = std::collections::BTreeMap::new();
            for (i, k) in check.window.iter().enumerate() {
                let neg: Vec<i64> = k.iter().map(|&v| -v).collect();
                let pos_idx = i;
                let neg_idx = check.window.iter().position(|x| *x == neg).unwrap();
                let re_a = (&fa[pos_idx] + &fa[neg_idx]) / BigRational::from(num_bigint::BigInt::from(2));
                let re_b = (&fb[pos_idx] + &fb[neg_idx]) / BigRational::from(num_bigint::BigInt::from(2));
                if !re_a.is_zero() {
                    ma.insert(k.clone(), CRational::real(re_a));
                }
                if !re_b.is_zero() {
                    mb.insert(k.clone(), CRational::real(re_b));
                }
            }
            let f_a = TrigPolynomial::new(3, ma).unwrap();
            let f_b = TrigPolynomial::new(3, mb).unwrap();
            let c = TorusCocycle::new(action.clone(), f_a, f_b).unwrap();
            let cert = c.validate(96).unwrap();
            assert!(cert.is_valid(), "sampled combination not compatible");
            let (zm, _) = c.subtract_average().unwrap();
            if zm.f_a().coeffs().is_empty() {
                continue;
            }
            let s = sigma_squared(zm.f_a(), &a_uni, 96).unwrap();
            assert!(s.is_zero(), "sigma^2 = {} for a compatible cocycle", s);
        }
    }
}
