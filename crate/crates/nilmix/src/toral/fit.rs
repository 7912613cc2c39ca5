//! Decay-rate fitting for correlation sweeps.
//!
//! Finite-support test functions make correlations *exactly* zero beyond a
//! computable separation, so the sweep output separates into a rate part
//! (nonzero samples, fitted by least squares) and a zero onset (the smallest
//! separation beyond which every exact value vanishes). Fits are empirical
//! summaries over exact data; they carry no certification of their own.

use super::correlation::{multi_correlation, product_of_means, CorrelationBudget};
use super::{rational_to_f64, TrigPolynomial};
use crate::error::{Error, Result};
use crate::spectrum::ZlAction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayModel {
    /// `log |corr - prod| ~ C - eta * log N`, with `log N` the sup-norm
    /// separation; reports `eta`.
    NPower,
    /// `log |corr - prod| ~ C + n log rho` for shape iterates; reports `rho`.
    RhoPower,
}

#[derive(Debug, Clone)]
pub struct DecaySample {
    /// Sup-norm separation for `NPower`, iterate index for `RhoPower`.
    pub separation: i64,
    /// `|corr - prod of means|` of the exact finite part.
    pub excess: f64,
    /// Tail radius attached to the enclosure.
    pub radius: f64,
    /// Whether the exact finite part is exactly zero.
    pub exactly_zero: bool,
}

#[derive(Debug, Clone)]
pub struct DecayFit {
    /// `eta` for `NPower`, `rho` for `RhoPower`; `None` when every sample is
    /// exactly zero (nothing to fit).
    pub exponent: Option<f64>,
    pub intercept: Option<f64>,
    pub residuals: Vec<f64>,
    /// Smallest separation such that every sample at or beyond it is exactly
    /// zero.
    pub zero_onset: Option<i64>,
    pub samples_used: usize,
    pub samples: Vec<DecaySample>,
}

/// Runs the sweep and fits the decay model on the nonzero samples.
pub fn decay_fit(
    action: &ZlAction,
    f_list: &[TrigPolynomial],
    sweep: &[(i64, Vec<Vec<i64>>)],
    model: DecayModel,
    budget: &CorrelationBudget,
) -> Result<DecayFit> {
    if sweep.is_empty() {
        return Err(Error::validation("empty sweep"));
    }
    let prod = product_of_means(f_list);
    let mut samples = Vec::with_capacity(sweep.len());
    for (sep, z_list) in sweep {
        let r = multi_correlation(f_list, z_list, action, budget)?;
        let excess_exact = r.value.sub(&prod);
        samples.push(DecaySample {
            separation: *sep,
            excess: excess_exact.modulus_f64(),
            radius: rational_to_f64(&r.radius),
            exactly_zero: excess_exact.is_zero(),
        });
    }
    Ok(fit_samples(samples, model))
}

pub fn fit_samples(samples: Vec<DecaySample>, model: DecayModel) -> DecayFit {
    let mut zero_onset = None;
    let mut seps: Vec<i64> = samples.iter().map(|s| s.separation).collect();
    seps.sort_unstable();
    seps.dedup();
    for &s0 in &seps {
        if samples.iter().filter(|s| s.separation >= s0).all(|s| s.exactly_zero)
            && samples.iter().any(|s| s.separation >= s0)
        {
            zero_onset = Some(s0);
            break;
        }
    }
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| !s.exactly_zero && s.excess > 0.0)
        .map(|s| (s.separation as f64, s.excess.ln()))
        .collect();
    if pts.len() < 2 {
        return DecayFit {
            exponent: None,
            intercept: None,
            residuals: vec![],
            zero_onset,
            samples_used: pts.len(),
            samples,
        };
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return DecayFit {
            exponent: None,
            intercept: None,
            residuals: vec![],
            zero_onset,
            samples_used: pts.len(),
            samples,
        };
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let residuals: Vec<f64> =
        pts.iter().map(|p| p.1 - (intercept + slope * p.0)).collect();
    let exponent = match model {
        DecayModel::NPower => Some(-slope),
        DecayModel::RhoPower => Some(slope.exp()),
    };
    DecayFit {
        exponent,
        intercept: Some(intercept),
        residuals,
        zero_onset,
        samples_used: pts.len(),
        samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::UnimodularMatrix;
    use crate::toral::CRational;

    fn cat_action() -> ZlAction {
        ZlAction::new(vec![UnimodularMatrix::from_i64(&[&[2, 1], &[1, 1]]).unwrap()]).unwrap()
    }

    #[test]
    fn finite_support_zero_onset() {
        // finite supports make the correlation exactly zero at large
        // separation; the onset is reported
        let action = cat_action();
        let f = TrigPolynomial::cosine(vec![1, 0])
            .add(&TrigPolynomial::cosine(vec![0, 1]))
            .unwrap();
        let sweep: Vec<(i64, Vec<Vec<i64>>)> =
            (1..=12).map(|n| (n, vec![vec![0], vec![n]])).collect();
        let fit = decay_fit(
            &action,
            &[f.clone(), f],
            &sweep,
            DecayModel::NPower,
            &CorrelationBudget::default(),
        )
        .unwrap();
        let onset = fit.zero_onset.expect("cosine pair decorrelates at finite range");
        assert!(onset <= 12);
        // all samples beyond the onset are exact zeros
        for s in &fit.samples {
            if s.separation >= onset {
                assert!(s.exactly_zero);
            }
        }
    }

    #[test]
    fn constants_give_degenerate_fit() {
        let action = cat_action();
        let c = TrigPolynomial::constant(2, CRational::from_int(3));
        let sweep: Vec<(i64, Vec<Vec<i64>>)> =
            (1..=5).map(|n| (n, vec![vec![0], vec![n]])).collect();
        let fit = decay_fit(
            &action,
            &[c.clone(), c],
            &sweep,
            DecayModel::NPower,
            &CorrelationBudget::default(),
        )
        .unwrap();
        assert!(fit.exponent.is_none());
        assert_eq!(fit.zero_onset, Some(1));
    }

    #[test]
    fn synthetic_power_law_recovery() {
        // y = 3 * exp(-0.7 x): the fit recovers eta = 0.7
        let samples: Vec<DecaySample> = (1..=10)
            .map(|x| DecaySample {
                separation: x,
                excess: 3.0 * (-0.7 * x as f64).exp(),
                radius: 0.0,
                exactly_zero: false,
            })
            .collect();
        let fit = fit_samples(samples, DecayModel::NPower);
        assert!((fit.exponent.unwrap() - 0.7).abs() < 1e-9);
        let rho_samples: Vec<DecaySample> = (1..=10)
            .map(|x| DecaySample {
                separation: x,
                excess: (0.5f64).powi(x as i32),
                radius: 0.0,
                exactly_zero: false,
            })
            .collect();
        let fit2 = fit_samples(rho_samples, DecayModel::RhoPower);
        assert!((fit2.exponent.unwrap() - 0.5).abs() < 1e-9);
    }
}
