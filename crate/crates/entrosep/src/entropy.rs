//! Shannon entropy of measurement outcome distributions, in nats.

use crate::observables::{OperatorSet, SpectralObservable};
use crate::qstate::DensityMatrix;
use crate::{Error, Result, PROB_FLOOR};

/// -x ln x, extended by 0 at both endpoints. Inputs below the probability
/// floor are treated as exact zeros so entropy sums stay finite.
pub fn f_func(x: f64) -> f64 {
    debug_assert!(x >= -1e-9 && x <= 1.0 + 1e-9, "f_func input {x} outside [0,1]");
    let x = x.clamp(0.0, 1.0);
    if x < PROB_FLOOR {
        return 0.0;
    }
    // + 0.0 normalizes the -0.0 produced at x = 1
    -x * x.ln() + 0.0
}

/// Entropy of a two outcome distribution (x, 1 - x).
pub fn binary_entropy(x: f64) -> f64 {
    debug_assert!(x >= -1e-12 && x <= 1.0 + 1e-12, "binary_entropy input {x} outside [0,1]");
    let x = x.clamp(0.0, 1.0);
    f_func(x) + f_func(1.0 - x)
}

pub fn shannon(probs: &[f64]) -> f64 {
    probs.iter().map(|p| f_func(*p)).sum()
}

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

/// Cleaned outcome probabilities: tiny negatives from roundoff are clamped,
/// anything worse is rejected, and the total must be 1.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        let mut probs = raw;
        for p in &mut probs {
            if *p < -1e-12 {
                return Err(Error::Numerical(format!("outcome probability {p} is negative")));
            }
            *p = p.max(0.0);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Numerical(format!("outcome probabilities sum to {total}")));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn entropy(&self) -> f64 {
        shannon(&self.probs)
    }
}

/// H(X, rho): Shannon entropy of the eigenspace projection probabilities.
pub fn entropic_uncertainty(obs: &SpectralObservable, rho: &DensityMatrix) -> Result<f64> {
    if obs.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: obs.dim() });
    }
    Ok(OutcomeDistribution::new(obs.probabilities(rho.matrix()))?.entropy())
}

/// Sum of the uncertainties of every observable in the set.
pub fn total_uncertainty(set: &OperatorSet, rho: &DensityMatrix) -> Result<f64> {
    set.observables().iter().map(|obs| entropic_uncertainty(obs, rho)).sum()
}

/// State independent floor on H(X) + H(Y): -2 ln of the largest singular
/// value among the pairwise projector products.
pub fn pair_bound(x: &SpectralObservable, y: &SpectralObservable) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    let mut max_sv = 0.0f64;
    for px in x.projectors() {
        for py in y.projectors() {
            let prod = px * py;
            let sv = prod.singular_values();
            max_sv = sv.iter().copied().fold(max_sv, f64::max);
        }
    }
    if max_sv <= 0.0 {
        return Err(Error::Numerical("all projector products vanish".into()));
    }
    Ok((-2.0 * max_sv.ln()).max(0.0))
}
