//! Simulated calibration experiments and an empirical check of the
//! Cramér–Rao bound.
//!
//! A campaign runs `R` independent replicates of `M` shots each. Replicate
//! `r` draws from its own generator stream, `replicate_rng(seed, r)`, so a
//! campaign is reproducible bit for bit whatever the thread count.
//! Estimates on the boundary of `[0, 1]` are excluded from the variance and
//! counted.

mod mle;
mod sampling;

pub use mle::{maximize, mle_estimate, onoff_mle, BOUNDARY_TOL, MLE_TOL};
pub use sampling::{envelope_constant, multinomial, replicate_rng, simulate_with, HomodyneSampler, Outcomes};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::fisher_information;
use crate::error::{Error, Result};
use crate::fisher::{crb_variance, neumaier_sum};
use crate::types::{DetectorModel, Efficiency, ProbeState};

/// Fewest replicates for which variance statistics are reported.
pub const MIN_REPLICATES: u32 = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationRun {
    pub probe: ProbeState,
    pub detector: DetectorModel,
    pub eta_true: Efficiency,
    pub trials: u64,
    pub seed: u64,
    pub replicates: u32,
}

impl EstimationRun {
    pub fn validate(&self) -> Result<()> {
        self.probe.validate()?;
        if !self.eta_true.is_interior() {
            return Err(Error::domain(format!("true η = {} must lie inside (0, 1)", self.eta_true.get())));
        }
        if self.trials == 0 {
            return Err(Error::domain("trials must be at least 1"));
        }
        if self.replicates == 0 {
            return Err(Error::domain("replicates must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub seed: u64,
    pub trials: u64,
    pub replicates: u32,
    pub eta_true: f64,
    /// Interior estimates in replicate order.
    pub estimates: Vec<f64>,
    pub boundary_count: u32,
    pub mean_estimate: f64,
    pub bias: f64,
    /// Unbiased sample variance of the interior estimates.
    pub empirical_variance: f64,
    /// `1/(M·F(η_true))`.
    pub crb: f64,
    pub ratio: f64,
    /// `1 − 3/√R`, the smallest ratio compatible with the bound.
    pub ratio_floor: f64,
    pub bound_respected: bool,
}

/// Outcomes of replicate `replicate` of `run`.
pub fn simulate_outcomes(run: &EstimationRun, replicate: u32) -> Result<Outcomes> {
    run.validate()?;
    let mut rng = replicate_rng(run.seed, replicate as u64);
    simulate_with(&run.probe, &run.detector, run.eta_true, run.trials, &mut rng)
}

/// Simulates every replicate, estimates η by maximum likelihood and compares
/// the spread of the estimates with the Cramér–Rao bound.
pub fn validate_crb(run: &EstimationRun) -> Result<EstimationResult> {
    run.validate()?;
    if run.replicates < MIN_REPLICATES {
        return Err(Error::domain(format!(
            "{} replicates requested; variance statistics need at least {MIN_REPLICATES}",
            run.replicates
        )));
    }
    let fisher = fisher_information(&run.probe, &run.detector, run.eta_true)?;
    let crb = crb_variance(&fisher, run.trials)?;

    let outcomes: Vec<Result<Option<f64>>> = (0..run.replicates)
        .into_par_iter()
        .map(|r| {
            let data = simulate_outcomes(run, r)?;
            match mle_estimate(&data, &run.probe, &run.detector) {
                Ok(eta) => Ok(Some(eta)),
                Err(Error::BoundaryEstimate(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut estimates = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        if let Some(eta) = o? {
            estimates.push(eta);
        }
    }
    let boundary_count = run.replicates - estimates.len() as u32;
    if estimates.len() < 2 {
        return Err(Error::BoundaryEstimate(f64::NAN));
    }

    let n = estimates.len() as f64;
    let mean = neumaier_sum(estimates.iter().copied()) / n;
    let variance = neumaier_sum(estimates.iter().map(|x| (x - mean) * (x - mean))) / (n - 1.0);
    let ratio = if crb > 0.0 { variance / crb } else { f64::INFINITY };
    let ratio_floor = 1.0 - 3.0 / (run.replicates as f64).sqrt();
    Ok(EstimationResult {
        seed: run.seed,
        trials: run.trials,
        replicates: run.replicates,
        eta_true: run.eta_true.get(),
        estimates,
        boundary_count,
        mean_estimate: mean,
        bias: mean - run.eta_true.get(),
        empirical_variance: variance,
        crb,
        ratio,
        ratio_floor,
        bound_respected: ratio >= ratio_floor,
    })
}
