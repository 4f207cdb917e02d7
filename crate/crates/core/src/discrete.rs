//! On/off and K-outcome photon-counting detectors.
//!
//! An inefficient detector is a loss channel of transmissivity η followed by
//! an ideal counter. Dark counts are modelled by multiplying the no-click
//! probability by `e^{-δ}`.
//!
//! The coherent-state closed form is `|α|⁴ / (e^{δ+η|α|²} − 1)`. Written with
//! the denominator the other way round it would be negative for every valid
//! input; the form here follows from `p_off = e^{−δ−η|α|²}` and agrees with
//! the finite-difference oracle in the test suite.
//!
//! K-outcome detectors resolve `0..=K−2` photons and report a single overflow
//! outcome for anything larger. They are modelled without dark counts.

use statrs::function::factorial::ln_factorial;
use statrs::function::gamma::gamma_lr;

use crate::combin::{bernstein, binomial};
use crate::error::{Error, Result};
use crate::fisher::{
    discrete_fisher, discrete_fisher_or_divergent, neumaier_sum, FisherResult, Method, OutcomeDistribution,
    PROBABILITY_FLOOR,
};
use crate::types::{DarkCount, Efficiency, FockMixture, ProbeState};

/// `F_n(η, δ) = n²(1−η)^{n−2} / (e^δ − (1−η)^n)` for an n-photon Fock probe.
///
/// At η = 1 the value is finite for n ≥ 2 (`4e^{−δ}` for n = 2, zero above)
/// and divergent for n = 1.
pub fn fisher_onoff_fock(n: u32, eta: Efficiency, delta: DarkCount) -> Result<FisherResult> {
    if n == 0 {
        return Err(Error::domain("on/off Fock Fisher information needs n ≥ 1"));
    }
    let (eta, delta) = (eta.get(), delta.get());
    if eta == 1.0 {
        return Ok(match n {
            1 => FisherResult::divergent(Method::ClosedForm),
            2 => FisherResult::closed_form(4.0 * (-delta).exp()),
            _ => FisherResult::closed_form(0.0),
        });
    }
    let nf = n as f64;
    // e^δ − (1−η)^n, kept accurate for small δ and η
    let den = delta.exp_m1() - (nf * (-eta).ln_1p()).exp_m1();
    if den <= 0.0 {
        return Ok(FisherResult::divergent(Method::ClosedForm));
    }
    let num = nf * nf * (1.0 - eta).powi(n as i32 - 2);
    Ok(FisherResult::closed_form(num / den))
}

/// `F_(α)(η, δ) = |α|⁴ / (e^{δ+η|α|²} − 1)`.
pub fn fisher_onoff_coherent(mean_photons: f64, eta: Efficiency, delta: DarkCount) -> Result<FisherResult> {
    if !(mean_photons.is_finite() && mean_photons > 0.0) {
        return Err(Error::domain(format!("coherent mean photon number {mean_photons} must be > 0")));
    }
    let den = (delta.get() + eta.get() * mean_photons).exp_m1();
    if den <= 0.0 {
        return Ok(FisherResult::divergent(Method::ClosedForm));
    }
    Ok(FisherResult::closed_form(mean_photons * mean_photons / den))
}

/// Heralded single photon `ξ|1⟩⟨1| + (1−ξ)|0⟩⟨0|`; `p_off = e^{−δ}(1−ξη)`.
///
/// At δ = 0 this is `ξ / (η(1−ξη))`.
pub fn fisher_onoff_heralded(xi: f64, eta: Efficiency, delta: DarkCount) -> Result<FisherResult> {
    let probe = ProbeState::heralded(xi)?;
    discrete_fisher_or_divergent(&onoff_distribution(&probe, eta, delta)?)
}

/// Fock-diagonal mixture; `p_off = e^{−δ} Σ_j w_j (1−η)^j`.
pub fn fisher_onoff_mixture(mixture: &FockMixture, eta: Efficiency, delta: DarkCount) -> Result<FisherResult> {
    let probe = ProbeState::mixture(mixture.clone());
    discrete_fisher_or_divergent(&onoff_distribution(&probe, eta, delta)?)
}

/// `(p_off, p_on)` and their η-derivatives for any probe.
pub fn onoff_distribution(probe: &ProbeState, eta: Efficiency, delta: DarkCount) -> Result<OutcomeDistribution> {
    let (eta, delta) = (eta.get(), delta.get());
    let dark = (-delta).exp();
    let (p_off, p_on, d_off) = match probe {
        ProbeState::Coherent { mean_photons } => {
            let x = -delta - eta * mean_photons;
            (x.exp(), -x.exp_m1(), -mean_photons * x.exp())
        }
        _ => {
            let weights = probe.fock_weights().expect("non-coherent probes are Fock diagonal");
            let ln_loss = (-eta).ln_1p();
            let mut vacuum = Vec::with_capacity(weights.len());
            let mut clicked = Vec::with_capacity(weights.len());
            let mut slope = Vec::with_capacity(weights.len());
            for &(j, w) in &weights {
                if j == 0 {
                    vacuum.push(w);
                    continue;
                }
                let jf = j as f64;
                vacuum.push(w * (jf * ln_loss).exp());
                clicked.push(-w * (jf * ln_loss).exp_m1());
                slope.push(w * jf * (1.0 - eta).powi(j as i32 - 1));
            }
            let vac = neumaier_sum(vacuum);
            let on = neumaier_sum(clicked);
            // p_on = (1 − e^{−δ}) + e^{−δ}·Σ w_j (1 − (1−η)^j)
            (dark * vac, -(-delta).exp_m1() + dark * on, -dark * neumaier_sum(slope))
        }
    };
    OutcomeDistribution::new(vec![p_off, p_on], vec![d_off, -d_off])
}

/// Exact on/off Fisher information for any probe state.
pub fn fisher_onoff(probe: &ProbeState, eta: Efficiency, delta: DarkCount) -> Result<FisherResult> {
    match probe {
        ProbeState::Fock { n: 0 } => Ok(FisherResult::zero(Method::ClosedForm)),
        ProbeState::Fock { n } => fisher_onoff_fock(*n, eta, delta),
        ProbeState::Coherent { mean_photons } if *mean_photons == 0.0 => Ok(FisherResult::zero(Method::ClosedForm)),
        ProbeState::Coherent { mean_photons } => fisher_onoff_coherent(*mean_photons, eta, delta),
        ProbeState::HeraldedSinglePhoton { xi } => fisher_onoff_heralded(*xi, eta, delta),
        ProbeState::FockMixture { mixture } => fisher_onoff_mixture(mixture, eta, delta),
    }
}

/// Truncated small-η expansion of the on/off Fisher information:
/// `n / (η + (e^δ−1)/n)` for Fock and `|α|² / (e^δ η + (e^δ−1)/|α|²)` for
/// coherent probes. An approximation, not the exact value.
pub fn fisher_onoff_small_eta(probe: &ProbeState, eta: Efficiency, delta: DarkCount) -> Result<FisherResult> {
    let (eta, delta) = (eta.get(), delta.get());
    let (scale, den) = match probe {
        ProbeState::Fock { n } if *n >= 1 => {
            let nf = *n as f64;
            (nf, eta + delta.exp_m1() / nf)
        }
        ProbeState::Coherent { mean_photons } if *mean_photons > 0.0 => {
            (*mean_photons, delta.exp() * eta + delta.exp_m1() / mean_photons)
        }
        _ => {
            return Err(Error::domain(format!(
                "small-η expansion is defined for Fock (n ≥ 1) and coherent probes, not {probe}"
            )))
        }
    };
    if den <= 0.0 {
        return Ok(FisherResult::divergent(Method::ClosedForm));
    }
    Ok(FisherResult::closed_form(scale / den))
}

fn require_interior(eta: Efficiency) -> Result<f64> {
    if eta.is_interior() {
        Ok(eta.get())
    } else {
        Err(Error::domain(format!("η = {} must lie strictly inside (0, 1)", eta.get())))
    }
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        Err(Error::domain(format!("K-outcome detector needs K ≥ 2, got {k}")))
    } else {
        Ok(())
    }
}

/// Outcome distribution `{p_0, …, p_{K−2}, p_overflow}` for a K-outcome
/// detector. The overflow probability is summed over its own support rather
/// than formed as `1 − Σ p_k`, which keeps tiny overflow probabilities exact.
pub fn koutcome_distribution(probe: &ProbeState, k: u32, eta: Efficiency) -> Result<OutcomeDistribution> {
    check_k(k)?;
    let top = (k - 1) as usize;
    let eta_v = eta.get();
    let mut probs = vec![0.0; top + 1];
    let mut derivs = vec![0.0; top + 1];

    match probe {
        ProbeState::Coherent { mean_photons } => {
            let x = *mean_photons;
            let lambda = eta_v * x;
            let pois = |m: i64| -> f64 {
                if m < 0 {
                    0.0
                } else if lambda == 0.0 {
                    if m == 0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    (-lambda + m as f64 * lambda.ln() - ln_factorial(m as u64)).exp()
                }
            };
            for m in 0..top {
                probs[m] = pois(m as i64);
                derivs[m] = x * (pois(m as i64 - 1) - pois(m as i64));
            }
            probs[top] = if lambda == 0.0 { 0.0 } else { gamma_lr(top as f64, lambda) };
            derivs[top] = x * pois(top as i64 - 1);
        }
        _ => {
            let weights = probe.fock_weights().expect("non-coherent probes are Fock diagonal");
            let mut over_p = Vec::new();
            let mut over_d = Vec::new();
            for &(j, w) in &weights {
                for m in 0..=j {
                    let (b, db) = bernstein(j, m, eta_v);
                    if (m as usize) < top {
                        probs[m as usize] += w * b;
                        derivs[m as usize] += w * db;
                    } else {
                        over_p.push(w * b);
                        over_d.push(w * db);
                    }
                }
            }
            probs[top] = neumaier_sum(over_p);
            derivs[top] = neumaier_sum(over_d);
        }
    }
    OutcomeDistribution::new(probs, derivs)
}

/// K-outcome Fisher information for any probe, through the generic
/// multinomial sum.
pub fn fisher_koutcome(probe: &ProbeState, k: u32, eta: Efficiency) -> Result<FisherResult> {
    require_interior(eta)?;
    discrete_fisher_or_divergent(&koutcome_distribution(probe, k, eta)?)
}

/// Closed form for an n-photon Fock probe on a K-outcome detector:
///
/// `Σ_{k=0}^{K−2} C(n,k)(1−η)^{n−k−2} η^{k−2} (k−nη)² + (∂p_K)²/p_K`
///
/// where `p_K` is the overflow probability. When `n < K−1` the detector
/// resolves every photon number and the overflow term vanishes.
pub fn fisher_koutcome_fock(n: u32, k: u32, eta: Efficiency) -> Result<FisherResult> {
    check_k(k)?;
    let eta = require_interior(eta)?;
    let nf = n as f64;
    let resolved = (k - 2).min(n);
    let mut terms: Vec<f64> = (0..=resolved)
        .map(|m| {
            let slope = m as f64 - nf * eta;
            binomial(n, m) * (1.0 - eta).powi(n as i32 - m as i32 - 2) * eta.powi(m as i32 - 2) * slope * slope
        })
        .collect();

    if n > k - 2 {
        let (p_tail, d_tail): (Vec<f64>, Vec<f64>) = (k - 1..=n).map(|m| bernstein(n, m, eta)).unzip();
        let p = neumaier_sum(p_tail);
        let d = neumaier_sum(d_tail);
        if p < PROBABILITY_FLOOR {
            if d != 0.0 {
                return Ok(FisherResult::divergent(Method::ClosedForm));
            }
        } else {
            terms.push(d * d / p);
        }
    }
    let value = neumaier_sum(terms.iter().copied());
    Ok(FisherResult::finite(
        value,
        Method::ClosedForm,
        f64::EPSILON * terms.len() as f64 * value,
    ))
}

/// `(K−1) / (η(1−η))`, the closed form claimed for the optimal K-photon
/// probe. It disagrees with [`fisher_koutcome_fock`] for K ≥ 3 (for example
/// K = n = 3, η = 0.5 gives 8 here versus 10.5 from the outcome sum), so it is
/// kept only as a reference value and is not used by any analysis.
pub fn koutcome_claimed_closed_form(k: u32, eta: Efficiency) -> Result<f64> {
    check_k(k)?;
    let eta = require_interior(eta)?;
    Ok((k - 1) as f64 / (eta * (1.0 - eta)))
}

/// Generic multinomial Fisher information for a Fock probe, used to cross-check
/// [`fisher_koutcome_fock`].
pub fn fisher_koutcome_fock_multinomial(n: u32, k: u32, eta: Efficiency) -> Result<FisherResult> {
    require_interior(eta)?;
    discrete_fisher(&koutcome_distribution(&ProbeState::fock(n), k, eta)?)
}
