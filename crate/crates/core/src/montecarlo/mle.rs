//! Maximum-likelihood estimates of η from simulated or measured data.

use crate::discrete::koutcome_distribution;
use crate::error::{Error, Result};
use crate::hermite::hermite_psi_into;
use crate::homodyne::LossyFockDensity;
use crate::types::{DarkCount, DetectorModel, Efficiency, ProbeState};

use super::sampling::Outcomes;

/// Bracket width at which the golden-section search stops.
pub const MLE_TOL: f64 = 1e-8;

/// Estimates this close to 0 or 1 are reported as boundary estimates.
pub const BOUNDARY_TOL: f64 = 1e-6;

/// Points of the coarse likelihood scan preceding golden-section refinement.
const SCAN_POINTS: usize = 101;

/// Keeps likelihood evaluations of K-outcome models strictly inside (0, 1).
const INTERIOR_EPS: f64 = 1e-12;

fn interior(eta: f64) -> Result<f64> {
    if eta <= BOUNDARY_TOL {
        Err(Error::BoundaryEstimate(0.0))
    } else if eta >= 1.0 - BOUNDARY_TOL {
        Err(Error::BoundaryEstimate(1.0))
    } else {
        Ok(eta)
    }
}

/// Maximum-likelihood η̂ for `data` taken with `probe` on `detector`.
///
/// On/off data use the closed-form inversion of the no-click probability
/// (bisection for general mixtures); K-outcome and homodyne data maximize the
/// log-likelihood by a coarse scan followed by golden-section search.
/// Estimates at 0 or 1 are returned as [`Error::BoundaryEstimate`].
pub fn mle_estimate(data: &Outcomes, probe: &ProbeState, detector: &DetectorModel) -> Result<f64> {
    probe.validate()?;
    if data.trials() == 0 {
        return Err(Error::domain("no data"));
    }
    match (detector, data) {
        (DetectorModel::OnOff { delta }, Outcomes::Counts(c)) if c.len() == 2 => {
            let f_off = c[0] as f64 / (c[0] + c[1]) as f64;
            onoff_mle(f_off, probe, *delta)
        }
        (DetectorModel::KOutcome { k }, Outcomes::Counts(c)) if c.len() == *k as usize => koutcome_mle(c, probe, *k),
        (DetectorModel::Homodyne { .. }, Outcomes::Samples(s)) => homodyne_mle(s, probe),
        _ => Err(Error::domain(format!("data do not match detector {detector}"))),
    }
}

/// Inverts the no-click fraction `f_off` for η.
pub fn onoff_mle(f_off: f64, probe: &ProbeState, delta: DarkCount) -> Result<f64> {
    if !(0.0..=1.0).contains(&f_off) {
        return Err(Error::domain(format!("no-click fraction {f_off} outside [0, 1]")));
    }
    let delta = delta.get();
    let scaled = f_off * delta.exp();
    let eta = match probe {
        _ if probe.mean_photon_number() == 0.0 => return Err(Error::domain("vacuum carries no information on η")),
        ProbeState::Fock { n } => {
            if scaled >= 1.0 {
                0.0
            } else {
                1.0 - scaled.powf(1.0 / *n as f64)
            }
        }
        ProbeState::Coherent { mean_photons } => {
            if f_off == 0.0 {
                1.0
            } else {
                ((-f_off.ln() - delta) / mean_photons).clamp(0.0, 1.0)
            }
        }
        ProbeState::HeraldedSinglePhoton { xi } => ((1.0 - scaled) / xi).clamp(0.0, 1.0),
        ProbeState::FockMixture { mixture } => {
            let p_off = |eta: f64| -> f64 {
                mixture
                    .components()
                    .iter()
                    .map(|&(j, w)| w * (1.0 - eta).powi(j as i32))
                    .sum::<f64>()
            };
            if scaled >= p_off(0.0) {
                0.0
            } else if scaled <= p_off(1.0) {
                1.0
            } else {
                let (mut lo, mut hi) = (0.0, 1.0);
                while hi - lo > MLE_TOL * 1e-2 {
                    let mid = 0.5 * (lo + hi);
                    if p_off(mid) > scaled {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    };
    interior(eta)
}

fn koutcome_mle(counts: &[u64], probe: &ProbeState, k: u32) -> Result<f64> {
    let ll = |eta: f64| -> f64 {
        let Ok(e) = Efficiency::new(eta) else { return f64::NEG_INFINITY };
        let Ok(dist) = koutcome_distribution(probe, k, e) else { return f64::NEG_INFINITY };
        counts
            .iter()
            .zip(dist.probabilities())
            .filter(|(&c, _)| c > 0)
            .map(|(&c, &p)| c as f64 * p.ln())
            .sum()
    };
    interior(maximize(ll, INTERIOR_EPS, 1.0 - INTERIOR_EPS))
}

fn homodyne_mle(samples: &[f64], probe: &ProbeState) -> Result<f64> {
    let Some(weights) = probe.fock_weights() else {
        // Gaussian mean √(2η)α: η̂ = q̄² / (2α²), with q̄ ≤ 0 mapping to 0
        let alpha2 = probe.mean_photon_number();
        if alpha2 == 0.0 {
            return Err(Error::domain("vacuum carries no information on η"));
        }
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let eta = if mean <= 0.0 { 0.0 } else { mean * mean / (2.0 * alpha2) };
        return interior(eta.min(1.0));
    };
    let top = weights.iter().map(|&(j, _)| j).max().unwrap_or(0) as usize;
    if top == 0 {
        return Err(Error::domain("vacuum carries no information on η"));
    }
    let width = top + 1;
    let mut table = vec![0.0; samples.len() * width];
    for (row, &q) in table.chunks_exact_mut(width).zip(samples) {
        hermite_psi_into(q, row)?;
        row.iter_mut().for_each(|v| *v *= *v);
    }
    let ll = |eta: f64| -> f64 {
        let Ok(e) = Efficiency::new(eta) else { return f64::NEG_INFINITY };
        let Ok(density) = LossyFockDensity::new(&weights, e) else { return f64::NEG_INFINITY };
        let c = density.coefficients();
        table
            .chunks_exact(width)
            .map(|row| row.iter().zip(c).map(|(t, c)| t * c).sum::<f64>().ln())
            .sum()
    };
    interior(maximize(ll, 0.0, 1.0))
}

/// Maximizer of `f` on `[lo, hi]`: best point of a uniform scan, refined by
/// golden-section search over its neighbouring scan cells.
pub fn maximize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let grid = |i: usize| if i == SCAN_POINTS - 1 { hi } else { lo + i as f64 * step };
    let best = (0..SCAN_POINTS)
        .map(|i| (i, f(grid(i))))
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let mut a = grid(best.0.saturating_sub(1));
    let mut b = grid((best.0 + 1).min(SCAN_POINTS - 1));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > MLE_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    // the scan edge can beat the interior optimum when the maximum is on the boundary
    let fx = f(x);
    [(lo, f(lo)), (hi, f(hi))]
        .into_iter()
        .fold((x, fx), |acc, (p, v)| if v > acc.1 { (p, v) } else { acc })
        .0
}
