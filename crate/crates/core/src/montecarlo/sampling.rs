//! Shot-level outcome generation.

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::discrete::{koutcome_distribution, onoff_distribution};
use crate::error::{Error, Result};
use crate::hermite::{hermite_psi_into, MAX_ORDER};
use crate::types::{DetectorModel, Efficiency, ProbeState};

/// Raw data of one simulated experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Outcomes {
    /// Counts per detector outcome; for on/off `[no click, click]`.
    Counts(Vec<u64>),
    /// One quadrature value per shot.
    Samples(Vec<f64>),
}

impl Outcomes {
    pub fn trials(&self) -> u64 {
        match self {
            Outcomes::Counts(c) => c.iter().sum(),
            Outcomes::Samples(s) => s.len() as u64,
        }
    }
}

/// Generator for replicate `replicate` of a campaign seeded with `seed`.
/// Each replicate owns an independent ChaCha stream, so results do not
/// depend on how replicates are scheduled.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

fn binomial(n: u64, p: f64) -> Result<Binomial> {
    Binomial::new(n, p.clamp(0.0, 1.0)).map_err(|e| Error::domain(format!("binomial({n}, {p}): {e}")))
}

/// Multinomial counts drawn as a chain of conditional binomials.
pub fn multinomial<R: Rng + ?Sized>(trials: u64, probabilities: &[f64], rng: &mut R) -> Result<Vec<u64>> {
    let mut counts = vec![0; probabilities.len()];
    let mut remaining = trials;
    let mut mass = 1.0;
    for (i, &p) in probabilities.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == probabilities.len() {
            counts[i] = remaining;
            break;
        }
        let q = if mass > 0.0 { p / mass } else { 0.0 };
        let c = binomial(remaining, q)?.sample(rng);
        counts[i] = c;
        remaining -= c;
        mass -= p;
    }
    Ok(counts)
}

/// Draws `trials` shots of `probe` through a detector of efficiency `eta`.
pub fn simulate_with<R: Rng + ?Sized>(
    probe: &ProbeState,
    detector: &DetectorModel,
    eta: Efficiency,
    trials: u64,
    rng: &mut R,
) -> Result<Outcomes> {
    probe.validate()?;
    match detector {
        DetectorModel::OnOff { delta } => {
            let dist = onoff_distribution(probe, eta, *delta)?;
            let clicks = binomial(trials, dist.probabilities()[1])?.sample(rng);
            Ok(Outcomes::Counts(vec![trials - clicks, clicks]))
        }
        DetectorModel::KOutcome { k } => {
            let dist = koutcome_distribution(probe, *k, eta)?;
            Ok(Outcomes::Counts(multinomial(trials, dist.probabilities(), rng)?))
        }
        DetectorModel::Homodyne { .. } => {
            let sampler = HomodyneSampler::new(probe, eta)?;
            Ok(Outcomes::Samples((0..trials).map(|_| sampler.sample(rng)).collect()))
        }
    }
}

/// `ψ_m(q)² / g_m(q)` for the Gaussian envelope `g_m` of variance `(m+1)/2`.
fn envelope_ratio(m: u32, q: f64, scratch: &mut [f64]) -> f64 {
    hermite_psi_into(q, &mut scratch[..=m as usize]).expect("order within cap");
    let psi = scratch[m as usize];
    let s = (m + 1) as f64;
    psi * psi * (std::f64::consts::PI * s).sqrt() * (q * q / s).exp()
}

/// Rejection constant `C_m ≥ sup_q ψ_m(q)² / g_m(q)`: the supremum found on a
/// 1e-3 grid, times 1.01. The expected acceptance rate is `1/C_m`.
pub fn envelope_constant(m: u32) -> Result<f64> {
    if m > MAX_ORDER {
        return Err(Error::domain(format!("photon number {m} exceeds the cap {MAX_ORDER}")));
    }
    let mut scratch = vec![0.0; m as usize + 1];
    let q_end = (2.0 * m as f64 + 1.0).sqrt() + 6.0;
    let steps = (q_end / 1e-3).ceil() as usize;
    let sup = (0..=steps)
        .map(|i| envelope_ratio(m, i as f64 * 1e-3, &mut scratch))
        .fold(0.0, f64::max);
    Ok(1.01 * sup)
}

/// Exact sampler for the lossy quadrature density of a probe.
///
/// Fock-diagonal probes: pick the photon number j from the probe weights,
/// draw the surviving number m ~ Binomial(j, η), then draw q from `ψ_m²` by
/// rejection from a Gaussian envelope of variance `(m+1)/2`. Coherent probes
/// are Gaussian with mean `√(2η)α` and variance 1/2.
#[derive(Debug, Clone)]
pub struct HomodyneSampler {
    kind: SamplerKind,
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Gaussian { mean: f64 },
    FockDiagonal {
        photons: Vec<u32>,
        cumulative: Vec<f64>,
        losses: Vec<Binomial>,
        envelopes: Vec<f64>,
    },
}

impl HomodyneSampler {
    pub fn new(probe: &ProbeState, eta: Efficiency) -> Result<Self> {
        let kind = match probe.fock_weights() {
            None => SamplerKind::Gaussian {
                mean: (2.0 * eta.get() * probe.mean_photon_number()).sqrt(),
            },
            Some(weights) => {
                let top = weights.iter().map(|&(j, _)| j).max().unwrap_or(0);
                let envelopes = (0..=top).map(envelope_constant).collect::<Result<Vec<_>>>()?;
                let mut acc = 0.0;
                let cumulative = weights
                    .iter()
                    .map(|&(_, w)| {
                        acc += w;
                        acc
                    })
                    .collect();
                let losses = weights
                    .iter()
                    .map(|&(j, _)| binomial(j as u64, eta.get()))
                    .collect::<Result<Vec<_>>>()?;
                SamplerKind::FockDiagonal {
                    photons: weights.iter().map(|&(j, _)| j).collect(),
                    cumulative,
                    losses,
                    envelopes,
                }
            }
        };
        Ok(HomodyneSampler { kind })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            SamplerKind::Gaussian { mean } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + std::f64::consts::FRAC_1_SQRT_2 * z
            }
            SamplerKind::FockDiagonal {
                photons,
                cumulative,
                losses,
                envelopes,
            } => {
                let idx = if photons.len() == 1 {
                    0
                } else {
                    let u: f64 = rng.random::<f64>() * cumulative[cumulative.len() - 1];
                    cumulative.iter().position(|&c| u < c).unwrap_or(photons.len() - 1)
                };
                let m = losses[idx].sample(rng) as u32;
                sample_fock(m, envelopes[m as usize], rng)
            }
        }
    }
}

fn sample_fock<R: Rng + ?Sized>(m: u32, envelope: f64, rng: &mut R) -> f64 {
    let sigma = ((m + 1) as f64 / 2.0).sqrt();
    if m == 0 {
        let z: f64 = StandardNormal.sample(rng);
        return std::f64::consts::FRAC_1_SQRT_2 * z;
    }
    let mut scratch = [0.0; MAX_ORDER as usize + 1];
    loop {
        let z: f64 = StandardNormal.sample(rng);
        let q = sigma * z;
        let u: f64 = rng.random();
        if u * envelope <= envelope_ratio(m, q, &mut scratch) {
            return q;
        }
    }
}
