//! Homodyne quadrature densities of lossy probes and their Fisher
//! information.
//!
//! A Fock state |n⟩ sent through a loss channel of transmissivity η becomes
//! the binomial mixture `Σ_m C(n,m) η^m (1−η)^{n−m} |m⟩⟨m|`, so its quadrature
//! density is `Σ_m C(n,m) η^m (1−η)^{n−m} ψ_m(q)²`. This is normalized for
//! every n and η, unlike the product-of-Hermite form
//! `e^{−2q²}/π Σ_m C(n,m) η^m(1−η)^{n−m} h_m²h_{n−m}²/(2^m m! 2^{n−m}(n−m)!)`,
//! whose n = 0 case already integrates to `1/√(2π)`. Any Fock-diagonal probe
//! (heralded photons, mixtures) reduces to the same structure with mixed
//! coefficients, so one engine covers all of them.
//!
//! The coherent density is the displaced vacuum `e^{−(q−√(2η)α)²}/√π` with
//! Fisher information `α²/η`.
//!
//! Fisher integrals are evaluated directly at each requested η; there is no
//! interpolation over an η table.

use std::cell::RefCell;

use crate::combin::bernstein;
use crate::error::{Error, Result};
use crate::fisher::{FisherResult, Method};
use crate::hermite::{hermite_psi_into, MAX_ORDER};
use crate::quadrature::{integrate, Tolerance};
use crate::types::{Efficiency, FockMixture, ProbeState, QuadratureGrid};

/// Largest η for which numeric Fisher integrals are attempted when the
/// density can develop exact nodes.
pub const ETA_CAP: f64 = 1.0 - 1e-6;

/// Below this vacuum weight the density is treated as able to vanish.
const VACUUM_FLOOR: f64 = 1e-6;

const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// `Σ_m c_m(η) ψ_m(q)²` together with the analytic η-derivatives `c'_m(η)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossyFockDensity {
    coeffs: Vec<f64>,
    derivs: Vec<f64>,
}

impl LossyFockDensity {
    /// Density of the Fock-diagonal probe `Σ_j w_j |j⟩⟨j|` after loss η.
    pub fn new(weights: &[(u32, f64)], eta: Efficiency) -> Result<Self> {
        let top = weights.iter().map(|&(j, _)| j).max().unwrap_or(0);
        if top > MAX_ORDER {
            return Err(Error::domain(format!("photon number {top} exceeds the Hermite cap {MAX_ORDER}")));
        }
        let mut coeffs = vec![0.0; top as usize + 1];
        let mut derivs = vec![0.0; top as usize + 1];
        for &(j, w) in weights {
            for m in 0..=j {
                let (b, db) = bernstein(j, m, eta.get());
                coeffs[m as usize] += w * b;
                derivs[m as usize] += w * db;
            }
        }
        Ok(LossyFockDensity { coeffs, derivs })
    }

    pub fn for_probe(probe: &ProbeState, eta: Efficiency) -> Result<Self> {
        let weights = probe
            .fock_weights()
            .ok_or_else(|| Error::domain("coherent probes have a Gaussian homodyne density"))?;
        LossyFockDensity::new(&weights, eta)
    }

    pub fn max_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn derivatives(&self) -> &[f64] {
        &self.derivs
    }

    /// `(p(q), ∂_η p(q))`, with `scratch.len() == max_order() + 1`.
    pub fn eval_with(&self, q: f64, scratch: &mut [f64]) -> (f64, f64) {
        hermite_psi_into(q, scratch).expect("order checked on construction, q finite");
        let mut p = 0.0;
        let mut dp = 0.0;
        for ((c, d), psi) in self.coeffs.iter().zip(&self.derivs).zip(scratch.iter()) {
            let sq = psi * psi;
            p += c * sq;
            dp += d * sq;
        }
        (p, dp)
    }

    pub fn eval(&self, q: f64) -> (f64, f64) {
        let mut scratch = vec![0.0; self.coeffs.len()];
        self.eval_with(q, &mut scratch)
    }
}

/// `Σ_m C(n,m) η^m (1−η)^{n−m} ψ_m(q)²`.
pub fn pdf_fock_lossy(n: u32, eta: Efficiency, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(LossyFockDensity::new(&[(n, 1.0)], eta)?.eval(q).0)
}

/// `∂_η` of [`pdf_fock_lossy`], from the analytic Bernstein derivatives.
pub fn pdf_fock_lossy_derivative(n: u32, eta: Efficiency, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(LossyFockDensity::new(&[(n, 1.0)], eta)?.eval(q).1)
}

/// `e^{−(q−√(2η)α)²}/√π`: Gaussian with mean `√(2η)α` and variance 1/2.
pub fn pdf_coherent_lossy(alpha: f64, eta: Efficiency, q: f64) -> Result<f64> {
    check_alpha(alpha, false)?;
    check_q(q)?;
    let mu = (2.0 * eta.get()).sqrt() * alpha;
    Ok(INV_SQRT_PI * (-(q - mu) * (q - mu)).exp())
}

fn check_q(q: f64) -> Result<()> {
    if q.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("quadrature value {q} is not finite")))
    }
}

fn check_alpha(alpha: f64, strict: bool) -> Result<()> {
    if alpha.is_finite() && (alpha > 0.0 || (!strict && alpha == 0.0)) {
        Ok(())
    } else {
        Err(Error::domain(format!("coherent amplitude {alpha} out of range")))
    }
}

fn tolerance(grid: &QuadratureGrid) -> Tolerance {
    Tolerance {
        abs: grid.abs_tol,
        rel: grid.rel_tol,
        max_subdivisions: grid.max_subdivisions,
    }
}

/// Fisher information `∫ (∂_η p)² / p dq` for a Fock-diagonal probe given by
/// `weights`.
///
/// The integrand is even in q, so only `[0, q_max]` is integrated. Beyond
/// [`ETA_CAP`], when the vacuum weight of the lossy state drops below 1e-6,
/// the density has (near-)nodes where the integral diverges and the
/// divergence sentinel is returned.
pub fn fisher_homodyne_fock_diagonal(weights: &[(u32, f64)], eta: Efficiency, grid: &QuadratureGrid) -> Result<FisherResult> {
    grid.validate()?;
    let density = LossyFockDensity::new(weights, eta)?;
    if density.derivs.iter().all(|&d| d == 0.0) {
        return Ok(FisherResult::zero(Method::Quadrature));
    }
    if eta.get() > ETA_CAP && density.coeffs[0] < VACUUM_FLOOR {
        return Ok(FisherResult::divergent(Method::Quadrature));
    }
    let q_max = grid.half_range(density.max_order() as f64);
    let scratch = RefCell::new(vec![0.0; density.max_order() + 1]);
    let integrand = |q: f64| {
        let (p, dp) = density.eval_with(q, &mut scratch.borrow_mut());
        if p > 0.0 {
            dp * dp / p
        } else {
            0.0
        }
    };
    let r = integrate(integrand, 0.0, q_max, tolerance(grid))?;
    Ok(FisherResult::finite(2.0 * r.value, Method::Quadrature, 2.0 * r.abs_error))
}

/// Homodyne Fisher information of the Fock state |n⟩.
///
/// Defined for `0 ≤ η ≤ 1 − 1e-6`; above that the sentinel is returned. At
/// η = 0 the value is the finite limit `2n²`.
pub fn fisher_homodyne_fock(n: u32, eta: Efficiency, grid: &QuadratureGrid) -> Result<FisherResult> {
    fisher_homodyne_fock_diagonal(&[(n, 1.0)], eta, grid)
}

/// Heralded single photon, density `ξη ψ_1² + (1−ξη) ψ_0²`.
pub fn fisher_homodyne_heralded(xi: f64, eta: Efficiency, grid: &QuadratureGrid) -> Result<FisherResult> {
    let probe = ProbeState::heralded(xi)?;
    fisher_homodyne_fock_diagonal(&probe.fock_weights().expect("Fock diagonal"), eta, grid)
}

pub fn fisher_homodyne_mixture(mixture: &FockMixture, eta: Efficiency, grid: &QuadratureGrid) -> Result<FisherResult> {
    fisher_homodyne_fock_diagonal(mixture.components(), eta, grid)
}

/// `α²/η` for a coherent probe in phase with the local oscillator.
pub fn fisher_homodyne_coherent(alpha: f64, eta: Efficiency) -> Result<FisherResult> {
    check_alpha(alpha, true)?;
    if eta.get() == 0.0 {
        return Ok(FisherResult::divergent(Method::ClosedForm));
    }
    Ok(FisherResult::closed_form(alpha * alpha / eta.get()))
}

/// The coherent Fisher integral evaluated by quadrature over the Gaussian
/// density, as an independent check of `α²/η`.
pub fn fisher_homodyne_coherent_quadrature(alpha: f64, eta: Efficiency, grid: &QuadratureGrid) -> Result<FisherResult> {
    check_alpha(alpha, true)?;
    grid.validate()?;
    let eta = eta.get();
    if eta == 0.0 {
        return Ok(FisherResult::divergent(Method::Quadrature));
    }
    let mu = (2.0 * eta).sqrt() * alpha;
    let dmu = alpha / (2.0 * eta).sqrt();
    let half = grid.half_range(alpha * alpha);
    let integrand = |q: f64| {
        let p = INV_SQRT_PI * (-(q - mu) * (q - mu)).exp();
        let score = 2.0 * (q - mu) * dmu;
        p * score * score
    };
    let r = integrate(integrand, mu - half, mu + half, tolerance(grid))?;
    Ok(FisherResult::finite(r.value, Method::Quadrature, r.abs_error))
}

/// Homodyne Fisher information for any probe.
pub fn fisher_homodyne(probe: &ProbeState, eta: Efficiency, grid: &QuadratureGrid) -> Result<FisherResult> {
    match probe {
        ProbeState::Coherent { mean_photons } if *mean_photons == 0.0 => Ok(FisherResult::zero(Method::ClosedForm)),
        ProbeState::Coherent { .. } if eta.get() == 0.0 => Ok(FisherResult::divergent(Method::ClosedForm)),
        // |α|²/η, without the rounding of squaring √n̄
        ProbeState::Coherent { mean_photons } => Ok(FisherResult::closed_form(mean_photons / eta.get())),
        ProbeState::Fock { n } => fisher_homodyne_fock(*n, eta, grid),
        ProbeState::HeraldedSinglePhoton { xi } => fisher_homodyne_heralded(*xi, eta, grid),
        ProbeState::FockMixture { mixture } => fisher_homodyne_mixture(mixture, eta, grid),
    }
}
