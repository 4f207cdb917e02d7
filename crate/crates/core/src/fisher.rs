//! Fisher information of discrete outcome distributions and the Cramér–Rao
//! variance bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probabilities below this are treated as exact zeros.
pub const PROBABILITY_FLOOR: f64 = 1e-300;

/// Normalization tolerance for outcome probabilities.
pub const NORM_TOL: f64 = 1e-12;

/// Tolerance on `Σ ∂p = 0`, relative to `max(1, Σ|∂p|)`.
pub const DERIVATIVE_SUM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    FiniteDifference,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::FiniteDifference => "finite_difference",
        }
    }
}

/// A Fisher-information value, or a divergence sentinel.
///
/// Divergent results carry no number; use [`FisherResult::value`] or
/// [`FisherResult::value_or_inf`] depending on whether the caller can handle
/// infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "FisherRecord", try_from = "FisherRecord")]
pub struct FisherResult {
    value: Option<f64>,
    pub method: Method,
    pub error_estimate: f64,
}

impl FisherResult {
    pub fn finite(value: f64, method: Method, error_estimate: f64) -> Self {
        debug_assert!(value.is_finite() && value >= 0.0, "Fisher value {value}");
        FisherResult {
            value: Some(value),
            method,
            error_estimate: error_estimate.abs(),
        }
    }

    /// Closed-form value with a few-ulp error estimate.
    pub fn closed_form(value: f64) -> Self {
        FisherResult::finite(value, Method::ClosedForm, 4.0 * f64::EPSILON * value.abs())
    }

    pub fn divergent(method: Method) -> Self {
        FisherResult {
            value: None,
            method,
            error_estimate: 0.0,
        }
    }

    pub fn zero(method: Method) -> Self {
        FisherResult::finite(0.0, method, 0.0)
    }

    pub fn value(&self) -> Option<f64> {
        self.value
    }

    /// The value, with divergence mapped to `+∞` for ordering comparisons.
    pub fn value_or_inf(&self) -> f64 {
        self.value.unwrap_or(f64::INFINITY)
    }

    pub fn is_divergent(&self) -> bool {
        self.value.is_none()
    }

    /// Fisher information of `repetitions` independent uses of the probe.
    pub fn scaled(self, repetitions: f64) -> Self {
        match self.value {
            Some(v) => FisherResult::finite(v * repetitions, self.method, self.error_estimate * repetitions),
            None => self,
        }
    }
}

/// Wire form: `{value, method, error_estimate, divergent}` with a null value
/// when divergent.
#[derive(Serialize, Deserialize)]
struct FisherRecord {
    value: Option<f64>,
    method: Method,
    error_estimate: f64,
    divergent: bool,
}

impl From<FisherResult> for FisherRecord {
    fn from(r: FisherResult) -> Self {
        FisherRecord {
            value: r.value,
            method: r.method,
            error_estimate: r.error_estimate,
            divergent: r.value.is_none(),
        }
    }
}

impl TryFrom<FisherRecord> for FisherResult {
    type Error = String;
    fn try_from(r: FisherRecord) -> std::result::Result<Self, String> {
        match (r.value, r.divergent) {
            (None, true) => Ok(FisherResult::divergent(r.method)),
            (Some(v), false) if v.is_finite() && v >= 0.0 => Ok(FisherResult::finite(v, r.method, r.error_estimate)),
            _ => Err("inconsistent Fisher record: value and divergent flag disagree".into()),
        }
    }
}

/// Discrete pmf over detector outcomes together with its η-derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    probabilities: Vec<f64>,
    derivatives: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(probabilities: Vec<f64>, derivatives: Vec<f64>) -> Result<Self> {
        if probabilities.len() != derivatives.len() || probabilities.is_empty() {
            return Err(Error::domain("probabilities and derivatives must be non-empty and of equal length"));
        }
        if let Some(p) = probabilities.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::domain(format!("probability {p} is negative or non-finite")));
        }
        if derivatives.iter().any(|d| !d.is_finite()) {
            return Err(Error::domain("derivative is non-finite"));
        }
        let total = neumaier_sum(probabilities.iter().copied());
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!("probabilities sum to {total}")));
        }
        let dsum = neumaier_sum(derivatives.iter().copied());
        let scale = derivatives.iter().map(|d| d.abs()).sum::<f64>().max(1.0);
        if dsum.abs() > DERIVATIVE_SUM_TOL * scale {
            return Err(Error::domain(format!("derivatives sum to {dsum}, expected 0")));
        }
        Ok(OutcomeDistribution {
            probabilities,
            derivatives,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn derivatives(&self) -> &[f64] {
        &self.derivatives
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }
}

/// `Σ_k (∂p_k)² / p_k` over the outcomes.
///
/// Outcomes with zero probability and zero derivative contribute nothing; a
/// zero-probability outcome with nonzero derivative is reported as
/// [`Error::SingularOutcome`].
pub fn discrete_fisher(dist: &OutcomeDistribution) -> Result<FisherResult> {
    let mut terms = Vec::with_capacity(dist.len());
    for (index, (&p, &d)) in dist.probabilities.iter().zip(&dist.derivatives).enumerate() {
        if p < PROBABILITY_FLOOR {
            if d != 0.0 {
                return Err(Error::SingularOutcome { index, derivative: d });
            }
            continue;
        }
        terms.push(d * d / p);
    }
    let value = neumaier_sum(terms.iter().copied());
    Ok(FisherResult::finite(
        value,
        Method::ClosedForm,
        f64::EPSILON * terms.len().max(1) as f64 * value,
    ))
}

/// Like [`discrete_fisher`], but maps a singular outcome to the divergence
/// sentinel.
pub fn discrete_fisher_or_divergent(dist: &OutcomeDistribution) -> Result<FisherResult> {
    match discrete_fisher(dist) {
        Err(Error::SingularOutcome { .. }) => Ok(FisherResult::divergent(Method::ClosedForm)),
        other => other,
    }
}

/// Cramér–Rao lower bound `1/(M·F)` on the variance of an unbiased estimator.
pub fn crb_variance(fisher: &FisherResult, repetitions: u64) -> Result<f64> {
    if repetitions == 0 {
        return Err(Error::domain("repetitions must be at least 1"));
    }
    match fisher.value() {
        None => Ok(0.0),
        Some(v) if v <= 0.0 => Err(Error::ZeroInformation),
        Some(v) => Ok(1.0 / (repetitions as f64 * v)),
    }
}

/// Fisher information from a central finite difference of the outcome
/// probabilities, `h = 1e-6·max(1, η)`.
///
/// `probabilities(η)` must return the full pmf at η; it is evaluated at
/// `η ± h`, so η must sit at least `h` inside (0, 1).
pub fn finite_difference_fisher<F>(probabilities: F, eta: f64) -> Result<FisherResult>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let h = 1e-6 * eta.abs().max(1.0);
    if eta - h <= 0.0 || eta + h >= 1.0 {
        return Err(Error::domain(format!("η = {eta} too close to the boundary for a finite difference")));
    }
    let p = probabilities(eta)?;
    let lo = probabilities(eta - h)?;
    let hi = probabilities(eta + h)?;
    if lo.len() != p.len() || hi.len() != p.len() {
        return Err(Error::domain("probability vectors changed length across η"));
    }
    let mut terms = Vec::with_capacity(p.len());
    for k in 0..p.len() {
        let d = (hi[k] - lo[k]) / (2.0 * h);
        if p[k] < PROBABILITY_FLOOR {
            if d.abs() > 1e-9 {
                return Ok(FisherResult::divergent(Method::FiniteDifference));
            }
            continue;
        }
        terms.push(d * d / p[k]);
    }
    let value = neumaier_sum(terms.iter().copied());
    // truncation O(h²) plus cancellation O(ε/h)
    Ok(FisherResult::finite(value, Method::FiniteDifference, value * (h * h + f64::EPSILON / h)))
}

/// Compensated summation of values sorted by magnitude, so the result does
/// not depend on input order.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.into_iter().collect();
    v.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in v {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
