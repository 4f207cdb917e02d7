//! Domain types shared by every Fisher-information engine.
//!
//! Values here are validated on construction, so downstream code can assume
//! `0 ≤ η ≤ 1`, `δ ≥ 0`, normalized mixtures and `K ≥ 2`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Detector efficiency η, the parameter being estimated.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Efficiency(f64);

impl Efficiency {
    pub const ONE: Efficiency = Efficiency(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(Efficiency(value))
        } else {
            Err(Error::domain(format!("efficiency {value} outside [0, 1]")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// True when η lies strictly inside (0, 1).
    pub fn is_interior(self) -> bool {
        self.0 > 0.0 && self.0 < 1.0
    }
}

impl TryFrom<f64> for Efficiency {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Efficiency::new(v)
    }
}

impl From<Efficiency> for f64 {
    fn from(e: Efficiency) -> f64 {
        e.0
    }
}

/// Dark-count exponent δ: the no-click probability is multiplied by `e^{-δ}`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DarkCount(f64);

impl DarkCount {
    pub const NONE: DarkCount = DarkCount(0.0);

    pub fn new(delta: f64) -> Result<Self> {
        if delta.is_finite() && delta >= 0.0 {
            Ok(DarkCount(delta))
        } else {
            Err(Error::domain(format!("dark-count exponent {delta} must be finite and ≥ 0")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_noiseless(self) -> bool {
        self.0 == 0.0
    }
}

impl Default for DarkCount {
    fn default() -> Self {
        DarkCount::NONE
    }
}

impl TryFrom<f64> for DarkCount {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        DarkCount::new(v)
    }
}

impl From<DarkCount> for f64 {
    fn from(d: DarkCount) -> f64 {
        d.0
    }
}

/// Tolerance on the total weight of a Fock mixture.
pub const MIXTURE_NORM_TOL: f64 = 1e-12;

/// Incoherent mixture of Fock states, `Σ_j w_j |j⟩⟨j|`.
///
/// Components are kept sorted by photon number with duplicates merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u32, f64)>", into = "Vec<(u32, f64)>")]
pub struct FockMixture {
    components: Vec<(u32, f64)>,
}

impl FockMixture {
    pub fn new(components: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        let mut merged: Vec<(u32, f64)> = Vec::new();
        let mut raw: Vec<(u32, f64)> = components.into_iter().collect();
        if raw.is_empty() {
            return Err(Error::domain("mixture has no components"));
        }
        raw.sort_by_key(|&(j, _)| j);
        for (j, w) in raw {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::domain(format!("mixture weight {w} for |{j}⟩ is negative or non-finite")));
            }
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += w,
                _ => merged.push((j, w)),
            }
        }
        let total: f64 = merged.iter().map(|&(_, w)| w).sum();
        if (total - 1.0).abs() > MIXTURE_NORM_TOL {
            return Err(Error::domain(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(FockMixture { components: merged })
    }

    pub fn components(&self) -> &[(u32, f64)] {
        &self.components
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.components.iter().map(|&(j, w)| w * j as f64).sum()
    }

    pub fn max_photons(&self) -> u32 {
        self.components.iter().map(|&(j, _)| j).max().unwrap_or(0)
    }
}

impl TryFrom<Vec<(u32, f64)>> for FockMixture {
    type Error = Error;
    fn try_from(v: Vec<(u32, f64)>) -> Result<Self> {
        FockMixture::new(v)
    }
}

impl From<FockMixture> for Vec<(u32, f64)> {
    fn from(m: FockMixture) -> Self {
        m.components
    }
}

/// Probe state sent into the detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbeState {
    Fock { n: u32 },
    /// Coherent state with real amplitude α ≥ 0, in phase with the local
    /// oscillator; `mean_photons` is |α|².
    Coherent { mean_photons: f64 },
    /// `ξ|1⟩⟨1| + (1−ξ)|0⟩⟨0|`.
    HeraldedSinglePhoton { xi: f64 },
    FockMixture { mixture: FockMixture },
}

impl ProbeState {
    pub fn fock(n: u32) -> Self {
        ProbeState::Fock { n }
    }

    pub fn coherent(mean_photons: f64) -> Result<Self> {
        if mean_photons.is_finite() && mean_photons >= 0.0 {
            Ok(ProbeState::Coherent { mean_photons })
        } else {
            Err(Error::domain(format!("coherent mean photon number {mean_photons} must be ≥ 0")))
        }
    }

    pub fn heralded(xi: f64) -> Result<Self> {
        if xi.is_finite() && (0.0..=1.0).contains(&xi) {
            Ok(ProbeState::HeraldedSinglePhoton { xi })
        } else {
            Err(Error::domain(format!("heralding efficiency {xi} outside [0, 1]")))
        }
    }

    pub fn mixture(mixture: FockMixture) -> Self {
        ProbeState::FockMixture { mixture }
    }

    pub fn mean_photon_number(&self) -> f64 {
        match self {
            ProbeState::Fock { n } => *n as f64,
            ProbeState::Coherent { mean_photons } => *mean_photons,
            ProbeState::HeraldedSinglePhoton { xi } => *xi,
            ProbeState::FockMixture { mixture } => mixture.mean_photon_number(),
        }
    }

    /// Photon-number distribution for probes that are diagonal in the Fock
    /// basis. Coherent states return `None`.
    pub fn fock_weights(&self) -> Option<Vec<(u32, f64)>> {
        match self {
            ProbeState::Fock { n } => Some(vec![(*n, 1.0)]),
            ProbeState::HeraldedSinglePhoton { xi } => Some(vec![(0, 1.0 - xi), (1, *xi)]),
            ProbeState::FockMixture { mixture } => Some(mixture.components().to_vec()),
            ProbeState::Coherent { .. } => None,
        }
    }

    /// Re-check invariants; useful after deserializing.
    pub fn validate(&self) -> Result<()> {
        match self {
            ProbeState::Fock { .. } => Ok(()),
            ProbeState::Coherent { mean_photons } => ProbeState::coherent(*mean_photons).map(|_| ()),
            ProbeState::HeraldedSinglePhoton { xi } => ProbeState::heralded(*xi).map(|_| ()),
            ProbeState::FockMixture { mixture } => FockMixture::new(mixture.components().iter().copied()).map(|_| ()),
        }
    }
}

impl fmt::Display for ProbeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeState::Fock { n } => write!(f, "fock:{n}"),
            ProbeState::Coherent { mean_photons } => write!(f, "coherent:{mean_photons}"),
            ProbeState::HeraldedSinglePhoton { xi } => write!(f, "heralded:{xi}"),
            ProbeState::FockMixture { mixture } => {
                write!(f, "mixture:")?;
                for (i, (j, w)) in mixture.components().iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    write!(f, "{w}*{j}")?;
                }
                Ok(())
            }
        }
    }
}

/// Parses `fock:N`, `coherent:NBAR` and `heralded:XI`. Mixtures come from
/// files and are handled by the CLI.
impl FromStr for ProbeState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::domain(format!("probe '{s}' is not of the form kind:value")))?;
        let bad = |_| Error::domain(format!("cannot parse probe argument '{arg}'"));
        match kind {
            "fock" => Ok(ProbeState::fock(arg.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?)),
            "coherent" => ProbeState::coherent(arg.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?),
            "heralded" => ProbeState::heralded(arg.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?),
            _ => Err(Error::domain(format!("unknown probe kind '{kind}'"))),
        }
    }
}

/// Integration settings for homodyne Fisher integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureGrid {
    /// Half-range of the quadrature axis. `None` picks `sqrt(2n+1) + 10`
    /// from the largest photon number in the probe.
    pub q_max: Option<f64>,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        QuadratureGrid {
            q_max: None,
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureGrid {
    pub fn half_range(&self, max_photons: f64) -> f64 {
        self.q_max.unwrap_or_else(|| (2.0 * max_photons + 1.0).sqrt() + 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(q) = self.q_max {
            if !(q.is_finite() && q > 0.0) {
                return Err(Error::domain(format!("q_max {q} must be positive")));
            }
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::domain("quadrature tolerances must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::domain("max_subdivisions must be at least 1"));
        }
        Ok(())
    }
}

/// Detector family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DetectorModel {
    OnOff { delta: DarkCount },
    /// Resolves 0..=K−2 photons exactly plus one overflow outcome.
    KOutcome { k: u32 },
    Homodyne { grid: QuadratureGrid },
}

impl DetectorModel {
    pub fn onoff(delta: DarkCount) -> Self {
        DetectorModel::OnOff { delta }
    }

    pub fn koutcome(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain(format!("K-outcome detector needs K ≥ 2, got {k}")));
        }
        Ok(DetectorModel::KOutcome { k })
    }

    pub fn homodyne() -> Self {
        DetectorModel::Homodyne {
            grid: QuadratureGrid::default(),
        }
    }

    pub fn dark_count(&self) -> DarkCount {
        match self {
            DetectorModel::OnOff { delta } => *delta,
            _ => DarkCount::NONE,
        }
    }

    pub fn outcome_count(&self) -> Option<usize> {
        match self {
            DetectorModel::OnOff { .. } => Some(2),
            DetectorModel::KOutcome { k } => Some(*k as usize),
            DetectorModel::Homodyne { .. } => None,
        }
    }

    /// Parses `onoff`, `koutcome:K` or `homodyne`, attaching `delta` to on/off.
    pub fn parse(s: &str, delta: DarkCount) -> Result<Self> {
        match s.split_once(':') {
            None if s == "onoff" => Ok(DetectorModel::onoff(delta)),
            None if s == "homodyne" => Ok(DetectorModel::homodyne()),
            Some(("koutcome", k)) => {
                let k = k
                    .parse()
                    .map_err(|_| Error::domain(format!("cannot parse K from '{k}'")))?;
                DetectorModel::koutcome(k)
            }
            _ => Err(Error::domain(format!("unknown detector '{s}'"))),
        }
    }
}

impl fmt::Display for DetectorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetectorModel::OnOff { .. } => write!(f, "onoff"),
            DetectorModel::KOutcome { k } => write!(f, "koutcome:{k}"),
            DetectorModel::Homodyne { .. } => write!(f, "homodyne"),
        }
    }
}
