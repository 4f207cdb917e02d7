//! Comparisons built on the Fisher engines: fixed-energy sweeps, crossover
//! search, heralding-efficiency thresholds and the figure configurations.

use rayon::prelude::*;
use serde::Serialize;

use crate::discrete::fisher_onoff_small_eta;
use crate::engine::fisher_information;
use crate::error::{Error, Result};
use crate::fisher::FisherResult;
use crate::types::{DarkCount, DetectorModel, Efficiency, ProbeState};

/// Allowed spread of `repetitions × n̄` across curves of one comparison.
pub const ENERGY_TOL: f64 = 1e-12;

/// Step of the sign-change scan preceding bisection.
pub const SCAN_STEP: f64 = 1e-3;

/// Final bracket width of the crossover bisection.
pub const CROSSOVER_TOL: f64 = 1e-8;

/// Final bracket width of the threshold bisection in ξ.
pub const THRESHOLD_TOL: f64 = 1e-12;

/// Relative gap below which ξ = 1 counts as tying with the reference.
const TIE_TOL: f64 = 1e-12;

/// Homodyne stand-in for the η → 1 limit, and the alternative point used to
/// report how much ξ* depends on it.
pub const HOMODYNE_EVAL_ETA: f64 = 1.0 - 1e-4;
pub const HOMODYNE_SENSITIVITY_ETA: f64 = 1.0 - 1e-3;

/// One curve of a comparison: `repetitions` independent uses of `probe`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSpec {
    pub label: String,
    pub probe: ProbeState,
    pub detector: DetectorModel,
    pub repetitions: u32,
}

impl CurveSpec {
    pub fn new(label: impl Into<String>, probe: ProbeState, detector: DetectorModel, repetitions: u32) -> Self {
        CurveSpec {
            label: label.into(),
            probe,
            detector,
            repetitions,
        }
    }

    pub fn total_energy(&self) -> f64 {
        self.repetitions as f64 * self.probe.mean_photon_number()
    }

    /// Fisher information of all repetitions at η.
    pub fn fisher(&self, eta: Efficiency) -> Result<FisherResult> {
        if self.repetitions == 0 {
            return Err(Error::domain(format!("curve '{}' has zero repetitions", self.label)));
        }
        Ok(fisher_information(&self.probe, &self.detector, eta)?.scaled(self.repetitions as f64))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonCurve {
    pub label: String,
    pub probe: ProbeState,
    pub detector: DetectorModel,
    pub repetitions: u32,
    pub eta_grid: Vec<Efficiency>,
    pub values: Vec<FisherResult>,
}

impl ComparisonCurve {
    pub fn total_energy(&self) -> f64 {
        self.repetitions as f64 * self.probe.mean_photon_number()
    }

    /// Value at the grid point closest to η.
    pub fn at(&self, eta: f64) -> Option<&FisherResult> {
        self.eta_grid
            .iter()
            .zip(&self.values)
            .min_by(|a, b| (a.0.get() - eta).abs().total_cmp(&(b.0.get() - eta).abs()))
            .map(|(_, v)| v)
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<Efficiency>> {
    if n < 2 {
        return Efficiency::new(lo).map(|e| vec![e]);
    }
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            Efficiency::new(if i == n - 1 { hi } else { lo + t * (hi - lo) })
        })
        .collect()
}

/// The 99-point grid 0.01, 0.02, …, 0.99 used by the figures.
pub fn figure_grid() -> Vec<Efficiency> {
    (1..=99).map(|i| Efficiency::new(i as f64 / 100.0).expect("inside [0, 1]")).collect()
}

/// Evaluates every curve on the grid without checking energies. Grid points
/// are processed in parallel; output order follows the input.
pub fn sweep_curves(curves: &[CurveSpec], eta_grid: &[Efficiency]) -> Result<Vec<ComparisonCurve>> {
    curves
        .iter()
        .map(|c| {
            let values = eta_grid
                .par_iter()
                .map(|&eta| c.fisher(eta))
                .collect::<Result<Vec<_>>>()?;
            Ok(ComparisonCurve {
                label: c.label.clone(),
                probe: c.probe.clone(),
                detector: c.detector.clone(),
                repetitions: c.repetitions,
                eta_grid: eta_grid.to_vec(),
                values,
            })
        })
        .collect()
}

/// Checks that all curves spend the same total mean energy.
pub fn check_equal_energy(curves: &[CurveSpec]) -> Result<()> {
    let Some(first) = curves.first() else {
        return Ok(());
    };
    let reference = first.total_energy();
    for c in &curves[1..] {
        let e = c.total_energy();
        if (e - reference).abs() > ENERGY_TOL * reference.abs().max(1.0) {
            return Err(Error::EnergyMismatch(format!(
                "'{}' spends {e} photons but '{}' spends {reference}",
                c.label, first.label
            )));
        }
    }
    Ok(())
}

/// [`sweep_curves`] for curves that must share the same total mean energy.
pub fn fixed_energy_sweep(curves: &[CurveSpec], eta_grid: &[Efficiency]) -> Result<Vec<ComparisonCurve>> {
    check_equal_energy(curves)?;
    sweep_curves(curves, eta_grid)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossoverResult {
    pub eta_star: Option<Efficiency>,
    /// Final bracket; `F_A − F_B` changes sign across it when a root exists,
    /// otherwise the searched interval.
    pub bracket: (f64, f64),
    /// `|F_A − F_B|` at η*, or the smallest gap seen on the scan.
    pub residual: f64,
    /// Number of sign changes found by the scan.
    pub sign_changes: usize,
    /// Scan point with the smallest `|F_A − F_B|`.
    pub closest_eta: f64,
}

/// Locates the first η where `f_a − f_b` changes sign inside `bracket`.
///
/// The bracket is scanned in steps of [`SCAN_STEP`]; the first sign change
/// is refined by bisection to [`CROSSOVER_TOL`]. Endpoint failures are
/// [`Error::BracketError`]; interior failures propagate unchanged.
pub fn find_crossover<A, B>(f_a: A, f_b: B, bracket: (f64, f64)) -> Result<CrossoverResult>
where
    A: Fn(Efficiency) -> Result<f64>,
    B: Fn(Efficiency) -> Result<f64>,
{
    let (lo, hi) = bracket;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::domain(format!("empty bracket ({lo}, {hi})")));
    }
    let gap = |x: f64| -> Result<f64> {
        let eta = Efficiency::new(x)?;
        Ok(f_a(eta)? - f_b(eta)?)
    };
    let endpoint = |x: f64| {
        gap(x).map_err(|e| Error::BracketError {
            eta: x,
            reason: e.to_string(),
        })
    };
    let g_lo = endpoint(lo)?;
    let g_hi = endpoint(hi)?;

    let steps = ((hi - lo) / SCAN_STEP).ceil() as usize;
    let mut prev = (lo, g_lo);
    let mut first_change = None;
    let mut sign_changes = 0;
    let mut closest = (lo, g_lo.abs());
    for i in 1..=steps {
        let x = if i == steps { hi } else { lo + i as f64 * SCAN_STEP };
        let g = if i == steps { g_hi } else { gap(x)? };
        if g.abs() < closest.1 {
            closest = (x, g.abs());
        }
        if prev.1 == 0.0 || prev.1.signum() != g.signum() {
            sign_changes += 1;
            first_change.get_or_insert((prev.0, x, prev.1));
        }
        prev = (x, g);
    }

    let Some((mut a, mut b, mut g_a)) = first_change else {
        return Ok(CrossoverResult {
            eta_star: None,
            bracket,
            residual: closest.1,
            sign_changes: 0,
            closest_eta: closest.0,
        });
    };
    if g_a != 0.0 {
        while b - a > CROSSOVER_TOL * 0.1 {
            let mid = 0.5 * (a + b);
            let g_mid = gap(mid)?;
            if g_mid == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if g_mid.signum() == g_a.signum() {
                a = mid;
                g_a = g_mid;
            } else {
                b = mid;
            }
        }
    } else {
        b = a;
    }
    let star = 0.5 * (a + b);
    Ok(CrossoverResult {
        eta_star: Some(Efficiency::new(star)?),
        bracket: (a, b),
        residual: gap(star)?.abs(),
        sign_changes,
        closest_eta: closest.0,
    })
}

/// [`find_crossover`] between two curve specifications.
pub fn find_curve_crossover(a: &CurveSpec, b: &CurveSpec, bracket: (f64, f64)) -> Result<CrossoverResult> {
    find_crossover(|e| a.fisher(e).map(|f| f.value_or_inf()), |e| b.fisher(e).map(|f| f.value_or_inf()), bracket)
}

/// Default η for threshold comparisons: exactly 1 for on/off detectors,
/// [`HOMODYNE_EVAL_ETA`] otherwise.
pub fn default_threshold_eta(detector: &DetectorModel) -> Efficiency {
    match detector {
        DetectorModel::OnOff { .. } => Efficiency::ONE,
        _ => Efficiency::new(HOMODYNE_EVAL_ETA).expect("inside [0, 1]"),
    }
}

/// The heralding efficiency ξ* at which a heralded single photon matches the
/// Fisher information of `reference` at `eta_eval`.
///
/// `F_heralded` increases with ξ, so ξ* is unique and found by bisection on
/// `[0, 1]`. Returns 1 when the heralded photon at ξ = 1 exactly ties with the
/// reference (to relative 1e-12). No energy matching is applied.
pub fn heralding_threshold(detector: &DetectorModel, reference: &ProbeState, eta_eval: Efficiency) -> Result<f64> {
    let target = fisher_information(reference, detector, eta_eval)?.value_or_inf();
    let heralded = |xi: f64| -> Result<f64> {
        Ok(fisher_information(&ProbeState::heralded(xi)?, detector, eta_eval)?.value_or_inf())
    };
    let best = heralded(1.0)?;
    if best == target || (best - target).abs() <= TIE_TOL * target.abs() {
        return Ok(1.0);
    }
    if best < target {
        return Err(Error::NoThreshold { best, reference: target });
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > THRESHOLD_TOL {
        let mid = 0.5 * (lo + hi);
        if heralded(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// ξ* at the default evaluation point, plus the shift caused by moving the
/// evaluation point (reported for detectors where η = 1 is not used exactly).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub xi_star: f64,
    pub eta_eval: Efficiency,
    pub sensitivity: Option<ThresholdSensitivity>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdSensitivity {
    pub eta_alt: Efficiency,
    pub xi_alt: f64,
    pub shift: f64,
}

pub fn threshold_report(detector: &DetectorModel, reference: &ProbeState, eta_eval: Option<Efficiency>) -> Result<ThresholdReport> {
    let eta_eval = eta_eval.unwrap_or_else(|| default_threshold_eta(detector));
    let xi_star = heralding_threshold(detector, reference, eta_eval)?;
    let sensitivity = match detector {
        DetectorModel::OnOff { .. } => None,
        _ => {
            let eta_alt = Efficiency::new(HOMODYNE_SENSITIVITY_ETA)?;
            let xi_alt = heralding_threshold(detector, reference, eta_alt)?;
            Some(ThresholdSensitivity {
                eta_alt,
                xi_alt,
                shift: (xi_alt - xi_star).abs(),
            })
        }
    };
    Ok(ThresholdReport {
        xi_star,
        eta_eval,
        sensitivity,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticRow {
    pub eta: f64,
    pub exact: f64,
    pub approx: f64,
    pub relative_error: f64,
}

/// Relative error of the small-η on/off expansion against the exact value,
/// for η in `(0, 0.1]`.
pub fn asymptotic_error_report(probe: &ProbeState, delta: DarkCount, eta_grid: &[Efficiency]) -> Result<Vec<AsymptoticRow>> {
    let detector = DetectorModel::onoff(delta);
    eta_grid
        .iter()
        .map(|&eta| {
            if !(eta.get() > 0.0 && eta.get() <= 0.1) {
                return Err(Error::domain(format!("η = {} outside the small-η region (0, 0.1]", eta.get())));
            }
            let exact = fisher_information(probe, &detector, eta)?.value_or_inf();
            let approx = fisher_onoff_small_eta(probe, eta, delta)?.value_or_inf();
            Ok(AsymptoticRow {
                eta: eta.get(),
                exact,
                approx,
                relative_error: (exact - approx).abs() / exact,
            })
        })
        .collect()
}

/// Probe and energy configurations of the four comparison figures.
///
/// 1. on/off, δ = 0: 3×|1⟩, |3⟩, 3×coherent(1), coherent(3)
/// 2. on/off, δ = 0.05: 5×|1⟩, |5⟩, coherent(5)
/// 3. homodyne: 4×|1⟩, 2×|2⟩, |4⟩, coherent(4)
/// 4. on/off, δ = 0: heralded ξ = 0.8, heralded ξ = 1/e, coherent(1); not
///    energy matched
pub fn figure_curves(figure: u8) -> Result<Vec<CurveSpec>> {
    let coh = |x: f64| ProbeState::coherent(x).expect("positive mean");
    let her = |xi: f64| ProbeState::heralded(xi).expect("ξ in [0, 1]");
    let curves = match figure {
        1 => {
            let d = DetectorModel::onoff(DarkCount::NONE);
            vec![
                CurveSpec::new("3xfock:1", ProbeState::fock(1), d.clone(), 3),
                CurveSpec::new("fock:3", ProbeState::fock(3), d.clone(), 1),
                CurveSpec::new("3xcoherent:1", coh(1.0), d.clone(), 3),
                CurveSpec::new("coherent:3", coh(3.0), d, 1),
            ]
        }
        2 => {
            let d = DetectorModel::onoff(DarkCount::new(0.05)?);
            vec![
                CurveSpec::new("5xfock:1", ProbeState::fock(1), d.clone(), 5),
                CurveSpec::new("fock:5", ProbeState::fock(5), d.clone(), 1),
                CurveSpec::new("coherent:5", coh(5.0), d, 1),
            ]
        }
        3 => {
            let d = DetectorModel::homodyne();
            vec![
                CurveSpec::new("4xfock:1", ProbeState::fock(1), d.clone(), 4),
                CurveSpec::new("2xfock:2", ProbeState::fock(2), d.clone(), 2),
                CurveSpec::new("fock:4", ProbeState::fock(4), d.clone(), 1),
                CurveSpec::new("coherent:4", coh(4.0), d, 1),
            ]
        }
        4 => {
            let d = DetectorModel::onoff(DarkCount::NONE);
            vec![
                CurveSpec::new("heralded:0.8", her(0.8), d.clone(), 1),
                CurveSpec::new("heralded:1/e", her((-1.0f64).exp()), d.clone(), 1),
                CurveSpec::new("coherent:1", coh(1.0), d, 1),
            ]
        }
        _ => return Err(Error::domain(format!("unknown figure {figure}; expected 1 to 4"))),
    };
    Ok(curves)
}

/// Curves of a figure on [`figure_grid`]. Figures 1 to 3 are energy checked.
pub fn reproduce_figure(figure: u8) -> Result<Vec<ComparisonCurve>> {
    let curves = figure_curves(figure)?;
    if figure == 4 {
        sweep_curves(&curves, &figure_grid())
    } else {
        fixed_energy_sweep(&curves, &figure_grid())
    }
}
