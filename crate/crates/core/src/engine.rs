//! Single entry point mapping a (probe, detector, η) triple to the matching
//! Fisher-information routine.

use crate::discrete::{fisher_koutcome, fisher_koutcome_fock, fisher_onoff};
use crate::error::{Error, Result};
use crate::fisher::FisherResult;
use crate::homodyne::fisher_homodyne;
use crate::types::{DetectorModel, Efficiency, ProbeState};

pub fn fisher_information(probe: &ProbeState, detector: &DetectorModel, eta: Efficiency) -> Result<FisherResult> {
    probe.validate()?;
    match detector {
        DetectorModel::OnOff { delta } => fisher_onoff(probe, eta, *delta),
        DetectorModel::KOutcome { k } => match probe {
            ProbeState::Fock { n } => fisher_koutcome_fock(*n, *k, eta),
            _ => fisher_koutcome(probe, *k, eta),
        },
        DetectorModel::Homodyne { grid } => fisher_homodyne(probe, eta, grid),
    }
}

/// Whether the detector's Fisher values come from closed forms, which are
/// well defined up to the η endpoints.
pub fn is_closed_form(probe: &ProbeState, detector: &DetectorModel) -> bool {
    !matches!(detector, DetectorModel::Homodyne { .. }) || matches!(probe, ProbeState::Coherent { .. })
}

/// Fisher information of `repetitions` independent uses of the probe.
pub fn fisher_repeated(
    probe: &ProbeState,
    detector: &DetectorModel,
    eta: Efficiency,
    repetitions: u32,
) -> Result<FisherResult> {
    if repetitions == 0 {
        return Err(Error::domain("repetitions must be at least 1"));
    }
    Ok(fisher_information(probe, detector, eta)?.scaled(repetitions as f64))
}
