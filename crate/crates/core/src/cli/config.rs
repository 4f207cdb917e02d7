//! TOML inputs: sweep specifications and Fock-mixture files.
//!
//! Every file carries `schema_version`; only [`SCHEMA_VERSION`] is accepted.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::CurveSpec;
use crate::error::{Error, Result};
use crate::types::{DarkCount, DetectorModel, Efficiency, FockMixture, ProbeState, QuadratureGrid};

pub const SCHEMA_VERSION: u32 = 1;

/// Numeric (quadrature) curves are only evaluated inside this η range.
pub const NUMERIC_ETA_RANGE: (f64, f64) = (1e-4, 1.0 - 1e-6);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl GridSpec {
    /// Parses `START:STOP:COUNT`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(Error::Config(format!("η grid '{s}' is not START:STOP:COUNT")));
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| Error::Config(format!("η grid '{s}': {e}")));
        Ok(GridSpec {
            start: num(start)?,
            stop: num(stop)?,
            count: count
                .trim()
                .parse()
                .map_err(|e| Error::Config(format!("η grid '{s}': {e}")))?,
            spacing: Spacing::Linear,
        })
    }

    pub fn points(&self) -> Result<Vec<Efficiency>> {
        if self.count == 0 {
            return Err(Error::Config("η grid needs at least one point".into()));
        }
        if self.start.is_nan() || self.stop.is_nan() || self.start > self.stop {
            return Err(Error::Config(format!("η grid start {} exceeds stop {}", self.start, self.stop)));
        }
        if self.count == 1 {
            return Ok(vec![Efficiency::new(self.start)?]);
        }
        let n = self.count - 1;
        match self.spacing {
            Spacing::Linear => crate::analysis::linear_grid(self.start, self.stop, self.count),
            Spacing::Log => {
                if self.start <= 0.0 {
                    return Err(Error::Config("log-spaced η grid must start above 0".into()));
                }
                let (a, b) = (self.start.ln(), self.stop.ln());
                (0..=n)
                    .map(|i| {
                        // endpoints exact; exp(ln x) is not
                        let v = match i {
                            0 => self.start,
                            i if i == n => self.stop,
                            _ => (a + (b - a) * i as f64 / n as f64).exp(),
                        };
                        Efficiency::new(v)
                    })
                    .collect()
            }
        }
    }
}

/// Parses a probe flag; `mixture:FILE` loads a mixture file relative to
/// `base` when the path is relative.
pub fn parse_probe(s: &str, base: Option<&Path>) -> Result<ProbeState> {
    match s.strip_prefix("mixture:") {
        Some(file) => {
            let path = match base {
                Some(b) if Path::new(file).is_relative() => b.join(file),
                _ => PathBuf::from(file),
            };
            Ok(ProbeState::mixture(load_mixture(&path)?))
        }
        None => s.parse(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MixtureFile {
    schema_version: u32,
    component: Vec<MixtureComponent>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MixtureComponent {
    photons: u32,
    weight: f64,
}

/// Reads
///
/// ```toml
/// schema_version = 1
/// [[component]]
/// photons = 1
/// weight = 0.8
/// ```
pub fn load_mixture(path: &Path) -> Result<FockMixture> {
    let text = read(path)?;
    let file: MixtureFile = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    check_schema(file.schema_version, path)?;
    FockMixture::new(file.component.into_iter().map(|c| (c.photons, c.weight)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveEntry {
    #[serde(default)]
    pub label: Option<String>,
    pub probe: String,
    #[serde(default = "one")]
    pub repetitions: u32,
}

fn one() -> u32 {
    1
}

/// A sweep specification file.
///
/// ```toml
/// schema_version = 1
/// detector = "onoff"        # or "koutcome:K", "homodyne"
/// delta = 0.0
/// fixed_energy = true
/// format = "csv"            # or "json"
/// output = "sweep.csv"      # optional; stdout when absent
///
/// [quadrature]             # optional, homodyne only
/// rel_tol = 1e-10
///
/// [eta_grid]
/// start = 0.01
/// stop = 0.99
/// count = 99
/// spacing = "linear"        # or "log"
///
/// [[curve]]
/// probe = "fock:1"
/// repetitions = 3
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub schema_version: u32,
    pub detector: String,
    #[serde(default)]
    pub delta: f64,
    #[serde(default = "yes")]
    pub fixed_energy: bool,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub quadrature: Option<QuadratureGrid>,
    pub eta_grid: GridSpec,
    pub curve: Vec<CurveEntry>,
}

fn yes() -> bool {
    true
}

impl SweepSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        let spec: SweepSpec = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        check_schema(spec.schema_version, path)?;
        Ok(spec)
    }

    /// Curve specifications; mixture paths resolve relative to `base`.
    pub fn curves(&self, base: Option<&Path>) -> Result<Vec<CurveSpec>> {
        let mut detector = DetectorModel::parse(&self.detector, DarkCount::new(self.delta)?)?;
        if let Some(q) = self.quadrature {
            let DetectorModel::Homodyne { grid } = &mut detector else {
                return Err(Error::Config("[quadrature] applies to the homodyne detector only".into()));
            };
            q.validate()?;
            *grid = q;
        }
        if self.curve.is_empty() {
            return Err(Error::Config("sweep has no curves".into()));
        }
        self.curve
            .iter()
            .map(|c| {
                let probe = parse_probe(&c.probe, base)?;
                let label = c.label.clone().unwrap_or_else(|| default_label(&c.probe, c.repetitions));
                Ok(CurveSpec::new(label, probe, detector.clone(), c.repetitions))
            })
            .collect()
    }
}

pub fn default_label(probe: &str, repetitions: u32) -> String {
    if repetitions == 1 {
        probe.to_string()
    } else {
        format!("{repetitions}x{probe}")
    }
}

/// Rejects grid points outside [`NUMERIC_ETA_RANGE`] for curves evaluated by
/// quadrature; closed forms are finite or flagged divergent at the endpoints.
pub fn check_grid(curves: &[CurveSpec], grid: &[Efficiency]) -> Result<()> {
    let (lo, hi) = NUMERIC_ETA_RANGE;
    for c in curves {
        if crate::engine::is_closed_form(&c.probe, &c.detector) {
            continue;
        }
        if let Some(bad) = grid.iter().find(|e| e.get() < lo || e.get() > hi) {
            return Err(Error::domain(format!(
                "η = {} outside [{lo}, {hi}] for numerically integrated curve '{}'",
                bad.get(),
                c.label
            )));
        }
    }
    Ok(())
}

fn check_schema(version: u32, path: &Path) -> Result<()> {
    if version == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{}: schema_version {version} unsupported (expected {SCHEMA_VERSION})",
            path.display()
        )))
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = GridSpec::parse("0.1:0.5:5").unwrap();
        let pts: Vec<f64> = g.points().unwrap().iter().map(|e| e.get()).collect();
        assert_eq!(pts.len(), 5);
        assert!((pts[2] - 0.3).abs() < 1e-15);
        assert_eq!(pts[4], 0.5);
        assert!(GridSpec::parse("0.1:0.5").is_err());
        assert!(GridSpec::parse("0.5:0.1:3").unwrap().points().is_err());
    }

    #[test]
    fn log_grid_endpoints() {
        let g = GridSpec {
            start: 1e-3,
            stop: 0.1,
            count: 3,
            spacing: Spacing::Log,
        };
        let pts: Vec<f64> = g.points().unwrap().iter().map(|e| e.get()).collect();
        assert_eq!(pts[0], 1e-3);
        assert!((pts[1] - 1e-2).abs() < 1e-15);
        assert_eq!(pts[2], 0.1);
    }

    #[test]
    fn spec_roundtrip() {
        let text = r#"
schema_version = 1
detector = "homodyne"
[eta_grid]
start = 0.1
stop = 0.9
count = 9
[[curve]]
probe = "fock:2"
repetitions = 2
"#;
        let spec: SweepSpec = toml::from_str(text).unwrap();
        assert!(spec.fixed_energy);
        assert_eq!(spec.format, OutputFormat::Csv);
        let curves = spec.curves(None).unwrap();
        assert_eq!(curves[0].label, "2xfock:2");
        let back: SweepSpec = toml::from_str(&toml::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn numeric_curves_stay_inside_range() {
        let c = [CurveSpec::new("h", ProbeState::fock(1), DetectorModel::homodyne(), 1)];
        assert!(check_grid(&c, &[Efficiency::ONE]).is_err());
        assert!(check_grid(&c, &[Efficiency::new(0.5).unwrap()]).is_ok());
        let c = [CurveSpec::new("o", ProbeState::fock(1), DetectorModel::onoff(DarkCount::NONE), 1)];
        assert!(check_grid(&c, &[Efficiency::ONE]).is_ok());
    }
}
