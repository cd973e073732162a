//! Susceptibility along one drive or density axis.

use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;

use super::HarnessError;
use crate::lambda::{probe_susceptibility, DriveParams, LambdaError, LambdaParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiAxis {
    /// Probe Rabi frequency.
    Probe,
    /// Coupling Rabi frequency.
    Coupling,
    /// Atomic density.
    Density,
}

impl ChiAxis {
    pub fn label(self) -> &'static str {
        match self {
            ChiAxis::Probe => "g",
            ChiAxis::Coupling => "G",
            ChiAxis::Density => "N",
        }
    }
}

impl FromStr for ChiAxis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "g" => Ok(ChiAxis::Probe),
            "G" => Ok(ChiAxis::Coupling),
            "N" => Ok(ChiAxis::Density),
            other => Err(format!("unknown axis {other:?} (expected g, G or N)")),
        }
    }
}

/// Values held fixed while one axis is swept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiDefaults {
    pub probe_rabi: f64,
    pub coupling_rabi: f64,
    pub density: f64,
}

impl ChiDefaults {
    /// g = 8.4γ, G = 29γ, N = 1.0×10¹² cm⁻³.
    pub fn experiment(gamma: f64) -> Self {
        Self {
            probe_rabi: 8.4 * gamma,
            coupling_rabi: 29.0 * gamma,
            density: 1.0e18,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiPoint {
    /// Axis value in SI units.
    pub value: f64,
    pub chi: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiCurve {
    pub axis: ChiAxis,
    pub gamma: f64,
    pub points: Vec<ChiPoint>,
    /// Samples dropped because χ is undefined there (g = 0).
    pub skipped: Vec<f64>,
}

/// χ at `points` evenly spaced axis values from `from` to `to` inclusive.
pub fn chi_curve(
    params: &LambdaParams<f64>,
    axis: ChiAxis,
    from: f64,
    to: f64,
    points: usize,
    defaults: ChiDefaults,
) -> Result<ChiCurve, HarnessError> {
    if points == 0 {
        return Err(HarnessError::Config("points must be ≥ 1".into()));
    }
    if !(from >= 0.0 && to >= 0.0 && from.is_finite() && to.is_finite()) {
        return Err(HarnessError::Config(
            "range must be finite and non-negative".into(),
        ));
    }
    let mut curve = ChiCurve {
        axis,
        gamma: params.gamma,
        points: Vec::new(),
        skipped: Vec::new(),
    };
    for i in 0..points {
        let value = if points == 1 {
            from
        } else {
            from + (to - from) * i as f64 / (points - 1) as f64
        };
        let (g, big_g, n) = match axis {
            ChiAxis::Probe => (value, defaults.coupling_rabi, defaults.density),
            ChiAxis::Coupling => (defaults.probe_rabi, value, defaults.density),
            ChiAxis::Density => (defaults.probe_rabi, defaults.coupling_rabi, value),
        };
        match probe_susceptibility(params, &DriveParams::real(g, big_g), n) {
            Ok(r) => curve.points.push(ChiPoint { value, chi: r.chi }),
            Err(LambdaError::ZeroProbe) => {
                log::warn!("skipping g = 0: the probe susceptibility is undefined without a probe");
                curve.skipped.push(value);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(curve)
}

impl ChiCurve {
    /// Columns: axis label, value in γ (or cm⁻³ for N), SI value, Re χ, Im χ.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), HarnessError> {
        let mut out = csv::Writer::from_writer(w);
        let unit = match self.axis {
            ChiAxis::Density => "per_cm3",
            _ => "gamma",
        };
        out.write_record(["axis", "value", "units", "si_value", "re_chi", "im_chi"])?;
        for p in &self.points {
            let scaled = match self.axis {
                ChiAxis::Density => p.value * 1e-6,
                _ => p.value / self.gamma,
            };
            out.write_record([
                self.axis.label().to_string(),
                scaled.to_string(),
                unit.to_string(),
                p.value.to_string(),
                p.chi.re.to_string(),
                p.chi.im.to_string(),
            ])?;
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}
