//! One-parameter sweeps over scenario runs.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::chi_curve::{chi_curve, ChiAxis, ChiDefaults};
use super::config::ScenarioConfig;
use super::pipeline::{run_with_simulation, RunReport};
use super::units::{parse_quantity, Dimension};
use super::HarnessError;
use crate::lambda::{RabiAnchor, RabiCalibration};
use crate::metrics::{IntensityImage, Roi};
use crate::pgm::Pgm;

/// Environment variable capping the number of sweep worker threads.
pub const THREADS_ENV: &str = "CPTCLONE_THREADS";

/// Gap between strip panels, in pixels.
const STRIP_GAP: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    ProbePower,
    CouplingPower,
    Density,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::ProbePower => "probe_power",
            SweepParam::CouplingPower => "coupling_power",
            SweepParam::Density => "density",
        }
    }

    pub fn dimension(self) -> Dimension {
        match self {
            SweepParam::Density => Dimension::Density,
            _ => Dimension::Power,
        }
    }

    /// `config` with this parameter set to `value` (SI).
    pub fn apply(self, config: &ScenarioConfig, value: f64) -> ScenarioConfig {
        let mut c = config.clone();
        match self {
            SweepParam::ProbePower => c.beams.probe_power = value,
            SweepParam::CouplingPower => c.beams.coupling_power = value,
            SweepParam::Density => c.atom.density = value,
        }
        c
    }
}

impl FromStr for SweepParam {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "probe_power" => Ok(SweepParam::ProbePower),
            "coupling_power" => Ok(SweepParam::CouplingPower),
            "density" => Ok(SweepParam::Density),
            other => Err(format!("unknown sweep parameter {other:?} (expected probe_power, coupling_power or density)")),
        }
    }
}

/// Parses `"a, b, c"` or `"start..end:count"` (endpoints inclusive) into SI values.
pub fn parse_values(spec: &str, param: SweepParam) -> Result<Vec<f64>, HarnessError> {
    let dim = param.dimension();
    let quantity = |t: &str| {
        parse_quantity(t, dim)
            .and_then(|q| q.resolve(None))
            .map_err(|e| HarnessError::Config(format!("--values: {e}")))
    };
    let values =
        if let Some((range, count)) = spec.rsplit_once(':').filter(|(r, _)| r.contains("..")) {
            let (a, b) = range.split_once("..").expect("checked above");
            let (a, b) = (quantity(a)?, quantity(b)?);
            let n: usize = count
                .trim()
                .parse()
                .map_err(|_| HarnessError::Config(format!("--values: bad count {count:?}")))?;
            match n {
                0 => return Err(HarnessError::Config("--values: count must be ≥ 1".into())),
                1 => vec![a],
                _ => (0..n)
                    .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                    .collect(),
            }
        } else {
            spec.split(',')
                .map(|t| quantity(t.trim()))
                .collect::<Result<Vec<_>, _>>()?
        };
    if values.is_empty() || values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(HarnessError::Config(
            "--values must be finite and ≥ 0".into(),
        ));
    }
    Ok(values)
}

/// Worker cap from `CPTCLONE_THREADS`; `None` if unset or invalid.
pub fn thread_cap() -> Option<usize> {
    let raw = std::env::var(THREADS_ENV).ok()?;
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => Some(n),
        _ => {
            log::warn!("ignoring {THREADS_ENV}={raw:?}");
            None
        }
    }
}

/// One line of `sweep.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub parameter: String,
    pub value: f64,
    pub units: String,
    pub probe_rabi_gamma: f64,
    pub coupling_rabi_gamma: f64,
    pub clone_ncc: f64,
    pub clone_ncc_mask: f64,
    pub clone_ncc_complement: f64,
    pub clone_polarity: f64,
    pub coupling_ncc: Option<f64>,
    pub ncc_gain: Option<f64>,
    pub clone_power_uw: f64,
    pub min_im_chi: f64,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub parameter: SweepParam,
    pub rows: Vec<SweepRow>,
    pub runs: Vec<RunReport>,
    pub artifacts: Vec<PathBuf>,
}

/// Runs the scenario once per value (in parallel, each in its own
/// subdirectory) and writes `sweep.csv`, `strip.pgm` and χ curves.
pub fn sweep(
    config: &ScenarioConfig,
    param: SweepParam,
    values: &[f64],
    out_dir: &Path,
) -> Result<SweepReport, HarnessError> {
    config.validate()?;
    if values.is_empty() {
        return Err(HarnessError::Config(
            "sweep needs at least one value".into(),
        ));
    }
    fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;

    let results = pool.install(|| {
        values
            .par_iter()
            .enumerate()
            .map(|(i, &v)| {
                let mut cfg = param.apply(config, v);
                cfg.id = format!("{}_{}_{i:02}", config.id, param.name());
                let dir = out_dir.join(format!("{}_{i:02}", param.name()));
                let (report, sim) = run_with_simulation(&cfg, &dir)?;
                let image = IntensityImage::from_field(&sim.probe_camera);
                let roi = Roi::centered(&sim.grid, cfg.roi_half_width());
                Ok((report, crop(&image, &roi), roi))
            })
            .collect::<Result<Vec<_>, HarnessError>>()
    })?;

    let gamma = config.atom.gamma;
    let metric = |r: &RunReport, name: &str| r.metric(name).unwrap_or(f64::NAN);
    let rows: Vec<SweepRow> = results
        .iter()
        .enumerate()
        .map(|(i, (r, _, _))| SweepRow {
            index: i,
            parameter: param.name().to_string(),
            value: values[i],
            units: super::units::base_unit(param.dimension()).to_string(),
            probe_rabi_gamma: metric(r, "probe_rabi"),
            coupling_rabi_gamma: metric(r, "coupling_rabi"),
            clone_ncc: r.clone.clone_ncc,
            clone_ncc_mask: r.clone.clone_ncc_mask,
            clone_ncc_complement: r.clone.clone_ncc_complement,
            clone_polarity: r.clone.polarity.sign(),
            coupling_ncc: r.clone.coupling_ncc,
            ncc_gain: r.clone.ncc_gain,
            clone_power_uw: r.clone.clone_power * 1e6,
            min_im_chi: metric(r, "min_im_chi"),
        })
        .collect();

    let mut artifacts = Vec::new();
    let csv_path = out_dir.join("sweep.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| HarnessError::io(&csv_path, e))?;
    artifacts.push(csv_path);

    let strip_path = out_dir.join("strip.pgm");
    let panels: Vec<_> = results
        .iter()
        .map(|(_, c, roi)| (c.as_slice(), roi.width(), roi.height()))
        .collect();
    let file = fs::File::create(&strip_path).map_err(|e| HarnessError::io(&strip_path, e))?;
    image_strip(&panels).write(BufWriter::new(file))?;
    artifacts.push(strip_path);

    let params = config.atom.lambda_params();
    let probe_cal = RabiCalibration::from_anchor(&RabiAnchor::probe_reference(gamma))?;
    let coupling_cal = RabiCalibration::from_anchor(&RabiAnchor::coupling_reference(gamma))?;
    let defaults = ChiDefaults {
        probe_rabi: probe_cal.rabi(config.beams.probe_power, config.beams.probe_diameter)?,
        coupling_rabi: coupling_cal
            .rabi(config.beams.coupling_power, config.beams.coupling_diameter)?,
        density: config.atom.density,
    };
    for (name, axis, from, to, n) in [
        ("chi_probe.csv", ChiAxis::Probe, 0.0, 20.0 * gamma, 81),
        ("chi_coupling.csv", ChiAxis::Coupling, 0.0, 40.0 * gamma, 81),
        ("chi_density.csv", ChiAxis::Density, 1e17, 2.5e18, 25),
    ] {
        let path = out_dir.join(name);
        let curve = chi_curve(&params, axis, from, to, n, defaults)?;
        let file = fs::File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
        curve.write_csv(BufWriter::new(file))?;
        artifacts.push(path);
    }

    let runs = results.into_iter().map(|(r, _, _)| r).collect();
    Ok(SweepReport {
        parameter: param,
        rows,
        runs,
        artifacts,
    })
}

fn crop(image: &IntensityImage<f64>, roi: &Roi) -> Vec<f64> {
    (roi.y0..roi.y1)
        .flat_map(|iy| image.row(iy, roi.x0, roi.x1))
        .collect()
}

/// Panels side by side, each scaled to its own maximum, separated by black gaps.
fn image_strip(panels: &[(&[f64], usize, usize)]) -> Pgm {
    let height = panels.iter().map(|p| p.2).max().unwrap_or(0);
    let width =
        panels.iter().map(|p| p.1).sum::<usize>() + STRIP_GAP * panels.len().saturating_sub(1);
    let mut samples = vec![0u16; width * height];
    let mut x0 = 0;
    for &(values, w, h) in panels {
        let panel = super::render::render_intensity(values, w, h);
        for y in 0..h {
            samples[y * width + x0..y * width + x0 + w]
                .copy_from_slice(&panel.samples[y * w..(y + 1) * w]);
        }
        x0 += w + STRIP_GAP;
    }
    Pgm {
        width,
        height,
        maxval: 65535,
        samples,
    }
}
