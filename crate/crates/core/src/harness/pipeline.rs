//! The mask → cell → camera pipeline and its metrics.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::Serialize;

use super::config::{ChiMode, MaskKind, ScenarioConfig};
use super::render::render_field;
use super::HarnessError;
use crate::lambda::{RabiAnchor, RabiCalibration};
use crate::metrics::{edge_width, fringe_visibility, ncc_in, IntensityImage, MetricsError, Roi};
use crate::optics::{write_cf2d, BorderEvent, BorderGuard, ComplexField2D, GridSpec, Propagator};
use crate::scene::{
    apply_mask, double_slit, gaussian_amplitude_for_power, gaussian_beam, glyph_mask,
    read_mask_pgm, write_mask_pgm, CouplingMedium, Mask2D, MediumModel,
};

/// Table range as a multiple of the nominal coupling Rabi frequency.
const TABLE_HEADROOM: f64 = 3.0;

/// Fields and scalars produced by one pipeline pass.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub config: ScenarioConfig,
    pub grid: GridSpec<f64>,
    pub mask: Mask2D<f64>,
    pub probe_rabi: f64,
    pub coupling_rabi: f64,
    pub probe_input: ComplexField2D<f64>,
    /// Probe at the exit face of the cell.
    pub probe_cell_exit: ComplexField2D<f64>,
    pub probe_camera: ComplexField2D<f64>,
    /// Masked coupling propagated to the camera with atoms ignored.
    pub coupling_camera: ComplexField2D<f64>,
    pub probe_power_cell_in: f64,
    pub probe_power_cell_out: f64,
    /// Smallest Im χ met inside the cell (+∞ for an empty cell).
    pub min_imag_chi: f64,
    pub border_events: Vec<BorderEvent>,
}

pub fn build_mask(
    config: &ScenarioConfig,
    grid: GridSpec<f64>,
) -> Result<Mask2D<f64>, HarnessError> {
    let mask = match &config.mask.kind {
        MaskKind::TwoSlit {
            slit_width,
            separation,
        } => double_slit(grid, *slit_width, *separation)?,
        MaskKind::Glyph {
            glyph,
            height,
            stroke,
        } => glyph_mask(grid, *glyph, *height, *stroke)?,
        MaskKind::PgmFile { path } => {
            let m = read_mask_pgm(path, grid.wavelength)?;
            if !m.grid.same_sampling(&grid) {
                return Err(HarnessError::Config(format!(
                    "mask {} is {}×{} at {:e} m, scenario grid is {}×{} at {:e} m",
                    path.display(),
                    m.grid.nx,
                    m.grid.ny,
                    m.grid.dx,
                    grid.nx,
                    grid.ny,
                    grid.dx
                )));
            }
            Mask2D {
                grid,
                transmission: m.transmission,
            }
        }
    };
    Ok(if config.mask.smooth_edges {
        mask.smooth_edges()
    } else {
        mask
    })
}

/// Runs the optical pipeline without touching the filesystem (except to
/// read a PGM mask).
pub fn simulate(config: &ScenarioConfig) -> Result<Simulation, HarnessError> {
    config.validate()?;
    let n = &config.numerics;
    let grid = GridSpec::new(
        n.nx,
        n.ny,
        n.window / n.nx as f64,
        n.window / n.ny as f64,
        config.atom.wavelength,
    )?;
    let mask = build_mask(config, grid)?;
    let params = config.atom.lambda_params();
    let (probe_waist, coupling_waist) = config.waists();
    let b = &config.beams;

    let probe_cal = RabiCalibration::from_anchor(&RabiAnchor::probe_reference(params.gamma))?;
    let coupling_cal = RabiCalibration::from_anchor(&RabiAnchor::coupling_reference(params.gamma))?;
    let probe_rabi = probe_cal.rabi(b.probe_power, b.probe_diameter)?;
    let coupling_rabi = coupling_cal.rabi(b.coupling_power, b.coupling_diameter)?;
    // Rabi frequency per unit field amplitude; independent of power.
    let rabi_scale = coupling_cal.rabi(1.0, b.coupling_diameter)?
        / gaussian_amplitude_for_power(1.0, coupling_waist);

    let probe0 = gaussian_beam(
        grid,
        probe_waist,
        gaussian_amplitude_for_power(b.probe_power, probe_waist),
    )?;
    let coupling_beam = gaussian_beam(
        grid,
        coupling_waist,
        gaussian_amplitude_for_power(b.coupling_power, coupling_waist),
    )?;
    let coupling0 = apply_mask(&coupling_beam, &mask)?;

    let propagator = Propagator::new(grid)?;
    let mut guard = BorderGuard::new(n.guard);
    let g = &config.geometry;
    let coupling_in = propagator.propagate_free(&coupling0, g.gap_before_cell, &mut guard)?;
    let probe_in = propagator.propagate_free(&probe0, g.gap_before_cell, &mut guard)?;

    let model = match n.chi_mode {
        ChiMode::Table => MediumModel::tabulated(
            params,
            probe_rabi,
            config.atom.density,
            rabi_scale,
            coupling_rabi,
            TABLE_HEADROOM,
        )?,
        ChiMode::Direct => {
            MediumModel::direct(params, probe_rabi, config.atom.density, rabi_scale)?
        }
    };
    let mut medium = CouplingMedium::new(&propagator, &model, &coupling_in)?;
    let probe_out =
        propagator.propagate_medium(&probe_in, &mut medium, g.cell_length, n.dz, &mut guard)?;
    let min_imag_chi = medium.min_imag();

    let probe_camera = propagator.propagate_free(&probe_out, g.gap_after_cell, &mut guard)?;
    let coupling_camera = propagator.propagate_free(&coupling0, g.camera_distance, &mut guard)?;

    Ok(Simulation {
        config: config.clone(),
        grid,
        mask,
        probe_rabi,
        coupling_rabi,
        probe_power_cell_in: probe_in.power(),
        probe_power_cell_out: probe_out.power(),
        probe_input: probe0,
        probe_cell_exit: probe_out,
        probe_camera,
        coupling_camera,
        min_imag_chi,
        border_events: guard.events,
    })
}

/// Whether the probe clone resembles the mask or its complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn sign(self) -> f64 {
        match self {
            Polarity::Positive => 1.0,
            Polarity::Negative => -1.0,
        }
    }
}

/// Camera-plane figures of merit for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct CloneMetrics {
    pub clone_ncc_mask: f64,
    pub clone_ncc_complement: f64,
    /// The larger of the two NCCs above.
    pub clone_ncc: f64,
    pub polarity: Polarity,
    /// Free-space coupling image vs the mask; `None` for a dark coupling beam.
    pub coupling_ncc: Option<f64>,
    /// `clone_ncc - coupling_ncc`.
    pub ncc_gain: Option<f64>,
    pub coupling_visibility: Option<f64>,
    pub clone_edge_width: Option<f64>,
    pub coupling_edge_width: Option<f64>,
    /// Probe power inside the mask footprint at the camera over input power.
    pub clone_power_fraction: f64,
    pub clone_power: f64,
    /// Total probe power at the camera over input power.
    pub probe_transmission: f64,
    pub min_imag_chi: f64,
    pub border_events: usize,
}

/// Computes the figures of merit on a similarity window around the axis
/// and on the horizontal line through each image's centroid.
pub fn evaluate(sim: &Simulation) -> Result<CloneMetrics, HarnessError> {
    let grid = sim.grid;
    let roi = Roi::centered(&grid, sim.config.roi_half_width());
    let probe = IntensityImage::from_field(&sim.probe_camera);
    let coupling = IntensityImage::from_field(&sim.coupling_camera);
    let mask = IntensityImage::from_mask(&sim.mask);
    let complement = IntensityImage::from_mask(&sim.mask.complement());

    let clone_ncc_mask = ncc_in(&probe, &mask, &roi)?;
    let clone_ncc_complement = ncc_in(&probe, &complement, &roi)?;
    let (clone_ncc, polarity) = if clone_ncc_mask >= clone_ncc_complement {
        (clone_ncc_mask, Polarity::Positive)
    } else {
        (clone_ncc_complement, Polarity::Negative)
    };
    let coupling_ncc = match ncc_in(&coupling, &mask, &roi) {
        Ok(v) => Some(v),
        Err(MetricsError::ZeroVariance) => None,
        Err(e) => return Err(e.into()),
    };

    let coupling_row = coupling.centroid_row();
    let coupling_visibility = fringe_visibility(&coupling.row(coupling_row, 0, grid.nx)).ok();
    // Edge profiles run from the axis to the right edge of the window.
    let (x0, x1) = (grid.nx / 2, roi.x1);
    let clone_edge_width =
        edge_width(&probe.row(probe.centroid_row(), x0, x1), grid.dx, 0.1, 0.9).ok();
    let coupling_edge_width =
        edge_width(&coupling.row(coupling_row, x0, x1), grid.dx, 0.1, 0.9).ok();

    let p_in = sim.probe_input.power();
    let clone_power_fraction = apply_mask(&sim.probe_camera, &sim.mask)?.power() / p_in;
    Ok(CloneMetrics {
        clone_ncc_mask,
        clone_ncc_complement,
        clone_ncc,
        polarity,
        coupling_ncc,
        ncc_gain: coupling_ncc.map(|c| clone_ncc - c),
        coupling_visibility,
        clone_edge_width,
        coupling_edge_width,
        clone_power_fraction,
        clone_power: clone_power_fraction * sim.config.beams.probe_power,
        probe_transmission: sim.probe_camera.power() / p_in,
        min_imag_chi: sim.min_imag_chi,
        border_events: sim.border_events.len(),
    })
}

/// One line of `metrics.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRow {
    pub scenario_id: String,
    pub metric_name: String,
    pub value: f64,
    pub units: String,
}

impl CloneMetrics {
    pub fn rows(&self, sim: &Simulation) -> Vec<MetricRow> {
        let gamma = sim.config.atom.gamma;
        let mut rows = vec![
            ("probe_rabi", sim.probe_rabi / gamma, "gamma"),
            ("coupling_rabi", sim.coupling_rabi / gamma, "gamma"),
            ("clone_ncc_mask", self.clone_ncc_mask, "1"),
            ("clone_ncc_complement", self.clone_ncc_complement, "1"),
            ("clone_ncc", self.clone_ncc, "1"),
            ("clone_polarity", self.polarity.sign(), "sign"),
        ];
        let optional = [
            ("coupling_ncc", self.coupling_ncc, "1"),
            ("ncc_gain", self.ncc_gain, "1"),
            ("coupling_fringe_visibility", self.coupling_visibility, "1"),
            ("clone_edge_width", self.clone_edge_width, "m"),
            ("coupling_edge_width", self.coupling_edge_width, "m"),
            (
                "edge_width_ratio",
                self.coupling_edge_width
                    .zip(self.clone_edge_width)
                    .map(|(c, p)| c / p),
                "1",
            ),
        ];
        rows.extend(
            optional
                .into_iter()
                .filter_map(|(k, v, u)| v.map(|v| (k, v, u))),
        );
        rows.extend([
            ("clone_power_fraction", self.clone_power_fraction, "1"),
            ("clone_power", self.clone_power * 1e6, "uW"),
            ("probe_transmission", self.probe_transmission, "1"),
            (
                "cell_transmission",
                sim.probe_power_cell_out / sim.probe_power_cell_in,
                "1",
            ),
            (
                "min_im_chi",
                if self.min_imag_chi.is_finite() {
                    self.min_imag_chi
                } else {
                    0.0
                },
                "1",
            ),
            ("border_events", self.border_events as f64, "count"),
        ]);
        rows.into_iter()
            .map(|(name, value, units)| MetricRow {
                scenario_id: sim.config.id.clone(),
                metric_name: name.to_string(),
                value,
                units: units.to_string(),
            })
            .collect()
    }
}

pub fn write_metrics_csv(rows: &[MetricRow], path: &Path) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario_id: String,
    pub metrics: Vec<MetricRow>,
    pub clone: CloneMetrics,
    pub artifacts: Vec<PathBuf>,
    pub duration: Duration,
}

impl RunReport {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics
            .iter()
            .find(|m| m.metric_name == name)
            .map(|m| m.value)
    }
}

fn write_dump(field: &ComplexField2D<f64>, path: &Path) -> Result<(), HarnessError> {
    let file = fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    write_cf2d(field, BufWriter::new(file))?;
    Ok(())
}

fn write_pgm(field: &ComplexField2D<f64>, path: &Path) -> Result<(), HarnessError> {
    let file = fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    render_field(field).write(BufWriter::new(file))?;
    Ok(())
}

/// Simulates, then writes camera images, the mask, metrics and optional
/// field dumps into `out_dir`.
pub fn run_scenario(config: &ScenarioConfig, out_dir: &Path) -> Result<RunReport, HarnessError> {
    run_with_simulation(config, out_dir).map(|(report, _)| report)
}

pub(crate) fn run_with_simulation(
    config: &ScenarioConfig,
    out_dir: &Path,
) -> Result<(RunReport, Simulation), HarnessError> {
    let start = Instant::now();
    let sim = simulate(config)?;
    let clone = evaluate(&sim)?;
    let metrics = clone.rows(&sim);

    fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let mut artifacts = Vec::new();
    let probe_pgm = out_dir.join("probe_camera.pgm");
    write_pgm(&sim.probe_camera, &probe_pgm)?;
    artifacts.push(probe_pgm);
    let coupling_pgm = out_dir.join("coupling_camera.pgm");
    write_pgm(&sim.coupling_camera, &coupling_pgm)?;
    artifacts.push(coupling_pgm);
    let mask_pgm = out_dir.join("mask.pgm");
    let sidecar = write_mask_pgm(&sim.mask, &mask_pgm)?;
    artifacts.extend([mask_pgm, sidecar]);
    let csv_path = out_dir.join("metrics.csv");
    write_metrics_csv(&metrics, &csv_path)?;
    artifacts.push(csv_path);
    if config.outputs.dump_fields {
        for (name, field) in [
            ("probe_cell_exit.cf2d", &sim.probe_cell_exit),
            ("probe_camera.cf2d", &sim.probe_camera),
            ("coupling_camera.cf2d", &sim.coupling_camera),
        ] {
            let path = out_dir.join(name);
            write_dump(field, &path)?;
            artifacts.push(path);
        }
    }
    log::info!(
        "{}: clone NCC {:.4} ({:?}), coupling NCC {:?}",
        config.id,
        clone.clone_ncc,
        clone.polarity,
        clone.coupling_ncc
    );
    let report = RunReport {
        scenario_id: config.id.clone(),
        metrics,
        clone,
        artifacts,
        duration: start.elapsed(),
    };
    Ok((report, sim))
}
