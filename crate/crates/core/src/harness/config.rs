//! Scenario files.
//!
//! A scenario is TOML whose physical values are strings with explicit unit
//! suffixes (`"45 mm"`, `"361 MHz"`, `"29 gamma"`, `"2.5e12 per_cm3"`).
//! Omitted sections and keys take the experimental defaults. Parsed values
//! are held in SI units; rates are angular frequencies.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::units::{format_si, parse_quantity, Dimension};
use super::HarnessError;
use crate::lambda::{LambdaParams, RB_D1_GAMMA, RB_D1_WAVELENGTH};
use crate::optics::GuardPolicy;
use crate::scene::Glyph;

/// Tolerance on gap_before + cell + gap_after = camera distance.
const GEOMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub gap_before_cell: f64,
    pub cell_length: f64,
    pub gap_after_cell: f64,
    /// Mask to camera, z0.
    pub camera_distance: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            gap_before_cell: 45e-3,
            cell_length: 50e-3,
            gap_after_cell: 205e-3,
            camera_distance: 300e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Beams {
    pub probe_power: f64,
    pub probe_diameter: f64,
    pub coupling_power: f64,
    pub coupling_diameter: f64,
}

impl Default for Beams {
    fn default() -> Self {
        Self {
            probe_power: 1.4e-3,
            probe_diameter: 5e-3,
            coupling_power: 1.5e-3,
            coupling_diameter: 1.5e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub gamma: f64,
    pub gamma_12: f64,
    pub delta_1: f64,
    pub delta_2: f64,
    pub density: f64,
    /// Decay fractions of the excited state into |1⟩ and |2⟩.
    pub branching: [f64; 2],
    pub wavelength: f64,
}

impl Default for Atom {
    fn default() -> Self {
        let p = LambdaParams::<f64>::experiment();
        Self {
            gamma: RB_D1_GAMMA,
            gamma_12: 0.0,
            delta_1: p.delta_1,
            delta_2: p.delta_2,
            density: 2.5e18,
            branching: [0.5, 0.5],
            wavelength: RB_D1_WAVELENGTH,
        }
    }
}

impl Atom {
    pub fn lambda_params(&self) -> LambdaParams<f64> {
        LambdaParams {
            gamma: self.gamma,
            branch_1: self.branching[0],
            branch_2: self.branching[1],
            gamma_12: self.gamma_12,
            delta_1: self.delta_1,
            delta_2: self.delta_2,
            wavelength: self.wavelength,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MaskKind {
    TwoSlit {
        slit_width: f64,
        separation: f64,
    },
    Glyph {
        glyph: Glyph,
        height: f64,
        stroke: f64,
    },
    PgmFile {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaskSpec {
    pub kind: MaskKind,
    pub smooth_edges: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChiMode {
    /// Lookup table over |G|.
    #[default]
    Table,
    /// Steady-state solve at every pixel and plane.
    Direct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Numerics {
    pub nx: usize,
    pub ny: usize,
    pub window: f64,
    pub dz: f64,
    pub chi_mode: ChiMode,
    pub guard: GuardPolicy,
    /// Half-width of the square similarity window; defaults to the coupling waist.
    pub roi_half_width: Option<f64>,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            nx: 512,
            ny: 512,
            window: 10e-3,
            dz: 0.5e-3,
            chi_mode: ChiMode::Table,
            guard: GuardPolicy::Warn,
            roi_half_width: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    pub directory: PathBuf,
    pub dump_fields: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub id: String,
    pub geometry: Geometry,
    pub beams: Beams,
    pub atom: Atom,
    pub mask: MaskSpec,
    pub numerics: Numerics,
    pub outputs: Outputs,
}

impl ScenarioConfig {
    /// Experimental defaults with the given mask.
    pub fn with_mask(id: &str, kind: MaskKind) -> Self {
        Self {
            id: id.to_string(),
            geometry: Geometry::default(),
            beams: Beams::default(),
            atom: Atom::default(),
            mask: MaskSpec {
                kind,
                smooth_edges: false,
            },
            numerics: Numerics::default(),
            outputs: Outputs {
                directory: PathBuf::from("out").join(id),
                dump_fields: false,
            },
        }
    }

    /// Default two-slit scenario: 100 μm slits, 400 μm apart.
    pub fn two_slit(id: &str) -> Self {
        Self::with_mask(
            id,
            MaskKind::TwoSlit {
                slit_width: 100e-6,
                separation: 400e-6,
            },
        )
    }

    /// Default glyph scenario: 1.0 mm tall, 0.15 mm strokes.
    pub fn glyph(id: &str, glyph: Glyph) -> Self {
        Self::with_mask(
            id,
            MaskKind::Glyph {
                glyph,
                height: 1e-3,
                stroke: 0.15e-3,
            },
        )
    }

    /// Reads a scenario file; relative mask paths resolve against its directory.
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_str(&text, path.parent())
    }

    pub fn from_toml_str(text: &str, base_dir: Option<&Path>) -> Result<Self, HarnessError> {
        let raw: RawScenario =
            toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        let mut cfg = raw.resolve()?;
        if let (MaskKind::PgmFile { path }, Some(base)) = (&mut cfg.mask.kind, base_dir) {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Writes every value in SI base units so that parsing the output
    /// reproduces this configuration exactly.
    pub fn to_toml_string(&self) -> Result<String, HarnessError> {
        toml::to_string_pretty(&RawScenario::from_config(self))
            .map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.id.trim().is_empty() {
            return bad("scenario id must not be empty".into());
        }
        let g = &self.geometry;
        for (name, v) in [
            ("geometry.gap_before_cell", g.gap_before_cell),
            ("geometry.cell_length", g.cell_length),
            ("geometry.gap_after_cell", g.gap_after_cell),
            ("geometry.camera_distance", g.camera_distance),
            ("beams.probe_diameter", self.beams.probe_diameter),
            ("beams.coupling_diameter", self.beams.coupling_diameter),
            ("atom.gamma", self.atom.gamma),
            ("atom.wavelength", self.atom.wavelength),
            ("numerics.window", self.numerics.window),
            ("numerics.dz", self.numerics.dz),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        let total = g.gap_before_cell + g.cell_length + g.gap_after_cell;
        if (total - g.camera_distance).abs() > GEOMETRY_TOL * g.camera_distance.max(1.0) {
            return bad(format!(
                "gap_before_cell + cell_length + gap_after_cell = {total} m differs from camera_distance = {} m",
                g.camera_distance
            ));
        }
        if self.numerics.dz > g.cell_length {
            return bad("numerics.dz exceeds the cell length".into());
        }
        for (name, v) in [
            ("beams.probe_power", self.beams.probe_power),
            ("beams.coupling_power", self.beams.coupling_power),
            ("atom.density", self.atom.density),
            ("atom.gamma_12", self.atom.gamma_12),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be finite and ≥ 0, got {v}"));
            }
        }
        if self.beams.probe_power == 0.0 {
            return bad("beams.probe_power must be positive".into());
        }
        if let Some(h) = self.numerics.roi_half_width {
            if !(h > 0.0 && h.is_finite()) {
                return bad("numerics.roi_half_width must be positive".into());
            }
        }
        self.atom
            .lambda_params()
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        match &self.mask.kind {
            MaskKind::TwoSlit {
                slit_width,
                separation,
            } => {
                if !(*slit_width > 0.0 && *separation > *slit_width) {
                    return bad("mask needs 0 < slit_width < separation".into());
                }
            }
            MaskKind::Glyph { height, stroke, .. } => {
                if !(*stroke > 0.0 && *height > 2.0 * *stroke) {
                    return bad("mask needs 0 < 2·stroke < height".into());
                }
            }
            MaskKind::PgmFile { path } => {
                if path.as_os_str().is_empty() {
                    return bad("mask.path must not be empty".into());
                }
            }
        }
        Ok(())
    }

    /// Probe and coupling Gaussian waists (diameter = 2w).
    pub fn waists(&self) -> (f64, f64) {
        (
            self.beams.probe_diameter / 2.0,
            self.beams.coupling_diameter / 2.0,
        )
    }

    pub fn roi_half_width(&self) -> f64 {
        self.numerics
            .roi_half_width
            .unwrap_or(self.beams.coupling_diameter / 2.0)
    }
}

// On-disk representation.

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    id: String,
    #[serde(default)]
    geometry: RawGeometry,
    #[serde(default)]
    beams: RawBeams,
    #[serde(default)]
    atom: RawAtom,
    mask: RawMask,
    #[serde(default)]
    numerics: RawNumerics,
    #[serde(default)]
    outputs: RawOutputs,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    gap_before_cell: Option<String>,
    cell_length: Option<String>,
    gap_after_cell: Option<String>,
    camera_distance: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBeams {
    probe_power: Option<String>,
    probe_diameter: Option<String>,
    coupling_power: Option<String>,
    coupling_diameter: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    gamma: Option<String>,
    gamma_12: Option<String>,
    delta_1: Option<String>,
    delta_2: Option<String>,
    density: Option<String>,
    branching: Option<[f64; 2]>,
    wavelength: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMask {
    kind: String,
    slit_width: Option<String>,
    separation: Option<String>,
    glyph: Option<String>,
    height: Option<String>,
    stroke: Option<String>,
    path: Option<String>,
    smooth_edges: Option<bool>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNumerics {
    nx: Option<usize>,
    ny: Option<usize>,
    window: Option<String>,
    dz: Option<String>,
    chi_mode: Option<String>,
    guard: Option<String>,
    roi_half_width: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutputs {
    directory: Option<String>,
    dump_fields: Option<bool>,
}

fn field(
    key: &str,
    value: &Option<String>,
    dim: Dimension,
    gamma: Option<f64>,
    default: f64,
) -> Result<f64, HarnessError> {
    match value {
        None => Ok(default),
        Some(text) => parse_quantity(text, dim)
            .and_then(|q| q.resolve(gamma))
            .map_err(|e| HarnessError::Config(format!("{key}: {e}"))),
    }
}

fn required(key: &str, value: &Option<String>, dim: Dimension) -> Result<f64, HarnessError> {
    match value {
        None => Err(HarnessError::Config(format!("{key} is required"))),
        Some(_) => field(key, value, dim, None, 0.0),
    }
}

fn si(v: f64, dim: Dimension) -> Option<String> {
    Some(format_si(v, dim))
}

impl RawScenario {
    fn resolve(&self) -> Result<ScenarioConfig, HarnessError> {
        use Dimension::*;
        let dg = Geometry::default();
        let g = &self.geometry;
        let gap_before_cell = field(
            "geometry.gap_before_cell",
            &g.gap_before_cell,
            Length,
            None,
            dg.gap_before_cell,
        )?;
        let cell_length = field(
            "geometry.cell_length",
            &g.cell_length,
            Length,
            None,
            dg.cell_length,
        )?;
        let gap_after_cell = field(
            "geometry.gap_after_cell",
            &g.gap_after_cell,
            Length,
            None,
            dg.gap_after_cell,
        )?;
        let camera_distance = field(
            "geometry.camera_distance",
            &g.camera_distance,
            Length,
            None,
            gap_before_cell + cell_length + gap_after_cell,
        )?;
        let geometry = Geometry {
            gap_before_cell,
            cell_length,
            gap_after_cell,
            camera_distance,
        };

        let db = Beams::default();
        let b = &self.beams;
        let beams = Beams {
            probe_power: field(
                "beams.probe_power",
                &b.probe_power,
                Power,
                None,
                db.probe_power,
            )?,
            probe_diameter: field(
                "beams.probe_diameter",
                &b.probe_diameter,
                Length,
                None,
                db.probe_diameter,
            )?,
            coupling_power: field(
                "beams.coupling_power",
                &b.coupling_power,
                Power,
                None,
                db.coupling_power,
            )?,
            coupling_diameter: field(
                "beams.coupling_diameter",
                &b.coupling_diameter,
                Length,
                None,
                db.coupling_diameter,
            )?,
        };

        let da = Atom::default();
        let a = &self.atom;
        let gamma = field("atom.gamma", &a.gamma, Rate, None, da.gamma)?;
        let atom = Atom {
            gamma,
            gamma_12: field("atom.gamma_12", &a.gamma_12, Rate, Some(gamma), da.gamma_12)?,
            delta_1: field("atom.delta_1", &a.delta_1, Rate, Some(gamma), da.delta_1)?,
            delta_2: field("atom.delta_2", &a.delta_2, Rate, Some(gamma), da.delta_2)?,
            density: field("atom.density", &a.density, Density, None, da.density)?,
            branching: a.branching.unwrap_or(da.branching),
            wavelength: field(
                "atom.wavelength",
                &a.wavelength,
                Length,
                None,
                da.wavelength,
            )?,
        };

        let m = &self.mask;
        let kind = match m.kind.as_str() {
            "two_slit" => MaskKind::TwoSlit {
                slit_width: field("mask.slit_width", &m.slit_width, Length, None, 100e-6)?,
                separation: field("mask.separation", &m.separation, Length, None, 400e-6)?,
            },
            "glyph" => MaskKind::Glyph {
                glyph: m
                    .glyph
                    .as_deref()
                    .ok_or_else(|| {
                        HarnessError::Config("mask.glyph is required for kind = \"glyph\"".into())
                    })?
                    .parse()
                    .map_err(|e: String| HarnessError::Config(format!("mask.glyph: {e}")))?,
                height: field("mask.height", &m.height, Length, None, 1e-3)?,
                stroke: field("mask.stroke", &m.stroke, Length, None, 0.15e-3)?,
            },
            "pgm_file" => MaskKind::PgmFile {
                path: m.path.as_ref().map(PathBuf::from).ok_or_else(|| {
                    HarnessError::Config("mask.path is required for kind = \"pgm_file\"".into())
                })?,
            },
            other => {
                return Err(HarnessError::Config(format!(
                    "unknown mask.kind {other:?} (expected two_slit, glyph or pgm_file)"
                )))
            }
        };
        let mask = MaskSpec {
            kind,
            smooth_edges: m.smooth_edges.unwrap_or(false),
        };

        let dn = Numerics::default();
        let n = &self.numerics;
        let numerics = Numerics {
            nx: n.nx.unwrap_or(dn.nx),
            ny: n.ny.unwrap_or(dn.ny),
            window: field("numerics.window", &n.window, Length, None, dn.window)?,
            dz: field("numerics.dz", &n.dz, Length, None, dn.dz)?,
            chi_mode: match n.chi_mode.as_deref() {
                None | Some("table") => ChiMode::Table,
                Some("direct") => ChiMode::Direct,
                Some(other) => {
                    return Err(HarnessError::Config(format!(
                        "numerics.chi_mode {other:?} (expected table or direct)"
                    )))
                }
            },
            guard: match n.guard.as_deref() {
                None | Some("warn") => GuardPolicy::Warn,
                Some("strict") => GuardPolicy::Strict,
                Some("off") => GuardPolicy::Off,
                Some(other) => {
                    return Err(HarnessError::Config(format!(
                        "numerics.guard {other:?} (expected warn, strict or off)"
                    )))
                }
            },
            roi_half_width: match &n.roi_half_width {
                None => None,
                Some(_) => Some(required(
                    "numerics.roi_half_width",
                    &n.roi_half_width,
                    Length,
                )?),
            },
        };

        let outputs = Outputs {
            directory: self
                .outputs
                .directory
                .as_ref()
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("out").join(&self.id)),
            dump_fields: self.outputs.dump_fields.unwrap_or(false),
        };

        Ok(ScenarioConfig {
            id: self.id.clone(),
            geometry,
            beams,
            atom,
            mask,
            numerics,
            outputs,
        })
    }

    fn from_config(c: &ScenarioConfig) -> Self {
        use Dimension::*;
        let mask = match &c.mask.kind {
            MaskKind::TwoSlit {
                slit_width,
                separation,
            } => RawMask {
                kind: "two_slit".into(),
                slit_width: si(*slit_width, Length),
                separation: si(*separation, Length),
                ..Default::default()
            },
            MaskKind::Glyph {
                glyph,
                height,
                stroke,
            } => RawMask {
                kind: "glyph".into(),
                glyph: Some(glyph.to_string()),
                height: si(*height, Length),
                stroke: si(*stroke, Length),
                ..Default::default()
            },
            MaskKind::PgmFile { path } => RawMask {
                kind: "pgm_file".into(),
                path: Some(path.to_string_lossy().into_owned()),
                ..Default::default()
            },
        };
        RawScenario {
            id: c.id.clone(),
            geometry: RawGeometry {
                gap_before_cell: si(c.geometry.gap_before_cell, Length),
                cell_length: si(c.geometry.cell_length, Length),
                gap_after_cell: si(c.geometry.gap_after_cell, Length),
                camera_distance: si(c.geometry.camera_distance, Length),
            },
            beams: RawBeams {
                probe_power: si(c.beams.probe_power, Power),
                probe_diameter: si(c.beams.probe_diameter, Length),
                coupling_power: si(c.beams.coupling_power, Power),
                coupling_diameter: si(c.beams.coupling_diameter, Length),
            },
            atom: RawAtom {
                gamma: si(c.atom.gamma, Rate),
                gamma_12: si(c.atom.gamma_12, Rate),
                delta_1: si(c.atom.delta_1, Rate),
                delta_2: si(c.atom.delta_2, Rate),
                density: si(c.atom.density, Density),
                branching: Some(c.atom.branching),
                wavelength: si(c.atom.wavelength, Length),
            },
            mask: RawMask {
                smooth_edges: Some(c.mask.smooth_edges),
                ..mask
            },
            numerics: RawNumerics {
                nx: Some(c.numerics.nx),
                ny: Some(c.numerics.ny),
                window: si(c.numerics.window, Length),
                dz: si(c.numerics.dz, Length),
                chi_mode: Some(match c.numerics.chi_mode {
                    ChiMode::Table => "table".into(),
                    ChiMode::Direct => "direct".into(),
                }),
                guard: Some(
                    match c.numerics.guard {
                        GuardPolicy::Off => "off",
                        GuardPolicy::Warn => "warn",
                        GuardPolicy::Strict => "strict",
                    }
                    .into(),
                ),
                roi_half_width: c.numerics.roi_half_width.and_then(|h| si(h, Length)),
            },
            outputs: RawOutputs {
                directory: Some(c.outputs.directory.to_string_lossy().into_owned()),
                dump_fields: Some(c.outputs.dump_fields),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2: &str = r#"
id = "fig2"

[geometry]
gap_before_cell = "45 mm"
cell_length = "5 cm"
gap_after_cell = "205 mm"
camera_distance = "0.3 m"

[beams]
probe_power = "1.4 mW"
probe_diameter = "5 mm"
coupling_power = "1.5 mW"
coupling_diameter = "1.5 mm"

[atom]
gamma = "5.75 MHz"
gamma_12 = "0 gamma"
delta_1 = "361 MHz"
delta_2 = "375 MHz"
density = "2.5e12 per_cm3"

[mask]
kind = "two_slit"
slit_width = "100 um"
separation = "400 um"
"#;

    #[test]
    fn parses_and_matches_defaults() {
        let cfg = ScenarioConfig::from_toml_str(FIG2, None).unwrap();
        let reference = ScenarioConfig::two_slit("fig2");
        assert_eq!(cfg.geometry.camera_distance, 0.3);
        assert!((cfg.atom.delta_1 / reference.atom.delta_1 - 1.0).abs() < 1e-15);
        assert!((cfg.atom.gamma / RB_D1_GAMMA - 1.0).abs() < 1e-15);
        assert_eq!(cfg.atom.density, 2.5e18);
        assert_eq!(cfg.mask, reference.mask);
        assert_eq!(cfg.numerics, Numerics::default());
        assert_eq!(cfg.outputs.directory, PathBuf::from("out/fig2"));
    }

    #[test]
    fn gamma_multiples_use_configured_gamma() {
        let text = "id = \"x\"\n[atom]\ngamma = \"1 MHz\"\ndelta_1 = \"3 gamma\"\ndelta_2 = \"3 gamma\"\n[mask]\nkind = \"two_slit\"\n";
        let cfg = ScenarioConfig::from_toml_str(text, None).unwrap();
        assert!((cfg.atom.delta_1 - 3.0 * std::f64::consts::TAU * 1e6).abs() < 1e-6);
    }

    #[test]
    fn serialization_round_trip_is_exact() {
        let cfg = ScenarioConfig::from_toml_str(FIG2, None).unwrap();
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(ScenarioConfig::from_toml_str(&text, None).unwrap(), cfg);
        let glyph = ScenarioConfig::glyph("u", Glyph::U);
        let again = ScenarioConfig::from_toml_str(&glyph.to_toml_string().unwrap(), None).unwrap();
        assert_eq!(again, glyph);
    }

    #[test]
    fn rejects_bad_input() {
        let cases = [
            FIG2.replace("\"45 mm\"", "\"45\""),
            FIG2.replace("\"45 mm\"", "\"46 mm\""),
            FIG2.replace("\"1.4 mW\"", "\"-1.4 mW\""),
            FIG2.replace("\"1.5 mW\"", "\"1.5 mm\""),
            FIG2.replace("two_slit", "three_slit"),
            FIG2.replace("[mask]", "[mask]\nbogus = 1"),
            FIG2.replace("\"100 um\"", "\"500 um\""),
        ];
        for text in cases {
            let err = ScenarioConfig::from_toml_str(&text, None).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{err}");
        }
    }

    #[test]
    fn relative_mask_path_resolves_against_file() {
        let text = "id = \"p\"\n[mask]\nkind = \"pgm_file\"\npath = \"m.pgm\"\n";
        let cfg = ScenarioConfig::from_toml_str(text, Some(Path::new("/data/scen"))).unwrap();
        assert_eq!(
            cfg.mask.kind,
            MaskKind::PgmFile {
                path: PathBuf::from("/data/scen/m.pgm")
            }
        );
    }
}
