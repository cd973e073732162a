mod common;

use std::fs;
use std::path::Path;

use cptclone::harness::{
    render_cf2d, run_scenario, simulate, sweep, MaskKind, ScenarioConfig, SweepParam,
};
use cptclone::optics::{BorderGuard, Propagator};
use cptclone::scene::write_mask_pgm;

#[test]
fn empty_cell_is_invisible_to_the_probe() {
    let mut cfg = common::quick_config("empty");
    cfg.atom.density = 0.0;
    let sim = simulate(&cfg).unwrap();
    let prop = Propagator::new(sim.grid).unwrap();
    let free = prop
        .propagate_free(&sim.probe_input, 0.3, &mut BorderGuard::off())
        .unwrap();
    assert!(sim.probe_camera.relative_distance(&free) < 1e-10);
    assert!(sim.min_imag_chi >= 0.0);
}

#[test]
fn cell_never_adds_probe_power() {
    let sim = simulate(&common::quick_config("passive")).unwrap();
    assert!(sim.min_imag_chi >= 0.0);
    assert!(sim.probe_power_cell_out <= sim.probe_power_cell_in * (1.0 + 1e-12));
}

fn read(path: &Path) -> Vec<u8> {
    fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn runs_are_bit_reproducible_and_artifacts_exist() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = common::quick_config("repro");
    cfg.outputs.dump_fields = true;
    let a = run_scenario(&cfg, &dir.path().join("a")).unwrap();
    let b = run_scenario(&cfg, &dir.path().join("b")).unwrap();
    assert_eq!(a.metrics, b.metrics);
    for path in &a.artifacts {
        assert!(path.exists(), "{}", path.display());
        let twin = dir.path().join("b").join(path.file_name().unwrap());
        assert_eq!(read(path), read(&twin), "{}", path.display());
    }
    let names: Vec<_> = a
        .artifacts
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    for expected in [
        "probe_camera.pgm",
        "coupling_camera.pgm",
        "mask.pgm",
        "mask.pgm.meta",
        "metrics.csv",
        "probe_camera.cf2d",
    ] {
        assert!(
            names.iter().any(|n| n == expected),
            "{expected} missing from {names:?}"
        );
    }
    let csv = fs::read_to_string(dir.path().join("a/metrics.csv")).unwrap();
    assert!(csv.starts_with("scenario_id,metric_name,value,units\n"));
    assert!(csv.contains("repro,clone_ncc,"));
}

#[test]
fn rendered_dump_matches_camera_image() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = common::quick_config("dump");
    cfg.outputs.dump_fields = true;
    run_scenario(&cfg, dir.path()).unwrap();
    let out = dir.path().join("rendered.pgm");
    render_cf2d(&dir.path().join("probe_camera.cf2d"), &out).unwrap();
    assert_eq!(read(&out), read(&dir.path().join("probe_camera.pgm")));
}

#[test]
fn sweep_rows_match_individual_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::quick_config("sw");
    let values = [0.0, 0.75e-3, 1.5e-3];
    let report = sweep(&cfg, SweepParam::CouplingPower, &values, dir.path()).unwrap();
    assert_eq!(report.rows.len(), 3);
    for (row, &v) in report.rows.iter().zip(&values) {
        let single = run_scenario(
            &SweepParam::CouplingPower.apply(&cfg, v),
            &dir.path().join("single"),
        )
        .unwrap();
        assert_eq!(row.clone_ncc, single.clone.clone_ncc);
        assert_eq!(row.coupling_ncc, single.clone.coupling_ncc);
        assert_eq!(row.clone_power_uw, single.clone.clone_power * 1e6);
    }
    for name in [
        "sweep.csv",
        "strip.pgm",
        "chi_probe.csv",
        "chi_coupling.csv",
        "chi_density.csv",
    ] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    assert!(dir.path().join("coupling_power_02/metrics.csv").exists());
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn zero_coupling_gives_zero_susceptibility_everywhere() {
    let mut cfg = common::quick_config("dark");
    cfg.beams.coupling_power = 0.0;
    let sim = simulate(&cfg).unwrap();
    let mut empty = cfg.clone();
    empty.atom.density = 0.0;
    let reference = simulate(&empty).unwrap();
    assert!(sim.probe_camera.relative_distance(&reference.probe_camera) < 1e-12);
}

#[test]
fn pgm_mask_scenario_reproduces_built_in_mask() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::quick_config("pgm");
    let sim = simulate(&cfg).unwrap();
    write_mask_pgm(&sim.mask, &dir.path().join("slits.pgm")).unwrap();
    let text = common::QUICK_TOML.replace(
        "kind = \"two_slit\"\nslit_width = \"100 um\"\nseparation = \"400 um\"",
        "kind = \"pgm_file\"\npath = \"slits.pgm\"",
    );
    let scen = dir.path().join("pgm.toml");
    fs::write(&scen, text).unwrap();
    let loaded = ScenarioConfig::from_file(&scen).unwrap();
    assert!(matches!(loaded.mask.kind, MaskKind::PgmFile { .. }));
    let from_file = simulate(&loaded).unwrap();
    assert_eq!(from_file.mask.transmission, sim.mask.transmission);
    assert_eq!(from_file.probe_camera.data, sim.probe_camera.data);
}

#[test]
fn shipped_scenarios_parse_and_round_trip() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut count = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = ScenarioConfig::from_file(&path).unwrap();
            let again =
                ScenarioConfig::from_toml_str(&cfg.to_toml_string().unwrap(), None).unwrap();
            assert_eq!(again, cfg, "{}", path.display());
            count += 1;
        }
    }
    assert!(count >= 5);
}

#[test]
fn quick_toml_matches_quick_config() {
    let parsed = ScenarioConfig::from_toml_str(common::QUICK_TOML, None).unwrap();
    let built = common::quick_config("quick");
    assert_eq!(parsed.numerics, built.numerics);
    assert_eq!(parsed.beams, built.beams);
    assert_eq!(parsed.mask, built.mask);
}
