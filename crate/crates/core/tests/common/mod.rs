#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use cptclone::lambda::{
    build_liouvillian, DensityMatrix3, DriveParams, LambdaError, LambdaParams, VEC_DIM,
};
use cptclone::scene::{double_slit, Mask2D};
use cptclone::{GridSpec, LambdaParams as Params64};

type Mat = [[f64; VEC_DIM]; VEC_DIM];

fn matmul(a: &Mat, b: &Mat) -> Mat {
    let mut c = [[0.0; VEC_DIM]; VEC_DIM];
    for i in 0..VEC_DIM {
        for k in 0..VEC_DIM {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..VEC_DIM {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

fn matvec(a: &Mat, v: &[f64; VEC_DIM]) -> [f64; VEC_DIM] {
    let mut out = [0.0; VEC_DIM];
    for i in 0..VEC_DIM {
        out[i] = (0..VEC_DIM).map(|j| a[i][j] * v[j]).sum();
    }
    out
}

/// Restores exact trace preservation: populations (rows 0..3) of every
/// column must sum to the trace of the corresponding basis state.
fn enforce_trace(e: &mut Mat) {
    for j in 0..VEC_DIM {
        let target = if j < 3 { 1.0 } else { 0.0 };
        let s: f64 = (0..3).map(|i| e[i][j]).sum();
        let fix = (target - s) / 3.0;
        for row in e.iter_mut().take(3) {
            row[j] += fix;
        }
    }
}

/// Long-time limit of dρ/dt = Mρ from an equal ground mixture, by
/// exponentiating M over doubling intervals.
pub fn relax(
    params: &LambdaParams<f64>,
    drives: &DriveParams<f64>,
) -> Result<DensityMatrix3<f64>, LambdaError> {
    let m = build_liouvillian(params, drives)?.matrix;
    let norm = (0..VEC_DIM)
        .map(|j| (0..VEC_DIM).map(|i| m[i][j].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let tau = 0.25 / norm;
    let a: Mat = std::array::from_fn(|i| std::array::from_fn(|j| m[i][j] * tau));

    // Taylor series of exp(a); ‖a‖₁ ≤ 1/4 so 24 terms are far past rounding.
    let mut e: Mat =
        std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }));
    let mut term = e;
    for k in 1..=24 {
        term = matmul(&term, &a);
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x /= k as f64;
            }
        }
        for i in 0..VEC_DIM {
            for j in 0..VEC_DIM {
                e[i][j] += term[i][j];
            }
        }
    }
    enforce_trace(&mut e);

    let mut rho = [0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    for _ in 0..400 {
        let next = matvec(&e, &rho);
        let tr = next[0] + next[1] + next[2];
        let next: [f64; VEC_DIM] = std::array::from_fn(|i| next[i] / tr);
        let change = next
            .iter()
            .zip(&rho)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        rho = next;
        // Only stop once the propagator has become a projector.
        let settled = matvec(&e, &rho)
            .iter()
            .zip(&rho)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        if change < 1e-15 && settled < 1e-15 {
            break;
        }
        e = matmul(&e, &e);
        enforce_trace(&mut e);
    }
    Ok(DensityMatrix3::from_vector(&rho))
}

pub fn experiment() -> Params64 {
    Params64::experiment()
}

/// Default slit mask on a coarse grid for quick pipeline tests.
pub fn small_slits(grid: GridSpec) -> Mask2D<f64> {
    double_slit(grid, 100e-6, 400e-6).unwrap()
}

/// Two-slit scenario on a 128² grid over 5 mm with a 2 mm probe.
pub fn quick_config(id: &str) -> cptclone::harness::ScenarioConfig {
    let mut c = cptclone::harness::ScenarioConfig::two_slit(id);
    c.numerics.nx = 128;
    c.numerics.ny = 128;
    c.numerics.window = 5e-3;
    c.numerics.dz = 2e-3;
    c.numerics.guard = cptclone::optics::GuardPolicy::Off;
    c.beams.probe_diameter = 2e-3;
    c
}

pub const QUICK_TOML: &str = r#"
id = "quick"

[beams]
probe_diameter = "2 mm"

[mask]
kind = "two_slit"
slit_width = "100 um"
separation = "400 um"

[numerics]
nx = 128
ny = 128
window = "5 mm"
dz = "2 mm"
guard = "off"
"#;

/// Tolerance when comparing a fresh value with its frozen fixture.
pub const FIXTURE_TOL: f64 = 1e-6;

/// Named numeric fixtures in `tests/fixtures/<name>`. Missing keys are frozen
/// from the current run; `CPTCLONE_BLESS=1` re-freezes everything.
pub struct Fixtures {
    path: PathBuf,
    values: BTreeMap<String, Vec<f64>>,
    bless: bool,
    dirty: bool,
}

impl Fixtures {
    pub fn load(name: &str) -> Self {
        let path = Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/fixtures")
            .join(name);
        let values = std::fs::read_to_string(&path)
            .ok()
            .map(|t| serde_json::from_str(&t).expect("fixture file is valid JSON"))
            .unwrap_or_default();
        let bless = std::env::var("CPTCLONE_BLESS").is_ok_and(|v| v == "1");
        Self {
            path,
            values,
            bless,
            dirty: false,
        }
    }

    /// Returns the frozen values for `key`, freezing `current` if absent.
    pub fn freeze(&mut self, key: &str, current: &[f64]) -> Result<Vec<f64>, String> {
        match self.values.get(key) {
            Some(frozen) if !self.bless => {
                let ok = frozen.len() == current.len()
                    && frozen
                        .iter()
                        .zip(current)
                        .all(|(a, b)| (a - b).abs() <= FIXTURE_TOL);
                if ok {
                    Ok(frozen.clone())
                } else {
                    Err(format!(
                        "{key} drifted from fixture: frozen {frozen:?}, now {current:?}"
                    ))
                }
            }
            _ => {
                self.values.insert(key.to_string(), current.to_vec());
                self.dirty = true;
                Ok(current.to_vec())
            }
        }
    }

    pub fn save(&self) {
        if self.dirty {
            let text = serde_json::to_string_pretty(&self.values).unwrap();
            std::fs::write(&self.path, text + "\n").expect("fixture file is writable");
        }
    }
}
