use cptclone::lambda::{LambdaParams, RB_D1_GAMMA};
use cptclone::optics::{ComplexField2D, GridSpec};
use cptclone::scene::{susceptibility_from_coupling, ChiTable, MediumModel};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GAMMA: f64 = RB_D1_GAMMA;

#[test]
fn table_matches_direct_solves_on_random_pixels() {
    let params = LambdaParams::experiment();
    let (g, nominal, density) = (8.4 * GAMMA, 29.0 * GAMMA, 2.5e18);
    let model = MediumModel::tabulated(params, g, density, 1.0, nominal, 3.0).unwrap();
    let table = model.table.as_ref().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_scaled = 0.0f64;
    for _ in 0..1000 {
        let coupling = rng.gen_range(0.0..table.max_rabi());
        let tab = table.evaluate(coupling).unwrap();
        let exact = table.direct(coupling).unwrap();
        worst_scaled = worst_scaled.max((tab - exact).norm() / table.max_abs());
    }
    assert!(worst_scaled < 1e-6, "{worst_scaled:e}");
}

#[test]
fn tabulated_map_matches_direct_map() {
    let grid = GridSpec::square(64, 4e-3, 795e-9).unwrap();
    let params = LambdaParams::experiment();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let field = ComplexField2D::from_fn(grid, |_, _| {
        Complex::from_polar(rng.gen_range(0.0..1.2), rng.gen_range(0.0..6.3))
    });
    let scale = 29.0 * GAMMA;
    let direct = susceptibility_from_coupling(&field, 8.4 * GAMMA, &params, 2.5e18, scale).unwrap();
    let model =
        MediumModel::tabulated(params, 8.4 * GAMMA, 2.5e18, scale, 29.0 * GAMMA, 3.0).unwrap();
    let table = model.map(&field).unwrap();
    let peak = direct.chi.iter().fold(0.0f64, |a, c| a.max(c.norm()));
    for (a, b) in direct.chi.iter().zip(&table.chi) {
        assert!((a - b).norm() < 1e-6 * peak);
    }
}

#[test]
fn beyond_table_range_falls_back_to_direct() {
    let params = LambdaParams::experiment();
    let table = ChiTable::new(params, 8.4 * GAMMA, 1e18, 10.0 * GAMMA, 512).unwrap();
    let far = 60.0 * GAMMA;
    assert_eq!(table.evaluate(far).unwrap(), table.direct(far).unwrap());
}

#[test]
fn dark_coupling_model_covers_zero() {
    let params = LambdaParams::experiment();
    let model = MediumModel::tabulated(params, 8.4 * GAMMA, 1e18, 1.0, 0.0, 3.0).unwrap();
    assert_eq!(model.chi_for(0.0).unwrap(), Complex::new(0.0, 0.0));
}
