//! Cell temperature to atomic number density.

use std::f64::consts::LN_10;

const BOLTZMANN: f64 = 1.380_649e-23;
const TORR: f64 = 133.322_368;

/// Saturated Rb vapor pressure over the liquid, Pa.
fn rb_vapor_pressure(kelvin: f64) -> f64 {
    let log10_torr =
        15.882_53 - 4529.635 / kelvin + 0.000_586_63 * kelvin - 2.991_38 * kelvin.log10();
    (log10_torr * LN_10).exp() * TORR
}

/// Piecewise log-linear table of (temperature °C, density m⁻³).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    points: Vec<(f64, f64)>,
}

impl Default for DensityTable {
    /// Ideal-gas density of saturated Rb vapor over 40–120 °C, rescaled so
    /// that 76 °C gives 2.5×10¹² cm⁻³.
    fn default() -> Self {
        Self::vapor_pressure_scaled(76.0, 2.5e18)
    }
}

impl DensityTable {
    /// User table; temperatures strictly increasing, densities positive.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, String> {
        if points.len() < 2 {
            return Err("density table needs at least two points".into());
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err("temperatures must be strictly increasing".into());
        }
        if points
            .iter()
            .any(|&(t, n)| !(t.is_finite() && n > 0.0 && n.is_finite()))
        {
            return Err("densities must be positive and finite".into());
        }
        Ok(Self { points })
    }

    pub fn vapor_pressure_scaled(anchor_celsius: f64, anchor_density: f64) -> Self {
        let raw = |c: f64| {
            let k = c + 273.15;
            rb_vapor_pressure(k) / (BOLTZMANN * k)
        };
        let scale = anchor_density / raw(anchor_celsius);
        let points = (0..=80).map(|i| {
            let c = 40.0 + i as f64;
            (c, raw(c) * scale)
        });
        Self {
            points: points.collect(),
        }
    }

    /// Density at `celsius`, interpolating ln n linearly; clamps to the table ends.
    pub fn density(&self, celsius: f64) -> f64 {
        let p = &self.points;
        if celsius <= p[0].0 {
            return p[0].1;
        }
        if celsius >= p[p.len() - 1].0 {
            return p[p.len() - 1].1;
        }
        let i = p.partition_point(|&(t, _)| t <= celsius) - 1;
        let (t0, n0) = p[i];
        let (t1, n1) = p[i + 1];
        let f = (celsius - t0) / (t1 - t0);
        (n0.ln() + f * (n1.ln() - n0.ln())).exp()
    }
}
