//! Physical quantities written as `"<number> <unit>"` strings.
//!
//! Cyclic frequencies (Hz, kHz, MHz, GHz) are stored as angular
//! frequencies; `gamma` is a multiple of the configured upper-state decay
//! rate and only resolves once that rate is known.

use std::f64::consts::TAU;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Rate,
    Power,
    Density,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dimension::Length => "length",
            Dimension::Rate => "frequency",
            Dimension::Power => "power",
            Dimension::Density => "number density",
        };
        f.write_str(s)
    }
}

/// A parsed value in SI base units, or a rate expressed in units of γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity {
    Si(f64),
    Gamma(f64),
}

impl Quantity {
    /// SI value, resolving γ multiples with `gamma` (rad/s).
    pub fn resolve(self, gamma: Option<f64>) -> Result<f64, String> {
        match (self, gamma) {
            (Quantity::Si(v), _) => Ok(v),
            (Quantity::Gamma(m), Some(g)) => Ok(m * g),
            (Quantity::Gamma(_), None) => Err("γ multiples are not allowed here".into()),
        }
    }
}

/// Applies the unit's scale; decimal submultiples divide so that e.g.
/// `45 mm` lands on the double nearest 0.045.
fn unit_scale(dim: Dimension, unit: &str, value: f64) -> Option<f64> {
    let div = |d: f64| Some(value / d);
    let mul = |m: f64| Some(value * m);
    match (dim, unit) {
        (Dimension::Length, "m") => mul(1.0),
        (Dimension::Length, "cm") => div(1e2),
        (Dimension::Length, "mm") => div(1e3),
        (Dimension::Length, "um" | "μm" | "µm") => div(1e6),
        (Dimension::Length, "nm") => div(1e9),
        (Dimension::Rate, "rad_per_s") => mul(1.0),
        (Dimension::Rate, "Hz") => mul(TAU),
        (Dimension::Rate, "kHz") => mul(TAU * 1e3),
        (Dimension::Rate, "MHz") => mul(TAU * 1e6),
        (Dimension::Rate, "GHz") => mul(TAU * 1e9),
        (Dimension::Power, "W") => mul(1.0),
        (Dimension::Power, "mW") => div(1e3),
        (Dimension::Power, "uW" | "μW" | "µW") => div(1e6),
        (Dimension::Power, "nW") => div(1e9),
        (Dimension::Density, "per_m3") => mul(1.0),
        (Dimension::Density, "per_cm3") => mul(1e6),
        _ => None,
    }
}

/// Canonical unit used when writing values back out.
pub fn base_unit(dim: Dimension) -> &'static str {
    match dim {
        Dimension::Length => "m",
        Dimension::Rate => "rad_per_s",
        Dimension::Power => "W",
        Dimension::Density => "per_m3",
    }
}

/// Splits `"12.5mm"` / `"12.5 mm"` into number and unit.
fn split(text: &str) -> Result<(f64, &str), String> {
    let t = text.trim();
    let boundary = t
        .char_indices()
        .find(|&(i, c)| {
            let numeric = c.is_ascii_digit() || matches!(c, '.' | '+' | '-');
            // An 'e' is part of the number only when followed by a digit or sign.
            let exponent = matches!(c, 'e' | 'E')
                && t[i + 1..].starts_with(|n: char| n.is_ascii_digit() || n == '-' || n == '+')
                && i > 0;
            !(numeric || exponent)
        })
        .map(|(i, _)| i)
        .unwrap_or(t.len());
    let (num, unit) = t.split_at(boundary);
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("cannot read a number from {text:?}"))?;
    if !value.is_finite() {
        return Err(format!("{text:?} is not finite"));
    }
    Ok((value, unit.trim()))
}

/// Parses a quantity of the given dimension; a missing unit is an error.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<Quantity, String> {
    let (value, unit) = split(text)?;
    if unit.is_empty() {
        return Err(format!("{text:?} has no unit (expected a {dim} unit)"));
    }
    if dim == Dimension::Rate && unit == "gamma" {
        return Ok(Quantity::Gamma(value));
    }
    unit_scale(dim, unit, value)
        .map(Quantity::Si)
        .ok_or_else(|| format!("unknown {dim} unit {unit:?} in {text:?}"))
}

/// Formats an SI value in the base unit; `{:?}` keeps the shortest string
/// that parses back to the same bits.
pub fn format_si(value: f64, dim: Dimension) -> String {
    format!("{value:?} {}", base_unit(dim))
}
