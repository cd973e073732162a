//! Image-quality numbers for camera-plane intensities.

use thiserror::Error;

use crate::optics::{ComplexField2D, GridSpec};
use crate::scalar::Real;
use crate::scene::Mask2D;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("image has zero variance over the analysis window")]
    ZeroVariance,
    #[error("profile has too few fringes (need a maximum with a minimum on either side)")]
    NoFringes,
    #[error("no edge found between the {lo} and {hi} levels")]
    NoEdge { lo: f64, hi: f64 },
    #[error("input field carries no power")]
    ZeroInput,
    #[error("images are sampled on different grids")]
    GridMismatch,
    #[error("invalid argument: {0}")]
    Invalid(String),
}

/// |E|² samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityImage<T> {
    pub grid: GridSpec<T>,
    pub values: Vec<T>,
}

impl<T: Real> IntensityImage<T> {
    pub fn from_field(field: &ComplexField2D<T>) -> Self {
        Self {
            grid: field.grid,
            values: field.intensity(),
        }
    }

    /// The mask transmission used as a reference image.
    pub fn from_mask(mask: &Mask2D<T>) -> Self {
        Self {
            grid: mask.grid,
            values: mask.transmission.clone(),
        }
    }

    pub fn from_values(grid: GridSpec<T>, values: Vec<T>) -> Result<Self, MetricsError> {
        if values.len() != grid.len() {
            return Err(MetricsError::GridMismatch);
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= T::zero())) {
            return Err(MetricsError::Invalid(
                "intensities must be finite and non-negative".into(),
            ));
        }
        Ok(Self { grid, values })
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> T {
        self.values[iy * self.grid.nx + ix]
    }

    pub fn max(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &v| a.max(v))
    }

    /// Intensity-weighted centre in pixel units; `None` for a dark image.
    pub fn centroid(&self) -> Option<(T, T)> {
        let nx = self.grid.nx;
        let (mut sx, mut sy, mut s) = (T::zero(), T::zero(), T::zero());
        for (i, &v) in self.values.iter().enumerate() {
            sx = sx + v * T::from_usize_lossy(i % nx);
            sy = sy + v * T::from_usize_lossy(i / nx);
            s = s + v;
        }
        (s > T::zero()).then(|| (sx / s, sy / s))
    }

    /// Row `iy` restricted to columns `x0..x1`.
    pub fn row(&self, iy: usize, x0: usize, x1: usize) -> Vec<T> {
        let start = iy * self.grid.nx;
        self.values[start + x0..start + x1].to_vec()
    }

    /// Row through the intensity centroid (centre row for a dark image).
    pub fn centroid_row(&self) -> usize {
        self.centroid()
            .and_then(|(_, cy)| cy.round().to_usize())
            .unwrap_or(self.grid.ny / 2)
            .min(self.grid.ny - 1)
    }
}

/// Rectangular pixel window `[x0, x1) × [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Roi {
    pub x0: usize,
    pub x1: usize,
    pub y0: usize,
    pub y1: usize,
}

impl Roi {
    pub fn full<T: Real>(grid: &GridSpec<T>) -> Self {
        Self {
            x0: 0,
            x1: grid.nx,
            y0: 0,
            y1: grid.ny,
        }
    }

    /// Square of half-width `half_width` metres around the optical axis.
    pub fn centered<T: Real>(grid: &GridSpec<T>, half_width: T) -> Self {
        let rx = (half_width / grid.dx)
            .round()
            .to_usize()
            .unwrap_or(0)
            .max(1);
        let ry = (half_width / grid.dy)
            .round()
            .to_usize()
            .unwrap_or(0)
            .max(1);
        let (cx, cy) = (grid.nx / 2, grid.ny / 2);
        Self {
            x0: cx.saturating_sub(rx),
            x1: (cx + rx + 1).min(grid.nx),
            y0: cy.saturating_sub(ry),
            y1: (cy + ry + 1).min(grid.ny),
        }
    }

    pub fn width(&self) -> usize {
        self.x1 - self.x0
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0
    }

    fn indices(&self, nx: usize) -> impl Iterator<Item = usize> + '_ {
        (self.y0..self.y1).flat_map(move |iy| (self.x0..self.x1).map(move |ix| iy * nx + ix))
    }
}

/// Zero-mean normalized cross-correlation at zero shift over the whole image.
pub fn ncc<T: Real>(a: &IntensityImage<T>, b: &IntensityImage<T>) -> Result<T, MetricsError> {
    ncc_in(a, b, &Roi::full(&a.grid))
}

/// [`ncc`] restricted to a window.
pub fn ncc_in<T: Real>(
    a: &IntensityImage<T>,
    b: &IntensityImage<T>,
    roi: &Roi,
) -> Result<T, MetricsError> {
    if a.grid.nx != b.grid.nx || a.grid.ny != b.grid.ny {
        return Err(MetricsError::GridMismatch);
    }
    if roi.x1 > a.grid.nx || roi.y1 > a.grid.ny || roi.x0 >= roi.x1 || roi.y0 >= roi.y1 {
        return Err(MetricsError::Invalid("window outside the image".into()));
    }
    let nx = a.grid.nx;
    let n = T::from_usize_lossy(roi.width() * roi.height());
    let (mut ma, mut mb) = (T::zero(), T::zero());
    for i in roi.indices(nx) {
        ma = ma + a.values[i];
        mb = mb + b.values[i];
    }
    ma = ma / n;
    mb = mb / n;
    let (mut sab, mut saa, mut sbb) = (T::zero(), T::zero(), T::zero());
    for i in roi.indices(nx) {
        let (da, db) = (a.values[i] - ma, b.values[i] - mb);
        sab = sab + da * db;
        saa = saa + da * da;
        sbb = sbb + db * db;
    }
    // Relative floor: a constant image has rounding-level residual variance.
    let floor_a = T::epsilon() * ma.abs().max(T::min_positive_value());
    let floor_b = T::epsilon() * mb.abs().max(T::min_positive_value());
    if (saa / n).sqrt() <= floor_a || (sbb / n).sqrt() <= floor_b {
        return Err(MetricsError::ZeroVariance);
    }
    let r = sab / (saa.sqrt() * sbb.sqrt());
    Ok(r.max(-T::one()).min(T::one()))
}

fn local_extrema<T: Real>(p: &[T]) -> (Vec<usize>, Vec<usize>) {
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    for i in 1..p.len().saturating_sub(1) {
        if p[i - 1] < p[i] && p[i] >= p[i + 1] {
            maxima.push(i);
        } else if p[i - 1] > p[i] && p[i] <= p[i + 1] {
            minima.push(i);
        }
    }
    (maxima, minima)
}

/// (Imax − Imin)/(Imax + Imin) for the brightest fringe and the mean of the
/// two minima adjacent to it.
pub fn fringe_visibility<T: Real>(profile: &[T]) -> Result<T, MetricsError> {
    let (maxima, minima) = local_extrema(profile);
    if maxima.len() + minima.len() < 3 {
        return Err(MetricsError::NoFringes);
    }
    let centre = profile.len() / 2;
    // Candidates: maxima with a minimum on both sides. Near-equal peaks
    // (cos²-like patterns) resolve to the one closest to the centre.
    let bracketed = maxima.iter().copied().filter_map(|m| {
        let left = minima.iter().copied().filter(|&v| v < m).max()?;
        let right = minima.iter().copied().filter(|&v| v > m).min()?;
        Some((m, left, right))
    });
    let tie = T::lit(1e-9);
    let (peak, left, right) = bracketed
        .reduce(|best, cand| {
            let (b, c) = (profile[best.0], profile[cand.0]);
            let brighter = c > b * (T::one() + tie);
            let tied_and_closer =
                c >= b * (T::one() - tie) && centre.abs_diff(cand.0) < centre.abs_diff(best.0);
            if brighter || tied_and_closer {
                cand
            } else {
                best
            }
        })
        .ok_or(MetricsError::NoFringes)?;
    let i_max = profile[peak];
    let i_min = (profile[left] + profile[right]) / T::lit(2.0);
    if i_max + i_min <= T::zero() {
        return Err(MetricsError::NoFringes);
    }
    Ok((i_max - i_min) / (i_max + i_min))
}

/// Distance between the `lo` and `hi` crossings of the steepest edge of a
/// profile normalized to [0, 1], with linear interpolation between samples.
pub fn edge_width<T: Real>(profile: &[T], spacing: T, lo: T, hi: T) -> Result<T, MetricsError> {
    let no_edge = || MetricsError::NoEdge {
        lo: lo.to_f64_lossy(),
        hi: hi.to_f64_lossy(),
    };
    if !(T::zero() < lo && lo < hi && hi < T::one()) {
        return Err(MetricsError::Invalid("need 0 < lo < hi < 1".into()));
    }
    if profile.len() < 2 {
        return Err(no_edge());
    }
    let min = profile.iter().fold(T::infinity(), |a, &v| a.min(v));
    let max = profile.iter().fold(T::neg_infinity(), |a, &v| a.max(v));
    if !(max > min) {
        return Err(no_edge());
    }
    let mut q: Vec<T> = profile.iter().map(|&v| (v - min) / (max - min)).collect();

    let steepest = (0..q.len() - 1)
        .max_by(|&i, &j| {
            (q[i + 1] - q[i])
                .abs()
                .partial_cmp(&(q[j + 1] - q[j]).abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .ok_or_else(no_edge)?;
    let mut s = steepest;
    if q[s + 1] < q[s] {
        q.reverse();
        s = q.len() - 2 - s;
    }

    let lower = (0..=s)
        .rev()
        .find(|&j| q[j] <= lo && q[j + 1] > lo)
        .map(|j| T::from_usize_lossy(j) + (lo - q[j]) / (q[j + 1] - q[j]))
        .ok_or_else(no_edge)?;
    let start = lower.floor().to_usize().unwrap_or(0) + 1;
    let upper = (start..q.len())
        .find(|&k| q[k] >= hi && q[k - 1] < hi)
        .map(|k| T::from_usize_lossy(k - 1) + (hi - q[k - 1]) / (q[k] - q[k - 1]))
        .ok_or_else(no_edge)?;
    Ok((upper - lower).abs() * spacing)
}

/// power(out) / power(in).
pub fn transmitted_power_fraction<T: Real>(
    out: &ComplexField2D<T>,
    input: &ComplexField2D<T>,
) -> Result<T, MetricsError> {
    if !out.grid.same_sampling(&input.grid) {
        return Err(MetricsError::GridMismatch);
    }
    let p_in = input.power();
    if !(p_in > T::zero()) {
        return Err(MetricsError::ZeroInput);
    }
    Ok(out.power() / p_in)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex;
    use proptest::prelude::*;

    use super::*;

    fn grid() -> GridSpec<f64> {
        GridSpec::square(64, 1e-3, 795e-9).unwrap()
    }

    fn image(f: impl Fn(usize, usize) -> f64) -> IntensityImage<f64> {
        let g = grid();
        let values = (0..g.len()).map(|i| f(i % g.nx, i / g.nx)).collect();
        IntensityImage::from_values(g, values).unwrap()
    }

    fn textured() -> IntensityImage<f64> {
        image(|x, y| ((x * 7 + y * 3) % 11) as f64 + 0.5 * (x as f64 / 9.0).sin().abs())
    }

    #[test]
    fn ncc_self_is_one() {
        let a = textured();
        assert!((ncc(&a, &a).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ncc_affine_invariant() {
        let a = textured();
        let b = IntensityImage {
            grid: a.grid,
            values: a.values.iter().map(|v| 3.5 * v + 2.0).collect(),
        };
        assert!((ncc(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ncc_opposite_halves() {
        let left = image(|x, _| if x < 32 { 1.0 } else { 0.0 });
        let right = image(|x, _| if x >= 32 { 1.0 } else { 0.0 });
        assert!((ncc(&left, &right).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn ncc_zero_variance() {
        let flat = image(|_, _| 2.0);
        assert_eq!(ncc(&flat, &textured()), Err(MetricsError::ZeroVariance));
    }

    #[test]
    fn ncc_window() {
        let a = textured();
        let b = image(|x, y| if x < 10 { 5.0 } else { a.at(x, y) });
        let roi = Roi {
            x0: 10,
            x1: 64,
            y0: 0,
            y1: 64,
        };
        assert!((ncc_in(&a, &b, &roi).unwrap() - 1.0).abs() < 1e-14);
        assert!(ncc(&a, &b).unwrap() < 1.0);
        let bad = Roi {
            x0: 10,
            x1: 65,
            y0: 0,
            y1: 64,
        };
        assert!(ncc_in(&a, &b, &bad).is_err());
    }

    #[test]
    fn centered_roi_is_symmetric() {
        let g = grid();
        let roi = Roi::centered(&g, 10.0 * g.dx);
        assert_eq!((roi.x0, roi.x1), (22, 43));
        assert_eq!(roi.width(), 21);
    }

    #[test]
    fn visibility_of_cos_squared() {
        let p: Vec<f64> = (0..400).map(|i| (i as f64 * 0.05).cos().powi(2)).collect();
        assert!((fringe_visibility(&p).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn visibility_of_offset_fringes() {
        let p: Vec<f64> = (0..400).map(|i| 2.0 + (i as f64 * 0.1).cos()).collect();
        assert!((fringe_visibility(&p).unwrap() - 0.5).abs() < 1e-3);
    }

    #[test]
    fn visibility_requires_fringes() {
        assert_eq!(fringe_visibility(&[1.0; 50]), Err(MetricsError::NoFringes));
        let bump: Vec<f64> = (0..50)
            .map(|i| (-((i as f64 - 25.0) / 5.0).powi(2)).exp())
            .collect();
        assert_eq!(fringe_visibility(&bump), Err(MetricsError::NoFringes));
    }

    #[test]
    fn edge_of_ideal_step() {
        let dx = 1e-5;
        let p: Vec<f64> = (0..50).map(|i| if i < 20 { 0.0 } else { 1.0 }).collect();
        assert!(edge_width(&p, dx, 0.1, 0.9).unwrap() <= 2.0 * dx);
        let falling: Vec<f64> = p.iter().rev().copied().collect();
        assert!(edge_width(&falling, dx, 0.1, 0.9).unwrap() <= 2.0 * dx);
    }

    #[test]
    fn edge_of_linear_ramp() {
        let dx = 2e-6;
        // ramp over samples 10..=40, i.e. W = 30 dx
        let p: Vec<f64> = (0..60)
            .map(|i| ((i as f64 - 10.0) / 30.0).clamp(0.0, 1.0))
            .collect();
        let w = edge_width(&p, dx, 0.1, 0.9).unwrap();
        assert!((w - 0.8 * 30.0 * dx).abs() < 1e-15);
    }

    #[test]
    fn edge_errors() {
        assert!(matches!(
            edge_width(&[1.0; 10], 1.0, 0.1, 0.9),
            Err(MetricsError::NoEdge { .. })
        ));
        assert!(matches!(
            edge_width(&[0.0, 1.0], 1.0, 0.9, 0.1),
            Err(MetricsError::Invalid(_))
        ));
    }

    #[test]
    fn power_fraction_cases() {
        let g = grid();
        let f = ComplexField2D::from_fn(g, |x, _| Complex::new(1.0 + x * 1e3, 0.0));
        assert_eq!(transmitted_power_fraction(&f, &f).unwrap(), 1.0);
        assert_eq!(
            transmitted_power_fraction(&ComplexField2D::zeros(g), &f).unwrap(),
            0.0
        );
        assert_eq!(
            transmitted_power_fraction(&f, &ComplexField2D::zeros(g)),
            Err(MetricsError::ZeroInput)
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn ncc_is_symmetric(seed in 0u64..10_000) {
            let a = image(|x, y| ((x * 31 + y * 17 + seed as usize) % 13) as f64);
            let b = image(|x, y| ((x * 5 + y * 29 + 3 * seed as usize) % 7) as f64);
            let ab = ncc(&a, &b).unwrap();
            let ba = ncc(&b, &a).unwrap();
            prop_assert!((ab - ba).abs() < 1e-14);
            prop_assert!((-1.0..=1.0).contains(&ab));
        }

        #[test]
        fn edge_width_scales_with_axis(scale in 0.1f64..10.0, width in 3usize..25) {
            let p: Vec<f64> = (0..60)
                .map(|i| ((i as f64 - 15.0) / width as f64).clamp(0.0, 1.0))
                .collect();
            let base = edge_width(&p, 1e-5, 0.1, 0.9).unwrap();
            let stretched = edge_width(&p, 1e-5 * scale, 0.1, 0.9).unwrap();
            prop_assert!((stretched / (base * scale) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn metrics_are_deterministic(seed in 0u64..1000) {
            let a = image(|x, y| ((x * y + seed as usize) % 17) as f64);
            let b = image(|x, y| ((x + 2 * y + seed as usize) % 5) as f64);
            prop_assert_eq!(ncc(&a, &b).unwrap().to_bits(), ncc(&a, &b).unwrap().to_bits());
        }
    }
}
