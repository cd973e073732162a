use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use super::SceneError;
use crate::optics::GridSpec;
use crate::pgm::Pgm;
use crate::scalar::Real;

/// Width-to-height ratio of the generated glyphs.
pub const GLYPH_ASPECT: f64 = 0.8;

/// Real amplitude transmission in [0, 1], row-major like the fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask2D<T> {
    pub grid: GridSpec<T>,
    pub transmission: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Glyph {
    U,
    O,
}

impl std::str::FromStr for Glyph {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "U" | "u" => Ok(Glyph::U),
            "O" | "o" => Ok(Glyph::O),
            other => Err(format!("unknown glyph {other:?} (expected U or O)")),
        }
    }
}

impl std::fmt::Display for Glyph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Glyph::U => "U",
            Glyph::O => "O",
        })
    }
}

impl<T: Real> Mask2D<T> {
    pub fn opaque(grid: GridSpec<T>) -> Self {
        Self {
            grid,
            transmission: vec![T::zero(); grid.len()],
        }
    }

    pub fn transparent(grid: GridSpec<T>) -> Self {
        Self {
            grid,
            transmission: vec![T::one(); grid.len()],
        }
    }

    /// Clamps every sample into [0, 1].
    pub fn from_values(grid: GridSpec<T>, values: Vec<T>) -> Result<Self, SceneError> {
        if values.len() != grid.len() {
            return Err(SceneError::GridMismatch);
        }
        let mut mask = Self {
            grid,
            transmission: values,
        };
        mask.clamp();
        Ok(mask)
    }

    pub fn from_predicate(grid: GridSpec<T>, mut open: impl FnMut(T, T) -> bool) -> Self {
        let mut transmission = Vec::with_capacity(grid.len());
        for iy in 0..grid.ny {
            let y = grid.y(iy);
            for ix in 0..grid.nx {
                transmission.push(if open(grid.x(ix), y) {
                    T::one()
                } else {
                    T::zero()
                });
            }
        }
        Self { grid, transmission }
    }

    pub fn clamp(&mut self) {
        for t in &mut self.transmission {
            *t = if t.is_nan() {
                T::zero()
            } else {
                t.max(T::zero()).min(T::one())
            };
        }
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> T {
        self.transmission[iy * self.grid.nx + ix]
    }

    pub fn complement(&self) -> Self {
        Self {
            grid: self.grid,
            transmission: self.transmission.iter().map(|&t| T::one() - t).collect(),
        }
    }

    /// Mean transmission over the window.
    pub fn open_fraction(&self) -> T {
        let sum = self.transmission.iter().fold(T::zero(), |a, &t| a + t);
        sum / T::from_usize_lossy(self.transmission.len())
    }

    pub fn is_binary(&self) -> bool {
        self.transmission
            .iter()
            .all(|&t| t == T::zero() || t == T::one())
    }

    /// Separable [¼, ½, ¼] raised-cosine blur; softens hard edges by about
    /// one pixel. Periodic at the window edge, like the FFT grid.
    pub fn smooth_edges(&self) -> Self {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let quarter = T::lit(0.25);
        let half = T::lit(0.5);
        let mut tmp = vec![T::zero(); self.transmission.len()];
        for iy in 0..ny {
            for ix in 0..nx {
                let l = self.at((ix + nx - 1) % nx, iy);
                let r = self.at((ix + 1) % nx, iy);
                tmp[iy * nx + ix] = quarter * l + half * self.at(ix, iy) + quarter * r;
            }
        }
        let mut out = vec![T::zero(); tmp.len()];
        for iy in 0..ny {
            for ix in 0..nx {
                let u = tmp[((iy + ny - 1) % ny) * nx + ix];
                let d = tmp[((iy + 1) % ny) * nx + ix];
                out[iy * nx + ix] = quarter * u + half * tmp[iy * nx + ix] + quarter * d;
            }
        }
        Self {
            grid: self.grid,
            transmission: out,
        }
    }

    /// Pixel indices (ix, iy) of the bounding box of open samples, inclusive.
    pub fn open_bounds(&self) -> Option<(usize, usize, usize, usize)> {
        let nx = self.grid.nx;
        let mut bounds: Option<(usize, usize, usize, usize)> = None;
        for (i, &t) in self.transmission.iter().enumerate() {
            if t > T::zero() {
                let (ix, iy) = (i % nx, i / nx);
                bounds = Some(match bounds {
                    None => (ix, ix, iy, iy),
                    Some((x0, x1, y0, y1)) => (x0.min(ix), x1.max(ix), y0.min(iy), y1.max(iy)),
                });
            }
        }
        bounds
    }
}

/// Two vertical slits of width `slit_width`, centres `separation` apart.
pub fn double_slit<T: Real>(
    grid: GridSpec<T>,
    slit_width: T,
    separation: T,
) -> Result<Mask2D<T>, SceneError> {
    if slit_width < T::lit(2.0) * grid.dx {
        return Err(SceneError::TooFine {
            size: slit_width.to_f64_lossy(),
            spacing: grid.dx.to_f64_lossy(),
            min_samples: 2,
        });
    }
    if !(separation > slit_width) {
        return Err(SceneError::InvalidGeometry(
            "slit separation must exceed the slit width".into(),
        ));
    }
    let half_w = slit_width / T::lit(2.0);
    let centre = separation / T::lit(2.0);
    Ok(Mask2D::from_predicate(grid, |x, _| {
        (x - centre).abs() <= half_w || (x + centre).abs() <= half_w
    }))
}

/// Block letter built from axis-aligned rectangles.
///
/// 'O' is the band between an outer rectangle (`height` tall,
/// `GLYPH_ASPECT·height` wide) and the same rectangle shrunk by `stroke` on
/// every side. 'U' is that band minus its top bar (all rows above the inner
/// rectangle). "Top" is negative y, i.e. the upper rows of a rendered image.
pub fn glyph_mask<T: Real>(
    grid: GridSpec<T>,
    glyph: Glyph,
    height: T,
    stroke: T,
) -> Result<Mask2D<T>, SceneError> {
    let finest = grid.dx.max(grid.dy);
    if stroke < T::lit(3.0) * finest {
        return Err(SceneError::TooFine {
            size: stroke.to_f64_lossy(),
            spacing: finest.to_f64_lossy(),
            min_samples: 3,
        });
    }
    let half_h = height / T::lit(2.0);
    let half_w = T::lit(GLYPH_ASPECT) * height / T::lit(2.0);
    if !(half_w > stroke) || !(half_h > stroke) {
        return Err(SceneError::InvalidGeometry(
            "stroke too wide for glyph size".into(),
        ));
    }
    let in_outer = move |x: T, y: T| x.abs() <= half_w && y.abs() <= half_h;
    let in_inner = move |x: T, y: T| x.abs() < half_w - stroke && y.abs() < half_h - stroke;
    let top_bar = move |y: T| y <= -(half_h - stroke);
    Ok(Mask2D::from_predicate(grid, |x, y| {
        let ring = in_outer(x, y) && !in_inner(x, y);
        match glyph {
            Glyph::O => ring,
            Glyph::U => ring && !top_bar(y),
        }
    }))
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// Writes the mask as an 8-bit P5 PGM (0 opaque, 255 transparent) plus a
/// `<file>.meta` sidecar recording the pixel spacing.
pub fn write_mask_pgm<T: Real>(mask: &Mask2D<T>, path: &Path) -> Result<PathBuf, SceneError> {
    let samples = mask
        .transmission
        .iter()
        .map(|&t| (t.to_f64_lossy() * 255.0).round().clamp(0.0, 255.0) as u16)
        .collect();
    let pgm = Pgm {
        width: mask.grid.nx,
        height: mask.grid.ny,
        maxval: 255,
        samples,
    };
    let file = fs::File::create(path).map_err(|e| SceneError::MaskFile(e.to_string()))?;
    pgm.write(BufWriter::new(file))
        .map_err(|e| SceneError::MaskFile(e.to_string()))?;
    let meta = format!(
        "dx = {:e}\ndy = {:e}\n",
        mask.grid.dx.to_f64_lossy(),
        mask.grid.dy.to_f64_lossy()
    );
    let side = sidecar_path(path);
    fs::write(&side, meta).map_err(|e| SceneError::MaskFile(e.to_string()))?;
    Ok(side)
}

/// Reads a mask written by [`write_mask_pgm`] (or any P5 PGM with a sidecar).
pub fn read_mask_pgm<T: Real>(path: &Path, wavelength: T) -> Result<Mask2D<T>, SceneError> {
    let err = |e: String| SceneError::MaskFile(format!("{}: {e}", path.display()));
    let file = fs::File::open(path).map_err(|e| err(e.to_string()))?;
    let pgm = Pgm::read(BufReader::new(file)).map_err(|e| err(e.to_string()))?;
    let side = sidecar_path(path);
    let meta = fs::read_to_string(&side)
        .map_err(|e| SceneError::MaskFile(format!("{}: {e}", side.display())))?;
    let mut dx = None;
    let mut dy = None;
    for line in meta.lines() {
        let Some((key, value)) = line.split_once('=') else {
            continue;
        };
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| err(format!("bad sidecar value {value:?}")))?;
        match key.trim() {
            "dx" => dx = Some(value),
            "dy" => dy = Some(value),
            _ => {}
        }
    }
    let (Some(dx), Some(dy)) = (dx, dy) else {
        return Err(err("sidecar lacks dx/dy".into()));
    };
    let grid = GridSpec::new(pgm.width, pgm.height, T::lit(dx), T::lit(dy), wavelength)?;
    let scale = T::one() / T::lit(f64::from(pgm.maxval));
    let values = pgm
        .samples
        .iter()
        .map(|&s| T::lit(f64::from(s)) * scale)
        .collect();
    Mask2D::from_values(grid, values)
}
