//! Image and CSV output for density grids and revival reports.
//!
//! Images put time on the vertical axis, increasing downward, and position on
//! the horizontal axis. Pixel intensities are `(ρ/ρ_max)^γ`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use image::{Rgb, RgbImage};

use crate::error::{Error, Result};
use crate::evolution::{DensityGrid, GridSpec, RevivalReport};
use crate::spectrum::ModelKind;

pub const DEFAULT_GAMMA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Palette {
    Grayscale,
    #[default]
    Viridis,
}

impl FromStr for Palette {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "grayscale" | "gray" | "grey" => Ok(Palette::Grayscale),
            "viridis" => Ok(Palette::Viridis),
            other => Err(format!("unknown colormap '{other}' (expected grayscale or viridis)")),
        }
    }
}

// Viridis sampled at nine evenly spaced stops.
const VIRIDIS: [[u8; 3]; 9] = [
    [68, 1, 84],
    [71, 44, 122],
    [59, 81, 139],
    [44, 113, 142],
    [33, 144, 141],
    [39, 173, 129],
    [92, 200, 99],
    [170, 220, 50],
    [253, 231, 37],
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorMap {
    pub palette: Palette,
    pub gamma: f64,
}

impl Default for ColorMap {
    fn default() -> Self {
        Self { palette: Palette::default(), gamma: DEFAULT_GAMMA }
    }
}

impl ColorMap {
    pub fn new(palette: Palette, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self { palette, gamma })
    }

    /// Color of a scaled intensity in `[0, 1]`.
    pub fn color(&self, level: f64) -> [u8; 3] {
        let level = level.clamp(0.0, 1.0);
        match self.palette {
            Palette::Grayscale => {
                let g = (255.0 * level).round() as u8;
                [g, g, g]
            }
            Palette::Viridis => {
                let x = level * (VIRIDIS.len() - 1) as f64;
                let i = (x.floor() as usize).min(VIRIDIS.len() - 2);
                let frac = x - i as f64;
                let (a, b) = (VIRIDIS[i], VIRIDIS[i + 1]);
                std::array::from_fn(|c| {
                    (f64::from(a[c]) + frac * (f64::from(b[c]) - f64::from(a[c]))).round() as u8
                })
            }
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidGrid(format!("gamma must be > 0 (got {gamma})")))
    }
}

fn levels(grid: &DensityGrid, gamma: f64) -> Result<impl Iterator<Item = f64> + '_> {
    check_gamma(gamma)?;
    let peak = grid.peak();
    if peak <= 0.0 {
        return Err(Error::ZeroPeak);
    }
    Ok(grid.values().iter().map(move |v| (v.max(0.0) / peak).powf(gamma)))
}

/// Binary 16-bit big-endian PGM (P5) encoding of `grid`.
pub fn pgm_bytes(grid: &DensityGrid, gamma: f64) -> Result<Vec<u8>> {
    let header = format!(
        "P5\n# quantum carpet: rows = time (increasing downward), columns = z; gamma = {gamma}\n{} {}\n65535\n",
        grid.spec.nz, grid.spec.nt
    );
    let mut out = Vec::with_capacity(header.len() + 2 * grid.values().len());
    out.extend_from_slice(header.as_bytes());
    for level in levels(grid, gamma)? {
        let px = (65535.0 * level).round() as u16;
        out.extend_from_slice(&px.to_be_bytes());
    }
    Ok(out)
}

pub fn write_pgm(grid: &DensityGrid, gamma: f64, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, pgm_bytes(grid, gamma)?)?;
    Ok(())
}

pub fn to_image(grid: &DensityGrid, colormap: &ColorMap) -> Result<RgbImage> {
    let (w, h) = (grid.spec.nz as u32, grid.spec.nt as u32);
    let mut img = RgbImage::new(w, h);
    for (px, level) in img.pixels_mut().zip(levels(grid, colormap.gamma)?) {
        *px = Rgb(colormap.color(level));
    }
    Ok(img)
}

/// 8-bit RGB PNG through `colormap`.
pub fn write_png(grid: &DensityGrid, colormap: &ColorMap, path: impl AsRef<Path>) -> Result<()> {
    to_image(grid, colormap)?.save_with_format(path, image::ImageFormat::Png)?;
    Ok(())
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text: `#`-prefixed metadata, then one comma-separated row of 17
/// significant-digit densities per time sample.
pub fn grid_to_csv(grid: &DensityGrid) -> String {
    let s = &grid.spec;
    let mut out = String::new();
    out.push_str("# qcarpet density grid\n");
    let _ = writeln!(out, "# nz={}", s.nz);
    let _ = writeln!(out, "# nt={}", s.nt);
    let _ = writeln!(out, "# t_max={}", sci(s.t_max));
    let _ = writeln!(out, "# t_unit={}", sci(s.t_unit));
    let _ = writeln!(out, "# length={}", sci(s.length));
    let _ = writeln!(out, "# model={}", grid.model);
    let _ = writeln!(out, "# q={}", sci(grid.q));
    for row in grid.rows() {
        let line: Vec<String> = row.iter().map(|&v| sci(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(grid: &DensityGrid, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, grid_to_csv(grid))?;
    Ok(())
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Inverse of [`grid_to_csv`].
pub fn parse_grid_csv(text: &str) -> Result<DensityGrid> {
    let mut meta = std::collections::HashMap::new();
    let mut values = Vec::new();
    let mut rows = 0usize;
    let mut width = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.trim().split_once('=') {
                meta.insert(k.trim().to_string(), (line_no, v.trim().to_string()));
            }
            continue;
        }
        let before = values.len();
        for tok in line.split(',') {
            let v: f64 = tok
                .trim()
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad number '{}'", tok.trim())))?;
            values.push(v);
        }
        let n = values.len() - before;
        if *width.get_or_insert(n) != n {
            return Err(parse_err(line_no, format!("row has {n} values, expected {}", width.unwrap())));
        }
        rows += 1;
    }

    fn field<T: FromStr>(
        meta: &std::collections::HashMap<String, (usize, String)>,
        key: &str,
    ) -> Result<T> {
        let (line, v) = meta.get(key).ok_or_else(|| parse_err(0, format!("missing '{key}' header")))?;
        v.parse().map_err(|_| parse_err(*line, format!("bad value for '{key}': '{v}'")))
    }

    let nz: usize = field(&meta, "nz")?;
    let nt: usize = field(&meta, "nt")?;
    let model: ModelKind = field(&meta, "model")?;
    let spec = GridSpec::new(
        nz,
        nt,
        field(&meta, "t_max")?,
        field(&meta, "t_unit")?,
        field(&meta, "length")?,
    )
    .map_err(|e| parse_err(0, e.to_string()))?;
    if rows != nt || width.unwrap_or(0) != nz {
        return Err(parse_err(
            0,
            format!("header declares {nz}x{nt} but data is {}x{rows}", width.unwrap_or(0)),
        ));
    }
    DensityGrid::from_values(spec, model, field(&meta, "q")?, values)
}

pub fn read_grid_csv(path: impl AsRef<Path>) -> Result<DensityGrid> {
    parse_grid_csv(&fs::read_to_string(path)?)
}

/// Revival report as CSV: metadata, the `(t, A)` trace block, then a
/// `# peaks` block with one line per detected revival.
pub fn report_to_csv(report: &RevivalReport) -> String {
    let mut out = String::new();
    out.push_str("# qcarpet revival report\n");
    let _ = writeln!(out, "# model={}", report.model);
    let _ = writeln!(out, "# analytic_trev={}", sci(report.analytic_trev));
    let _ = writeln!(out, "# n0={}", report.n0);
    let _ = writeln!(out, "# samples={}", report.autocorr.len());
    out.push_str("t,A\n");
    for &(t, a) in &report.autocorr {
        let _ = writeln!(out, "{},{}", sci(t), sci(a));
    }
    let _ = writeln!(out, "# peaks={}", report.peaks.len());
    for pk in &report.peaks {
        let _ = writeln!(out, "{},{}", sci(pk.t), sci(pk.a));
    }
    out
}

pub fn write_report_csv(report: &RevivalReport, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, report_to_csv(report))?;
    Ok(())
}
