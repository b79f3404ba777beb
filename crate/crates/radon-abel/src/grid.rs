//! Evaluation grids, error metrics, and the CSV / PGM output formats.
//!
//! Grid points sit at cell centers so that analytically placed boundaries
//! (circles through lattice coordinates, unit squares) are not sampled
//! exactly unless asked for. The CSV format is one `x,y,value` row per
//! point in row-major order (y varies slowest), preceded by a `#` comment
//! that pins the geometry exactly.

use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("invalid grid: {0}")]
    Invalid(String),
    #[error("grid geometries differ: {0}")]
    GeometryMismatch(String),
    #[error("csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("failed to access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Rectangular lattice of cell-center evaluation points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeom {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl GridGeom {
    pub fn new(
        x_range: (f64, f64),
        y_range: (f64, f64),
        nx: usize,
        ny: usize,
    ) -> Result<Self, GridError> {
        if nx == 0 || ny == 0 {
            return Err(GridError::Invalid(format!(
                "grid must have at least one cell per axis, got {nx} x {ny}"
            )));
        }
        for (lo, hi) in [x_range, y_range] {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(GridError::Invalid(format!(
                    "range [{lo}, {hi}] is not a finite ordered interval"
                )));
            }
        }
        Ok(GridGeom {
            x_range,
            y_range,
            nx,
            ny,
        })
    }

    pub fn dx(&self) -> f64 {
        (self.x_range.1 - self.x_range.0) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_range.1 - self.y_range.0) / self.ny as f64
    }

    pub fn x_at(&self, i: usize) -> f64 {
        self.x_range.0 + (i as f64 + 0.5) * self.dx()
    }

    pub fn y_at(&self, j: usize) -> f64 {
        self.y_range.0 + (j as f64 + 0.5) * self.dy()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Tolerant equality: counts must match exactly, ranges within a
    /// relative 1e-9 (grids reconstructed from decimal text reproduce
    /// their ranges only to rounding).
    pub fn approx_eq(&self, other: &GridGeom) -> bool {
        let close = |a: f64, b: f64| {
            let scale = a.abs().max(b.abs()).max(1.0);
            (a - b).abs() <= 1e-9 * scale
        };
        self.nx == other.nx
            && self.ny == other.ny
            && close(self.x_range.0, other.x_range.0)
            && close(self.x_range.1, other.x_range.1)
            && close(self.y_range.0, other.y_range.0)
            && close(self.y_range.1, other.y_range.1)
    }
}

/// Grid values stored row-major: index `j * nx + i` for column `i`, row `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconGrid {
    geom: GridGeom,
    values: Vec<f64>,
}

impl ReconGrid {
    pub fn from_values(geom: GridGeom, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != geom.len() {
            return Err(GridError::Invalid(format!(
                "value count {} does not match {} x {}",
                values.len(),
                geom.nx,
                geom.ny
            )));
        }
        Ok(ReconGrid { geom, values })
    }

    /// Fills the grid serially from a per-point function.
    pub fn from_fn(geom: GridGeom, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(geom.len());
        for j in 0..geom.ny {
            for i in 0..geom.nx {
                values.push(f(geom.x_at(i), geom.y_at(j)));
            }
        }
        ReconGrid { geom, values }
    }

    /// Fills the grid in parallel. Points are independent and collected in
    /// index order, so the result is identical to the serial fill for any
    /// thread count.
    pub fn try_from_fn_par<E: Send>(
        geom: GridGeom,
        f: impl Fn(f64, f64) -> Result<f64, E> + Sync,
    ) -> Result<Self, E> {
        let results: Vec<Result<f64, E>> = (0..geom.len())
            .into_par_iter()
            .map(|idx| f(geom.x_at(idx % geom.nx), geom.y_at(idx / geom.nx)))
            .collect();
        let mut values = Vec::with_capacity(results.len());
        for r in results {
            values.push(r?);
        }
        Ok(ReconGrid { geom, values })
    }

    pub fn geom(&self) -> &GridGeom {
        &self.geom
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.geom.nx + i]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let g = &self.geom;
        let mut out = String::with_capacity(self.values.len() * 24);
        let _ = writeln!(
            out,
            "# grid nx={} ny={} xmin={} xmax={} ymin={} ymax={}",
            g.nx, g.ny, g.x_range.0, g.x_range.1, g.y_range.0, g.y_range.1
        );
        for j in 0..g.ny {
            for i in 0..g.nx {
                let _ = writeln!(out, "{},{},{}", g.x_at(i), g.y_at(j), self.value(i, j));
            }
        }
        out
    }

    /// Parses the CSV form. The geometry comment is used when present;
    /// otherwise the lattice is inferred from the coordinate columns.
    pub fn parse_csv(text: &str) -> Result<Self, GridError> {
        let mut geom_hint: Option<GridGeom> = None;
        let mut rows: Vec<(f64, f64, f64)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if geom_hint.is_none() {
                    geom_hint = parse_geom_comment(rest, line_no)?;
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(GridError::Csv {
                    line: line_no,
                    msg: format!("expected 3 comma-separated fields, got {}", fields.len()),
                });
            }
            let mut nums = [0.0f64; 3];
            for (k, field) in fields.iter().enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| GridError::Csv {
                    line: line_no,
                    msg: format!("invalid number `{}`", field.trim()),
                })?;
                if !v.is_finite() {
                    return Err(GridError::Csv {
                        line: line_no,
                        msg: format!("non-finite value `{}`", field.trim()),
                    });
                }
                nums[k] = v;
            }
            rows.push((nums[0], nums[1], nums[2]));
        }
        if rows.is_empty() {
            return Err(GridError::Invalid("csv contains no data rows".into()));
        }

        let geom = match geom_hint {
            Some(g) => g,
            None => infer_geom(&rows)?,
        };
        if rows.len() != geom.len() {
            return Err(GridError::Invalid(format!(
                "csv has {} rows but the grid is {} x {}",
                rows.len(),
                geom.nx,
                geom.ny
            )));
        }
        // The coordinate columns must actually describe this lattice.
        for (k, &(x, y, _)) in rows.iter().enumerate() {
            let (i, j) = (k % geom.nx, k / geom.nx);
            let (ex, ey) = (geom.x_at(i), geom.y_at(j));
            let tol = 1e-9 * (1.0 + ex.abs().max(ey.abs()));
            if (x - ex).abs() > tol || (y - ey).abs() > tol {
                return Err(GridError::Invalid(format!(
                    "row {} has coordinates ({x}, {y}), expected ({ex}, {ey})",
                    k + 1
                )));
            }
        }
        ReconGrid::from_values(geom, rows.into_iter().map(|r| r.2).collect())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self, GridError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| GridError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_csv(&text)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), GridError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|source| GridError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// 8-bit ASCII PGM (`P2`), top row first. Values map affinely from
    /// `[min, max]` to `[0, 255]`; the mapping is recorded in the comment.
    pub fn to_pgm(&self) -> Result<String, GridError> {
        if let Some(bad) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(GridError::Invalid(format!(
                "cannot rasterize non-finite value {bad}"
            )));
        }
        let (min, max) = (self.min_value(), self.max_value());
        let scale = if max > min { 255.0 / (max - min) } else { 0.0 };
        let mut out = String::new();
        let _ = writeln!(out, "P2");
        let _ = writeln!(out, "# gray = round(255 * (value - min) / (max - min)), min={min} max={max}");
        let _ = writeln!(out, "{} {}", self.geom.nx, self.geom.ny);
        let _ = writeln!(out, "255");
        for j in (0..self.geom.ny).rev() {
            for i in 0..self.geom.nx {
                let g = ((self.value(i, j) - min) * scale).round() as i64;
                let _ = write!(out, "{}", g.clamp(0, 255));
                out.push(if (i + 1) % 16 == 0 || i + 1 == self.geom.nx { '\n' } else { ' ' });
            }
        }
        Ok(out)
    }

    pub fn write_pgm(&self, path: impl AsRef<Path>) -> Result<(), GridError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_pgm()?).map_err(|source| GridError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn parse_geom_comment(rest: &str, line_no: usize) -> Result<Option<GridGeom>, GridError> {
    let fields: Vec<&str> = rest.split_whitespace().collect();
    if fields.first() != Some(&"grid") {
        return Ok(None);
    }
    let mut nx = None;
    let mut ny = None;
    let mut range = [None::<f64>; 4];
    for field in &fields[1..] {
        let (key, value) = field.split_once('=').ok_or(GridError::Csv {
            line: line_no,
            msg: format!("malformed geometry field `{field}`"),
        })?;
        let bad = || GridError::Csv {
            line: line_no,
            msg: format!("invalid geometry value `{value}`"),
        };
        match key {
            "nx" => nx = Some(value.parse::<usize>().map_err(|_| bad())?),
            "ny" => ny = Some(value.parse::<usize>().map_err(|_| bad())?),
            "xmin" => range[0] = Some(value.parse::<f64>().map_err(|_| bad())?),
            "xmax" => range[1] = Some(value.parse::<f64>().map_err(|_| bad())?),
            "ymin" => range[2] = Some(value.parse::<f64>().map_err(|_| bad())?),
            "ymax" => range[3] = Some(value.parse::<f64>().map_err(|_| bad())?),
            _ => {
                return Err(GridError::Csv {
                    line: line_no,
                    msg: format!("unknown geometry key `{key}`"),
                })
            }
        }
    }
    match (nx, ny, range) {
        (Some(nx), Some(ny), [Some(x0), Some(x1), Some(y0), Some(y1)]) => {
            GridGeom::new((x0, x1), (y0, y1), nx, ny).map(Some)
        }
        _ => Err(GridError::Csv {
            line: line_no,
            msg: "geometry comment is missing fields".into(),
        }),
    }
}

/// Reconstructs the lattice from bare coordinate rows (no geometry comment).
fn infer_geom(rows: &[(f64, f64, f64)]) -> Result<GridGeom, GridError> {
    let y0 = rows[0].1;
    let nx = rows
        .iter()
        .position(|r| r.1 != y0)
        .unwrap_or(rows.len());
    if rows.len() % nx != 0 {
        return Err(GridError::Invalid(format!(
            "{} rows do not tile into rows of {nx}",
            rows.len()
        )));
    }
    let ny = rows.len() / nx;
    let dx = if nx > 1 {
        rows[1].0 - rows[0].0
    } else {
        1.0
    };
    let dy = if ny > 1 {
        rows[nx].1 - rows[0].1
    } else {
        1.0
    };
    if !(dx > 0.0) || !(dy > 0.0) {
        return Err(GridError::Invalid(
            "coordinates are not increasing row-major".into(),
        ));
    }
    GridGeom::new(
        (rows[0].0 - 0.5 * dx, rows[0].0 + (nx as f64 - 0.5) * dx),
        (y0 - 0.5 * dy, y0 + (ny as f64 - 0.5) * dy),
        nx,
        ny,
    )
}

/// Error metrics of `grid` against `reference` on the same lattice.
#[derive(Debug, Clone, Copy)]
pub struct Comparison {
    pub rmse: f64,
    pub max_abs_err: f64,
    /// Value range of the compared grid.
    pub min_value: f64,
    pub max_value: f64,
    /// Value range of the reference.
    pub ref_min: f64,
    pub ref_max: f64,
}

impl Comparison {
    /// How far the compared values overshoot the reference range; zero
    /// means no overshoot on either side.
    pub fn overshoot(&self) -> f64 {
        (self.max_value - self.ref_max)
            .max(self.ref_min - self.min_value)
            .max(0.0)
    }
}

pub fn compare(grid: &ReconGrid, reference: &ReconGrid) -> Result<Comparison, GridError> {
    if !grid.geom.approx_eq(&reference.geom) {
        return Err(GridError::GeometryMismatch(format!(
            "{:?} vs {:?}",
            grid.geom, reference.geom
        )));
    }
    let mut sq = 0.0;
    let mut max_abs = 0.0f64;
    for (a, b) in grid.values.iter().zip(&reference.values) {
        let d = a - b;
        sq += d * d;
        max_abs = max_abs.max(d.abs());
    }
    let cmp = Comparison {
        rmse: (sq / grid.values.len() as f64).sqrt(),
        max_abs_err: max_abs,
        min_value: grid.min_value(),
        max_value: grid.max_value(),
        ref_min: reference.min_value(),
        ref_max: reference.max_value(),
    };
    debug_assert!(cmp.rmse <= cmp.max_abs_err + 1e-15);
    Ok(cmp)
}
