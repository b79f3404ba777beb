//! Sampled Radon transforms and their on-disk format.
//!
//! The file format is self-describing ASCII:
//!
//! ```text
//! SINOGRAM v1 n_psi=180 n_t=512 t_min=-3 t_max=3
//! <n_t space-separated values for psi_0>
//! ...                                            (n_psi rows total)
//! ```
//!
//! Values are written with 17 significant digits so doubles round-trip
//! bit-exactly. Angles are sampled at the left cell edges
//! `psi_i = i pi / n_psi` (matching the half-open integration domain) and
//! offsets at cell centers.

use crate::phantom::Phantom;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SinogramError {
    #[error("invalid sinogram: {0}")]
    Invalid(String),
    #[error("line {line}: {msg}")]
    Header { line: usize, msg: String },
    #[error("line {line}, column {column}: invalid value `{token}`")]
    Cell {
        line: usize,
        column: usize,
        token: String,
    },
    #[error("line {line}: expected {expected} values, got {got}")]
    RowLength {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("expected {expected} data rows, file ends after row {got}")]
    RowCount { expected: usize, got: usize },
    #[error("failed to access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Radon transform samples on a regular `(psi, t)` grid, stored row-major
/// by angle.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    n_psi: usize,
    n_t: usize,
    t_min: f64,
    t_max: f64,
    values: Vec<f64>,
}

impl Sinogram {
    pub fn new(
        n_psi: usize,
        n_t: usize,
        t_min: f64,
        t_max: f64,
        values: Vec<f64>,
    ) -> Result<Self, SinogramError> {
        if n_psi < 2 || n_t < 2 {
            return Err(SinogramError::Invalid(format!(
                "need at least 2 samples per axis, got n_psi={n_psi}, n_t={n_t}"
            )));
        }
        if !(t_min < t_max) || !t_min.is_finite() || !t_max.is_finite() {
            return Err(SinogramError::Invalid(format!(
                "t range [{t_min}, {t_max}] is not a finite ordered interval"
            )));
        }
        if values.len() != n_psi * n_t {
            return Err(SinogramError::Invalid(format!(
                "value count {} does not match {n_psi} x {n_t}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(SinogramError::Invalid(format!(
                "non-finite value at flat index {bad}"
            )));
        }
        Ok(Sinogram {
            n_psi,
            n_t,
            t_min,
            t_max,
            values,
        })
    }

    /// Samples the analytic transform of `phantom`, parallel over rows.
    pub fn sample(
        phantom: &Phantom,
        n_psi: usize,
        n_t: usize,
        t_range: (f64, f64),
    ) -> Result<Self, SinogramError> {
        let (t_min, t_max) = t_range;
        let mut s = Sinogram::new(n_psi, n_t, t_min, t_max, vec![0.0; n_psi * n_t])?;
        let dt = s.dt();
        s.values
            .par_chunks_mut(n_t)
            .enumerate()
            .for_each(|(i, row)| {
                let psi = i as f64 * PI / n_psi as f64;
                let n = (psi.cos(), psi.sin());
                for (j, cell) in row.iter_mut().enumerate() {
                    let t = t_min + (j as f64 + 0.5) * dt;
                    *cell = phantom.radon_dir(t, n);
                }
            });
        Ok(s)
    }

    pub fn n_psi(&self) -> usize {
        self.n_psi
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.t_min, self.t_max)
    }

    pub fn dt(&self) -> f64 {
        (self.t_max - self.t_min) / self.n_t as f64
    }

    pub fn psi_at(&self, i: usize) -> f64 {
        i as f64 * PI / self.n_psi as f64
    }

    pub fn t_at(&self, j: usize) -> f64 {
        self.t_min + (j as f64 + 0.5) * self.dt()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_t..(i + 1) * self.n_t]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_t + j]
    }

    /// Whether the sampled `t` range covers a phantom of the given support
    /// radius.
    pub fn covers(&self, support_radius: f64) -> bool {
        self.t_min <= -support_radius && self.t_max >= support_radius
    }

    /// Reconstructs `Rf(t, psi)`: nearest row in `psi` (wrapping past the
    /// half turn with `t -> -t`), linear interpolation between cell centers
    /// in `t`, clamped at the first and last centers.
    pub fn interpolate(&self, t: f64, psi: f64) -> f64 {
        let dpsi = PI / self.n_psi as f64;
        let mut i = (psi / dpsi).round() as isize;
        let mut t = t;
        i = i.rem_euclid(2 * self.n_psi as isize);
        if i >= self.n_psi as isize {
            i -= self.n_psi as isize;
            t = -t;
        }
        let row = self.row(i as usize);
        let pos = (t - self.t_min) / self.dt() - 0.5;
        if pos <= 0.0 {
            return row[0];
        }
        let last = (self.n_t - 1) as f64;
        if pos >= last {
            return row[self.n_t - 1];
        }
        let j = pos.floor() as usize;
        let frac = pos - j as f64;
        row[j] * (1.0 - frac) + row[j + 1] * frac
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 24);
        let _ = writeln!(
            out,
            "SINOGRAM v1 n_psi={} n_t={} t_min={} t_max={}",
            self.n_psi, self.n_t, self.t_min, self.t_max
        );
        for i in 0..self.n_psi {
            let row = self.row(i);
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{v:.16e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, SinogramError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(SinogramError::Header {
            line: 1,
            msg: "empty file".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 6 || fields[0] != "SINOGRAM" || fields[1] != "v1" {
            return Err(SinogramError::Header {
                line: 1,
                msg: format!("expected `SINOGRAM v1 n_psi=... n_t=... t_min=... t_max=...`, got `{header}`"),
            });
        }
        fn keyed<'a>(field: &'a str, key: &str) -> Result<&'a str, String> {
            field
                .strip_prefix(key)
                .and_then(|rest| rest.strip_prefix('='))
                .ok_or_else(|| format!("expected `{key}=...`, got `{field}`"))
        }
        let header_err = |msg: String| SinogramError::Header { line: 1, msg };
        let n_psi: usize = keyed(fields[2], "n_psi")
            .and_then(|v| v.parse().map_err(|_| format!("invalid n_psi `{v}`")))
            .map_err(header_err)?;
        let n_t: usize = keyed(fields[3], "n_t")
            .and_then(|v| v.parse().map_err(|_| format!("invalid n_t `{v}`")))
            .map_err(header_err)?;
        let t_min: f64 = keyed(fields[4], "t_min")
            .and_then(|v| v.parse().map_err(|_| format!("invalid t_min `{v}`")))
            .map_err(header_err)?;
        let t_max: f64 = keyed(fields[5], "t_max")
            .and_then(|v| v.parse().map_err(|_| format!("invalid t_max `{v}`")))
            .map_err(header_err)?;

        let mut values = Vec::with_capacity(n_psi.saturating_mul(n_t));
        let mut rows = 0usize;
        for (idx, line) in lines {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            if rows == n_psi {
                return Err(SinogramError::RowCount {
                    expected: n_psi,
                    got: rows + 1,
                });
            }
            let mut count = 0usize;
            for (col, token) in line.split_whitespace().enumerate() {
                let v: f64 = token.parse().map_err(|_| SinogramError::Cell {
                    line: line_no,
                    column: col + 1,
                    token: token.to_string(),
                })?;
                if !v.is_finite() {
                    return Err(SinogramError::Cell {
                        line: line_no,
                        column: col + 1,
                        token: token.to_string(),
                    });
                }
                values.push(v);
                count += 1;
            }
            if count != n_t {
                return Err(SinogramError::RowLength {
                    line: line_no,
                    expected: n_t,
                    got: count,
                });
            }
            rows += 1;
        }
        if rows != n_psi {
            return Err(SinogramError::RowCount {
                expected: n_psi,
                got: rows,
            });
        }
        Sinogram::new(n_psi, n_t, t_min, t_max, values)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, SinogramError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| SinogramError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Writes atomically: the text goes to a sibling temp file which is then
    /// renamed over the destination.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), SinogramError> {
        let path = path.as_ref();
        let io_err = |source| SinogramError::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        std::fs::write(&tmp, self.to_text()).map_err(io_err)?;
        std::fs::rename(&tmp, path).map_err(io_err)
    }
}
