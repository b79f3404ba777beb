//! Analytic test functions: weighted discs and axis-aligned rectangles.
//!
//! Every operation here is closed-form: point evaluation, the Radon
//! transform along any line, the local average (the circle-average limit,
//! which is 1 inside a piece, 1/2 on a smooth edge, 1/4 at a rectangle
//! corner, 0 outside), and the exact fraction of a circle of radius `r`
//! that lies inside the phantom. The last of these is what makes the
//! convolution-path reconstruction an independent high-precision oracle.
//!
//! A phantom is an ordered list of pieces; all quantities are
//! amplitude-weighted sums over the pieces, so overlapping pieces simply
//! add.

use crate::Point;
use std::f64::consts::TAU;
use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// A point whose signed boundary distance is within this tolerance counts
/// as lying on the boundary when classifying local averages. Keeps the
/// classification deterministic for analytically placed test points.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum PhantomError {
    #[error("{0}")]
    Invalid(String),
    #[error("line {line}, token {token}: {msg}")]
    Parse {
        line: usize,
        token: usize,
        msg: String,
    },
    #[error("failed to read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Classification of a point against a single piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    Interior,
    Edge,
    Corner,
    Exterior,
}

impl PointClass {
    /// Fraction of a vanishing circle around the point that lies inside
    /// the piece.
    pub fn weight(self) -> f64 {
        match self {
            PointClass::Interior => 1.0,
            PointClass::Edge => 0.5,
            PointClass::Corner => 0.25,
            PointClass::Exterior => 0.0,
        }
    }
}

/// Disc of constant amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscPiece {
    pub center: Point,
    pub radius: f64,
    pub amplitude: f64,
}

impl DiscPiece {
    pub fn new(center: Point, radius: f64, amplitude: f64) -> Result<Self, PhantomError> {
        if !center.iter().all(|c| c.is_finite()) {
            return Err(PhantomError::Invalid(format!(
                "disc center ({}, {}) must be finite",
                center[0], center[1]
            )));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(PhantomError::Invalid(format!(
                "disc radius must be positive and finite, got {radius}"
            )));
        }
        if !amplitude.is_finite() {
            return Err(PhantomError::Invalid(format!(
                "disc amplitude must be finite, got {amplitude}"
            )));
        }
        Ok(DiscPiece {
            center,
            radius,
            amplitude,
        })
    }
}

/// Axis-aligned rectangle of constant amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectPiece {
    pub center: Point,
    pub half_widths: [f64; 2],
    pub amplitude: f64,
}

impl RectPiece {
    pub fn new(center: Point, half_widths: [f64; 2], amplitude: f64) -> Result<Self, PhantomError> {
        if !center.iter().all(|c| c.is_finite()) {
            return Err(PhantomError::Invalid(format!(
                "rect center ({}, {}) must be finite",
                center[0], center[1]
            )));
        }
        if !half_widths.iter().all(|h| *h > 0.0 && h.is_finite()) {
            return Err(PhantomError::Invalid(format!(
                "rect half-widths ({}, {}) must be positive and finite",
                half_widths[0], half_widths[1]
            )));
        }
        if !amplitude.is_finite() {
            return Err(PhantomError::Invalid(format!(
                "rect amplitude must be finite, got {amplitude}"
            )));
        }
        Ok(RectPiece {
            center,
            half_widths,
            amplitude,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    Disc(DiscPiece),
    Rect(RectPiece),
}

impl Piece {
    pub fn amplitude(&self) -> f64 {
        match self {
            Piece::Disc(d) => d.amplitude,
            Piece::Rect(r) => r.amplitude,
        }
    }

    /// Membership of the closed piece (boundary included).
    pub fn contains(&self, x: Point) -> bool {
        match self {
            Piece::Disc(d) => {
                let dx = x[0] - d.center[0];
                let dy = x[1] - d.center[1];
                dx * dx + dy * dy <= d.radius * d.radius
            }
            Piece::Rect(r) => {
                (x[0] - r.center[0]).abs() <= r.half_widths[0]
                    && (x[1] - r.center[1]).abs() <= r.half_widths[1]
            }
        }
    }

    /// Interior / edge / corner / exterior, with boundary membership decided
    /// by [`BOUNDARY_TOL`] on the per-axis signed distances.
    pub fn classify(&self, x: Point) -> PointClass {
        match self {
            Piece::Disc(d) => {
                let dx = x[0] - d.center[0];
                let dy = x[1] - d.center[1];
                let s = (dx * dx + dy * dy).sqrt() - d.radius;
                if s.abs() <= BOUNDARY_TOL {
                    PointClass::Edge
                } else if s < 0.0 {
                    PointClass::Interior
                } else {
                    PointClass::Exterior
                }
            }
            Piece::Rect(r) => {
                let sx = (x[0] - r.center[0]).abs() - r.half_widths[0];
                let sy = (x[1] - r.center[1]).abs() - r.half_widths[1];
                let on_x = sx.abs() <= BOUNDARY_TOL;
                let on_y = sy.abs() <= BOUNDARY_TOL;
                let in_x = sx < -BOUNDARY_TOL;
                let in_y = sy < -BOUNDARY_TOL;
                match (on_x, on_y) {
                    (true, true) => PointClass::Corner,
                    (true, false) if in_y => PointClass::Edge,
                    (false, true) if in_x => PointClass::Edge,
                    (false, false) if in_x && in_y => PointClass::Interior,
                    _ => PointClass::Exterior,
                }
            }
        }
    }

    /// Radon transform of the piece along the line with unit normal `n`
    /// at signed offset `t`.
    fn radon(&self, t: f64, n: (f64, f64)) -> f64 {
        match self {
            Piece::Disc(d) => {
                let tau = t - (d.center[0] * n.0 + d.center[1] * n.1);
                let rem = d.radius * d.radius - tau * tau;
                if rem <= 0.0 {
                    0.0
                } else {
                    2.0 * d.amplitude * rem.sqrt()
                }
            }
            Piece::Rect(r) => r.amplitude * rect_chord(r, t, n),
        }
    }

    /// Exact fraction of the circle `|y - x| = r` that lies inside the
    /// closed piece.
    fn ring_coverage(&self, x: Point, r: f64) -> f64 {
        match self {
            Piece::Disc(p) => {
                let dx = x[0] - p.center[0];
                let dy = x[1] - p.center[1];
                let d = (dx * dx + dy * dy).sqrt();
                if d == 0.0 {
                    return if r <= p.radius { 1.0 } else { 0.0 };
                }
                if r <= p.radius - d {
                    return 1.0;
                }
                if r >= p.radius + d || r <= d - p.radius {
                    return 0.0;
                }
                // Half-angle of the covered arc, by the law of cosines.
                let c = (d * d + r * r - p.radius * p.radius) / (2.0 * d * r);
                c.clamp(-1.0, 1.0).acos() / std::f64::consts::PI
            }
            Piece::Rect(p) => {
                let mut cos_arcs = ArcSet::new();
                cos_band(
                    (p.center[0] - p.half_widths[0] - x[0]) / r,
                    (p.center[0] + p.half_widths[0] - x[0]) / r,
                    &mut cos_arcs,
                );
                let mut sin_arcs = ArcSet::new();
                sin_band(
                    (p.center[1] - p.half_widths[1] - x[1]) / r,
                    (p.center[1] + p.half_widths[1] - x[1]) / r,
                    &mut sin_arcs,
                );
                let mut measure = 0.0;
                for a in &cos_arcs.arcs {
                    for b in &sin_arcs.arcs {
                        measure += (a.1.min(b.1) - a.0.max(b.0)).max(0.0);
                    }
                }
                measure / TAU
            }
        }
    }

    /// Radii at which `r -> ring_coverage(x, r)` loses smoothness.
    fn critical_radii(&self, x: Point, out: &mut Vec<f64>) {
        match self {
            Piece::Disc(d) => {
                let dx = x[0] - d.center[0];
                let dy = x[1] - d.center[1];
                let dist = (dx * dx + dy * dy).sqrt();
                out.push((dist - d.radius).abs());
                out.push(dist + d.radius);
            }
            Piece::Rect(r) => {
                for axis in 0..2 {
                    out.push((x[axis] - (r.center[axis] - r.half_widths[axis])).abs());
                    out.push((x[axis] - (r.center[axis] + r.half_widths[axis])).abs());
                }
                for sx in [-1.0, 1.0] {
                    for sy in [-1.0, 1.0] {
                        let cx = r.center[0] + sx * r.half_widths[0] - x[0];
                        let cy = r.center[1] + sy * r.half_widths[1] - x[1];
                        out.push((cx * cx + cy * cy).sqrt());
                    }
                }
            }
        }
    }

    /// Distance from the origin to the farthest point of the piece; the
    /// Radon transform vanishes for `|t|` beyond this.
    fn support_radius(&self) -> f64 {
        match self {
            Piece::Disc(d) => (d.center[0] * d.center[0] + d.center[1] * d.center[1]).sqrt() + d.radius,
            Piece::Rect(r) => {
                let mut far: f64 = 0.0;
                for sx in [-1.0, 1.0] {
                    for sy in [-1.0, 1.0] {
                        let cx = r.center[0] + sx * r.half_widths[0];
                        let cy = r.center[1] + sy * r.half_widths[1];
                        far = far.max((cx * cx + cy * cy).sqrt());
                    }
                }
                far
            }
        }
    }
}

/// Chord length of the line `{p : p . n = t}` through the rectangle
/// (Liang-Barsky clipping of the line against the four half-planes).
fn rect_chord(r: &RectPiece, t: f64, n: (f64, f64)) -> f64 {
    let p0 = [t * n.0, t * n.1];
    let dir = [-n.1, n.0];
    let mut u_min = f64::NEG_INFINITY;
    let mut u_max = f64::INFINITY;
    for axis in 0..2 {
        let lo = r.center[axis] - r.half_widths[axis];
        let hi = r.center[axis] + r.half_widths[axis];
        if dir[axis] == 0.0 {
            if p0[axis] < lo || p0[axis] > hi {
                return 0.0;
            }
        } else {
            let u1 = (lo - p0[axis]) / dir[axis];
            let u2 = (hi - p0[axis]) / dir[axis];
            let (ua, ub) = if u1 <= u2 { (u1, u2) } else { (u2, u1) };
            u_min = u_min.max(ua);
            u_max = u_max.min(ub);
        }
    }
    (u_max - u_min).max(0.0)
}

/// A set of at most three disjoint closed arcs inside `[0, 2 pi]`.
struct ArcSet {
    arcs: [(f64, f64); 3],
    len: usize,
}

impl ArcSet {
    fn new() -> Self {
        ArcSet {
            arcs: [(0.0, 0.0); 3],
            len: 0,
        }
    }

    fn push(&mut self, s: f64, e: f64) {
        if e > s {
            self.arcs[self.len] = (s, e);
            self.len += 1;
        }
    }
}

impl<'a> IntoIterator for &'a ArcSet {
    type Item = &'a (f64, f64);
    type IntoIter = std::slice::Iter<'a, (f64, f64)>;
    fn into_iter(self) -> Self::IntoIter {
        self.arcs[..self.len].iter()
    }
}

/// Arcs of `[0, 2 pi]` where `cos(theta)` lies in `[a, b]`.
fn cos_band(a: f64, b: f64, out: &mut ArcSet) {
    if a > 1.0 || b < -1.0 || a > b {
        return;
    }
    let s = b.min(1.0).acos();
    let e = a.max(-1.0).acos();
    out.push(s, e);
    out.push(TAU - e, TAU - s);
}

/// Arcs of `[0, 2 pi]` where `sin(theta)` lies in `[a, b]`; the cosine
/// solution shifted by `pi/2` and renormalized.
fn sin_band(a: f64, b: f64, out: &mut ArcSet) {
    let mut base = ArcSet::new();
    cos_band(a, b, &mut base);
    for &(s, e) in &base {
        let (s, e) = (s + std::f64::consts::FRAC_PI_2, e + std::f64::consts::FRAC_PI_2);
        if s >= TAU {
            out.push(s - TAU, e - TAU);
        } else if e > TAU {
            out.push(s, TAU);
            out.push(0.0, e - TAU);
        } else {
            out.push(s, e);
        }
    }
}

/// A finite, possibly empty linear combination of pieces. The empty
/// phantom is the zero function.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Phantom {
    pieces: Vec<Piece>,
}

impl Phantom {
    pub fn new(pieces: Vec<Piece>) -> Self {
        Phantom { pieces }
    }

    pub fn disc(center: Point, radius: f64, amplitude: f64) -> Result<Self, PhantomError> {
        Ok(Phantom::new(vec![Piece::Disc(DiscPiece::new(
            center, radius, amplitude,
        )?)]))
    }

    pub fn rect(
        center: Point,
        half_widths: [f64; 2],
        amplitude: f64,
    ) -> Result<Self, PhantomError> {
        Ok(Phantom::new(vec![Piece::Rect(RectPiece::new(
            center,
            half_widths,
            amplitude,
        )?)]))
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn push(&mut self, piece: Piece) {
        self.pieces.push(piece);
    }

    /// Union of two phantoms (pointwise sum of the functions).
    pub fn merged(&self, other: &Phantom) -> Phantom {
        let mut pieces = self.pieces.clone();
        pieces.extend_from_slice(&other.pieces);
        Phantom::new(pieces)
    }

    /// Pointwise value; each closed piece contributes its amplitude.
    pub fn eval(&self, x: Point) -> f64 {
        self.pieces
            .iter()
            .map(|p| if p.contains(x) { p.amplitude() } else { 0.0 })
            .sum()
    }

    /// The circle-average limit at `x`: amplitude-weighted sum of the
    /// per-piece weights (1 interior, 1/2 edge, 1/4 corner, 0 outside).
    pub fn local_average(&self, x: Point) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.amplitude() * p.classify(x).weight())
            .sum()
    }

    /// Radon transform along the line at angle `psi` (unit normal
    /// `(cos psi, sin psi)`) and signed offset `t`.
    pub fn radon(&self, t: f64, psi: f64) -> f64 {
        self.radon_dir(t, (psi.cos(), psi.sin()))
    }

    /// As [`Phantom::radon`] but with the normal precomputed, for use in
    /// inner quadrature loops.
    pub fn radon_dir(&self, t: f64, n: (f64, f64)) -> f64 {
        self.pieces.iter().map(|p| p.radon(t, n)).sum()
    }

    /// Average of `eval` over `n_samples` equally spaced angles on the
    /// circle of radius `r` around `x`. Brute-force counterpart of
    /// [`Phantom::ring_coverage`] and, as `r -> 0`, of
    /// [`Phantom::local_average`].
    pub fn ring_average(&self, x: Point, r: f64, n_samples: usize) -> f64 {
        assert!(r > 0.0, "ring radius must be positive");
        assert!(n_samples >= 8, "need at least 8 angular samples");
        let mut acc = 0.0;
        for k in 0..n_samples {
            let theta = TAU * k as f64 / n_samples as f64;
            acc += self.eval([x[0] + r * theta.cos(), x[1] + r * theta.sin()]);
        }
        acc / n_samples as f64
    }

    /// Exact amplitude-weighted fraction of the circle of radius `r`
    /// around `x` covered by the phantom (the exact circle average).
    pub fn ring_coverage(&self, x: Point, r: f64) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.amplitude() * p.ring_coverage(x, r))
            .sum()
    }

    /// Radii at which the circle average around `x` loses smoothness,
    /// unsorted and possibly duplicated.
    pub(crate) fn critical_radii(&self, x: Point) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.pieces.len() * 2);
        for p in &self.pieces {
            p.critical_radii(x, &mut out);
        }
        out
    }

    /// Radius of the smallest origin-centered disc containing every piece;
    /// the Radon transform vanishes for `|t|` beyond this at any angle.
    pub fn support_radius(&self) -> f64 {
        self.pieces
            .iter()
            .map(Piece::support_radius)
            .fold(0.0, f64::max)
    }

    /// Parses the plain-text description: one piece per line,
    /// `disc cx cy rho amp` or `rect cx cy hx hy amp`, `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, PhantomError> {
        let mut pieces = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let expect = |n: usize| -> Result<(), PhantomError> {
                if tokens.len() != n {
                    Err(PhantomError::Parse {
                        line: line_no,
                        token: tokens.len().min(n),
                        msg: format!("expected {} fields, got {}", n, tokens.len()),
                    })
                } else {
                    Ok(())
                }
            };
            let num = |i: usize| -> Result<f64, PhantomError> {
                tokens[i].parse::<f64>().map_err(|_| PhantomError::Parse {
                    line: line_no,
                    token: i + 1,
                    msg: format!("invalid number `{}`", tokens[i]),
                })
            };
            let piece = match tokens[0] {
                "disc" => {
                    expect(5)?;
                    Piece::Disc(
                        DiscPiece::new([num(1)?, num(2)?], num(3)?, num(4)?).map_err(|e| {
                            PhantomError::Parse {
                                line: line_no,
                                token: 1,
                                msg: e.to_string(),
                            }
                        })?,
                    )
                }
                "rect" => {
                    expect(6)?;
                    Piece::Rect(
                        RectPiece::new([num(1)?, num(2)?], [num(3)?, num(4)?], num(5)?).map_err(
                            |e| PhantomError::Parse {
                                line: line_no,
                                token: 1,
                                msg: e.to_string(),
                            },
                        )?,
                    )
                }
                other => {
                    return Err(PhantomError::Parse {
                        line: line_no,
                        token: 1,
                        msg: format!("unknown piece kind `{other}`"),
                    })
                }
            };
            pieces.push(piece);
        }
        Ok(Phantom::new(pieces))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, PhantomError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| PhantomError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), PhantomError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_string()).map_err(|source| PhantomError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

impl fmt::Display for Phantom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for piece in &self.pieces {
            match piece {
                Piece::Disc(d) => writeln!(
                    f,
                    "disc {} {} {} {}",
                    d.center[0], d.center[1], d.radius, d.amplitude
                )?,
                Piece::Rect(r) => writeln!(
                    f,
                    "rect {} {} {} {} {}",
                    r.center[0], r.center[1], r.half_widths[0], r.half_widths[1], r.amplitude
                )?,
            }
        }
        Ok(())
    }
}
