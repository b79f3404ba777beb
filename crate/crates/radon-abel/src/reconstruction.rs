//! Three independent paths to the smoothed inverse `A f`.
//!
//! * **naive** — the double integral over angle and offset with a single
//!   composite rule in `t`. Faithful to the definition but undersamples the
//!   kernel peak once `alpha` shrinks below a few `t` panels, which is the
//!   failure mode the split path exists to fix.
//! * **split** — per angle, the `t` integral is evaluated as three pieces
//!   `[lo, b-e] + [b-e, b+e] + [e+b, hi]` where `b` is the projection of the
//!   evaluation point and `e = epsilon_factor * alpha`, with a fine rule on
//!   the peak interval.
//! * **oracle** — the convolution form `A f(x) = ∫ H(y) f(x+y) dy`,
//!   evaluated in polar coordinates around `x`. The angular integral of a
//!   piecewise phantom over a circle is elementary geometry
//!   ([`Phantom::ring_coverage`]), so only the radial integral is numeric:
//!   it is split at the radii where the coverage loses smoothness and at a
//!   geometric ladder of kernel scales, each segment handled by an
//!   endpoint-flattened Simpson rule. The result carries ~1e-9 error and
//!   never touches the Radon domain, which makes it the reference the other
//!   two paths are checked against.
//!
//! Both Radon-domain paths truncate `t` to the sinogram support, where the
//! transform vanishes identically, so the truncation is exact; the oracle
//! integrand vanishes beyond the farthest piece, so it needs no truncation
//! either.

use crate::grid::{Comparison, GridError, GridGeom, ReconGrid};
use crate::kernel::{beta, KernelParams};
use crate::phantom::Phantom;
use crate::quadrature::{
    integrate_1d, integrate_flattened, integrate_split, QuadError, QuadSpec, Rule, SplitSpec,
};
use crate::sinogram::Sinogram;
use crate::Point;
use std::f64::consts::PI;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReconError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("the oracle path needs an analytic phantom, not a sinogram")]
    OracleNeedsPhantom,
    #[error("invalid reconstruction parameters: {0}")]
    Invalid(String),
    #[error("reconstruction failed at grid point ({x}, {y})")]
    AtPoint {
        x: f64,
        y: f64,
        #[source]
        source: Box<ReconError>,
    },
}

/// Reconstruction path selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Naive,
    Split,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Naive => "naive",
            Method::Split => "split",
            Method::Oracle => "oracle",
        })
    }
}

/// Where the Radon data comes from: the analytic transform of a phantom or
/// a sampled sinogram (nearest row in angle, linear in offset).
#[derive(Debug, Clone, Copy)]
pub enum RadonSource<'a> {
    Phantom(&'a Phantom),
    Sinogram(&'a Sinogram),
}

impl<'a> RadonSource<'a> {
    pub fn value(&self, t: f64, psi: f64) -> f64 {
        self.value_dir(t, psi, (psi.cos(), psi.sin()))
    }

    fn value_dir(&self, t: f64, psi: f64, n: (f64, f64)) -> f64 {
        match self {
            RadonSource::Phantom(p) => p.radon_dir(t, n),
            RadonSource::Sinogram(s) => s.interpolate(t, psi),
        }
    }

    /// The `t` interval outside which the data vanishes (phantom) or is
    /// unknown (sinogram).
    pub fn t_support(&self) -> (f64, f64) {
        match self {
            RadonSource::Phantom(p) => {
                let r = p.support_radius();
                (-r, r)
            }
            RadonSource::Sinogram(s) => s.t_range(),
        }
    }

    pub fn phantom(&self) -> Option<&'a Phantom> {
        match self {
            RadonSource::Phantom(p) => Some(p),
            RadonSource::Sinogram(_) => None,
        }
    }
}

/// Panel counts for the quadrature rules. Angles always use the periodic
/// midpoint rule on `[0, pi)`; `t` rules are composite Simpson.
#[derive(Debug, Clone, Copy)]
pub struct ReconParams {
    /// Midpoint panels over `[0, pi)`.
    pub psi_panels: usize,
    /// Single-rule panels over the whole `t` support (naive path). The
    /// default is a plain fixed budget that serves `alpha` down to roughly
    /// a panel width and then degrades, which is exactly the failure mode
    /// the split path exists to document and repair.
    pub naive_t_panels: usize,
    /// Minimum panel count on the peak interval `[b - e, b + e]`. When the
    /// peak interval is wide (large `alpha`), the count grows so the inner
    /// rule is never coarser than the run's own average panel budget.
    pub split_inner_panels: usize,
    /// Panels on each tail.
    pub split_outer_panels: usize,
    /// Simpson panels per smooth radial segment of the oracle integral.
    pub oracle_segment_panels: usize,
    /// Overrides the `t` integration interval; defaults to the source
    /// support, where truncation is exact.
    pub t_domain: Option<(f64, f64)>,
}

impl Default for ReconParams {
    fn default() -> Self {
        ReconParams {
            psi_panels: 180,
            naive_t_panels: 64,
            split_inner_panels: 128,
            split_outer_panels: 1024,
            oracle_segment_panels: 256,
            t_domain: None,
        }
    }
}

impl ReconParams {
    pub fn validate(&self) -> Result<(), ReconError> {
        if self.psi_panels == 0 {
            return Err(ReconError::Invalid("psi_panels must be positive".into()));
        }
        for (name, n) in [
            ("naive_t_panels", self.naive_t_panels),
            ("split_inner_panels", self.split_inner_panels),
            ("split_outer_panels", self.split_outer_panels),
            ("oracle_segment_panels", self.oracle_segment_panels),
        ] {
            if n < 2 || n % 2 != 0 {
                return Err(ReconError::Invalid(format!(
                    "{name} must be an even count of at least 2, got {n}"
                )));
            }
        }
        Ok(())
    }

    /// Panel width of the naive `t` rule on the given support.
    pub fn naive_panel_width(&self, t_support: (f64, f64)) -> f64 {
        (t_support.1 - t_support.0) / self.naive_t_panels as f64
    }

    fn support(&self, src: &RadonSource) -> (f64, f64) {
        self.t_domain.unwrap_or_else(|| src.t_support())
    }
}

/// Midpoint sweep over angles; the integrand is `pi`-periodic, so the
/// midpoint rule converges spectrally for smooth data.
fn psi_sweep(
    psi_panels: usize,
    mut t_integral: impl FnMut(f64, (f64, f64)) -> Result<f64, QuadError>,
) -> Result<f64, ReconError> {
    let dpsi = PI / psi_panels as f64;
    let mut acc = 0.0;
    for i in 0..psi_panels {
        let psi = (i as f64 + 0.5) * dpsi;
        acc += t_integral(psi, (psi.cos(), psi.sin()))?;
    }
    Ok(acc * dpsi)
}

/// Definition-faithful double quadrature with a single `t` rule.
pub fn abel_naive(
    src: &RadonSource,
    kp: &KernelParams,
    x: Point,
    rp: &ReconParams,
) -> Result<f64, ReconError> {
    rp.validate()?;
    let spec = QuadSpec::new(Rule::Simpson, rp.naive_t_panels, rp.support(src))?;
    psi_sweep(rp.psi_panels, |psi, n| {
        let b = beta(x, psi);
        integrate_1d(|t| kp.phi_at_offset(b - t) * src.value_dir(t, psi, n), &spec)
    })
}

/// Three-interval split around the kernel peak, per angle.
pub fn abel_split(
    src: &RadonSource,
    kp: &KernelParams,
    x: Point,
    rp: &ReconParams,
) -> Result<f64, ReconError> {
    rp.validate()?;
    let support = rp.support(src);
    // Floor for the inner panel width: the run's own budget spread over the
    // whole interval. Keeps the peak rule from going coarse when epsilon is
    // comparable to the support (large alpha).
    let budget_h = (support.1 - support.0)
        / (rp.split_inner_panels + 2 * rp.split_outer_panels) as f64;
    let placeholder = (0.0, 0.0);
    let outer = QuadSpec {
        rule: Rule::Simpson,
        n_panels: rp.split_outer_panels,
        domain: placeholder,
    };
    psi_sweep(rp.psi_panels, |psi, n| {
        let b = beta(x, psi);
        let eps = kp.epsilon();
        let inner_len =
            ((b + eps).min(support.1) - (b - eps).max(support.0)).max(0.0);
        let mut inner_panels = rp.split_inner_panels;
        if budget_h > 0.0 && inner_len / budget_h > inner_panels as f64 {
            let needed = (inner_len / budget_h).ceil() as usize;
            inner_panels = needed + (needed & 1);
        }
        let spec = SplitSpec {
            center: b,
            half_width: eps,
            inner: QuadSpec {
                rule: Rule::Simpson,
                n_panels: inner_panels,
                domain: placeholder,
            },
            outer,
        };
        integrate_split(
            |t| kp.phi_at_offset(b - t) * src.value_dir(t, psi, n),
            &spec,
            support,
        )
    })
}

/// Convolution-path evaluation; see the module docs. Carries no Radon-domain
/// quadrature error and serves as the oracle for the other two paths.
pub fn abel_oracle(
    phantom: &Phantom,
    kp: &KernelParams,
    x: Point,
    rp: &ReconParams,
) -> Result<f64, ReconError> {
    rp.validate()?;
    let mut radii = phantom.critical_radii(x);
    let r_last = radii.iter().copied().fold(0.0, f64::max);
    if r_last <= 0.0 {
        return Ok(0.0);
    }
    // Geometric ladder of kernel scales keeps long smooth segments from
    // hiding the peak of the radial weight near r ~ alpha.
    let mut rung = kp.alpha() / 8.0;
    while rung < r_last {
        radii.push(rung);
        rung *= 2.0;
    }
    radii.retain(|r| *r > 0.0 && *r < r_last);
    radii.push(r_last);
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut acc = 0.0;
    let mut lo = 0.0;
    let dedupe = 1e-12 * r_last.max(1.0);
    for &hi in &radii {
        if hi - lo <= dedupe {
            continue;
        }
        acc += integrate_flattened(
            |r| kp.k(r) * phantom.ring_coverage(x, r),
            lo,
            hi,
            rp.oracle_segment_panels,
        )?;
        lo = hi;
    }
    Ok(acc)
}

/// Evaluates one method at one point.
pub fn abel_value(
    src: &RadonSource,
    kp: &KernelParams,
    x: Point,
    method: Method,
    rp: &ReconParams,
) -> Result<f64, ReconError> {
    match method {
        Method::Naive => abel_naive(src, kp, x, rp),
        Method::Split => abel_split(src, kp, x, rp),
        Method::Oracle => {
            let phantom = src.phantom().ok_or(ReconError::OracleNeedsPhantom)?;
            abel_oracle(phantom, kp, x, rp)
        }
    }
}

/// Fills a grid with per-point evaluations. Points are independent; the
/// parallel fill is bit-identical to a serial one for any thread count.
/// The first failing point (in row-major order) aborts the run with its
/// coordinates.
pub fn reconstruct_grid(
    src: &RadonSource,
    kp: &KernelParams,
    geom: GridGeom,
    method: Method,
    rp: &ReconParams,
) -> Result<ReconGrid, ReconError> {
    rp.validate()?;
    if method == Method::Oracle && src.phantom().is_none() {
        return Err(ReconError::OracleNeedsPhantom);
    }
    ReconGrid::try_from_fn_par(geom, |x, y| {
        abel_value(src, kp, [x, y], method, rp).map_err(|source| ReconError::AtPoint {
            x,
            y,
            source: Box::new(source),
        })
    })
}

/// Exact ground-truth grid of local averages.
pub fn sf_grid(phantom: &Phantom, geom: GridGeom) -> ReconGrid {
    ReconGrid::from_fn(geom, |x, y| phantom.local_average([x, y]))
}

/// What a reconstruction was measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// The exact local-average grid of the source phantom.
    LocalAverage,
    /// Another reconstruction grid.
    OtherGrid,
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reference::LocalAverage => "exact local average",
            Reference::OtherGrid => "other grid",
        })
    }
}

/// Per-run error report.
#[derive(Debug, Clone, Copy)]
pub struct ReconReport {
    pub method: Method,
    pub alpha: f64,
    pub epsilon: f64,
    pub comparison: Comparison,
    pub reference: Reference,
}

impl ReconReport {
    pub fn new(
        method: Method,
        kp: &KernelParams,
        comparison: Comparison,
        reference: Reference,
    ) -> Self {
        ReconReport {
            method,
            alpha: kp.alpha(),
            epsilon: kp.epsilon(),
            comparison,
            reference,
        }
    }

    pub fn rmse(&self) -> f64 {
        self.comparison.rmse
    }

    pub fn max_abs_err(&self) -> f64 {
        self.comparison.max_abs_err
    }
}

impl fmt::Display for ReconReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "method: {}", self.method)?;
        writeln!(f, "alpha: {}", self.alpha)?;
        writeln!(f, "epsilon: {}", self.epsilon)?;
        writeln!(f, "reference: {}", self.reference)?;
        writeln!(f, "rmse: {:.6e}", self.comparison.rmse)?;
        writeln!(f, "max abs error: {:.6e}", self.comparison.max_abs_err)?;
        writeln!(
            f,
            "value range: [{:.6e}, {:.6e}]",
            self.comparison.min_value, self.comparison.max_value
        )?;
        writeln!(
            f,
            "reference range: [{:.6e}, {:.6e}]",
            self.comparison.ref_min, self.comparison.ref_max
        )?;
        writeln!(
            f,
            "overshoot beyond reference range: {:.6e}",
            self.comparison.overshoot()
        )
    }
}
