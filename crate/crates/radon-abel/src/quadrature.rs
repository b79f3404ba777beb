//! Fixed-grid quadrature rules.
//!
//! All rules sum panel contributions strictly left to right so that a given
//! spec always produces the same bits, independent of how callers schedule
//! the surrounding work.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("integrand returned a non-finite value at {abscissa}")]
    NonFiniteSample { abscissa: f64 },
}

/// Composite rule selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Midpoint,
    Simpson,
}

/// A composite rule on a closed interval.
#[derive(Debug, Clone, Copy)]
pub struct QuadSpec {
    pub rule: Rule,
    pub n_panels: usize,
    pub domain: (f64, f64),
}

impl QuadSpec {
    pub fn new(rule: Rule, n_panels: usize, domain: (f64, f64)) -> Result<Self, QuadError> {
        let spec = QuadSpec {
            rule,
            n_panels,
            domain,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        if self.n_panels < 2 {
            return Err(QuadError::InvalidSpec(format!(
                "n_panels must be at least 2, got {}",
                self.n_panels
            )));
        }
        if self.rule == Rule::Simpson && self.n_panels % 2 != 0 {
            return Err(QuadError::InvalidSpec(format!(
                "simpson needs an even panel count, got {}",
                self.n_panels
            )));
        }
        let (a, b) = self.domain;
        if !a.is_finite() || !b.is_finite() || a > b {
            return Err(QuadError::InvalidSpec(format!(
                "domain [{a}, {b}] is not a finite ordered interval"
            )));
        }
        Ok(())
    }

    /// Same rule and panel count on a different interval.
    pub fn on(&self, domain: (f64, f64)) -> QuadSpec {
        QuadSpec { domain, ..*self }
    }
}

/// The three-interval split around a kernel peak: a fine rule on
/// `[center - half_width, center + half_width]`, the outer rule on what is
/// left of the tails.
#[derive(Debug, Clone, Copy)]
pub struct SplitSpec {
    pub center: f64,
    pub half_width: f64,
    /// Rule for the peak interval. Its `domain` field is a placeholder; the
    /// actual interval comes from `center` and `half_width`.
    pub inner: QuadSpec,
    /// Rule for each tail interval, domain likewise overridden.
    pub outer: QuadSpec,
}

fn sample(f: &mut impl FnMut(f64) -> f64, x: f64) -> Result<f64, QuadError> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(QuadError::NonFiniteSample { abscissa: x })
    }
}

/// Composite midpoint or Simpson rule over `spec.domain`.
pub fn integrate_1d(mut f: impl FnMut(f64) -> f64, spec: &QuadSpec) -> Result<f64, QuadError> {
    spec.validate()?;
    let (a, b) = spec.domain;
    if a == b {
        return Ok(0.0);
    }
    let n = spec.n_panels;
    let h = (b - a) / n as f64;
    match spec.rule {
        Rule::Midpoint => {
            let mut acc = 0.0;
            for i in 0..n {
                let x = a + (i as f64 + 0.5) * h;
                acc += sample(&mut f, x)?;
            }
            Ok(acc * h)
        }
        Rule::Simpson => {
            let mut acc = sample(&mut f, a)?;
            for i in 1..n {
                let x = a + i as f64 * h;
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * sample(&mut f, x)?;
            }
            acc += sample(&mut f, b)?;
            Ok(acc * h / 3.0)
        }
    }
}

/// Evaluates the integral over `tails` as three pieces:
/// `[tails.0, c-w] + [c-w, c+w] + [c+w, tails.1]`, the middle one with the
/// fine `inner` rule. The peak interval is clipped to `tails`; pieces that
/// clip to nothing contribute zero without sampling `f`.
pub fn integrate_split(
    mut f: impl FnMut(f64) -> f64,
    spec: &SplitSpec,
    tails: (f64, f64),
) -> Result<f64, QuadError> {
    if !(spec.half_width > 0.0) || !spec.half_width.is_finite() {
        return Err(QuadError::InvalidSpec(format!(
            "split half_width must be positive and finite, got {}",
            spec.half_width
        )));
    }
    let (lo, hi) = tails;
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(QuadError::InvalidSpec(format!(
            "tails [{lo}, {hi}] is not a finite ordered interval"
        )));
    }
    let clamp = |x: f64| x.clamp(lo, hi);
    let (il, ir) = (clamp(spec.center - spec.half_width), clamp(spec.center + spec.half_width));

    let mut acc = 0.0;
    for (seg, rule) in [
        ((lo, il), &spec.outer),
        ((il, ir), &spec.inner),
        ((ir, hi), &spec.outer),
    ] {
        if seg.1 > seg.0 {
            acc += integrate_1d(&mut f, &rule.on(seg))?;
        }
    }
    Ok(acc)
}

/// Product midpoint rule for `∫∫ f(r, θ) r dr dθ` over the disc of radius
/// `r_max`, Jacobian included.
pub fn integrate_2d_polar(
    mut f: impl FnMut(f64, f64) -> f64,
    r_max: f64,
    n_r: usize,
    n_theta: usize,
) -> Result<f64, QuadError> {
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(QuadError::InvalidSpec(format!(
            "r_max must be positive and finite, got {r_max}"
        )));
    }
    if n_r == 0 || n_theta == 0 {
        return Err(QuadError::InvalidSpec(
            "polar rule needs at least one panel in each direction".into(),
        ));
    }
    let dr = r_max / n_r as f64;
    let dtheta = std::f64::consts::TAU / n_theta as f64;
    let mut acc = 0.0;
    for i in 0..n_r {
        let r = (i as f64 + 0.5) * dr;
        let mut ring = 0.0;
        for j in 0..n_theta {
            let theta = (j as f64 + 0.5) * dtheta;
            let y = f(r, theta);
            if !y.is_finite() {
                return Err(QuadError::NonFiniteSample { abscissa: r });
            }
            ring += y;
        }
        acc += ring * r;
    }
    Ok(acc * dr * dtheta)
}

/// Composite Simpson after the cubic change of variables
/// `x = a + (b-a) u^2 (3 - 2u)`, whose derivative vanishes at both ends.
/// Square-root kinks at the endpoints become analytic in `u`, so the rule
/// keeps its full order on the arc-length profiles the convolution path
/// integrates. The endpoints themselves are never sampled (weight zero).
pub(crate) fn integrate_flattened(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    n_panels: usize,
) -> Result<f64, QuadError> {
    debug_assert!(n_panels >= 2 && n_panels % 2 == 0);
    if b <= a {
        return Ok(0.0);
    }
    let len = b - a;
    let mut g = |u: f64| -> Result<f64, QuadError> {
        if u <= 0.0 || u >= 1.0 {
            return Ok(0.0);
        }
        let x = a + len * u * u * (3.0 - 2.0 * u);
        let dx = len * 6.0 * u * (1.0 - u);
        let y = f(x);
        if y.is_finite() {
            Ok(y * dx)
        } else {
            Err(QuadError::NonFiniteSample { abscissa: x })
        }
    };
    let n = n_panels;
    let h = 1.0 / n as f64;
    let mut acc = 0.0;
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(i as f64 * h)?;
    }
    Ok(acc * h / 3.0)
}
