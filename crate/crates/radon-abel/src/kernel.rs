//! The smoothing kernels behind the regularized inversion.
//!
//! Three closed forms share the smoothing parameter `alpha`:
//!
//! * `phi(x, t, psi)` — the Radon-domain kernel
//!   `(alpha^2 - u^2) / (2 pi^2 (alpha^2 + u^2)^2)` with
//!   `u = x1 cos(psi) + x2 sin(psi) - t`. Its peak sits at `u = 0`, its two
//!   minima at `u = ±alpha*sqrt(3)` with value `-peak/8`, and it decays like
//!   `1/u^2`.
//! * `h(y)` — the equivalent convolution kernel
//!   `alpha / (2 pi (alpha^2 + |y|^2)^(3/2))`, a radial approximate identity
//!   with unit mass.
//! * `k(r)` — the radial weight `alpha r / (alpha^2 + r^2)^(3/2)` for
//!   `r > 0`, zero otherwise; also unit mass.

use crate::Point;
use thiserror::Error;

const TWO_PI_SQ: f64 = 2.0 * std::f64::consts::PI * std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("alpha must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("epsilon factor must be positive and finite, got {0}")]
    InvalidEpsilonFactor(f64),
}

/// Projection of `x` onto the line normal `(cos psi, sin psi)`; the kernel
/// peak location in `t`.
pub fn beta(x: Point, psi: f64) -> f64 {
    x[0] * psi.cos() + x[1] * psi.sin()
}

/// Smoothing parameter plus the width factor used by the split quadrature
/// (peak interval half-width `epsilon = epsilon_factor * alpha`).
#[derive(Debug, Clone, Copy)]
pub struct KernelParams {
    alpha: f64,
    epsilon_factor: f64,
}

impl KernelParams {
    /// Default split half-width of `2 * alpha`.
    pub fn new(alpha: f64) -> Result<Self, KernelError> {
        Self::with_epsilon_factor(alpha, 2.0)
    }

    pub fn with_epsilon_factor(alpha: f64, epsilon_factor: f64) -> Result<Self, KernelError> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(KernelError::InvalidAlpha(alpha));
        }
        if !(epsilon_factor > 0.0) || !epsilon_factor.is_finite() {
            return Err(KernelError::InvalidEpsilonFactor(epsilon_factor));
        }
        Ok(KernelParams {
            alpha,
            epsilon_factor,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon_factor(&self) -> f64 {
        self.epsilon_factor
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon_factor * self.alpha
    }

    /// Radon-domain kernel at offset `u` from its peak.
    pub fn phi_at_offset(&self, u: f64) -> f64 {
        let a2 = self.alpha * self.alpha;
        let u2 = u * u;
        let d = a2 + u2;
        (a2 - u2) / (TWO_PI_SQ * d * d)
    }

    /// Radon-domain kernel at evaluation point `x`, offset `t`, angle `psi`.
    pub fn phi(&self, x: Point, t: f64, psi: f64) -> f64 {
        self.phi_at_offset(beta(x, psi) - t)
    }

    /// Convolution kernel at displacement `y`.
    pub fn h(&self, y: Point) -> f64 {
        let r2 = y[0] * y[0] + y[1] * y[1];
        self.alpha / (std::f64::consts::TAU * (self.alpha * self.alpha + r2).powf(1.5))
    }

    /// Radial weight; zero for `r <= 0`.
    pub fn k(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        self.alpha * r / (self.alpha * self.alpha + r * r).powf(1.5)
    }

    /// Critical points of `t -> phi(x, t, psi)`, by the closed forms.
    /// `peak_value` and `min_value` come from evaluating the kernel at the
    /// critical offsets.
    pub fn profile(&self, x: Point, psi: f64) -> KernelProfile {
        let beta = beta(x, psi);
        let spread = self.alpha * 3.0_f64.sqrt();
        KernelProfile {
            beta,
            t_max: beta,
            peak_value: self.phi_at_offset(0.0),
            t_min_left: beta - spread,
            t_min_right: beta + spread,
            min_value: self.phi_at_offset(spread),
            zero_crossings: (beta - self.alpha, beta + self.alpha),
        }
    }
}

/// Critical values of the Radon-domain kernel for fixed `(x, psi)`.
#[derive(Debug, Clone, Copy)]
pub struct KernelProfile {
    pub beta: f64,
    /// Location of the unique maximum (equals `beta`).
    pub t_max: f64,
    /// `1 / (2 pi^2 alpha^2)`.
    pub peak_value: f64,
    /// Locations of the two minima, `beta -/+ alpha*sqrt(3)`.
    pub t_min_left: f64,
    pub t_min_right: f64,
    /// `-peak_value / 8`.
    pub min_value: f64,
    /// Sign changes at `beta -/+ alpha`.
    pub zero_crossings: (f64, f64),
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(alpha: f64) -> KernelParams {
        KernelParams::new(alpha).unwrap()
    }

    #[test]
    fn peak_value_matches_the_closed_form() {
        // 1 / (2 pi^2 * 0.04) = 1.2665147955292222
        let kp = params(0.2);
        let peak = kp.phi([0.0, 0.0], 0.0, 0.0);
        assert!((peak - 1.0 / (TWO_PI_SQ * 0.04)).abs() < 1e-15);
        assert!((peak - 1.2665147955292222).abs() < 1e-12);
    }

    #[test]
    fn kernel_vanishes_at_offset_alpha() {
        let kp = params(0.2);
        assert_eq!(kp.phi([0.0, 0.0], 0.2, 0.0), 0.0);
        assert_eq!(kp.phi([0.0, 0.0], -0.2, 0.0), 0.0);
    }

    #[test]
    fn minima_are_an_eighth_of_the_peak_deep() {
        let kp = params(0.2);
        let peak = kp.phi([0.0, 0.0], 0.0, 0.0);
        let min = kp.phi([0.0, 0.0], 0.2 * 3.0_f64.sqrt(), 0.0);
        assert!((min + peak / 8.0).abs() < 1e-14 * peak);
    }

    #[test]
    fn h_examples() {
        let kp = params(1.0);
        let c = 1.0 / std::f64::consts::TAU;
        assert!((kp.h([0.0, 0.0]) - c).abs() < 1e-16);
        // (1 + 3)^(3/2) = 8
        assert!((kp.h([0.0, 3.0_f64.sqrt()]) - c / 8.0).abs() < 1e-16);
        for y in [[0.3, -1.2], [2.0, 0.5], [-0.1, 0.0]] {
            assert_eq!(kp.h(y), kp.h([-y[0], -y[1]]));
        }
    }

    #[test]
    fn k_is_zero_on_the_nonpositive_axis() {
        let kp = params(1.0);
        assert_eq!(kp.k(-1.0), 0.0);
        assert_eq!(kp.k(0.0), 0.0);
        assert!((kp.k(1.0) - 1.0 / 2.0_f64.powf(1.5)).abs() < 1e-16);
    }

    #[test]
    fn k_is_small_away_from_the_origin() {
        // k(r) <= alpha/delta^2 for r > delta: the delta-shape bound.
        for alpha in [0.1, 1.0, 10.0] {
            let kp = params(alpha);
            for delta in [0.1, 1.0] {
                let bound = alpha / (delta * delta);
                let mut r = delta;
                while r < 1e4 {
                    assert!(kp.k(r) <= bound, "alpha={alpha} delta={delta} r={r}");
                    r *= 1.07;
                }
            }
        }
    }

    #[test]
    fn phi_decays_quadratically() {
        let kp = params(0.05);
        for mult in [10.0, 100.0, 1000.0] {
            let u = mult * 0.05;
            assert!(kp.phi_at_offset(u).abs() * u * u <= 1.0 / TWO_PI_SQ);
        }
    }

    #[test]
    fn profile_reports_the_projection() {
        let kp = params(0.2);
        let p = kp.profile([0.0, 0.0], 0.0);
        assert_eq!(p.beta, 0.0);
        assert!((p.peak_value - 1.2665147955292222).abs() < 1e-12);
        let spread = 0.2 * 3.0_f64.sqrt();
        assert!((p.t_min_left + spread).abs() < 1e-15);
        assert!((p.t_min_right - spread).abs() < 1e-15);
        assert!((p.min_value + p.peak_value / 8.0).abs() < 1e-14 * p.peak_value);
        assert_eq!(p.zero_crossings, (-0.2, 0.2));

        assert_eq!(kp.profile([1.0, 0.0], 0.0).beta, 1.0);
        assert_eq!(kp.profile([0.0, 1.0], PI / 2.0).beta, 1.0);
    }

    #[test]
    fn profile_matches_a_brute_force_scan() {
        let kp = params(0.2);
        let x = [0.3, -0.7];
        let psi = 1.1;
        let p = kp.profile(x, psi);
        let step = kp.alpha() / 1000.0;
        let lo = p.beta - 3.0 * kp.alpha();
        let mut best_max = (f64::MIN, 0.0);
        let mut best_min = (f64::MAX, 0.0);
        for i in 0..=6000 {
            let t = lo + i as f64 * step;
            let v = kp.phi(x, t, psi);
            if v > best_max.0 {
                best_max = (v, t);
            }
            if v < best_min.0 {
                best_min = (v, t);
            }
        }
        assert!((best_max.1 - p.t_max).abs() <= kp.alpha() / 100.0);
        let nearest_min = if (best_min.1 - p.t_min_left).abs() < (best_min.1 - p.t_min_right).abs()
        {
            p.t_min_left
        } else {
            p.t_min_right
        };
        assert!((best_min.1 - nearest_min).abs() <= kp.alpha() / 100.0);
    }

    #[test]
    fn invalid_params_are_rejected() {
        assert!(KernelParams::new(0.0).is_err());
        assert!(KernelParams::new(-1.0).is_err());
        assert!(KernelParams::new(f64::NAN).is_err());
        assert!(KernelParams::with_epsilon_factor(0.1, 0.0).is_err());
    }
}
