//! Property tests for the analytic invariants and the text formats.

use proptest::prelude::*;
use radon_abel::*;
use std::f64::consts::PI;

fn small_coord() -> impl Strategy<Value = f64> {
    -4.0..4.0f64
}

fn disc_strategy() -> impl Strategy<Value = Phantom> {
    (small_coord(), small_coord(), 0.05..3.0f64, -2.0..2.0f64)
        .prop_map(|(cx, cy, rho, amp)| Phantom::disc([cx, cy], rho, amp).unwrap())
}

fn rect_strategy() -> impl Strategy<Value = Phantom> {
    (
        small_coord(),
        small_coord(),
        0.05..2.5f64,
        0.05..2.5f64,
        -2.0..2.0f64,
    )
        .prop_map(|(cx, cy, hx, hy, amp)| Phantom::rect([cx, cy], [hx, hy], amp).unwrap())
}

fn piece_strategy() -> impl Strategy<Value = Phantom> {
    prop_oneof![disc_strategy(), rect_strategy()]
}

proptest! {
    /// The transform of a union is the sum of the transforms, for any line.
    #[test]
    fn radon_is_linear_over_pieces(
        f in piece_strategy(),
        g in piece_strategy(),
        t in -6.0..6.0f64,
        psi in 0.0..PI,
    ) {
        let sum = f.merged(&g).radon(t, psi);
        let parts = f.radon(t, psi) + g.radon(t, psi);
        prop_assert!((sum - parts).abs() <= 1e-12 * (1.0 + parts.abs()));
    }

    /// The sampled circle average converges to the closed-form coverage.
    #[test]
    fn ring_average_approaches_ring_coverage(
        p in piece_strategy(),
        x0 in small_coord(),
        x1 in small_coord(),
        r in 0.05..3.0f64,
    ) {
        let exact = p.ring_coverage([x0, x1], r);
        let sampled = p.ring_average([x0, x1], r, 20_000);
        // One amplitude-weighted arc endpoint can be off by a sample spacing.
        prop_assert!(
            (exact - sampled).abs() <= 2.0 * 3.0 / 20_000.0 + 1e-12,
            "exact {exact} vs sampled {sampled}"
        );
    }

    /// Circle averages around disc boundary points tend to the local average.
    #[test]
    fn ring_average_tends_to_the_local_average(
        cx in small_coord(),
        cy in small_coord(),
        rho in 0.5..2.0f64,
        angle in 0.0..std::f64::consts::TAU,
    ) {
        let p = Phantom::disc([cx, cy], rho, 1.0).unwrap();
        let x = [cx + rho * angle.cos(), cy + rho * angle.sin()];
        // The constructed point is within rounding of the circle; the
        // classifier must see the boundary and the ring average must
        // approach 1/2 linearly in r.
        prop_assert_eq!(p.local_average(x), 0.5);
        for r in [0.01, 0.001] {
            let ring = p.ring_average(x, r, 8192);
            prop_assert!((ring - 0.5).abs() <= r + 1e-3, "r={r}: {ring}");
        }
    }

    /// Phantom files round-trip through text bit-exactly.
    #[test]
    fn phantom_text_round_trip(pieces in prop::collection::vec(piece_strategy(), 0..5)) {
        let mut phantom = Phantom::default();
        for p in &pieces {
            phantom = phantom.merged(p);
        }
        let round = Phantom::parse(&phantom.to_string()).unwrap();
        prop_assert_eq!(phantom, round);
    }

    /// Sinogram files round-trip through text bit-exactly.
    #[test]
    fn sinogram_text_round_trip(
        n_psi in 2usize..6,
        n_t in 2usize..8,
        seed in prop::collection::vec(-1e12..1e12f64, 48),
    ) {
        let values: Vec<f64> = seed.into_iter().take(n_psi * n_t).collect();
        prop_assume!(values.len() == n_psi * n_t);
        let s = Sinogram::new(n_psi, n_t, -3.0, 3.0, values).unwrap();
        let round = Sinogram::parse(&s.to_text()).unwrap();
        prop_assert_eq!(&s, &round);
    }

    /// Grid CSV round-trips bit-exactly, including the geometry.
    #[test]
    fn grid_csv_round_trip(
        nx in 1usize..6,
        ny in 1usize..6,
        seed in prop::collection::vec(-1e6..1e6f64, 36),
    ) {
        let geom = GridGeom::new((-2.0, 1.5), (0.25, 3.75), nx, ny).unwrap();
        let values: Vec<f64> = seed.into_iter().take(nx * ny).collect();
        prop_assume!(values.len() == nx * ny);
        let grid = ReconGrid::from_values(geom, values).unwrap();
        let round = ReconGrid::parse_csv(&grid.to_csv()).unwrap();
        prop_assert_eq!(round.geom(), grid.geom());
        prop_assert_eq!(round.values(), grid.values());
    }

    /// The Radon-domain kernel depends only on the offset from the
    /// projected point: sliding the evaluation point along the line normal
    /// and the offset together changes nothing.
    #[test]
    fn kernel_is_translation_invariant(
        x0 in small_coord(),
        x1 in small_coord(),
        t in -4.0..4.0f64,
        psi in 0.0..PI,
        shift in -3.0..3.0f64,
        alpha in 0.05..1.5f64,
    ) {
        let kp = KernelParams::new(alpha).unwrap();
        let a = kp.phi([x0, x1], t, psi);
        let b = kp.phi(
            [x0 + shift * psi.cos(), x1 + shift * psi.sin()],
            t + shift,
            psi,
        );
        let scale = kp.phi([0.0, 0.0], 0.0, 0.0); // peak value
        prop_assert!((a - b).abs() <= 1e-14 * scale);
    }

    /// Fixed-spec integration is linear in the integrand.
    #[test]
    fn integration_is_linear(a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let spec = QuadSpec::new(Rule::Simpson, 64, (0.0, 1.0)).unwrap();
        let combined = integrate_1d(|x| a * x.sin() + b * x.cos(), &spec).unwrap();
        let parts = a * integrate_1d(f64::sin, &spec).unwrap()
            + b * integrate_1d(f64::cos, &spec).unwrap();
        prop_assert!((combined - parts).abs() <= 1e-13 * (1.0 + a.abs() + b.abs()));
    }
}
