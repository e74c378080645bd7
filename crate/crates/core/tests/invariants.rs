use frameapprox::diagnostics::{compute_kappa, compute_lambda};
use frameapprox::gram::{build_gram_factor, default_gram_rule};
use frameapprox::sampling::richness_estimate;
use frameapprox::{
    build_system, truncated_svd_solve, CoefficientVector, FrameSpec, NodeKind, SamplingScheme, Weighting,
};
use proptest::prelude::*;

fn legendre_points(m: usize) -> SamplingScheme {
    SamplingScheme::points(NodeKind::GaussLegendre, m, Weighting::Quadrature).unwrap()
}

#[test]
fn richness_grows_towards_one() {
    for (k, n) in [(1, 10), (5, 6), (5, 10), (5, 16)] {
        let frame = FrameSpec::onb_plus_k(k, n).unwrap();
        let values: Vec<f64> =
            [2, 4, 8, 16, 32, 64].iter().map(|&f| richness_estimate(&legendre_points(f * n), &frame).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[1] >= w[0]), "K={k} N={n}: {values:?}");
        assert!(values[5] >= 0.9 && values[5] <= 1.0 + 1e-9, "K={k} N={n}: {values:?}");
    }
    // Small sections reach the level already at M = 4N.
    let frame = FrameSpec::onb_plus_k(5, 6).unwrap();
    assert!(richness_estimate(&legendre_points(24), &frame).unwrap() >= 0.9);
}

#[test]
fn constants_approach_richness_limit() {
    let frame = FrameSpec::onb_plus_k(5, 10).unwrap();
    let factor = build_gram_factor(&frame, &default_gram_rule(&frame)).unwrap();
    let sys = build_system(&frame, &legendre_points(320)).unwrap();
    for eps in [1e-5, 1e-8] {
        let (k, l) = (compute_kappa(&sys, &factor, eps), compute_lambda(&sys, &factor, eps));
        assert!(k <= 1.2 && l <= 1.2, "eps={eps}: kappa={k} lambda={l}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed),
        ..ProptestConfig::default()
    })]

    #[test]
    fn unregularized_solve_reproduces_frame_data(z in proptest::collection::vec(-1.0f64..1.0, 12)) {
        let frame = FrameSpec::onb_plus_k(5, 12).unwrap();
        let scheme = legendre_points(24);
        let sys = build_system(&frame, &scheme).unwrap();
        let tz = CoefficientVector::new(frame.clone(), z).unwrap();
        let y = scheme.sample(&tz).unwrap();
        let sol = truncated_svd_solve(&sys, &y, 0.0).unwrap();
        let fitted = sys.matrix() * sol.coefficients();
        prop_assert!((y.values() - fitted).norm() <= 1e-9);
    }

    #[test]
    fn residual_is_orthogonal_to_kept_directions(
        a in proptest::collection::vec(-5.0f64..5.0, 6),
        eps_exp in 2i32..13,
    ) {
        let frame = FrameSpec::onb_plus_k(5, 12).unwrap();
        let scheme = legendre_points(24);
        let sys = build_system(&frame, &scheme).unwrap();
        // Smooth parts the section resolves well; unresolved data would blow
        // the coefficients up like 1/ε and drown the check in round-off.
        let f = move |x: f64| {
            a[0] * x.ln() * (1.0 + a[1] * x) + a[2] * x.exp() + a[3] * (std::f64::consts::PI * x).cos() + a[4] * x.sin() + a[5]
        };
        let y = scheme.sample(&f).unwrap();
        let eps = 10f64.powi(-eps_exp);
        let sol = truncated_svd_solve(&sys, &y, eps).unwrap();
        let r = y.values() - sys.matrix() * sol.coefficients();
        let svd = sys.svd();
        for j in 0..sol.kept() {
            let xi = sys.matrix() * svd.v().column(j);
            prop_assert!(xi.dot(&r).abs() <= 1e-9 * y.norm().max(1.0));
        }
    }
}
