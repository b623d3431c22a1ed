use cclt::bounds::{bound_t11_conditional, bound_t23, bound_t31, T31Variant};
use cclt::core::diag2;
use cclt::empirics::{conditional_distance, sample_conditional, w1_to_std_normal};
use cclt::models::{MultiDarts, Pattern01, Urn, WedgeEdge};
use cclt::moments::{
    estimate_residual_summary, exact_residual_summary, theta_diagnostic, SummaryOptions, ThetaF,
    ThetaG, ThetaStart,
};
use cclt::normal;
use cclt::rng::with_workers;
use cclt::transform::{symmetrised_drift_check, Transformed};
use proptest::prelude::*;

/// `Φ(x)` by composite Simpson on the density, from 0 out to `|x|`.
fn cdf_by_quadrature(x: f64) -> f64 {
    let m = 200_000;
    let h = x.abs() / m as f64;
    let mut s = normal::pdf(0.0) + normal::pdf(x.abs());
    for i in 1..m {
        s += normal::pdf(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let half = s * h / 3.0;
    if x >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

#[test]
fn cdf_matches_quadrature_reference() {
    for i in 0..10 {
        let x = 0.5 * i as f64;
        for v in [x, -x] {
            let (got, want) = (normal::cdf(v), cdf_by_quadrature(v));
            assert!((got - want).abs() <= 1e-13 + 1e-11 * want, "{v}: {got} vs {want}");
        }
    }
}

#[test]
fn conditional_samples_are_reproducible() {
    let m = Pattern01::new(128, 0.5).unwrap();
    let a = with_workers(1, || sample_conditional(&m, 0, 3000, 11).unwrap());
    let b = with_workers(3, || sample_conditional(&m, 0, 3000, 11).unwrap());
    let c = sample_conditional(&m, 0, 3000, 12).unwrap();
    assert_eq!(a.values, b.values);
    assert_ne!(a.values, c.values);
}

#[test]
fn theta_vanishes_at_stationarity() {
    let m = Pattern01::new(40, 0.4).unwrap();
    for g in [ThetaG::AlternatingNonPositive, ThetaG::IndicatorZero] {
        let r = theta_diagnostic(&m, 0, g, ThetaF::Sin, 40_000, 3, ThetaStart::Stationary).unwrap();
        assert!(r.mean.abs() < 4.0 * r.stderr + 1e-12, "{g:?}: {r:?}");
        let zero = theta_diagnostic(&m, 0, g, ThetaF::Zero, 1000, 3, ThetaStart::Stationary).unwrap();
        assert_eq!(zero.mean, 0.0);
    }
}

#[test]
fn monte_carlo_summary_tracks_exact_summary() {
    let m = Pattern01::new(12, 0.5).unwrap();
    let exact = exact_residual_summary(&m, 0, Some(8.0)).unwrap();
    let opts = SummaryOptions {
        samples: 20_000,
        unconditional: 20_000,
        seed: 5,
        holder_p: Some(8.0),
    };
    let mc = estimate_residual_summary(&m, 0, &opts).unwrap();
    for (name, a, b) in [
        ("A", exact.a_hat(), mc.a_hat()),
        ("D", exact.d_hat_k, mc.d_hat_k),
        ("E", exact.e_hat_k, mc.e_hat_k),
    ] {
        assert!((a - b).abs() < 0.05 * a.abs() + 1e-3, "{name}: {a} vs {b}");
    }
    assert_eq!(exact.r_k, mc.r_k);
}

#[test]
fn holder_terms_dominate_conditional_means() {
    let m = Pattern01::new(12, 0.5).unwrap();
    let s = exact_residual_summary(&m, 0, Some(8.0)).unwrap();
    let h = s.holder.unwrap();
    assert!(h.a_k >= s.abs_r1_minus_at_k);
    assert!(h.b_k >= s.abs_r2_minus_at_k);
}

#[test]
fn stay_pair_bound_covers_urn_distance() {
    let m = Urn::new(400, 0.3, 0.4).unwrap();
    let opts = SummaryOptions {
        samples: 4000,
        unconditional: 256,
        seed: 2,
        holder_p: None,
    };
    let s = estimate_residual_summary(&m, 0, &opts).unwrap();
    let b = bound_t11_conditional(&s).unwrap();
    let d = conditional_distance(&m, 0, 20_000, 2).unwrap();
    assert!(b.total >= d.distance - 3.0 * d.stderr, "{} < {}", b.total, d.distance);
}

#[test]
fn transformed_wedge_drift_within_envelope() {
    let t = Transformed::new(WedgeEdge::new(5, 0.5).unwrap(), 0, 0).unwrap();
    for k in -2..=2 {
        let c = symmetrised_drift_check(&t, k).unwrap();
        assert!(c.drift <= c.envelope + 1e-12, "{c:?}");
        assert!(c.max_decomposition_error < 1e-9, "{c:?}");
    }
}

#[test]
fn bounds_on_exact_summaries_are_finite() {
    let m = Pattern01::new(12, 0.5).unwrap();
    let t = Transformed::new(m, 0, 0).unwrap();
    let s = exact_residual_summary(&t, 0, None).unwrap();
    let b = bound_t23(&s).unwrap();
    assert!(b.total.is_finite() && b.total > 0.0);
    let md = MultiDarts::new(8).unwrap();
    let s = exact_residual_summary(&md, 0, None).unwrap();
    for v in [T31Variant::Fourth, T31Variant::Third] {
        let b = bound_t31(&s, &diag2(1.0, 1.0), v).unwrap();
        assert!(b.total.is_finite() && b.total > 0.0, "{b:?}");
    }
}

proptest! {
    #[test]
    fn w1_translation_lower_bound(xs in proptest::collection::vec(-3.0f64..3.0, 5..60), c in -2.0f64..2.0) {
        let base = w1_to_std_normal(&xs).unwrap();
        let shifted: Vec<f64> = xs.iter().map(|x| x + c).collect();
        let d = w1_to_std_normal(&shifted).unwrap();
        prop_assert!(d >= c.abs() - base - 1e-12);
        prop_assert!(d <= base + c.abs() + 1e-12);
    }

    #[test]
    fn w1_ignores_order(mut xs in proptest::collection::vec(-3.0f64..3.0, 2..40)) {
        let a = w1_to_std_normal(&xs).unwrap();
        xs.reverse();
        prop_assert_eq!(a, w1_to_std_normal(&xs).unwrap());
    }

    #[test]
    fn cdf_is_monotone(a in -8.0f64..8.0, d in 0.0f64..3.0) {
        prop_assert!(normal::cdf(a + d) >= normal::cdf(a));
        prop_assert!((normal::cdf(a) + normal::sf(a) - 1.0).abs() < 1e-15);
    }
}
