use proptest::prelude::*;
use trichonet::fitting::fit_segment;
use trichonet::{
    fit_power_law_segment, fit_trichotomy, run_ensemble, DegreeHistogram, FitConfig, ModelParams,
    SimConfig,
};

/// Power-law-ish counts with a bent head and an exponential cutoff, plus
/// multiplicative jitter from `noise`.
fn synthetic(exponent: f64, cutoff: f64, k_max: u64, noise: &[f64]) -> DegreeHistogram {
    DegreeHistogram::from_counts((1..=k_max).map(|k| {
        let x = k as f64;
        let base = 1e7 * (x + 1.5).powf(-exponent) * (-x / cutoff).exp();
        let jitter = 1.0 + noise[k as usize % noise.len()];
        (k, (base * jitter).round() as u64)
    }))
}

fn hist_strategy() -> impl Strategy<Value = DegreeHistogram> {
    (
        1.5f64..4.0,
        10.0f64..200.0,
        25u64..120,
        prop::collection::vec(-0.3f64..0.3, 1..17),
    )
        .prop_map(|(e, c, k, noise)| synthetic(e, c, k, &noise))
        .prop_filter("enough occupied bins", |h| h.occupied_bins() >= 8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn search_stays_ordered_inside_support_and_only_improves(
        hist in hist_strategy(),
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
    ) {
        let k_min = hist.k_min().unwrap();
        let k_max = hist.k_max().unwrap();
        let span = (k_max - k_min) as f64;
        let l0 = k_min + (a * 0.4 * span) as u64;
        let u0 = (l0 + 3 + (b * 0.5 * span) as u64).min(k_max);
        prop_assume!(fit_segment(&hist, l0, u0).is_ok());
        let start = fit_segment(&hist, l0, u0).unwrap();
        let seg = fit_power_law_segment(&hist, l0, u0).unwrap();
        prop_assert!(seg.lower < seg.upper);
        prop_assert!(seg.lower >= k_min && seg.upper <= k_max);
        prop_assert!(seg.mse <= start.mse + 1e-12, "{} > {}", seg.mse, start.mse);
    }

    #[test]
    fn scaling_counts_leaves_fit_unchanged(hist in hist_strategy(), factor in 2u64..1000) {
        let config = FitConfig::default();
        let base = fit_trichotomy(&hist, &config).unwrap();
        let scaled = fit_trichotomy(&hist.scaled(factor), &config).unwrap();
        prop_assert_eq!((base.lower, base.upper), (scaled.lower, scaled.upper));
        prop_assert!((base.exponent - scaled.exponent).abs() < 1e-9);
    }
}

#[test]
fn trichotomy_beats_power_law_on_simulated_networks() {
    for (lower, upper) in [(2, 8), (3, 10), (2, 20), (4, 30)] {
        let params = ModelParams::symmetric(lower, upper).unwrap();
        let config = SimConfig::new(params, 20_000, 10, 40 + lower + upper);
        let hist = run_ensemble(&config).unwrap().pooled_histogram();
        let report = fit_trichotomy(&hist, &FitConfig::default()).unwrap();
        assert!(
            report.rmse_trichotomy < report.rmse_power_law_only,
            "({lower},{upper}): {} vs {}",
            report.rmse_trichotomy,
            report.rmse_power_law_only
        );
    }
}

#[test]
fn fitted_curve_is_a_positive_stitch() {
    let hist = synthetic(2.5, 60.0, 100, &[0.0]);
    let report = fit_trichotomy(&hist, &FitConfig::default()).unwrap();
    assert!(report.lower < report.upper);
    for k in 1..=100 {
        let p = report.fitted_prob(k);
        assert!(p.is_finite() && p > 0.0, "k={k}: {p}");
    }
    let row = report.csv_row();
    assert_eq!(row.split(',').count(), 6);
}
