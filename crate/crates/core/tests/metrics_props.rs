mod oracle;

use petition_pulse::metrics::{fdsd, find_peaks, gpo_exceed_ratio, shape_moments, total_exceed_ratio};
use petition_pulse::timeline::{bin_events, Period};
use petition_pulse::{AdoptionSeries, SignatureEvent};
use proptest::prelude::*;

fn series_strategy(max_len: usize, max_count: u64) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(prop_oneof![3 => 0..=max_count, 1 => 0..=3u64, 1 => Just(0u64)], 1..=max_len)
        .prop_filter("nonzero total", |v| v.iter().any(|&c| c > 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn peaks_match_brute_force(counts in series_strategy(200, 10_000)) {
        let s = AdoptionSeries::daily(counts.clone()).unwrap();
        let (idx, global) = oracle::peaks(&counts);
        let got = find_peaks(&s);
        prop_assert_eq!(got.indices, idx);
        prop_assert_eq!(got.global_peak, global);
        prop_assert_eq!(got.global_peak_count, counts[global - 1]);
    }

    #[test]
    fn exceed_ratios_exact(counts in series_strategy(200, 10_000)) {
        let s = AdoptionSeries::daily(counts.clone()).unwrap();
        let (n, d) = oracle::e_tot_fraction(&counts);
        prop_assert_eq!(total_exceed_ratio(&s).unwrap(), n as f64 / d as f64);
        let (n, d) = oracle::e_gpo_fraction(&counts);
        prop_assert_eq!(gpo_exceed_ratio(&s).unwrap(), n as f64 / d as f64);
    }

    #[test]
    fn exceed_ratio_ordering(counts in series_strategy(200, 10_000)) {
        let s = AdoptionSeries::daily(counts).unwrap();
        let tot = total_exceed_ratio(&s).unwrap();
        let gpo = gpo_exceed_ratio(&s).unwrap();
        prop_assert!((0.0..=1.0).contains(&tot));
        prop_assert!(0.0 <= gpo && gpo <= tot);
    }

    #[test]
    fn moments_match_power_sums(counts in series_strategy(200, 10_000)) {
        let s = AdoptionSeries::daily(counts.clone()).unwrap();
        let got = shape_moments(&s).unwrap();
        let want = oracle::moments_exact(&counts);
        prop_assert_eq!(got.degenerate, want.degenerate);
        prop_assert!(oracle::close(got.mean, want.mean, 1e-9));
        prop_assert!(oracle::close(got.variance, want.variance, 1e-9));
        prop_assert!(oracle::close(got.skewness, want.skewness, 1e-9), "{} vs {}", got.skewness, want.skewness);
        prop_assert!(oracle::close(got.excess_kurtosis, want.excess_kurtosis, 1e-9));
    }

    #[test]
    fn moments_match_multiset(counts in series_strategy(60, 150)) {
        prop_assume!(counts.iter().sum::<u64>() <= 10_000);
        let s = AdoptionSeries::daily(counts.clone()).unwrap();
        let got = shape_moments(&s).unwrap();
        let want = oracle::moments_multiset(&counts);
        prop_assert_eq!(got.degenerate, want.degenerate);
        prop_assert!(oracle::close(got.skewness, want.skewness, 1e-9));
        prop_assert!(oracle::close(got.excess_kurtosis, want.excess_kurtosis, 1e-9));
    }

    #[test]
    fn scaling_preserves_ratios(counts in series_strategy(100, 1000), k in 1u64..50) {
        let a = AdoptionSeries::daily(counts.clone()).unwrap();
        let b = AdoptionSeries::daily(counts.iter().map(|c| c * k).collect()).unwrap();
        prop_assert!(oracle::close(total_exceed_ratio(&b).unwrap(), total_exceed_ratio(&a).unwrap(), 1e-12));
        prop_assert!(oracle::close(gpo_exceed_ratio(&b).unwrap(), gpo_exceed_ratio(&a).unwrap(), 1e-12));
        if counts.len() >= 2 {
            prop_assert_eq!(fdsd(&a).unwrap(), fdsd(&b).unwrap());
        }
    }

    #[test]
    fn truncation_bounds(counts in series_strategy(100, 1000), cut in 1usize..100) {
        let s = AdoptionSeries::daily(counts.clone()).unwrap();
        let k = cut.min(counts.len());
        prop_assert!(s.truncate(k).unwrap().total() <= s.total());
        prop_assert_eq!(s.truncate(counts.len()).unwrap(), s);
    }

    #[test]
    fn hourly_aggregates_to_daily(offsets in prop::collection::vec(-7200i64..12 * 86_400, 0..300), days in 1usize..10) {
        let created = 1_400_000_000;
        let events: Vec<SignatureEvent> = offsets
            .iter()
            .enumerate()
            .map(|(k, &o)| SignatureEvent {
                petition_id: "p".into(),
                signature_id: k.to_string(),
                timestamp: created + o,
                zipcode: None,
            })
            .collect();
        let daily = bin_events(&events, created, Period::Day, days).unwrap();
        let hourly = bin_events(&events, created, Period::Hour, days * 24).unwrap();
        let rebinned = hourly.series.aggregate(24, Period::Day).unwrap();
        prop_assert_eq!(rebinned.counts(), daily.series.counts());
        prop_assert_eq!(hourly.dropped_late, daily.dropped_late);
        // Every event lands in exactly one bucket.
        prop_assert_eq!(daily.binned() + daily.dropped_late + daily.rejected_early, events.len());
    }
}
