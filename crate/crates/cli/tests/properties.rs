use chebdir::config::{parse_complex, parse_params};
use chebdir::report::{ConvergenceReport, SweepSample, Verdict};
use chebdir_core::{Complex64, MultiIndex};
use proptest::prelude::*;

fn samples(taus: &[Option<f64>]) -> Vec<SweepSample> {
    taus.iter()
        .enumerate()
        .map(|(k, &tau)| SweepSample {
            j: k as u32 + 1,
            alpha: MultiIndex::new(vec![k as u32 + 1]).unwrap(),
            tau,
            rel_gap: tau.map(|_| 0.0),
            tau_half_mesh: tau,
            error: if tau.is_none() { Some("failed".into()) } else { None },
        })
        .collect()
}

proptest! {
    #[test]
    fn window_statistics_match_a_direct_scan(
        taus in prop::collection::vec(prop::option::weighted(0.9, 0.0f64..3.0), 0..40),
        window in 1usize..12,
        tol in 1e-4f64..0.5,
    ) {
        let r = ConvergenceReport::assemble(samples(&taus), window, tol, 1e-2);
        prop_assert_eq!(r.rows.len(), taus.len());
        for (k, row) in r.rows.iter().enumerate() {
            let lo = (k + 1).saturating_sub(window);
            let vals: Vec<f64> = taus[lo..=k].iter().flatten().copied().collect();
            let max = vals.iter().copied().reduce(f64::max);
            let min = vals.iter().copied().reduce(f64::min);
            prop_assert_eq!(row.window_max, max);
            prop_assert_eq!(row.window_min, min);
            if let (Some(a), Some(b)) = (min, max) {
                prop_assert!(a <= b);
            }
        }
        match (r.limsup, r.liminf, r.verdict) {
            (Some(hi), Some(lo), Verdict::Converged) => prop_assert!((hi - lo) / hi <= tol),
            (Some(hi), Some(lo), Verdict::NotConverged) => prop_assert!((hi - lo) / hi > tol),
            (_, _, Verdict::Degenerate) => prop_assert!(r.limsup.is_none_or(|h| h <= 1e-10)),
            _ => prop_assert!(false, "verdict without statistics"),
        }
        // rendering is a pure function of the rows
        prop_assert_eq!(r.to_csv(), r.clone().to_csv());
        prop_assert_eq!(r.to_csv().lines().count(), taus.len() + 1);
    }

    #[test]
    fn complex_numbers_round_trip(re in -1e6f64..1e6, im in -1e6f64..1e6) {
        let text = format!("{re}{}{}i", if im < 0.0 { "-" } else { "+" }, im.abs());
        prop_assert_eq!(parse_complex(&text).unwrap(), Complex64::new(re, im));
        let sci = format!("{re:e}{im:+e}i");
        prop_assert_eq!(parse_complex(&sci).unwrap(), Complex64::new(re, im));
    }

    #[test]
    fn params_keep_every_item(values in prop::collection::vec(0.1f64..10.0, 1..5)) {
        let list: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        let p = parse_params(&format!("radii={},A=2", list.join(":"))).unwrap();
        prop_assert_eq!(&p["radii"], &list);
        prop_assert_eq!(&p["A"], &vec!["2".to_string()]);
    }
}
