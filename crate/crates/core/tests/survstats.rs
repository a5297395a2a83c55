mod common;

use common::*;
use fairsurv::survstats::{
    chi_square_sf, kaplan_meier, logrank_statistic, nelson_aalen, survival_from_hazard,
    wilcoxon_signed_rank,
};
use proptest::prelude::*;

fn records() -> impl Strategy<Value = Vec<(f64, bool)>> {
    prop::collection::vec((1u32..15, any::<bool>()), 1..40)
        .prop_map(|v| v.into_iter().map(|(t, e)| (f64::from(t), e)).collect())
}

proptest! {
    #[test]
    fn km_is_a_nonincreasing_probability(recs in records()) {
        let km = kaplan_meier(&recs).unwrap();
        let mut last = 1.0;
        for t in 0..=16 {
            let s = km.eval(f64::from(t));
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert!(s <= last + 1e-15);
            last = s;
        }
    }

    #[test]
    fn km_without_censoring_is_empirical(times in prop::collection::vec(1u32..15, 1..40)) {
        let recs: Vec<(f64, bool)> = times.iter().map(|&t| (f64::from(t), true)).collect();
        let km = kaplan_meier(&recs).unwrap();
        for t in 0..=16 {
            let share = times.iter().filter(|&&x| x > t).count() as f64 / times.len() as f64;
            prop_assert!((km.eval(f64::from(t)) - share).abs() < 1e-12);
        }
    }

    #[test]
    fn na_is_nondecreasing(recs in records()) {
        let na = nelson_aalen(&recs).unwrap();
        let mut last = 0.0;
        for t in 0..=16 {
            let h = na.eval(f64::from(t));
            prop_assert!(h >= last);
            last = h;
        }
    }

    #[test]
    fn logrank_matches_term_by_term(a in records(), b in records()) {
        let oracle = logrank_oracle(&a, &b);
        match logrank_statistic(&a, &b) {
            Ok(v) => {
                prop_assert!((v - oracle).abs() < 1e-9 * oracle.abs().max(1.0));
                prop_assert_eq!(v, -logrank_statistic(&b, &a).unwrap());
            }
            Err(_) => prop_assert!(!oracle.is_finite()),
        }
    }

    #[test]
    fn chi_square_is_a_tail(x in 0.0f64..80.0, df in 1u32..30) {
        let p = chi_square_sf(x, df).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(chi_square_sf(x + 1.0, df).unwrap() <= p);
    }
}

#[test]
fn hand_traces() {
    let recs = [(1.0, true), (2.0, false), (3.0, true)];
    let km = kaplan_meier(&recs).unwrap();
    assert_eq!(km.eval(0.5), 1.0);
    assert!((km.eval(1.0) - 2.0 / 3.0).abs() < 1e-15);
    assert!((km.eval(3.0)).abs() < 1e-15);
    let na = nelson_aalen(&recs).unwrap();
    assert!((na.eval(1.0) - 1.0 / 3.0).abs() < 1e-15);
    assert!((na.eval(3.0) - 4.0 / 3.0).abs() < 1e-15);
    assert!((survival_from_hazard(&na, 3.0).unwrap() - (-4.0f64 / 3.0).exp()).abs() < 1e-15);
}

#[test]
fn logrank_four_records() {
    let v = logrank_statistic(&[(1.0, true), (2.0, true)], &[(3.0, true), (4.0, true)]).unwrap();
    assert!((v - 7.0 / 17f64.sqrt()).abs() < 1e-12);
}

#[test]
fn wilcoxon_near_exact_distribution() {
    let diffs = [1.3, -0.4, 2.2, 3.1, -1.7, 0.9, 2.6, 1.1];
    let p = wilcoxon_signed_rank(&diffs, &[0.0; 8]).unwrap();
    assert!((p - wilcoxon_exact(&diffs)).abs() < 5e-2);
}

#[test]
fn wilcoxon_symmetric_and_degenerate() {
    let a = [1.0, 4.0, 2.5, 7.0, 3.0];
    let b = [0.5, 1.0, 3.0, 2.0, 2.0];
    let p = wilcoxon_signed_rank(&a, &b).unwrap();
    assert!((p - wilcoxon_signed_rank(&b, &a).unwrap()).abs() < 1e-15);
    assert_eq!(wilcoxon_signed_rank(&a, &a).unwrap(), 1.0);
    assert!(wilcoxon_signed_rank(&a, &b[..4]).is_err());
}
