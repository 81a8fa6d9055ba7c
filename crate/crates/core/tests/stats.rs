#![allow(clippy::approx_constant)]

use proptest::prelude::*;
use qassess_core::stats::{
    average_ranks, improvement_percent, spearman, strictly_decreasing, PValueMethod, RankOrder, RankVector,
};

fn r(a: &[f64], b: &[f64]) -> f64 {
    spearman(&RankVector::unlabelled(a), &RankVector::unlabelled(b)).unwrap().r
}

#[test]
fn five_system_grades_and_ranks() {
    let grades = [1.87, 3.14, 3.36, 4.02, 5.47];
    assert_eq!(average_ranks(&grades, RankOrder::Ascending).unwrap(), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    let rho = r(&[1.0, 2.5, 2.5, 4.0, 5.0], &[1.0, 3.0, 2.0, 4.0, 5.0]);
    assert!((rho - 0.975).abs() < 1e-3, "{rho}");
}

#[test]
fn maintainability_rankings() {
    let exp = average_ranks(&[2.0, 3.0, 4.0, 1.0, 3.0], RankOrder::Ascending).unwrap();
    assert_eq!(exp, vec![2.0, 3.5, 5.0, 1.0, 3.5]);
    let bm = average_ranks(&[2.0, 5.0, 3.0, 1.0, 4.0], RankOrder::Ascending).unwrap();
    let rho = r(&exp, &bm);
    assert!((rho - 0.67).abs() < 0.01, "{rho}");
}

#[test]
fn exact_p_for_perfect_agreement() {
    let ranks = [1.0, 2.0, 3.0, 4.0, 5.0];
    let res = spearman(&RankVector::unlabelled(&ranks), &RankVector::unlabelled(&ranks)).unwrap();
    assert_eq!(res.method, PValueMethod::ExactPermutation);
    assert!((res.p_one_sided - 1.0 / 120.0).abs() < 1e-12);
}

#[test]
fn large_samples_use_t_approximation() {
    let a: Vec<f64> = (1..=12).map(f64::from).collect();
    let mut b = a.clone();
    b.swap(0, 1);
    let res = spearman(&RankVector::unlabelled(&a), &RankVector::unlabelled(&b)).unwrap();
    assert_eq!(res.method, PValueMethod::TApproximation);
    assert!(res.p_one_sided < 1e-4);
}

#[test]
fn labels_align_second_vector() {
    let a = RankVector::new(vec!["x".into(), "y".into(), "z".into()], vec![1.0, 2.0, 3.0]);
    let b = RankVector::new(vec!["z".into(), "x".into(), "y".into()], vec![3.0, 1.0, 2.0]);
    assert!((spearman(&a, &b).unwrap().r - 1.0).abs() < 1e-12);
    let c = RankVector::new(vec!["x".into(), "y".into(), "w".into()], vec![1.0, 2.0, 3.0]);
    assert!(spearman(&a, &c).is_err());
}

#[test]
fn improvement_between_versions() {
    let p = improvement_percent(3.63, 3.17).unwrap();
    assert!((p - 12.67).abs() < 0.05, "{p}");
    let series = [4.15, 3.34, 3.63, 3.42, 3.27, 3.17];
    assert!(strictly_decreasing(&series[2..]));
    assert!(!strictly_decreasing(&series));
    assert!(improvement_percent(0.0, 1.0).is_err());
}

fn distinct_scores() -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((-100.0..100.0f64, -100.0..100.0f64), 3..12)
}

proptest! {
    #[test]
    fn symmetric(pairs in distinct_scores()) {
        let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let ra = average_ranks(&a, RankOrder::Descending).unwrap();
        let rb = average_ranks(&b, RankOrder::Descending).unwrap();
        if let (Ok(x), Ok(y)) = (
            spearman(&RankVector::unlabelled(&ra), &RankVector::unlabelled(&rb)),
            spearman(&RankVector::unlabelled(&rb), &RankVector::unlabelled(&ra)),
        ) {
            prop_assert!((x.r - y.r).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&x.r));
        }
    }

    // Ranks only depend on order, so a strictly increasing transform of the
    // scores leaves the coefficient unchanged.
    #[test]
    fn invariant_under_monotone_transform(pairs in distinct_scores()) {
        let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let t: Vec<f64> = a.iter().map(|x| x.powi(3) + 2.0 * x).collect();
        let rb = average_ranks(&b, RankOrder::Ascending).unwrap();
        let r1 = spearman(
            &RankVector::unlabelled(&average_ranks(&a, RankOrder::Ascending).unwrap()),
            &RankVector::unlabelled(&rb),
        );
        let r2 = spearman(
            &RankVector::unlabelled(&average_ranks(&t, RankOrder::Ascending).unwrap()),
            &RankVector::unlabelled(&rb),
        );
        if let (Ok(r1), Ok(r2)) = (r1, r2) {
            prop_assert!((r1.r - r2.r).abs() < 1e-12);
            prop_assert!((r1.p_one_sided - r2.p_one_sided).abs() < 1e-12);
        }
    }

    #[test]
    fn ranks_are_a_permutation_mean(scores in proptest::collection::vec(0u8..6, 1..20)) {
        let s: Vec<f64> = scores.iter().map(|x| f64::from(*x)).collect();
        let ranks = average_ranks(&s, RankOrder::Ascending).unwrap();
        let n = s.len() as f64;
        prop_assert!((ranks.iter().sum::<f64>() - n * (n + 1.0) / 2.0).abs() < 1e-9);
    }
}
