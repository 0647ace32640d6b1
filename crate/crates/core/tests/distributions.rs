use proptest::prelude::*;

use ribbonzeta::distributions::{
    histogram, kantorovich_bound, ks_statistic, wasserstein1, EmpiricalDistribution, PiecewiseLinear,
};

fn atoms() -> impl Strategy<Value = EmpiricalDistribution> {
    proptest::collection::vec((-50i32..50, 1u32..5), 1..20).prop_map(|v| {
        let values: Vec<f64> = v.iter().map(|p| p.0 as f64 / 8.0).collect();
        let weights: Vec<f64> = v.iter().map(|p| p.1 as f64).collect();
        EmpiricalDistribution::new(&values, &weights).unwrap()
    })
}

/// `E|X - Y|` type oracle for point sets of equal size with unit weights:
/// the optimal coupling of sorted samples pairs them in order.
fn sorted_pairing(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
}

proptest! {
    #[test]
    fn metric_axioms(a in atoms(), b in atoms(), c in atoms()) {
        let ab = wasserstein1(&a, &b);
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(wasserstein1(&a, &a), 0.0);
        prop_assert!((ab - wasserstein1(&b, &a)).abs() < 1e-12);
        prop_assert!(ab <= wasserstein1(&a, &c) + wasserstein1(&c, &b) + 1e-12);
    }

    #[test]
    fn mean_and_shift(a in atoms(), b in atoms(), shift in -3.0f64..3.0) {
        prop_assert!(wasserstein1(&a, &b) + 1e-12 >= (a.mean() - b.mean()).abs());
        let moved: Vec<f64> = a.values().iter().map(|v| v + shift).collect();
        let s = EmpiricalDistribution::new(&moved, a.weights()).unwrap();
        prop_assert!((wasserstein1(&a, &s) - shift.abs()).abs() < 1e-9);
    }

    #[test]
    fn equal_size_samples_match_sorted_pairing(
        v in proptest::collection::vec((-100i32..100, -100i32..100), 1..40)
    ) {
        let a: Vec<f64> = v.iter().map(|p| p.0 as f64 / 7.0).collect();
        let b: Vec<f64> = v.iter().map(|p| p.1 as f64 / 7.0).collect();
        let w = wasserstein1(
            &EmpiricalDistribution::from_samples(&a).unwrap(),
            &EmpiricalDistribution::from_samples(&b).unwrap(),
        );
        prop_assert!((w - sorted_pairing(&a, &b)).abs() < 1e-9);
    }

    #[test]
    fn dual_bound_never_exceeds_distance(
        a in atoms(),
        b in atoms(),
        knots in proptest::collection::vec(-1.0f64..1.0, 1..10),
    ) {
        let xs: Vec<f64> = (0..knots.len()).map(|i| -7.0 + i as f64 * 14.0 / knots.len() as f64).collect();
        let step = 14.0 / knots.len() as f64;
        let mut ys = vec![0.0];
        for k in &knots[1..] {
            ys.push(ys.last().unwrap() + k * step);
        }
        let f = PiecewiseLinear::lipschitz(xs, ys).unwrap();
        prop_assert!(kantorovich_bound(&a, &b, &f).unwrap() <= wasserstein1(&a, &b) + 1e-9);
    }

    #[test]
    fn ks_in_unit_interval(a in atoms(), b in atoms()) {
        let d = ks_statistic(&a, &b);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&d));
        prop_assert_eq!(ks_statistic(&a, &a), 0.0);
    }

    #[test]
    fn histogram_conserves_mass(a in atoms(), bins in 2usize..40) {
        let h = histogram(&a, bins, None).unwrap();
        let total: f64 = h.masses.iter().sum::<f64>() + h.underflow + h.overflow;
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert_eq!(h.underflow + h.overflow, 0.0);
    }
}

#[test]
fn identity_attains_distance_for_ordered_measures() {
    // when one measure is stochastically larger the identity is optimal
    let a = EmpiricalDistribution::from_samples(&[0.0, 1.0, 3.0]).unwrap();
    let b = EmpiricalDistribution::from_samples(&[0.5, 2.0, 4.0]).unwrap();
    let id = PiecewiseLinear::lipschitz(vec![-10.0, 10.0], vec![-10.0, 10.0]).unwrap();
    let w = wasserstein1(&a, &b);
    assert!((w - 2.5 / 3.0).abs() < 1e-12);
    assert!((kantorovich_bound(&b, &a, &id).unwrap() - w).abs() < 1e-12);
}
