use cwikel_core::linalg::CMatrix;
use cwikel_core::logconvex::{entropy_lagrange_check, weak_l1_log_triangle, weak_l1_norm, SimplexPoint};
use cwikel_core::{DenseOperator, C64};
use proptest::prelude::*;

fn simplex(max_n: usize) -> impl Strategy<Value = SimplexPoint> {
    prop::collection::vec(1e-9f64..1.0, 1..max_n).prop_map(|raw| {
        // exponential spacings give the uniform (Dirichlet(1,...,1)) law
        let e: Vec<f64> = raw.iter().map(|u| -u.ln()).collect();
        let s: f64 = e.iter().sum();
        let mut a: Vec<f64> = e.iter().map(|v| v / s).collect();
        let drift: f64 = 1.0 - a.iter().sum::<f64>();
        a[0] += drift;
        SimplexPoint::new(a).unwrap()
    })
}

fn matrix(n: usize) -> impl Strategy<Value = DenseOperator> {
    prop::collection::vec(-1.0f64..1.0, 2 * n * n).prop_map(move |v| {
        DenseOperator::new(CMatrix::from_fn(n, n, |r, c| C64::new(v[2 * (r * n + c)], v[2 * (r * n + c) + 1])), 1.0).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn entropy_inequality(a in simplex(64)) {
        let s = entropy_lagrange_check(&a);
        prop_assert!(s.holds(), "{:?}", s);
    }

    #[test]
    fn log_triangle(xs in (1usize..8).prop_flat_map(|d| prop::collection::vec(matrix(d), 1..8))) {
        let r = weak_l1_log_triangle(&xs).unwrap();
        prop_assert!(r.given().holds() && r.sorted().holds(), "{:?}", r);
        prop_assert!(r.rhs_sorted <= r.rhs_given * (1.0 + 1e-12));
    }

    #[test]
    fn log_triangle_homogeneous(xs in prop::collection::vec(matrix(4), 1..6), c in 0.1f64..10.0) {
        let r = weak_l1_log_triangle(&xs).unwrap();
        let scaled: Vec<DenseOperator> = xs.iter().map(|x| x.scale(C64::new(c, 0.0))).collect();
        let s = weak_l1_log_triangle(&scaled).unwrap();
        prop_assert!((s.lhs - c * r.lhs).abs() <= 1e-12 * s.lhs.max(1e-300));
        prop_assert!((s.rhs_given - c * r.rhs_given).abs() <= 1e-12 * s.rhs_given);
    }
}

#[test]
fn vertices_and_midpoints() {
    for n in 1..=8 {
        for i in 0..n {
            assert!(entropy_lagrange_check(&SimplexPoint::vertex(n, i).unwrap()).holds());
            for j in i + 1..n {
                let mut a = vec![0.0; n];
                a[i] = 0.5;
                a[j] = 0.5;
                assert!(entropy_lagrange_check(&SimplexPoint::new(a).unwrap()).holds());
            }
        }
    }
}

#[test]
fn single_matrix_gives_factor_four() {
    let x = DenseOperator::diagonal(&[C64::new(3.0, 0.0), C64::new(1.0, 0.0)], 1.0).unwrap();
    let r = weak_l1_log_triangle(std::slice::from_ref(&x)).unwrap();
    let n = weak_l1_norm(&x).unwrap();
    assert_eq!(n, 3.0);
    assert_eq!((r.lhs, r.rhs_given), (n, 4.0 * n));
}

#[test]
fn geometric_partial_sums_are_cauchy() {
    // x_k = 2^{-k} times a rank-one unit on disjoint coordinates: ||x_k||_{1,inf} = 2^{-k}
    let dim = 12;
    let xs: Vec<DenseOperator> = (0..dim)
        .map(|k| {
            let mut d = vec![C64::new(0.0, 0.0); dim];
            d[k] = C64::new(0.5f64.powi(k as i32 + 1), 0.0);
            DenseOperator::diagonal(&d, 1.0).unwrap()
        })
        .collect();
    for (k, x) in xs.iter().enumerate() {
        assert!((weak_l1_norm(x).unwrap() - 0.5f64.powi(k as i32 + 1)).abs() < 1e-15);
    }
    // the tail sum_{k >= m} x_k is bounded by the log-weighted series of its norms
    for m in 1..dim {
        let tail = weak_l1_log_triangle(&xs[m..]).unwrap();
        assert!(tail.given().holds());
        let series: f64 = (0..dim - m).map(|j| 0.5f64.powi((m + j) as i32 + 1) * (1.0 + ((j + 1) as f64).ln())).sum();
        assert!((tail.rhs_given - 4.0 * series).abs() < 1e-12);
        assert!(tail.lhs <= 4.0 * series);
    }
}
