use cwikel_core::invariants::{
    average_squares, block_majorization, mu_of_sum, mu_square_identity, norm_reversal, rearrangement_oracle,
    submajorization_of_sum, tensor_weak_bound,
};
use cwikel_core::linalg::CMatrix;
use cwikel_core::majorization::{majorizes, singular_step, submajorizes};
use cwikel_core::{DenseOperator, StepFunction, C64};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = DenseOperator> {
    prop::collection::vec(-1.0f64..1.0, 2 * rows * cols).prop_map(move |v| {
        let m = CMatrix::from_fn(rows, cols, |r, c| C64::new(v[2 * (r * cols + c)], v[2 * (r * cols + c) + 1]));
        DenseOperator::new(m, 1.0).unwrap()
    })
}

fn positive(n: usize) -> impl Strategy<Value = DenseOperator> {
    matrix(n, n).prop_map(|a| a.adjoint().compose(&a).unwrap())
}

fn step(max_len: usize) -> impl Strategy<Value = StepFunction> {
    prop::collection::vec((0.01f64..10.0, 0.05f64..3.0), 1..max_len)
        .prop_map(|s| StepFunction::from_samples(s).unwrap())
}

/// A pair `f << g` built by averaging consecutive segments of `g`.
fn averaged_pair() -> impl Strategy<Value = (StepFunction, StepFunction)> {
    (step(12), 1usize..4).prop_map(|(g, k)| {
        let segs: Vec<(f64, f64)> = g.segments().collect();
        let mut out = Vec::new();
        for c in segs.chunks(k) {
            let w: f64 = c.iter().map(|s| s.1).sum();
            out.push((c.iter().map(|s| s.0 * s.1).sum::<f64>() / w, w));
        }
        (StepFunction::new(&out, None).unwrap(), g)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rearrangement_matches_distribution_inversion(
        samples in prop::collection::vec((-5.0f64..5.0, 0.01f64..2.0), 1..200)
    ) {
        let a = rearrangement_oracle(&samples).unwrap();
        prop_assert!(a.relative() <= 1e-12, "deviation {:?}", a);
    }

    #[test]
    fn weyl_inequality_for_sums(a in matrix(6, 6), b in matrix(6, 6)) {
        let w = mu_of_sum(&a, &b).unwrap();
        prop_assert!(w.holds(1e-10), "{:?}", w);
    }

    #[test]
    fn square_root_conjugation(x in positive(5), y in positive(5)) {
        let a = mu_square_identity(&x, &y).unwrap();
        prop_assert!(a.relative() <= 1e-9, "{:?}", a);
    }

    #[test]
    fn mu_squared_is_mu_of_gram(a in matrix(8, 8)) {
        let lhs = singular_step(&a).unwrap().power(2.0).unwrap();
        let gram = a.adjoint().compose(&a).unwrap();
        let co = a.compose(&a.adjoint()).unwrap();
        for other in [singular_step(&gram).unwrap(), singular_step(&co).unwrap()] {
            for t in [0.5, 1.5, 3.5, 7.5] {
                let (u, v) = (lhs.value_at(t), other.value_at(t));
                prop_assert!((u - v).abs() <= 1e-10 * lhs.sup().max(1.0));
            }
        }
    }

    #[test]
    fn sum_is_submajorized_by_sum_of_rearrangements(ops in prop::collection::vec(matrix(5, 5), 1..5)) {
        let v = submajorization_of_sum(&ops).unwrap();
        prop_assert!(v.holds, "{:?}", v);
    }

    #[test]
    fn disjoint_blocks_majorize(blocks in prop::collection::vec((1usize..4).prop_flat_map(|c| matrix(5, c)), 1..5)) {
        let v = block_majorization(&blocks, 1e-9).unwrap();
        prop_assert!(v.holds, "{:?}", v);
    }

    #[test]
    fn norm_reversal_below_two(y in step(16), k in 2usize..5, p in prop::sample::select(vec![0.5, 1.0, 1.5])) {
        let x = average_squares(&y, k).unwrap();
        let r = norm_reversal(&x, &y, p).unwrap();
        prop_assert!(r.majorized);
        prop_assert!(r.strong.holds(1e-12), "{:?}", r);
        prop_assert!(r.weak.holds(1e-12), "{:?}", r);
    }

    #[test]
    fn tensor_weak_schatten(x in step(10), y in step(10), p in 0.5f64..3.0) {
        let b = tensor_weak_bound(&x, &y, p).unwrap();
        prop_assert!(b.holds(1e-12), "{:?}", b);
    }

    #[test]
    fn powers_preserve_submajorization((f, g) in averaged_pair(), p in prop::sample::select(vec![1.5, 2.0, 3.0])) {
        prop_assert!(submajorizes(&g, &f, 1.0).unwrap().holds);
        let v = submajorizes(&g.power(p).unwrap(), &f.power(p).unwrap(), 1.0).unwrap();
        prop_assert!(v.holds, "{:?}", v);
    }

    #[test]
    fn direct_sums_preserve_majorization(pairs in prop::collection::vec(averaged_pair(), 3..4)) {
        for (f, g) in &pairs {
            prop_assert!(majorizes(g, f, 1e-12).unwrap().holds);
        }
        let fs: Vec<StepFunction> = pairs.iter().map(|p| p.0.clone()).collect();
        let gs: Vec<StepFunction> = pairs.iter().map(|p| p.1.clone()).collect();
        let v = majorizes(&StepFunction::direct_sum(&gs).unwrap(), &StepFunction::direct_sum(&fs).unwrap(), 1e-10).unwrap();
        prop_assert!(v.holds, "{:?}", v);
    }

    #[test]
    fn cesaro_dominates(f in step(10)) {
        for &t in f.breakpoints() {
            prop_assert!(f.value_at(t * 0.999) <= f.cesaro_at(t * 0.999) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn lorentz_homogeneous(f in step(10), c in 0.1f64..10.0, p in 0.5f64..4.0) {
        let a = f.scale(c).unwrap().lorentz_quasinorm(p).unwrap();
        let b = c * f.lorentz_quasinorm(p).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn frobenius_is_schatten_two(a in matrix(7, 5)) {
        let s = singular_step(&a).unwrap().schatten_norm(2.0).unwrap();
        prop_assert!((s - a.frobenius_norm()).abs() <= 1e-12 * s.max(1.0));
    }
}

#[test]
fn unitary_has_flat_mu() {
    let c = std::f64::consts::FRAC_1_SQRT_2;
    let m = CMatrix::from_row_slice(2, 2, &[C64::new(c, 0.0), C64::new(0.0, c), C64::new(0.0, c), C64::new(c, 0.0)]);
    let mu = singular_step(&DenseOperator::new(m, 1.0).unwrap()).unwrap();
    assert_eq!(mu.num_segments(), 1);
    assert!((mu.value_at(0.5) - 1.0).abs() < 1e-14);
    assert!((mu.total_width() - 2.0).abs() < 1e-14);
}

#[test]
fn spec_submajorization_examples() {
    let f = StepFunction::new(&[(2.0, 1.0), (1.0, 1.0)], None).unwrap();
    let g = StepFunction::new(&[(3.0, 1.0), (1.0, 0.5)], None).unwrap();
    assert!(submajorizes(&g, &f, 1.0).unwrap().holds);
    let v = submajorizes(&StepFunction::new(&[(2.0, 1.0)], None).unwrap(), &StepFunction::new(&[(3.0, 1.0)], None).unwrap(), 1.0)
        .unwrap();
    assert!(!v.holds);
    assert!((v.observed_constant - 1.5).abs() < 1e-14);
    let m = majorizes(&StepFunction::new(&[(2.0, 1.0)], None).unwrap(), &StepFunction::new(&[(1.0, 2.0)], None).unwrap(), 1e-12)
        .unwrap();
    assert!(m.holds);
    assert!(majorizes(&StepFunction::power_law(1.0, 0.5).unwrap(), &StepFunction::power_law(1.0, 0.5).unwrap(), 1e-12).is_err());
}
