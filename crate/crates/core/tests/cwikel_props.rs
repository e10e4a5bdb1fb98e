use cwikel_core::cwikel::{
    an_bn_split, bump, check_submajorization_130, check_submajorization_532, compact_support_ratio, counterexample_scan,
    cwikel_small_p, dyadic_bounds, dyadic_slices, fourier_coeff_lemma, positive_model, projection_inequality_check,
    schatten_ratio_large_p, CubeSamples, Flavor, CONSTANT_GENERAL,
};
use cwikel_core::lattice::{
    classical_product, fourier_multiplier, mixed_cell_norm, Domain, GridSpec, OuterNorm, SampledFunction,
};
use cwikel_core::linalg::CMatrix;
use cwikel_core::majorization::singular_step;
use cwikel_core::{DenseOperator, C64};
use proptest::prelude::*;

/// Sum of smooth bumps with random centres, widths and complex amplitudes.
#[derive(Clone, Debug)]
struct Bumps(Vec<(f64, f64, f64, f64)>);

impl Bumps {
    fn eval(&self, x: f64) -> C64 {
        self.0.iter().map(|&(c, w, re, im)| C64::new(re, im) * bump((x - c) / w)).sum()
    }
}

fn bumps(lo: f64, hi: f64) -> impl Strategy<Value = Bumps> {
    prop::collection::vec((lo..hi, 0.05f64..0.4, -2.0f64..2.0, -2.0f64..2.0), 1..4).prop_map(Bumps)
}

fn pair(grid: GridSpec, f: &Bumps, g: &Bumps) -> (SampledFunction, SampledFunction) {
    (
        SampledFunction::from_fn(grid, Domain::Position, |x| f.eval(x[0])).unwrap(),
        SampledFunction::from_fn(grid, Domain::Frequency, |k| g.eval(k[0])).unwrap(),
    )
}

fn positive_pair(grid: GridSpec, f: &Bumps, g: &Bumps) -> (SampledFunction, SampledFunction) {
    let (f, g) = pair(grid, f, g);
    (f.abs(), g.abs())
}

fn singular_values(op: &DenseOperator) -> Vec<f64> {
    op.singular_values().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn multipliers_compose(g in bumps(-3.0, 3.0), h in bumps(-3.0, 3.0)) {
        let grid = GridSpec::periodic(1, 8.0, 32).unwrap();
        let (_, sg) = pair(grid, &g, &g);
        let (_, sh) = pair(grid, &h, &h);
        let prod = SampledFunction::new(grid, Domain::Frequency,
            sg.values().iter().zip(sh.values()).map(|(a, b)| a * b).collect()).unwrap();
        let lhs = fourier_multiplier(&sg).unwrap().compose(&fourier_multiplier(&sh).unwrap()).unwrap();
        let diff = lhs.sub(&fourier_multiplier(&prod).unwrap()).unwrap().frobenius_norm();
        prop_assert!(diff <= 1e-12 * lhs.frobenius_norm().max(1.0));
    }

    #[test]
    fn swapping_roles_keeps_singular_values(f in bumps(1.0, 7.0), g in bumps(-3.0, 3.0)) {
        let grid = GridSpec::periodic(1, 8.0, 32).unwrap();
        let (sf, sg) = pair(grid, &f, &g);
        let conj = |v: &[C64]| v.iter().map(|z| z.conj()).collect::<Vec<_>>();
        let sw_f = SampledFunction::new(grid, Domain::Position, conj(sg.values())).unwrap();
        let sw_g = SampledFunction::new(grid, Domain::Frequency, conj(sf.values())).unwrap();
        let a = singular_values(&classical_product(&sf, &sg).unwrap());
        let b = singular_values(&classical_product(&sw_f, &sw_g).unwrap());
        let top = a[0].max(1e-300);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10 * top);
        }
    }

    #[test]
    fn l2_cell_norm_is_global_norm(f in bumps(0.5, 7.5)) {
        let grid = GridSpec::periodic(1, 8.0, 64).unwrap();
        let (sf, _) = pair(grid, &f, &f);
        let m = mixed_cell_norm(&sf, 2.0, OuterNorm::Lp(2.0)).unwrap();
        prop_assert!((m - sf.l2_norm()).abs() <= 1e-12 * sf.l2_norm().max(1e-300));
    }

    #[test]
    fn dyadic_split_reconstructs(f in bumps(1.0, 7.0), g in bumps(-3.0, 3.0), n in -6i32..8) {
        let grid = GridSpec::periodic(1, 8.0, 32).unwrap();
        let (sf, sg) = positive_pair(grid, &f, &g);
        let split = an_bn_split(&sf, &sg, n).unwrap();
        let full = classical_product(&sf, &sg).unwrap();
        let err = split.a_n.add(&split.b_n).unwrap().sub(&full).unwrap().frobenius_norm();
        prop_assert!(err <= 1e-10 * full.frobenius_norm().max(1e-300));
        prop_assert!(split.a_bound_holds().unwrap());
    }

    #[test]
    fn dyadic_bounds_hold(f in bumps(1.0, 7.0), g in bumps(-3.0, 3.0)) {
        let grid = GridSpec::periodic(1, 8.0, 32).unwrap();
        let (sf, sg) = positive_pair(grid, &f, &g);
        let r = dyadic_bounds(&sf, &sg).unwrap();
        prop_assert!(r.all_hold(), "{:?}", r);
    }

    #[test]
    fn slices_are_disjoint_and_sum_back(f in bumps(1.0, 7.0), g in bumps(-3.0, 3.0)) {
        let grid = GridSpec::periodic(1, 8.0, 16).unwrap();
        let (sf, sg) = positive_pair(grid, &f, &g);
        let (_, y) = positive_model(&sf, &sg).unwrap();
        let slices = dyadic_slices(&y).unwrap();
        let mut total = CMatrix::zeros(16, 16);
        for s in slices.values() {
            total += s.entries();
        }
        prop_assert!((total - y.entries()).norm() <= 1e-10 * y.entries().norm().max(1e-300));
        let keys: Vec<i32> = slices.keys().copied().collect();
        for (i, k) in keys.iter().enumerate() {
            for l in &keys[i + 1..] {
                let cross = slices[k].compose(&slices[l]).unwrap().frobenius_norm();
                prop_assert!(cross <= 1e-9 * y.entries().norm().max(1e-300));
            }
        }
    }

    #[test]
    fn submajorization_constants(f in bumps(1.0, 7.0), g in bumps(-3.0, 3.0)) {
        let grid = GridSpec::periodic(1, 8.0, 32).unwrap();
        let (sf, sg) = pair(grid, &f, &g);
        prop_assert!(check_submajorization_532(&sf, &sg).unwrap().holds);
        let (pf, pg) = (sf.abs(), sg.abs());
        prop_assert!(check_submajorization_130(&pf, &pg).unwrap().holds);
        for p in [3.0, 4.0] {
            prop_assert!(schatten_ratio_large_p(&sf, &sg, p).unwrap() <= CONSTANT_GENERAL);
        }
    }

    #[test]
    fn projection_inequality(xs in prop::collection::vec(0.0f64..20.0, 4), ys in prop::collection::vec(0.0f64..20.0, 4), n in -3i32..9) {
        let diag = |v: &[f64]| DenseOperator::diagonal(&v.iter().map(|&a| C64::new(a, 0.0)).collect::<Vec<_>>(), 1.0).unwrap();
        let r = projection_inequality_check(&diag(&xs), &diag(&ys), n).unwrap();
        prop_assert!(r.holds, "{:?}", r);
    }

    #[test]
    fn small_p_translation_covariance(f in bumps(1.5, 3.0), g in bumps(0.5, 3.0), p in prop::sample::select(vec![1.0, 1.5])) {
        let grid = GridSpec::periodic(1, 8.0, 32).unwrap();
        let (sf, sg) = pair(grid, &f, &g);
        let shifted = Bumps(f.0.iter().map(|&(c, w, a, b)| (c + 2.0, w, a, b)).collect());
        let (tf, _) = pair(grid, &shifted, &g);
        for flavor in [Flavor::Strong, Flavor::Weak] {
            let a = cwikel_small_p(&sf, &sg, p, flavor).unwrap();
            let b = cwikel_small_p(&tf, &sg, p, flavor).unwrap();
            prop_assert!((a.ratio - b.ratio).abs() <= 1e-8 * a.ratio.max(1e-300));
        }
    }
}

#[test]
fn single_cell_reduces_to_compact_support_ratio() {
    // one unit cell in x; frequency support inside [0, 1) at L = 2 pi * 4
    let grid = GridSpec::periodic(1, 8.0 * std::f64::consts::PI, 64).unwrap();
    let f = SampledFunction::from_real_fn(grid, Domain::Position, |x| if x[0] < 1.0 { 1.0 + x[0] } else { 0.0 }).unwrap();
    let g = SampledFunction::from_real_fn(grid, Domain::Frequency, |k| if (0.0..0.7).contains(&k[0]) { 2.0 - k[0] } else { 0.0 })
        .unwrap();
    let grid_fits = GridSpec::periodic(1, 8.0, 64).unwrap();
    let fx = SampledFunction::from_real_fn(grid_fits, Domain::Position, |x| if x[0] < 1.0 { 1.0 + x[0] } else { 0.0 }).unwrap();
    let gx = SampledFunction::from_real_fn(grid_fits, Domain::Frequency, |k| if (0.0..0.7).contains(&k[0]) { 2.0 - k[0] } else { 0.0 })
        .unwrap();
    for p in [1.0, 1.5] {
        let a = cwikel_small_p(&fx, &gx, p, Flavor::Strong).unwrap();
        let b = compact_support_ratio(&fx, &gx, p).unwrap();
        assert!((a.ratio - b).abs() <= 1e-12 * b, "{} vs {}", a.ratio, b);
    }
    // the first grid is not aligned with the unit cells in x
    assert!(cwikel_small_p(&f, &g, 1.0, Flavor::Strong).is_err());
}

#[test]
fn compact_support_rank_one_closed_form() {
    let grid = GridSpec::periodic(1, 8.0, 64).unwrap();
    let f = SampledFunction::from_real_fn(grid, Domain::Position, |x| if x[0] < 1.0 { 1.0 } else { 0.0 }).unwrap();
    // g is a single frequency sample inside [0, 1): the product has rank one
    let g = SampledFunction::from_real_fn(grid, Domain::Frequency, |k| if (0.0..0.7).contains(&k[0]) { 1.0 } else { 0.0 }).unwrap();
    let r2 = compact_support_ratio(&f, &g, 2.0).unwrap();
    // the Hilbert-Schmidt identity carries (2 pi)^{-1/2} in d = 1
    assert!((r2 - (2.0 * std::f64::consts::PI).powf(-0.5)).abs() < 1e-12);
    // rank one: every Schatten norm agrees
    let r1 = compact_support_ratio(&f, &g, 1.0).unwrap();
    assert!((r1 - r2).abs() < 1e-12);
}

#[test]
fn zero_symbol_gives_trivial_verdict() {
    let grid = GridSpec::periodic(1, 8.0, 16).unwrap();
    let f = SampledFunction::from_real_fn(grid, Domain::Position, |_| 0.0).unwrap();
    let g = SampledFunction::from_real_fn(grid, Domain::Frequency, |k| 1.0 / (1.0 + k[0] * k[0])).unwrap();
    let v = check_submajorization_532(&f, &g).unwrap();
    assert!(v.holds);
    assert_eq!(v.observed_constant, 0.0);
}

#[test]
fn fourier_coefficients_scale_as_power() {
    let h = CubeSamples::from_fn(1, 32, |_| 1.0).unwrap();
    let h2 = CubeSamples::from_fn(1, 32, |_| 2.0).unwrap();
    let zero = CubeSamples::from_fn(1, 32, |_| 0.0).unwrap();
    for p in [0.5, 1.0, 2.0] {
        let a = fourier_coeff_lemma(&h, p, 64).unwrap();
        let b = fourier_coeff_lemma(&h2, p, 64).unwrap();
        assert!((b.lp_power_sum / a.lp_power_sum - 2f64.powf(p)).abs() < 1e-10);
        assert!((a.ratio - b.ratio).abs() < 1e-10 * a.ratio);
        let z = fourier_coeff_lemma(&zero, p, 64).unwrap();
        assert_eq!((z.lp_power_sum, z.h_l1), (0.0, 0.0));
    }
}

#[test]
fn counterexample_rows_grow() {
    let rows = counterexample_scan(&[1e-2, 1e-4, 1e-6], &[128, 256, 512]).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].truncated_double_integral > w[0].truncated_double_integral);
        assert!(w[1].truncated_schatten4_pow4 > w[0].truncated_schatten4_pow4);
        assert!(w[1].norm_sq > w[0].norm_sq);
    }
    assert!(counterexample_scan(&[0.5], &[64]).is_err());
    assert!(counterexample_scan(&[1e-2], &[64, 128]).is_err());
    let mu = singular_step(&DenseOperator::identity(3, 1.0).unwrap()).unwrap();
    assert_eq!(mu.total_width(), 3.0);
}
