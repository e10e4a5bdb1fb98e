use cwikel_core::lattice::SampledFunction;
use cwikel_core::moyal::{CwikelMode, MoyalPlane};
use cwikel_core::C64;
use proptest::prelude::*;

/// Complex Gaussian `c exp(-|s - m|^2 / (2 w^2))`.
#[derive(Clone, Copy, Debug)]
struct Gauss {
    m: [f64; 2],
    w: f64,
    c: (f64, f64),
}

fn gauss(spread: f64) -> impl Strategy<Value = Gauss> {
    (-spread..spread, -spread..spread, 0.6f64..1.2, -1.0f64..1.0, -1.0f64..1.0)
        .prop_map(|(a, b, w, re, im)| Gauss { m: [a, b], w, c: (re, im) })
}

fn sample(plane: &MoyalPlane, g: Gauss) -> SampledFunction {
    plane
        .symbol(|s| {
            let r2 = (s[0] - g.m[0]).powi(2) + (s[1] - g.m[1]).powi(2);
            C64::new(g.c.0, g.c.1) * (-r2 / (2.0 * g.w * g.w)).exp()
        })
        .unwrap()
}

fn max_rel_diff(a: &SampledFunction, b: &SampledFunction) -> f64 {
    let top = a.values().iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / top
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn leibniz_rule(f in gauss(1.0), g in gauss(1.0), a in prop::sample::select(vec![1.0, -0.5, 2.0])) {
        let plane = MoyalPlane::planar(a, 8.0, 16).unwrap();
        let (sf, sg) = (sample(&plane, f), sample(&plane, g));
        let prod = plane.twisted_convolve(&sf, &sg).unwrap();
        for (k, alpha) in [[1, 0], [0, 1]].into_iter().enumerate() {
            let lhs = plane.symbol_derivative(&prod, alpha).unwrap();
            let a1 = plane.twisted_convolve(&plane.symbol_derivative(&sf, alpha).unwrap(), &sg).unwrap();
            let a2 = plane.twisted_convolve(&sf, &plane.symbol_derivative(&sg, alpha).unwrap()).unwrap();
            let rhs = SampledFunction::new(*plane.grid(), lhs.domain(),
                a1.values().iter().zip(a2.values()).map(|(x, y)| x + y).collect()).unwrap();
            prop_assert!(max_rel_diff(&lhs, &rhs) <= 1e-12, "axis {}", k);
        }
    }

    #[test]
    fn associativity(f in gauss(0.5), g in gauss(0.5), h in gauss(0.5)) {
        let plane = MoyalPlane::planar(1.0, 16.0, 32).unwrap();
        let (sf, sg, sh) = (sample(&plane, f), sample(&plane, g), sample(&plane, h));
        let left = plane.twisted_convolve(&plane.twisted_convolve(&sf, &sg).unwrap(), &sh).unwrap();
        let right = plane.twisted_convolve(&sf, &plane.twisted_convolve(&sg, &sh).unwrap()).unwrap();
        prop_assert!(max_rel_diff(&left, &right) <= 1e-8);
    }

    #[test]
    fn sup_norm_below_l1_bound(f in gauss(2.0), g in gauss(2.0)) {
        let plane = MoyalPlane::planar(1.0, 16.0, 64).unwrap();
        let (sf, sg) = (sample(&plane, f), sample(&plane, g));
        let sum = SampledFunction::new(*plane.grid(), sf.domain(),
            sf.values().iter().zip(sg.values()).map(|(x, y)| x + y).collect()).unwrap();
        let norm = plane.weyl_kernel(&sum).unwrap().op.operator_norm().unwrap();
        prop_assert!(norm <= plane.sup_norm_bound(&sum) * (1.0 + 1e-9));
    }

    #[test]
    fn product_hs_identity(f in gauss(1.0), g in gauss(1.0)) {
        let plane = MoyalPlane::planar(1.0, 16.0, 64).unwrap();
        let (sf, sg) = (sample(&plane, f), sample(&plane, g));
        let lhs = plane.product_hs_norm(&sf, &sg).unwrap();
        let rhs = cwikel_core::moyal::quantization_constant() * sf.l2_norm() * sg.l2_norm();
        prop_assert!((lhs - rhs).abs() <= 1e-3 * rhs);
    }
}

#[test]
fn lattice_translation_keeps_singular_values() {
    let plane = MoyalPlane::planar(1.0, 12.0, 24).unwrap();
    let f = sample(&plane, Gauss { m: [0.0, 0.0], w: 0.7, c: (1.0, 0.3) });
    let g = sample(&plane, Gauss { m: [0.5, -0.5], w: 0.8, c: (1.0, 0.0) });
    // g(. + t) for a lattice vector t
    let t = [1.0, -1.0];
    let moved = sample(&plane, Gauss { m: [0.5 - t[0], -0.5 - t[1]], w: 0.8, c: (1.0, 0.0) });
    let a = plane.product_kernel(&f, &g).unwrap();
    let b = plane.product_kernel(&f, &moved).unwrap();
    let v = plane.translation_unitary(t).unwrap();
    let conj = v.compose(&b).unwrap().compose(&v.adjoint()).unwrap();
    let (sa, sb, sc) = (a.singular_values().unwrap(), b.singular_values().unwrap(), conj.singular_values().unwrap());
    for i in 0..8 {
        assert!((sa[i] - sb[i]).abs() <= 1e-6 * sa[0], "{i}: {} vs {}", sa[i], sb[i]);
        assert!((sb[i] - sc[i]).abs() <= 1e-10 * sa[0]);
    }
}

#[test]
fn sobolev_two_norm_uses_moments() {
    // W^{1,2}: ||x||_2 + ||s_1 f||_2 + ||s_2 f||_2 by the isometry
    let plane = MoyalPlane::planar(1.0, 16.0, 64).unwrap();
    let f = sample(&plane, Gauss { m: [0.0, 0.0], w: 1.0, c: (1.0, 0.0) });
    let s1 = plane.symbol_derivative(&f, [1, 0]).unwrap();
    let s2 = plane.symbol_derivative(&f, [0, 1]).unwrap();
    let direct = f.l2_norm() + s1.l2_norm() + s2.l2_norm();
    let w = plane.sobolev_norm(&f, 1, 2.0).unwrap();
    assert!((w - direct).abs() <= 1e-6 * direct);
    assert!(plane.sobolev_norm(&f, 2, 2.0).unwrap() > w);
    let mixed = plane.symbol_derivative(&plane.symbol_derivative(&f, [1, 0]).unwrap(), [0, 1]).unwrap();
    let both = plane.symbol_derivative(&f, [1, 1]).unwrap();
    assert_eq!(mixed, both);
}

#[test]
fn cwikel_modes_are_finite() {
    let plane = MoyalPlane::planar(1.0, 8.0, 16).unwrap();
    let f = sample(&plane, Gauss { m: [0.0, 0.0], w: 0.8, c: (1.0, 0.0) });
    let g = plane.symbol(|s| C64::new((-(s[0] * s[0] + s[1] * s[1]) / 2.0).exp(), 0.0)).unwrap();
    let base = plane.sobolev_cwikel_ratio(&f, 1.0, &CwikelMode::ResolventPower(0)).unwrap();
    assert!(base.ratio.is_finite() && base.ratio > 0.0);
    // equality for positive x in the continuum; the grid adds a small quadrature error
    assert!(base.ratio <= base.reference.unwrap() * 1.01, "{base:?}");
    for mode in [CwikelMode::WeakLattice(g.clone()), CwikelMode::StrongLattice(g.clone())] {
        let r = plane.sobolev_cwikel_ratio(&f, 1.5, &mode).unwrap();
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
    }
    let r = plane.sobolev_cwikel_ratio(&f, 3.0, &CwikelMode::InterpolationAbove2(g)).unwrap();
    assert!(r.ratio <= cwikel_core::cwikel::CONSTANT_GENERAL);
    let zero = plane.symbol(|_| C64::new(0.0, 0.0)).unwrap();
    assert_eq!(plane.sobolev_cwikel_ratio(&zero, 1.0, &CwikelMode::ResolventPower(1)).unwrap().lhs, 0.0);
}
