//! Landau level identities, the magnetic Cwikel ratios and CLR counts.

use cwikel_core::cwikel::CONSTANT_GENERAL;
use cwikel_core::magnetic::{
    clr_count, laguerre, magnetic_cwikel, mf_pn_hs, projection_residual_pair, CubePotential, LandauSpec, MagneticFlavor,
    NuFunction,
};
use cwikel_core::quadrature::gauss_laguerre;
use cwikel_core::C64;
use rand::Rng;
use rayon::prelude::*;

use super::{all_ok, amplitude, params, Ctx, Outcome};
use crate::report::{Claim, ExperimentReport};

const FIELDS: [f64; 3] = [0.5, 1.0, 2.0];
const HS_POINTS: usize = 128;

fn gaussian(spec: &LandauSpec, c: [f64; 2], w: [f64; 2]) -> cwikel_core::Result<cwikel_core::lattice::SampledFunction> {
    spec.sample(|s| (-((s[0] - c[0]) / w[0]).powi(2) / 2.0 - ((s[1] - c[1]) / w[1]).powi(2) / 2.0).exp())
}

pub(super) fn hilbert_schmidt(ctx: &Ctx) -> Vec<ExperimentReport> {
    let points = ctx.cfg.grid.map_or(HS_POINTS, |g| g.max(16));
    let tol = ctx.tol("identity", 5e-3);
    let mut rows = Vec::new();
    for (bi, &b) in FIELDS.iter().enumerate() {
        let mut rng = ctx.rng("magnetic-hs", bi);
        let c = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let w = [rng.random_range(0.7..1.5), rng.random_range(0.7..1.5)];
        let levels: Vec<C64> = (0..=4).map(|_| amplitude(&mut rng)).collect();
        for n in 0..=3usize {
            rows.push(ctx.row(params! {"check" => "projection", "b" => b, "n" => n, "points" => points}, Claim::AtMost(tol), || {
                let spec = LandauSpec::new(b, 3, points)?;
                let cmp = mf_pn_hs(&gaussian(&spec, c, w)?, n, &spec)?;
                Ok(Outcome::at_most(cmp.relative_error(), tol)
                    .detail("computed", cmp.computed)
                    .detail("claimed", cmp.claimed)
                    .detail("radius", spec.radius()))
            }));
        }
        rows.push(ctx.row(params! {"check" => "product-formula", "b" => b, "n_max" => 4, "points" => points}, Claim::AtMost(tol), || {
            let spec = LandauSpec::new(b, 4, points)?;
            let g = NuFunction::new(levels.clone(), &spec)?;
            let r = magnetic_cwikel(&gaussian(&spec, c, w)?, &g, &spec, MagneticFlavor::HilbertSchmidt)?;
            let rel = (r.lhs - r.rhs).abs() / r.rhs;
            Ok(Outcome::at_most(rel, tol).detail("computed", r.lhs).detail("claimed", r.rhs))
        }));
    }
    rows.push(ctx.row(params! {"check" => "refinement", "b" => 1.0, "n" => 0, "points" => [32, 64, 128]}, Claim::Recorded, || {
        let mut plot = Vec::new();
        let mut radius = None;
        for points in [32usize, 64, 128] {
            let spec = match radius {
                None => LandauSpec::new(1.0, 0, points)?,
                Some(r) => LandauSpec::with_radius(1.0, 0, r, points)?,
            };
            radius = Some(spec.radius());
            plot.push((points as f64, mf_pn_hs(&gaussian(&spec, [0.3, -0.2], [0.8, 1.1])?, 0, &spec)?.relative_error()));
        }
        Ok(Outcome::recorded(plot.last().map_or(0.0, |p| p.1)).detail("quantity", "relative error at the finest grid").plot(plot))
    }));
    let nodes = 16;
    rows.push(ctx.row(params! {"check" => "laguerre-orthonormality", "max_degree" => 6, "nodes" => nodes}, Claim::AtMost(1e-8), || {
        let (x, wt) = gauss_laguerre(nodes)?;
        let mut worst: f64 = 0.0;
        for n in 0..=6 {
            for m in 0..=6 {
                let v: f64 = x.iter().zip(&wt).map(|(u, w)| w * laguerre(n, *u) * laguerre(m, *u)).sum();
                worst = worst.max((v - if n == m { 1.0 } else { 0.0 }).abs());
            }
        }
        Ok(Outcome::at_most(worst, 1e-8))
    }));
    for (m, n) in [(0usize, 0usize), (0, 1), (1, 1)] {
        rows.push(ctx.row(params! {"check" => "projection-residual", "b" => 4.0, "m" => m, "n" => n, "points" => 48}, Claim::Recorded, || {
            let spec = LandauSpec::new(4.0, 1, 48)?;
            Ok(Outcome::recorded(projection_residual_pair(m, n, &spec)?)
                .detail("quantity", "inner-half HS norm of P_m P_n - delta_mn P_n relative to ||P_n||"))
        }));
    }
    rows
}

const CWIKEL_B: f64 = 1.0;
const CWIKEL_LEVELS: usize = 4;
const CWIKEL_POINTS: usize = 64;

pub(super) fn cwikel(ctx: &Ctx) -> Vec<ExperimentReport> {
    let n = ctx.cfg.trials_or(20);
    let flavors = [MagneticFlavor::Strong(3.0), MagneticFlavor::Weak(3.0), MagneticFlavor::Strong(1.0), MagneticFlavor::Weak(1.0)];
    let results: Vec<cwikel_core::Result<Vec<(f64, f64)>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ctx.rng("magnetic-cwikel", i);
            let spec = LandauSpec::new(CWIKEL_B, CWIKEL_LEVELS, CWIKEL_POINTS)?;
            let (r, c) = (rng.random_range(1.0..2.5), [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
            let amp = amplitude(&mut rng);
            let f = spec.sample(|s| {
                let q = 1.0 - ((s[0] - c[0]).powi(2) + (s[1] - c[1]).powi(2)) / (r * r);
                if q > 0.0 { amp.norm() * q * q } else { 0.0 }
            })?;
            let g = NuFunction::new((0..=CWIKEL_LEVELS).map(|_| amplitude(&mut rng)).collect(), &spec)?;
            flavors
                .iter()
                .map(|&fl| {
                    let m = magnetic_cwikel(&f, &g, &spec, fl)?;
                    Ok((m.ratio(), m.submajorization.map_or(0.0, |v| v.observed_constant)))
                })
                .collect()
        })
        .collect();
    let base = |check: &str, p: f64| params! {"check" => check, "p" => p, "pairs" => n, "b" => CWIKEL_B, "n_max" => CWIKEL_LEVELS, "points" => CWIKEL_POINTS};
    let mut rows = Vec::new();
    for (k, fl) in flavors.iter().enumerate() {
        let (name, p) = match fl {
            MagneticFlavor::Strong(p) => ("strong", *p),
            MagneticFlavor::Weak(p) => ("weak", *p),
            MagneticFlavor::HilbertSchmidt => ("hs", 2.0),
        };
        rows.push(ctx.row(base(name, p), Claim::Recorded, || {
            let ok = all_ok(&results)?;
            let max = ok.iter().map(|r| r[k].0).fold(0.0, f64::max);
            Ok(Outcome::recorded(max).detail("quantity", "max ||M_f g(-Delta_b)||_E / ||mu(f) (x) mu_nu(g)||_E"))
        }));
    }
    rows.push(ctx.row(base("submajorization", 2.0), Claim::AtMost(CONSTANT_GENERAL), || {
        let ok = all_ok(&results)?;
        let max = ok.iter().map(|r| r[0].1).fold(0.0, f64::max);
        Ok(Outcome::at_most(max, CONSTANT_GENERAL).detail("quantity", "max c with mu^2(M_f g) << c (2pi)^{-1} mu^2(f (x) g)"))
    }));
    rows
}

const CLR_SIDE: f64 = 4.0;
const CLR_NODES: usize = 8;

fn well(depth: f64) -> cwikel_core::Result<CubePotential> {
    CubePotential::from_fn(CLR_SIDE, CLR_NODES, |p| {
        let r2 = (p[0] - 2.0).powi(2) + (p[1] - 2.0).powi(2) + (p[2] - 2.0).powi(2);
        if r2 < 1.0 {
            -depth
        } else {
            0.0
        }
    })
}

pub(super) fn clr(ctx: &Ctx) -> Vec<ExperimentReport> {
    let base = |check: &str| params! {"check" => check, "side" => CLR_SIDE, "nodes" => CLR_NODES};
    let mut rows = vec![
        ctx.row(base("nonnegative"), Claim::Equals(0.0), || {
            let c = clr_count(&CubePotential::from_fn(CLR_SIDE, CLR_NODES, |p| 1.0 + p[0])?)?;
            Ok(Outcome::with_verdict(c.n_negative as f64, c.n_negative == 0))
        }),
        ctx.row(base("homogeneity"), Claim::AtMost(1e-12), || {
            let v = well(20.0)?;
            let a = clr_count(&v)?.bound_quantity;
            let worst = [0.5, 2.0, 7.0]
                .iter()
                .map(|&lam| Ok((clr_count(&v.scale(lam))?.bound_quantity - lam.powf(1.5) * a).abs() / (lam.powf(1.5) * a)))
                .collect::<cwikel_core::Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Ok(Outcome::at_most(worst, 1e-12).detail("quantity", "relative deviation from lambda^{3/2} scaling"))
        }),
    ];
    let depths = [10.0, 20.0, 40.0, 80.0, 160.0];
    rows.push(ctx.row(params! {"check" => "well-scan", "side" => CLR_SIDE, "nodes" => CLR_NODES, "depths" => depths}, Claim::Recorded, || {
        let counts = depths.iter().map(|&d| clr_count(&well(d)?)).collect::<cwikel_core::Result<Vec<_>>>()?;
        let max = counts.iter().map(|c| c.ratio()).fold(0.0, f64::max);
        Ok(Outcome::recorded(max)
            .detail("quantity", "max n_negative / sum |V_-|^{3/2} h^3")
            .detail("counts", counts.iter().map(|c| c.n_negative).collect::<Vec<_>>())
            .plot(counts.iter().map(|c| (c.bound_quantity, c.n_negative as f64)).collect()))
    }));
    rows
}
