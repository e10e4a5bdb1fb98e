//! Moyal plane suites (`d = 2`, `theta = S`).

use cwikel_core::cwikel::CONSTANT_GENERAL;
use cwikel_core::lattice::SampledFunction;
use cwikel_core::moyal::{quantization_constant, CwikelMode, MoyalPlane};
use cwikel_core::C64;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use super::{all_ok, amplitude, params, Ctx, Outcome};
use crate::report::{Claim, ExperimentReport};

/// `sum_k a_k (1 - |s - c_k|^2 / r_k^2)_+^2`: compactly supported and `C^1`,
/// so the isometry error is set by the grid and converges under refinement.
#[derive(Clone, Debug)]
struct Caps(Vec<([f64; 2], f64, C64)>);

impl Caps {
    /// Caps inside `[-reach, reach]^2`.
    fn random(rng: &mut ChaCha20Rng, reach: f64) -> Self {
        let n = rng.random_range(1..=3);
        Self(
            (0..n)
                .map(|_| {
                    let r = rng.random_range(1.0..2.0);
                    let c = [rng.random_range(-(reach - r)..reach - r), rng.random_range(-(reach - r)..reach - r)];
                    (c, r, amplitude(rng))
                })
                .collect(),
        )
    }

    fn eval(&self, s: &[f64]) -> C64 {
        self.0
            .iter()
            .map(|&(c, r, a)| {
                let q = 1.0 - ((s[0] - c[0]).powi(2) + (s[1] - c[1]).powi(2)) / (r * r);
                if q > 0.0 {
                    a * q * q
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .sum()
    }
}

/// Sum of complex Gaussians with centres within `spread` of the origin.
#[derive(Clone, Debug)]
struct Gaussians(Vec<([f64; 2], f64, C64)>);

impl Gaussians {
    fn random(rng: &mut ChaCha20Rng, spread: f64) -> Self {
        let n = rng.random_range(1..=3);
        Self(
            (0..n)
                .map(|_| {
                    let c = [rng.random_range(-spread..spread), rng.random_range(-spread..spread)];
                    (c, rng.random_range(0.6..1.2), amplitude(rng))
                })
                .collect(),
        )
    }

    fn sample(&self, plane: &MoyalPlane) -> cwikel_core::Result<SampledFunction> {
        plane.symbol(|s| {
            self.0
                .iter()
                .map(|&(c, w, a)| a * (-((s[0] - c[0]).powi(2) + (s[1] - c[1]).powi(2)) / (2.0 * w * w)).exp())
                .sum()
        })
    }
}

const ISOMETRY_SIDE: f64 = 16.0;
const ISOMETRY_POINTS: usize = 256;

/// Relative errors of the `tau`-Schatten-2 norm at `(N, L)` and `(2N, 2L)`.
fn isometry_errors(caps: &Caps) -> cwikel_core::Result<(f64, f64)> {
    let err = |side: f64, points: usize| -> cwikel_core::Result<f64> {
        let plane = MoyalPlane::planar(1.0, side, points)?;
        let f = plane.symbol(|s| caps.eval(s))?;
        let norm = f.l2_norm();
        Ok((plane.tau_schatten_norm(&f, 2.0)? - norm).abs() / norm)
    };
    Ok((err(ISOMETRY_SIDE, ISOMETRY_POINTS)?, err(2.0 * ISOMETRY_SIDE, 2 * ISOMETRY_POINTS)?))
}

pub(super) fn isometry(ctx: &Ctx) -> Vec<ExperimentReport> {
    let n = ctx.cfg.trials_or(20);
    // caps stay in the inner half of the coarse box
    let errors: Vec<cwikel_core::Result<(f64, f64)>> =
        (0..n).into_par_iter().map(|i| isometry_errors(&Caps::random(&mut ctx.rng("moyal-isometry", i), 0.25 * ISOMETRY_SIDE))).collect();
    let base = params! {"symbols" => n, "side" => ISOMETRY_SIDE, "points" => ISOMETRY_POINTS, "refined_side" => 2.0 * ISOMETRY_SIDE, "refined_points" => 2 * ISOMETRY_POINTS};
    let with = |check: &str| {
        let mut p = base.clone();
        p.insert("check".into(), check.into());
        p
    };
    let tol = ctx.tol("error", 1e-3);
    let factor = ctx.tol("refinement", 0.6);
    vec![
        ctx.row(with("error"), Claim::AtMost(tol), || {
            let ok = all_ok(&errors)?;
            let worst = ok.iter().map(|e| e.0).fold(0.0, f64::max);
            Ok(Outcome::at_most(worst, tol)
                .detail("quantity", "max |tau-Schatten-2 norm - ||f||_2| / ||f||_2 at the coarse grid")
                .plot(ok.iter().enumerate().map(|(i, e)| (i as f64, e.0)).collect()))
        }),
        ctx.row(with("refinement"), Claim::AtMost(factor), || {
            let ok = all_ok(&errors)?;
            let worst = ok.iter().map(|e| if e.0 > 0.0 { e.1 / e.0 } else { 0.0 }).fold(0.0, f64::max);
            let mean = |k: usize| ok.iter().map(|e| if k == 0 { e.0 } else { e.1 }).sum::<f64>() / ok.len().max(1) as f64;
            Ok(Outcome::at_most(worst, factor)
                .detail("quantity", "max refined error / coarse error")
                .plot(vec![(ISOMETRY_POINTS as f64, mean(0)), (2.0 * ISOMETRY_POINTS as f64, mean(1))]))
        }),
    ]
}

const HS_SIDE: f64 = 16.0;
const HS_POINTS: usize = 128;

pub(super) fn hilbert_schmidt(ctx: &Ctx) -> Vec<ExperimentReport> {
    let n = ctx.cfg.trials_or(50);
    let tol = ctx.tol("identity", 1e-3);
    let errors: Vec<cwikel_core::Result<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ctx.rng("moyal-hs", i);
            let plane = MoyalPlane::planar(1.0, HS_SIDE, HS_POINTS)?;
            let f = Gaussians::random(&mut rng, 1.5).sample(&plane)?;
            let g = Gaussians::random(&mut rng, 1.5).sample(&plane)?;
            let lhs = plane.product_hs_norm(&f, &g)?;
            let rhs = quantization_constant() * f.l2_norm() * g.l2_norm();
            Ok((lhs - rhs).abs() / rhs)
        })
        .collect();
    vec![ctx.row(params! {"check" => "identity", "pairs" => n, "side" => HS_SIDE, "points" => HS_POINTS}, Claim::AtMost(tol), || {
        let ok = all_ok(&errors)?;
        let worst = ok.iter().copied().copied().fold(0.0, f64::max);
        Ok(Outcome::at_most(worst, tol)
            .detail("quantity", "max relative gap to (2pi)^{-1/2} ||f||_2 ||g||_2")
            .plot(ok.iter().enumerate().map(|(i, e)| (i as f64, **e)).collect()))
    })]
}

const SOBOLEV_SIDE: f64 = 8.0;
const SOBOLEV_POINTS: usize = 16;

pub(super) fn sobolev(ctx: &Ctx) -> Vec<ExperimentReport> {
    let n = ctx.cfg.trials_or(5);
    let plane = || MoyalPlane::planar(1.0, SOBOLEV_SIDE, SOBOLEV_POINTS);
    let pairs: Vec<cwikel_core::Result<(SampledFunction, SampledFunction)>> = (0..n)
        .map(|i| {
            let plane = plane()?;
            let mut rng = ctx.rng("moyal-sobolev", i);
            Ok((Gaussians::random(&mut rng, 0.5).sample(&plane)?, Gaussians::random(&mut rng, 0.5).sample(&plane)?))
        })
        .collect();
    let base = |mode: &str, p: f64| params! {"mode" => mode, "p" => p, "symbols" => n, "side" => SOBOLEV_SIDE, "points" => SOBOLEV_POINTS};
    let ratios = |p: f64, mode: &dyn Fn(&SampledFunction) -> CwikelMode| -> anyhow::Result<Vec<(f64, Option<f64>)>> {
        let plane = plane()?;
        let ok = all_ok(&pairs)?;
        ok.iter()
            .map(|(f, g)| {
                let r = plane.sobolev_cwikel_ratio(f, p, &mode(g))?;
                Ok((r.ratio, r.reference))
            })
            .collect()
    };
    let max = |v: &[(f64, Option<f64>)]| v.iter().map(|r| r.0).fold(0.0, f64::max);
    let mut rows = vec![ctx.row(base("resolvent-k0", 1.0), Claim::AtMost(1.01), || {
        // equality for positive symbols; the grid adds a small quadrature error
        let r = ratios(1.0, &|_| CwikelMode::ResolventPower(0))?;
        let worst = r.iter().map(|(x, c)| c.map_or(f64::INFINITY, |c| x / c)).fold(0.0, f64::max);
        Ok(Outcome::at_most(worst, 1.01).detail("quantity", "max ratio / Hoelder constant").detail("max_ratio", max(&r)))
    })];
    for (name, p, mode) in [
        ("resolvent-k1", 1.0, &(|_: &SampledFunction| CwikelMode::ResolventPower(1)) as &dyn Fn(&SampledFunction) -> CwikelMode),
        ("weak-lattice", 1.5, &|g: &SampledFunction| CwikelMode::WeakLattice(g.clone())),
        ("strong-lattice", 1.5, &|g: &SampledFunction| CwikelMode::StrongLattice(g.clone())),
    ] {
        rows.push(ctx.row(base(name, p), Claim::Recorded, || Ok(Outcome::recorded(max(&ratios(p, mode)?)))));
    }
    rows.push(ctx.row(base("interpolation", 3.0), Claim::AtMost(CONSTANT_GENERAL), || {
        let r = ratios(3.0, &|g| CwikelMode::InterpolationAbove2(g.clone()))?;
        Ok(Outcome::at_most(max(&r), CONSTANT_GENERAL))
    }));
    rows
}
