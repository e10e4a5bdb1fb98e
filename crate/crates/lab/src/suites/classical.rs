//! Classical `M_f g(-i grad)` suites on one-dimensional grids.

use cwikel_core::cwikel::{
    bump, check_submajorization_130, check_submajorization_532, compact_support_ratio, cwikel_small_p, dyadic_bounds,
    fourier_coeff_lemma, schatten_ratio_large_p, weak_l2_positive, CubeSamples, DyadicReport, Flavor, SmallPInstance,
    CONSTANT_GENERAL, CONSTANT_POSITIVE,
};
use cwikel_core::lattice::{Domain, GridSpec, SampledFunction};
use cwikel_core::{MajorizationVerdict, C64};
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use super::{all_ok, amplitude, params, Ctx, Outcome};
use crate::report::{Claim, ExperimentReport};

const SIDE: f64 = 8.0;
const PAIRS_LABEL: &str = "classical-pairs";

/// Sum of smooth plateaus `a bump((x - c) / w)`.
#[derive(Clone, Debug)]
struct Bumps(Vec<(f64, f64, C64)>);

impl Bumps {
    fn random(rng: &mut ChaCha20Rng, count: std::ops::RangeInclusive<usize>, centres: (f64, f64), widths: (f64, f64)) -> Self {
        let n = rng.random_range(count);
        Self(
            (0..n)
                .map(|_| (rng.random_range(centres.0..centres.1), rng.random_range(widths.0..widths.1), amplitude(rng)))
                .collect(),
        )
    }

    fn eval(&self, x: f64) -> C64 {
        self.0.iter().map(|&(c, w, a)| a * bump((x - c) / w)).sum()
    }

    fn sample(&self, grid: GridSpec, domain: Domain) -> cwikel_core::Result<SampledFunction> {
        SampledFunction::from_fn(grid, domain, |x| self.eval(x[0]))
    }
}

/// Grid sizes cycle through 32, 64, 128 unless the config fixes one.
fn pair_points(ctx: &Ctx, i: usize) -> usize {
    ctx.cfg.grid.unwrap_or([32, 64, 128][i % 3])
}

/// Random compactly supported pair shared by the submajorization and dyadic suites.
fn classical_pair(ctx: &Ctx, i: usize) -> cwikel_core::Result<(SampledFunction, SampledFunction)> {
    let mut rng = ctx.rng(PAIRS_LABEL, i);
    let grid = GridSpec::periodic(1, SIDE, pair_points(ctx, i))?;
    let f = Bumps::random(&mut rng, 1..=3, (1.0, 7.0), (0.15, 0.6));
    let g = Bumps::random(&mut rng, 1..=3, (-8.0, 8.0), (0.5, 3.0));
    Ok((f.sample(grid, Domain::Position)?, g.sample(grid, Domain::Frequency)?))
}

fn pair_count(ctx: &Ctx) -> usize {
    ctx.cfg.trials_or(200)
}

struct SubmajorizationInstance {
    general: MajorizationVerdict,
    positive: MajorizationVerdict,
    schatten3: f64,
}

fn verdict_row(
    ctx: &Ctx,
    check: &str,
    constant: f64,
    n: usize,
    results: &[cwikel_core::Result<SubmajorizationInstance>],
    pick: fn(&SubmajorizationInstance) -> &MajorizationVerdict,
) -> ExperimentReport {
    ctx.row(params! {"check" => check, "pairs" => n, "side" => SIDE, "points" => ctx.cfg.grid.map_or("32,64,128".to_string(), |g| g.to_string())},
        Claim::AtMost(constant), || {
        let ok = all_ok(results)?;
        let violations = ok.iter().filter(|r| !pick(r).holds).count();
        let constants: Vec<f64> = ok.iter().map(|r| pick(r).observed_constant).collect();
        let max = constants.iter().copied().fold(0.0, f64::max);
        Ok(Outcome::with_verdict(max, violations == 0 && max <= constant)
            .detail("violations", violations)
            .plot(constants.iter().enumerate().map(|(i, c)| (i as f64, *c)).collect()))
    })
}

pub(super) fn submajorization(ctx: &Ctx) -> Vec<ExperimentReport> {
    let n = pair_count(ctx);
    let results: Vec<cwikel_core::Result<SubmajorizationInstance>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (f, g) = classical_pair(ctx, i)?;
            Ok(SubmajorizationInstance {
                general: check_submajorization_532(&f, &g)?,
                positive: check_submajorization_130(&f.abs(), &g.abs())?,
                schatten3: schatten_ratio_large_p(&f, &g, 3.0)?,
            })
        })
        .collect();
    vec![
        verdict_row(ctx, "general", CONSTANT_GENERAL, n, &results, |r| &r.general),
        verdict_row(ctx, "positive", CONSTANT_POSITIVE, n, &results, |r| &r.positive),
        ctx.row(params! {"check" => "schatten-p3", "pairs" => n, "p" => 3.0}, Claim::AtMost(CONSTANT_GENERAL), || {
            let ok = all_ok(&results)?;
            let max = ok.iter().map(|r| r.schatten3).fold(0.0, f64::max);
            Ok(Outcome::at_most(max, CONSTANT_GENERAL))
        }),
    ]
}

pub(super) fn dyadic_split(ctx: &Ctx) -> Vec<ExperimentReport> {
    let n = pair_count(ctx);
    let results: Vec<cwikel_core::Result<DyadicReport>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (f, g) = classical_pair(ctx, i)?;
            dyadic_bounds(&f.abs(), &g.abs())
        })
        .collect();
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else if a > 0.0 { f64::INFINITY } else { 0.0 };
    let base = |check: &str| params! {"check" => check, "pairs" => n, "side" => SIDE};
    vec![
        ctx.row(base("a-bound"), Claim::AtMost(1.0), || {
            let ok = all_ok(&results)?;
            let worst = ok.iter().flat_map(|r| &r.levels).map(|l| ratio(l.a_norm, l.a_bound)).fold(0.0, f64::max);
            let levels: usize = ok.iter().map(|r| r.levels.len()).sum();
            Ok(Outcome::at_most(worst, 1.0 + 1e-10).detail("levels", levels).detail("quantity", "max ||A_n||_inf / 2^{n+2}"))
        }),
        ctx.row(base("b-bound"), Claim::AtMost(1.0), || {
            let ok = all_ok(&results)?;
            let worst = ok.iter().flat_map(|r| &r.levels).map(|l| ratio(l.b_hs_sq, l.b_bound)).fold(0.0, f64::max);
            Ok(Outcome::at_most(worst, 1.0 + 1e-10).detail("quantity", "max ||B_n||_2^2 / projected tensor quantity"))
        }),
        ctx.row(base("reconstruction"), Claim::AtMost(1e-10), || {
            let ok = all_ok(&results)?;
            let worst = ok.iter().flat_map(|r| &r.levels).map(|l| l.reconstruction_error).fold(0.0, f64::max);
            Ok(Outcome::at_most(worst, ctx.tol("reconstruction", 1e-10)).detail("quantity", "max ||A_n + B_n - M_f g||_2 / ||M_f g||_2"))
        }),
        ctx.row(base("diagonal-series"), Claim::AtMost(1.0), || {
            let ok = all_ok(&results)?;
            let mut worst: f64 = 0.0;
            for r in &ok {
                for d in &r.diagonals {
                    worst = worst.max(ratio(d.norm, d.bound));
                }
                for lv in &r.levels {
                    let s: f64 = r.diagonals.iter().filter(|d| d.m < lv.level).map(|d| d.norm).sum();
                    worst = worst.max(ratio(s, lv.a_bound));
                }
            }
            let all = ok.iter().all(|r| r.all_hold());
            Ok(Outcome::with_verdict(worst, all && worst <= 1.0 + 1e-10)
                .detail("quantity", "max of ||sum_{k+l=m} x_k y_l|| / 2^{m+2} and sum_{m<n} ... / 2^{n+2}"))
        }),
    ]
}

const SMALL_P_POINTS: usize = 64;

fn small_p_pair(ctx: &Ctx, i: usize) -> cwikel_core::Result<SmallPInstance> {
    let mut rng = ctx.rng("small-p", i);
    let grid = GridSpec::periodic(1, SIDE, SMALL_P_POINTS)?;
    let f = Bumps::random(&mut rng, 2..=4, (0.5, 7.5), (0.1, 0.5));
    let g = Bumps::random(&mut rng, 1..=3, (-6.0, 6.0), (0.3, 2.0));
    SmallPInstance::new(&f.sample(grid, Domain::Position)?, &g.sample(grid, Domain::Frequency)?)
}

/// Single unit cell in `x`, frequency support inside `[0, 1)`.
fn single_cell_pair() -> cwikel_core::Result<(SampledFunction, SampledFunction)> {
    let grid = GridSpec::periodic(1, SIDE, SMALL_P_POINTS)?;
    let f = SampledFunction::from_real_fn(grid, Domain::Position, |x| if x[0] < 1.0 { 1.0 + x[0] } else { 0.0 })?;
    let g = SampledFunction::from_real_fn(grid, Domain::Frequency, |k| if (0.0..0.7).contains(&k[0]) { 2.0 - k[0] } else { 0.0 })?;
    Ok((f, g))
}

pub(super) fn small_p(ctx: &Ctx) -> Vec<ExperimentReport> {
    let n = ctx.cfg.trials_or(50);
    let window = 20.min(n.saturating_sub(1));
    let tol = ctx.tol("stability", 0.05);
    let instances: Vec<cwikel_core::Result<SmallPInstance>> = (0..n).into_par_iter().map(|i| small_p_pair(ctx, i)).collect();
    let mut rows = Vec::new();
    for p in [1.0, 1.5] {
        for (flavor, name) in [(Flavor::Strong, "strong"), (Flavor::Weak, "weak")] {
            let params = params! {"check" => "running-sup", "p" => p, "flavor" => name, "pairs" => n, "points" => SMALL_P_POINTS, "window" => window};
            rows.push(ctx.row(params, Claim::AtMost(tol), || {
                let ok = all_ok(&instances)?;
                let ratios = ok.iter().map(|inst| Ok(inst.ratio(p, flavor)?.ratio)).collect::<anyhow::Result<Vec<f64>>>()?;
                let mut sup = 0.0f64;
                let running: Vec<f64> = ratios.iter().map(|r| {
                    sup = sup.max(*r);
                    sup
                }).collect();
                let last = running.last().copied().unwrap_or(0.0);
                let before = running.get(n - 1 - window).copied().unwrap_or(0.0);
                let change = if before > 0.0 { (last - before) / before } else { 0.0 };
                let finite = ratios.iter().all(|r| r.is_finite());
                Ok(Outcome::with_verdict(change, finite && change <= tol)
                    .detail("running_sup", last)
                    .detail("quantity", "relative growth of the running sup over the last window")
                    .plot(running.iter().enumerate().map(|(i, s)| (i as f64, *s)).collect()))
            }));
        }
    }
    rows.push(ctx.row(params! {"check" => "single-cell", "points" => SMALL_P_POINTS, "p" => "1,1.5"}, Claim::AtMost(1e-12), || {
        let (f, g) = single_cell_pair()?;
        let mut worst: f64 = 0.0;
        for p in [1.0, 1.5] {
            let a = cwikel_small_p(&f, &g, p, Flavor::Strong)?.ratio;
            let b = compact_support_ratio(&f, &g, p)?;
            worst = worst.max((a - b).abs() / b);
        }
        Ok(Outcome::at_most(worst, 1e-12).detail("quantity", "relative gap to the compact-support ratio"))
    }));
    for p in [0.5, 1.0, 1.5] {
        rows.push(ctx.row(params! {"check" => "fourier-coefficients", "p" => p, "samples" => 32, "modes" => 64}, Claim::Recorded, || {
            let mut worst: f64 = 0.0;
            for i in 0..10 {
                let mut rng = ctx.rng("fourier-coefficients", i);
                let coeffs: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
                let h = CubeSamples::from_fn(1, 32, |x| coeffs.iter().enumerate().map(|(k, c)| c * (std::f64::consts::PI * k as f64 * x[0]).cos()).sum())?;
                worst = worst.max(fourier_coeff_lemma(&h, p, 64)?.ratio);
            }
            Ok(Outcome::recorded(worst).detail("quantity", "max sum |psi_k|^p / ||h||_1^p"))
        }));
    }
    rows
}

pub(super) fn weak_l2(ctx: &Ctx) -> Vec<ExperimentReport> {
    let n = ctx.cfg.trials_or(20);
    let ratios: Vec<cwikel_core::Result<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ctx.rng("weak-l2", i);
            let grid = GridSpec::periodic(1, SIDE, SMALL_P_POINTS)?;
            let f = Bumps::random(&mut rng, 1..=4, (0.5, 7.5), (0.1, 0.5)).sample(grid, Domain::Position)?.abs();
            let g = Bumps::random(&mut rng, 1..=3, (-6.0, 6.0), (0.3, 2.0)).sample(grid, Domain::Frequency)?.abs();
            Ok(weak_l2_positive(&f, &g)?.ratio)
        })
        .collect();
    vec![ctx.row(params! {"check" => "ratio", "pairs" => n, "points" => SMALL_P_POINTS}, Claim::Recorded, || {
        let ok = all_ok(&ratios)?;
        let max = ok.iter().copied().copied().fold(0.0, f64::max);
        Ok(Outcome::recorded(max)
            .detail("quantity", "max ||M_f g||_{2,inf} / (||f||_{2,log(L_inf)} ||g||_{l_{2,inf}(L_4)})")
            .plot(ok.iter().enumerate().map(|(i, r)| (i as f64, **r)).collect()))
    })]
}
