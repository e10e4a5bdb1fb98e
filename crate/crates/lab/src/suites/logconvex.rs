//! Simplex entropy inequality and the logarithmic triangle inequality.

use cwikel_core::linalg::CMatrix;
use cwikel_core::logconvex::{entropy_lagrange_check, weak_l1_log_triangle, LogTriangle, SimplexPoint, Sides};
use cwikel_core::{DenseOperator, C64};
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use super::{all_ok, log_uniform, params, Ctx, Outcome};
use crate::report::{Claim, ExperimentReport};

const MAX_DIM: usize = 64;
const BATCH: usize = 1000;

/// Dirichlet(alpha, ..., alpha) by normalized Gamma draws.
fn dirichlet(rng: &mut ChaCha20Rng) -> cwikel_core::Result<SimplexPoint> {
    let n = rng.random_range(1..=MAX_DIM);
    let alpha = log_uniform(rng, 0.1, 10.0);
    let gamma = Gamma::new(alpha, 1.0).expect("positive shape");
    loop {
        let g: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
        let s: f64 = g.iter().sum();
        if s > 0.0 {
            let mut a: Vec<f64> = g.iter().map(|v| v / s).collect();
            // put the rounding residue on the largest coordinate
            let r = 1.0 - a.iter().sum::<f64>();
            let top = (0..n).max_by(|&i, &j| a[i].total_cmp(&a[j])).unwrap_or(0);
            a[top] = (a[top] + r).clamp(0.0, 1.0);
            return SimplexPoint::new(a);
        }
    }
}

/// Vertices and edge midpoints of the simplex in every dimension up to 8.
fn corners() -> cwikel_core::Result<Vec<SimplexPoint>> {
    let mut out = Vec::new();
    for n in 1..=8 {
        for i in 0..n {
            out.push(SimplexPoint::vertex(n, i)?);
            for j in i + 1..n {
                let mut a = vec![0.0; n];
                a[i] = 0.5;
                a[j] = 0.5;
                out.push(SimplexPoint::new(a)?);
            }
        }
    }
    Ok(out)
}

fn collection(rng: &mut ChaCha20Rng) -> cwikel_core::Result<Vec<DenseOperator>> {
    let k = rng.random_range(1..=12);
    let dim = rng.random_range(2..=8);
    (0..k)
        .map(|_| {
            let scale = log_uniform(rng, 1e-2, 1e2);
            let rank = rng.random_range(1..=dim);
            let left = CMatrix::from_fn(dim, rank, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let right = CMatrix::from_fn(rank, dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            DenseOperator::new((left * right) * C64::new(scale, 0.0), 1.0)
        })
        .collect()
}

fn summarize(sides: &[Sides]) -> Outcome {
    let violations = sides.iter().filter(|s| !s.holds()).count();
    let worst = sides.iter().map(|s| if s.rhs > 0.0 { s.lhs / s.rhs } else { 0.0 }).fold(0.0, f64::max);
    Outcome::at_most(violations as f64, 0.0).detail("worst_ratio", worst)
}

pub(super) fn run(ctx: &Ctx) -> Vec<ExperimentReport> {
    let samples = ctx.cfg.trials.map_or(100_000, |t| t * 100);
    let collections = ctx.cfg.trials.map_or(500, |t| t * 5);
    // batched streams keep the per-stream overhead small
    let random: Vec<cwikel_core::Result<Vec<Sides>>> = (0..samples.div_ceil(BATCH))
        .into_par_iter()
        .map(|b| {
            let mut rng = ctx.rng("dirichlet", b);
            let count = BATCH.min(samples - b * BATCH);
            (0..count).map(|_| Ok(entropy_lagrange_check(&dirichlet(&mut rng)?))).collect()
        })
        .collect();
    let triangles: Vec<cwikel_core::Result<LogTriangle>> = (0..collections)
        .into_par_iter()
        .map(|i| weak_l1_log_triangle(&collection(&mut ctx.rng("log-triangle", i))?))
        .collect();
    vec![
        ctx.row(params! {"check" => "entropy-dirichlet", "samples" => samples, "max_dim" => MAX_DIM, "alpha" => "log-uniform [0.1, 10]"},
            Claim::AtMost(0.0), || {
            let ok = all_ok(&random)?;
            let sides: Vec<Sides> = ok.into_iter().flatten().copied().collect();
            Ok(summarize(&sides).detail("count", sides.len()))
        }),
        ctx.row(params! {"check" => "entropy-corners", "max_dim" => 8}, Claim::AtMost(0.0), || {
            let sides: Vec<Sides> = corners()?.iter().map(entropy_lagrange_check).collect();
            Ok(summarize(&sides).detail("count", sides.len()))
        }),
        ctx.row(params! {"check" => "log-triangle-given", "collections" => collections}, Claim::AtMost(0.0), || {
            let ok = all_ok(&triangles)?;
            Ok(summarize(&ok.iter().map(|t| t.given()).collect::<Vec<_>>()))
        }),
        ctx.row(params! {"check" => "log-triangle-sorted", "collections" => collections}, Claim::AtMost(0.0), || {
            let ok = all_ok(&triangles)?;
            Ok(summarize(&ok.iter().map(|t| t.sorted()).collect::<Vec<_>>()))
        }),
    ]
}
