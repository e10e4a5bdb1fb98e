//! Randomized trials of the rearrangement identities and inequalities.

use cwikel_core::invariants::{
    average_squares, block_majorization, mu_of_sum, norm_reversal, rearrangement_oracle, tensor_weak_bound, Bound,
};
use cwikel_core::linalg::CMatrix;
use cwikel_core::{DenseOperator, StepFunction, C64};
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use super::{all_ok, params, Ctx, Outcome};
use crate::report::{Claim, ExperimentReport};

fn matrix(rng: &mut ChaCha20Rng, rows: usize, cols: usize) -> DenseOperator {
    let m = CMatrix::from_fn(rows, cols, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    DenseOperator::new(m, 1.0).expect("finite entries")
}

fn step(rng: &mut ChaCha20Rng, max_len: usize) -> StepFunction {
    let n = rng.random_range(1..=max_len);
    let segs: Vec<(f64, f64)> = (0..n).map(|_| (rng.random_range(0.01..10.0), rng.random_range(0.05..3.0))).collect();
    StepFunction::from_samples(segs).expect("positive widths")
}

/// Worst case of one check in a trial and whether it held.
#[derive(Clone, Copy, Debug, Default)]
struct Check {
    violated: bool,
    worst: f64,
}

impl Check {
    fn bound(b: Bound, rtol: f64) -> Self {
        Self { violated: !b.holds(rtol), worst: if b.rhs > 0.0 { b.lhs / b.rhs } else { 0.0 } }
    }
}

#[derive(Clone, Copy, Debug)]
struct Trial {
    oracle: Check,
    mu_of_sum: Check,
    block: Check,
    reversal: Check,
    tensor: Check,
}

fn trial(rng: &mut ChaCha20Rng) -> cwikel_core::Result<Trial> {
    // a small value alphabet forces ties
    let ties = rng.random_bool(0.5);
    let n = rng.random_range(1..=60);
    let samples: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let v = if ties { rng.random_range(-3i32..=3) as f64 } else { rng.random_range(-5.0..5.0) };
            (v, rng.random_range(0.01..2.0))
        })
        .collect();
    let a = rearrangement_oracle(&samples)?;
    let oracle = Check { violated: a.relative() > 1e-12, worst: a.relative() };

    let (r, c) = (rng.random_range(2..=7), rng.random_range(2..=7));
    let (x, y) = (matrix(rng, r, c), matrix(rng, r, c));
    let b = mu_of_sum(&x, &y)?;
    let mu_of_sum = Check { violated: !b.holds(1e-10), worst: b.lhs - b.rhs };

    let rows = rng.random_range(2..=6);
    let blocks: Vec<DenseOperator> = (0..rng.random_range(1..=5))
        .map(|_| {
            let cols = rng.random_range(1..=4);
            matrix(rng, rows, cols)
        })
        .collect();
    let v = block_majorization(&blocks, 1e-9)?;
    let block = Check { violated: !v.holds, worst: v.observed_constant };

    let y = step(rng, 16);
    let group = rng.random_range(2..=5);
    let p = [0.5, 1.0, 1.5][rng.random_range(0..3)];
    let rev = norm_reversal(&average_squares(&y, group)?, &y, p)?;
    let (s, w) = (Check::bound(rev.strong, 1e-12), Check::bound(rev.weak, 1e-12));
    let reversal = Check { violated: !rev.majorized || s.violated || w.violated, worst: s.worst.max(w.worst) };

    let (x, y) = (step(rng, 10), step(rng, 10));
    let tensor = Check::bound(tensor_weak_bound(&x, &y, rng.random_range(0.5..3.0))?, 1e-12);
    Ok(Trial { oracle, mu_of_sum, block, reversal, tensor })
}

pub(super) fn run(ctx: &Ctx) -> Vec<ExperimentReport> {
    let trials = ctx.cfg.trials_or(1000);
    let results: Vec<cwikel_core::Result<Trial>> =
        (0..trials).into_par_iter().map(|i| trial(&mut ctx.rng("core-invariants", i))).collect();
    type Pick = fn(&Trial) -> Check;
    let checks: [(&str, &str, Pick); 5] = [
        ("rearrangement-oracle", "max relative deviation from distribution inversion", |t| t.oracle),
        ("mu-of-sum", "max mu(t+s, A+B) - mu(t, A) - mu(s, B)", |t| t.mu_of_sum),
        ("block-majorization", "max partial-integral ratio of mu^2(direct sum) to mu^2(sum)", |t| t.block),
        ("norm-reversal", "max ||y|| / (c ||x||) over strong and weak norms", |t| t.reversal),
        ("tensor-weak", "max ||x (x) y||_{p,inf} / (||x||_p ||y||_{p,inf})", |t| t.tensor),
    ];
    checks
        .iter()
        .map(|&(name, worst_meaning, pick)| {
            ctx.row(params! {"check" => name, "trials" => trials}, Claim::AtMost(0.0), || {
                let ok = all_ok(&results)?;
                let violations = ok.iter().filter(|t| pick(t).violated).count();
                let worst = ok.iter().map(|t| pick(t).worst).fold(f64::NEG_INFINITY, f64::max);
                Ok(Outcome::at_most(violations as f64, 0.0).detail("worst", worst).detail("worst_meaning", worst_meaning))
            })
        })
        .collect()
}
