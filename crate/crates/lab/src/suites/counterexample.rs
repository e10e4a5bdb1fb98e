//! Growth of the truncated quantities for `f(t) = t^{-1/2} |log t|^{-1}`.

use cwikel_core::cwikel::{counterexample_scan, CounterexampleRow, COUNTEREXAMPLE_SIDE};

use super::{params, Ctx, Outcome};
use crate::report::{Claim, ExperimentReport};

pub const CUTOFFS: [f64; 5] = [1e-2, 1e-4, 1e-6, 1e-8, 1e-10];
pub const GRIDS: [usize; 5] = [512, 1024, 2048, 4096, 8192];

/// Smallest successive increment and whether every increment is positive.
fn increments(values: &[f64]) -> (f64, bool) {
    let steps: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    (steps.iter().copied().fold(f64::INFINITY, f64::min), steps.iter().all(|d| *d > 0.0))
}

fn scan_row(
    ctx: &Ctx,
    check: &str,
    scan: &cwikel_core::Result<Vec<CounterexampleRow>>,
    xy: fn(&CounterexampleRow) -> (f64, f64),
) -> ExperimentReport {
    let p = params! {"check" => check, "cutoffs" => CUTOFFS, "points" => GRIDS, "side" => COUNTEREXAMPLE_SIDE};
    ctx.row(p, Claim::Increasing, || {
        let rows = scan.as_ref().map_err(|e| anyhow::anyhow!("{e}"))?;
        let plot: Vec<(f64, f64)> = rows.iter().map(xy).collect();
        let (min_step, increasing) = increments(&plot.iter().map(|p| p.1).collect::<Vec<_>>());
        Ok(Outcome::with_verdict(min_step, increasing).detail("last", plot.last().map_or(0.0, |p| p.1)).plot(plot))
    })
}

pub(super) fn run(ctx: &Ctx) -> Vec<ExperimentReport> {
    let scan = counterexample_scan(&CUTOFFS, &GRIDS);
    let limit = 1.0 / std::f64::consts::LN_2;
    let tol = ctx.tol("norm-limit", 0.01);
    vec![
        scan_row(ctx, "truncated-integral", &scan, |r| (-r.cutoff.log10(), r.truncated_double_integral)),
        scan_row(ctx, "schatten4", &scan, |r| (r.grid_points as f64, r.truncated_schatten4_pow4)),
        ctx.row(params! {"check" => "norm-limit", "cutoffs" => CUTOFFS, "rtol" => tol}, Claim::Equals(limit), || {
            let rows = scan.as_ref().map_err(|e| anyhow::anyhow!("{e}"))?;
            let last = rows.last().ok_or_else(|| anyhow::anyhow!("empty scan"))?.norm_sq;
            let rel = (last - limit).abs() / limit;
            Ok(Outcome::with_verdict(last, rel <= tol)
                .detail("relative_error", rel)
                .plot(rows.iter().map(|r| (-r.cutoff.log10(), r.norm_sq)).collect()))
        }),
    ]
}
