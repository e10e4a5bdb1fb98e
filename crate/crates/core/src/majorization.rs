//! Submajorization and majorization of rearrangements.

use crate::error::{ensure, Result};
use crate::linalg::DenseOperator;
use crate::step::StepFunction;

/// Relative slack granted to roundoff when deciding `holds`.
pub const MAJORIZATION_RTOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct MajorizationVerdict {
    pub holds: bool,
    /// `sup_t int_0^t f / int_0^t g` over the checked breakpoints.
    pub observed_constant: f64,
    pub worst_breakpoint: f64,
    /// `(int f, int g)`.
    pub totals: (f64, f64),
}

/// `mu` of an operator as a step function with unit-width segments.
pub fn singular_step(op: &DenseOperator) -> Result<StepFunction> {
    let s = op.singular_values()?;
    StepFunction::from_samples(s.into_iter().map(|v| (v, 1.0)))
}

fn check_points(f: &StepFunction, g: &StepFunction) -> Vec<f64> {
    let mut pts: Vec<f64> = f.breakpoints().iter().chain(g.breakpoints()).copied().collect();
    if f.tail().is_some() || g.tail().is_some() {
        // partial integrals are no longer piecewise linear: sample geometrically
        let w = f.finite_width().max(g.finite_width());
        let base = if w > 0.0 { w } else { 1.0 };
        for k in -60..=60 {
            let t = base * 2f64.powi(k);
            if k > 0 || w == 0.0 {
                pts.push(t);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Checks `int_0^t f <= slack * int_0^t g` for every `t`.
///
/// For finitely supported inputs the partial integrals are piecewise linear,
/// so the breakpoints of both functions suffice.
pub fn submajorizes(g: &StepFunction, f: &StepFunction, slack: f64) -> Result<MajorizationVerdict> {
    ensure(slack.is_finite() && slack > 0.0, || format!("slack {slack} must be positive"))?;
    let mut observed: f64 = 0.0;
    let mut worst = 0.0;
    for t in check_points(f, g) {
        let (ft, gt) = (f.integral_to(t), g.integral_to(t));
        let ratio = if gt > 0.0 {
            ft / gt
        } else if ft > 0.0 {
            f64::INFINITY
        } else {
            continue;
        };
        if ratio > observed {
            observed = ratio;
            worst = t;
        }
    }
    Ok(MajorizationVerdict {
        holds: observed <= slack * (1.0 + MAJORIZATION_RTOL),
        observed_constant: observed,
        worst_breakpoint: worst,
        totals: (f.total_integral(), g.total_integral()),
    })
}

/// `f` majorized by `g`: submajorization with slack 1 plus equal totals.
pub fn majorizes(g: &StepFunction, f: &StepFunction, tol: f64) -> Result<MajorizationVerdict> {
    ensure(tol >= 0.0, || "tolerance must be non-negative".into())?;
    let mut v = submajorizes(g, f, 1.0)?;
    let (a, b) = v.totals;
    ensure(a.is_finite() && b.is_finite(), || "majorization needs integrable functions".into())?;
    v.holds = v.holds && (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    Ok(v)
}
