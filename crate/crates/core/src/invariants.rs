//! Executable forms of the rearrangement identities and inequalities that the
//! rest of the crate relies on. Each check takes concrete inputs and reports
//! its worst case; random generation is left to callers.

use crate::error::{ensure, Result};
use crate::linalg::{hermitian_eigen, spectral_sum, CMatrix, DenseOperator};
use crate::majorization::{majorizes, singular_step, submajorizes, MajorizationVerdict};
use crate::step::StepFunction;

/// Worst case of an inequality `lhs <= rhs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bound {
    pub lhs: f64,
    pub rhs: f64,
}

impl Bound {
    pub fn holds(&self, rtol: f64) -> bool {
        self.lhs <= self.rhs + rtol * self.rhs.abs().max(self.lhs.abs())
    }
}

/// Largest deviation between two quantities that should agree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Agreement {
    pub max_abs_diff: f64,
    pub scale: f64,
}

impl Agreement {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.max_abs_diff / self.scale
        } else {
            self.max_abs_diff
        }
    }
}

/// Compares the rearrangement of weighted samples with the inversion of the
/// distribution function `d(s) = sum of weights with |value| > s`,
/// `mu(t) = inf { s : d(s) <= t }`, at every jump and midpoint of `d`.
pub fn rearrangement_oracle(samples: &[(f64, f64)]) -> Result<Agreement> {
    let mu = StepFunction::from_samples(samples.iter().copied())?;
    let mut levels: Vec<f64> = samples.iter().map(|s| s.0.abs()).collect();
    levels.push(0.0);
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();
    // distribution function at each candidate level, by direct summation
    let dist: Vec<f64> =
        levels.iter().map(|&s| samples.iter().filter(|v| v.0.abs() > s).map(|v| v.1).sum()).collect();
    let invert = |t: f64| -> f64 {
        let mut best = f64::INFINITY;
        for (&s, &d) in levels.iter().zip(&dist) {
            if d <= t && s < best {
                best = s;
            }
        }
        best
    };
    let mut probes: Vec<f64> = dist.clone();
    probes.sort_by(f64::total_cmp);
    probes.dedup();
    let mids: Vec<f64> = probes.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    probes.extend(mids);
    probes.push(probes.last().copied().unwrap_or(0.0) + 1.0);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for t in probes {
        // the merged-width convention can move a jump by roundoff; probe just inside it
        let expected = invert(t);
        let d = [t, t * (1.0 + 1e-12), t * (1.0 - 1e-12)]
            .iter()
            .map(|&u| (mu.value_at(u) - expected).abs())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
        scale = scale.max(expected.abs());
    }
    Ok(Agreement { max_abs_diff: worst, scale })
}

/// `mu(t + s, A + B) <= mu(t, A) + mu(s, B)` at every pair of breakpoints,
/// which for unit-width steps reads `sigma_{i+j}(A+B) <= sigma_i(A) + sigma_j(B)`.
pub fn mu_of_sum(a: &DenseOperator, b: &DenseOperator) -> Result<Bound> {
    let sum = a.add(b)?;
    let (sa, sb, sab) = (a.singular_values()?, b.singular_values()?, sum.singular_values()?);
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    let mut worst = Bound { lhs: 0.0, rhs: 0.0 };
    let mut worst_gap = f64::NEG_INFINITY;
    for i in 0..=sa.len() {
        for j in 0..=sb.len() {
            let lhs = at(&sab, i + j);
            let rhs = at(&sa, i) + at(&sb, j);
            if lhs - rhs > worst_gap {
                worst_gap = lhs - rhs;
                worst = Bound { lhs, rhs };
            }
        }
    }
    Ok(worst)
}

fn positive_sqrt(x: &DenseOperator) -> Result<CMatrix> {
    ensure(x.is_hermitian(1e-10), || "square root needs a Hermitian operator".into())?;
    let (vals, vecs) = hermitian_eigen(x.entries())?;
    let top = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    ensure(vals.iter().all(|&v| v >= -1e-10 * top), || "square root needs a positive operator".into())?;
    Ok(spectral_sum(&vals, &vecs, |v| Some(v.max(0.0).sqrt())))
}

/// `mu(x^{1/2} y x^{1/2}) = mu^2(y^{1/2} x^{1/2})` for positive `x`, `y`.
pub fn mu_square_identity(x: &DenseOperator, y: &DenseOperator) -> Result<Agreement> {
    let (rx, ry) = (positive_sqrt(x)?, positive_sqrt(y)?);
    let lhs = crate::linalg::singular_values(&(&rx * y.entries() * &rx))?;
    let rhs: Vec<f64> = crate::linalg::singular_values(&(&ry * &rx))?.into_iter().map(|s| s * s).collect();
    let max_abs_diff = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(Agreement { max_abs_diff, scale: lhs.first().copied().unwrap_or(0.0) })
}

/// `sum_k A_k <<  sum_k mu(A_k)`, the right side as a pointwise sum of rearrangements.
pub fn submajorization_of_sum(ops: &[DenseOperator]) -> Result<MajorizationVerdict> {
    ensure(!ops.is_empty(), || "need at least one operator".into())?;
    let mut total = ops[0].clone();
    for op in &ops[1..] {
        total = total.add(op)?;
    }
    let parts = ops.iter().map(singular_step).collect::<Result<Vec<_>>>()?;
    submajorizes(&StepFunction::pointwise_sum(&parts)?, &singular_step(&total)?, 1.0)
}

/// Places the blocks on disjoint column ranges of one matrix with a common
/// row space and checks `mu^2(direct sum) < mu^2(sum)`.
pub fn block_majorization(blocks: &[DenseOperator], tol: f64) -> Result<MajorizationVerdict> {
    ensure(!blocks.is_empty(), || "need at least one block".into())?;
    let rows = blocks[0].nrows();
    ensure(blocks.iter().all(|b| b.nrows() == rows), || "blocks must share the row dimension".into())?;
    let cols: usize = blocks.iter().map(DenseOperator::ncols).sum();
    let mut sum = CMatrix::zeros(rows, cols);
    let mut offset = 0;
    for b in blocks {
        sum.view_mut((0, offset), (rows, b.ncols())).copy_from(b.entries());
        offset += b.ncols();
    }
    let sum = DenseOperator::new(sum, blocks[0].cell_weight())?;
    let parts = blocks.iter().map(singular_step).collect::<Result<Vec<_>>>()?;
    let direct = StepFunction::direct_sum(&parts)?.power(2.0)?;
    majorizes(&singular_step(&sum)?.power(2.0)?, &direct, tol)
}

/// Averages `y^2` over consecutive groups of segments: the result `x`
/// satisfies `mu^2(x) < mu^2(y)` by construction.
pub fn average_squares(y: &StepFunction, group: usize) -> Result<StepFunction> {
    ensure(group > 0, || "group size must be positive".into())?;
    ensure(y.is_finitely_supported(), || "averaging needs a finitely supported function".into())?;
    let segs: Vec<(f64, f64)> = y.segments().collect();
    let mut out = Vec::new();
    for chunk in segs.chunks(group) {
        let w: f64 = chunk.iter().map(|s| s.1).sum();
        let m: f64 = chunk.iter().map(|s| s.0 * s.0 * s.1).sum::<f64>() / w;
        out.push((m.sqrt(), w));
    }
    StepFunction::new(&out, None)
}

/// The weak-norm constant of the reversal, `2^{1/p} / sqrt(2/p - 1)`.
pub fn reversal_weak_constant(p: f64) -> f64 {
    2f64.powf(1.0 / p) / (2.0 / p - 1.0).sqrt()
}

/// Norm reversal for `0 < p < 2` on the pair `(x, y)` with `mu^2(x) < mu^2(y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormReversal {
    pub majorized: bool,
    /// `||y||_p <= ||x||_p`
    pub strong: Bound,
    /// `||y||_{p,inf} <= c_p ||x||_{p,inf}`
    pub weak: Bound,
}

pub fn norm_reversal(x: &StepFunction, y: &StepFunction, p: f64) -> Result<NormReversal> {
    ensure(p > 0.0 && p < 2.0, || format!("norm reversal needs 0 < p < 2, got {p}"))?;
    let verdict = majorizes(&y.power(2.0)?, &x.power(2.0)?, 1e-9)?;
    Ok(NormReversal {
        majorized: verdict.holds,
        strong: Bound { lhs: y.schatten_norm(p)?, rhs: x.schatten_norm(p)? },
        weak: Bound { lhs: y.lorentz_quasinorm(p)?, rhs: reversal_weak_constant(p) * x.lorentz_quasinorm(p)? },
    })
}

/// `||x (x) y||_{p,inf} <= ||x||_p ||y||_{p,inf}`.
pub fn tensor_weak_bound(x: &StepFunction, y: &StepFunction, p: f64) -> Result<Bound> {
    Ok(Bound {
        lhs: x.tensor(y)?.lorentz_quasinorm(p)?,
        rhs: x.schatten_norm(p)? * y.lorentz_quasinorm(p)?,
    })
}
