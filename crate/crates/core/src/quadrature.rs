//! One-dimensional quadrature rules.

use nalgebra::DMatrix;

use crate::error::{ensure, Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) on a finite interval.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    ensure(a.is_finite() && b.is_finite(), || "integration limits must be finite".into())?;
    if a == b {
        return Ok(0.0);
    }
    let mut stack = vec![(a, b, gk15(&mut f, a, b))];
    let mut total = 0.0;
    let mut evaluations = 0usize;
    while let Some((lo, hi, (val, err))) = stack.pop() {
        let budget = abs_tol.max(rel_tol * val.abs()) * ((hi - lo) / (b - a)).abs().sqrt();
        if err <= budget || (hi - lo).abs() < 1e-14 * (b - a).abs() {
            total += val;
            continue;
        }
        evaluations += 1;
        if evaluations > 200_000 {
            return Err(Error::NumericalFailure("adaptive quadrature exceeded its subdivision budget".into()));
        }
        let mid = 0.5 * (lo + hi);
        stack.push((lo, mid, gk15(&mut f, lo, mid)));
        stack.push((mid, hi, gk15(&mut f, mid, hi)));
    }
    if !total.is_finite() {
        return Err(Error::NumericalFailure("quadrature produced a non-finite value".into()));
    }
    Ok(total)
}

fn golub_welsch(diag: &[f64], off: &[f64], mu0: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        j[(i, i)] = diag[i];
        if i + 1 < n {
            j[(i, i + 1)] = off[i];
            j[(i + 1, i)] = off[i];
        }
    }
    let eig = j
        .try_symmetric_eigen(f64::EPSILON, 100_000)
        .ok_or_else(|| Error::NumericalFailure("Golub-Welsch eigenproblem did not converge".into()))?;
    let mut pairs: Vec<(f64, f64)> =
        (0..n).map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

/// Nodes and weights for `int_0^inf f(x) e^{-x} dx`.
pub fn gauss_laguerre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    ensure(n >= 1, || "need at least one node".into())?;
    let diag: Vec<f64> = (0..n).map(|k| (2 * k + 1) as f64).collect();
    let off: Vec<f64> = (1..n).map(|k| k as f64).collect();
    golub_welsch(&diag, &off, 1.0)
}

/// Nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    ensure(n >= 1, || "need at least one node".into())?;
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n).map(|k| k as f64 / ((4 * k * k - 1) as f64).sqrt()).collect();
    golub_welsch(&diag, &off, 2.0)
}
