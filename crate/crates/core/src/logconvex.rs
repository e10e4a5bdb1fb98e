//! The entropy-type simplex inequality and the logarithmic triangle
//! inequality for the weak `L_1` quasinorm.

use crate::error::{ensure, Result};
use crate::linalg::DenseOperator;
use crate::majorization::singular_step;

const SIMPLEX_TOL: f64 = 1e-12;

/// A point of the probability simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexPoint {
    a: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        ensure(!a.is_empty(), || "simplex point needs at least one coordinate".into())?;
        ensure(a.iter().all(|v| (0.0..=1.0).contains(v)), || "coordinates must lie in [0, 1]".into())?;
        let s: f64 = a.iter().sum();
        ensure((s - 1.0).abs() <= SIMPLEX_TOL, || format!("coordinates sum to {s}, not 1"))?;
        Ok(Self { a })
    }

    pub fn vertex(n: usize, i: usize) -> Result<Self> {
        let mut a = vec![0.0; n];
        if let Some(v) = a.get_mut(i) {
            *v = 1.0;
        }
        Self::new(a)
    }

    pub fn coords(&self) -> &[f64] {
        &self.a
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sides {
    pub lhs: f64,
    pub rhs: f64,
}

impl Sides {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12)
    }
}

/// `sum a_k log(e / a_k)` against `2 sum a_k (1 + log k)`, `k` from 1.
pub fn entropy_lagrange_check(a: &SimplexPoint) -> Sides {
    let lhs = a.a.iter().filter(|&&v| v > 0.0).map(|v| v * (1.0 - v.ln())).sum();
    let rhs = 2.0 * a.a.iter().enumerate().map(|(i, v)| v * (1.0 + ((i + 1) as f64).ln())).sum::<f64>();
    Sides { lhs, rhs }
}

/// `||x||_{1,inf}` from the singular values.
pub fn weak_l1_norm(x: &DenseOperator) -> Result<f64> {
    singular_step(x)?.lorentz_quasinorm(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogTriangle {
    /// `||sum x_k||_{1,inf}`
    pub lhs: f64,
    /// `4 sum ||x_k||_{1,inf} (1 + log k)` in the given order
    pub rhs_given: f64,
    /// the same after sorting by decreasing `||x_k||_{1,inf}`
    pub rhs_sorted: f64,
}

impl LogTriangle {
    pub fn given(&self) -> Sides {
        Sides { lhs: self.lhs, rhs: self.rhs_given }
    }

    pub fn sorted(&self) -> Sides {
        Sides { lhs: self.lhs, rhs: self.rhs_sorted }
    }
}

fn log_weighted(norms: &[f64]) -> f64 {
    4.0 * norms.iter().enumerate().map(|(i, v)| v * (1.0 + ((i + 1) as f64).ln())).sum::<f64>()
}

pub fn weak_l1_log_triangle(xs: &[DenseOperator]) -> Result<LogTriangle> {
    ensure(!xs.is_empty(), || "need at least one operator".into())?;
    let mut total = xs[0].clone();
    for x in &xs[1..] {
        total = total.add(x)?;
    }
    let mut norms = xs.iter().map(weak_l1_norm).collect::<Result<Vec<_>>>()?;
    let rhs_given = log_weighted(&norms);
    norms.sort_by(|a, b| b.total_cmp(a));
    Ok(LogTriangle { lhs: weak_l1_norm(&total)?, rhs_given, rhs_sorted: log_weighted(&norms) })
}
