//! A two-dimensional model of the Moyal plane.
//!
//! `U(s)` acts on `L_2(R^2)` by `(U(s) xi)(u) = e^{-(i/2)<s, theta u>} xi(u - s)`,
//! so `U(s) U(t) = e^{(i/2)<t, theta s>} U(s + t)`. A symbol `f` stands for
//! `x = (2 pi)^{-1/2} int f(s) U(s) ds`. With `theta = a S`, `a = sigma kappa^2`,
//! the Weyl operators `W(s) = e^{i(kappa s_2 X + sigma kappa s_1 P)}` on `L_2(R)`
//! satisfy the same relation, which gives the half-dimensional kernel
//! `K(u, v) = kappa^{-1} (F_2^{-1} f)(sigma (v - u) / kappa, kappa (u + v) / 2)`.
//!
//! Symbols and kernels live on a centered box `[-L/2, L/2)^2` sampled by a
//! [`GridSpec`]; shifts are cyclic, so identities hold up to wrap effects.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{ensure, invalid, Error, Result};
use crate::fourier::linear_convolution;
use crate::lattice::{mixed_cell_norm, Domain, GridSpec, OuterNorm, SampledFunction};
use crate::linalg::{CMatrix, DenseOperator, C64};
use crate::majorization::singular_step;

/// Quantization constant `(2 pi)^{-d/4}` at `d = 2`.
pub fn quantization_constant() -> f64 {
    (2.0 * PI).powf(-0.5)
}

const ANTISYM_TOL: f64 = 1e-12;

/// A real antisymmetric matrix with its block normal form.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaMatrix {
    theta: DMatrix<f64>,
}

/// `theta = Q_r N theta~ N Q_r^T`, where `Q_r` is the first `2r` columns of
/// `q`, `theta~` is block diagonal with blocks `S = ((0,-1),(1,0))`, and the
/// remaining columns of `q` span the kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalForm {
    pub q: DMatrix<f64>,
    /// diagonal of `N`, length `2r`
    pub scaling: Vec<f64>,
    pub canonical: DMatrix<f64>,
    pub kernel_dim: usize,
}

impl NormalForm {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let r2 = self.scaling.len();
        let qr = self.q.columns(0, r2);
        let n = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.scaling));
        qr * &n * &self.canonical * &n * qr.transpose()
    }
}

pub fn standard_symplectic() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
}

impl ThetaMatrix {
    pub fn new(theta: DMatrix<f64>) -> Result<Self> {
        ensure(theta.is_square() && theta.nrows() >= 1, || "theta must be square".into())?;
        ensure(theta.iter().all(|v| v.is_finite()), || "theta must be finite".into())?;
        let scale = theta.amax().max(1.0);
        ensure((&theta + theta.transpose()).amax() <= ANTISYM_TOL * scale, || "theta must be antisymmetric".into())?;
        Ok(Self { theta })
    }

    /// `a S` in two dimensions.
    pub fn planar(a: f64) -> Result<Self> {
        Self::new(standard_symplectic() * a)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.theta.nrows()
    }

    pub fn normal_form(&self) -> Result<NormalForm> {
        let d = self.dim();
        let tol = 1e-12 * self.theta.amax().max(f64::MIN_POSITIVE);
        let (q, t) = self.theta.clone().try_schur(f64::EPSILON, 10_000)
            .ok_or_else(|| Error::NumericalFailure("real Schur form did not converge".into()))?
            .unpack();
        let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
        let mut kernel = Vec::new();
        let mut i = 0;
        while i < d {
            if i + 1 < d && t[(i + 1, i)].abs() > tol {
                // block ((0, -b), (b, 0)) with b = t[(i+1, i)]; swap the pair if b < 0
                let b = t[(i + 1, i)];
                if b > 0.0 {
                    pairs.push((i, i + 1, b));
                } else {
                    pairs.push((i + 1, i, -b));
                }
                i += 2;
            } else {
                kernel.push(i);
                i += 1;
            }
        }
        let mut cols = Vec::with_capacity(d);
        let mut scaling = Vec::new();
        for (a, b, beta) in &pairs {
            cols.push(q.column(*a).into_owned());
            cols.push(q.column(*b).into_owned());
            scaling.extend([beta.sqrt(), beta.sqrt()]);
        }
        for k in &kernel {
            cols.push(q.column(*k).into_owned());
        }
        let q = DMatrix::from_columns(&cols);
        let r = pairs.len();
        let mut canonical = DMatrix::zeros(2 * r, 2 * r);
        for j in 0..r {
            canonical[(2 * j, 2 * j + 1)] = -1.0;
            canonical[(2 * j + 1, 2 * j)] = 1.0;
        }
        Ok(NormalForm { q, scaling, canonical, kernel_dim: kernel.len() })
    }
}

/// The model: `theta = a S` and a centered, even grid shared by symbols and
/// by the position space `L_2(R^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoyalPlane {
    a: f64,
    grid: GridSpec,
}

/// Boundary ring used for the decay warning: the outermost `L/8` of each side.
const BOUNDARY_FRACTION_OF_SIDE: f64 = 0.125;
/// Relative symbol mass in the boundary ring above which kernels are flagged.
pub const DECAY_WARNING_LEVEL: f64 = 1e-6;

impl MoyalPlane {
    pub fn new(theta: &ThetaMatrix, grid: GridSpec) -> Result<Self> {
        ensure(theta.dim() == 2, || "numerics need a 2x2 theta".into())?;
        let a = theta.matrix()[(1, 0)];
        ensure(a != 0.0, || "theta must be non-degenerate".into())?;
        ensure(grid.dim() == 2, || "the Moyal grid must be two-dimensional".into())?;
        ensure((grid.origin() + 0.5 * grid.side()).abs() <= 1e-12 * grid.side(), || "the Moyal grid must be centered".into())?;
        Ok(Self { a, grid })
    }

    pub fn planar(a: f64, side: f64, points: usize) -> Result<Self> {
        Self::new(&ThetaMatrix::planar(a)?, GridSpec::centered(2, side, points)?)
    }

    pub fn theta(&self) -> f64 {
        self.a
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// `<s, theta u>` for `theta = a S`.
    pub fn pairing(&self, s: [f64; 2], u: [f64; 2]) -> f64 {
        self.a * (s[1] * u[0] - s[0] * u[1])
    }

    pub fn symbol(&self, f: impl Fn(&[f64]) -> C64) -> Result<SampledFunction> {
        SampledFunction::from_fn(self.grid, Domain::Position, f)
    }

    fn check_symbol(&self, f: &SampledFunction) -> Result<()> {
        ensure(*f.grid() == self.grid && f.domain() == Domain::Position, || {
            "symbol must be position-sampled on the plane's grid".into()
        })
    }

    /// Grid steps of a lattice vector.
    pub fn lattice_steps(&self, v: [f64; 2]) -> Result<[i64; 2]> {
        let h = self.grid.spacing();
        let mut out = [0; 2];
        for k in 0..2 {
            let r = v[k] / h;
            if (r - r.round()).abs() > 1e-9 {
                return invalid(format!("vector component {} is not on the grid lattice", v[k]));
            }
            out[k] = r.round() as i64;
        }
        Ok(out)
    }

    fn shifted(&self, idx: usize, steps: [i64; 2]) -> usize {
        let n = self.grid.points() as i64;
        let a = self.grid.axes(idx);
        let w = |x: usize, s: i64| (x as i64 + s).rem_euclid(n) as usize;
        self.grid.flat([w(a[0], steps[0]), w(a[1], steps[1])])
    }

    /// Operator that maps `xi` to `u -> phase(u) xi(u + steps h)` (cyclically).
    fn shift_phase(&self, steps: [i64; 2], phase: impl Fn([f64; 2]) -> f64) -> Result<DenseOperator> {
        let n = self.grid.len();
        let mut m = CMatrix::zeros(n, n);
        for r in 0..n {
            m[(r, self.shifted(r, steps))] = C64::from_polar(1.0, phase(self.grid.position(r)));
        }
        DenseOperator::new(m, self.grid.cell_volume())
    }

    /// `U(s)` on the grid; `s` must lie on the lattice.
    pub fn u_matrix(&self, s: [f64; 2]) -> Result<DenseOperator> {
        let st = self.lattice_steps(s)?;
        self.shift_phase([-st[0], -st[1]], |u| -0.5 * self.pairing(s, u))
    }

    /// `D_k = M_{u_k}`.
    pub fn d_operator(&self, k: usize) -> Result<DenseOperator> {
        ensure(k < 2, || format!("axis {k} out of range"))?;
        let d: Vec<C64> = (0..self.grid.len()).map(|i| C64::new(self.grid.position(i)[k], 0.0)).collect();
        DenseOperator::diagonal(&d, self.grid.cell_volume())
    }

    /// `e^{i s D_k}`.
    pub fn d_exponential(&self, k: usize, s: f64) -> Result<DenseOperator> {
        ensure(k < 2, || format!("axis {k} out of range"))?;
        let d: Vec<C64> =
            (0..self.grid.len()).map(|i| C64::from_polar(1.0, s * self.grid.position(i)[k])).collect();
        DenseOperator::diagonal(&d, self.grid.cell_volume())
    }

    /// `V(t) = e^{i t_1 A_1} e^{i t_2 A_2}`, which commutes with every `U(s)` and
    /// conjugates `D_k` to `D_k + t_k`.
    pub fn translation_unitary(&self, t: [f64; 2]) -> Result<DenseOperator> {
        let st = self.lattice_steps(t)?;
        let a = self.a;
        let first = self.shift_phase([st[0], 0], |u| 0.5 * a * t[0] * u[1])?;
        let second = self.shift_phase([0, st[1]], |u| -0.5 * a * t[1] * u[0])?;
        first.compose(&second)
    }

    fn boundary_fraction(&self, f: &SampledFunction) -> f64 {
        let inner = 0.5 * self.grid.side() * (1.0 - 2.0 * BOUNDARY_FRACTION_OF_SIDE);
        let mut total = 0.0;
        let mut edge = 0.0;
        for (i, z) in f.values().iter().enumerate() {
            let p = self.grid.position(i);
            let m = z.norm_sqr();
            total += m;
            if p[0].abs() >= inner || p[1].abs() >= inner {
                edge += m;
            }
        }
        if total > 0.0 {
            edge / total
        } else {
            0.0
        }
    }

    /// Kernel of the half-dimensional representative of the quantized symbol.
    pub fn weyl_kernel(&self, f: &SampledFunction) -> Result<HalfDimKernel> {
        self.check_symbol(f)?;
        let n = self.grid.points();
        let h = self.grid.spacing();
        let sigma = self.a.signum();
        let kappa = self.a.abs().sqrt();
        let hx = kappa * h;
        let half = (n / 2) as i64;
        // table[m1][q] = (2 pi)^{-1/2} sum_{m2} f(m1, m2) e^{i s_2 w_q} h, w_q = kappa^2 h (q - n) / 2
        let s2: Vec<f64> = (0..n).map(|m| self.grid.origin() + m as f64 * h).collect();
        let scale = h / (2.0 * PI).sqrt();
        let phases: Vec<Vec<C64>> = (0..2 * n - 1)
            .into_par_iter()
            .map(|q| {
                let w = kappa * kappa * h * (q as f64 - n as f64) / 2.0;
                s2.iter().map(|s| C64::from_polar(scale, s * w)).collect()
            })
            .collect();
        let table: Vec<Vec<C64>> = (0..n)
            .into_par_iter()
            .map(|m1| {
                let row = &f.values()[m1 * n..(m1 + 1) * n];
                let nz: Vec<usize> = (0..n).filter(|&m| row[m].norm_sqr() != 0.0).collect();
                if nz.is_empty() {
                    return Vec::new();
                }
                phases.iter().map(|ph| nz.iter().map(|&m| row[m] * ph[m]).sum::<C64>()).collect()
            })
            .collect();
        let k = CMatrix::from_fn(n, n, |i, j| {
            let m1 = sigma as i64 * (j as i64 - i as i64) + half;
            if (0..n as i64).contains(&m1) && !table[m1 as usize].is_empty() {
                table[m1 as usize][i + j] / kappa
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let boundary = self.boundary_fraction(f);
        Ok(HalfDimKernel {
            op: DenseOperator::from_kernel(k, hx)?,
            trace_weight: self.a.abs(),
            boundary_fraction: boundary,
            accuracy_warning: boundary > DECAY_WARNING_LEVEL,
        })
    }

    /// Schatten norm for `tau_theta = |a| tr` on the half-dimensional kernel.
    pub fn tau_schatten_norm(&self, f: &SampledFunction, p: f64) -> Result<f64> {
        self.weyl_kernel(f)?.tau_schatten_norm(p)
    }

    /// `(2 pi)^{-1/2} ||f||_1`, the bound for `||x||_inf` from the integral representation.
    pub fn sup_norm_bound(&self, f: &SampledFunction) -> f64 {
        quantization_constant() * f.values().iter().map(|z| z.norm()).sum::<f64>() * self.grid.cell_volume()
    }

    /// Symbol of `d^alpha x`: multiplication by `s_1^{alpha_1} s_2^{alpha_2}`.
    pub fn symbol_derivative(&self, f: &SampledFunction, alpha: [u32; 2]) -> Result<SampledFunction> {
        self.check_symbol(f)?;
        let vals = f
            .values()
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let s = self.grid.position(i);
                z * s[0].powi(alpha[0] as i32) * s[1].powi(alpha[1] as i32)
            })
            .collect();
        SampledFunction::new(self.grid, Domain::Position, vals)
    }

    /// `sum_{n <= m} sum_{l_1..l_n} ||d_{l_1} ... d_{l_n} x||_p`, over ordered index words.
    pub fn sobolev_norm(&self, f: &SampledFunction, m: u32, p: f64) -> Result<f64> {
        let mut total = 0.0;
        for n in 0..=m {
            for a1 in 0..=n {
                let words = binomial(n, a1);
                total += words * self.tau_schatten_norm(&self.symbol_derivative(f, [a1, n - a1])?, p)?;
            }
        }
        Ok(total)
    }

    fn difference_index(&self, i: usize, j: usize) -> Option<usize> {
        let n = self.grid.points() as i64;
        let (a, b) = (self.grid.axes(i), self.grid.axes(j));
        let m0 = a[0] as i64 - b[0] as i64 + n / 2;
        let m1 = a[1] as i64 - b[1] as i64 + n / 2;
        ((0..n).contains(&m0) && (0..n).contains(&m1)).then(|| self.grid.flat([m0 as usize, m1 as usize]))
    }

    /// `(f *_theta g)(s) = (2 pi)^{-1/2} sum_t f(t) g(s - t) e^{-(i/2)<t, theta s>} h^2`,
    /// the symbol of the product of the quantizations (samples outside the box are zero).
    pub fn twisted_convolve(&self, f: &SampledFunction, g: &SampledFunction) -> Result<SampledFunction> {
        self.check_symbol(f)?;
        self.check_symbol(g)?;
        let len = self.grid.len();
        let c = quantization_constant() * self.grid.cell_volume();
        let vals: Vec<C64> = (0..len)
            .into_par_iter()
            .map(|si| {
                let s = self.grid.position(si);
                let mut acc = C64::new(0.0, 0.0);
                for ti in 0..len {
                    let fv = f.values()[ti];
                    if fv.norm_sqr() == 0.0 {
                        continue;
                    }
                    if let Some(di) = self.difference_index(si, ti) {
                        let t = self.grid.position(ti);
                        acc += fv * g.values()[di] * C64::from_polar(1.0, -0.5 * self.pairing(t, s));
                    }
                }
                acc * c
            })
            .collect();
        SampledFunction::new(self.grid, Domain::Position, vals)
    }

    /// `x g(-i grad_theta)` on `L_2(R^2)`: kernel
    /// `(2 pi)^{-1/2} f(t - s) g(s) e^{(i/2)<s, theta t>}`.
    pub fn product_kernel(&self, f: &SampledFunction, g: &SampledFunction) -> Result<DenseOperator> {
        self.weighted_kernel(f, |_| C64::new(1.0, 0.0), g)
    }

    /// `M_w x M_g` on `L_2(R^2)`.
    fn weighted_kernel(&self, f: &SampledFunction, w: impl Fn(usize) -> C64, g: &SampledFunction) -> Result<DenseOperator> {
        self.check_symbol(f)?;
        self.check_symbol(g)?;
        let c = quantization_constant();
        let len = self.grid.len();
        let k = CMatrix::from_fn(len, len, |ti, si| match self.difference_index(ti, si) {
            Some(di) => {
                let (t, s) = (self.grid.position(ti), self.grid.position(si));
                w(ti) * f.values()[di] * g.values()[si] * C64::from_polar(c, 0.5 * self.pairing(s, t))
            }
            None => C64::new(0.0, 0.0),
        });
        DenseOperator::from_kernel(k, self.grid.cell_volume())
    }

    /// Hilbert-Schmidt norm of [`Self::product_kernel`] without forming the matrix.
    pub fn product_hs_norm(&self, f: &SampledFunction, g: &SampledFunction) -> Result<f64> {
        self.check_symbol(f)?;
        self.check_symbol(g)?;
        let n = self.grid.points();
        let a: Vec<f64> = g.values().iter().map(|z| z.norm_sqr()).collect();
        let b: Vec<f64> = f.values().iter().map(|z| z.norm_sqr()).collect();
        let conv = linear_convolution(&a, &b, n, 2);
        // row t = i pairs with convolution index i + n/2 on each axis
        let m = 2 * n;
        let mut s = 0.0;
        for i0 in 0..n {
            for i1 in 0..n {
                s += conv[(i0 + n / 2) * m + i1 + n / 2].max(0.0);
            }
        }
        let h2 = self.grid.cell_volume();
        Ok((s * h2 * h2).sqrt() * quantization_constant())
    }

    /// `(1 + |u|^2)^{-alpha}` as a sample function on the plane.
    pub fn bessel_weight(&self, alpha: f64) -> Result<SampledFunction> {
        SampledFunction::from_real_fn(self.grid, Domain::Position, |u| (1.0 + u[0] * u[0] + u[1] * u[1]).powf(-alpha))
    }

    /// `(2 pi)^{-1} sum_u (1 + |u|^2)^{-2} h^2`, the box value of the Hoelder constant
    /// in the `k = 0`, `p = 1` resolvent bound (`1/2` on the whole plane).
    pub fn resolvent_base_constant(&self) -> f64 {
        let w = (0..self.grid.len())
            .map(|i| {
                let u = self.grid.position(i);
                (1.0 + u[0] * u[0] + u[1] * u[1]).powi(-2)
            })
            .sum::<f64>();
        w * self.grid.cell_volume() / (2.0 * PI)
    }

    pub fn sobolev_cwikel_ratio(&self, f: &SampledFunction, p: f64, mode: &CwikelMode) -> Result<CwikelRatio> {
        ensure(p > 0.0, || format!("exponent {p} must be positive"))?;
        match mode {
            CwikelMode::ResolventPower(k) => {
                let k = *k;
                let left = self.bessel_weight(-((k as f64 - 1.0) / 2.0 - 0.5))?;
                let right = self.bessel_weight((k as f64 + 1.0) / 2.0 + 0.5)?;
                let op = self.weighted_kernel(f, |i| left.values()[i], &right)?;
                let lhs = singular_step(&op)?.schatten_norm(p)?;
                let rhs = 2f64.powi(k as i32) * self.sobolev_norm(f, k, p)?;
                let reference = (k == 0 && p == 1.0).then(|| self.resolvent_base_constant());
                Ok(CwikelRatio::new(lhs, rhs, reference))
            }
            CwikelMode::WeakLattice(g) | CwikelMode::StrongLattice(g) => {
                ensure((1.0..=2.0).contains(&p), || format!("lattice modes need p in [1, 2], got {p}"))?;
                let weak = matches!(mode, CwikelMode::WeakLattice(_));
                let mu = singular_step(&self.product_kernel(f, g)?)?;
                let (lhs, outer) = if weak {
                    (mu.lorentz_quasinorm(p)?, OuterNorm::WeakLp(p))
                } else {
                    (mu.schatten_norm(p)?, OuterNorm::Lp(p))
                };
                let rhs = self.sobolev_norm(f, 2, p)? * mixed_cell_norm(g, f64::INFINITY, outer)?;
                Ok(CwikelRatio::new(lhs, rhs, None))
            }
            CwikelMode::InterpolationAbove2(g) => {
                ensure(p > 2.0, || format!("interpolation mode needs p > 2, got {p}"))?;
                let lhs = singular_step(&self.product_kernel(f, g)?)?.schatten_norm(p)?;
                let gp = (g.values().iter().map(|z| z.norm().powf(p)).sum::<f64>() * self.grid.cell_volume()).powf(1.0 / p);
                Ok(CwikelRatio::new(lhs, self.tau_schatten_norm(f, p)? * gp, None))
            }
        }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Half-dimensional representative of a quantized symbol.
#[derive(Clone, Debug)]
pub struct HalfDimKernel {
    pub op: DenseOperator,
    /// `tau_theta = trace_weight * tr`; equal to `|a|`, which is 1 for `theta = S`.
    pub trace_weight: f64,
    /// Share of `||f||_2^2` in the boundary ring of the box.
    pub boundary_fraction: f64,
    pub accuracy_warning: bool,
}

impl HalfDimKernel {
    pub fn tau_schatten_norm(&self, p: f64) -> Result<f64> {
        let norm = singular_step(&self.op)?.schatten_norm(p)?;
        Ok(if p.is_infinite() { norm } else { norm * self.trace_weight.powf(1.0 / p) })
    }
}

#[derive(Clone, Debug)]
pub enum CwikelMode {
    /// `||(1 - Delta)^{(k-1)/2 - 1/2} x (1 - Delta)^{-(k+1)/2 - 1/2}||_p / (2^k ||x||_{W^{k,p}})`
    ResolventPower(u32),
    /// `||x g||_{p,inf} / (||x||_{W^{2,p}} ||g||_{l_{p,inf}(L_inf)})`
    WeakLattice(SampledFunction),
    /// `||x g||_p / (||x||_{W^{2,p}} ||g||_{l_p(L_inf)})`
    StrongLattice(SampledFunction),
    /// `||x g||_p / (||x||_p ||g||_p)` for `p > 2`
    InterpolationAbove2(SampledFunction),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CwikelRatio {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Known constant the ratio is compared with, when one is available.
    pub reference: Option<f64>,
}

impl CwikelRatio {
    fn new(lhs: f64, rhs: f64, reference: Option<f64>) -> Self {
        Self { lhs, rhs, ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 }, reference }
    }
}
