//! Cwikel-type estimates for `M_f g(-i grad)` on grid models.
//!
//! The positive commuting model is `x = M_f`, `y = g(-i grad)` with `f, g >= 0`
//! sampled on a [`GridSpec`]. Spectral projections of both are then
//! indicator functions of the samples, so the dyadic pieces are exact.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use crate::error::{ensure, invalid, Error, Result};
use crate::fourier::fft_nd;
use crate::lattice::{
    cell_profile, classical_product, fourier_multiplier, mult_operator, phase_space_rearrangement, CellNormProfile,
    Domain, GridSpec, OuterNorm, SampledFunction,
};
use crate::linalg::{hermitian_eigen, spectral_sum, CMatrix, DenseOperator, C64};
use crate::majorization::{singular_step, submajorizes, MajorizationVerdict};
use crate::quadrature::integrate;
use crate::step::StepFunction;

/// Constant of the submajorization for positive compact inputs.
pub const CONSTANT_POSITIVE: f64 = 130.0;
/// Constant of the general submajorization.
pub const CONSTANT_GENERAL: f64 = 532.0;

const BOUND_RTOL: f64 = 1e-10;

/// Index `k` with `lambda` in `[2^k, 2^{k+1})`.
pub fn dyadic_band(lambda: f64) -> i32 {
    assert!(lambda > 0.0 && lambda.is_finite(), "dyadic band of {lambda}");
    let bits = lambda.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    if exp == 0 {
        // subnormal: fall back to log2 and fix up
        let mut k = lambda.log2().floor() as i32;
        while 2f64.powi(k) > lambda {
            k -= 1;
        }
        while 2f64.powi(k + 1) <= lambda {
            k += 1;
        }
        return k;
    }
    exp - 1023
}

/// Eigenvalues at most this fraction of the largest count as zero.
const ZERO_EIGEN_RTOL: f64 = 1e-12;

/// Spectral slices `x E_x[2^k, 2^{k+1})` of a positive semidefinite operator.
pub fn dyadic_slices(x: &DenseOperator) -> Result<BTreeMap<i32, DenseOperator>> {
    let (vals, vecs) = x.hermitian_eigen()?;
    let top = vals.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if let Some(&neg) = vals.iter().find(|&&v| v < -1e-10 * top.max(f64::MIN_POSITIVE)) {
        return invalid(format!("operator is not positive semidefinite (eigenvalue {neg})"));
    }
    let cut = ZERO_EIGEN_RTOL * top;
    let mut bands: Vec<i32> = vals.iter().filter(|&&v| v > cut).map(|&v| dyadic_band(v)).collect();
    bands.sort_unstable();
    bands.dedup();
    let mut out = BTreeMap::new();
    for k in bands {
        let m = spectral_sum(&vals, &vecs, |v| (v > cut && dyadic_band(v) == k).then_some(v));
        out.insert(k, DenseOperator::new(m, x.cell_weight())?);
    }
    Ok(out)
}

/// Positive commuting model with per-sample dyadic bands.
struct CommutingModel {
    grid: GridSpec,
    f: Vec<f64>,
    g: Vec<f64>,
    f_band: Vec<Option<i32>>,
    g_band: Vec<Option<i32>>,
}

fn real_nonnegative(s: &SampledFunction, name: &str) -> Result<Vec<f64>> {
    ensure(s.is_nonnegative(), || format!("{name} must be real and non-negative"))?;
    Ok(s.values().iter().map(|z| z.re).collect())
}

fn band_range(bands: &[Option<i32>]) -> Option<(i32, i32)> {
    let it = bands.iter().flatten();
    Some((*it.clone().min()?, *it.max()?))
}

impl CommutingModel {
    fn new(f: &SampledFunction, g: &SampledFunction) -> Result<Self> {
        ensure(f.domain() == Domain::Position && g.domain() == Domain::Frequency, || {
            "f must be position-sampled and g frequency-sampled".into()
        })?;
        ensure(f.grid() == g.grid(), || "f and g must share a grid".into())?;
        let fv = real_nonnegative(f, "f")?;
        let gv = real_nonnegative(g, "g")?;
        let band = |v: &f64| (*v > 0.0).then(|| dyadic_band(*v));
        Ok(Self {
            grid: *f.grid(),
            f_band: fv.iter().map(band).collect(),
            g_band: gv.iter().map(band).collect(),
            f: fv,
            g: gv,
        })
    }

    /// Circulant data of `(g chi_{band in sel})(-i grad)`.
    fn stencil(&self, sel: impl Fn(i32) -> bool) -> Vec<C64> {
        let mut c: Vec<C64> = self
            .g
            .iter()
            .zip(&self.g_band)
            .map(|(v, b)| if b.is_some_and(&sel) { C64::new(*v, 0.0) } else { C64::new(0.0, 0.0) })
            .collect();
        fft_nd(&mut c, self.grid.points(), self.grid.dim(), true);
        let norm = self.grid.len() as f64;
        c.iter_mut().for_each(|z| *z /= norm);
        c
    }

    fn circ(&self, r: usize, s: usize) -> usize {
        let n = self.grid.points();
        let (a, b) = (self.grid.axes(r), self.grid.axes(s));
        self.grid.flat([(a[0] + n - b[0]) % n, (a[1] + n - b[1]) % n])
    }

    /// Matrix whose row `i` is `f_i` times row `i` of the circulant picked for `i`.
    fn rows(&self, pick: impl Fn(usize) -> Option<usize>, stencils: &[Vec<C64>]) -> CMatrix {
        let n = self.grid.len();
        let mut m = CMatrix::zeros(n, n);
        for r in 0..n {
            if let Some(which) = pick(r) {
                let st = &stencils[which];
                for s in 0..n {
                    m[(r, s)] = st[self.circ(r, s)] * self.f[r];
                }
            }
        }
        m
    }

    fn x_slice(&self, k: i32) -> Result<DenseOperator> {
        let d: Vec<C64> = self
            .f
            .iter()
            .zip(&self.f_band)
            .map(|(v, b)| if *b == Some(k) { C64::new(*v, 0.0) } else { C64::new(0.0, 0.0) })
            .collect();
        DenseOperator::diagonal(&d, self.grid.cell_volume())
    }

    fn y_slice(&self, l: i32) -> Result<DenseOperator> {
        let vals =
            self.g.iter().zip(&self.g_band).map(|(v, b)| C64::new(if *b == Some(l) { *v } else { 0.0 }, 0.0)).collect();
        fourier_multiplier(&SampledFunction::new(self.grid, Domain::Frequency, vals)?)
    }

    /// `sum_{k+l >= n} ||x_k||_2^2 ||y_l||_2^2` with the phase-space widths.
    fn tail_mass(&self, n: i32) -> f64 {
        let mut fx: HashMap<i32, f64> = HashMap::new();
        let mut gy: HashMap<i32, f64> = HashMap::new();
        let wf = self.grid.cell_volume();
        let wg = self.grid.side().powi(-(self.grid.dim() as i32));
        for (v, b) in self.f.iter().zip(&self.f_band) {
            if let Some(k) = b {
                *fx.entry(*k).or_default() += v * v * wf;
            }
        }
        for (v, b) in self.g.iter().zip(&self.g_band) {
            if let Some(l) = b {
                *gy.entry(*l).or_default() += v * v * wg;
            }
        }
        let mut s = 0.0;
        for (k, a) in &fx {
            for (l, b) in &gy {
                if k + l >= n {
                    s += a * b;
                }
            }
        }
        s
    }
}

/// The split `x y = A_n + B_n` at one level.
#[derive(Clone, Debug)]
pub struct DyadicSplit {
    pub level: i32,
    pub x_slices: BTreeMap<i32, DenseOperator>,
    pub y_slices: BTreeMap<i32, DenseOperator>,
    /// `sum_{k+l<n} x_k y_l`
    pub a_n: DenseOperator,
    /// `sum_{k+l>=n} x_k y_l`
    pub b_n: DenseOperator,
}

impl DyadicSplit {
    /// `||A_n||_inf <= 2^{n+2}`.
    pub fn a_bound_holds(&self) -> Result<bool> {
        Ok(self.a_n.operator_norm()? <= 2f64.powi(self.level + 2) * (1.0 + BOUND_RTOL))
    }
}

/// `A_n` and `B_n` for `x = M_f`, `y = g(-i grad)` with `f, g >= 0`.
///
/// Both parts are assembled directly from their own slices; summing them back
/// is an independent check against [`classical_product`].
pub fn an_bn_split(f: &SampledFunction, g: &SampledFunction, n: i32) -> Result<DyadicSplit> {
    let model = CommutingModel::new(f, g)?;
    let mut x_slices = BTreeMap::new();
    let mut y_slices = BTreeMap::new();
    for k in model.f_band.iter().flatten().copied().collect::<std::collections::BTreeSet<_>>() {
        x_slices.insert(k, model.x_slice(k)?);
    }
    for l in model.g_band.iter().flatten().copied().collect::<std::collections::BTreeSet<_>>() {
        y_slices.insert(l, model.y_slice(l)?);
    }
    let dim = model.grid.len();
    let w = model.grid.cell_volume();
    let mut a = CMatrix::zeros(dim, dim);
    let mut b = CMatrix::zeros(dim, dim);
    for (k, xk) in &x_slices {
        for (l, yl) in &y_slices {
            let prod = xk.entries() * yl.entries();
            if k + l < n {
                a += prod;
            } else {
                b += prod;
            }
        }
    }
    Ok(DyadicSplit {
        level: n,
        x_slices,
        y_slices,
        a_n: DenseOperator::new(a, w)?,
        b_n: DenseOperator::new(b, w)?,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelCheck {
    pub level: i32,
    pub a_norm: f64,
    /// `2^{n+2}`
    pub a_bound: f64,
    pub b_hs_sq: f64,
    /// `||(x (x) y) E_{x (x) y}[2^n, inf)||_2^2` from the phase-space rearrangement
    pub b_bound: f64,
    /// `sum_{k+l>=n} ||x_k||^2 ||y_l||^2`, which the grid HS identity makes equal to `b_hs_sq`
    pub b_slice_sum: f64,
    pub reconstruction_error: f64,
}

impl LevelCheck {
    pub fn holds(&self) -> bool {
        self.a_norm <= self.a_bound * (1.0 + BOUND_RTOL)
            && self.b_hs_sq <= self.b_bound * (1.0 + BOUND_RTOL) + 1e-300
            && self.reconstruction_error <= 1e-10
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalCheck {
    /// `m = k + l`
    pub m: i32,
    pub norm: f64,
    /// `2^{m+2}`
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DyadicReport {
    pub levels: Vec<LevelCheck>,
    pub diagonals: Vec<DiagonalCheck>,
}

impl DyadicReport {
    pub fn all_hold(&self) -> bool {
        self.levels.iter().all(LevelCheck::holds)
            && self.diagonals.iter().all(|d| d.norm <= d.bound * (1.0 + BOUND_RTOL))
            && self.series_bounds_hold()
    }

    /// `sum_{m<n} ||sum_{k+l=m} x_k y_l|| <= 2^{n+2}` for every checked level.
    pub fn series_bounds_hold(&self) -> bool {
        self.levels.iter().all(|lv| {
            let s: f64 = self.diagonals.iter().filter(|d| d.m < lv.level).map(|d| d.norm).sum();
            s <= lv.a_bound * (1.0 + BOUND_RTOL)
        })
    }
}

/// Checks the `A_n` / `B_n` bounds at every level where the split is non-trivial.
pub fn dyadic_bounds(f: &SampledFunction, g: &SampledFunction) -> Result<DyadicReport> {
    let model = CommutingModel::new(f, g)?;
    let (Some((kmin, kmax)), Some((lmin, lmax))) = (band_range(&model.f_band), band_range(&model.g_band)) else {
        return Ok(DyadicReport { levels: vec![], diagonals: vec![] });
    };
    let full = classical_product(f, g)?;
    let full_norm = full.frobenius_norm();
    let mu_sq = phase_space_rearrangement(f, g)?.power(2.0)?;

    // stencils of g chi_{band < j} and g chi_{band >= j}, j = lmin ..= lmax + 1
    let js: Vec<i32> = (lmin..=lmax + 1).collect();
    let below: Vec<Vec<C64>> = js.iter().map(|&j| model.stencil(|l| l < j)).collect();
    let above: Vec<Vec<C64>> = js.iter().map(|&j| model.stencil(|l| l >= j)).collect();
    let exact: Vec<Vec<C64>> = (lmin..=lmax).map(|l| model.stencil(|b| b == l)).collect();
    let slot = |j: i32| (j.clamp(lmin, lmax + 1) - lmin) as usize;
    let w = model.grid.cell_volume();

    let mut levels = Vec::new();
    for n in (kmin + lmin)..=(kmax + lmax + 1) {
        let a = model.rows(|r| model.f_band[r].map(|k| slot(n - k)), &below);
        let b = model.rows(|r| model.f_band[r].map(|k| slot(n - k)), &above);
        let recon = (&a + &b - full.entries()).norm() / full_norm.max(f64::MIN_POSITIVE);
        let a_op = DenseOperator::new(a, w)?;
        let b_op = DenseOperator::new(b, w)?;
        let threshold = 2f64.powi(n);
        let b_bound: f64 = mu_sq
            .segments()
            .filter(|(v, _)| v.sqrt() >= threshold * (1.0 - 1e-15))
            .map(|(v, wd)| v * wd)
            .sum();
        levels.push(LevelCheck {
            level: n,
            a_norm: a_op.operator_norm()?,
            a_bound: 4.0 * threshold,
            b_hs_sq: b_op.frobenius_norm().powi(2),
            b_bound,
            b_slice_sum: model.tail_mass(n),
            reconstruction_error: recon,
        });
    }

    let mut diagonals = Vec::new();
    for m in (kmin + lmin)..=(kmax + lmax) {
        let pick = |r: usize| {
            let k = model.f_band[r]?;
            let l = m - k;
            (lmin..=lmax).contains(&l).then(|| (l - lmin) as usize)
        };
        let s = DenseOperator::new(model.rows(pick, &exact), w)?;
        diagonals.push(DiagonalCheck { m, norm: s.operator_norm()?, bound: 2f64.powi(m + 2) });
    }
    Ok(DyadicReport { levels, diagonals })
}

fn submajorization(f: &SampledFunction, g: &SampledFunction, slack: f64) -> Result<MajorizationVerdict> {
    let lhs = singular_step(&classical_product(f, g)?)?.power(2.0)?;
    let rhs = phase_space_rearrangement(f, g)?.power(2.0)?;
    submajorizes(&rhs, &lhs, slack)
}

/// `mu^2(M_f g(-i grad)) <<  532 mu^2(f (x) g)`.
pub fn check_submajorization_532(f: &SampledFunction, g: &SampledFunction) -> Result<MajorizationVerdict> {
    submajorization(f, g, CONSTANT_GENERAL)
}

/// The constant-130 variant; `f` and `g` must be non-negative.
pub fn check_submajorization_130(f: &SampledFunction, g: &SampledFunction) -> Result<MajorizationVerdict> {
    ensure(f.is_nonnegative() && g.is_nonnegative(), || "the constant-130 check needs non-negative inputs".into())?;
    submajorization(f, g, CONSTANT_POSITIVE)
}

/// `||M_f g(-i grad)||_p / ||f (x) g||_p` for `p > 2`, to compare with 532.
pub fn schatten_ratio_large_p(f: &SampledFunction, g: &SampledFunction, p: f64) -> Result<f64> {
    ensure(p > 2.0, || format!("exponent {p} must exceed 2"))?;
    let lhs = singular_step(&classical_product(f, g)?)?.schatten_norm(p)?;
    let rhs = phase_space_rearrangement(f, g)?.schatten_norm(p)?;
    Ok(if rhs > 0.0 { lhs / rhs } else { 0.0 })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionCheck {
    pub holds: bool,
    /// Smallest eigenvalue of `E_{x (x) y}[2^n, inf) - sum_{k+l>=n} E_x^k (x) E_y^l`.
    pub min_eigenvalue: f64,
}

/// Verifies `E_{x (x) y}[2^n, inf) >= sum_{k+l>=n} E_x[2^k,2^{k+1}) (x) E_y[2^l,2^{l+1})`
/// for positive semidefinite `x`, `y`, as a matrix inequality on the tensor product.
pub fn projection_inequality_check(x: &DenseOperator, y: &DenseOperator, n: i32) -> Result<ProjectionCheck> {
    let (xv, xe) = x.hermitian_eigen()?;
    let (yv, ye) = y.hermitian_eigen()?;
    let pos = |v: &[f64]| {
        let top = v.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        move |lam: f64| lam > ZERO_EIGEN_RTOL * top
    };
    let (px, py) = (pos(&xv), pos(&yv));
    if xv.iter().chain(&yv).any(|&v| v < -1e-10) {
        return invalid("projection check needs positive semidefinite operators");
    }
    let kron = x.kron(y);
    let (tv, te) = hermitian_eigen(kron.entries())?;
    let thr = 2f64.powi(n);
    let lhs = spectral_sum(&tv, &te, |lam| (lam >= thr * (1.0 - 1e-12)).then_some(1.0));
    let bands = |vals: &[f64], keep: &dyn Fn(f64) -> bool| -> Vec<i32> {
        let mut b: Vec<i32> = vals.iter().filter(|&&v| keep(v)).map(|&v| dyadic_band(v)).collect();
        b.sort_unstable();
        b.dedup();
        b
    };
    let mut rhs = CMatrix::zeros(kron.nrows(), kron.ncols());
    for k in bands(&xv, &px) {
        let ek = spectral_sum(&xv, &xe, |v| (px(v) && dyadic_band(v) == k).then_some(1.0));
        for l in bands(&yv, &py) {
            if k + l >= n {
                let el = spectral_sum(&yv, &ye, |v| (py(v) && dyadic_band(v) == l).then_some(1.0));
                rhs += ek.kronecker(&el);
            }
        }
    }
    let (dv, _) = hermitian_eigen(&(lhs - rhs))?;
    let min = dv.first().copied().unwrap_or(0.0);
    Ok(ProjectionCheck { holds: min >= -1e-9, min_eigenvalue: min })
}

/// Smooth plateau: 1 on `[-1, 1]`, 0 outside `(-3, 3)`, `C^inf` in between.
pub fn bump(v: f64) -> f64 {
    let s = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let a = v.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 3.0 {
        0.0
    } else {
        let (p, q) = (s(3.0 - a), s(a - 1.0));
        p / (p + q)
    }
}

/// Midpoint samples of a function on `[0,1]^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeSamples {
    pub dim: usize,
    pub per_axis: usize,
    pub values: Vec<f64>,
}

impl CubeSamples {
    pub fn from_fn(dim: usize, per_axis: usize, h: impl Fn(&[f64]) -> f64) -> Result<Self> {
        ensure(dim == 1 || dim == 2, || format!("dimension {dim} not supported"))?;
        ensure(per_axis >= 1, || "need at least one sample per axis".into())?;
        let m = per_axis;
        let node = |i: usize| (i as f64 + 0.5) / m as f64;
        let values = (0..m.pow(dim as u32))
            .map(|i| if dim == 1 { h(&[node(i)]) } else { h(&[node(i / m), node(i % m)]) })
            .collect();
        Ok(Self { dim, per_axis, values })
    }

    fn node(&self, idx: usize) -> [f64; 2] {
        let m = self.per_axis;
        let c = |i: usize| (i as f64 + 0.5) / m as f64;
        if self.dim == 1 {
            [c(idx), 0.0]
        } else {
            [c(idx / m), c(idx % m)]
        }
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() / (self.per_axis.pow(self.dim as u32)) as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourierCoeffBound {
    /// `sum_k |psi_hat(k)|^p`
    pub lp_power_sum: f64,
    pub h_l1: f64,
    /// `lp_power_sum / ||h||_1^p`, the scale-invariant form
    pub ratio: f64,
}

/// Fourier coefficients of `psi = bump * F^{-1} h` on `[-pi, pi]^d`.
///
/// `modes` points per axis are used on the torus; `F^{-1} h` is evaluated by
/// the midpoint rule on the samples of `h`.
pub fn fourier_coeff_lemma(h: &CubeSamples, p: f64, modes: usize) -> Result<FourierCoeffBound> {
    ensure(p > 0.0 && p <= 2.0, || format!("exponent {p} must lie in (0, 2]"))?;
    ensure(modes >= 8 && modes.is_multiple_of(2), || "need an even number (>= 8) of torus points".into())?;
    let d = h.dim;
    let total = modes.pow(d as u32);
    let cell = 1.0 / (h.per_axis.pow(d as u32)) as f64;
    let pref = (2.0 * PI).powf(-(d as f64) / 2.0) * cell;
    let u_of = |i: usize| -PI + 2.0 * PI * i as f64 / modes as f64;
    let mut psi: Vec<C64> = (0..total)
        .map(|idx| {
            let u = if d == 1 { [u_of(idx), 0.0] } else { [u_of(idx / modes), u_of(idx % modes)] };
            let phi: f64 = (0..d).map(|a| bump(u[a])).product();
            if phi == 0.0 {
                return C64::new(0.0, 0.0);
            }
            let mut acc = C64::new(0.0, 0.0);
            for (j, hv) in h.values.iter().enumerate() {
                if *hv != 0.0 {
                    let x = h.node(j);
                    let phase: f64 = (0..d).map(|a| x[a] * u[a]).sum();
                    acc += C64::from_polar(*hv, phase);
                }
            }
            acc * pref * phi
        })
        .collect();
    fft_nd(&mut psi, modes, d, false);
    let sum: f64 = psi.iter().map(|z| (z.norm() / total as f64).powf(p)).sum();
    let l1 = h.l1_norm();
    Ok(FourierCoeffBound { lp_power_sum: sum, h_l1: l1, ratio: if l1 > 0.0 { sum / l1.powf(p) } else { 0.0 } })
}

fn support_in_unit_cube(s: &SampledFunction) -> bool {
    let grid = s.grid();
    let d = grid.dim();
    s.values().iter().enumerate().all(|(i, z)| {
        if z.norm() == 0.0 {
            return true;
        }
        let (p, w) = match s.domain() {
            Domain::Position => (grid.position(i), grid.spacing()),
            Domain::Frequency => (grid.frequency(i), grid.freq_spacing()),
        };
        (0..d).all(|a| p[a] >= -1e-12 && p[a] + w <= 1.0 + 1e-12)
    })
}

/// `||M_f g(-i grad)||_p / (||f||_2 ||g||_2)` for `f`, `g` supported in the unit cube.
pub fn compact_support_ratio(f: &SampledFunction, g: &SampledFunction, p: f64) -> Result<f64> {
    ensure(p > 0.0 && p <= 2.0, || format!("exponent {p} must lie in (0, 2]"))?;
    ensure(support_in_unit_cube(f) && support_in_unit_cube(g), || "f and g must be supported in [0,1]^d".into())?;
    let denom = f.l2_norm() * g.l2_norm();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(singular_step(&classical_product(f, g)?)?.schatten_norm(p)? / denom)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Strong,
    Weak,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormRatio {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl NormRatio {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 } }
    }
}

/// Singular values and unit-cell `L_2` profiles of one `(f, g)` pair, reused
/// across exponents and flavors.
#[derive(Clone, Debug)]
pub struct SmallPInstance {
    pub mu: StepFunction,
    pub f_cells: CellNormProfile,
    pub g_cells: CellNormProfile,
}

impl SmallPInstance {
    pub fn new(f: &SampledFunction, g: &SampledFunction) -> Result<Self> {
        Ok(Self {
            mu: singular_step(&classical_product(f, g)?)?,
            f_cells: cell_profile(f, 2.0)?,
            g_cells: cell_profile(g, 2.0)?,
        })
    }

    pub fn ratio(&self, p: f64, flavor: Flavor) -> Result<NormRatio> {
        ensure(p > 0.0 && p < 2.0, || format!("exponent {p} must lie in (0, 2)"))?;
        let (lhs, outer) = match flavor {
            Flavor::Strong => (self.mu.schatten_norm(p)?, OuterNorm::Lp(p)),
            Flavor::Weak => (self.mu.lorentz_quasinorm(p)?, OuterNorm::WeakLp(p)),
        };
        Ok(NormRatio::new(lhs, self.f_cells.tensor_outer_norm(&self.g_cells, outer)?))
    }
}

/// `||M_f g(-i grad)||_{p}` (or weak) against `||f (x) g||_{l_p(L_2)}` (or weak).
pub fn cwikel_small_p(f: &SampledFunction, g: &SampledFunction, p: f64, flavor: Flavor) -> Result<NormRatio> {
    SmallPInstance::new(f, g)?.ratio(p, flavor)
}

/// `||M_f g(-i grad)||_{2,inf}` against `||f||_{2,log(L_inf)} ||g||_{l_{2,inf}(L_4)}`.
pub fn weak_l2_positive(f: &SampledFunction, g: &SampledFunction) -> Result<NormRatio> {
    let lhs = singular_step(&classical_product(f, g)?)?.lorentz_quasinorm(2.0)?;
    let rf = cell_profile(f, f64::INFINITY)?.outer_norm(OuterNorm::L2Log)?;
    let rg = cell_profile(g, 4.0)?.outer_norm(OuterNorm::WeakLp(2.0))?;
    Ok(NormRatio::new(lhs, rf * rg))
}

/// `t^{-1/2} |log t|^{-1}` on `(eps, 1/2)`, zero elsewhere.
pub fn counterexample_profile(t: f64, eps: f64) -> f64 {
    if t > eps && t < 0.5 {
        1.0 / (t.sqrt() * t.ln().abs())
    } else {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CounterexampleRow {
    pub cutoff: f64,
    /// `int int_{t >= 2s; s,t in (eps,1/2)} dt ds / (t s log^2 t)`
    pub truncated_double_integral: f64,
    /// `||f_eps||_2^2`
    pub norm_sq: f64,
    pub grid_points: usize,
    /// `||M_f (1 - Delta)^{-1/4}||_4^4` on the grid
    pub truncated_schatten4_pow4: f64,
}

/// Box side of the counterexample grid.
pub const COUNTEREXAMPLE_SIDE: f64 = 8.0;

fn check_cutoff(eps: f64) -> Result<()> {
    ensure(eps > 0.0 && eps < 0.5, || format!("cutoff {eps} must lie in (0, 1/2)"))
}

/// The truncated lower-bound integral by nested adaptive quadrature in `log t`, `log s`.
pub fn truncated_double_integral(eps: f64) -> Result<f64> {
    check_cutoff(eps)?;
    let (lo, hi) = ((2.0 * eps).ln(), 0.5f64.ln());
    if lo >= hi {
        return Ok(0.0);
    }
    let mut inner_err: Option<Error> = None;
    // variables a = log t, b = log s; dt ds / (t s) = da db
    let outer = integrate(
        |a| {
            let inner = integrate(|_| 1.0, eps.ln(), a - 2f64.ln(), 1e-13, 0.0);
            match inner {
                Ok(v) => v / (a * a),
                Err(e) => {
                    inner_err.get_or_insert(e);
                    0.0
                }
            }
        },
        lo,
        hi,
        1e-12,
        0.0,
    )?;
    match inner_err {
        Some(e) => Err(e),
        None => Ok(outer),
    }
}

/// `||f_eps||_2^2` by adaptive quadrature in `log t`.
pub fn counterexample_norm_sq(eps: f64) -> Result<f64> {
    check_cutoff(eps)?;
    integrate(|a: f64| 1.0 / (a * a), eps.ln(), 0.5f64.ln(), 1e-13, 0.0)
}

/// `||M_f (1 - Delta)^{-1/4}||_4^4 = ||M_f (1 - Delta)^{-1/2} M_f||_2^2` on a
/// cell-centred grid of `points` nodes over `[-L/2, L/2)`.
pub fn counterexample_schatten4(eps: f64, points: usize) -> Result<f64> {
    check_cutoff(eps)?;
    let side = COUNTEREXAMPLE_SIDE;
    let h = side / points as f64;
    let grid = GridSpec::with_origin(1, side, points, -0.5 * side + 0.5 * h)?;
    let f = SampledFunction::from_real_fn(grid, Domain::Position, |x| counterexample_profile(x[0], eps))?;
    let sym = SampledFunction::from_real_fn(grid, Domain::Frequency, |xi| (1.0 + xi[0] * xi[0]).powf(-0.5))?;
    let mut c = sym.values().to_vec();
    fft_nd(&mut c, points, 1, true);
    let c2: Vec<f64> = c.iter().map(|z| (z / points as f64).norm_sqr()).collect();
    let f2: Vec<f64> = f.values().iter().map(|z| z.norm_sqr()).collect();
    // sum_{j,l} |f_j|^2 |f_l|^2 |c_{j-l}|^2 via a cyclic convolution
    let mut a: Vec<C64> = f2.iter().map(|v| C64::new(*v, 0.0)).collect();
    let mut b: Vec<C64> = c2.iter().map(|v| C64::new(*v, 0.0)).collect();
    fft_nd(&mut a, points, 1, false);
    fft_nd(&mut b, points, 1, false);
    let mut conv: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    fft_nd(&mut conv, points, 1, true);
    Ok(f2.iter().zip(&conv).map(|(fj, cj)| fj * cj.re / points as f64).sum())
}

pub fn counterexample_scan(cutoffs: &[f64], grids: &[usize]) -> Result<Vec<CounterexampleRow>> {
    ensure(cutoffs.len() == grids.len(), || "cutoffs and grids must pair up".into())?;
    cutoffs
        .iter()
        .zip(grids)
        .map(|(&eps, &n)| {
            Ok(CounterexampleRow {
                cutoff: eps,
                truncated_double_integral: truncated_double_integral(eps)?,
                norm_sq: counterexample_norm_sq(eps)?,
                grid_points: n,
                truncated_schatten4_pow4: counterexample_schatten4(eps, n)?,
            })
        })
        .collect()
}

/// Diagonal operator helper for the positive commuting model.
pub fn positive_model(f: &SampledFunction, g: &SampledFunction) -> Result<(DenseOperator, DenseOperator)> {
    Ok((mult_operator(f)?, fourier_multiplier(g)?))
}
