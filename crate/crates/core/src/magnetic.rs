//! Landau levels of the two-dimensional magnetic Laplacian and a classical
//! eigenvalue-counting experiment.
//!
//! `-Delta_b` has eigenvalues `(2n + 1) b`; the eigenprojection `P_n` has kernel
//! `K_n(s, t) = (b / 2 pi) L_n(b |s - t|^2 / 2) e^{-b |s - t|^2 / 4 + i (b/2)(t_1 s_2 - t_2 s_1)}`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{ensure, invalid, Error, Result};
use crate::lattice::{Domain, GridSpec, SampledFunction};
use crate::linalg::{hermitian_eigen, CMatrix, C64};
use crate::majorization::{submajorizes, MajorizationVerdict};
use crate::quadrature::gauss_laguerre;
use crate::step::StepFunction;

/// `L_n(u)` by the three-term recurrence.
pub fn laguerre(n: usize, u: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 - u);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = ((2 * k + 1) as f64 - u) * cur / (k + 1) as f64 - k as f64 * prev / (k + 1) as f64;
        prev = cur;
        cur = next;
    }
    cur
}

/// Kernel of `P_n` with the symmetric-gauge phase `(b/2)(t_1 s_2 - t_2 s_1)`.
pub fn landau_kernel(n: usize, b: f64, s: [f64; 2], t: [f64; 2]) -> C64 {
    kernel_with_phase(n, b, s, t, 0.5 * b)
}

/// The kernel with the literal phase coefficient `2`; it agrees with
/// [`landau_kernel`] only at `b = 4`.
pub fn landau_kernel_verbatim(n: usize, b: f64, s: [f64; 2], t: [f64; 2]) -> C64 {
    kernel_with_phase(n, b, s, t, 2.0)
}

fn kernel_with_phase(n: usize, b: f64, s: [f64; 2], t: [f64; 2], phase: f64) -> C64 {
    let r2 = (s[0] - t[0]).powi(2) + (s[1] - t[1]).powi(2);
    let amp = b / (2.0 * PI) * laguerre(n, 0.5 * b * r2) * (-0.25 * b * r2).exp();
    C64::from_polar(amp, phase * (t[0] * s[1] - t[1] * s[0]))
}

/// Share of `int_0^inf L_n(u)^2 e^{-u} du = 1` beyond `u0`, exact by Gauss-Laguerre.
pub fn laguerre_tail(n: usize, u0: f64) -> Result<f64> {
    let (x, w) = gauss_laguerre(n + 2)?;
    Ok((-u0).exp() * x.iter().zip(&w).map(|(v, wt)| wt * laguerre(n, u0 + v).powi(2)).sum::<f64>())
}

/// Kernel mass allowed outside half the truncation radius.
pub const TAIL_MASS_LIMIT: f64 = 1e-8;

/// Smallest radius `r` with `|K_n(0, .)|^2` mass outside `r` below [`TAIL_MASS_LIMIT`] for all `n <= n_max`.
fn decay_radius(b: f64, n_max: usize) -> Result<f64> {
    let mut u0: f64 = 0.0;
    for n in 0..=n_max {
        while laguerre_tail(n, u0)? >= TAIL_MASS_LIMIT {
            u0 += 0.05;
        }
    }
    // u = b r^2 / 2
    Ok((2.0 * u0 / b).sqrt())
}

/// Field strength, level range and the midpoint grid on `[-R, R]^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LandauSpec {
    b: f64,
    n_max: usize,
    radius: f64,
    points: usize,
}

impl LandauSpec {
    /// Radius `max(12 / sqrt(b), 2 r)` with `r` the decay radius of the levels.
    pub fn new(b: f64, n_max: usize, points: usize) -> Result<Self> {
        ensure(b.is_finite() && b > 0.0, || format!("field strength {b} must be positive"))?;
        let radius = (12.0 / b.sqrt()).max(2.0 * decay_radius(b, n_max)?);
        Self::with_radius(b, n_max, radius, points)
    }

    pub fn with_radius(b: f64, n_max: usize, radius: f64, points: usize) -> Result<Self> {
        ensure(b.is_finite() && b > 0.0, || format!("field strength {b} must be positive"))?;
        ensure(points >= 2 && points.is_multiple_of(2), || format!("points {points} must be even"))?;
        let u0 = 0.5 * b * (0.5 * radius).powi(2);
        for n in 0..=n_max {
            let tail = laguerre_tail(n, u0)?;
            if tail >= TAIL_MASS_LIMIT {
                return invalid(format!("radius {radius} leaves kernel mass {tail:e} outside R/2 at level {n}"));
            }
        }
        Ok(Self { b, n_max, radius, points })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Cell-centred grid on `[-R, R]^2`.
    pub fn grid(&self) -> Result<GridSpec> {
        let h = 2.0 * self.radius / self.points as f64;
        GridSpec::with_origin(2, 2.0 * self.radius, self.points, -self.radius + 0.5 * h)
    }

    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Result<SampledFunction> {
        SampledFunction::from_real_fn(self.grid()?, Domain::Position, f)
    }

    /// Eigenvalue of level `n`.
    pub fn level(&self, n: usize) -> f64 {
        (2 * n + 1) as f64 * self.b
    }
}

fn check_on(spec: &LandauSpec, f: &SampledFunction) -> Result<GridSpec> {
    let grid = spec.grid()?;
    ensure(*f.grid() == grid && f.domain() == Domain::Position, || "f must be sampled on the spec's grid".into())?;
    Ok(grid)
}

fn kernel_block(n: usize, b: f64, grid: &GridSpec, rows: &[usize], cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols.len(), |i, j| landau_kernel(n, b, grid.position(rows[i]), grid.position(cols[j])))
}

fn inner_half(grid: &GridSpec, radius: f64) -> Vec<usize> {
    (0..grid.len())
        .filter(|&i| {
            let p = grid.position(i);
            p[0].abs() < 0.5 * radius && p[1].abs() < 0.5 * radius
        })
        .collect()
}

/// `||P_m P_n - delta_{mn} P_n||_2 / ||P_n||_2`, with the composition integrated
/// over the whole box and the outer variables restricted to `[-R/2, R/2]^2`.
pub fn projection_residual_pair(m: usize, n: usize, spec: &LandauSpec) -> Result<f64> {
    let grid = spec.grid()?;
    let all: Vec<usize> = (0..grid.len()).collect();
    let inner = inner_half(&grid, spec.radius);
    let w = grid.cell_volume();
    let left = kernel_block(m, spec.b, &grid, &inner, &all);
    let right = kernel_block(n, spec.b, &grid, &all, &inner);
    let prod = (&left * &right) * C64::new(w, 0.0);
    let target = kernel_block(n, spec.b, &grid, &inner, &inner);
    let num: f64 = if m == n {
        (&prod - &target).iter().map(|z| z.norm_sqr()).sum()
    } else {
        prod.iter().map(|z| z.norm_sqr()).sum()
    };
    let den: f64 = target.iter().map(|z| z.norm_sqr()).sum();
    Ok((num / den).sqrt())
}

pub fn projection_residual(n: usize, spec: &LandauSpec) -> Result<f64> {
    projection_residual_pair(n, n, spec)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparison {
    pub computed: f64,
    pub claimed: f64,
}

impl Comparison {
    pub fn relative_error(&self) -> f64 {
        if self.claimed == 0.0 {
            self.computed.abs()
        } else {
            (self.computed - self.claimed).abs() / self.claimed.abs()
        }
    }
}

/// `sum_t |sum_n c_n K_n(0, t)|^2 h^2` over the box.
fn inner_hs_sq(spec: &LandauSpec, coeffs: &[(usize, C64)]) -> Result<f64> {
    let grid = spec.grid()?;
    let w = grid.cell_volume();
    let terms: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let t = grid.position(i);
            coeffs.iter().map(|(n, c)| c * landau_kernel(*n, spec.b, [0.0, 0.0], t)).sum::<C64>().norm_sqr()
        })
        .collect();
    // sequential sum keeps the result independent of the thread schedule
    Ok(terms.iter().sum::<f64>() * w)
}

/// `||M_f P_n||_2` by quadrature against `(b / 2 pi)^{1/2} ||f||_2`.
///
/// `|K_n(s, t)|` depends on `s - t` only, so the four-dimensional integral
/// factors into `||f||_2^2` times a two-dimensional kernel integral.
pub fn mf_pn_hs(f: &SampledFunction, n: usize, spec: &LandauSpec) -> Result<Comparison> {
    check_on(spec, f)?;
    let fnorm = f.l2_norm();
    let inner = inner_hs_sq(spec, &[(n, C64::new(1.0, 0.0))])?;
    Ok(Comparison { computed: fnorm * inner.sqrt(), claimed: (spec.b / (2.0 * PI)).sqrt() * fnorm })
}

/// A function on the spectrum `{(2n+1) b}` with an atomic measure.
#[derive(Clone, Debug, PartialEq)]
pub struct NuFunction {
    values: Vec<C64>,
    atom_weight: f64,
}

impl NuFunction {
    /// Atom weight `b`, which makes the product Hilbert-Schmidt formula exact.
    pub fn new(values: Vec<C64>, spec: &LandauSpec) -> Result<Self> {
        Self::with_atom_weight(values, spec.b)
    }

    pub fn with_atom_weight(values: Vec<C64>, atom_weight: f64) -> Result<Self> {
        ensure(atom_weight.is_finite() && atom_weight > 0.0, || "atom weight must be positive".into())?;
        ensure(values.iter().all(|z| z.re.is_finite() && z.im.is_finite()), || "values must be finite".into())?;
        Ok(Self { values, atom_weight })
    }

    pub fn from_fn(spec: &LandauSpec, g: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..=spec.n_max).map(|n| C64::new(g(spec.level(n)), 0.0)).collect(), spec)
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn atom_weight(&self) -> f64 {
        self.atom_weight
    }

    pub fn rearrangement(&self) -> Result<StepFunction> {
        StepFunction::from_samples(self.values.iter().map(|z| (z.norm(), self.atom_weight)))
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.atom_weight).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NuFlavor {
    Strong(f64),
    Weak(f64),
}

pub fn nu_norm(g: &NuFunction, flavor: NuFlavor) -> Result<f64> {
    let mu = g.rearrangement()?;
    match flavor {
        NuFlavor::Strong(p) => mu.schatten_norm(p),
        NuFlavor::Weak(p) => mu.lorentz_quasinorm(p),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MagneticFlavor {
    HilbertSchmidt,
    Strong(f64),
    Weak(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MagneticCwikel {
    pub lhs: f64,
    pub rhs: f64,
    /// `mu^2(M_f g(-Delta_b)) << c mu^2(f (x) g)`: smallest `c` on the checked points
    pub submajorization: Option<MajorizationVerdict>,
}

impl MagneticCwikel {
    pub fn ratio(&self) -> f64 {
        if self.rhs > 0.0 {
            self.lhs / self.rhs
        } else {
            0.0
        }
    }
}

/// Largest Gram matrix accepted for the strong and weak flavors.
pub const MAX_SUPPORT_CELLS: usize = 4096;

/// Singular values of `M_f g(-Delta_b)` from the eigenvalues of
/// `M_f (sum_n |g_n|^2 P_n) M_f^*`, discretized on the support of `f`.
pub fn magnetic_singular_values(f: &SampledFunction, g: &NuFunction, spec: &LandauSpec) -> Result<StepFunction> {
    let grid = check_on(spec, f)?;
    let top = f.sup_norm();
    let support: Vec<usize> = (0..grid.len()).filter(|&i| f.values()[i].norm() > 1e-12 * top).collect();
    ensure(support.len() <= MAX_SUPPORT_CELLS, || {
        format!("f occupies {} cells; at most {MAX_SUPPORT_CELLS} are supported", support.len())
    })?;
    let w = grid.cell_volume();
    let weights: Vec<(usize, f64)> =
        g.values().iter().enumerate().map(|(n, z)| (n, z.norm_sqr())).filter(|(_, v)| *v > 0.0).collect();
    let fv: Vec<C64> = support.iter().map(|&i| f.values()[i]).collect();
    let gram = CMatrix::from_fn(support.len(), support.len(), |i, j| {
        let (s, t) = (grid.position(support[i]), grid.position(support[j]));
        let q: C64 = weights.iter().map(|(n, c)| landau_kernel(*n, spec.b, s, t) * *c).sum();
        fv[i] * q * fv[j].conj() * w
    });
    let (vals, _) = hermitian_eigen(&gram)?;
    StepFunction::from_samples(vals.into_iter().map(|v| (v.max(0.0).sqrt(), 1.0)))
}

/// `M_f g(-Delta_b)` against `f (x) g`.
///
/// The Hilbert-Schmidt flavor compares with `(2 pi)^{-1/2} ||f||_2 ||g||_{L_2(nu)}`.
/// The other flavors compare the Schatten or weak norm with the same norm of
/// `mu(f) (x) mu_nu(g)`, and report the submajorization constant relative to
/// `(2 pi)^{-1} mu^2(f (x) g)`.
pub fn magnetic_cwikel(f: &SampledFunction, g: &NuFunction, spec: &LandauSpec, flavor: MagneticFlavor) -> Result<MagneticCwikel> {
    check_on(spec, f)?;
    ensure(g.values().len() <= spec.n_max + 1, || "g has more levels than the spec".into())?;
    match flavor {
        MagneticFlavor::HilbertSchmidt => {
            let coeffs: Vec<(usize, C64)> = g.values().iter().copied().enumerate().collect();
            let lhs = f.l2_norm() * inner_hs_sq(spec, &coeffs)?.sqrt();
            Ok(MagneticCwikel { lhs, rhs: (2.0 * PI).powf(-0.5) * f.l2_norm() * g.l2_norm(), submajorization: None })
        }
        MagneticFlavor::Strong(p) | MagneticFlavor::Weak(p) => {
            let mu = magnetic_singular_values(f, g, spec)?;
            let tensor = f.rearrangement()?.tensor(&g.rearrangement()?)?;
            let (lhs, rhs) = match flavor {
                MagneticFlavor::Strong(_) => (mu.schatten_norm(p)?, tensor.schatten_norm(p)?),
                _ => (mu.lorentz_quasinorm(p)?, tensor.lorentz_quasinorm(p)?),
            };
            let reference = tensor.power(2.0)?.scale(1.0 / (2.0 * PI))?;
            let verdict = submajorizes(&reference, &mu.power(2.0)?, crate::cwikel::CONSTANT_GENERAL)?;
            Ok(MagneticCwikel { lhs, rhs, submajorization: Some(verdict) })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClrCount {
    pub n_negative: usize,
    /// `sum |V_-|^{3/2} h^3`
    pub bound_quantity: f64,
}

impl ClrCount {
    pub fn ratio(&self) -> f64 {
        if self.bound_quantity > 0.0 {
            self.n_negative as f64 / self.bound_quantity
        } else {
            0.0
        }
    }
}

/// A potential on the interior nodes of a cube `(0, L)^3` with Dirichlet walls.
#[derive(Clone, Debug, PartialEq)]
pub struct CubePotential {
    pub side: f64,
    pub per_axis: usize,
    pub values: Vec<f64>,
}

impl CubePotential {
    pub fn from_fn(side: f64, per_axis: usize, v: impl Fn([f64; 3]) -> f64) -> Result<Self> {
        ensure(side > 0.0 && per_axis >= 1, || "cube needs positive side and nodes".into())?;
        let h = side / (per_axis + 1) as f64;
        let node = |i: usize| (i + 1) as f64 * h;
        let n = per_axis;
        let values = (0..n * n * n).map(|idx| v([node(idx / (n * n)), node(idx / n % n), node(idx % n)])).collect();
        Ok(Self { side, per_axis, values })
    }

    pub fn spacing(&self) -> f64 {
        self.side / (self.per_axis + 1) as f64
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { values: self.values.iter().map(|v| v * c).collect(), ..self.clone() }
    }
}

/// Negative eigenvalues of the 7-point `-Delta + V` with Dirichlet walls.
pub fn clr_count(v: &CubePotential) -> Result<ClrCount> {
    let n = v.per_axis;
    let len = n * n * n;
    ensure(v.values.len() == len, || "potential has the wrong number of nodes".into())?;
    ensure(v.values.iter().all(|x| x.is_finite()), || "potential must be finite".into())?;
    let h = v.spacing();
    let inv = 1.0 / (h * h);
    let mut m = DMatrix::<f64>::zeros(len, len);
    for idx in 0..len {
        let (i, j, k) = (idx / (n * n), idx / n % n, idx % n);
        m[(idx, idx)] = 6.0 * inv + v.values[idx];
        let mut link = |other: usize| m[(idx, other)] = -inv;
        if i > 0 {
            link(idx - n * n);
        }
        if i + 1 < n {
            link(idx + n * n);
        }
        if j > 0 {
            link(idx - n);
        }
        if j + 1 < n {
            link(idx + n);
        }
        if k > 0 {
            link(idx - 1);
        }
        if k + 1 < n {
            link(idx + 1);
        }
    }
    let eig = m
        .try_symmetric_eigen(1e-14, 100_000)
        .ok_or_else(|| Error::NumericalFailure("symmetric eigenproblem did not converge".into()))?;
    let n_negative = eig.eigenvalues.iter().filter(|&&x| x < 0.0).count();
    let bound_quantity = v.values.iter().map(|x| (-x).max(0.0).powf(1.5)).sum::<f64>() * h.powi(3);
    Ok(ClrCount { n_negative, bound_quantity })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laguerre_sum(n: usize, u: f64) -> f64 {
        let mut s = 0.0;
        let mut binom = 1.0;
        let mut fact = 1.0;
        for m in 0..=n {
            if m > 0 {
                binom *= (n - m + 1) as f64 / m as f64;
                fact *= m as f64;
            }
            s += binom * (-u).powi(m as i32) / fact;
        }
        s
    }

    #[test]
    fn laguerre_values() {
        assert_eq!(laguerre(0, 3.0), 1.0);
        assert_eq!(laguerre(1, 3.0), -2.0);
        assert!((laguerre(2, 1.0) + 0.5).abs() < 1e-15);
        for n in 0..=10 {
            for k in 0..=40 {
                let u = -20.0 + k as f64;
                let (a, b) = (laguerre(n, u), laguerre_sum(n, u));
                assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "n {n} u {u}");
            }
        }
    }

    #[test]
    fn kernel_symmetry_and_diagonal() {
        let (s, t) = ([0.3, -1.2], [1.1, 0.4]);
        for n in 0..4 {
            assert!((landau_kernel(n, 1.5, s, t) - landau_kernel(n, 1.5, t, s).conj()).norm() < 1e-15);
            assert!((landau_kernel(n, 1.5, s, s).re - 1.5 / (2.0 * PI)).abs() < 1e-15);
        }
        assert!((landau_kernel(2, 4.0, s, t) - landau_kernel_verbatim(2, 4.0, s, t)).norm() < 1e-15);
    }

    #[test]
    fn default_radius_respects_tail() {
        let spec = LandauSpec::new(1.0, 4, 16).unwrap();
        assert!(spec.radius() > 12.0);
        assert!(LandauSpec::with_radius(1.0, 4, 12.0, 16).is_err());
        assert!(LandauSpec::new(1.0, 0, 16).unwrap().radius() >= 12.0);
    }

    #[test]
    fn single_level_reduces_to_projection_lemma() {
        let spec = LandauSpec::new(1.0, 3, 96).unwrap();
        let f = spec.sample(|s| (-(s[0] * s[0] + s[1] * s[1]) / 2.0).exp()).unwrap();
        let mut vals = vec![C64::new(0.0, 0.0); 4];
        vals[2] = C64::new(-3.0, 0.0);
        let g = NuFunction::new(vals, &spec).unwrap();
        let hs = magnetic_cwikel(&f, &g, &spec, MagneticFlavor::HilbertSchmidt).unwrap();
        let single = mf_pn_hs(&f, 2, &spec).unwrap();
        assert!((hs.lhs - 3.0 * single.computed).abs() < 1e-10 * hs.lhs);
        assert!((hs.lhs / hs.rhs - 1.0).abs() < 5e-3);
    }

    #[test]
    fn nu_norm_single_atom() {
        let g = NuFunction::with_atom_weight(vec![C64::new(2.0, 0.0)], 3.0).unwrap();
        assert!((nu_norm(&g, NuFlavor::Strong(2.0)).unwrap() - 3f64.sqrt() * 2.0).abs() < 1e-14);
    }

    #[test]
    fn clr_examples() {
        let calm = CubePotential::from_fn(4.0, 6, |_| 1.0).unwrap();
        assert_eq!(clr_count(&calm).unwrap().n_negative, 0);
        let well = CubePotential::from_fn(4.0, 8, |x| {
            let r2: f64 = x.iter().map(|c| (c - 2.0).powi(2)).sum();
            if r2 < 1.0 { -60.0 } else { 0.0 }
        })
        .unwrap();
        let c = clr_count(&well).unwrap();
        assert!(c.n_negative >= 1);
        let scaled = clr_count(&well.scale(4.0)).unwrap();
        assert!((scaled.bound_quantity / c.bound_quantity - 8.0).abs() < 1e-12);
    }
}
