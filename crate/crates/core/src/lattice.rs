//! Grid discretizations of `M_f g(-i grad)` on a periodic box.
//!
//! Samples are row-major with the first axis slowest. Position samples sit at
//! `origin + j h` and stand for the cell `[x_j, x_j + h)^d`. Frequency
//! samples are stored in FFT order, index `k` meaning `2 pi k / L` with `k`
//! wrapped into `[-N/2, N/2)`, and stand for `[xi_k, xi_k + 2 pi / L)^d`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{ensure, invalid, Result};
use crate::fourier::fft_nd;
use crate::linalg::{CMatrix, DenseOperator, C64};
use crate::step::StepFunction;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    dim: usize,
    side: f64,
    points: usize,
    origin: f64,
}

impl GridSpec {
    pub fn with_origin(dim: usize, side: f64, points: usize, origin: f64) -> Result<Self> {
        ensure(dim == 1 || dim == 2, || format!("dimension {dim} not supported (1 or 2)"))?;
        ensure(side.is_finite() && side > 0.0, || format!("box side {side} must be positive"))?;
        ensure(points >= 2 && points.is_multiple_of(2), || format!("points per axis {points} must be even and >= 2"))?;
        ensure(origin.is_finite(), || "origin must be finite".into())?;
        Ok(Self { dim, side, points, origin })
    }

    /// Box `[0, L)^d`.
    pub fn periodic(dim: usize, side: f64, points: usize) -> Result<Self> {
        Self::with_origin(dim, side, points, 0.0)
    }

    /// Box `[-L/2, L/2)^d`.
    pub fn centered(dim: usize, side: f64, points: usize) -> Result<Self> {
        Self::with_origin(dim, side, points, -0.5 * side)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.side / self.points as f64
    }

    pub fn freq_spacing(&self) -> f64 {
        2.0 * PI / self.side
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn freq_cell_volume(&self) -> f64 {
        self.freq_spacing().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Per-axis indices of a flat index.
    pub fn axes(&self, idx: usize) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.points, idx % self.points]
        }
    }

    pub fn flat(&self, axes: [usize; 2]) -> usize {
        if self.dim == 1 {
            axes[0]
        } else {
            axes[0] * self.points + axes[1]
        }
    }

    pub fn position(&self, idx: usize) -> [f64; 2] {
        let a = self.axes(idx);
        let h = self.spacing();
        let mut p = [self.origin + a[0] as f64 * h, 0.0];
        if self.dim == 2 {
            p[1] = self.origin + a[1] as f64 * h;
        }
        p
    }

    pub fn wrapped_mode(&self, i: usize) -> i64 {
        let n = self.points as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn frequency(&self, idx: usize) -> [f64; 2] {
        let a = self.axes(idx);
        let d = self.freq_spacing();
        let mut p = [d * self.wrapped_mode(a[0]) as f64, 0.0];
        if self.dim == 2 {
            p[1] = d * self.wrapped_mode(a[1]) as f64;
        }
        p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Position,
    Frequency,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    grid: GridSpec,
    domain: Domain,
    values: Vec<C64>,
}

impl SampledFunction {
    pub fn new(grid: GridSpec, domain: Domain, values: Vec<C64>) -> Result<Self> {
        ensure(values.len() == grid.len(), || format!("expected {} samples, got {}", grid.len(), values.len()))?;
        ensure(values.iter().all(|z| z.re.is_finite() && z.im.is_finite()), || "samples must be finite".into())?;
        Ok(Self { grid, domain, values })
    }

    /// Samples `f` at the grid nodes of the given domain.
    pub fn from_fn(grid: GridSpec, domain: Domain, f: impl Fn(&[f64]) -> C64) -> Result<Self> {
        let d = grid.dim();
        let values = (0..grid.len())
            .map(|i| {
                let p = match domain {
                    Domain::Position => grid.position(i),
                    Domain::Frequency => grid.frequency(i),
                };
                f(&p[..d])
            })
            .collect();
        Self::new(grid, domain, values)
    }

    pub fn from_real_fn(grid: GridSpec, domain: Domain, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::from_fn(grid, domain, |p| C64::new(f(p), 0.0))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Result<Self> {
        Self::new(self.grid, self.domain, self.values.iter().map(|&z| f(z)).collect())
    }

    pub fn abs(&self) -> Self {
        Self { grid: self.grid, domain: self.domain, values: self.values.iter().map(|z| C64::new(z.norm(), 0.0)).collect() }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|z| z.im == 0.0 && z.re >= 0.0)
    }

    /// Measure carried by one sample.
    pub fn sample_measure(&self) -> f64 {
        match self.domain {
            Domain::Position => self.grid.cell_volume(),
            Domain::Frequency => self.grid.freq_cell_volume(),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.sample_measure()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `mu` with respect to the natural sample measure.
    pub fn rearrangement(&self) -> Result<StepFunction> {
        self.rearrangement_with_width(self.sample_measure())
    }

    pub fn rearrangement_with_width(&self, width: f64) -> Result<StepFunction> {
        StepFunction::from_samples(self.values.iter().map(|z| (z.norm(), width)))
    }

    fn expect(&self, domain: Domain, what: &str) -> Result<()> {
        ensure(self.domain == domain, || format!("{what} must be sampled in the {domain:?} domain"))
    }
}

/// `M_f` as a diagonal operator.
pub fn mult_operator(f: &SampledFunction) -> Result<DenseOperator> {
    f.expect(Domain::Position, "multiplier symbol f")?;
    DenseOperator::diagonal(f.values(), f.grid().cell_volume())
}

/// First column data of the circulant matrix of `g(-i grad)`.
fn circulant_stencil(g: &SampledFunction) -> Vec<C64> {
    let grid = g.grid();
    let mut c = g.values().to_vec();
    fft_nd(&mut c, grid.points(), grid.dim(), true);
    let norm = grid.len() as f64;
    c.iter_mut().for_each(|z| *z /= norm);
    c
}

fn circulant_index(grid: &GridSpec, row: usize, col: usize) -> usize {
    let n = grid.points();
    let (a, b) = (grid.axes(row), grid.axes(col));
    grid.flat([(a[0] + n - b[0]) % n, (a[1] + n - b[1]) % n])
}

/// `g(-i grad)` via the unitary DFT, as a circulant matrix.
pub fn fourier_multiplier(g: &SampledFunction) -> Result<DenseOperator> {
    g.expect(Domain::Frequency, "Fourier symbol g")?;
    let grid = *g.grid();
    let c = circulant_stencil(g);
    let n = grid.len();
    let m = CMatrix::from_fn(n, n, |r, s| c[circulant_index(&grid, r, s)]);
    DenseOperator::new(m, grid.cell_volume())
}

/// `M_f g(-i grad)`.
pub fn classical_product(f: &SampledFunction, g: &SampledFunction) -> Result<DenseOperator> {
    f.expect(Domain::Position, "f")?;
    g.expect(Domain::Frequency, "g")?;
    ensure(f.grid() == g.grid(), || "f and g must share a grid".into())?;
    let grid = *f.grid();
    let c = circulant_stencil(g);
    let fv = f.values();
    let n = grid.len();
    let m = CMatrix::from_fn(n, n, |r, s| fv[r] * c[circulant_index(&grid, r, s)]);
    DenseOperator::new(m, grid.cell_volume())
}

/// `mu(f (x) g)` on phase space.
///
/// Position samples carry `h^d` and frequency samples carry `L^{-d}`, which is
/// `(2 pi / L)^d / (2 pi)^d`. With these widths
/// `||M_f g(-i grad)||_2 = ||f (x) g||_2` holds exactly on the grid.
pub fn phase_space_rearrangement(f: &SampledFunction, g: &SampledFunction) -> Result<StepFunction> {
    f.expect(Domain::Position, "f")?;
    g.expect(Domain::Frequency, "g")?;
    let mf = f.rearrangement_with_width(f.grid().cell_volume())?;
    let mg = g.rearrangement_with_width(g.grid().side().powi(-(g.grid().dim() as i32)))?;
    mf.tensor(&mg)
}

/// Outer (sequence) norm applied to a profile of cell norms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OuterNorm {
    /// `l_p`, `p = inf` allowed.
    Lp(f64),
    /// weak `l_{p, inf}`.
    WeakLp(f64),
    /// `(sum_m (1 + log max(|m|, 1)) a_m^2)^{1/2}`.
    L2Log,
}

/// Inner `L_q` norms of a function over unit cells, keyed by cell index.
#[derive(Clone, Debug, PartialEq)]
pub struct CellNormProfile {
    pub inner_q: f64,
    pub cells: BTreeMap<[i64; 2], f64>,
}

const ALIGN_TOL: f64 = 1e-9;

fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() < ALIGN_TOL
}

/// Norms of `f` restricted to the unit cells `m + [0, 1)^d`.
///
/// Position samples must tile the unit cells exactly (`N / L` integral and the
/// origin on the lattice); otherwise the call is rejected. Frequency samples
/// cannot tile unit cells in general, so each sample's cell is split across
/// the unit cells it overlaps in proportion to the overlap.
pub fn cell_profile(f: &SampledFunction, inner_q: f64) -> Result<CellNormProfile> {
    ensure(inner_q > 0.0, || format!("inner exponent {inner_q} must be positive"))?;
    let grid = *f.grid();
    let d = grid.dim();
    let mut acc: BTreeMap<[i64; 2], f64> = BTreeMap::new();
    let mut add = |cell: [i64; 2], mag: f64, measure: f64| {
        let e = acc.entry(cell).or_insert(0.0);
        if inner_q.is_infinite() {
            *e = e.max(mag);
        } else {
            *e += mag.powf(inner_q) * measure;
        }
    };
    match f.domain() {
        Domain::Position => {
            let h = grid.spacing();
            if !(near_integer(1.0 / h) && near_integer(grid.origin() / h)) {
                return invalid(format!(
                    "position grid (L = {}, N = {}) is not aligned with the unit cells",
                    grid.side(),
                    grid.points()
                ));
            }
            for (i, z) in f.values().iter().enumerate() {
                let p = grid.position(i);
                let mut cell = [0i64; 2];
                for a in 0..d {
                    cell[a] = (p[a] + 0.5 * h).floor() as i64;
                }
                add(cell, z.norm(), grid.cell_volume());
            }
        }
        Domain::Frequency => {
            let delta = grid.freq_spacing();
            for (i, z) in f.values().iter().enumerate() {
                let p = grid.frequency(i);
                let mut pieces: Vec<Vec<(i64, f64)>> = Vec::with_capacity(d);
                for &pa in p.iter().take(d) {
                    let (lo, hi) = (pa, pa + delta);
                    let mut axis = Vec::new();
                    let mut m = lo.floor() as i64;
                    while (m as f64) < hi {
                        let ov = hi.min(m as f64 + 1.0) - lo.max(m as f64);
                        if ov > 0.0 {
                            axis.push((m, ov));
                        }
                        m += 1;
                    }
                    pieces.push(axis);
                }
                if d == 1 {
                    for &(m, ov) in &pieces[0] {
                        add([m, 0], z.norm(), ov);
                    }
                } else {
                    for &(m0, o0) in &pieces[0] {
                        for &(m1, o1) in &pieces[1] {
                            add([m0, m1], z.norm(), o0 * o1);
                        }
                    }
                }
            }
        }
    }
    if inner_q.is_finite() {
        acc.values_mut().for_each(|v| *v = v.powf(1.0 / inner_q));
    }
    Ok(CellNormProfile { inner_q, cells: acc })
}

fn sequence_norm(mut vals: Vec<f64>, outer: OuterNorm) -> Result<f64> {
    match outer {
        OuterNorm::Lp(p) => {
            ensure(p > 0.0, || format!("outer exponent {p} must be positive"))?;
            if p.is_infinite() {
                Ok(vals.into_iter().fold(0.0, f64::max))
            } else {
                Ok(vals.iter().map(|a| a.powf(p)).sum::<f64>().powf(1.0 / p))
            }
        }
        OuterNorm::WeakLp(p) => {
            ensure(p.is_finite() && p > 0.0, || format!("outer exponent {p} must be positive and finite"))?;
            vals.sort_by(|a, b| b.total_cmp(a));
            Ok(vals.iter().enumerate().map(|(k, a)| ((k + 1) as f64).powf(1.0 / p) * a).fold(0.0, f64::max))
        }
        OuterNorm::L2Log => invalid("the logarithmic weight needs cell indices"),
    }
}

impl CellNormProfile {
    pub fn outer_norm(&self, outer: OuterNorm) -> Result<f64> {
        match outer {
            OuterNorm::L2Log => Ok(self
                .cells
                .iter()
                .map(|(m, a)| {
                    let r = ((m[0] * m[0] + m[1] * m[1]) as f64).sqrt().max(1.0);
                    (1.0 + r.ln()) * a * a
                })
                .sum::<f64>()
                .sqrt()),
            other => sequence_norm(self.cells.values().copied().collect(), other),
        }
    }

    /// Outer norm of the profile of `f (x) g`, whose cell norms are products.
    pub fn tensor_outer_norm(&self, other: &Self, outer: OuterNorm) -> Result<f64> {
        let vals = self.cells.values().flat_map(|a| other.cells.values().map(move |b| a * b)).collect();
        sequence_norm(vals, outer)
    }
}

/// `|| f ||_{outer(L_q)}` over unit cells.
pub fn mixed_cell_norm(f: &SampledFunction, inner_q: f64, outer: OuterNorm) -> Result<f64> {
    cell_profile(f, inner_q)?.outer_norm(outer)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1(l: f64, n: usize) -> GridSpec {
        GridSpec::periodic(1, l, n).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::periodic(1, 1.0, 7).is_err());
        assert!(GridSpec::periodic(3, 1.0, 8).is_err());
        assert!(GridSpec::periodic(1, -1.0, 8).is_err());
    }

    #[test]
    fn multiplier_of_translation_phase_shifts() {
        let g = grid1(8.0, 16);
        let a = 3.0 * g.spacing();
        let sym = SampledFunction::from_fn(g, Domain::Frequency, |xi| C64::from_polar(1.0, xi[0] * a)).unwrap();
        let m = fourier_multiplier(&sym).unwrap();
        for r in 0..16 {
            for c in 0..16 {
                let expect = if c == (r + 3) % 16 { 1.0 } else { 0.0 };
                assert!((m.entries()[(r, c)] - C64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn hs_norm_matches_phase_space() {
        let g = GridSpec::periodic(2, 4.0, 8).unwrap();
        let f = SampledFunction::from_real_fn(g, Domain::Position, |x| (x[0] - x[1]).sin() + 0.3).unwrap();
        let s = SampledFunction::from_real_fn(g, Domain::Frequency, |k| 1.0 / (1.0 + k[0] * k[0] + k[1].abs())).unwrap();
        let op = classical_product(&f, &s).unwrap();
        let mu = phase_space_rearrangement(&f, &s).unwrap();
        let lhs = op.frobenius_norm();
        let rhs = mu.schatten_norm(2.0).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * rhs);
    }

    #[test]
    fn constant_symbols_have_total_width_n_to_the_d() {
        let g = GridSpec::periodic(2, 3.0, 6).unwrap();
        let one = |dom| SampledFunction::from_real_fn(g, dom, |_| 1.0).unwrap();
        let mu = phase_space_rearrangement(&one(Domain::Position), &one(Domain::Frequency)).unwrap();
        assert!((mu.total_width() - 36.0).abs() < 1e-12);
    }

    #[test]
    fn cell_norms() {
        let g = grid1(4.0, 16);
        let f = SampledFunction::from_real_fn(g, Domain::Position, |x| if x[0] < 1.0 { 2.0 } else { 0.0 }).unwrap();
        assert!((mixed_cell_norm(&f, 2.0, OuterNorm::Lp(1.0)).unwrap() - 2.0).abs() < 1e-12);
        assert!((mixed_cell_norm(&f, f64::INFINITY, OuterNorm::WeakLp(1.0)).unwrap() - 2.0).abs() < 1e-12);
        let two = SampledFunction::from_real_fn(g, Domain::Position, |x| if x[0] < 2.0 { 1.0 } else { 0.0 }).unwrap();
        let log = mixed_cell_norm(&two, 2.0, OuterNorm::L2Log).unwrap();
        assert!((log - 2f64.sqrt()).abs() < 1e-12);
        let bad = SampledFunction::from_real_fn(grid1(3.5, 16), Domain::Position, |_| 1.0).unwrap();
        assert!(mixed_cell_norm(&bad, 2.0, OuterNorm::Lp(1.0)).is_err());
    }

    #[test]
    fn frequency_cells_split_mass() {
        let g = grid1(2.0 * PI * 2.5, 16);
        let f = SampledFunction::from_real_fn(g, Domain::Frequency, |_| 1.0).unwrap();
        let p = cell_profile(&f, 2.0).unwrap();
        let total: f64 = p.cells.values().map(|a| a * a).sum();
        assert!((total - 16.0 * g.freq_spacing()).abs() < 1e-12);
    }
}
