//! Non-increasing step functions on `[0, inf)`.
//!
//! A [`StepFunction`] is the decreasing rearrangement `mu` of something: a
//! list of `(value, width)` segments with strictly decreasing positive values,
//! optionally followed by a power tail `c t^{-a}`. Beyond the last segment
//! (and without a tail) the function vanishes.

use crate::error::{ensure, invalid, Result};

/// Relative tolerance used to merge nearly equal adjacent values.
pub const MERGE_RTOL: f64 = 1e-12;

/// Default relative variation allowed per piece when refining a Cesaro mean.
pub const CESARO_RTOL: f64 = 1e-6;

/// `mu(t) = coeff * t^{-exponent}` for `t` past the finite segments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerTail {
    pub coeff: f64,
    pub exponent: f64,
}

impl PowerTail {
    fn value(&self, t: f64) -> f64 {
        self.coeff * t.powf(-self.exponent)
    }

    /// Integral of the tail over `[a, b]`, `0 <= a <= b <= inf`.
    fn integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let e = self.exponent;
        if (e - 1.0).abs() < 1e-15 {
            if a == 0.0 || b.is_infinite() {
                return f64::INFINITY;
            }
            return self.coeff * (b / a).ln();
        }
        let anti = |t: f64| -> f64 {
            if t == 0.0 {
                if e < 1.0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            } else if t.is_infinite() {
                if e > 1.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                t.powf(1.0 - e) / (1.0 - e)
            }
        };
        let (fa, fb) = (anti(a), anti(b));
        if fb.is_infinite() || fa.is_infinite() {
            return f64::INFINITY;
        }
        self.coeff * (fb - fa)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    values: Vec<f64>,
    widths: Vec<f64>,
    ends: Vec<f64>,
    tail: Option<PowerTail>,
}

impl StepFunction {
    pub fn zero() -> Self {
        Self { values: vec![], widths: vec![], ends: vec![], tail: None }
    }

    /// Builds from already ordered segments; values must be non-increasing.
    pub fn new(segments: &[(f64, f64)], tail: Option<PowerTail>) -> Result<Self> {
        for &(v, w) in segments {
            ensure(v.is_finite() && v >= 0.0, || format!("segment value {v} is not a finite non-negative number"))?;
            ensure(w.is_finite() && w > 0.0, || format!("segment width {w} must be positive and finite"))?;
        }
        for pair in segments.windows(2) {
            ensure(pair[1].0 <= pair[0].0 * (1.0 + MERGE_RTOL), || {
                format!("segment values must be non-increasing ({} then {})", pair[0].0, pair[1].0)
            })?;
        }
        let mut f = Self::canonical(segments.iter().copied());
        if let Some(t) = tail {
            ensure(t.coeff.is_finite() && t.coeff > 0.0, || "tail coefficient must be positive".into())?;
            ensure(t.exponent.is_finite() && t.exponent > 0.0, || "tail exponent must be positive".into())?;
            let start = f.finite_width();
            if let Some(&last) = f.values.last() {
                ensure(t.value(start) <= last * (1.0 + 1e-9), || "tail exceeds the last segment value".into())?;
            } else {
                ensure(start == 0.0, || "tail start mismatch".into())?;
            }
            f.tail = Some(t);
        }
        Ok(f)
    }

    /// Decreasing rearrangement of a sampled function: `(|value|, cell measure)` pairs.
    pub fn from_samples(samples: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut pts = Vec::new();
        for (v, w) in samples {
            ensure(v.is_finite(), || format!("sample value {v} is not finite"))?;
            ensure(w.is_finite() && w > 0.0, || format!("sample weight {w} must be positive and finite"))?;
            pts.push((v.abs(), w));
        }
        pts.sort_by(|a, b| b.0.total_cmp(&a.0));
        Ok(Self::canonical(pts.into_iter()))
    }

    /// Pure power function `c t^{-a}` on `(0, inf)`.
    pub fn power_law(coeff: f64, exponent: f64) -> Result<Self> {
        Self::new(&[], Some(PowerTail { coeff, exponent }))
    }

    fn canonical(sorted: impl Iterator<Item = (f64, f64)>) -> Self {
        let mut values: Vec<f64> = Vec::new();
        let mut widths: Vec<f64> = Vec::new();
        for (v, w) in sorted {
            if v == 0.0 {
                continue;
            }
            if let (Some(lv), Some(lw)) = (values.last_mut(), widths.last_mut()) {
                if (*lv - v).abs() <= MERGE_RTOL * lv.max(v) {
                    // weighted mean keeps the integral exact
                    *lv = (*lv * *lw + v * w) / (*lw + w);
                    *lw += w;
                    continue;
                }
            }
            values.push(v);
            widths.push(w);
        }
        let mut ends = Vec::with_capacity(widths.len());
        let mut acc = 0.0;
        for w in &widths {
            acc += w;
            ends.push(acc);
        }
        Self { values, widths, ends, tail: None }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn segments(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.widths.iter().copied())
    }

    /// Right endpoints of the finite segments.
    pub fn breakpoints(&self) -> &[f64] {
        &self.ends
    }

    pub fn tail(&self) -> Option<PowerTail> {
        self.tail
    }

    pub fn is_finitely_supported(&self) -> bool {
        self.tail.is_none()
    }

    pub fn num_segments(&self) -> usize {
        self.values.len()
    }

    pub fn finite_width(&self) -> f64 {
        self.ends.last().copied().unwrap_or(0.0)
    }

    pub fn total_width(&self) -> f64 {
        if self.tail.is_some() {
            f64::INFINITY
        } else {
            self.finite_width()
        }
    }

    /// Right-continuous evaluation `mu(t)`.
    pub fn value_at(&self, t: f64) -> f64 {
        assert!(t >= 0.0, "mu is defined on [0, inf)");
        let i = self.ends.partition_point(|&e| e <= t);
        if i < self.values.len() {
            return self.values[i];
        }
        match self.tail {
            Some(tail) => tail.value(t),
            None => 0.0,
        }
    }

    /// `int_0^t mu`.
    pub fn integral_to(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let i = self.ends.partition_point(|&e| e <= t);
        let mut acc: f64 = self.values[..i].iter().zip(&self.widths[..i]).map(|(v, w)| v * w).sum();
        if i < self.values.len() {
            let start = if i == 0 { 0.0 } else { self.ends[i - 1] };
            acc += self.values[i] * (t - start);
        } else if let Some(tail) = self.tail {
            acc += tail.integral(self.finite_width(), t);
        }
        acc
    }

    pub fn total_integral(&self) -> f64 {
        self.integral_to(f64::INFINITY)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        ensure(c.is_finite() && c >= 0.0, || format!("scale factor {c} must be finite and non-negative"))?;
        if c == 0.0 {
            return Ok(Self::zero());
        }
        let segs: Vec<_> = self.segments().map(|(v, w)| (v * c, w)).collect();
        let tail = self.tail.map(|t| PowerTail { coeff: t.coeff * c, exponent: t.exponent });
        Self::new(&segs, tail)
    }

    /// `mu^q`, which is again non-increasing.
    pub fn power(&self, q: f64) -> Result<Self> {
        ensure(q.is_finite() && q > 0.0, || format!("power {q} must be positive"))?;
        let segs: Vec<_> = self.segments().map(|(v, w)| (v.powf(q), w)).collect();
        let tail = self.tail.map(|t| PowerTail { coeff: t.coeff.powf(q), exponent: t.exponent * q });
        Self::new(&segs, tail)
    }

    /// `int mu^p`, possibly infinite.
    pub fn integral_of_power(&self, p: f64) -> f64 {
        let mut acc: f64 = self.segments().map(|(v, w)| v.powf(p) * w).sum();
        if let Some(t) = self.tail {
            let tp = PowerTail { coeff: t.coeff.powf(p), exponent: t.exponent * p };
            acc += tp.integral(self.finite_width(), f64::INFINITY);
        }
        acc
    }

    /// `(int mu^p)^{1/p}`; `p = inf` gives the supremum.
    pub fn schatten_norm(&self, p: f64) -> Result<f64> {
        ensure(p > 0.0, || format!("Schatten exponent {p} must be positive"))?;
        if p.is_infinite() {
            return Ok(self.sup());
        }
        Ok(self.integral_of_power(p).powf(1.0 / p))
    }

    pub fn sup(&self) -> f64 {
        match (self.values.first(), self.tail) {
            (Some(&v), _) => v,
            (None, Some(_)) => f64::INFINITY,
            (None, None) => 0.0,
        }
    }

    /// `sup_t t^{1/p} mu(t)`, attained in the limit at segment right endpoints.
    pub fn lorentz_quasinorm(&self, p: f64) -> Result<f64> {
        ensure(p.is_finite() && p > 0.0, || format!("Lorentz exponent {p} must be positive and finite"))?;
        let r = 1.0 / p;
        let mut best: f64 = self.ends.iter().zip(&self.values).map(|(e, v)| e.powf(r) * v).fold(0.0, f64::max);
        if let Some(t) = self.tail {
            let critical = (t.exponent - r).abs() <= 1e-15;
            if t.exponent < r - 1e-15 || (self.values.is_empty() && !critical) {
                return Ok(f64::INFINITY);
            }
            if critical {
                best = best.max(t.coeff);
            }
        }
        Ok(best)
    }

    /// `(int_0^1 mu^2)^{1/2}`.
    pub fn l2linf_gauge(&self) -> f64 {
        self.power(2.0).map(|sq| sq.integral_to(1.0).sqrt()).unwrap_or(0.0)
    }

    /// `(1/t) int_0^t mu`.
    pub fn cesaro_at(&self, t: f64) -> f64 {
        if t == 0.0 {
            return self.sup();
        }
        self.integral_to(t) / t
    }

    /// Cesaro mean `C mu` with the default refinement tolerance.
    pub fn cesaro(&self) -> Result<Self> {
        self.cesaro_with_tolerance(CESARO_RTOL)
    }

    /// Cesaro mean as a step function. On each segment `C mu = v + c/t` is
    /// split until adjacent pieces differ by at most `rtol` (relative); pieces
    /// take their left endpoint value, so the result dominates `C mu`.
    /// Beyond the support the mean is the exact tail `(int mu) / t`.
    pub fn cesaro_with_tolerance(&self, rtol: f64) -> Result<Self> {
        ensure(self.tail.is_none(), || "Cesaro mean needs a finitely supported function".into())?;
        ensure(rtol > 0.0 && rtol < 1.0, || format!("refinement tolerance {rtol} out of range"))?;
        let mut segs = Vec::new();
        let mut start = 0.0;
        let mut mass = 0.0;
        for (v, w) in self.segments() {
            let end = start + w;
            let c = mass - v * start;
            if c <= 0.0 {
                segs.push((v, w));
            } else {
                let mut t = start;
                while t < end {
                    let denom = c / t - rtol * v;
                    let mut next = if denom > 0.0 { (1.0 + rtol) * c / denom } else { end };
                    if next <= t || next.is_nan() || next >= end * (1.0 - 1e-15) {
                        next = end;
                    }
                    segs.push((v + c / t, next - t));
                    t = next;
                }
            }
            mass += v * w;
            start = end;
        }
        let tail = (mass > 0.0).then_some(PowerTail { coeff: mass, exponent: 1.0 });
        Self::new(&segs, tail)
    }

    /// `mu(f (x) g)` for finitely supported rearrangements.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        ensure(self.tail.is_none() && other.tail.is_none(), || {
            "tensor rearrangement needs finitely supported inputs".into()
        })?;
        let mut pts = Vec::with_capacity(self.values.len() * other.values.len());
        for (a, wa) in self.segments() {
            for (b, wb) in other.segments() {
                pts.push((a * b, wa * wb));
            }
        }
        Self::from_samples(pts)
    }

    /// `mu` of a direct sum: the disjoint union of all segments.
    pub fn direct_sum(parts: &[Self]) -> Result<Self> {
        ensure(parts.iter().all(|p| p.tail.is_none()), || "direct sum needs finitely supported inputs".into())?;
        Self::from_samples(parts.iter().flat_map(|p| p.segments().collect::<Vec<_>>()))
    }

    /// Pointwise sum of rearrangements, again non-increasing.
    pub fn pointwise_sum(parts: &[Self]) -> Result<Self> {
        if parts.iter().any(|p| p.tail.is_some()) {
            return invalid("pointwise sum needs finitely supported inputs");
        }
        let mut cuts: Vec<f64> = parts.iter().flat_map(|p| p.ends.iter().copied()).collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut segs = Vec::with_capacity(cuts.len());
        let mut prev = 0.0;
        for &c in &cuts {
            if c > prev {
                let mid = 0.5 * (prev + c);
                let v: f64 = parts.iter().map(|p| p.value_at(mid)).sum();
                segs.push((v, c - prev));
                prev = c;
            }
        }
        Self::new(&segs, None)
    }
}
