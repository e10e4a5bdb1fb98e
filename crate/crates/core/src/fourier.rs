//! Unnormalized multi-dimensional FFTs on row-major cubic arrays.

use rustfft::FftPlanner;

use crate::linalg::C64;

/// In-place FFT over every axis of an `n^dim` row-major array.
/// Forward uses `e^{-2 pi i k j / n}`; neither direction is normalized.
pub fn fft_nd(data: &mut [C64], n: usize, dim: usize, inverse: bool) {
    assert_eq!(data.len(), n.pow(dim as u32), "array is not n^dim");
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let mut line = vec![C64::new(0.0, 0.0); n];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + k * stride];
                }
                fft.process(&mut line);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride] = *v;
                }
            }
        }
    }
}

/// Linear (non-cyclic) convolution of two real `n^dim` arrays, giving a
/// `(2n)^dim` array whose index `i` holds `sum_j a[j] b[i - j]`.
pub fn linear_convolution(a: &[f64], b: &[f64], n: usize, dim: usize) -> Vec<f64> {
    let m = 2 * n;
    let pad = |src: &[f64]| -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); m.pow(dim as u32)];
        for (idx, v) in src.iter().enumerate() {
            out[remap(idx, n, m, dim)] = C64::new(*v, 0.0);
        }
        out
    };
    let mut fa = pad(a);
    let mut fb = pad(b);
    fft_nd(&mut fa, m, dim, false);
    fft_nd(&mut fb, m, dim, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    fft_nd(&mut fa, m, dim, true);
    let norm = m.pow(dim as u32) as f64;
    fa.into_iter().map(|z| z.re / norm).collect()
}

fn remap(idx: usize, n: usize, m: usize, dim: usize) -> usize {
    let mut rest = idx;
    let mut out = 0;
    let mut scale = 1;
    for _ in 0..dim {
        out += (rest % n) * scale;
        rest /= n;
        scale *= m;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_2d() {
        let n = 8;
        let orig: Vec<C64> = (0..n * n).map(|i| C64::new(i as f64, (i * i % 7) as f64)).collect();
        let mut d = orig.clone();
        fft_nd(&mut d, n, 2, false);
        fft_nd(&mut d, n, 2, true);
        for (a, b) in d.iter().zip(&orig) {
            assert!((a / (n * n) as f64 - b).norm() < 1e-12);
        }
    }

    #[test]
    fn convolution_matches_direct_sum_1d() {
        let a = [1.0, 2.0, 0.0, -1.0];
        let b = [0.5, 0.0, 3.0, 1.0];
        let c = linear_convolution(&a, &b, 4, 1);
        for i in 0..8 {
            let direct: f64 = (0..4).filter(|&j| i >= j && i - j < 4).map(|j| a[j] * b[i - j]).sum();
            assert!((c[i] - direct).abs() < 1e-12);
        }
    }
}
