//! Iterative radix-2 decimation-in-time FFT for real input.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct Complex {
    re: f64,
    im: f64,
}

impl Complex {
    #[inline]
    fn mul(self, o: Complex) -> Complex {
        Complex { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
    #[inline]
    fn add(self, o: Complex) -> Complex {
        Complex { re: self.re + o.re, im: self.im + o.im }
    }
    #[inline]
    fn sub(self, o: Complex) -> Complex {
        Complex { re: self.re - o.re, im: self.im - o.im }
    }
}

/// In-place transform; `buf.len()` must be a power of two.
fn fft_in_place(buf: &mut [Complex]) {
    let n = buf.len();
    let bits = n.trailing_zeros();
    if n <= 1 {
        return;
    }
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    // twiddles for the full length; sub-stages stride through them
    let twiddles: Vec<Complex> = (0..n / 2)
        .map(|k| {
            let ang = -TAU * k as f64 / n as f64;
            Complex { re: ang.cos(), im: ang.sin() }
        })
        .collect();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let a = buf[start + k];
                let b = buf[start + k + half].mul(w);
                buf[start + k] = a.add(b);
                buf[start + k + half] = a.sub(b);
            }
        }
        len <<= 1;
    }
}

/// `|X_k|` for `k = 0..n` of the DFT `X_k = sum_j x_j e^{-2 pi i jk/n}`.
///
/// The input length must be a power of two (512 for a standard window).
pub fn fft_magnitudes(series: &[f64]) -> Result<Vec<f64>> {
    let n = series.len();
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::Contract(format!(
            "FFT input length {n} is not a power of two >= 2"
        )));
    }
    let mut buf: Vec<Complex> = series.iter().map(|&re| Complex { re, im: 0.0 }).collect();
    fft_in_place(&mut buf);
    Ok(buf.iter().map(|c| c.re.hypot(c.im)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_dc_only() {
        let m = fft_magnitudes(&[2.5; 512]).unwrap();
        assert!((m[0] - 512.0 * 2.5).abs() < 1e-9);
        assert!(m[1..].iter().all(|&v| v < 1e-9));
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(matches!(fft_magnitudes(&[1.0; 500]), Err(Error::Contract(_))));
        assert!(fft_magnitudes(&[1.0; 1]).is_err());
        assert_eq!(fft_magnitudes(&[1.0; 8]).unwrap().len(), 8);
    }
}
